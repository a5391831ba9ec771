//! Precision, recall and F1 from one-vs-rest counts.

use serde::Serialize;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Counts {
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

pub fn f1(precision: f64, recall: f64) -> f64 {
    if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    }
}

impl Counts {
    /// A zero denominator yields 0 for that metric.
    pub fn prf(&self) -> Prf {
        let ratio = |a: u64, b: u64| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        let precision = ratio(self.tp, self.tp + self.fp);
        let recall = ratio(self.tp, self.tp + self.fn_);
        Prf {
            precision,
            recall,
            f1: f1(precision, recall),
        }
    }

    pub fn support(&self) -> u64 {
        self.tp + self.fn_
    }
}

impl std::ops::AddAssign for Counts {
    fn add_assign(&mut self, o: Counts) {
        self.tp += o.tp;
        self.fp += o.fp;
        self.fn_ += o.fn_;
    }
}

/// Unweighted mean of per-class scores.
pub fn macro_average<'a>(scores: impl IntoIterator<Item = &'a Prf>) -> Prf {
    let mut acc = Prf::default();
    let mut n = 0usize;
    for s in scores {
        acc.precision += s.precision;
        acc.recall += s.recall;
        acc.f1 += s.f1;
        n += 1;
    }
    if n > 0 {
        acc.precision /= n as f64;
        acc.recall /= n as f64;
        acc.f1 /= n as f64;
    }
    acc
}

/// Mean of per-class scores weighted by support.
pub fn weighted_average<'a>(scores: impl IntoIterator<Item = (&'a Prf, u64)>) -> Prf {
    let mut acc = Prf::default();
    let mut total = 0u64;
    for (s, w) in scores {
        acc.precision += s.precision * w as f64;
        acc.recall += s.recall * w as f64;
        acc.f1 += s.f1 * w as f64;
        total += w;
    }
    if total > 0 {
        let t = total as f64;
        acc.precision /= t;
        acc.recall /= t;
        acc.f1 /= t;
    }
    acc
}
