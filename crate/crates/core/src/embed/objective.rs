//! Negative-sampling objective.
//!
//! For an input vector `h`, a positive output vector `u_p` and negatives
//! `u_n`, the per-example loss is
//! `-ln σ(h·u_p) - Σ ln σ(-h·u_n)`.

use crate::vecmath::{axpy, dot, SharedMatrix};

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `-ln σ(x)` without overflow.
pub fn neg_log_sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        (-x).exp().ln_1p()
    } else {
        -x + x.exp().ln_1p()
    }
}

pub fn ns_loss(h: &[f64], positive: &[f64], negatives: &[&[f64]]) -> f64 {
    neg_log_sigmoid(dot(h, positive))
        + negatives
            .iter()
            .map(|n| neg_log_sigmoid(-dot(h, n)))
            .sum::<f64>()
}

#[derive(Debug, Clone, PartialEq)]
pub struct NsGradient {
    pub input: Vec<f64>,
    pub positive: Vec<f64>,
    pub negatives: Vec<Vec<f64>>,
}

/// Gradient of [`ns_loss`] with respect to every argument.
pub fn ns_gradient(h: &[f64], positive: &[f64], negatives: &[&[f64]]) -> NsGradient {
    let mut input = vec![0.0; h.len()];
    // d/ds of -ln σ(s) is σ(s) - 1; of -ln σ(-s) is σ(s)
    let gp = sigmoid(dot(h, positive)) - 1.0;
    axpy(gp, positive, &mut input);
    let pos_grad = h.iter().map(|x| gp * x).collect();
    let mut neg_grads = Vec::with_capacity(negatives.len());
    for n in negatives {
        let gn = sigmoid(dot(h, n));
        axpy(gn, n, &mut input);
        neg_grads.push(h.iter().map(|x| gn * x).collect());
    }
    NsGradient {
        input,
        positive: pos_grad,
        negatives: neg_grads,
    }
}

/// CBOW loss: the input vector is the mean of the context vectors.
pub fn cbow_loss(contexts: &[&[f64]], positive: &[f64], negatives: &[&[f64]]) -> f64 {
    ns_loss(&mean(contexts), positive, negatives)
}

/// Gradient of [`cbow_loss`]; every context vector receives `d_h / |contexts|`.
pub fn cbow_gradient(
    contexts: &[&[f64]],
    positive: &[f64],
    negatives: &[&[f64]],
) -> (Vec<Vec<f64>>, NsGradient) {
    let g = ns_gradient(&mean(contexts), positive, negatives);
    let share: Vec<f64> = g.input.iter().map(|x| x / contexts.len() as f64).collect();
    (vec![share; contexts.len()], g)
}

pub(crate) fn mean(vectors: &[&[f64]]) -> Vec<f64> {
    let mut out = vec![0.0; vectors.first().map_or(0, |v| v.len())];
    for v in vectors {
        axpy(1.0, v, &mut out);
    }
    let n = vectors.len().max(1) as f64;
    out.iter_mut().for_each(|x| *x /= n);
    out
}

/// One SGD step on the output side of the objective.
///
/// Updates each target row of `output` in place with learning rate `lr` and
/// accumulates the descent step for `h` into `h_step`
/// (`h_step -= lr * dL/dh`). Targets equal to `positive` are skipped among
/// the negatives. Returns the loss before the update.
pub(crate) fn ns_step(
    h: &[f64],
    positive: usize,
    negatives: &[usize],
    output: &SharedMatrix,
    lr: f64,
    h_step: &mut [f64],
    scratch: &mut [f64],
) -> f64 {
    let mut loss = 0.0;
    let targets = std::iter::once((positive, true)).chain(
        negatives
            .iter()
            .filter(|&&n| n != positive)
            .map(|&n| (n, false)),
    );
    for (t, is_positive) in targets {
        output.read_row(t, scratch);
        let s = dot(h, scratch);
        let g = if is_positive {
            loss += neg_log_sigmoid(s);
            sigmoid(s) - 1.0
        } else {
            loss += neg_log_sigmoid(-s);
            sigmoid(s)
        };
        axpy(-lr * g, scratch, h_step);
        output.add_to_row(t, -lr * g, h);
    }
    loss
}
