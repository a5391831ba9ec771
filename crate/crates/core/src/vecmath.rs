//! Dense row-major matrices and a few vector helpers.

use std::sync::atomic::{AtomicU64, Ordering};

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Cosine similarity; zero vectors have similarity 0 to everything.
pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let d = norm(a) * norm(b);
    if d == 0.0 {
        0.0
    } else {
        dot(a, b) / d
    }
}

pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data has the wrong length");
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }
}

/// Matrix whose rows may be updated from several threads without locks.
///
/// Entries are stored as `f64` bit patterns in relaxed atomics: a concurrent
/// read-modify-write can lose an update but never produces a torn value.
pub(crate) struct SharedMatrix {
    cols: usize,
    data: Vec<AtomicU64>,
}

impl SharedMatrix {
    pub fn from_matrix(m: &Matrix) -> Self {
        SharedMatrix {
            cols: m.cols,
            data: m.data.iter().map(|x| AtomicU64::new(x.to_bits())).collect(),
        }
    }

    pub fn to_matrix(&self) -> Matrix {
        Matrix {
            rows: self.data.len() / self.cols.max(1),
            cols: self.cols,
            data: self
                .data
                .iter()
                .map(|x| f64::from_bits(x.load(Ordering::Relaxed)))
                .collect(),
        }
    }

    pub fn read_row(&self, r: usize, out: &mut [f64]) {
        let base = r * self.cols;
        for (j, o) in out.iter_mut().enumerate() {
            *o = f64::from_bits(self.data[base + j].load(Ordering::Relaxed));
        }
    }

    /// `row += alpha * x`
    pub fn add_to_row(&self, r: usize, alpha: f64, x: &[f64]) {
        let base = r * self.cols;
        for (j, xj) in x.iter().enumerate() {
            let cell = &self.data[base + j];
            let v = f64::from_bits(cell.load(Ordering::Relaxed)) + alpha * xj;
            cell.store(v.to_bits(), Ordering::Relaxed);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cosine_basics() {
        assert!((cosine(&[1.0, 2.0], &[1.0, 2.0]) - 1.0).abs() < 1e-15);
        assert_eq!(cosine(&[0.0, 0.0], &[1.0, 2.0]), 0.0);
        assert!(cosine(&[1.0, 0.0], &[0.0, 1.0]).abs() < 1e-15);
    }

    #[test]
    fn shared_roundtrip() {
        let m = Matrix::from_vec(2, 2, vec![1.0, 2.0, 3.0, 4.0]);
        let s = SharedMatrix::from_matrix(&m);
        s.add_to_row(1, 2.0, &[1.0, 1.0]);
        let mut buf = [0.0; 2];
        s.read_row(1, &mut buf);
        assert_eq!(buf, [5.0, 6.0]);
        assert_eq!(s.to_matrix().row(0), &[1.0, 2.0]);
    }
}
