//! Dense symmetric LDLᵀ factorization without pivoting.
//!
//! Without pivoting, the factors of the leading `m×m` block of a matrix are
//! the leading blocks of the full factors, so one factorization answers
//! solves for every leading block.

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct Ldlt {
    /// Row `i` holds `L[i][0..i]`; the unit diagonal is implicit.
    lower: Vec<Vec<f64>>,
    diag: Vec<f64>,
}

impl Ldlt {
    /// Factors the symmetric `n×n` matrix whose `(i, k)` entry is
    /// `entry(i, k)`; only `k ≤ i` is queried.
    pub fn factor(n: usize, entry: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let mut lower: Vec<Vec<f64>> = Vec::with_capacity(n);
        let mut diag: Vec<f64> = Vec::with_capacity(n);
        for i in 0..n {
            // First pass leaves W[i][k] = L[i][k]·d[k] in `row`.
            let mut row = vec![0.0; i];
            for k in 0..i {
                let dot: f64 = row[..k].iter().zip(&lower[k]).map(|(w, l)| w * l).sum();
                row[k] = entry(i, k) - dot;
            }
            let mut d = entry(i, i);
            for k in 0..i {
                let w = row[k];
                row[k] = w / diag[k];
                d -= row[k] * w;
            }
            if !(d.is_finite() && d > 0.0) {
                return Err(Error::Solver(format!("non-positive pivot {d:e} at row {i}")));
            }
            diag.push(d);
            lower.push(row);
        }
        Ok(Ldlt { lower, diag })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn pivots(&self) -> &[f64] {
        &self.diag
    }

    /// Solves the leading `b.len() × b.len()` block against `b`.
    pub fn solve_leading(&self, b: &[f64]) -> Result<Vec<f64>> {
        let m = b.len();
        if m > self.dim() {
            return Err(Error::Solver(format!(
                "block of size {m} exceeds factorization of size {}",
                self.dim()
            )));
        }
        let mut y = b.to_vec();
        for i in 0..m {
            let s: f64 = self.lower[i].iter().zip(&y[..i]).map(|(l, v)| l * v).sum();
            y[i] -= s;
        }
        for i in 0..m {
            y[i] /= self.diag[i];
        }
        for i in (0..m).rev() {
            let yi = y[i];
            for (k, l) in self.lower[i].iter().enumerate() {
                y[k] -= l * yi;
            }
        }
        if y.iter().all(|v| v.is_finite()) {
            Ok(y)
        } else {
            Err(Error::Solver("non-finite solution".into()))
        }
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        if b.len() != self.dim() {
            return Err(Error::Solver(format!(
                "right-hand side has length {}, expected {}",
                b.len(),
                self.dim()
            )));
        }
        self.solve_leading(b)
    }
}
