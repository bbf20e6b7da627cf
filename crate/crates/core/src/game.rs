//! Payoff matrices and periodic schedules.

use crate::error::{Error, Result};

/// Dense row-major payoff matrix. Rows belong to the maximising player.
#[derive(Debug, Clone, PartialEq)]
pub struct PayoffMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl PayoffMatrix {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::invalid("payoff matrix rows have different lengths"));
        }
        Self::from_flat(m, n, rows.concat())
    }

    pub fn from_flat(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows < 2 || cols < 2 {
            return Err(Error::invalid(format!(
                "payoff matrix must be at least 2x2, got {rows}x{cols}"
            )));
        }
        Error::check_dim(rows * cols, data.len())?;
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("payoff entries must be finite"));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        Self::from_flat(rows, cols, vec![0.0; rows * cols])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// `A y`, the row player's payoff vector against `y`.
    pub fn mul_vec(&self, y: &[f64]) -> Vec<f64> {
        debug_assert_eq!(y.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(y).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `Aᵀ x`, the column player's loss vector against `x`.
    pub fn tr_mul_vec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for (i, xi) in x.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += xi * a;
            }
        }
        out
    }

    /// `xᵀ A y`.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        x.iter().zip(self.mul_vec(y)).map(|(a, b)| a * b).sum()
    }

    /// Adds `c` to every entry.
    pub fn shifted(&self, c: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v + c).collect(),
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| *v == 0.0)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Largest singular value, by power iteration on `AᵀA`.
    ///
    /// Iterates until the Rayleigh quotient changes by less than `1e-12`
    /// relative, or 500 iterations.
    pub fn spectral_norm(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        // Start from a vector with no special alignment to the coordinate axes.
        let mut v: Vec<f64> = (0..self.cols).map(|j| 1.0 + 0.1 * j as f64).collect();
        normalize(&mut v);
        let mut estimate = 0.0;
        for _ in 0..500 {
            let w = self.tr_mul_vec(&self.mul_vec(&v));
            let rayleigh: f64 = v.iter().zip(&w).map(|(a, b)| a * b).sum();
            v = w;
            if normalize(&mut v) == 0.0 {
                break;
            }
            let converged = (rayleigh - estimate).abs() <= 1e-12 * rayleigh.abs();
            estimate = rayleigh;
            if converged {
                break;
            }
        }
        // One last Rayleigh quotient at the converged direction.
        let av = self.mul_vec(&v);
        let sq: f64 = av.iter().map(|a| a * a).sum();
        sq.max(estimate).sqrt()
    }
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|a| *a /= norm);
    }
    norm
}

/// A payoff schedule with `A_{t+T} = A_t`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicGame {
    matrices: Vec<PayoffMatrix>,
}

impl PeriodicGame {
    pub fn new(matrices: Vec<PayoffMatrix>) -> Result<Self> {
        let first = matrices
            .first()
            .ok_or_else(|| Error::invalid("a periodic game needs at least one matrix"))?;
        let (m, n) = (first.rows(), first.cols());
        for a in &matrices[1..] {
            if a.rows() != m || a.cols() != n {
                return Err(Error::invalid(format!(
                    "all matrices must be {m}x{n}, found {}x{}",
                    a.rows(),
                    a.cols()
                )));
            }
        }
        Ok(Self { matrices })
    }

    pub fn constant(a: PayoffMatrix) -> Self {
        Self { matrices: vec![a] }
    }

    pub fn period(&self) -> usize {
        self.matrices.len()
    }

    pub fn rows(&self) -> usize {
        self.matrices[0].rows()
    }

    pub fn cols(&self) -> usize {
        self.matrices[0].cols()
    }

    pub fn matrices(&self) -> &[PayoffMatrix] {
        &self.matrices
    }

    /// `A_t = matrices[t mod T]`; negative `t` wraps, so `t = -1` is the last matrix.
    pub fn matrix_at(&self, t: i64) -> &PayoffMatrix {
        let idx = t.rem_euclid(self.period() as i64) as usize;
        &self.matrices[idx]
    }

    pub fn phase(&self, t: u64) -> usize {
        (t % self.period() as u64) as usize
    }
}
