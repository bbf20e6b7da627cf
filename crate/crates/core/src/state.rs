use crate::error::{Error, Result};
use crate::simplex::{simplex_kl, Simplex};

/// Strategies of both players at one time step.
#[derive(Debug, Clone, PartialEq)]
pub struct JointState {
    pub x1: Simplex,
    pub x2: Simplex,
}

impl JointState {
    pub fn new(x1: Simplex, x2: Simplex) -> Self {
        Self { x1, x2 }
    }

    pub fn from_probs(x1: &[f64], x2: &[f64]) -> Result<Self> {
        Ok(Self::new(Simplex::from_probs(x1)?, Simplex::from_probs(x2)?))
    }

    pub fn uniform(m: usize, n: usize) -> Result<Self> {
        Ok(Self::new(Simplex::uniform(m)?, Simplex::uniform(n)?))
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.x1.dim(), self.x2.dim())
    }

    /// Smallest probability over both players.
    pub fn min_component(&self) -> f64 {
        self.x1.min_prob().min(self.x2.min_prob())
    }

    pub fn min_log_component(&self) -> f64 {
        self.x1.min_log_prob().min(self.x2.min_log_prob())
    }

    pub fn is_interior(&self) -> bool {
        self.x1.is_interior() && self.x2.is_interior()
    }

    /// Max-norm distance between the concatenated probability vectors.
    pub fn max_abs_diff(&self, other: &JointState) -> f64 {
        self.x1.max_abs_diff(&other.x1).max(self.x2.max_abs_diff(&other.x2))
    }

    /// Probabilities of both players, `x1` first.
    pub fn concat_probs(&self) -> Vec<f64> {
        let mut v = self.x1.probs().to_vec();
        v.extend_from_slice(self.x2.probs());
        v
    }

    pub(crate) fn check_dims(&self, m: usize, n: usize) -> Result<()> {
        Error::check_dim(m, self.x1.dim())?;
        Error::check_dim(n, self.x2.dim())
    }
}

/// Joint KL-divergence `KL(p.x1 ‖ q.x1) + KL(p.x2 ‖ q.x2)`.
///
/// `+∞` when `q` is on the boundary at a coordinate where `p` has mass.
pub fn kl_divergence(p: &JointState, q: &JointState) -> Result<f64> {
    Ok(simplex_kl(&p.x1, &q.x1)? + simplex_kl(&p.x2, &q.x2)?)
}
