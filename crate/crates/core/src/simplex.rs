//! Mixed strategies on the probability simplex, stored as log-probabilities.
//!
//! Keeping the log representation lets diverging dynamics push coordinates far
//! below the smallest positive `f64` without the strategy collapsing to an
//! exact vertex. Adding a constant to every log-weight leaves the strategy
//! unchanged, so a [`Simplex`] is really an equivalence class of log-weight
//! vectors; the stored representative is the normalised one
//! (`logsumexp = 0`).

use crate::error::{Error, Result};

/// Log-probabilities below this are treated as an exact zero probability.
pub const BOUNDARY_LOG_PROB: f64 = -745.0;

/// Tolerance accepted on `Σ p = 1` when building a simplex from probabilities.
const PROB_SUM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Simplex {
    log_probs: Vec<f64>,
    probs: Vec<f64>,
}

/// Numerically stable softmax of a log-weight vector.
pub fn normalize_log_weights(log_weights: &[f64]) -> Result<Simplex> {
    if log_weights.len() < 2 {
        return Err(Error::invalid(format!(
            "a simplex needs at least 2 coordinates, got {}",
            log_weights.len()
        )));
    }
    if log_weights.iter().any(|w| w.is_nan() || *w == f64::INFINITY) {
        return Err(Error::invalid("log-weights must be finite or -inf"));
    }
    let max = log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return Err(Error::invalid("all log-weights are -inf"));
    }
    let sum: f64 = log_weights.iter().map(|w| (w - max).exp()).sum();
    let lse = sum.ln();
    let log_probs: Vec<f64> = log_weights.iter().map(|w| (w - max) - lse).collect();
    let probs = log_probs.iter().map(|l| l.exp()).collect();
    Ok(Simplex { log_probs, probs })
}

impl Simplex {
    /// Builds a simplex from probabilities; zeros become exact boundary points.
    pub fn from_probs(probs: &[f64]) -> Result<Self> {
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::invalid("probabilities must be finite and non-negative"));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > PROB_SUM_TOL {
            return Err(Error::invalid(format!("probabilities sum to {total}, not 1")));
        }
        if probs.len() < 2 {
            return Err(Error::invalid(format!(
                "a simplex needs at least 2 coordinates, got {}",
                probs.len()
            )));
        }
        // Keep the given probabilities bit-for-bit when they already sum to 1.
        let probs: Vec<f64> = if total == 1.0 {
            probs.to_vec()
        } else {
            probs.iter().map(|p| p / total).collect()
        };
        let log_probs = probs.iter().map(|p| p.ln()).collect();
        Ok(Simplex { log_probs, probs })
    }

    pub fn uniform(m: usize) -> Result<Self> {
        normalize_log_weights(&vec![0.0; m])
    }

    /// Vertex `e_i` of the m-simplex.
    pub fn vertex(m: usize, i: usize) -> Result<Self> {
        if i >= m {
            return Err(Error::invalid(format!("vertex {i} out of range for dimension {m}")));
        }
        let mut w = vec![f64::NEG_INFINITY; m];
        w[i] = 0.0;
        normalize_log_weights(&w)
    }

    pub fn dim(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Normalised log-weights (`logsumexp = 0`).
    pub fn log_probs(&self) -> &[f64] {
        &self.log_probs
    }

    pub fn prob(&self, i: usize) -> f64 {
        self.probs[i]
    }

    pub fn min_prob(&self) -> f64 {
        self.probs.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn min_log_prob(&self) -> f64 {
        self.log_probs.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// True when every coordinate is strictly above the boundary threshold.
    pub fn is_interior(&self) -> bool {
        self.log_probs.iter().all(|&l| l >= BOUNDARY_LOG_PROB)
    }

    pub fn is_boundary_coord(&self, i: usize) -> bool {
        self.log_probs[i] < BOUNDARY_LOG_PROB
    }

    /// Log-space update `w ← w + increment`, renormalised.
    pub fn shifted(&self, increment: &[f64]) -> Result<Self> {
        Error::check_dim(self.dim(), increment.len())?;
        if increment.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("non-finite log-weight increment"));
        }
        let w: Vec<f64> = self
            .log_probs
            .iter()
            .zip(increment)
            .map(|(l, d)| l + d)
            .collect();
        normalize_log_weights(&w)
    }

    pub fn max_abs_diff(&self, other: &Simplex) -> f64 {
        self.probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// `KL(p ‖ q)` for a single simplex, computed from log-probabilities.
///
/// Returns `+∞` when `q` puts (numerically) zero mass on a coordinate where
/// `p` is positive. Coordinates with `p_i = 0` contribute nothing.
pub fn simplex_kl(p: &Simplex, q: &Simplex) -> Result<f64> {
    Error::check_dim(p.dim(), q.dim())?;
    let support: Vec<usize> = (0..p.dim()).filter(|&i| p.probs[i] > 0.0).collect();
    if support.iter().any(|&i| q.is_boundary_coord(i)) {
        return Ok(f64::INFINITY);
    }

    // v_i = ln q_i - ln p_i on the support of p, centred by its p-mean.
    // KL = ln(Σ_S p_i e^{s_i} + Σ_{¬S} q_i e^{-v̄}) with Σ_S p_i s_i = 0, which
    // can be written as log1p of a sum of non-negative terms. This keeps full
    // relative precision when q is within ~1e-8 of p.
    let v_mean: f64 = support
        .iter()
        .map(|&i| p.probs[i] * (q.log_probs[i] - p.log_probs[i]))
        .sum();
    let centred: Vec<f64> = support
        .iter()
        .map(|&i| q.log_probs[i] - p.log_probs[i] - v_mean)
        .collect();
    if centred.iter().any(|s| *s > 700.0) {
        return Ok(direct_kl(p, q, &support));
    }
    let mut acc: f64 = support
        .iter()
        .zip(&centred)
        .map(|(&i, &s)| p.probs[i] * (s.exp_m1() - s))
        .sum();
    for i in (0..p.dim()).filter(|i| !support.contains(i)) {
        acc += (q.log_probs[i] - v_mean).exp();
    }
    let kl = acc.ln_1p();
    if kl.is_finite() {
        Ok(kl.max(0.0))
    } else {
        Ok(direct_kl(p, q, &support))
    }
}

fn direct_kl(p: &Simplex, q: &Simplex, support: &[usize]) -> f64 {
    support
        .iter()
        .map(|&i| p.probs[i] * (p.log_probs[i] - q.log_probs[i]))
        .sum::<f64>()
        .max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_weights_give_uniform() {
        let s = normalize_log_weights(&[0.0, 0.0]).unwrap();
        assert_eq!(s.probs(), &[0.5, 0.5]);
    }

    #[test]
    fn constant_weights_give_uniform_for_any_shift() {
        for c in [-1e6, -3.5, 0.0, 17.0, 1e6] {
            let s = normalize_log_weights(&[c, c, c]).unwrap();
            for p in s.probs() {
                assert!((p - 1.0 / 3.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn large_weights_do_not_overflow() {
        let hi = 1000.0 + 3f64.ln();
        let s = normalize_log_weights(&[1000.0, hi]).unwrap();
        // Exact softmax of the inputs as represented (the offset is exact in binary).
        let d = hi - 1000.0;
        assert!((s.prob(0) - 1.0 / (1.0 + d.exp())).abs() < 1e-16);
        // Rounding 1000 + ln 3 to a double moves the ratio by at most half an ulp of 1000.
        assert!((s.prob(0) - 0.25).abs() < 1e-13);
        assert!((s.prob(1) - 0.75).abs() < 1e-13);
    }

    #[test]
    fn all_negative_infinity_is_rejected() {
        let err = normalize_log_weights(&[f64::NEG_INFINITY, f64::NEG_INFINITY]).unwrap_err();
        assert!(matches!(err, Error::InvalidInput(_)));
    }

    #[test]
    fn nan_and_short_vectors_are_rejected() {
        assert!(normalize_log_weights(&[0.0, f64::NAN]).is_err());
        assert!(normalize_log_weights(&[0.0, f64::INFINITY]).is_err());
        assert!(normalize_log_weights(&[0.0]).is_err());
    }

    #[test]
    fn vertex_is_exact_boundary() {
        let v = Simplex::vertex(3, 1).unwrap();
        assert_eq!(v.probs(), &[0.0, 1.0, 0.0]);
        assert!(!v.is_interior());
        assert!(v.is_boundary_coord(0));
    }

    #[test]
    fn from_probs_validates() {
        assert!(Simplex::from_probs(&[0.5, 0.6]).is_err());
        assert!(Simplex::from_probs(&[-0.1, 1.1]).is_err());
        let s = Simplex::from_probs(&[0.2, 0.3, 0.5]).unwrap();
        assert!((s.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn kl_handles_zero_mass_in_p() {
        let p = Simplex::from_probs(&[1.0, 0.0]).unwrap();
        let q = Simplex::from_probs(&[0.5, 0.5]).unwrap();
        let kl = simplex_kl(&p, &q).unwrap();
        assert!((kl - 2f64.ln()).abs() < 1e-15);
        // 0 · ln(0/0) = 0
        let kl_self = simplex_kl(&p, &p).unwrap();
        assert_eq!(kl_self, 0.0);
    }

    #[test]
    fn kl_of_nearby_points_keeps_relative_precision() {
        let p = Simplex::from_probs(&[0.5, 0.5]).unwrap();
        let d = 1e-9;
        let q = Simplex::from_probs(&[0.5 + d, 0.5 - d]).unwrap();
        // KL ≈ 2 d² for p uniform on two points.
        let kl = simplex_kl(&p, &q).unwrap();
        assert!((kl / (2.0 * d * d) - 1.0).abs() < 1e-5, "kl = {kl:e}");
    }

    #[test]
    fn kl_far_from_reference_matches_direct_sum() {
        let p = Simplex::uniform(2).unwrap();
        let q = normalize_log_weights(&[0.0, -740.0]).unwrap();
        let kl = simplex_kl(&p, &q).unwrap();
        let expected = 0.5 * (0.5f64.ln() - q.log_probs()[0]) + 0.5 * (0.5f64.ln() - q.log_probs()[1]);
        assert!((kl - expected).abs() < 1e-9 * expected);
    }
}
