//! Numerical verification tools: Jacobians and spectra of small maps, the
//! fixed-point structure of the reduced OMWU maps, trajectory property
//! checkers and periodic-orbit detection.

mod bregman;
mod orbit;
mod reduced;
mod spectral;
mod trajectory_checks;

pub use bregman::{check_bregman_identities, check_bregman_identities_joint};
pub use orbit::{detect_periodic_orbit, OrbitReport, OrbitVerdict, DIVERGENCE_THRESHOLD};
pub use reduced::{
    boundary_central_eigenvalue, boundary_fixed_point, boundary_unit_eigenvector, composed_reduced_map,
    interior_eigenvalues,
};
pub use spectral::{
    char_poly_coefficients, char_poly_eval, eigenvalues_small, inverse_iteration, jacobian_fd,
    DEFAULT_FD_STEP, MAX_SPECTRAL_DIM,
};
pub use trajectory_checks::{
    check_extra_kl_decrease, check_omwu_increments, check_omwu_ratio_identities, IncrementMonitor,
    KL_INCREASE_CONSTANT, STRICT_DECREASE_DISTANCE,
};

pub use crate::linalg::SquareMatrix;

/// At most this many violations are stored in a report; all are counted.
pub const MAX_RECORDED_VIOLATIONS: usize = 64;

/// One failed check: at time (or case index) `t`, `lhs` should have matched
/// or been bounded by `rhs`. `slack` is the signed margin by which the check
/// failed (residual minus tolerance for identities, shortfall for bounds).
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub t: u64,
    pub check: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyReport {
    pub name: String,
    pub checked_steps: u64,
    pub violations: Vec<Violation>,
    pub violation_count: u64,
    pub passed: bool,
    /// Named summary statistics, e.g. the largest residual observed.
    pub stats: Vec<(String, f64)>,
}

impl PropertyReport {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            checked_steps: 0,
            violations: Vec::new(),
            violation_count: 0,
            passed: true,
            stats: Vec::new(),
        }
    }

    pub fn violate(&mut self, t: u64, check: &str, lhs: f64, rhs: f64, slack: f64) {
        self.violation_count += 1;
        self.passed = false;
        if self.violations.len() < MAX_RECORDED_VIOLATIONS {
            self.violations.push(Violation {
                t,
                check: check.to_string(),
                lhs,
                rhs,
                slack,
            });
        }
    }

    /// Records `lhs ≈ rhs` with tolerance `tol`; returns the residual.
    pub fn expect_close(&mut self, t: u64, check: &str, lhs: f64, rhs: f64, tol: f64) -> f64 {
        let residual = (lhs - rhs).abs();
        if !(residual <= tol) {
            self.violate(t, check, lhs, rhs, residual - tol);
        }
        residual
    }

    /// Records `lhs ≤ rhs`; returns the margin `rhs − lhs`.
    pub fn expect_le(&mut self, t: u64, check: &str, lhs: f64, rhs: f64) -> f64 {
        let margin = rhs - lhs;
        if !(margin >= 0.0) {
            self.violate(t, check, lhs, rhs, margin);
        }
        margin
    }

    pub fn set_stat(&mut self, key: &str, value: f64) {
        match self.stats.iter_mut().find(|(k, _)| k == key) {
            Some(entry) => entry.1 = value,
            None => self.stats.push((key.to_string(), value)),
        }
    }

    pub fn stat(&self, key: &str) -> Option<f64> {
        self.stats.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }

    /// Folds another report's counts and violations into this one.
    pub fn merge(&mut self, other: PropertyReport) {
        self.checked_steps += other.checked_steps;
        for v in other.violations {
            if self.violations.len() < MAX_RECORDED_VIOLATIONS {
                self.violations.push(v);
            }
        }
        self.violation_count += other.violation_count;
        self.passed &= other.passed;
    }
}
