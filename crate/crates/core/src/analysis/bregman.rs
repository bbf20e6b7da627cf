//! Identities of the KL-divergence as the Bregman divergence of negative
//! entropy, checked numerically.
//!
//! * Three points: `KL(p,x′) = KL(p,x) + KL(x,x′) + ⟨ln x′ − ln x, x − p⟩`.
//! * Exponential-weights step: with `x† ∝ x e^{s·y}`,
//!   `KL(p,x†) = KL(p,x) − KL(x†,x) + s⟨y, x† − p⟩`.

use crate::dynamics::exp_weights_step;
use crate::error::{Error, Result};
use crate::simplex::{simplex_kl, Simplex};
use crate::state::JointState;

use super::PropertyReport;

/// Absolute tolerance on both identities.
const BREGMAN_TOL: f64 = 1e-10;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Checks both identities for one simplex, with `x† = exp_weights_step(x, y, step)`.
///
/// The report's `max_residual` stat is the larger absolute residual.
pub fn check_bregman_identities(
    p: &Simplex,
    x: &Simplex,
    x_prime: &Simplex,
    y: &[f64],
    step: f64,
) -> Result<PropertyReport> {
    let d = p.dim();
    Error::check_dim(d, x.dim())?;
    Error::check_dim(d, x_prime.dim())?;
    Error::check_dim(d, y.len())?;
    for (name, s) in [("p", p), ("x", x), ("x'", x_prime)] {
        if !s.is_interior() {
            return Err(Error::invalid(format!("{name} must be an interior point")));
        }
    }
    let mut report = PropertyReport::new("bregman identities");

    let diff: Vec<f64> = x_prime
        .log_probs()
        .iter()
        .zip(x.log_probs())
        .map(|(a, b)| a - b)
        .collect();
    let x_minus_p: Vec<f64> = x.probs().iter().zip(p.probs()).map(|(a, b)| a - b).collect();
    let lhs = simplex_kl(p, x_prime)?;
    let rhs = simplex_kl(p, x)? + simplex_kl(x, x_prime)? + dot(&diff, &x_minus_p);
    let r1 = report.expect_close(0, "three points", lhs, rhs, BREGMAN_TOL);

    let dagger = exp_weights_step(x, y, step)?;
    let dagger_minus_p: Vec<f64> = dagger.probs().iter().zip(p.probs()).map(|(a, b)| a - b).collect();
    let lhs = simplex_kl(p, &dagger)?;
    let rhs = simplex_kl(p, x)? - simplex_kl(&dagger, x)? + step * dot(y, &dagger_minus_p);
    let r2 = report.expect_close(1, "weights step", lhs, rhs, BREGMAN_TOL);

    report.checked_steps = 2;
    report.set_stat("max_residual", r1.max(r2));
    Ok(report)
}

/// Both identities for the joint KL-divergence, player by player; the
/// per-player residuals are added.
pub fn check_bregman_identities_joint(
    p: &JointState,
    x: &JointState,
    x_prime: &JointState,
    y: (&[f64], &[f64]),
    step: f64,
) -> Result<PropertyReport> {
    let a = check_bregman_identities(&p.x1, &x.x1, &x_prime.x1, y.0, step)?;
    let b = check_bregman_identities(&p.x2, &x.x2, &x_prime.x2, y.1, step)?;
    let worst = a.stat("max_residual").unwrap_or(0.0) + b.stat("max_residual").unwrap_or(0.0);
    let mut report = PropertyReport::new("bregman identities (joint)");
    report.merge(a);
    report.merge(b);
    if worst > BREGMAN_TOL && report.passed {
        report.violate(0, "joint sum", worst, 0.0, worst - BREGMAN_TOL);
    }
    report.set_stat("max_residual", worst);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(p: &[f64]) -> Simplex {
        Simplex::from_probs(p).unwrap()
    }

    #[test]
    fn all_uniform_is_trivially_exact() {
        let u = Simplex::uniform(3).unwrap();
        let r = check_bregman_identities(&u, &u, &u, &[0.0; 3], 1.0).unwrap();
        assert!(r.passed);
        assert_eq!(r.stat("max_residual"), Some(0.0));
    }

    #[test]
    fn constant_payoff_leaves_point_fixed() {
        let p = s(&[0.2, 0.3, 0.5]);
        let x = s(&[0.6, 0.1, 0.3]);
        let r = check_bregman_identities(&p, &x, &x, &[2.5; 3], 1.0).unwrap();
        assert!(r.passed);
        assert!(r.stat("max_residual").unwrap() < 1e-15);
    }

    #[test]
    fn generic_points() {
        let p = s(&[0.2, 0.3, 0.5]);
        let x = s(&[0.6, 0.1, 0.3]);
        let xp = s(&[0.1, 0.1, 0.8]);
        let r = check_bregman_identities(&p, &x, &xp, &[1.0, -2.0, 0.5], 0.7).unwrap();
        assert!(r.passed, "{:?}", r.violations);
    }

    #[test]
    fn joint_version_and_validation() {
        let p = JointState::from_probs(&[0.3, 0.7], &[0.2, 0.3, 0.5]).unwrap();
        let x = JointState::from_probs(&[0.5, 0.5], &[0.1, 0.6, 0.3]).unwrap();
        let xp = JointState::from_probs(&[0.9, 0.1], &[0.3, 0.3, 0.4]).unwrap();
        let r = check_bregman_identities_joint(&p, &x, &xp, (&[1.0, 0.0], &[0.0, 1.0, -1.0]), 1.0).unwrap();
        assert!(r.passed);
        assert_eq!(r.checked_steps, 4);

        let edge = s(&[1.0, 0.0]);
        let u = Simplex::uniform(2).unwrap();
        assert!(check_bregman_identities(&u, &edge, &u, &[0.0, 0.0], 1.0).is_err());
        assert!(check_bregman_identities(&u, &u, &u, &[0.0], 1.0).is_err());
    }
}
