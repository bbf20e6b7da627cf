//! Closed-form spectral facts about the reduced OMWU maps.

use crate::dynamics::{reduced_map_unchecked, Parity, ReducedState4};
use crate::error::{Error, Result};

fn check_eta(eta: f64) -> Result<()> {
    if eta.is_finite() && eta > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("step size must be positive and finite, got {eta}")))
    }
}

/// `G1 ∘ G2` on `R^4` (no domain checks), for finite differences.
pub fn composed_reduced_map(eta: f64) -> impl Fn(&[f64]) -> Result<Vec<f64>> {
    move |z: &[f64]| {
        let z: [f64; 4] = z
            .try_into()
            .map_err(|_| Error::DimensionMismatch { expected: 4, found: z.len() })?;
        let w = reduced_map_unchecked(Parity::Odd, z, eta);
        Ok(reduced_map_unchecked(Parity::Even, w, eta).to_vec())
    }
}

/// The fixed point `(0, 0, a, a e^{−3η} / (a e^{−3η} + 1 − a))` of `G1 ∘ G2`,
/// on which player 1 has collapsed onto its second action.
pub fn boundary_fixed_point(a: f64, eta: f64) -> Result<ReducedState4> {
    check_eta(eta)?;
    if !(0.0..=1.0).contains(&a) {
        return Err(Error::invalid(format!("curve parameter must lie in [0, 1], got {a}")));
    }
    let w = a * (-3.0 * eta).exp();
    ReducedState4::new([0.0, 0.0, a, w / (w + (1.0 - a))])
}

/// The two double eigenvalues `η²/2 ± √((η²+η+1)(η²−η+1))/2 + ½` of the
/// Jacobian of `G1 ∘ G2` at the interior equilibrium, larger first.
pub fn interior_eigenvalues(eta: f64) -> [f64; 2] {
    let e2 = eta * eta;
    let root = ((e2 + eta + 1.0) * (e2 - eta + 1.0)).sqrt();
    [e2 / 2.0 + root / 2.0 + 0.5, e2 / 2.0 - root / 2.0 + 0.5]
}

/// `exp(−2ηa(1−a)(e^{3η}−1) / (a + (1−a)e^{3η}))`, the eigenvalue of the
/// Jacobian at [`boundary_fixed_point`] that governs motion along player 1's
/// collapsed coordinates.
pub fn boundary_central_eigenvalue(a: f64, eta: f64) -> f64 {
    let e = (3.0 * eta).exp();
    (-2.0 * eta * a * (1.0 - a) * (e - 1.0) / (a + (1.0 - a) * e)).exp()
}

/// Eigenvector for eigenvalue 1 at the boundary fixed point, scaled so the
/// last coordinate is 1: `(0, 0, e^{−3η}(a + (1−a)e^{3η})², 1)`.
pub fn boundary_unit_eigenvector(a: f64, eta: f64) -> [f64; 4] {
    let e = (3.0 * eta).exp();
    let s = a + (1.0 - a) * e;
    [0.0, 0.0, s * s / e, 1.0]
}
