//! Closed-form 4-dimensional OMWU maps for the 2-periodic 2×2 game
//! `A_0 = [[0,−1],[−1,0]]`, `A_1 = [[0,1],[1,0]]`.
//!
//! A reduced state `z = (z1, z2, z3, z4)` holds the first-coordinate
//! probabilities `(x_{1,1}^{t−1}, x_{1,1}^t, x_{2,1}^{t−1}, x_{2,1}^t)`; one
//! map application advances it by one time step. With
//! `f(z, d) = z e^d / (z e^d + 1 − z)`:
//!
//! * `G1(z) = (z2, f(z2,  3η − 4ηz4 − 2ηz3), z4, f(z4, −3η + 4ηz2 + 2ηz1))`
//!   is the step whose current matrix is `A_1` (and previous matrix `A_0`);
//! * `G2(z) = (z2, f(z2, −3η + 4ηz4 + 2ηz3), z4, f(z4,  3η − 4ηz2 − 2ηz1))`
//!   is the step whose current matrix is `A_0`.
//!
//! Starting from `(x_{1,1}^{−1}, x_{1,1}^0, x_{2,1}^{−1}, x_{2,1}^0)`, the
//! composition `G1 ∘ G2` (apply `G2` first) yields the values at `(2t−1, 2t)`.

use crate::error::{Error, Result};

/// Which closed form to apply; `Even` selects `G1`, `Odd` selects `G2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedState4(pub [f64; 4]);

impl ReducedState4 {
    pub fn new(z: [f64; 4]) -> Result<Self> {
        if let Some(v) = z.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::invalid(format!(
                "reduced state coordinates must lie in [0, 1], got {v}"
            )));
        }
        Ok(Self(z))
    }

    pub fn equilibrium() -> Self {
        Self([0.5; 4])
    }

    pub fn as_array(&self) -> [f64; 4] {
        self.0
    }

    pub fn max_abs_diff(&self, other: &ReducedState4) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// `z e^d / (z e^d + 1 − z)` for `z ∈ [0, 1]`, evaluated on the logit scale.
fn tilt(z: f64, d: f64) -> f64 {
    if z <= 0.0 {
        return 0.0;
    }
    if z >= 1.0 {
        return 1.0;
    }
    let l = z.ln() - (-z).ln_1p() + d;
    if l >= 0.0 {
        1.0 / (1.0 + (-l).exp())
    } else {
        let e = l.exp();
        e / (1.0 + e)
    }
}

/// The rational form of `tilt`, analytic in `z` on a neighbourhood of `[0, 1]`.
fn tilt_rational(z: f64, d: f64) -> f64 {
    let w = z * d.exp();
    w / (w + 1.0 - z)
}

fn exponents(parity: Parity, z: &[f64; 4], eta: f64) -> (f64, f64) {
    let [z1, z2, z3, z4] = *z;
    let d1 = 3.0 * eta - 4.0 * eta * z4 - 2.0 * eta * z3;
    let d2 = -3.0 * eta + 4.0 * eta * z2 + 2.0 * eta * z1;
    match parity {
        Parity::Even => (d1, d2),
        Parity::Odd => (-d1, -d2),
    }
}

/// `G1(s)` for `Parity::Even`, `G2(s)` for `Parity::Odd`.
pub fn omwu_reduced_map(parity: Parity, s: ReducedState4, eta: f64) -> Result<ReducedState4> {
    if !(eta.is_finite() && eta > 0.0) {
        return Err(Error::invalid(format!("step size must be positive and finite, got {eta}")));
    }
    let s = ReducedState4::new(s.0)?;
    let (d1, d2) = exponents(parity, &s.0, eta);
    let [_, z2, _, z4] = s.0;
    Ok(ReducedState4([z2, tilt(z2, d1), z4, tilt(z4, d2)]))
}

/// `G1 ∘ G2`: `G2` first, then `G1`.
pub fn omwu_reduced_compose(s: ReducedState4, eta: f64) -> Result<ReducedState4> {
    omwu_reduced_map(Parity::Even, omwu_reduced_map(Parity::Odd, s, eta)?, eta)
}

/// The same closed forms on all of `R^4` without domain checks.
///
/// Agrees with [`omwu_reduced_map`] on `[0, 1]^4` up to rounding; intended
/// for finite differences at points on the boundary of the domain.
pub fn reduced_map_unchecked(parity: Parity, z: [f64; 4], eta: f64) -> [f64; 4] {
    let (d1, d2) = exponents(parity, &z, eta);
    [z[1], tilt_rational(z[1], d1), z[3], tilt_rational(z[3], d2)]
}
