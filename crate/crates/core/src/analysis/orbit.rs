//! Classification of the tail of a trajectory.

use std::fmt;

use crate::error::{Error, Result};
use crate::trajectory::Trajectory;

/// Minimum component below which a steadily shrinking tail counts as
/// diverging to the boundary.
pub const DIVERGENCE_THRESHOLD: f64 = 1e-6;

/// Number of trailing periods examined.
const TAIL_PERIODS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrbitVerdict {
    ConvergedPoint,
    ConvergedOrbit,
    DivergingBoundary,
    Inconclusive,
}

impl OrbitVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            OrbitVerdict::ConvergedPoint => "converged_point",
            OrbitVerdict::ConvergedOrbit => "converged_orbit",
            OrbitVerdict::DivergingBoundary => "diverging_boundary",
            OrbitVerdict::Inconclusive => "inconclusive",
        }
    }
}

impl fmt::Display for OrbitVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitReport {
    pub verdict: OrbitVerdict,
    /// Largest `‖x^{t+T} − x^t‖_∞` over the tail.
    pub period_gap: f64,
    /// Largest `‖x^{t+1} − x^t‖_∞` over the tail.
    pub max_consecutive_gap: f64,
    /// Smallest probability in the final period.
    pub final_min_component: f64,
}

/// Classifies the last ten periods of a trajectory recorded at every step.
///
/// In order of precedence:
/// * `DivergingBoundary` if the per-period minima of the smallest component
///   never increase, strictly drop overall, and end below
///   [`DIVERGENCE_THRESHOLD`];
/// * `ConvergedPoint` if both the period gap and every consecutive gap are
///   at most `tol_orbit`;
/// * `ConvergedOrbit` if the period gap is at most `tol_orbit` and some
///   consecutive gap is at least `tol_nontrivial`;
/// * `Inconclusive` otherwise.
pub fn detect_periodic_orbit(
    traj: &Trajectory,
    period: usize,
    tol_orbit: f64,
    tol_nontrivial: f64,
) -> Result<OrbitReport> {
    if period == 0 {
        return Err(Error::invalid("period must be positive"));
    }
    if !traj.is_consecutive() {
        return Err(Error::invalid("orbit detection needs a trajectory recorded at every step"));
    }
    let span = TAIL_PERIODS * period;
    if traj.len() < span + 1 {
        return Err(Error::invalid(format!(
            "trajectory has {} states; need at least {} ({TAIL_PERIODS} periods)",
            traj.len(),
            span + 1
        )));
    }
    let tail = &traj.steps[traj.len() - span - 1..];

    let period_gap = tail
        .iter()
        .zip(&tail[period..])
        .map(|(a, b)| a.state.max_abs_diff(&b.state))
        .fold(0.0, f64::max);
    let max_consecutive_gap = tail
        .windows(2)
        .map(|w| w[0].state.max_abs_diff(&w[1].state))
        .fold(0.0, f64::max);
    let minima: Vec<f64> = tail[1..]
        .chunks(period)
        .map(|c| c.iter().map(|s| s.min_component).fold(f64::INFINITY, f64::min))
        .collect();
    let final_min_component = *minima.last().unwrap();

    let shrinking = minima.windows(2).all(|w| w[1] <= w[0])
        && minima[0] > final_min_component
        && final_min_component < DIVERGENCE_THRESHOLD;
    let verdict = if shrinking {
        OrbitVerdict::DivergingBoundary
    } else if period_gap <= tol_orbit && max_consecutive_gap <= tol_orbit {
        OrbitVerdict::ConvergedPoint
    } else if period_gap <= tol_orbit && max_consecutive_gap >= tol_nontrivial {
        OrbitVerdict::ConvergedOrbit
    } else {
        OrbitVerdict::Inconclusive
    };
    Ok(OrbitReport {
        verdict,
        period_gap,
        max_consecutive_gap,
        final_min_component,
    })
}
