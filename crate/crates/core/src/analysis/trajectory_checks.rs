//! Property checkers over recorded trajectories.
//!
//! The OMWU checkers concern the 2-periodic 2×2 game with
//! `A_0 = [[0,−1],[−1,0]]`, `A_1 = [[0,1],[1,0]]` and interior equilibrium
//! `((½,½),(½,½))`. Writing `x_{i,j}^k` for player `i`'s probability of
//! action `j` at time `k` and `r_i(k) = ln(x_{i,1}^k / x_{i,2}^k)`, the update
//! rule gives, for even `t`:
//!
//! 1. `r1(t+1) = r1(t−1) − 2η(2x_{2,2}^t − x_{2,2}^{t−1} − x_{2,2}^{t−2})`
//! 2. `r2(t+1) = r2(t−1) + 2η(2x_{1,2}^t − x_{1,2}^{t−1} − x_{1,2}^{t−2})`
//! 3. `r1(t+2) = r1(t) + 2η(2x_{2,2}^{t+1} − x_{2,2}^t − x_{2,2}^{t−1})`
//! 4. `r2(t+2) = r2(t) − 2η(2x_{1,2}^{t+1} − x_{1,2}^t − x_{1,2}^{t−1})`
//! 5. `r1(t+2) = r1(t+1) − 3η + 2η(2x_{2,2}^{t+1} + x_{2,2}^t)`
//! 6. `r2(t+1) = r2(t) − 3η + 2η(2x_{1,2}^t + x_{1,2}^{t−1})`

use std::collections::VecDeque;

use crate::dynamics::{divergence_margin, AlgorithmTag};
use crate::error::{Error, Result};
use crate::state::{kl_divergence, JointState};
use crate::trajectory::Trajectory;

use super::PropertyReport;

/// Constant `c` in the two-step KL increase `KL(t+2) − KL(t) ≥ c p² η³`.
pub const KL_INCREASE_CONSTANT: f64 = 3.0 / 8.0;

/// States farther than this (max-norm) from the equilibrium must strictly
/// decrease the KL-divergence under Extra-MWU.
pub const STRICT_DECREASE_DISTANCE: f64 = 1e-8;

/// Relative slack allowed on the step-size hypothesis `η ≤ (p/16)²`, so a
/// step size computed from the bound itself is accepted.
const ETA_BOUND_SLACK: f64 = 1e-9;

/// Absolute slack on the initial-region hypothesis `x_{i,2}^0 ≥ ½ + 2p`.
const INIT_REGION_SLACK: f64 = 1e-12;

fn require_algo(traj: &Trajectory, algo: AlgorithmTag) -> Result<()> {
    if traj.algo != algo {
        return Err(Error::invalid(format!(
            "checker needs a {algo} trajectory, got {}",
            traj.algo
        )));
    }
    Ok(())
}

fn require_consecutive(traj: &Trajectory) -> Result<()> {
    if traj.is_empty() {
        return Err(Error::invalid("trajectory is empty"));
    }
    if !traj.is_consecutive() {
        return Err(Error::invalid("checker needs a trajectory recorded at every step"));
    }
    Ok(())
}

fn require_alternating_2x2(traj: &Trajectory) -> Result<()> {
    if traj.dims() != Some((2, 2)) || traj.period != 2 {
        return Err(Error::invalid("checker applies to the 2-periodic 2x2 game only"));
    }
    Ok(())
}

fn log_ratio(x: &crate::simplex::Simplex) -> f64 {
    x.log_probs()[0] - x.log_probs()[1]
}

/// Verifies the six log-ratio identities of OMWU on the alternating 2×2
/// game at every even `t ≥ 2` for which the needed times are recorded.
/// Each identity must hold to `tol · max(1, |lhs|, |rhs|)`.
pub fn check_omwu_ratio_identities(traj: &Trajectory, eta: f64, tol: f64) -> Result<PropertyReport> {
    require_algo(traj, AlgorithmTag::Omwu)?;
    require_alternating_2x2(traj)?;
    require_consecutive(traj)?;
    if !(tol > 0.0 && eta > 0.0) {
        return Err(Error::invalid("eta and tol must be positive"));
    }
    let r1: Vec<f64> = traj.steps.iter().map(|s| log_ratio(&s.state.x1)).collect();
    let r2: Vec<f64> = traj.steps.iter().map(|s| log_ratio(&s.state.x2)).collect();
    let y1: Vec<f64> = traj.steps.iter().map(|s| s.state.x1.prob(1)).collect();
    let y2: Vec<f64> = traj.steps.iter().map(|s| s.state.x2.prob(1)).collect();
    let t0 = traj.steps[0].t;
    let n = traj.len();

    let mut report = PropertyReport::new("omwu ratio identities");
    let mut worst = 0.0f64;
    let mut check = |report: &mut PropertyReport, t: u64, name: &str, lhs: f64, rhs: f64| {
        let scale = 1f64.max(lhs.abs()).max(rhs.abs());
        let residual = report.expect_close(t, name, lhs, rhs, tol * scale);
        worst = worst.max(residual / scale);
    };
    for i in 2..n {
        let t = t0 + i as u64;
        if t % 2 != 0 {
            continue;
        }
        let mut any = false;
        if i + 1 < n {
            let lhs = r1[i + 1];
            let rhs = r1[i - 1] - 2.0 * eta * (2.0 * y2[i] - y2[i - 1] - y2[i - 2]);
            check(&mut report, t, "identity 1", lhs, rhs);
            let lhs = r2[i + 1];
            let rhs = r2[i - 1] + 2.0 * eta * (2.0 * y1[i] - y1[i - 1] - y1[i - 2]);
            check(&mut report, t, "identity 2", lhs, rhs);
            let lhs = r2[i + 1];
            let rhs = r2[i] - 3.0 * eta + 2.0 * eta * (2.0 * y1[i] + y1[i - 1]);
            check(&mut report, t, "identity 6", lhs, rhs);
            any = true;
        }
        if i + 2 < n {
            let lhs = r1[i + 2];
            let rhs = r1[i] + 2.0 * eta * (2.0 * y2[i + 1] - y2[i] - y2[i - 1]);
            check(&mut report, t, "identity 3", lhs, rhs);
            let lhs = r2[i + 2];
            let rhs = r2[i] - 2.0 * eta * (2.0 * y1[i + 1] - y1[i] - y1[i - 1]);
            check(&mut report, t, "identity 4", lhs, rhs);
            let lhs = r1[i + 2];
            let rhs = r1[i + 1] - 3.0 * eta + 2.0 * eta * (2.0 * y2[i + 1] + y2[i]);
            check(&mut report, t, "identity 5", lhs, rhs);
        }
        if any {
            report.checked_steps += 1;
        }
    }
    report.set_stat("max_relative_residual", worst);
    Ok(report)
}

#[derive(Debug, Clone, Copy)]
struct Sample {
    t: u64,
    y1: f64,
    y2: f64,
    kl: f64,
}

/// Streaming form of [`check_omwu_increments`]: feed states `x^0, x^1, …`
/// one at a time with [`IncrementMonitor::push`], then call
/// [`IncrementMonitor::finish`].
///
/// At each even `t ≥ 4`, as long as every `x_{1,2}^k, x_{2,2}^k` with
/// `k ≤ t + 2` stays at or below `1 − √η`, it asserts
///
/// 1. `¾pη³ ≤ x_{2,2}^{t+1} − x_{2,2}^{t−1} ≤ 12η²`
/// 2. `(3/2)pη^{3/2} ≤ x_{2,2}^t − x_{2,2}^{t+1} ≤ 3η`
/// 3. `¾pη³ ≤ x_{1,2}^{t+2} − x_{1,2}^t ≤ 12η²`
/// 4. `¾pη³ ≤ x_{1,2}^{t+1} − x_{1,2}^{t−1}`
/// 5. `¾pη³ ≤ x_{2,2}^{t+2} − x_{2,2}^t`
/// 6. `(3/2)pη^{3/2} ≤ x_{1,2}^{t+1} − x_{1,2}^{t+2} ≤ 3η`
///
/// and `KL(t+2) − KL(t) ≥ (3/8)p²η³`, with KL measured from the uniform
/// equilibrium.
#[derive(Debug, Clone)]
pub struct IncrementMonitor {
    p: f64,
    eta: f64,
    cutoff: f64,
    equilibrium: JointState,
    window: VecDeque<Sample>,
    next_t: u64,
    /// First time at which a coordinate left the region, if any.
    exit_time: Option<u64>,
    min_kl_increase: f64,
    report: PropertyReport,
}

impl IncrementMonitor {
    pub fn new(p: f64, eta: f64, init: &JointState) -> Result<Self> {
        if !(p > 0.0 && p < 0.25) {
            return Err(Error::Precondition(format!("p must lie in (0, 1/4), got {p}")));
        }
        let bound = (p / 16.0).powi(2);
        if !(eta > 0.0 && eta <= bound * (1.0 + ETA_BOUND_SLACK)) {
            return Err(Error::Precondition(format!(
                "step size {eta} exceeds the bound (p/16)^2 = {bound}"
            )));
        }
        if init.dims() != (2, 2) {
            return Err(Error::invalid("increment checks apply to 2x2 games only"));
        }
        let low = 0.5 + 2.0 * p - INIT_REGION_SLACK;
        if init.x1.prob(1) < low || init.x2.prob(1) < low {
            return Err(Error::Precondition(format!(
                "initial second-action probabilities must be at least 1/2 + 2p = {}",
                0.5 + 2.0 * p
            )));
        }
        Ok(Self {
            p,
            eta,
            cutoff: 1.0 - eta.sqrt(),
            equilibrium: JointState::uniform(2, 2)?,
            window: VecDeque::with_capacity(5),
            next_t: 0,
            exit_time: None,
            min_kl_increase: f64::INFINITY,
            report: PropertyReport::new("omwu increments"),
        })
    }

    /// True once some coordinate has left the region `x ≤ 1 − √η`.
    pub fn window_closed(&self) -> bool {
        self.exit_time.is_some()
    }

    pub fn push(&mut self, t: u64, state: &JointState) -> Result<()> {
        if t != self.next_t {
            return Err(Error::invalid(format!("expected time {}, got {t}", self.next_t)));
        }
        self.next_t += 1;
        let sample = Sample {
            t,
            y1: state.x1.prob(1),
            y2: state.x2.prob(1),
            kl: kl_divergence(&self.equilibrium, state)?,
        };
        if self.exit_time.is_none() && (sample.y1 > self.cutoff || sample.y2 > self.cutoff) {
            self.exit_time = Some(t);
        }
        if self.window.len() == 5 {
            self.window.pop_front();
        }
        self.window.push_back(sample);
        if self.window.len() == 5 && self.exit_time.is_none() {
            let tc = self.window[2].t;
            if tc >= 4 && tc % 2 == 0 {
                self.check_at();
            }
        }
        Ok(())
    }

    fn check_at(&mut self) {
        let (p, eta) = (self.p, self.eta);
        let w = &self.window;
        let (m1, c, p1, p2) = (w[1], w[2], w[3], w[4]);
        let t = c.t;
        let small = 0.75 * p * eta.powi(3);
        let mid = 1.5 * p * eta.powf(1.5);
        let r = &mut self.report;

        let d = p1.y2 - m1.y2;
        r.expect_le(t, "item 1 lower", small, d);
        r.expect_le(t, "item 1 upper", d, 12.0 * eta * eta);
        let d = c.y2 - p1.y2;
        r.expect_le(t, "item 2 lower", mid, d);
        r.expect_le(t, "item 2 upper", d, 3.0 * eta);
        let d = p2.y1 - c.y1;
        r.expect_le(t, "item 3 lower", small, d);
        r.expect_le(t, "item 3 upper", d, 12.0 * eta * eta);
        r.expect_le(t, "item 4 lower", small, p1.y1 - m1.y1);
        r.expect_le(t, "item 5 lower", small, p2.y2 - c.y2);
        let d = p1.y1 - p2.y1;
        r.expect_le(t, "item 6 lower", mid, d);
        r.expect_le(t, "item 6 upper", d, 3.0 * eta);

        let inc = p2.kl - c.kl;
        r.expect_le(t, "kl increase", KL_INCREASE_CONSTANT * p * p * eta.powi(3), inc);
        self.min_kl_increase = self.min_kl_increase.min(inc);
        r.checked_steps += 1;
    }

    pub fn finish(mut self) -> PropertyReport {
        let p3 = self.p * self.p * self.eta.powi(3);
        self.report.set_stat("min_kl_increase", self.min_kl_increase);
        self.report.set_stat("min_kl_increase_over_p2eta3", self.min_kl_increase / p3);
        self.report
            .set_stat("window_exit_time", self.exit_time.map_or(f64::INFINITY, |t| t as f64));
        self.report
            .set_stat("last_kl", self.window.back().map_or(f64::NAN, |s| s.kl));
        self.report
    }
}

/// Increment bounds and two-step KL increase for OMWU on the alternating
/// 2×2 game; see [`IncrementMonitor`] for the asserted inequalities.
///
/// Hypothesis violations (`p ∉ (0, ¼)`, `η > (p/16)²`, initial point outside
/// `x_{i,2}^0 ≥ ½ + 2p`) are reported as [`Error::Precondition`].
pub fn check_omwu_increments(traj: &Trajectory, p: f64, eta: f64) -> Result<PropertyReport> {
    require_algo(traj, AlgorithmTag::Omwu)?;
    require_alternating_2x2(traj)?;
    require_consecutive(traj)?;
    if traj.steps[0].t != 0 {
        return Err(Error::invalid("increment checks need the trajectory from t = 0"));
    }
    let init = &traj.steps[0].state;
    if divergence_margin(init) == 0.0 {
        return Err(Error::Precondition("initial state has a coordinate at 1/2".into()));
    }
    let mut monitor = IncrementMonitor::new(p, eta, init)?;
    for s in &traj.steps {
        monitor.push(s.t, &s.state)?;
    }
    Ok(monitor.finish())
}

/// Asserts `KL(eq, x^{t+1}) ≤ KL(eq, x^t) + tol` at every recorded step of an
/// Extra-MWU trajectory, and strict decrease whenever `x^t` is farther than
/// [`STRICT_DECREASE_DISTANCE`] from `eq`.
pub fn check_extra_kl_decrease(traj: &Trajectory, eq: &JointState, tol: f64) -> Result<PropertyReport> {
    require_algo(traj, AlgorithmTag::ExtraMwu)?;
    require_consecutive(traj)?;
    if traj.dims() != Some(eq.dims()) {
        return Err(Error::invalid("equilibrium and trajectory dimensions differ"));
    }
    if !(tol >= 0.0) {
        return Err(Error::invalid("tolerance must be non-negative"));
    }
    let mut report = PropertyReport::new("extra-mwu kl decrease");
    let mut max_increase = f64::NEG_INFINITY;
    let mut prev = kl_divergence(eq, &traj.steps[0].state)?;
    for w in traj.steps.windows(2) {
        let next = kl_divergence(eq, &w[1].state)?;
        let t = w[0].t;
        report.expect_le(t, "nonincreasing", next, prev + tol);
        if w[0].state.max_abs_diff(eq) > STRICT_DECREASE_DISTANCE && !(next < prev) {
            report.violate(t, "strict decrease", next, prev, prev - next);
        }
        max_increase = max_increase.max(next - prev);
        report.checked_steps += 1;
        prev = next;
    }
    report.set_stat("max_step_change", max_increase);
    report.set_stat("final_kl", prev);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::run_trajectory;
    use crate::game::{PayoffMatrix, PeriodicGame};
    use crate::simplex::normalize_log_weights;

    fn alternating() -> PeriodicGame {
        PeriodicGame::new(vec![
            PayoffMatrix::from_rows(&[vec![0.0, -1.0], vec![-1.0, 0.0]]).unwrap(),
            PayoffMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap(),
        ])
        .unwrap()
    }

    fn start() -> JointState {
        JointState::from_probs(&[0.45, 0.55], &[0.45, 0.55]).unwrap()
    }

    #[test]
    fn identities_hold_at_the_equilibrium_with_zero_residual() {
        let eq = JointState::uniform(2, 2).unwrap();
        let traj = run_trajectory(&alternating(), AlgorithmTag::Omwu, eq, 0.1, 20, 1, None).unwrap();
        let r = check_omwu_ratio_identities(&traj, 0.1, 1e-10).unwrap();
        assert!(r.passed);
        assert_eq!(r.stat("max_relative_residual"), Some(0.0));
        assert!(r.checked_steps > 0);
    }

    #[test]
    fn identities_hold_on_an_omwu_run() {
        let traj = run_trajectory(&alternating(), AlgorithmTag::Omwu, start(), 1e-3, 500, 1, None).unwrap();
        let r = check_omwu_ratio_identities(&traj, 1e-3, 1e-10).unwrap();
        assert!(r.passed, "{:?}", r.violations.first());
        assert_eq!(r.checked_steps, 249);
    }

    #[test]
    fn corrupted_state_is_detected() {
        let mut traj = run_trajectory(&alternating(), AlgorithmTag::Omwu, start(), 1e-3, 100, 1, None).unwrap();
        let k = 40;
        let lp = traj.steps[k].state.x2.log_probs().to_vec();
        let p0 = lp[0].exp() + 1e-3;
        traj.steps[k].state.x2 = normalize_log_weights(&[p0.ln(), (1.0 - p0).ln()]).unwrap();
        let r = check_omwu_ratio_identities(&traj, 1e-3, 1e-10).unwrap();
        assert!(!r.passed);
        assert!(r.violations.iter().all(|v| v.t.abs_diff(k as u64) <= 2));
        assert!(r.violations.iter().any(|v| v.t == k as u64));
    }

    #[test]
    fn identity_checker_rejects_other_algorithms() {
        let traj = run_trajectory(&alternating(), AlgorithmTag::Mwu, start(), 1e-3, 10, 1, None).unwrap();
        assert!(check_omwu_ratio_identities(&traj, 1e-3, 1e-10).is_err());
        let strided = run_trajectory(&alternating(), AlgorithmTag::Omwu, start(), 1e-3, 10, 2, None).unwrap();
        assert!(check_omwu_ratio_identities(&strided, 1e-3, 1e-10).is_err());
    }

    #[test]
    fn increments_hold_within_the_hypothesis() {
        let p = 0.025;
        let eta = 1e-6;
        let traj = run_trajectory(&alternating(), AlgorithmTag::Omwu, start(), eta, 2000, 1, None).unwrap();
        let r = check_omwu_increments(&traj, p, eta).unwrap();
        assert!(r.passed, "{:?}", r.violations.first());
        assert_eq!(r.checked_steps, 998);
        assert!(r.stat("min_kl_increase").unwrap() >= KL_INCREASE_CONSTANT * p * p * eta.powi(3));
    }

    #[test]
    fn increment_preconditions() {
        let eq = JointState::uniform(2, 2).unwrap();
        let traj = run_trajectory(&alternating(), AlgorithmTag::Omwu, eq, 1e-6, 10, 1, None).unwrap();
        assert!(matches!(check_omwu_increments(&traj, 0.025, 1e-6), Err(Error::Precondition(_))));

        let traj = run_trajectory(&alternating(), AlgorithmTag::Omwu, start(), 1e-3, 10, 1, None).unwrap();
        assert!(matches!(check_omwu_increments(&traj, 0.025, 1e-3), Err(Error::Precondition(_))));
        // p too large for this initial point.
        let traj = run_trajectory(&alternating(), AlgorithmTag::Omwu, start(), 1e-6, 10, 1, None).unwrap();
        assert!(matches!(check_omwu_increments(&traj, 0.05, 1e-6), Err(Error::Precondition(_))));
    }

    #[test]
    fn monitor_requires_consecutive_times() {
        let mut m = IncrementMonitor::new(0.025, 1e-6, &start()).unwrap();
        m.push(0, &start()).unwrap();
        assert!(m.push(2, &start()).is_err());
    }

    #[test]
    fn kl_decrease_on_constant_trajectory() {
        let eq = JointState::uniform(2, 2).unwrap();
        let traj = run_trajectory(&alternating(), AlgorithmTag::ExtraMwu, eq.clone(), 0.5, 50, 1, Some(&eq)).unwrap();
        let r = check_extra_kl_decrease(&traj, &eq, 1e-12).unwrap();
        assert!(r.passed);
        assert_eq!(r.stat("max_step_change"), Some(0.0));
        assert_eq!(r.stat("final_kl"), Some(0.0));
    }

    #[test]
    fn kl_decrease_detects_increase() {
        let eq = JointState::uniform(2, 2).unwrap();
        // OMWU moves away from the equilibrium; relabel it to exercise the checker.
        let mut traj = run_trajectory(&alternating(), AlgorithmTag::Omwu, start(), 0.1, 200, 1, None).unwrap();
        traj.algo = AlgorithmTag::ExtraMwu;
        let r = check_extra_kl_decrease(&traj, &eq, 1e-12).unwrap();
        assert!(!r.passed);
    }
}
