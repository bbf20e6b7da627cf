//! Update rules and trajectory execution.
//!
//! All three rules are exponential-weights updates in log space:
//!
//! * MWU: `x1 ← x1 ⊙ exp(η A_t x2)`, `x2 ← x2 ⊙ exp(−η A_tᵀ x1)`;
//! * OMWU: the increment is `2η v_t − η v_{t−1}` where `v_t` is the payoff
//!   vector at time `t` (and `A_{−1}` is the last matrix of the schedule);
//! * Extra-MWU: a half step with payoffs at `x^t`, then a full step from
//!   `x^t` with payoffs at the half step.

mod reduced;

use std::fmt;
use std::str::FromStr;

pub use reduced::{omwu_reduced_compose, omwu_reduced_map, reduced_map_unchecked, Parity, ReducedState4};

use crate::error::{Error, Result};
use crate::game::{PayoffMatrix, PeriodicGame};
use crate::simplex::Simplex;
use crate::state::JointState;
use crate::trajectory::Trajectory;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AlgorithmTag {
    Mwu,
    Omwu,
    ExtraMwu,
}

impl AlgorithmTag {
    pub const ALL: [AlgorithmTag; 3] = [AlgorithmTag::Mwu, AlgorithmTag::Omwu, AlgorithmTag::ExtraMwu];

    pub fn as_str(self) -> &'static str {
        match self {
            AlgorithmTag::Mwu => "mwu",
            AlgorithmTag::Omwu => "omwu",
            AlgorithmTag::ExtraMwu => "extra",
        }
    }
}

impl fmt::Display for AlgorithmTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AlgorithmTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mwu" => Ok(AlgorithmTag::Mwu),
            "omwu" => Ok(AlgorithmTag::Omwu),
            "extra" | "extra-mwu" | "extramwu" => Ok(AlgorithmTag::ExtraMwu),
            other => Err(Error::invalid(format!(
                "unknown algorithm {other:?} (expected mwu, omwu or extra)"
            ))),
        }
    }
}

/// Current and previous joint strategies, as needed by OMWU.
#[derive(Debug, Clone, PartialEq)]
pub struct OmwuState {
    pub current: JointState,
    pub previous: JointState,
}

impl OmwuState {
    pub fn new(current: JointState, previous: JointState) -> Result<Self> {
        if current.dims() != previous.dims() {
            return Err(Error::invalid(format!(
                "current state is {:?} but previous is {:?}",
                current.dims(),
                previous.dims()
            )));
        }
        Ok(Self { current, previous })
    }
}

/// `x^{−1} = x^0` unless given explicitly.
impl From<JointState> for OmwuState {
    fn from(state: JointState) -> Self {
        Self {
            previous: state.clone(),
            current: state,
        }
    }
}

fn check_eta(eta: f64) -> Result<()> {
    if eta.is_finite() && eta > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("step size must be positive and finite, got {eta}")))
    }
}

/// One exponential-weights step: `x_i ∝ x_i e^{η payoff_i}`.
pub fn exp_weights_step(x: &Simplex, payoff: &[f64], eta: f64) -> Result<Simplex> {
    check_eta(eta)?;
    Error::check_dim(x.dim(), payoff.len())?;
    if payoff.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("payoff vector has non-finite entries"));
    }
    let increment: Vec<f64> = payoff.iter().map(|v| eta * v).collect();
    x.shifted(&increment)
}

/// Payoff vectors `(A x2, −Aᵀ x1)` seen by the two players.
pub fn payoff_vectors(a: &PayoffMatrix, state: &JointState) -> Result<(Vec<f64>, Vec<f64>)> {
    state.check_dims(a.rows(), a.cols())?;
    let p1 = a.mul_vec(state.x2.probs());
    let p2 = a.tr_mul_vec(state.x1.probs()).into_iter().map(|v| -v).collect();
    Ok((p1, p2))
}

pub fn mwu_joint_step(a: &PayoffMatrix, state: &JointState, eta: f64) -> Result<JointState> {
    let (p1, p2) = payoff_vectors(a, state)?;
    Ok(JointState::new(
        exp_weights_step(&state.x1, &p1, eta)?,
        exp_weights_step(&state.x2, &p2, eta)?,
    ))
}

/// OMWU step from time `t` to `t + 1`, using `A_t` and `A_{t−1}`.
pub fn omwu_joint_step(game: &PeriodicGame, t: u64, state: &OmwuState, eta: f64) -> Result<OmwuState> {
    check_eta(eta)?;
    let t = t as i64;
    let (now1, now2) = payoff_vectors(game.matrix_at(t), &state.current)?;
    let (prev1, prev2) = payoff_vectors(game.matrix_at(t - 1), &state.previous)?;
    let d1: Vec<f64> = now1.iter().zip(&prev1).map(|(a, b)| 2.0 * a - b).collect();
    let d2: Vec<f64> = now2.iter().zip(&prev2).map(|(a, b)| 2.0 * a - b).collect();
    let next = JointState::new(
        exp_weights_step(&state.current.x1, &d1, eta)?,
        exp_weights_step(&state.current.x2, &d2, eta)?,
    );
    Ok(OmwuState {
        previous: state.current.clone(),
        current: next,
    })
}

/// Extra-MWU step. Returns `(half, next)`; both are computed from `state`.
pub fn extra_mwu_joint_step(
    a: &PayoffMatrix,
    state: &JointState,
    eta: f64,
) -> Result<(JointState, JointState)> {
    let half = mwu_joint_step(a, state, eta)?;
    let (p1, p2) = payoff_vectors(a, &half)?;
    let next = JointState::new(
        exp_weights_step(&state.x1, &p1, eta)?,
        exp_weights_step(&state.x2, &p2, eta)?,
    );
    Ok((half, next))
}

/// Iterator over the states `x^1, x^2, …` of a run, starting at time 0.
///
/// Yields `(t, x^t)`; it never terminates on its own, so pair it with `take`.
pub struct Simulation<'a> {
    game: &'a PeriodicGame,
    algo: AlgorithmTag,
    eta: f64,
    t: u64,
    state: OmwuState,
}

impl<'a> Simulation<'a> {
    pub fn new(
        game: &'a PeriodicGame,
        algo: AlgorithmTag,
        init: impl Into<OmwuState>,
        eta: f64,
    ) -> Result<Self> {
        check_eta(eta)?;
        let state = init.into();
        state.current.check_dims(game.rows(), game.cols())?;
        state.previous.check_dims(game.rows(), game.cols())?;
        Ok(Self {
            game,
            algo,
            eta,
            t: 0,
            state,
        })
    }

    pub fn time(&self) -> u64 {
        self.t
    }

    pub fn state(&self) -> &OmwuState {
        &self.state
    }

    /// Advances one step and returns the new time.
    pub fn advance(&mut self) -> Result<u64> {
        let a = self.game.matrix_at(self.t as i64);
        self.state = match self.algo {
            AlgorithmTag::Mwu => mwu_joint_step(a, &self.state.current, self.eta)?.into(),
            AlgorithmTag::ExtraMwu => extra_mwu_joint_step(a, &self.state.current, self.eta)?.1.into(),
            AlgorithmTag::Omwu => omwu_joint_step(self.game, self.t, &self.state, self.eta)?,
        };
        self.t += 1;
        Ok(self.t)
    }
}

impl Iterator for Simulation<'_> {
    type Item = Result<(u64, JointState)>;

    fn next(&mut self) -> Option<Self::Item> {
        Some(self.advance().map(|t| (t, self.state.current.clone())))
    }
}

/// Default recording stride: every step up to 10^5 steps, else every 10th.
pub fn default_record_every(steps: u64) -> u64 {
    if steps <= 100_000 {
        1
    } else {
        10
    }
}

/// Runs `steps` updates from `init`, recording time 0, every `record_every`
/// steps, and the final step.
pub fn run_trajectory(
    game: &PeriodicGame,
    algo: AlgorithmTag,
    init: impl Into<OmwuState>,
    eta: f64,
    steps: u64,
    record_every: u64,
    reference: Option<&JointState>,
) -> Result<Trajectory> {
    if steps == 0 || record_every == 0 {
        return Err(Error::invalid("steps and record_every must be at least 1"));
    }
    let mut sim = Simulation::new(game, algo, init, eta)?;
    let mut traj = new_trajectory(game, algo, eta, reference)?;
    traj.record(0, sim.state().current.clone())?;
    while sim.time() < steps {
        let t = sim.advance()?;
        if t % record_every == 0 || t == steps {
            traj.record(t, sim.state().current.clone())?;
        }
    }
    Ok(traj)
}

/// Runs `steps` updates but records only the last `tail` states, every step.
pub fn run_trajectory_tail(
    game: &PeriodicGame,
    algo: AlgorithmTag,
    init: impl Into<OmwuState>,
    eta: f64,
    steps: u64,
    tail: u64,
    reference: Option<&JointState>,
) -> Result<Trajectory> {
    if steps == 0 || tail == 0 {
        return Err(Error::invalid("steps and tail must be at least 1"));
    }
    let mut sim = Simulation::new(game, algo, init, eta)?;
    let mut traj = new_trajectory(game, algo, eta, reference)?;
    let first = steps.saturating_sub(tail - 1);
    if first == 0 {
        traj.record(0, sim.state().current.clone())?;
    }
    while sim.time() < steps {
        let t = sim.advance()?;
        if t >= first {
            traj.record(t, sim.state().current.clone())?;
        }
    }
    Ok(traj)
}

fn new_trajectory(
    game: &PeriodicGame,
    algo: AlgorithmTag,
    eta: f64,
    reference: Option<&JointState>,
) -> Result<Trajectory> {
    if let Some(r) = reference {
        r.check_dims(game.rows(), game.cols())?;
    }
    Ok(Trajectory::new(algo, eta, game.period(), reference.cloned()))
}

/// Matrix norm used in the Extra-MWU step-size condition `η · max_t ‖A_t‖ < 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MatrixNorm {
    #[default]
    Spectral,
    /// Upper bound on the spectral norm, so it yields a smaller step size.
    Frobenius,
}

/// `1 / max_t ‖A_t‖₂`; `+∞` when every matrix is zero.
pub fn max_step_size(game: &PeriodicGame) -> f64 {
    max_step_size_with(game, MatrixNorm::Spectral)
}

pub fn max_step_size_with(game: &PeriodicGame, norm: MatrixNorm) -> f64 {
    let largest = game
        .matrices()
        .iter()
        .map(|a| match norm {
            MatrixNorm::Spectral => a.spectral_norm(),
            MatrixNorm::Frobenius => a.frobenius_norm(),
        })
        .fold(0.0, f64::max);
    if largest == 0.0 {
        f64::INFINITY
    } else {
        1.0 / largest
    }
}

/// Largest step size for which the 2×2 OMWU divergence estimates apply from
/// `init`: with `p = ½ min(|x_{1,1} − ½|, |x_{2,1} − ½|)`, returns `(p/16)²`.
pub fn omwu_eta_bound_for_divergence(init: &JointState) -> Result<f64> {
    init.check_dims(2, 2)?;
    let p = divergence_margin(init);
    if p == 0.0 {
        return Err(Error::Precondition(
            "initial state has a coordinate at the equilibrium value 1/2".into(),
        ));
    }
    Ok((p / 16.0).powi(2))
}

/// `p = ½ min(|x_{1,1} − ½|, |x_{2,1} − ½|)` for a 2×2 joint state.
pub fn divergence_margin(init: &JointState) -> f64 {
    0.5 * (init.x1.prob(0) - 0.5).abs().min((init.x2.prob(0) - 0.5).abs())
}
