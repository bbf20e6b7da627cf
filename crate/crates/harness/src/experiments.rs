//! Built-in periodic games and their default run parameters.

use pgames_core::dynamics::{max_step_size, AlgorithmTag};
use pgames_core::{JointState, PayoffMatrix, PeriodicGame};

use crate::error::{HarnessError, Result};

/// Default Extra-MWU (and plain MWU) step size; below `1 / max_t ‖A_t‖₂`
/// for every built-in game.
pub const DEFAULT_ETA_EXTRA: f64 = 0.1;
/// Default OMWU step size for exploratory runs.
pub const DEFAULT_ETA_OMWU: f64 = 0.01;
pub const DEFAULT_STEPS_EXTRA: u64 = 20_000;
/// OMWU drifts away slowly at `η = 0.01`; a million steps takes the
/// built-in games close enough to the boundary to be unambiguous.
pub const DEFAULT_STEPS_OMWU: u64 = 1_000_000;
/// Mass added to the last action of the uniform strategy for the default
/// initial point, before renormalising.
pub const DEFAULT_INIT_PERTURBATION: f64 = 0.05;

/// How a run obtains the point its KL-divergence is measured from.
#[derive(Debug, Clone, PartialEq)]
pub enum ReferencePolicy {
    /// Use the common equilibrium of the schedule, if one exists.
    SolveCommon,
    Explicit(JointState),
    None,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub name: &'static str,
    pub description: &'static str,
    pub game: PeriodicGame,
    pub default_algo: AlgorithmTag,
    pub default_eta: f64,
    pub default_steps: u64,
    pub reference_policy: ReferencePolicy,
}

impl ExperimentSpec {
    /// Step size and step count used when the caller does not override them.
    pub fn defaults_for(&self, algo: AlgorithmTag) -> (f64, u64) {
        if algo == self.default_algo {
            (self.default_eta, self.default_steps)
        } else {
            default_eta_steps(algo)
        }
    }
}

/// Per-algorithm default `(η, steps)`.
pub fn default_eta_steps(algo: AlgorithmTag) -> (f64, u64) {
    match algo {
        AlgorithmTag::Omwu => (DEFAULT_ETA_OMWU, DEFAULT_STEPS_OMWU),
        AlgorithmTag::Mwu | AlgorithmTag::ExtraMwu => (DEFAULT_ETA_EXTRA, DEFAULT_STEPS_EXTRA),
    }
}

/// Uniform strategies with [`DEFAULT_INIT_PERTURBATION`] added to the last
/// action of each player, renormalised.
pub fn default_init(m: usize, n: usize) -> Result<JointState> {
    let perturbed = |k: usize| {
        let mut p = vec![1.0 / k as f64; k];
        p[k - 1] += DEFAULT_INIT_PERTURBATION;
        let total: f64 = p.iter().sum();
        p.iter().map(|v| v / total).collect::<Vec<_>>()
    };
    Ok(JointState::from_probs(&perturbed(m), &perturbed(n))?)
}

fn schedule(mats: &[&[&[f64]]]) -> PeriodicGame {
    let mats = mats
        .iter()
        .map(|rows| {
            let rows: Vec<Vec<f64>> = rows.iter().map(|r| r.to_vec()).collect();
            PayoffMatrix::from_rows(&rows).expect("built-in matrix is valid")
        })
        .collect();
    PeriodicGame::new(mats).expect("built-in schedule is valid")
}

const RPS: &[&[f64]] = &[&[0.0, -1.0, 1.0], &[1.0, 0.0, -1.0], &[-1.0, 1.0, 0.0]];
const RPS_REVERSED: &[&[f64]] = &[&[0.0, 1.0, -1.0], &[-1.0, 0.0, 1.0], &[1.0, -1.0, 0.0]];
const SKEWED_ODD: &[&[f64]] = &[&[0.0, 0.25, 0.75], &[1.5, 0.0, 0.0], &[0.0, 1.0, 0.0]];
const SKEWED_EVEN: &[&[f64]] = &[&[0.0, 0.75, 0.25], &[1.5, 0.0, 0.0], &[0.0, 0.0, 1.0]];

/// The four built-in schedules: `game2x2`, `exp1`, `exp2` and `nocommon3`.
///
/// Matrices are listed by phase, `matrices[t mod T]`, rows first.
pub fn builtin_experiments() -> Vec<ExperimentSpec> {
    let spec = |name, description, game| ExperimentSpec {
        name,
        description,
        game,
        default_algo: AlgorithmTag::ExtraMwu,
        default_eta: DEFAULT_ETA_EXTRA,
        default_steps: DEFAULT_STEPS_EXTRA,
        reference_policy: ReferencePolicy::SolveCommon,
    };
    let mut nocommon = spec(
        "nocommon3",
        "3-periodic 3x3 schedule whose phases share no equilibrium",
        schedule(&[RPS, RPS_REVERSED, SKEWED_ODD]),
    );
    nocommon.reference_policy = ReferencePolicy::None;
    vec![
        spec(
            "game2x2",
            "2-periodic 2x2 game alternating [[0,-1],[-1,0]] and [[0,1],[1,0]]",
            schedule(&[&[&[0.0, -1.0], &[-1.0, 0.0]], &[&[0.0, 1.0], &[1.0, 0.0]]]),
        ),
        spec(
            "exp1",
            "2-periodic 3x3 schedule with a common fully mixed equilibrium",
            schedule(&[SKEWED_EVEN, SKEWED_ODD]),
        ),
        spec(
            "exp2",
            "4-periodic 3x3 schedule with a common fully mixed equilibrium",
            schedule(&[
                RPS,
                RPS_REVERSED,
                &[&[1.0, -3.0, 2.0], &[-2.0, 1.0, 1.0], &[1.0, 2.0, -3.0]],
                &[&[1.0, -2.0, 1.0], &[-2.0, 1.0, 1.0], &[1.0, 1.0, -2.0]],
            ]),
        ),
        nocommon,
    ]
}

pub fn experiment_names() -> Vec<&'static str> {
    builtin_experiments().iter().map(|e| e.name).collect()
}

pub fn find_experiment(name: &str) -> Result<ExperimentSpec> {
    builtin_experiments()
        .into_iter()
        .find(|e| e.name == name)
        .ok_or_else(|| {
            HarnessError::Usage(format!(
                "unknown experiment `{name}`; expected one of {}",
                experiment_names().join(", ")
            ))
        })
}

/// Checks that the default Extra-MWU step size is admissible for `spec`.
pub fn check_default_eta(spec: &ExperimentSpec) -> Result<()> {
    let bound = max_step_size(&spec.game);
    if spec.default_eta < bound {
        Ok(())
    } else {
        Err(HarnessError::Usage(format!(
            "default step size {} of `{}` is not below the bound {bound}",
            spec.default_eta, spec.name
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_has_four_uniquely_named_games() {
        let names = experiment_names();
        assert_eq!(names, ["game2x2", "exp1", "exp2", "nocommon3"]);
        let periods: Vec<usize> = builtin_experiments().iter().map(|e| e.game.period()).collect();
        assert_eq!(periods, [2, 2, 4, 3]);
    }

    #[test]
    fn default_step_size_is_admissible_everywhere() {
        for spec in builtin_experiments() {
            check_default_eta(&spec).unwrap();
        }
    }

    #[test]
    fn default_init_shifts_mass_to_the_last_action() {
        let s = default_init(2, 3).unwrap();
        assert!((s.x1.prob(1) - 0.55 / 1.05).abs() < 1e-15);
        assert!((s.x2.prob(2) - (1.0 / 3.0 + 0.05) / 1.05).abs() < 1e-15);
        assert!(s.x2.prob(0) < 1.0 / 3.0);
    }

    #[test]
    fn unknown_name_lists_the_alternatives() {
        let err = find_experiment("exp3").unwrap_err().to_string();
        assert!(err.contains("game2x2") && err.contains("nocommon3"));
    }
}
