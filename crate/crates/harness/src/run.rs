//! Executing a configured run and writing its artifacts.

use std::path::PathBuf;

use pgames_core::dynamics::{max_step_size, run_trajectory, AlgorithmTag};
use pgames_core::equilibrium::{common_equilibrium, EquilibriumResult, DEFAULT_TOL};
use pgames_core::{JointState, Trajectory};

use crate::config::RunConfig;
use crate::csv::emit_csv;
use crate::error::Result;
use crate::experiments::{default_init, ReferencePolicy};
use crate::svg::{emit_svg_plot, Series};

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub trajectory: Trajectory,
    /// The solved common equilibrium, when the policy asked for one and it
    /// exists.
    pub equilibrium: Option<EquilibriumResult>,
    pub csv_path: Option<PathBuf>,
    pub svg_path: Option<PathBuf>,
    /// Non-fatal observations, such as a step size above the Extra-MWU bound.
    pub warnings: Vec<String>,
}

/// Resolves the reference point of a run; the second value is the solver
/// result when one was computed.
pub fn resolve_reference(cfg: &RunConfig) -> Result<(Option<JointState>, Option<EquilibriumResult>)> {
    Ok(match &cfg.reference {
        ReferencePolicy::None => (None, None),
        ReferencePolicy::Explicit(r) => (Some(r.clone()), None),
        ReferencePolicy::SolveCommon => match common_equilibrium(&cfg.game, DEFAULT_TOL)? {
            Some(eq) => (Some(eq.joint_state()), Some(eq)),
            None => (None, None),
        },
    })
}

/// Series drawn for a run: the KL-divergence when there is a reference,
/// otherwise every strategy component.
pub fn plot_series(traj: &Trajectory) -> Vec<Series> {
    if traj.reference.is_some() {
        let pts = traj.steps.iter().map(|s| (s.t as f64, s.kl_to_ref)).collect();
        return vec![Series::new("KL to reference", pts)];
    }
    let Some((m, n)) = traj.dims() else {
        return Vec::new();
    };
    let component = |player: usize, i: usize| {
        let pts = traj
            .steps
            .iter()
            .map(|s| {
                let x = if player == 1 { &s.state.x1 } else { &s.state.x2 };
                (s.t as f64, x.prob(i))
            })
            .collect();
        Series::new(format!("x{player}_{}", i + 1), pts)
    };
    (0..m).map(|i| component(1, i)).chain((0..n).map(|j| component(2, j))).collect()
}

/// Resolves the reference, runs the dynamics and writes the requested files.
pub fn run_experiment(cfg: &RunConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let mut warnings = Vec::new();
    if matches!(cfg.algo, AlgorithmTag::ExtraMwu | AlgorithmTag::Mwu) {
        let bound = max_step_size(&cfg.game);
        if cfg.eta >= bound {
            warnings.push(format!(
                "step size {} is not below 1/max_t ||A_t|| = {bound}; convergence is not guaranteed",
                cfg.eta
            ));
        }
    }
    let (reference, equilibrium) = resolve_reference(cfg)?;
    if reference.is_none() && cfg.reference == ReferencePolicy::SolveCommon {
        warnings.push("no common equilibrium found; kl_to_ref is nan".into());
    }
    let init = cfg.initial_state(default_init(cfg.game.rows(), cfg.game.cols())?)?;
    let trajectory = run_trajectory(
        &cfg.game,
        cfg.algo,
        init,
        cfg.eta,
        cfg.steps,
        cfg.record_every,
        reference.as_ref(),
    )?;
    if let Some(path) = &cfg.out_csv {
        emit_csv(&trajectory, path)?;
    }
    if let Some(path) = &cfg.out_svg {
        emit_svg_plot(&plot_series(&trajectory), path, cfg.log_y)?;
    }
    Ok(RunOutput {
        trajectory,
        equilibrium,
        csv_path: cfg.out_csv.clone(),
        svg_path: cfg.out_svg.clone(),
        warnings,
    })
}

fn fmt_probs(p: &[f64]) -> String {
    let parts: Vec<String> = p.iter().map(|v| format!("{v:.6}")).collect();
    format!("({})", parts.join(", "))
}

impl RunOutput {
    /// Human-readable summary of the final state.
    pub fn summary(&self, name: &str) -> String {
        let traj = &self.trajectory;
        let last = traj.last().expect("runs record at least two states");
        let mut s = format!(
            "{name}: algo={} eta={} steps={} final x1={} x2={} kl_to_ref={:e} min_component={:e}",
            traj.algo,
            traj.eta,
            last.t,
            fmt_probs(last.state.x1.probs()),
            fmt_probs(last.state.x2.probs()),
            last.kl_to_ref,
            last.min_component
        );
        if let Some(eq) = &self.equilibrium {
            s.push_str(&format!(
                "\n{name}: common equilibrium x*={} y*={} value={} gap={:e}",
                fmt_probs(eq.x_star.probs()),
                fmt_probs(eq.y_star.probs()),
                eq.value,
                eq.gap
            ));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::find_experiment;

    #[test]
    fn extra_mwu_on_the_alternating_game_converges() {
        let mut cfg = RunConfig::for_experiment(&find_experiment("game2x2").unwrap(), None);
        cfg.steps = 10_000;
        let out = run_experiment(&cfg).unwrap();
        let last = out.trajectory.last().unwrap();
        assert!(last.state.max_abs_diff(&JointState::uniform(2, 2).unwrap()) < 1e-6);
        assert!(out.warnings.is_empty());
        assert!(out.equilibrium.unwrap().fully_mixed);
    }

    #[test]
    fn missing_common_equilibrium_leaves_kl_undefined() {
        let mut cfg = RunConfig::for_experiment(&find_experiment("exp1").unwrap(), None);
        cfg.game = find_experiment("nocommon3").unwrap().game;
        cfg.steps = 30;
        let out = run_experiment(&cfg).unwrap();
        assert!(out.trajectory.steps.iter().all(|s| s.kl_to_ref.is_nan()));
        assert_eq!(out.warnings.len(), 1);
    }

    #[test]
    fn large_step_size_is_flagged() {
        let mut cfg = RunConfig::for_experiment(&find_experiment("exp2").unwrap(), None);
        cfg.eta = 0.3;
        cfg.steps = 5;
        assert_eq!(run_experiment(&cfg).unwrap().warnings.len(), 1);
    }

    #[test]
    fn plots_fall_back_to_strategy_components() {
        let mut cfg = RunConfig::for_experiment(&find_experiment("nocommon3").unwrap(), None);
        cfg.steps = 5;
        let series = plot_series(&run_experiment(&cfg).unwrap().trajectory);
        let labels: Vec<&str> = series.iter().map(|s| s.label.as_str()).collect();
        assert_eq!(labels, ["x1_1", "x1_2", "x1_3", "x2_1", "x2_2", "x2_3"]);
    }
}
