//! JSON run configurations.
//!
//! ```json
//! {"experiment": "game2x2", "algo": "extra", "eta": 0.1, "steps": 10000}
//! ```
//!
//! The game is given by exactly one of `experiment` (a built-in name),
//! `matrices` (an array of matrices, each an array of rows, with an optional
//! `period` that must equal their number) or `generate` (`{"rows", "cols",
//! "period"}`, drawn from `seed`). The remaining fields are `algo`, `eta`,
//! `steps`, `record_every`, `init` and `init_prev` (each `[x1, x2]`), `seed`,
//! `out_csv` and `out_svg`. Omitted run parameters take the defaults of the
//! experiment or algorithm; unknown fields are rejected.

use std::fs;
use std::path::{Path, PathBuf};

use pgames_core::dynamics::{default_record_every, AlgorithmTag, OmwuState};
use pgames_core::{JointState, PayoffMatrix, PeriodicGame};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{Map, Value};

use crate::error::{HarnessError, Result};
use crate::experiments::{default_eta_steps, find_experiment, ExperimentSpec, ReferencePolicy};
use crate::generate::generate_common_schedule;

const FIELDS: [&str; 14] = [
    "experiment",
    "matrices",
    "period",
    "generate",
    "algo",
    "eta",
    "steps",
    "record_every",
    "init",
    "init_prev",
    "seed",
    "out_csv",
    "out_svg",
    "log_y",
];

/// Probabilities of an initial strategy may be off by this much before
/// renormalisation.
const INIT_SUM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerateSpec {
    pub rows: usize,
    pub cols: usize,
    pub period: usize,
}

/// A fully resolved run: game, reference policy and every run parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub name: String,
    pub game: PeriodicGame,
    pub reference: ReferencePolicy,
    pub algo: AlgorithmTag,
    pub eta: f64,
    pub steps: u64,
    pub record_every: u64,
    /// `x^0`; the experiment default when absent.
    pub init: Option<JointState>,
    /// `x^{-1}` for OMWU; `x^0` when absent.
    pub init_prev: Option<JointState>,
    pub seed: Option<u64>,
    pub out_csv: Option<PathBuf>,
    pub out_svg: Option<PathBuf>,
    pub log_y: bool,
}

impl RunConfig {
    /// A built-in experiment with its defaults for `algo` (or its own default
    /// algorithm).
    pub fn for_experiment(spec: &ExperimentSpec, algo: Option<AlgorithmTag>) -> Self {
        let algo = algo.unwrap_or(spec.default_algo);
        let (eta, steps) = spec.defaults_for(algo);
        Self {
            name: spec.name.to_string(),
            game: spec.game.clone(),
            reference: spec.reference_policy.clone(),
            algo,
            eta,
            steps,
            record_every: default_record_every(steps),
            init: None,
            init_prev: None,
            seed: None,
            out_csv: None,
            out_svg: None,
            log_y: false,
        }
    }

    /// Checks the run parameters; errors name the offending field.
    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(HarnessError::config("eta", format!("must be a positive finite number, got {}", self.eta)));
        }
        if self.steps == 0 {
            return Err(HarnessError::config("steps", "must be at least 1"));
        }
        if self.record_every == 0 {
            return Err(HarnessError::config("record_every", "must be at least 1"));
        }
        let dims = (self.game.rows(), self.game.cols());
        for (field, s) in [("init", &self.init), ("init_prev", &self.init_prev)] {
            if let Some(s) = s {
                if s.dims() != dims {
                    return Err(HarnessError::config(
                        field,
                        format!("strategies have sizes {:?}, the game needs {dims:?}", s.dims()),
                    ));
                }
            }
        }
        if let ReferencePolicy::Explicit(r) = &self.reference {
            if r.dims() != dims {
                return Err(HarnessError::config("reference", "dimensions do not match the game"));
            }
        }
        Ok(())
    }

    /// `(x^0, x^{-1})`, falling back to `default` for `x^0`.
    pub fn initial_state(&self, default: JointState) -> Result<OmwuState> {
        let current = self.init.clone().unwrap_or(default);
        let previous = self.init_prev.clone().unwrap_or_else(|| current.clone());
        Ok(OmwuState::new(current, previous)?)
    }
}

fn field<T: DeserializeOwned>(obj: &Map<String, Value>, name: &str) -> Result<Option<T>> {
    obj.get(name)
        .map(|v| serde_json::from_value(v.clone()).map_err(|e| HarnessError::config(name, e.to_string())))
        .transpose()
}

fn parse_strategy(field: &str, probs: &[f64]) -> Result<Vec<f64>> {
    if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
        return Err(HarnessError::config(field, "probabilities must be finite and non-negative"));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > INIT_SUM_TOL {
        return Err(HarnessError::config(field, format!("probabilities sum to {total}, not 1")));
    }
    Ok(probs.to_vec())
}

fn parse_init(obj: &Map<String, Value>, name: &str) -> Result<Option<JointState>> {
    let Some(pair) = field::<Vec<Vec<f64>>>(obj, name)? else {
        return Ok(None);
    };
    if pair.len() != 2 {
        return Err(HarnessError::config(name, "expected [x1, x2]"));
    }
    let x1 = parse_strategy(name, &pair[0])?;
    let x2 = parse_strategy(name, &pair[1])?;
    JointState::from_probs(&x1, &x2)
        .map(Some)
        .map_err(|e| HarnessError::config(name, e.to_string()))
}

/// Parses a configuration document; see the module docs for the schema.
pub fn parse_config_str(text: &str) -> Result<RunConfig> {
    let value: Value = serde_json::from_str(text)?;
    let Value::Object(obj) = value else {
        return Err(HarnessError::config("<root>", "expected a JSON object"));
    };
    if let Some(unknown) = obj.keys().find(|k| !FIELDS.contains(&k.as_str())) {
        return Err(HarnessError::config(unknown.as_str(), "unknown field"));
    }

    let algo = field::<String>(&obj, "algo")?
        .map(|s| s.parse::<AlgorithmTag>().map_err(|e| HarnessError::config("algo", e.to_string())))
        .transpose()?;
    let seed = field::<u64>(&obj, "seed")?;

    let sources = ["experiment", "matrices", "generate"]
        .into_iter()
        .filter(|k| obj.contains_key(*k))
        .collect::<Vec<_>>();
    if sources.len() != 1 {
        return Err(HarnessError::config(
            "experiment",
            "give exactly one of `experiment`, `matrices` or `generate`",
        ));
    }
    if obj.contains_key("period") && !obj.contains_key("matrices") {
        return Err(HarnessError::config("period", "only allowed together with `matrices`"));
    }

    let mut cfg = if let Some(name) = field::<String>(&obj, "experiment")? {
        let spec = find_experiment(&name).map_err(|e| HarnessError::config("experiment", e.to_string()))?;
        RunConfig::for_experiment(&spec, algo)
    } else {
        let (name, game, reference) = if let Some(mats) = field::<Vec<Vec<Vec<f64>>>>(&obj, "matrices")? {
            if let Some(period) = field::<usize>(&obj, "period")? {
                if period != mats.len() {
                    return Err(HarnessError::config(
                        "period",
                        format!("is {period} but {} matrices were given", mats.len()),
                    ));
                }
            }
            let mats = mats
                .iter()
                .map(|rows| PayoffMatrix::from_rows(rows))
                .collect::<pgames_core::Result<Vec<_>>>()
                .and_then(PeriodicGame::new)
                .map_err(|e| HarnessError::config("matrices", e.to_string()))?;
            ("inline".to_string(), mats, ReferencePolicy::SolveCommon)
        } else {
            let g: GenerateSpec = field(&obj, "generate")?.unwrap();
            let generated = generate_common_schedule(seed.unwrap_or(0), g.rows, g.cols, g.period)
                .map_err(|e| HarnessError::config("generate", e.to_string()))?;
            (
                "generated".to_string(),
                generated.game,
                ReferencePolicy::Explicit(generated.equilibrium),
            )
        };
        let algo = algo.unwrap_or(AlgorithmTag::ExtraMwu);
        let (eta, steps) = default_eta_steps(algo);
        RunConfig {
            name,
            game,
            reference,
            algo,
            eta,
            steps,
            record_every: default_record_every(steps),
            init: None,
            init_prev: None,
            seed: None,
            out_csv: None,
            out_svg: None,
            log_y: false,
        }
    };

    cfg.seed = seed;
    if let Some(eta) = field::<f64>(&obj, "eta")? {
        cfg.eta = eta;
    }
    if let Some(steps) = field::<u64>(&obj, "steps")? {
        cfg.steps = steps;
        cfg.record_every = default_record_every(steps);
    }
    if let Some(r) = field::<u64>(&obj, "record_every")? {
        cfg.record_every = r;
    }
    cfg.init = parse_init(&obj, "init")?;
    cfg.init_prev = parse_init(&obj, "init_prev")?;
    cfg.out_csv = field(&obj, "out_csv")?;
    cfg.out_svg = field(&obj, "out_svg")?;
    cfg.log_y = field(&obj, "log_y")?.unwrap_or(false);
    cfg.validate()?;
    Ok(cfg)
}

pub fn parse_config(path: impl AsRef<Path>) -> Result<RunConfig> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    parse_config_str(&text)
}
