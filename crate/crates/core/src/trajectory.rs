//! Recorded runs of a learning dynamic.

use crate::dynamics::AlgorithmTag;
use crate::error::{Error, Result};
use crate::state::{kl_divergence, JointState};

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryStep {
    pub t: u64,
    pub phase: usize,
    pub state: JointState,
    /// KL from the reference to `state`; `NaN` when the run has no reference.
    pub kl_to_ref: f64,
    pub min_component: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub steps: Vec<TrajectoryStep>,
    pub reference: Option<JointState>,
    pub eta: f64,
    pub algo: AlgorithmTag,
    pub period: usize,
}

impl Trajectory {
    pub fn new(
        algo: AlgorithmTag,
        eta: f64,
        period: usize,
        reference: Option<JointState>,
    ) -> Self {
        Self {
            steps: Vec::new(),
            reference,
            eta,
            algo,
            period,
        }
    }

    /// Appends a state at time `t`, computing the KL and minimum component.
    pub fn record(&mut self, t: u64, state: JointState) -> Result<()> {
        if let Some(last) = self.steps.last() {
            if t <= last.t {
                return Err(Error::invalid(format!(
                    "trajectory times must increase: {t} after {}",
                    last.t
                )));
            }
        }
        let kl_to_ref = match &self.reference {
            Some(r) => kl_divergence(r, &state)?,
            None => f64::NAN,
        };
        let min_component = state.min_component();
        self.steps.push(TrajectoryStep {
            t,
            phase: (t % self.period as u64) as usize,
            state,
            kl_to_ref,
            min_component,
        });
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn first(&self) -> Option<&TrajectoryStep> {
        self.steps.first()
    }

    pub fn last(&self) -> Option<&TrajectoryStep> {
        self.steps.last()
    }

    pub fn dims(&self) -> Option<(usize, usize)> {
        self.first().map(|s| s.state.dims())
    }

    /// True when every recorded time is exactly one after the previous.
    pub fn is_consecutive(&self) -> bool {
        self.steps.windows(2).all(|w| w[1].t == w[0].t + 1)
    }

    pub fn kl_series(&self) -> Vec<(u64, f64)> {
        self.steps.iter().map(|s| (s.t, s.kl_to_ref)).collect()
    }
}
