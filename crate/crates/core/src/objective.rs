//! Integral-square-error performance index and the bounded cost function the
//! optimizers minimise.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{ensure_valid, DecisionVector, SystemConfig};
use crate::simulator::{simulate_ise, Disturbance, IseRun, SimOptions, TraceSet};

/// Cost assigned to diverging runs, before the time-to-divergence term.
pub const DEFAULT_PENALTY: f64 = 1e6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub config: SystemConfig,
    pub disturbance: Disturbance,
    pub options: SimOptions,
    pub penalty: f64,
}

impl Scenario {
    /// 1 % step load in area 1 of `config` with default integration settings.
    pub fn step_load(config: SystemConfig) -> Self {
        Self {
            config,
            disturbance: Disturbance::step(0, 0.01),
            options: SimOptions::default(),
            penalty: DEFAULT_PENALTY,
        }
    }
}

/// Trapezoidal integral of `Σ Δf_i² + Σ ΔP_tie,ij²` over the recorded samples.
pub fn ise(traces: &TraceSet) -> f64 {
    let squared = |k: usize| -> f64 {
        traces
            .delta_f
            .iter()
            .chain(&traces.delta_p_tie)
            .map(|s| s[k] * s[k])
            .sum()
    };
    let mut total = 0.0;
    let mut prev = match traces.times.first() {
        Some(_) => squared(0),
        None => return 0.0,
    };
    for k in 1..traces.len() {
        let cur = squared(k);
        total += 0.5 * (prev + cur) * (traces.times[k] - traces.times[k - 1]);
        prev = cur;
    }
    total
}

/// Simulates `decision` under `scenario` and scores it.
///
/// Diverging runs cost `penalty + (horizon − t_diverge)`, so earlier blow-ups
/// rank worse than later ones.
pub fn evaluate(decision: &DecisionVector, scenario: &Scenario) -> Result<f64> {
    ensure_valid(&scenario.config)?;
    let run = simulate_ise(&scenario.config, decision, &scenario.disturbance, &scenario.options)?;
    Ok(score(run, scenario))
}

/// Scores a recorded trace the same way [`evaluate`] scores a run.
pub fn score_traces(traces: &TraceSet, scenario: &Scenario) -> f64 {
    score(
        IseRun {
            ise: ise(traces),
            diverged_at: traces.diverged_at,
        },
        scenario,
    )
}

fn score(run: IseRun, scenario: &Scenario) -> f64 {
    match run.diverged_at {
        Some(t) => scenario.penalty + (scenario.options.horizon - t).max(0.0),
        None => run.ise,
    }
}

/// A validated scenario viewed as a function of the flat decision layout.
#[derive(Debug, Clone)]
pub struct CostFunction {
    scenario: Scenario,
}

impl CostFunction {
    pub fn new(scenario: Scenario) -> Result<Self> {
        ensure_valid(&scenario.config)?;
        scenario.options.check()?;
        Ok(Self { scenario })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    /// Cost of a flat `[kp.., ki.., b.., r..]` point. Shape or parameter errors
    /// score as the penalty.
    pub fn cost(&self, x: &[f64]) -> f64 {
        let decision = match DecisionVector::from_slice(x) {
            Ok(d) => d,
            Err(_) => return self.scenario.penalty + self.scenario.options.horizon,
        };
        match simulate_ise(
            &self.scenario.config,
            &decision,
            &self.scenario.disturbance,
            &self.scenario.options,
        ) {
            Ok(run) => score(run, &self.scenario),
            Err(_) => self.scenario.penalty + self.scenario.options.horizon,
        }
    }
}
