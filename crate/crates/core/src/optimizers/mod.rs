//! Box-bounded minimisers: bacterial foraging, particle swarm and
//! finite-difference gradient descent.
//!
//! All three draw random numbers from a seeded ChaCha stream at fixed points
//! and evaluate the objective in a fixed order, so identical inputs produce
//! bit-identical results.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::model::Bounds;

pub mod bfo;
pub mod gd;
pub mod pso;

pub use bfo::{bfo_minimize, BfoParams, Swarming};
pub use gd::{gd_minimize, GdParams};
pub use pso::{pso_minimize, PsoParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Bfo,
    Pso,
    Gd,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Bfo, Method::Pso, Method::Gd];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Bfo => "bfo",
            Method::Pso => "pso",
            Method::Gd => "gd",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Method::Bfo => "BFO",
            Method::Pso => "PSO",
            Method::Gd => "GD",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "bfo" => Ok(Method::Bfo),
            "pso" => Ok(Method::Pso),
            "gd" => Ok(Method::Gd),
            other => Err(format!("unknown method `{other}` (expected bfo, pso or gd)")),
        }
    }
}

/// Budget profile shared by the CLI and the benchmarks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    /// Reduced budgets that finish in minutes.
    Desk,
    /// The full published BFO budget (about 2.6 million evaluations).
    Paper,
}

impl FromStr for Profile {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "desk" => Ok(Profile::Desk),
            "paper" => Ok(Profile::Paper),
            other => Err(format!("unknown budget profile `{other}` (expected desk or paper)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MethodParams {
    Bfo(BfoParams),
    Pso(PsoParams),
    Gd(GdParams),
}

impl MethodParams {
    pub fn for_profile(method: Method, profile: Profile) -> Self {
        match method {
            Method::Bfo => MethodParams::Bfo(BfoParams::for_profile(profile)),
            Method::Pso => MethodParams::Pso(PsoParams::for_profile(profile)),
            Method::Gd => MethodParams::Gd(GdParams::for_profile(profile)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptResult {
    pub method: Method,
    pub params: MethodParams,
    pub seed: u64,
    pub best: Vec<f64>,
    pub best_cost: f64,
    /// Best cost found so far, one entry per outer iteration.
    pub history: Vec<f64>,
    pub evaluations: usize,
}

/// Runs `method` with its parameters. Gradient descent ignores the seed and
/// starts from `start` (or the clamped origin).
pub fn minimize<F>(
    objective: &F,
    bounds: &Bounds,
    params: &MethodParams,
    seed: u64,
    start: Option<&[f64]>,
) -> crate::Result<OptResult>
where
    F: Fn(&[f64]) -> f64,
{
    match params {
        MethodParams::Bfo(p) => bfo_minimize(objective, bounds, p, seed),
        MethodParams::Pso(p) => pso_minimize(objective, bounds, p, seed),
        MethodParams::Gd(p) => {
            let origin = clamped_origin(bounds);
            let mut r = gd_minimize(objective, bounds, p, start.unwrap_or(&origin))?;
            r.seed = seed;
            Ok(r)
        }
    }
}

/// The all-zero start clamped into `bounds`.
pub fn clamped_origin(bounds: &Bounds) -> Vec<f64> {
    let mut x = vec![0.0; bounds.dim()];
    bounds.clamp(&mut x);
    x
}

/// Counts evaluations, enforces an optional budget and keeps the best point.
pub(crate) struct Tracker<'a, F> {
    objective: &'a F,
    bounds: &'a Bounds,
    budget: Option<usize>,
    pub evaluations: usize,
    pub best: Vec<f64>,
    pub best_cost: f64,
}

impl<'a, F> Tracker<'a, F>
where
    F: Fn(&[f64]) -> f64,
{
    pub fn new(objective: &'a F, bounds: &'a Bounds, budget: Option<usize>) -> Self {
        Self {
            objective,
            bounds,
            budget,
            evaluations: 0,
            best: Vec::new(),
            best_cost: f64::INFINITY,
        }
    }

    pub fn remaining(&self) -> usize {
        self.budget
            .map_or(usize::MAX, |b| b.saturating_sub(self.evaluations))
    }

    /// NaN costs are treated as +inf.
    pub fn eval(&mut self, x: &[f64]) -> f64 {
        debug_assert!(self.bounds.contains(x), "candidate outside bounds: {x:?}");
        let mut c = (self.objective)(x);
        if c.is_nan() {
            c = f64::INFINITY;
        }
        self.evaluations += 1;
        if c < self.best_cost || self.best.is_empty() {
            self.best_cost = c;
            self.best = x.to_vec();
        }
        c
    }

    pub fn finish(self, method: Method, params: MethodParams, seed: u64, history: Vec<f64>) -> OptResult {
        OptResult {
            method,
            params,
            seed,
            best: self.best,
            best_cost: self.best_cost,
            history,
            evaluations: self.evaluations,
        }
    }
}

pub(crate) fn invalid(what: &'static str, reason: impl Into<String>) -> crate::Error {
    crate::Error::InvalidParams {
        what,
        reason: reason.into(),
    }
}

#[cfg(test)]
pub(crate) mod testing {
    pub fn sphere(x: &[f64]) -> f64 {
        x.iter().map(|v| v * v).sum()
    }
}
