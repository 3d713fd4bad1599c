//! Projected gradient descent with central finite differences and a
//! backtracking step.

use serde::{Deserialize, Serialize};

use super::{invalid, Method, MethodParams, OptResult, Profile, Tracker};
use crate::model::Bounds;
use crate::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GdParams {
    pub iterations: usize,
    /// Finite-difference step as a fraction of each dimension's range.
    pub fd_step: f64,
    pub learning_rate: f64,
    /// Factor applied to the rate after a rejected step.
    pub backtrack: f64,
    /// Stops once the rate falls below this.
    pub min_rate: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_evaluations: Option<usize>,
}

impl Default for GdParams {
    fn default() -> Self {
        Self::desk()
    }
}

impl GdParams {
    pub fn desk() -> Self {
        Self {
            iterations: 500,
            fd_step: 1e-3,
            learning_rate: 0.01,
            backtrack: 0.5,
            min_rate: 1e-6,
            max_evaluations: None,
        }
    }

    pub fn paper() -> Self {
        Self {
            iterations: 5000,
            ..Self::desk()
        }
    }

    pub fn for_profile(profile: Profile) -> Self {
        match profile {
            Profile::Desk => Self::desk(),
            Profile::Paper => Self::paper(),
        }
    }

    pub fn check(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(invalid("GD parameters", "iterations must be >= 1"));
        }
        if !(self.fd_step > 0.0 && self.fd_step < 0.5) {
            return Err(invalid("GD parameters", "fd_step must lie in (0, 0.5)"));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(invalid("GD parameters", "learning_rate must be > 0"));
        }
        if !(self.backtrack > 0.0 && self.backtrack < 1.0) {
            return Err(invalid("GD parameters", "backtrack must lie in (0, 1)"));
        }
        if !(self.min_rate > 0.0 && self.min_rate <= self.learning_rate) {
            return Err(invalid("GD parameters", "min_rate must lie in (0, learning_rate]"));
        }
        if self.max_evaluations == Some(0) {
            return Err(invalid("GD parameters", "max_evaluations must be >= 1"));
        }
        Ok(())
    }
}

/// Central-difference gradient at `x`, one-sided where a probe would leave
/// the box. Returns `None` if the budget ran out part way.
fn gradient<F>(tracker: &mut Tracker<'_, F>, bounds: &Bounds, x: &[f64], fd_step: f64) -> Option<Vec<f64>>
where
    F: Fn(&[f64]) -> f64,
{
    let mut g = vec![0.0; x.len()];
    let mut probe = x.to_vec();
    for d in 0..x.len() {
        if tracker.remaining() < 2 {
            return None;
        }
        let h = fd_step * bounds.width(d);
        let hi = (x[d] + h).min(bounds.upper[d]);
        let lo = (x[d] - h).max(bounds.lower[d]);
        probe[d] = hi;
        let f_hi = tracker.eval(&probe);
        probe[d] = lo;
        let f_lo = tracker.eval(&probe);
        probe[d] = x[d];
        g[d] = (f_hi - f_lo) / (hi - lo);
        if !g[d].is_finite() {
            g[d] = 0.0;
        }
    }
    Some(g)
}

/// Minimises from `start` (clamped into `bounds`).
pub fn gd_minimize<F>(objective: &F, bounds: &Bounds, params: &GdParams, start: &[f64]) -> Result<OptResult>
where
    F: Fn(&[f64]) -> f64,
{
    params.check()?;
    bounds.check()?;
    if start.len() != bounds.dim() {
        return Err(crate::Error::DecisionShape {
            expected: bounds.dim(),
            got: start.len(),
        });
    }
    let mut tracker = Tracker::new(objective, bounds, params.max_evaluations);
    let mut x = start.to_vec();
    bounds.clamp(&mut x);
    let mut fx = tracker.eval(&x);
    let mut rate = params.learning_rate;
    let mut history = Vec::new();

    'outer: for _ in 0..params.iterations {
        let Some(g) = gradient(&mut tracker, bounds, &x, params.fd_step) else {
            break;
        };
        loop {
            if rate < params.min_rate || tracker.remaining() == 0 {
                history.push(tracker.best_cost);
                break 'outer;
            }
            let mut candidate: Vec<f64> = x.iter().zip(&g).map(|(xi, gi)| xi - rate * gi).collect();
            bounds.clamp(&mut candidate);
            if candidate == x {
                history.push(tracker.best_cost);
                break 'outer;
            }
            let fc = tracker.eval(&candidate);
            if fc < fx {
                x = candidate;
                fx = fc;
                break;
            }
            rate *= params.backtrack;
        }
        history.push(tracker.best_cost);
    }

    Ok(tracker.finish(Method::Gd, MethodParams::Gd(params.clone()), 0, history))
}
