//! Global-best particle swarm with synchronous updates.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::bfo::uniform_point;
use super::{invalid, Method, MethodParams, OptResult, Profile, Tracker};
use crate::model::Bounds;
use crate::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsoParams {
    pub swarm_size: usize,
    pub iterations: usize,
    pub inertia: f64,
    pub cognitive: f64,
    pub social: f64,
    /// Velocity limit as a fraction of each dimension's range.
    pub velocity_clamp: f64,
    /// Stops once this many objective evaluations have been spent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_evaluations: Option<usize>,
}

impl Default for PsoParams {
    fn default() -> Self {
        Self::desk()
    }
}

impl PsoParams {
    pub fn desk() -> Self {
        Self {
            swarm_size: 30,
            iterations: 200,
            inertia: 0.729,
            cognitive: 1.49445,
            social: 1.49445,
            velocity_clamp: 0.5,
            max_evaluations: None,
        }
    }

    pub fn paper() -> Self {
        Self {
            swarm_size: 120,
            iterations: 1000,
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
        if self.swarm_size == 0 || self.iterations == 0 {
            return Err(invalid("PSO parameters", "swarm_size and iterations must be >= 1"));
        }
        let coeffs = [self.inertia, self.cognitive, self.social];
        if coeffs.iter().any(|c| !c.is_finite() || *c < 0.0) {
            return Err(invalid("PSO parameters", "inertia and acceleration coefficients must be finite and >= 0"));
        }
        if !(self.velocity_clamp > 0.0 && self.velocity_clamp.is_finite()) {
            return Err(invalid("PSO parameters", "velocity_clamp must be > 0"));
        }
        if self.max_evaluations == Some(0) {
            return Err(invalid("PSO parameters", "max_evaluations must be >= 1"));
        }
        Ok(())
    }
}

pub fn pso_minimize<F>(objective: &F, bounds: &Bounds, params: &PsoParams, seed: u64) -> Result<OptResult>
where
    F: Fn(&[f64]) -> f64,
{
    params.check()?;
    bounds.check()?;
    let p = bounds.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tracker = Tracker::new(objective, bounds, params.max_evaluations);
    let vmax: Vec<f64> = (0..p).map(|d| params.velocity_clamp * bounds.width(d)).collect();

    let mut positions = Vec::with_capacity(params.swarm_size);
    let mut velocities = Vec::with_capacity(params.swarm_size);
    for _ in 0..params.swarm_size {
        positions.push(uniform_point(&mut rng, bounds));
        velocities.push(
            vmax.iter()
                .map(|&v| rng.random_range(-v..=v))
                .collect::<Vec<f64>>(),
        );
    }

    let mut pbest = positions.clone();
    let mut pbest_cost = Vec::with_capacity(params.swarm_size);
    for x in &positions {
        if tracker.remaining() == 0 {
            break;
        }
        pbest_cost.push(tracker.eval(x));
    }
    pbest_cost.resize(params.swarm_size, f64::INFINITY);

    let mut history = Vec::new();
    'outer: for _ in 0..params.iterations {
        if tracker.remaining() == 0 {
            break;
        }
        let gbest = tracker.best.clone();
        for i in 0..params.swarm_size {
            for d in 0..p {
                let r1: f64 = rng.random();
                let r2: f64 = rng.random();
                let v = params.inertia * velocities[i][d]
                    + params.cognitive * r1 * (pbest[i][d] - positions[i][d])
                    + params.social * r2 * (gbest[d] - positions[i][d]);
                velocities[i][d] = v.clamp(-vmax[d], vmax[d]);
                positions[i][d] += velocities[i][d];
            }
            bounds.clamp(&mut positions[i]);
        }
        for i in 0..params.swarm_size {
            if tracker.remaining() == 0 {
                history.push(tracker.best_cost);
                break 'outer;
            }
            let c = tracker.eval(&positions[i]);
            if c < pbest_cost[i] {
                pbest_cost[i] = c;
                pbest[i].clone_from(&positions[i]);
            }
        }
        history.push(tracker.best_cost);
    }

    Ok(tracker.finish(Method::Pso, MethodParams::Pso(params.clone()), seed, history))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimizers::testing::sphere;

    #[test]
    fn converges_on_sphere() {
        let bounds = Bounds::uniform(12, -5.0, 5.0);
        let r = pso_minimize(&sphere, &bounds, &PsoParams::desk(), 1).unwrap();
        assert!(r.best_cost < 1e-2, "{}", r.best_cost);
        assert!(bounds.contains(&r.best));
        assert_eq!(r.history.len(), 200);
        assert!(r.history.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(r.evaluations, 30 * 201);
    }

    #[test]
    fn respects_evaluation_budget() {
        let bounds = Bounds::uniform(3, -5.0, 5.0);
        let params = PsoParams {
            max_evaluations: Some(95),
            ..PsoParams::desk()
        };
        let r = pso_minimize(&sphere, &bounds, &params, 4).unwrap();
        assert_eq!(r.evaluations, 95);
        assert_eq!(sphere(&r.best), r.best_cost);
    }

    #[test]
    fn budget_alone_bounds_an_unlimited_run() {
        let bounds = Bounds::uniform(3, -5.0, 5.0);
        let params = PsoParams {
            iterations: usize::MAX,
            max_evaluations: Some(200),
            ..PsoParams::desk()
        };
        assert_eq!(pso_minimize(&sphere, &bounds, &params, 1).unwrap().evaluations, 200);
    }

    #[test]
    fn deterministic_per_seed() {
        let bounds = Bounds::uniform(4, -1.0, 2.0);
        let params = PsoParams {
            iterations: 20,
            ..PsoParams::desk()
        };
        let a = pso_minimize(&sphere, &bounds, &params, 9).unwrap();
        let b = pso_minimize(&sphere, &bounds, &params, 9).unwrap();
        let c = pso_minimize(&sphere, &bounds, &params, 10).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.best, c.best);
    }

    #[test]
    fn optimum_on_the_boundary() {
        let bounds = Bounds::uniform(2, 1.0, 3.0);
        let r = pso_minimize(&sphere, &bounds, &PsoParams::desk(), 2).unwrap();
        assert!((r.best_cost - 2.0).abs() < 1e-9, "{}", r.best_cost);
    }

    #[test]
    fn rejects_bad_params() {
        let zero = PsoParams {
            swarm_size: 0,
            ..PsoParams::desk()
        };
        assert!(zero.check().is_err());
        let neg = PsoParams {
            inertia: -0.1,
            ..PsoParams::desk()
        };
        assert!(neg.check().is_err());
    }
}
