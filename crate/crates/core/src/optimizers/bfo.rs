//! Bacterial foraging optimisation.
//!
//! Nested loops of elimination-dispersal events, reproduction steps and
//! chemotactic sweeps. In a sweep every bacterium tumbles one step of length
//! `C = step_scale·(upper − lower)` (per dimension) along a random unit
//! direction and keeps swimming along it while its cost, augmented by the
//! cell-to-cell swarming term, keeps falling. Reproduction replaces the least
//! healthy half with copies of the healthiest half; dispersal relocates each
//! bacterium with a fixed probability.
//!
//! Movement decisions use the augmented cost. Best-point tracking uses the
//! raw objective so results compare directly with the other methods.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{invalid, Method, MethodParams, OptResult, Profile, Tracker};
use crate::model::Bounds;
use crate::Result;

/// Attraction/repulsion coefficients of the swarming term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Swarming {
    pub attract_depth: f64,
    pub attract_width: f64,
    pub repel_height: f64,
    pub repel_width: f64,
}

impl Default for Swarming {
    fn default() -> Self {
        Self {
            attract_depth: 0.1,
            attract_width: 0.2,
            repel_height: 0.1,
            repel_width: 10.0,
        }
    }
}

impl Swarming {
    pub const OFF: Swarming = Swarming {
        attract_depth: 0.0,
        attract_width: 0.0,
        repel_height: 0.0,
        repel_width: 0.0,
    };
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BfoParams {
    /// Population size (even).
    pub bacteria: usize,
    /// Tumble-and-swim steps per chemotactic phase.
    pub chemotactic_steps: usize,
    /// Maximum swim length.
    pub swim_length: usize,
    /// Reproduction rounds per elimination-dispersal event.
    pub reproduction_steps: usize,
    /// Elimination-dispersal events.
    pub elimination_events: usize,
    /// Survivors per reproduction, always half the population.
    pub reproduction_count: usize,
    /// Probability that a bacterium is dispersed.
    pub dispersal_probability: f64,
    /// Tumble step as a fraction of each dimension's range.
    pub step_scale: f64,
    pub swarming: Swarming,
}

impl Default for BfoParams {
    fn default() -> Self {
        Self::desk()
    }
}

impl BfoParams {
    pub fn desk() -> Self {
        Self {
            bacteria: 20,
            chemotactic_steps: 30,
            swim_length: 4,
            reproduction_steps: 4,
            elimination_events: 2,
            reproduction_count: 10,
            dispersal_probability: 0.25,
            step_scale: 0.05,
            swarming: Swarming::default(),
        }
    }

    pub fn paper() -> Self {
        Self {
            bacteria: 120,
            chemotactic_steps: 120,
            swim_length: 30,
            reproduction_steps: 30,
            elimination_events: 5,
            reproduction_count: 60,
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
        let counts = [
            self.bacteria,
            self.chemotactic_steps,
            self.swim_length,
            self.reproduction_steps,
            self.elimination_events,
        ];
        if counts.contains(&0) {
            return Err(invalid("BFO parameters", "all loop counts must be >= 1"));
        }
        if !self.bacteria.is_multiple_of(2) {
            return Err(invalid("BFO parameters", format!("bacteria = {} must be even", self.bacteria)));
        }
        if self.reproduction_count != self.bacteria / 2 {
            return Err(invalid(
                "BFO parameters",
                format!("reproduction_count must equal bacteria/2 = {}", self.bacteria / 2),
            ));
        }
        if !(0.0..=1.0).contains(&self.dispersal_probability) {
            return Err(invalid("BFO parameters", "dispersal_probability must lie in [0, 1]"));
        }
        if !(self.step_scale > 0.0 && self.step_scale < 1.0) {
            return Err(invalid("BFO parameters", "step_scale must lie in (0, 1)"));
        }
        Ok(())
    }

    /// Upper bound on objective evaluations spent in chemotaxis.
    pub fn max_chemotaxis_evaluations(&self) -> usize {
        self.bacteria
            * self.chemotactic_steps
            * (1 + self.swim_length)
            * self.reproduction_steps
            * self.elimination_events
    }
}

/// Bacteria positions with their cached raw costs.
#[derive(Debug, Clone, PartialEq)]
pub struct Colony {
    pub positions: Vec<Vec<f64>>,
    pub costs: Vec<f64>,
}

impl Colony {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

/// Random unit vector: uniform components on [−1, 1], normalised.
pub fn tumble_direction<R: Rng + ?Sized>(rng: &mut R, p: usize) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..p).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm > 0.0 {
            v.iter_mut().for_each(|c| *c /= norm);
            return v;
        }
    }
}

/// Cell-to-cell attraction and repulsion felt at `theta` from `population`.
pub fn swarming_cost(theta: &[f64], population: &[Vec<f64>], sw: &Swarming) -> f64 {
    population
        .iter()
        .map(|other| {
            let d2: f64 = theta.iter().zip(other).map(|(a, b)| (a - b) * (a - b)).sum();
            -sw.attract_depth * (-sw.attract_width * d2).exp()
                + sw.repel_height * (-sw.repel_width * d2).exp()
        })
        .sum()
}

/// Outcome of one bacterium's tumble and swim.
#[derive(Debug, Clone, PartialEq)]
pub struct SwimOutcome {
    pub position: Vec<f64>,
    pub raw_cost: f64,
    /// Augmented cost at the final position.
    pub augmented_cost: f64,
    /// Swim steps accepted after the tumble.
    pub swims: usize,
}

/// Tumbles once along `direction` and swims while the augmented cost keeps
/// strictly improving, at most `max_swims` times. The tumble is always taken;
/// a swim step that does not improve is discarded.
#[allow(clippy::too_many_arguments)]
pub fn tumble_and_swim<O, S>(
    start: &[f64],
    start_augmented: f64,
    direction: &[f64],
    step: &[f64],
    max_swims: usize,
    bounds: &Bounds,
    objective: &mut O,
    swarm: S,
) -> SwimOutcome
where
    O: FnMut(&[f64]) -> f64,
    S: Fn(&[f64]) -> f64,
{
    let advance = |from: &[f64]| -> Vec<f64> {
        let mut next: Vec<f64> = from
            .iter()
            .zip(direction.iter().zip(step))
            .map(|(x, (d, c))| x + c * d)
            .collect();
        bounds.clamp(&mut next);
        next
    };

    let position = advance(start);
    let raw_cost = objective(&position);
    let augmented_cost = raw_cost + swarm(&position);
    let mut out = SwimOutcome {
        position,
        raw_cost,
        augmented_cost,
        swims: 0,
    };
    if !(augmented_cost < start_augmented) {
        return out;
    }
    for _ in 0..max_swims {
        let candidate = advance(&out.position);
        if candidate == out.position {
            break;
        }
        let raw = objective(&candidate);
        let aug = raw + swarm(&candidate);
        if aug < out.augmented_cost {
            out.position = candidate;
            out.raw_cost = raw;
            out.augmented_cost = aug;
            out.swims += 1;
        } else {
            break;
        }
    }
    out
}

/// One chemotactic step for every bacterium.
///
/// Directions are drawn for the whole colony first, in index order. The
/// swarming term is measured against the colony as it stood at the start of
/// the sweep. `health` accumulates each bacterium's augmented cost at the end
/// of its move.
pub fn chemotaxis_sweep<R, O>(
    colony: &mut Colony,
    health: &mut [f64],
    objective: &mut O,
    params: &BfoParams,
    bounds: &Bounds,
    rng: &mut R,
) where
    R: Rng + ?Sized,
    O: FnMut(&[f64]) -> f64,
{
    let p = bounds.dim();
    let step: Vec<f64> = (0..p).map(|d| params.step_scale * bounds.width(d)).collect();
    let directions: Vec<Vec<f64>> = (0..colony.len()).map(|_| tumble_direction(rng, p)).collect();
    let snapshot = colony.positions.clone();
    let swarm = |x: &[f64]| swarming_cost(x, &snapshot, &params.swarming);

    for (i, direction) in directions.iter().enumerate() {
        let start_aug = colony.costs[i] + swarm(&colony.positions[i]);
        let out = tumble_and_swim(
            &colony.positions[i],
            start_aug,
            direction,
            &step,
            params.swim_length,
            bounds,
            objective,
            swarm,
        );
        health[i] += out.augmented_cost;
        colony.positions[i] = out.position;
        colony.costs[i] = out.raw_cost;
    }
}

/// Keeps the healthiest half (lowest accumulated cost, ties by index) and
/// duplicates it: the result is `[best.., best..]`.
pub fn reproduce(colony: &Colony, health: &[f64]) -> Colony {
    let mut order: Vec<usize> = (0..colony.len()).collect();
    order.sort_by(|&a, &b| health[a].total_cmp(&health[b]).then(a.cmp(&b)));
    let keep = &order[..colony.len() / 2];
    let mut positions = Vec::with_capacity(colony.len());
    let mut costs = Vec::with_capacity(colony.len());
    for _ in 0..2 {
        for &i in keep {
            positions.push(colony.positions[i].clone());
            costs.push(colony.costs[i]);
        }
    }
    // odd sizes keep the single best one more time
    if positions.len() < colony.len() {
        positions.push(colony.positions[order[0]].clone());
        costs.push(colony.costs[order[0]]);
    }
    Colony { positions, costs }
}

/// Relocates each bacterium uniformly within `bounds` with probability
/// `Ped`. Returns the relocated indices; their cached costs are set to NaN
/// until re-evaluated.
pub fn eliminate_disperse<R: Rng + ?Sized>(
    colony: &mut Colony,
    params: &BfoParams,
    bounds: &Bounds,
    rng: &mut R,
) -> Vec<usize> {
    let mut moved = Vec::new();
    for i in 0..colony.len() {
        let u: f64 = rng.random();
        if u < params.dispersal_probability {
            colony.positions[i] = uniform_point(rng, bounds);
            colony.costs[i] = f64::NAN;
            moved.push(i);
        }
    }
    moved
}

pub(crate) fn uniform_point<R: Rng + ?Sized>(rng: &mut R, bounds: &Bounds) -> Vec<f64> {
    bounds
        .lower
        .iter()
        .zip(&bounds.upper)
        .map(|(lo, hi)| rng.random_range(*lo..=*hi))
        .collect()
}

pub fn bfo_minimize<F>(objective: &F, bounds: &Bounds, params: &BfoParams, seed: u64) -> Result<OptResult>
where
    F: Fn(&[f64]) -> f64,
{
    params.check()?;
    bounds.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tracker = Tracker::new(objective, bounds, None);

    let positions: Vec<Vec<f64>> = (0..params.bacteria).map(|_| uniform_point(&mut rng, bounds)).collect();
    let costs = positions.iter().map(|x| tracker.eval(x)).collect();
    let mut colony = Colony { positions, costs };

    let mut history =
        Vec::with_capacity(params.elimination_events * params.reproduction_steps * params.chemotactic_steps);
    for _ in 0..params.elimination_events {
        for _ in 0..params.reproduction_steps {
            let mut health = vec![0.0; colony.len()];
            for _ in 0..params.chemotactic_steps {
                let mut eval = |x: &[f64]| tracker.eval(x);
                chemotaxis_sweep(&mut colony, &mut health, &mut eval, params, bounds, &mut rng);
                history.push(tracker.best_cost);
            }
            colony = reproduce(&colony, &health);
        }
        for i in eliminate_disperse(&mut colony, params, bounds, &mut rng) {
            colony.costs[i] = tracker.eval(&colony.positions[i]);
        }
    }
    if let Some(last) = history.last_mut() {
        *last = tracker.best_cost;
    }

    Ok(tracker.finish(Method::Bfo, MethodParams::Bfo(params.clone()), seed, history))
}
