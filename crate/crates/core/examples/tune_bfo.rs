//! Tunes the twelve controller parameters with bacterial foraging on a
//! shortened horizon and prints the convergence history.
//!
//! `cargo run --release --example tune_bfo -- [seed]`

use lfc_tune::model::{nominal_system, Bounds, DecisionVector};
use lfc_tune::objective::{CostFunction, Scenario};
use lfc_tune::optimizers::{bfo_minimize, BfoParams};

fn main() -> lfc_tune::Result<()> {
    let seed = std::env::args().nth(1).map_or(0, |s| s.parse().expect("seed must be an integer"));
    let mut scenario = Scenario::step_load(nominal_system());
    scenario.options.horizon = 60.0;
    let cost = CostFunction::new(scenario)?;
    let objective = |x: &[f64]| cost.cost(x);

    let result = bfo_minimize(&objective, &Bounds::controller_default(3), &BfoParams::desk(), seed)?;
    for (k, c) in result.history.iter().enumerate() {
        println!("sweep {:>3}  best {:.6}", k + 1, c);
    }
    let d = DecisionVector::from_slice(&result.best)?;
    println!("evaluations {}", result.evaluations);
    println!("kp {:.4?}\nki {:.4?}\nb  {:.4?}\nr  {:.4?}", d.kp, d.ki, d.b, d.r);
    Ok(())
}
