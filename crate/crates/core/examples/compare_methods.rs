//! Tunes with BFO, PSO and GD under a shared evaluation budget on a
//! shortened horizon, then tabulates the tuned responses.

use lfc_tune::metrics::{comparison_report, LabeledRun, SettlingBand};
use lfc_tune::model::{nominal_system, Bounds, DecisionVector};
use lfc_tune::objective::{CostFunction, Scenario};
use lfc_tune::optimizers::{clamped_origin, minimize, BfoParams, GdParams, MethodParams, PsoParams};
use lfc_tune::simulator::simulate;

fn main() -> lfc_tune::Result<()> {
    let mut scenario = Scenario::step_load(nominal_system());
    scenario.options.horizon = 60.0;
    let cost = CostFunction::new(scenario.clone())?;
    let objective = |x: &[f64]| cost.cost(x);
    let bounds = Bounds::controller_default(3);

    let bfo = BfoParams {
        bacteria: 10,
        reproduction_count: 5,
        chemotactic_steps: 10,
        ..BfoParams::desk()
    };
    let first = minimize(&objective, &bounds, &MethodParams::Bfo(bfo), 0, None)?;
    let budget = Some(first.evaluations);
    let pso = MethodParams::Pso(PsoParams {
        iterations: usize::MAX,
        max_evaluations: budget,
        ..PsoParams::desk()
    });
    let gd = MethodParams::Gd(GdParams {
        iterations: usize::MAX,
        max_evaluations: budget,
        ..GdParams::desk()
    });
    let mut results = vec![first];
    results.push(minimize(&objective, &bounds, &pso, 0, None)?);
    results.push(minimize(&objective, &bounds, &gd, 0, Some(&clamped_origin(&bounds)))?);

    let mut runs = Vec::new();
    for r in &results {
        println!("{}: cost {:.6} after {} evaluations", r.method.label(), r.best_cost, r.evaluations);
        let d = DecisionVector::from_slice(&r.best)?;
        runs.push(LabeledRun {
            label: r.method.label().into(),
            scenario: scenario.clone(),
            traces: simulate(&scenario.config, &d, &scenario.disturbance, &scenario.options)?,
        });
    }
    println!();
    print!("{}", comparison_report(&runs, SettlingBand::default())?.render_text());
    Ok(())
}
