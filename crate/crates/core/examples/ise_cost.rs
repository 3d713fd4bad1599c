//! Evaluates the ISE cost at a few points of the decision box, including
//! its corners, to show the shape of the objective and the divergence
//! penalty.

use lfc_tune::model::{nominal_system, Bounds, DecisionVector};
use lfc_tune::objective::{CostFunction, Scenario};
use lfc_tune::optimizers::clamped_origin;

fn main() -> lfc_tune::Result<()> {
    let cost = CostFunction::new(Scenario::step_load(nominal_system()))?;
    let bounds = Bounds::controller_default(3);
    let points = [
        ("reference", DecisionVector::reference().to_vec()),
        ("droop only, R 8", DecisionVector::droop_only(3, 0.425, 8.0).to_vec()),
        ("clamped origin", clamped_origin(&bounds)),
        ("lower corner", bounds.corner_lower()),
        ("upper corner", bounds.corner_upper()),
    ];
    for (name, x) in points {
        println!("{name:<16} {:>14.6}", cost.cost(&x));
    }
    Ok(())
}
