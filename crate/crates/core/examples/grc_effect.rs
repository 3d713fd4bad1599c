//! Shows what the generation rate constraint on the thermal unit does to the
//! area 1 response, for both limiter placements.

use lfc_tune::metrics::peak_undershoot;
use lfc_tune::model::{nominal_system, DecisionVector, GrcPlacement, PrimeMover};
use lfc_tune::objective::{evaluate, Scenario};

fn main() -> lfc_tune::Result<()> {
    let decision = DecisionVector::reference();
    let cases = [
        ("off", None),
        ("before reheat", Some(GrcPlacement::BeforeReheat)),
        ("after reheat", Some(GrcPlacement::AfterReheat)),
    ];
    for (name, placement) in cases {
        let mut scenario = Scenario::step_load(nominal_system());
        for area in &mut scenario.config.areas {
            if let PrimeMover::Thermal(t) = &mut area.prime_mover {
                t.grc_enabled = placement.is_some();
                if let Some(p) = placement {
                    t.grc_placement = p;
                }
            }
        }
        let traces = lfc_tune::simulator::simulate(
            &scenario.config,
            &decision,
            &scenario.disturbance,
            &scenario.options,
        )?;
        println!(
            "GRC {name:<14} ISE {:.5}  undershoot {:.5} Hz  diverged {:?}",
            evaluate(&decision, &scenario)?,
            peak_undershoot(&traces.delta_f[0])?,
            traces.diverged_at
        );
    }
    Ok(())
}
