//! Prints the nominal three-area configuration as TOML, along with the
//! derived quantities the simulator uses.

use lfc_tune::cli::RunConfig;
use lfc_tune::model::{capacity_ratio, validate};
use lfc_tune::simulator::state_dimension;

fn main() {
    let cfg = RunConfig::nominal();
    let system = &cfg.system;
    validate(system).expect("the nominal system is valid");

    for tie in &system.ties {
        let a = capacity_ratio(system, tie.area_a, tie.area_b).expect("tie areas exist");
        println!(
            "# tie {}-{}: T = {}, capacity ratio {:.6}",
            system.areas[tie.area_a].name, system.areas[tie.area_b].name, tie.synchronizing_coefficient, a
        );
    }
    println!("# states: {}, decision dimension: {}", state_dimension(system), system.decision_dimension());
    println!();
    print!("{}", cfg.to_toml());
}
