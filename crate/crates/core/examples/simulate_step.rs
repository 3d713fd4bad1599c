//! Simulates the nominal network under a 1 % load step in area 1 and prints
//! the response metrics of each area.
//!
//! `cargo run --release --example simulate_step -- [load_pu]`

use lfc_tune::metrics::{area_label, area_metrics, SettlingBand};
use lfc_tune::model::{nominal_system, DecisionVector};
use lfc_tune::simulator::{simulate, Disturbance, SimOptions};

fn main() -> lfc_tune::Result<()> {
    let load: f64 = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("load_pu must be a number"))
        .unwrap_or(0.01);

    let config = nominal_system();
    let decision = DecisionVector::reference();
    let traces = simulate(&config, &decision, &Disturbance::step(0, load), &SimOptions::default())?;

    println!("{} samples, diverged: {:?}", traces.len(), traces.diverged_at);
    println!("{:<9} {:>12} {:>12} {:>10} {:>12}", "", "undershoot", "overshoot", "settling", "final");
    for (i, m) in area_metrics(&traces, SettlingBand::default())?.iter().enumerate() {
        println!(
            "{:<9} {:>12.6} {:>12.6} {:>10} {:>12.3e}",
            area_label(i),
            m.peak_undershoot,
            m.peak_overshoot,
            m.settling_time.to_string(),
            m.steady_state_value
        );
    }
    Ok(())
}
