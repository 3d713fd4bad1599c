//! Runs the three optimizers on the 12-dimensional sphere with their desk
//! budgets over seeds 0 to 4.

use lfc_tune::model::Bounds;
use lfc_tune::optimizers::{bfo_minimize, gd_minimize, pso_minimize, BfoParams, GdParams, PsoParams};

fn sphere(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

fn main() -> lfc_tune::Result<()> {
    let bounds = Bounds::uniform(12, -5.0, 5.0);
    let mut bfo = Vec::new();
    let mut pso = Vec::new();
    for seed in 0..5 {
        let b = bfo_minimize(&sphere, &bounds, &BfoParams::desk(), seed)?;
        let p = pso_minimize(&sphere, &bounds, &PsoParams::desk(), seed)?;
        println!("seed {seed}: BFO {:.3e} ({} evals)  PSO {:.3e} ({} evals)", b.best_cost, b.evaluations, p.best_cost, p.evaluations);
        bfo.push(b.best_cost);
        pso.push(p.best_cost);
    }
    let gd = gd_minimize(&sphere, &bounds, &GdParams::desk(), &bounds.corner_upper())?;
    println!("median BFO {:.3e}, median PSO {:.3e}", median(bfo), median(pso));
    println!("GD from the upper corner: {:.3e} ({} evals)", gd.best_cost, gd.evaluations);
    Ok(())
}
