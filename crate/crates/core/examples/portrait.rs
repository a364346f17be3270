//! A coarse phase portrait: where does each seed of a grid end up?

use unimodular_ricci::cli::canonical_nearest;
use unimodular_ricci::dynamics::regions::limit_config;
use unimodular_ricci::flow::{integrate, FlowFormulation, InitialState, Termination};
use unimodular_ricci::Result;

pub fn run_example() -> Result<Vec<((f64, f64), String)>> {
    let cfg = limit_config();
    let n = 5;
    let mut out = Vec::new();
    for i in 0..n {
        for k in 0..n {
            let m2 = -0.2 + 1.4 * i as f64 / (n - 1) as f64;
            let m3 = -2.2 + 3.4 * k as f64 / (n - 1) as f64;
            let tr = integrate(FlowFormulation::MFlowAutonomous, &InitialState::Moduli { m2, m3 }, &cfg)?;
            let end = &tr.last().state;
            let fate = match (tr.termination, canonical_nearest(end[0], end[1])) {
                (Termination::BlowUpCeiling, _) => "escapes to p1".to_string(),
                (_, Some((p, d))) if d < 1e-3 => format!("-> {p}"),
                (t, _) => format!("{t:?} at {end:?}"),
            };
            out.push(((m2, m3), fate));
        }
    }
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    for ((m2, m3), fate) in run_example()? {
        println!("({m2:+.2}, {m3:+.2}) {fate}");
    }
    Ok(())
}
