//! Labels a point with its invariant piece and checks the predicted limits
//! by integrating both ways.

use unimodular_ricci::dynamics::regions::limit_config;
use unimodular_ricci::dynamics::{trace_separatrix, verify_limits, LimitVerdict};
use unimodular_ricci::moduli::ModuliPoint;
use unimodular_ricci::Result;

pub fn run_example() -> Result<Vec<LimitVerdict>> {
    let sep = trace_separatrix(256, 1e-10)?;
    let cfg = limit_config();
    [(0.5, 0.2), (0.5, -0.2), (0.5, -2.0), (0.5, 0.0), (0.0, -0.5), (0.5, 0.5)]
        .into_iter()
        .map(|(m2, m3)| verify_limits(&ModuliPoint::new(m2, m3), &sep, &cfg, 1e-4))
        .collect()
}

#[allow(dead_code)]
fn main() -> Result<()> {
    for v in run_example()? {
        println!(
            "{} {}: {} -> {} observed {:?} -> {:?} ({})",
            v.predicted.tag,
            v.predicted.geometry_note,
            v.predicted.alpha_limit,
            v.predicted.omega_limit,
            v.backward,
            v.forward,
            if v.matches { "ok" } else { "MISMATCH" }
        );
    }
    Ok(())
}
