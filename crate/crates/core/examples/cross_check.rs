//! Checks that the metric flow, pushed down to the ratios, solves the
//! ratio equations.

use unimodular_ricci::algebra::MetricState;
use unimodular_ricci::flow::{cross_check_formulations, CrossCheckReport, IntegratorConfig};
use unimodular_ricci::Result;

pub fn run_example() -> Result<Vec<(&'static str, CrossCheckReport)>> {
    let cases = [
        ("SU2", [1.0, 1.0, 1.0], [2.0, 1.0, 1.0], 5.0),
        ("SL2R", [1.0, 1.0, -1.0], [1.0, 2.0, 1.0], 5.0),
        ("E11", [1.0, 0.0, -1.0], [1.0, 1.0, 1.0], 2.0),
    ];
    let mut out = Vec::new();
    for (name, lambda, q, t) in cases {
        let s0 = MetricState::new(lambda, q)?;
        out.push((name, cross_check_formulations(&s0, &IntegratorConfig::rk4(1e-3, t))?));
    }
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    for (name, r) in run_example()? {
        println!("{name}: max residual {:.3e} over {} samples ({:?})", r.max_residual, r.samples_checked, r.termination);
    }
    Ok(())
}
