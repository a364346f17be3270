//! Runs the metric flow on a Berger sphere until it collapses, and the
//! ratio flow from the same start.

use unimodular_ricci::algebra::MetricState;
use unimodular_ricci::flow::{integrate, FlowFormulation, InitialState, IntegratorConfig, Trajectory};
use unimodular_ricci::Result;

pub fn run_example() -> Result<(Trajectory, Trajectory)> {
    let s0 = MetricState::new([1.0, 1.0, 1.0], [2.0, 1.0, 1.0])?;
    let q = integrate(FlowFormulation::QFlow, &InitialState::Metric(s0), &IntegratorConfig::rkf45(1e-10, 5.0))?;
    let m = integrate(
        FlowFormulation::MFlowAutonomous,
        &InitialState::Moduli { m2: 0.5, m3: 0.5 },
        &IntegratorConfig::rkf45(1e-10, 50.0),
    )?;
    Ok((q, m))
}

#[allow(dead_code)]
fn main() -> Result<()> {
    let (q, m) = run_example()?;
    let end = q.last();
    println!("q-flow: {:?} at t={:.6} after {} samples, state {:?}", q.termination, end.t, q.samples.len(), end.state);
    let end = m.last();
    println!("m-flow: {:?} at t={}, state {:?}", m.termination, end.t, end.state);
    Ok(())
}
