//! Traces the curve from the Heisenberg point to the Sol point and
//! compares it with its series near the start.

use unimodular_ricci::dynamics::{separatrix_taylor_seed, trace_separatrix, Separatrix};
use unimodular_ricci::Result;

/// `(m2, traced m3, series m3)`.
type Comparison = Vec<(f64, f64, f64)>;

pub fn run_example() -> Result<(Separatrix, Comparison)> {
    let sep = trace_separatrix(64, 1e-10)?;
    let mut cmp = Vec::new();
    for m2 in [0.05, 0.1, 0.15, 0.2] {
        cmp.push((m2, sep.m3_at(m2), separatrix_taylor_seed(m2)?));
    }
    Ok((sep, cmp))
}

#[allow(dead_code)]
fn main() -> Result<()> {
    let (sep, cmp) = run_example()?;
    for (m2, traced, series) in cmp {
        println!("m2={m2:.2}: traced {traced:.12} series {series:.12}");
    }
    for (m2, m3) in sep.samples.iter().step_by(8) {
        println!("{m2:.6} {m3:.6}");
    }
    Ok(())
}
