//! Closed-form curvature of the standard metrics.

use unimodular_ricci::algebra::StructureConstants;
use unimodular_ricci::curvature::{curvature_profile, CurvatureProfile};
use unimodular_ricci::Result;

pub fn run_example() -> Result<Vec<([f64; 3], CurvatureProfile)>> {
    let mut out = Vec::new();
    for a in [[1.0, 1.0, 1.0], [1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [1.0, -1.0, 0.0], [2.0, 1.0, -1.0]] {
        out.push((a, curvature_profile(&StructureConstants::from_array(a)?)));
    }
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    for (a, c) in run_example()? {
        println!(
            "a={a:?}\n  Ric={:?}\n  K={:?}\n  scal={} |Rc|^2={} |DRc|^2={}",
            c.ricci_eigs, c.sectional, c.scalar, c.ricci_norm_sq, c.d_ricci_norm_sq
        );
    }
    Ok(())
}
