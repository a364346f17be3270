//! Canonical coordinates and the isometry test.

use unimodular_ricci::algebra::StructureConstants;
use unimodular_ricci::moduli::{canonicalize, isometry_equivalent, invariant_map, DEFAULT_EQUIV_TOL};
use unimodular_ricci::Result;

pub fn run_example() -> Result<Vec<String>> {
    let mut lines = Vec::new();
    for a in [[2.0, -4.0, 0.0], [-1.0, 2.0, 3.0], [0.0, 3.0, 3.0]] {
        let a = StructureConstants::from_array(a)?;
        let p = canonicalize(&a);
        let inv = match invariant_map(&p) {
            Ok(i) => format!("{:?} ratio {:.6}", i.ricci_direction, i.drc_ratio),
            Err(e) => e.to_string(),
        };
        lines.push(format!("{:?} -> {p}: {inv}", a.as_array()));
    }
    let pairs = [([2.0, -4.0, 0.0], [1.0, 0.0, -0.5]), ([1.0, 1.0, 1.0], [1.0, 1.0, 2.0]), ([1.0, 1e-12, -3.0], [3.0, 0.0, -1.0])];
    for (a, b) in pairs {
        let same = isometry_equivalent(&StructureConstants::from_array(a)?, &StructureConstants::from_array(b)?, DEFAULT_EQUIV_TOL);
        lines.push(format!("{a:?} ~ {b:?}: {same}"));
    }
    Ok(lines)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    for l in run_example()? {
        println!("{l}");
    }
    Ok(())
}
