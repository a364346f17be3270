//! Linearization of the ratio flow at its fixed points.

use unimodular_ricci::dynamics::{fixed_points, FixedPointReport};

pub fn run_example() -> Vec<FixedPointReport> {
    fixed_points()
}

#[allow(dead_code)]
fn main() {
    for fp in run_example() {
        let tag = fp.tag.map(|t| t.to_string()).unwrap_or_else(|| "-".into());
        println!("{tag} {:?}: {:?} eigenvalues {:?}", fp.location, fp.stability, fp.eigenvalues);
        if let Some(n) = &fp.note {
            println!("  {n}");
        }
    }
}
