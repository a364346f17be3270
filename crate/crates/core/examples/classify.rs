//! Reads off the Bianchi class and the flow region of a few brackets.

use unimodular_ricci::algebra::{classify, StructureConstants};
use unimodular_ricci::dynamics::{classify_region, trace_separatrix};
use unimodular_ricci::moduli::{canonicalize, ModuliPoint};
use unimodular_ricci::Result;

pub fn run_example() -> Result<Vec<String>> {
    let sep = trace_separatrix(256, 1e-10)?;
    let mut lines = Vec::new();
    for a in [[1.0, 1.0, 1.0], [1.0, 1.0, -1.0], [1.0, 1.0, 0.0], [1.0, -1.0, 0.0], [1.0, 0.0, 0.0], [2.0, 1.0, 0.5]] {
        let a = StructureConstants::from_array(a)?;
        let class = classify(&a);
        // canonical coordinates land in the domain the region map expects
        let p: ModuliPoint = canonicalize(&a);
        let region = classify_region(&p, &sep, 1e-4)?;
        let region = format!("{} ({})", region.tag, region.geometry_note);
        lines.push(format!("{:?} {} ({}) region {}", a.as_array(), class, class.lie_group(), region));
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
