//! Long-time fits on SL2(R) and E(2).

use unimodular_ricci::algebra::MetricState;
use unimodular_ricci::dynamics::{fit_asymptotics, rescaled_drc_growth, AsymptoticFit, GrowthReport};
use unimodular_ricci::flow::IntegratorConfig;
use unimodular_ricci::Result;

pub fn run_example() -> Result<(Vec<AsymptoticFit>, Vec<AsymptoticFit>, GrowthReport)> {
    let sl2 = MetricState::new([1.0, 1.0, -1.0], [1.0, 1.0, 1.0])?;
    let e2 = MetricState::new([1.0, 1.0, 0.0], [2.0, 1.0, 1.0])?;
    let cfg = IntegratorConfig::rkf45(1e-10, 40.0);
    Ok((
        fit_asymptotics(&sl2, &cfg.with_t_end(1000.0))?,
        fit_asymptotics(&e2, &cfg)?,
        rescaled_drc_growth(&e2, &cfg)?,
    ))
}

#[allow(dead_code)]
fn main() -> Result<()> {
    let (sl2, e2, growth) = run_example()?;
    for f in sl2.iter().chain(&e2) {
        println!("{} {:?} {:?}", f.quantity, f.model, f.constants);
    }
    println!("rescaled |DRc|^2 grows at {:.4} vs E3 {:.4}", growth.rate, growth.e3);
    Ok(())
}
