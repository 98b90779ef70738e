//! Large spectrum of an interval, a dissociated subset and a system that annihilates it.

use bourgain_lab::bench::gen_set_str;
use bourgain_lab::spectrum::{annihilation_check, build_annihilator, ProbeConfig};
use bourgain_lab::{BourgainSystem, Constants, GroupSpec, Result};

fn main() -> Result<()> {
    let g = GroupSpec::cyclic(1009)?;
    let a = gen_set_str(&g, "interval(100)", 0)?;
    let base = BourgainSystem::whole_group(&g);
    let ann = build_annihilator(&base, &a, 0.5, 0.25, &Constants::default(), &ProbeConfig::default())?;
    println!("Spec_1/2 has {} characters: {:?}", ann.spectrum.len(), ann.spectrum);
    println!("dissociated subset {:?}", ann.lambda);
    println!("annihilating system has {} elements", ann.trace.level_size);
    println!("Chang ratio {:.3}", ann.trace.chang.ratio);

    let check = annihilation_check(&g, &ann.spectrum, &ann.system.level()?, 0.25);
    println!("max |1 - gamma(t)| = {:.4} (<= 0.25: {})", check.max_deviation, check.holds);
    Ok(())
}
