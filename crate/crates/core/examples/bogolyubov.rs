//! A Bohr set inside 2A - 2A, and the Pluennecke chain for an interval.

use bourgain_lab::bench::gen_set_str;
use bourgain_lab::bogolyubov::{bogolyubov_containment, pluennecke_chain_check};
use bourgain_lab::{GroupSpec, Result};

fn main() -> Result<()> {
    let g = GroupSpec::cyclic(64)?;
    let a = gen_set_str(&g, "random(0.5)", 1)?;
    let r = bogolyubov_containment(&a)?;
    println!("|A| = {}, alpha = {:.3}", a.len(), r.report.alpha);
    println!("frequencies {:?}", r.frequencies);
    println!("Bohr set of size {} lies in 2A - 2A: {}", r.report.level_size, r.verified);
    println!("smallest count on it {} (margin {:.3e})", r.report.min_count, r.report.margin);

    let z100 = GroupSpec::cyclic(100)?;
    let i = gen_set_str(&z100, "interval(10)", 0)?;
    let p = pluennecke_chain_check(&i)?;
    println!("interval(10): |3A - 2A| = {} <= K^5 |A| = {:.1}, K = {}", p.three_minus_two, p.bound, p.k);
    Ok(())
}
