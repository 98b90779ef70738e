//! Searching A + A for a long progression or coset.
//!
//! Run with a group and generator, e.g.
//! `cargo run --example long_aps -- Z10007 "interval(50)"`.

use bourgain_lab::bench::{check_certificate, gen_set_str};
use bourgain_lab::longaps::{find_long_structure, LongApConfig};
use bourgain_lab::{GroupSet, GroupSpec, Result};

fn coset_in_z2_13() -> Result<GroupSet> {
    let g: GroupSpec = "Z2^13".parse()?;
    let gens: Vec<usize> = (0..12).map(|i| 1 << i).collect();
    Ok(GroupSet::subgroup_generated(&g, &gens).translate(1 << 12))
}

fn main() -> Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let a = match args.as_slice() {
        [group, set] => gen_set_str(&group.parse()?, set, 42)?,
        _ => coset_in_z2_13()?,
    };
    println!("|A| = {} in {}", a.len(), a.spec());
    match find_long_structure(&a, &LongApConfig::default()) {
        Ok(s) => {
            println!("K = {:.3}, p = {}, h = {}", s.k, s.p, s.h);
            println!("almost-period system of size {}", s.almost_periods.level_size);
            println!("{} of length {} (target {:.2})", s.certificate.kind(), s.length, s.target_length);
            println!("verified in A + A: {}", check_certificate(&s.certificate, &a)?.valid);
        }
        Err(e) => println!("no certificate: {e}"),
    }
    Ok(())
}
