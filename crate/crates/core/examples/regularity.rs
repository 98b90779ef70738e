//! Finding a regular dilate of a Bohr set and checking the averaging bound.

use bourgain_lab::exact;
use bourgain_lab::systems::{averaging_check, regularity_scan};
use bourgain_lab::{BourgainSystem, Constants, GroupSpec, Measure, Result};

fn main() -> Result<()> {
    let g = GroupSpec::cyclic(100_003)?;
    let consts = Constants::default();
    let b = BourgainSystem::bohr(&g, &[1], exact::q(1, 4))?;
    let d = b.dim_for_bounds();
    let reg = regularity_scan(&b, d, &consts)?;
    println!(
        "regular at lambda = {} after {} tries (|B_lambda| = {})",
        exact::render(&reg.lambda),
        reg.lambdas_tried,
        reg.system.level()?.len()
    );

    let rho = exact::q(1, (consts.c1 as i64) * d as i64);
    let small = reg.system.realize(&rho)?;
    let mu = Measure::uniform(&small)?;
    let r = averaging_check(&reg.system, d, &mu, &rho, &consts)?;
    println!("||mu_B * mu - mu_B||_1 = {:.3e} <= {:.3e}", r.deviation, r.bound);
    Ok(())
}
