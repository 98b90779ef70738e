//! Sets in Z4 x Z8: sumsets, doubling, subgroups and Ruzsa covering.

use bourgain_lab::{GroupSet, GroupSpec, Result};

fn main() -> Result<()> {
    let g: GroupSpec = "Z4xZ8".parse()?;
    println!("{g}: order {}, exponent {}", g.order(), g.exponent());

    let x = g.parse_element("(1,3)")?;
    let y = g.parse_element("(3,6)")?;
    println!("(1,3) + (3,6) = {}", g.render(g.add(x, y)));
    println!("order of (1,3) is {}", g.element_order(x));

    let a = GroupSet::from_indices(&g, [x, y, g.parse_element("(0,1)")?]);
    let aa = a.sum(&a)?;
    println!("A = {}", a.render());
    println!("A + A = {} (doubling {})", aa.render(), a.doubling_constant()?);
    println!("A - A has {} elements", a.difference_set(&a)?.len());

    let h = GroupSet::subgroup_generated(&g, &[g.parse_element("(2,0)")?, g.parse_element("(0,4)")?]);
    println!("H = <(2,0),(0,4)> has {} elements, subgroup: {}", h.len(), h.is_subgroup());

    let cover = aa.ruzsa_cover(&a)?;
    println!("A + A is covered by {} translates of A - A", cover.len());
    Ok(())
}
