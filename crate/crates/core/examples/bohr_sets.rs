//! Bohr sets and coset progressions as Bourgain systems, with an axiom check.

use bourgain_lab::exact;
use bourgain_lab::systems::verify_axioms;
use bourgain_lab::{BourgainSystem, GroupSet, GroupSpec, Result};

fn main() -> Result<()> {
    let g = GroupSpec::cyclic(100)?;
    let b = BourgainSystem::bohr(&g, &[1], exact::q(1, 20))?;
    println!("B({{1}}, 1/20) = {}", b.level()?.render());
    println!("declared dimension {}", b.declared_dimension());
    for rho in [exact::q(1, 2), exact::qi(2), exact::qi(4)] {
        println!("  |B_{}| = {}", exact::render(&rho), b.realize(&rho)?.len());
    }

    let radii = [exact::q(1, 4), exact::q(1, 2), exact::qi(1), exact::qi(2)];
    let rep = verify_axioms(&b, &radii, b.declared_dimension())?;
    println!("axioms pass: {} (covers {:?})", rep.passed(), rep.cover_sizes);

    let p = BourgainSystem::coset_progression(&g, vec![exact::qi(2)], vec![2], GroupSet::singleton(&g, 0))?;
    println!("progression level set {}", p.level()?.render());

    let both = BourgainSystem::intersect(&[b.clone(), p.dilate(exact::q(1, 2))?])?;
    println!("intersection level set {}", both.level()?.render());
    println!("as JSON: {}", b.describe()?.to_json());
    Ok(())
}
