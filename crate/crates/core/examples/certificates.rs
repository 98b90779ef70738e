//! Writing, reading and independently checking certificates.

use bourgain_lab::roth::find_threeap;
use bourgain_lab::{Certificate, GroupSet, GroupSpec, Result};

fn main() -> Result<()> {
    let g: GroupSpec = "Z3xZ9".parse()?;
    let a = GroupSet::from_indices(&g, [0, 4, 8, 13]);
    let Some(cert) = find_threeap(&a) else {
        println!("A has no nontrivial 3AP");
        return Ok(());
    };
    println!("{}", cert.to_json());

    let path = std::env::temp_dir().join("bourgain-lab-cert.json");
    cert.write(&path)?;
    let back = Certificate::read(&path)?;
    println!("read back identical: {}", back == cert);
    println!("valid for A: {:?}", back.verify(&g, &a)?);

    let other = GroupSet::from_indices(&g, [0, 4]);
    println!("valid for a subset: {:?}", back.verify(&g, &other)?);

    let ap = Certificate::ProperAp { base: g.element(0), step: g.parse_element("(1,1)").map(|s| g.element(s))?, length: 4 };
    println!("{} lists {:?}", ap.kind(), ap.elements(&g)?.iter().map(|&x| g.render(x)).collect::<Vec<_>>());
    Ok(())
}
