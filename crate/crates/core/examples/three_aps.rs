//! Counting 3APs two ways and running the density-increment driver.

use bourgain_lab::bench::gen_set_str;
use bourgain_lab::roth::{count_threeaps, density_increment_driver, CountMode, DriverConfig, DriverOutcome};
use bourgain_lab::{BourgainSystem, GroupSpec, Result};

fn main() -> Result<()> {
    let g = GroupSpec::cyclic(101)?;
    let whole = BourgainSystem::whole_group(&g);
    for gen in ["random(0.4)", "greedy_apfree(30)"] {
        let a = gen_set_str(&g, gen, 7)?;
        let brute = count_threeaps(&a, CountMode::Brute);
        let fourier = count_threeaps(&a, CountMode::Fourier);
        println!("{gen}: |A| = {}, 3APs {} (brute) {} (fourier), {} nontrivial", a.len(), brute.total, fourier.total, brute.nontrivial());
        match density_increment_driver(&a, &whole, &DriverConfig::default())? {
            DriverOutcome::Certificate { certificate, trace } => {
                let ok = certificate.verify(&g, &a)?.valid;
                println!("  driver found {} after {} step(s), verified: {ok}", certificate.to_json().replace('\n', ""), trace.len());
            }
            DriverOutcome::Exhausted { reason, trace } => {
                println!("  driver stopped after {} step(s): {reason}", trace.len());
                for s in trace {
                    println!("    step {} alpha {} branch {}", s.step, s.alpha, s.branch);
                }
            }
        }
    }
    Ok(())
}
