//! Fourier transform, convolution and large spectra with expectation normalization.

use bourgain_lab::{DenseFunction, GroupSet, GroupSpec, Result};

fn main() -> Result<()> {
    let g = GroupSpec::cyclic(12)?;
    let h = GroupSet::subgroup_generated(&g, &[4]);
    let f = DenseFunction::indicator(&h);
    let fh = f.fourier();
    for gamma in 0..g.order() {
        let v = fh.get(gamma);
        if v.norm() > 1e-12 {
            println!("1_H^({gamma}) = {:.4}", v.re);
        }
    }
    println!("Spec_1/2(1_H) = {:?}", f.large_spectrum(0.5)?);

    // Parseval: E|f|^2 = sum |f^|^2.
    let lhs = f.lp_norm(2.0)?.powi(2);
    let rhs: f64 = fh.values().iter().map(|c| c.norm_sqr()).sum();
    println!("Parseval: {lhs:.6} = {rhs:.6}");

    let z5 = GroupSpec::cyclic(5)?;
    let a = DenseFunction::indicator(&GroupSet::from_indices(&z5, [0, 1]));
    let c = a.conv(&a)?;
    let vals: Vec<f64> = c.values().iter().map(|v| v.re).collect();
    println!("1_{{0,1}} * 1_{{0,1}} on Z5 = {vals:.2?}");
    Ok(())
}
