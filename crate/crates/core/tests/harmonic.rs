use bourgain_lab::harmonic::{count_convolve, sum_counts, ConvolutionMode};
use bourgain_lab::{DenseFunction, GroupSet, GroupSpec, Measure};
use num_complex::Complex64;
use proptest::prelude::*;

fn g(s: &str) -> GroupSpec {
    s.parse().unwrap()
}

/// `f^(gamma) = E_x f(x) conj(gamma(x))`, straight from the definition.
fn dft_oracle(f: &DenseFunction) -> Vec<Complex64> {
    let spec = f.spec();
    let n = spec.order();
    (0..n)
        .map(|c| (0..n).map(|x| f.get(x) * spec.char_value(c, x).conj()).sum::<Complex64>() / n as f64)
        .collect()
}

fn close(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).norm() <= tol)
}

#[test]
fn convolution_of_two_point_indicators() {
    let z5 = g("Z5");
    let one = DenseFunction::indicator(&GroupSet::from_indices(&z5, [0, 1]));
    let c = one.conv(&one).unwrap();
    let want = [0.2, 0.4, 0.2, 0.0, 0.0];
    for (x, w) in want.iter().enumerate() {
        assert!((c.get(x).re - w).abs() < 1e-12 && c.get(x).im.abs() < 1e-12);
    }
}

#[test]
fn transform_of_indicator_at_zero_is_density() {
    let spec = g("Z3xZ4");
    let a = GroupSet::from_indices(&spec, [0, 3, 5, 7]);
    let hat = DenseFunction::indicator(&a).fourier();
    assert!((hat.get(0).re - a.density()).abs() < 1e-12);
}

#[test]
fn large_spectrum_of_subgroup_indicator() {
    // The transform of 1_H is density(H) on H^perp and 0 elsewhere.
    let spec = g("Z12");
    let h = GroupSet::subgroup_generated(&spec, &[4]);
    let spec_set = DenseFunction::indicator(&h).large_spectrum(1.0).unwrap();
    assert_eq!(spec_set, vec![0, 3, 6, 9]);
    assert!(DenseFunction::indicator(&h).large_spectrum(0.0).is_err());
    assert!(DenseFunction::zeros(&spec).large_spectrum(0.5).is_err());
}

#[test]
fn measures_are_validated() {
    let spec = g("Z6");
    assert!(Measure::new(DenseFunction::constant(&spec, 1.0)).is_ok());
    assert!(Measure::new(DenseFunction::constant(&spec, 0.5)).is_err());
    assert!(Measure::new(DenseFunction::from_real(&spec, &[6.0, -1.0, 1.0, 0.0, 0.0, 0.0]).unwrap()).is_err());
    assert!(Measure::uniform(&GroupSet::empty(&spec)).is_err());
    let mu = Measure::point_mass(&spec, 2);
    assert!((mu.function().get(2).re - 6.0).abs() < 1e-12);
}

#[test]
fn norms_and_json() {
    let spec = g("Z4");
    let f = DenseFunction::from_real(&spec, &[1.0, -2.0, 0.0, 3.0]).unwrap();
    assert!((f.l1_norm() - 1.5).abs() < 1e-12);
    assert!((f.lp_norm(2.0).unwrap() - (14.0f64 / 4.0).sqrt()).abs() < 1e-12);
    assert_eq!(f.lp_norm(f64::INFINITY).unwrap(), 3.0);
    assert!(f.lp_norm(0.5).is_err());
    let back = DenseFunction::from_json(&spec, &f.to_json()).unwrap();
    assert_eq!(back, f);
    assert!(DenseFunction::from_json(&g("Z5"), &f.to_json()).is_err());
}

#[test]
fn translate_convention() {
    let spec = g("Z7");
    let f = DenseFunction::from_fn(&spec, |x| Complex64::new(x as f64, 0.0));
    // tau_x f(u) = f(x + u).
    assert_eq!(f.translate(2).get(3).re, 5.0);
    assert_eq!(f.reflect().get(1).re, 6.0);
}

#[test]
fn mismatched_specs() {
    let f = DenseFunction::zeros(&g("Z5"));
    let h = DenseFunction::zeros(&g("Z6"));
    assert!(f.conv(&h).is_err());
    assert!(f.inner(&h).is_err());
    assert!(DenseFunction::new(&g("Z5"), vec![Complex64::new(0.0, 0.0); 4]).is_err());
}

fn spec_strategy() -> impl Strategy<Value = GroupSpec> {
    prop::collection::vec(1usize..10, 1..4).prop_map(|m| GroupSpec::new(m).unwrap())
}

fn function_pair() -> impl Strategy<Value = (DenseFunction, DenseFunction)> {
    spec_strategy().prop_flat_map(|spec| {
        let n = spec.order();
        let vals = prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n);
        (Just(spec), vals.clone(), vals).prop_map(|(spec, a, b)| {
            let mk = |v: Vec<(f64, f64)>| {
                DenseFunction::new(&spec, v.into_iter().map(|(r, i)| Complex64::new(r, i)).collect()).unwrap()
            };
            (mk(a), mk(b))
        })
    })
}

fn set_pair() -> impl Strategy<Value = (GroupSet, GroupSet)> {
    spec_strategy().prop_flat_map(|spec| {
        let n = spec.order();
        (
            prop::collection::vec(any::<bool>(), n),
            prop::collection::vec(any::<bool>(), n),
        )
            .prop_map(move |(a, b)| {
                let mk = |bits: Vec<bool>| GroupSet::from_indices(&spec, (0..bits.len()).filter(|&i| bits[i]));
                (mk(a), mk(b))
            })
    })
}

proptest! {
    #[test]
    fn transform_matches_definition((f, _) in function_pair()) {
        prop_assert!(close(f.fourier().values(), &dft_oracle(&f), 1e-9));
        prop_assert!(close(f.fourier_naive().values(), &dft_oracle(&f), 1e-9));
    }

    #[test]
    fn parseval_inversion_convolution((f, h) in function_pair()) {
        let (fh, hh) = (f.fourier(), h.fourier());
        prop_assert!((f.inner(&h).unwrap() - fh.inner(&hh).unwrap()).norm() < 1e-9);
        prop_assert!(close(fh.inverse().values(), f.values(), 1e-9));
        let fast = f.convolve(&h, ConvolutionMode::Fast).unwrap();
        let naive = f.convolve(&h, ConvolutionMode::Naive).unwrap();
        prop_assert!(close(fast.values(), naive.values(), 1e-9));
        prop_assert!(close(fast.fourier().values(), fh.mul(&hh).unwrap().values(), 1e-9));
    }

    #[test]
    fn iterate_is_repeated_convolution((f, _) in function_pair()) {
        let three = f.conv(&f).unwrap().conv(&f).unwrap();
        prop_assert!(close(f.iterate(3).unwrap().values(), three.values(), 1e-9));
    }

    #[test]
    fn sum_counts_match_pairs((a, b) in set_pair()) {
        let spec = a.spec();
        let r = sum_counts(&a, &b).unwrap();
        let mut want = vec![0u64; spec.order()];
        for x in a.iter() {
            for y in b.iter() {
                want[spec.add(x, y)] += 1;
            }
        }
        prop_assert_eq!(&r, &want);
        let u: Vec<u64> = (0..spec.order()).map(|x| a.contains(x) as u64 * 3).collect();
        let v: Vec<u64> = (0..spec.order()).map(|x| b.contains(x) as u64).collect();
        let scaled: Vec<u64> = want.iter().map(|w| 3 * w).collect();
        prop_assert_eq!(count_convolve(spec, &u, &v), scaled);
    }

    #[test]
    fn support_of_sum_convolution_is_sumset((a, b) in set_pair()) {
        prop_assume!(!a.is_empty() && !b.is_empty());
        let c = DenseFunction::indicator(&a).conv(&DenseFunction::indicator(&b)).unwrap();
        prop_assert_eq!(c.support(), a.sum(&b).unwrap());
    }
}

#[test]
fn dense_sum_counts_take_the_transform_path() {
    // |A||B| is far above 16 N log N here.
    let spec = g("Z4096");
    let a = GroupSet::from_indices(&spec, (0..4096).filter(|x| x % 2 == 0));
    let b = GroupSet::from_indices(&spec, (0..4096).filter(|x| x % 3 != 0));
    let r = sum_counts(&a, &b).unwrap();
    for x in [0usize, 1, 17, 4095] {
        let want = a.iter().filter(|&y| b.contains(spec.sub(x, y))).count() as u64;
        assert_eq!(r[x], want);
    }
}
