use bourgain_lab::exact::{self, Q};
use bourgain_lab::systems::{
    averaging_check, covering_witness, is_regular, regularity_scan, verify_axioms, AxiomViolation, Endomorphism,
    SystemDescription,
};
use bourgain_lab::{BourgainSystem, Constants, GroupSet, GroupSpec, Measure};
use proptest::prelude::*;

fn g(s: &str) -> GroupSpec {
    s.parse().unwrap()
}

fn grid() -> Vec<Q> {
    vec![exact::q(1, 4), exact::q(1, 2), exact::qi(1), exact::qi(2), exact::qi(4)]
}

/// `{x : ||gamma(x)|| <= delta rho for all gamma}` from the definition.
fn bohr_oracle(spec: &GroupSpec, freqs: &[usize], radius: f64) -> GroupSet {
    let e = spec.exponent() as f64;
    GroupSet::from_indices(
        spec,
        (0..spec.order()).filter(|&x| freqs.iter().all(|&c| spec.circle_distance(c, x) as f64 / e <= radius + 1e-12)),
    )
}

#[test]
fn bohr_interval_example() {
    let z100 = g("Z100");
    let b = BourgainSystem::bohr(&z100, &[1], exact::q(1, 20)).unwrap();
    let want: Vec<usize> = (0..=5).chain(95..100).collect();
    assert_eq!(b.level().unwrap().indices(), want);
}

#[test]
fn coset_progression_example() {
    let z10 = g("Z10");
    let m = BourgainSystem::coset_progression(&z10, vec![exact::qi(2)], vec![1], GroupSet::singleton(&z10, 0)).unwrap();
    assert_eq!(m.level().unwrap().indices(), vec![0, 1, 2, 8, 9]);
    assert_eq!(m.declared_dimension(), 3);
    // Radius 1/2 keeps |l| <= 1.
    assert_eq!(m.realize(&exact::q(1, 2)).unwrap().indices(), vec![0, 1, 9]);
}

#[test]
fn declared_dimensions() {
    let spec = g("Z1009");
    assert_eq!(BourgainSystem::bohr(&spec, &[1, 5, 5], exact::q(1, 4)).unwrap().declared_dimension(), 12);
    let w = BourgainSystem::whole_group(&spec);
    assert_eq!(w.declared_dimension(), 0);
    assert_eq!(w.dim_for_bounds(), 1);
}

#[test]
fn constructor_errors() {
    let spec = g("Z12");
    assert!(BourgainSystem::bohr(&spec, &[12], exact::q(1, 4)).is_err());
    assert!(BourgainSystem::bohr(&spec, &[1], exact::qi(0)).is_err());
    let not_sub = GroupSet::from_indices(&spec, [0, 1]);
    assert!(BourgainSystem::subgroup(not_sub.clone()).is_err());
    assert!(BourgainSystem::coset_progression(&spec, vec![exact::qi(1)], vec![1], not_sub).is_err());
    let b = BourgainSystem::whole_group(&spec);
    assert!(b.dilate(exact::qi(2)).is_err());
    assert!(b.image(Endomorphism::Matrix(vec![vec![1, 0]])).is_err());
    assert!(BourgainSystem::intersect(&[b, BourgainSystem::whole_group(&g("Z13"))]).is_err());
}

#[test]
fn matrix_endomorphisms_are_checked() {
    let spec = g("Z2xZ4");
    // x -> (x_0, 2 x_0 + x_1) is well defined; x -> (x_1, x_0) is not.
    assert!(Endomorphism::Matrix(vec![vec![1, 0], vec![2, 1]]).check(&spec).is_ok());
    assert!(Endomorphism::Matrix(vec![vec![0, 1], vec![1, 0]]).check(&spec).is_err());
}

#[test]
fn axiom_checker_catches_bad_families() {
    let spec = g("Z20");
    let lopsided = GroupSet::from_indices(&spec, [0, 1, 2]);
    let s = BourgainSystem::from_levels(&spec, vec![(exact::qi(1), lopsided)], 1).unwrap();
    let rep = verify_axioms(&s, &grid(), 1).unwrap();
    assert!(rep.violations.iter().any(|v| matches!(v, AxiomViolation::Symmetric { .. })));

    let no_zero = GroupSet::from_indices(&spec, [1, 19]);
    let s = BourgainSystem::from_levels(&spec, vec![(exact::qi(1), no_zero)], 1).unwrap();
    let rep = verify_axioms(&s, &grid(), 1).unwrap();
    assert!(rep.violations.iter().any(|v| matches!(v, AxiomViolation::ContainsZero { .. })));

    // Symmetric and nested but not additively closed.
    let small = GroupSet::from_indices(&spec, [0, 1, 19]);
    let s = BourgainSystem::from_levels(&spec, vec![(exact::q(1, 4), small.clone()), (exact::qi(4), small)], 1).unwrap();
    let rep = verify_axioms(&s, &grid(), 1).unwrap();
    assert!(rep.violations.iter().any(|v| matches!(v, AxiomViolation::Additive { .. })));
}

#[test]
fn covering_budget_is_enforced() {
    // Budget 0 allows one translate, which a long Bohr set cannot meet.
    let spec = g("Z1009");
    let b = BourgainSystem::bohr(&spec, &[1], exact::q(1, 16)).unwrap();
    let rep = verify_axioms(&b, &grid(), 0).unwrap();
    assert!(!rep.passed());
    assert!(verify_axioms(&b, &grid(), b.declared_dimension()).unwrap().passed());
}

#[test]
fn description_roundtrip() {
    let spec = g("Z4xZ8xZ16");
    let b = BourgainSystem::bohr(&spec, &[3, 77], exact::q(1, 5)).unwrap();
    let c = BourgainSystem::coset_progression(&spec, vec![exact::qi(3)], vec![9], GroupSet::subgroup_generated(&spec, &[4])).unwrap();
    let s = BourgainSystem::intersect(&[b.dilate(exact::q(2, 3)).unwrap(), c.image(Endomorphism::Scalar(3)).unwrap()]).unwrap();
    let d = SystemDescription::of(&s).unwrap();
    let back = SystemDescription::from_json(&d.to_json()).unwrap();
    assert_eq!(back, d);
    let rebuilt = back.build(&spec).unwrap();
    for r in grid() {
        assert_eq!(rebuilt.realize(&r).unwrap(), s.realize(&r).unwrap());
    }
}

#[test]
fn regularity_and_averaging_on_a_bohr_set() {
    let spec = g("Z2003");
    let consts = Constants::default();
    let b = BourgainSystem::bohr(&spec, &[7, 400], exact::q(3, 16)).unwrap();
    let d = b.dim_for_bounds();
    let reg = regularity_scan(&b, d, &consts).unwrap();
    assert!(reg.lambda >= exact::q(1, 2) && reg.lambda <= exact::qi(1));
    assert!(is_regular(&reg.system, d, &consts).unwrap().0);
    let rho = exact::q(1, 64 * d as i64);
    let mu = Measure::uniform(&reg.system.realize(&rho).unwrap()).unwrap();
    let rep = averaging_check(&reg.system, d, &mu, &rho, &consts).unwrap();
    assert!(rep.deviation <= rep.bound);
    // Radii above 1/(C1 d) are refused.
    assert!(averaging_check(&reg.system, d, &mu, &exact::q(1, d as i64), &consts).is_err());
}

#[test]
fn constants_outside_the_grid_are_rejected() {
    let spec = g("Z101");
    let b = BourgainSystem::bohr(&spec, &[1], exact::q(1, 4)).unwrap();
    let even = Constants {
        regularity_points: 40,
        ..Constants::default()
    };
    assert!(is_regular(&b, 1, &even).is_err());
    assert!(is_regular(&b, 0, &Constants::default()).is_err());
}

fn bohr_params() -> impl Strategy<Value = (usize, Vec<usize>, i64)> {
    (50usize..400).prop_flat_map(|n| (Just(n), prop::collection::vec(1..n, 1..3), 1i64..=10))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn bohr_realization_matches_definition((n, freqs, k) in bohr_params()) {
        let spec = GroupSpec::cyclic(n).unwrap();
        let delta = exact::q(k, 32);
        let b = BourgainSystem::bohr(&spec, &freqs, delta).unwrap();
        for r in grid() {
            let radius = k as f64 / 32.0 * exact::to_f64(&r);
            prop_assert_eq!(b.realize(&r).unwrap(), bohr_oracle(&spec, &freqs, radius));
        }
    }

    #[test]
    fn every_operation_stays_a_system((n, freqs, k) in bohr_params(), lam in 1i64..=8, m in 1i64..6) {
        let spec = GroupSpec::cyclic(n).unwrap();
        let b = BourgainSystem::bohr(&spec, &freqs, exact::q(k, 32)).unwrap();
        let c = BourgainSystem::coset_progression(&spec, vec![exact::qi(m)], vec![freqs[0]], GroupSet::singleton(&spec, 0)).unwrap();
        for s in [
            b.dilate(exact::q(lam, 8)).unwrap(),
            c.image(Endomorphism::Scalar(m + 1)).unwrap(),
            BourgainSystem::intersect(&[b.clone(), c.clone()]).unwrap(),
        ] {
            let rep = verify_axioms(&s, &grid(), s.declared_dimension()).unwrap();
            prop_assert!(rep.passed(), "{:?}", rep.violations);
        }
    }

    #[test]
    fn covering_witness_covers((n, freqs, k) in bohr_params()) {
        let spec = GroupSpec::cyclic(n).unwrap();
        let b = BourgainSystem::bohr(&spec, &freqs, exact::q(k, 32)).unwrap();
        let rho = exact::q(1, 2);
        let x = covering_witness(&b, &rho).unwrap();
        let big = b.realize(&exact::qi(1)).unwrap();
        let small = b.realize(&rho).unwrap();
        prop_assert!(big.is_subset(&x.sum(&small).unwrap()));
    }
}
