//! Acceptance battery: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Every criterion runs at full size against the library
//! API; nothing here goes through the `verify` suites except the determinism
//! check, which is about the reports themselves.

use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use bourgain_lab::bench::{check_certificate, gen_set_str, run_suite, standard_corpus, ExperimentConfig, SuiteName};
use bourgain_lab::bogolyubov::{bogolyubov_containment, pluennecke_chain_check};
use bourgain_lab::certificate::Certificate;
use bourgain_lab::exact::{self, Q};
use bourgain_lab::harmonic::ConvolutionMode;
use bourgain_lab::longaps::{
    croot_sisask_search, default_ell, extract_ap_or_subgroup, find_long_structure, lp_chain_check,
    packing_translate, smoothed_indicator, smoothing_error, LongApConfig, SearchConfig,
};
use bourgain_lab::roth::{count_threeaps, density_increment_driver, eq_chain, l2_increment_step, CountMode, DriverConfig};
use bourgain_lab::spectrum::{annihilation_check, build_annihilator, ProbeConfig};
use bourgain_lab::systems::{
    averaging_check, bohr_density_check, dilation_density_check, intersection_density_check, regularity_scan,
    verify_axioms, Endomorphism,
};
use bourgain_lab::{BourgainSystem, Constants, DenseFunction, GroupSet, GroupSpec, Measure};

type Outcome = Result<String, String>;

fn g(s: &str) -> GroupSpec {
    s.parse().unwrap()
}

fn rng(stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(20_240_601);
    r.set_stream(stream);
    r
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_fn(spec: &GroupSpec, r: &mut ChaCha8Rng) -> DenseFunction {
    let v = (0..spec.order())
        .map(|_| Complex64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)))
        .collect();
    DenseFunction::new(spec, v).unwrap()
}

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn c1_harmonic() -> Outcome {
    let groups = ["Z4096", "Z64xZ64", "Z2^12", "Z3^7", "Z1009", "Z5xZ7xZ11", "Z4xZ8xZ2", "Z2^6xZ3"];
    let mut r = rng(1);
    let tol = 1e-9;
    let (mut worst, mut functions, mut naive_runs) = (0f64, 0, 0);
    for (gi, name) in groups.iter().enumerate() {
        let spec = g(name);
        // 500 pairs in all, i.e. 1000 random functions.
        let pairs = if gi < 4 { 63 } else { 62 };
        for t in 0..pairs {
            let f = random_fn(&spec, &mut r);
            let h = random_fn(&spec, &mut r);
            functions += 2;
            let (fh, hh) = (f.fourier(), h.fourier());
            let parseval = (f.inner(&h).unwrap() - fh.inner(&hh).unwrap()).norm();
            let inversion = max_diff(fh.inverse().values(), f.values());
            let fast = f.convolve(&h, ConvolutionMode::Fast).unwrap();
            let prod: Vec<Complex64> = fh.values().iter().zip(hh.values()).map(|(a, b)| a * b).collect();
            let conv = max_diff(fast.fourier().values(), &prod);
            let mut e = parseval.max(inversion).max(conv);
            if spec.order() <= 1024 || t < 2 {
                let naive = f.convolve(&h, ConvolutionMode::Naive).unwrap();
                e = e.max(max_diff(fast.values(), naive.values()));
                naive_runs += 1;
            }
            ensure(e <= tol, || format!("{name} trial {t}: error {e:e}"))?;
            worst = worst.max(e);
        }
    }
    Ok(format!("{functions} functions, {naive_runs} naive convolutions, max error {worst:.2e}"))
}

fn c2_counting() -> Outcome {
    let groups = ["Z1009", "Z2047", "Z3^6", "Z5xZ25", "Z2001", "Z11^3", "Z7xZ9xZ15"];
    let mut r = rng(2);
    for i in 0..200 {
        let spec = g(groups[i % groups.len()]);
        let gen = match i % 5 {
            0 => format!("interval({})", r.gen_range(1..spec.moduli()[0])),
            1 => format!("union_intervals({},{})", r.gen_range(1..4), r.gen_range(1..(spec.moduli()[0] / 4).max(2))),
            _ => format!("random({:.3})", r.gen_range(0.01..0.5)),
        };
        let a = gen_set_str(&spec, &gen, i as u64).map_err(|e| e.to_string())?;
        let (b, f) = (count_threeaps(&a, CountMode::Brute), count_threeaps(&a, CountMode::Fourier));
        ensure(b.total == f.total, || format!("{spec} {gen}: brute {} vs fourier {}", b.total, f.total))?;
    }
    let z5 = count_threeaps(&GroupSet::full(&g("Z5")), CountMode::Fourier).total;
    ensure(z5 == 25, || format!("Z5 gives {z5}"))?;
    for name in ["Z1009", "Z3^6", "Z2047"] {
        let a = gen_set_str(&g(name), "greedy_apfree(80)", 0).map_err(|e| e.to_string())?;
        let c = count_threeaps(&a, CountMode::Fourier).total;
        ensure(c == a.len() as u64, || format!("greedy set in {name}: {c} vs |A| = {}", a.len()))?;
    }
    Ok("200 sets agree exactly; Z5 = 25; greedy sets trivial only".into())
}

fn radius_grid() -> Vec<Q> {
    vec![exact::q(1, 4), exact::q(1, 2), exact::qi(1), exact::qi(2), exact::qi(4)]
}

fn random_bohr(spec: &GroupSpec, r: &mut ChaCha8Rng) -> BourgainSystem {
    let k = r.gen_range(1..=3);
    let freqs: Vec<usize> = (0..k).map(|_| r.gen_range(1..spec.order())).collect();
    BourgainSystem::bohr(spec, &freqs, exact::q(r.gen_range(1..=8), 32)).unwrap()
}

/// Systems from every constructor and operation.
fn system_zoo(spec: &GroupSpec, r: &mut ChaCha8Rng) -> Vec<(String, BourgainSystem)> {
    let n = spec.order();
    let mut out = Vec::new();
    for i in 0..12 {
        out.push((format!("bohr#{i}"), random_bohr(spec, r)));
    }
    for i in 0..8 {
        let d = r.gen_range(1..=2);
        let lengths = (0..d).map(|_| exact::qi(r.gen_range(0..=6))).collect();
        let gens = (0..d).map(|_| r.gen_range(0..n)).collect();
        let h = GroupSet::subgroup_generated(spec, &[r.gen_range(0..n)]);
        let h = if h.len() * 4 > n { GroupSet::singleton(spec, 0) } else { h };
        out.push((format!("cprog#{i}"), BourgainSystem::coset_progression(spec, lengths, gens, h).unwrap()));
    }
    out.push(("whole".into(), BourgainSystem::whole_group(spec)));
    out.push(("trivial".into(), BourgainSystem::subgroup(GroupSet::singleton(spec, 0)).unwrap()));
    let sub = GroupSet::subgroup_generated(spec, &[spec.scale(3, 1)]);
    out.push(("subgroup".into(), BourgainSystem::subgroup(sub).unwrap()));
    let base = out.clone();
    for (name, s) in base.iter().take(10) {
        out.push((format!("dilate({name})"), s.dilate(exact::q(1, 2)).unwrap()));
        out.push((format!("image({name})"), s.image(Endomorphism::Scalar(2)).unwrap()));
    }
    for i in 0..6 {
        let pair = [base[i].1.clone(), base[i + 12].1.clone()];
        out.push((format!("intersect#{i}"), BourgainSystem::intersect(&pair).unwrap()));
    }
    let b = base[0].1.clone();
    let reg = regularity_scan(&b, b.dim_for_bounds(), &Constants::default()).unwrap();
    out.push(("regularized".into(), reg.system));
    let x = gen_set_str(spec, "random(0.2)", 3).unwrap();
    let ann = build_annihilator(&b, &x.intersection(&b.level().unwrap()).unwrap(), 0.5, 0.25, &Constants::default(), &ProbeConfig::default());
    if let Ok(ann) = ann {
        out.push(("annihilator".into(), ann.system));
    }
    out
}

fn c3_axioms() -> Outcome {
    let mut total = 0;
    for (i, name) in ["Z1009", "Z3^5", "Z4xZ8xZ16", "Z2048"].iter().enumerate() {
        let spec = g(name);
        let mut r = rng(30 + i as u64);
        for (label, s) in system_zoo(&spec, &mut r) {
            let rep = verify_axioms(&s, &radius_grid(), s.declared_dimension()).map_err(|e| format!("{name} {label}: {e}"))?;
            ensure(rep.passed(), || format!("{name} {label}: {:?}", rep.violations))?;
            total += 1;
        }
    }
    Ok(format!("{total} systems pass all five axioms"))
}

fn c4_density() -> Outcome {
    let groups = ["Z1009", "Z2003", "Z3^6", "Z16xZ64"];
    let mut r = rng(4);
    let (mut bohr, mut dil, mut inter) = (0, 0, 0);
    for i in 0..120 {
        let spec = g(groups[i % groups.len()]);
        let a = random_bohr(&spec, &mut r);
        let b = random_bohr(&spec, &mut r);
        let d = bohr_density_check(&a).map_err(|e| e.to_string())?;
        ensure(d.holds, || format!("Bohr density #{i}: {d:?}"))?;
        bohr += 1;
        let lambda = exact::q(r.gen_range(1..=15), 16);
        for s in [&a, &b] {
            let d = dilation_density_check(s, &lambda).map_err(|e| e.to_string())?;
            ensure(d.holds, || format!("dilation density #{i}: {d:?}"))?;
            dil += 1;
        }
        let d = intersection_density_check(&[a, b]).map_err(|e| e.to_string())?;
        ensure(d.holds, || format!("intersection density #{i}: {d:?}"))?;
        inter += 1;
    }
    Ok(format!("{bohr} Bohr, {dil} dilation, {inter} intersection instances, zero failures"))
}

fn c5_regularity() -> Outcome {
    let consts = Constants::default();
    let h = (consts.regularity_points / 2) as f64;
    let k_max = ((h * consts.c0 / consts.c1).floor() as i64).min(10);
    let mut pairs = 0;
    for i in 0..100 {
        let spec = g(if i % 2 == 0 { "Z1009" } else { "Z2003" });
        let mut r = rng(500 + i);
        let s = random_bohr(&spec, &mut r);
        let d = s.dim_for_bounds();
        let reg = regularity_scan(&s, d, &consts).map_err(|e| format!("system #{i}: {e}"))?;
        let lambda = exact::to_f64(&reg.lambda);
        ensure((0.5..=1.0).contains(&lambda), || format!("system #{i}: lambda {lambda}"))?;
        if k_max < 1 {
            continue;
        }
        for k in [k_max, (k_max / 2).max(1), 1] {
            let rho = exact::snap(k as f64 / (h * consts.c0 * d as f64)).unwrap();
            let small = reg.system.realize(&rho).unwrap();
            let part: Vec<usize> = small.iter().filter(|_| r.gen_bool(0.5)).chain([0]).collect();
            let measures = [
                Measure::uniform(&small).unwrap(),
                Measure::uniform(&GroupSet::from_indices(&spec, part)).unwrap(),
                Measure::point_mass(&spec, 0),
            ];
            for mu in measures {
                let rep = averaging_check(&reg.system, d, &mu, &rho, &consts).map_err(|e| e.to_string())?;
                ensure(rep.deviation <= rep.bound, || format!("system #{i}: {rep:?}"))?;
                pairs += 1;
            }
        }
    }
    Ok(format!("100 systems regular with lambda in [1/2,1]; {pairs} averaging pairs within C1 rho d"))
}

fn c6_annihilation() -> Outcome {
    let consts = Constants::default();
    let (eta, nu) = (0.5, 0.25);
    let mut runs = 0;
    let mut worst_ratio = 0f64;
    for name in ["Z1009", "Z3^6", "Z4xZ8xZ16"] {
        let spec = g(name);
        let probe = ProbeConfig::default();
        let mut r = rng(6);
        let b = random_bohr(&spec, &mut r);
        let bohr = regularity_scan(&b, b.dim_for_bounds(), &consts).unwrap().system;
        let level = bohr.level().unwrap();
        for (set, a) in standard_corpus(&spec, 42) {
            for (base, x) in [(BourgainSystem::whole_group(&spec), a.clone()), (bohr.clone(), a.intersection(&level).unwrap())] {
                if x.is_empty() {
                    continue;
                }
                let ann = build_annihilator(&base, &x, eta, nu, &consts, &probe).map_err(|e| format!("{name} {set}: {e}"))?;
                let check = annihilation_check(&spec, &ann.spectrum, &ann.system.level().unwrap(), nu);
                ensure(check.holds, || format!("{name} {set}: max deviation {}", check.max_deviation))?;
                ensure(ann.trace.chang.ratio <= consts.c_chang, || format!("{name} {set}: Chang ratio {}", ann.trace.chang.ratio))?;
                worst_ratio = worst_ratio.max(ann.trace.chang.ratio);
                runs += 1;
            }
        }
    }
    Ok(format!("{runs} annihilator runs rechecked; max Chang ratio {worst_ratio:.3}"))
}

fn annihilator_of(k: &GroupSet) -> Vec<usize> {
    let spec = k.spec();
    (0..spec.order()).filter(|&c| k.iter().all(|t| spec.phase(c, t) == 0)).collect()
}

/// Union of random cosets of a random subgroup `K`, with a few flipped points.
fn coset_union(spec: &GroupSpec, r: &mut ChaCha8Rng) -> (GroupSet, GroupSet) {
    let n = spec.order();
    let k = loop {
        let gens: Vec<usize> = (0..2).map(|_| r.gen_range(1..n)).collect();
        let k = GroupSet::subgroup_generated(spec, &gens);
        if k.len() > 1 && k.len() < n {
            break k;
        }
    };
    let mut a = GroupSet::empty(spec);
    for x in 0..n {
        if (0..n).filter(|&y| y < x).all(|y| !k.contains(spec.sub(x, y))) && r.gen_bool(0.35) {
            a = a.union(&k.translate(x)).unwrap();
        }
    }
    for _ in 0..n / 50 {
        let x = r.gen_range(0..n);
        if !a.remove(x) {
            a.insert(x);
        }
    }
    if a.is_empty() {
        a.insert(0);
    }
    (a, k)
}

fn c7_roth() -> Outcome {
    let consts = Constants::default();
    let kappa = 0.25;
    let mut r = rng(7);
    let (mut fired, mut tried) = (0, 0);
    let groups = [g("Z3^5"), g("Z2^8"), g("Z5^3")];
    while fired < 20 && tried < 200 {
        let spec = &groups[tried % groups.len()];
        tried += 1;
        let (a, k) = coset_union(spec, &mut r);
        let rho = exact::snap(consts.c_step * kappa * a.density()).unwrap();
        let whole = BourgainSystem::whole_group(spec);
        match l2_increment_step(&a, &whole, &annihilator_of(&k), &k, kappa, &rho, &consts) {
            Ok(Some(w)) => {
                // Exact form of count / |T| >= (1 + kappa/8) |A| / |G| with kappa = 1/4.
                let lhs = 32 * w.count as u128 * spec.order() as u128;
                let rhs = 33 * a.len() as u128 * k.len() as u128;
                ensure(lhs >= rhs, || format!("increment conclusion fails: {w:?}"))?;
                fired += 1;
            }
            Ok(None) => {}
            Err(e) => return Err(format!("increment step: {e}")),
        }
    }
    ensure(fired >= 20, || format!("hypothesis fired only {fired} times in {tried} instances"))?;
    let z = g("Z101");
    let whole = BourgainSystem::whole_group(&z);
    for seed in 0..50 {
        let a = gen_set_str(&z, "random(0.4)", seed).unwrap();
        let out = density_increment_driver(&a, &whole, &DriverConfig::default()).map_err(|e| format!("seed {seed}: {e}"))?;
        let cert = out.certificate().ok_or_else(|| format!("seed {seed}: no certificate"))?;
        let ok = brute_threeap(&z, &a, cert);
        ensure(ok, || format!("seed {seed}: certificate {cert:?} fails brute check"))?;
    }
    Ok(format!("increment conclusion on {fired}/{tried} firing instances; 50/50 driver certificates verified"))
}

/// A 3AP certificate checked by hand, plus a brute count confirming `A` has
/// nontrivial 3APs at all.
fn brute_threeap(spec: &GroupSpec, a: &GroupSet, cert: &Certificate) -> bool {
    let (x, y, z) = match cert {
        Certificate::Nontrivial { x, y, z } | Certificate::Proper { x, y, z } => (x, y, z),
        _ => return false,
    };
    let (x, y, z) = (spec.index_of(x).unwrap(), spec.index_of(y).unwrap(), spec.index_of(z).unwrap());
    let in_a = a.contains(x) && a.contains(y) && a.contains(z);
    in_a && spec.add(x, z) == spec.scale(2, y)
        && !(x == y && y == z)
        && count_threeaps(a, CountMode::Brute).nontrivial() > 0
}

fn c8_eq_chain() -> Outcome {
    let mut r = rng(8);
    let groups = ["Z1009", "Z3^6", "Z4xZ8xZ16", "Z2^9"];
    let mut worst = 0f64;
    for i in 0..100 {
        let spec = g(groups[i % groups.len()]);
        let a = gen_set_str(&spec, &format!("random({:.3})", r.gen_range(0.05..0.5)), i as u64).unwrap();
        let x = r.gen_range(0..spec.order());
        let (lhs, rhs) = eq_chain(&a, x);
        worst = worst.max((lhs - rhs).abs());
        ensure((lhs - rhs).abs() <= 1e-9, || format!("#{i}: {lhs} vs {rhs}"))?;
    }
    Ok(format!("100 (A, x) pairs, max gap {worst:.2e}"))
}

fn c9_bogolyubov() -> Outcome {
    let groups = ["Z1009", "Z2^10", "Z3^6", "Z4xZ256", "Z997"];
    let mut r = rng(9);
    let mut max_dim = 0;
    for i in 0..100 {
        let spec = g(groups[i % groups.len()]);
        let gen = if i % 4 == 3 {
            format!("interval({})", spec.moduli()[0] / 2)
        } else {
            format!("random({:.3})", r.gen_range(0.125..0.6))
        };
        let a = gen_set_str(&spec, &gen, i as u64).unwrap();
        if a.density() < 0.125 {
            continue;
        }
        let res = bogolyubov_containment(&a).map_err(|e| format!("{spec} {gen}: {e}"))?;
        // Independent exhaustive check against 2A - 2A.
        let aa = a.sum(&a).unwrap();
        let diff = aa.difference_set(&aa).unwrap();
        let level = res.system.level().unwrap();
        ensure(res.verified && level.is_subset(&diff), || format!("{spec} {gen}: containment fails"))?;
        let bound = 4.0 / (a.density() * a.density());
        ensure(res.frequencies.len() as f64 <= bound, || format!("{spec} {gen}: dimension {} > {bound}", res.frequencies.len()))?;
        max_dim = max_dim.max(res.frequencies.len());
    }
    Ok(format!("100 sets, containment exhaustive, max dimension {max_dim}"))
}

fn c10_long_pipeline() -> Outcome {
    let mut sets: Vec<(String, GroupSet)> = Vec::new();
    for name in ["Z1009", "Z3^6", "Z2^10", "Z4xZ8xZ16"] {
        let spec = g(name);
        sets.extend(standard_corpus(&spec, 42).into_iter().map(|(s, a)| (format!("{name}.{s}"), a)));
    }
    for (label, a) in &sets {
        for p in [2, 4, 6] {
            let rep = lp_chain_check(a, p).map_err(|e| format!("{label}: {e}"))?;
            ensure(rep.holds, || format!("{label} p={p}: {rep:?}"))?;
        }
        let rep = pluennecke_chain_check(a).map_err(|e| format!("{label}: {e}"))?;
        ensure(rep.holds, || format!("{label}: {rep:?}"))?;
    }
    // Croot-Sisask successes, rechecked from scratch.
    let mut cs = 0;
    for (label, a) in sets.iter().filter(|(_, a)| a.len() > 1) {
        let k = a.sum(a).unwrap().len() as f64 / a.len() as f64;
        let full = GroupSet::full(a.spec());
        for p in [2, 4] {
            let Ok(w) = croot_sisask_search(a, a, &full, p, default_ell(k), k.powf(-0.5), &SearchConfig::default()) else {
                continue;
            };
            let f = smoothed_indicator(a, a).unwrap();
            let err = smoothing_error(&f, &w.x, w.report.ell, p).unwrap();
            let bound = k.powf(-0.5) * f.lp_norm(p as f64 / 2.0).unwrap().sqrt();
            ensure(err <= bound * (1.0 + 1e-9) && w.x.is_subset(&full), || format!("{label} p={p}: {err} > {bound}"))?;
            cs += 1;
        }
    }
    // Packing: T = up to 2^p - 1 half-almost-periods near 0.
    let mut packed = 0;
    for (label, a) in &sets {
        let spec = a.spec();
        let f = smoothed_indicator(a, a).unwrap();
        for p in [2, 4, 8] {
            let norm = f.lp_norm(p as f64).unwrap();
            let near = (0..spec.order()).filter(|&x| {
                (0..spec.rank()).all(|i| {
                    let c = spec.element(x).coords[i];
                    c <= 2 || c + 2 >= spec.moduli()[i]
                })
            });
            let periods: Vec<usize> = near
                .filter(|&x| f.sub(&f.translate(x)).unwrap().lp_norm(p as f64).unwrap() <= 0.5 * norm)
                .take((1 << p) - 1)
                .collect();
            let t = GroupSet::from_indices(spec, periods);
            let x = packing_translate(&f, &t, p).map_err(|e| format!("{label} p={p}: {e}"))?;
            let supp = f.support();
            ensure(t.iter().all(|tt| supp.contains(spec.add(x, tt))), || format!("{label} p={p}: x + T leaves the support"))?;
            packed += 1;
        }
    }
    // Extraction window on large systems.
    let mut extractions = 0;
    for (name, s, h) in [
        ("Z10007.bohr", BourgainSystem::bohr(&g("Z10007"), &[1], exact::q(1, 4)).unwrap(), 1),
        ("Z10007.bohr2", BourgainSystem::bohr(&g("Z10007"), &[1, 17], exact::q(1, 2)).unwrap(), 2),
        ("Z2^12.whole", BourgainSystem::whole_group(&g("Z2^12")), 1),
        ("Z3^8.whole", BourgainSystem::whole_group(&g("Z3^8")), 1),
        ("Z2^13.whole", BourgainSystem::whole_group(&g("Z2^13")), 2),
    ] {
        let e = extract_ap_or_subgroup(&s, h, false).map_err(|e| format!("{name}: {e}"))?;
        let b = s.level().unwrap().len() as f64;
        let (lo, hi) = (0.25 * b.powf(0.25 / h as f64), b.powf(0.5 / h as f64));
        let size = e.len() as f64;
        ensure(lo <= size && size <= hi, || format!("{name}: |T| = {size} outside [{lo}, {hi}]"))?;
        extractions += 1;
    }
    Ok(format!(
        "{} corpus sets; {cs} Croot-Sisask witnesses rechecked; {packed} packings; {extractions} extractions in window",
        sets.len()
    ))
}

fn long_structure(group: &str, set: &str, want_ap: bool, min_len: usize) -> Outcome {
    let spec = g(group);
    let a = gen_set_str(&spec, set, 42).map_err(|e| e.to_string())?;
    let s = find_long_structure(&a, &LongApConfig::default()).map_err(|e| format!("{set} in {group}: {e}"))?;
    let check = check_certificate(&s.certificate, &a).map_err(|e| e.to_string())?;
    ensure(check.valid, || format!("certificate rejected: {:?}", check.reason))?;
    let shape_ok = match &s.certificate {
        Certificate::ProperAp { .. } => want_ap,
        Certificate::Coset { .. } => !want_ap,
        _ => false,
    };
    ensure(shape_ok, || format!("unexpected certificate kind {}", s.certificate.kind()))?;
    ensure(s.length >= min_len, || format!("length {} < {min_len}", s.length))?;
    Ok(format!(
        "{} of size {} verified in A+A (length/target {:.3})",
        s.certificate.kind(),
        s.length,
        s.length as f64 / s.target_length
    ))
}

fn c11a_interval() -> Outcome {
    long_structure("Z10007", "interval(50)", true, 8)
}

fn c11b_coset() -> Outcome {
    let gens: Vec<String> = (0..12)
        .map(|i| format!("({})", (0..13).map(|j| if i == j { "1" } else { "0" }).collect::<Vec<_>>().join(",")))
        .collect();
    long_structure("Z2^13", &format!("coset({})", gens.join(",")), false, 2)
}

fn c12_determinism() -> Outcome {
    let cfg = ExperimentConfig::default();
    let one = run_suite(SuiteName::All, &cfg).map_err(|e| e.to_string())?;
    let two = run_suite(SuiteName::All, &cfg).map_err(|e| e.to_string())?;
    let (x, y) = (one.to_json_untimed(), two.to_json_untimed());
    ensure(x == y, || "reports differ".into())?;
    let csv = (one.ledger_csv().unwrap(), two.ledger_csv().unwrap());
    ensure(csv.0 == csv.1, || "ledgers differ".into())?;
    Ok(format!("{} bytes of JSON identical across runs, {} checks", x.len(), one.checks.len()))
}

fn main() {
    let criteria: Vec<(&str, &str, fn() -> Outcome)> = vec![
        ("1", "harmonic core", c1_harmonic),
        ("2", "3AP counting oracles", c2_counting),
        ("3", "Bourgain axioms", c3_axioms),
        ("4", "density lemmas", c4_density),
        ("5", "regularity and averaging", c5_regularity),
        ("6", "annihilation pipeline", c6_annihilation),
        ("7", "Roth engine", c7_roth),
        ("8", "3AP identity chain", c8_eq_chain),
        ("9", "Bogolyubov containment", c9_bogolyubov),
        ("10", "long-AP pipeline pieces", c10_long_pipeline),
        ("11a", "long AP in A+A, interval(50) in Z10007", c11a_interval),
        ("11b", "coset in A+A, index-2 subgroup of Z2^13", c11b_coset),
        ("12", "determinism", c12_determinism),
    ];
    let mut failed = Vec::new();
    for (id, name, run) in criteria {
        let start = Instant::now();
        let out = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match out {
            Ok(detail) => println!("PASS {id:>3} {name} ({secs:.1}s): {detail}"),
            Err(why) => {
                println!("FAIL {id:>3} {name} ({secs:.1}s): {why}");
                failed.push(id);
            }
        }
    }
    if !failed.is_empty() {
        println!("failed criteria: {}", failed.join(", "));
        std::process::exit(1);
    }
}
