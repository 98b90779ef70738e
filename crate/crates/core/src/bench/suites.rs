//! The acceptance batteries behind `run_suite`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::gen::gen_set_str;
use super::{par_entries, ExperimentConfig, Recorder, SuiteName};
use crate::bogolyubov::{bogolyubov_containment, pluennecke_chain_check};
use crate::certificate::Certificate;
use crate::constants::Constants;
use crate::error::{Error, Result};
use crate::exact::{self, Q};
use crate::group::{GroupSet, GroupSpec};
use crate::harmonic::{ConvolutionMode, DenseFunction, Measure};
use crate::longaps::{find_long_structure, lp_chain_check, LongApConfig};
use crate::roth::{
    count_threeaps, density_increment_driver, eq_chain, l2_increment_step, CountMode, DriverConfig,
};
use crate::spectrum::{annihilation_check, build_annihilator, ProbeConfig};
use crate::systems::{
    averaging_check, bohr_density_check, dilation_density_check, intersection_density_check,
    regularity_scan, verify_axioms, BourgainSystem, Endomorphism,
};

pub(crate) fn run(name: SuiteName, cfg: &ExperimentConfig) -> Result<Recorder> {
    let mut rec = Recorder::new(name.as_str());
    match name {
        SuiteName::Harmonic => harmonic(&mut rec, cfg)?,
        SuiteName::Systems => systems(&mut rec, cfg)?,
        SuiteName::Spectrum => spectrum(&mut rec, cfg)?,
        SuiteName::Roth => roth(&mut rec, cfg)?,
        SuiteName::Longaps => longaps(&mut rec, cfg)?,
        SuiteName::All => unreachable!("expanded by run_suite"),
    }
    Ok(rec)
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn group(s: &str) -> GroupSpec {
    s.parse().expect("built-in group")
}

/// The configured group if it is at most `max`, otherwise `fallback`.
fn bounded_group(cfg: &ExperimentConfig, max: usize, fallback: &str) -> Result<GroupSpec> {
    let g = cfg.spec()?;
    Ok(if g.order() <= max { g } else { group(fallback) })
}

/// Named test sets for a group: intervals, random sets, unions of intervals,
/// a coset, a Behrend-like set and a greedy 3AP-free set, whichever apply.
pub fn standard_corpus(spec: &GroupSpec, seed: u64) -> Vec<(String, GroupSet)> {
    let n = spec.order();
    let axis = spec.moduli().iter().copied().find(|&m| m > 1).unwrap_or(1);
    let mut names = vec![
        format!("interval({})", (axis / 10).max(1)),
        format!("interval({})", (axis / 4).max(1)),
        "random(0.1)".to_string(),
        "random(0.3)".to_string(),
        "random(0.5)".to_string(),
        format!("union_intervals(3,{})", (axis / 20).max(1)),
        "greedy_apfree(40)".to_string(),
    ];
    if spec.is_cyclic() {
        let mut k = 1;
        while 5usize.pow(k + 1) * 2 <= n + 1 {
            k += 1;
        }
        if 5usize.pow(k) * 2 <= n + 1 {
            names.push(format!("behrend_like(5,{k})"));
        }
        if let Some(p) = (2..n).find(|p| n % p == 0) {
            names.push(format!("coset({p};1)"));
        }
    } else {
        names.push(format!("coset({};0)", spec.render(1)));
    }
    names
        .into_iter()
        .filter_map(|s| gen_set_str(spec, &s, seed).ok().filter(|a| !a.is_empty()).map(|a| (s, a)))
        .collect()
}

fn random_function(spec: &GroupSpec, rng: &mut ChaCha8Rng) -> DenseFunction {
    let values = (0..spec.order())
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    DenseFunction::new(spec, values).expect("finite values")
}

fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn harmonic(rec: &mut Recorder, cfg: &ExperimentConfig) -> Result<()> {
    let trials: usize = cfg.param("trials", 25)?;
    let tol = 1e-9;
    let mut groups = vec![group("Z64"), group("Z3^4"), group("Z4xZ8"), group("Z2^6xZ3")];
    let g = cfg.spec()?;
    if g.order() <= 4096 {
        groups.insert(0, g);
    }
    let entries: Vec<(usize, GroupSpec)> = groups.into_iter().enumerate().collect();
    par_entries(rec, &entries, |rec, (i, spec)| {
        let mut rng = rng_for(cfg.seed, *i as u64);
        let (mut parseval, mut inversion, mut conv_thm, mut fast_naive, mut dft) = (0f64, 0f64, 0f64, 0f64, 0f64);
        for t in 0..trials {
            let f = random_function(spec, &mut rng);
            let h = random_function(spec, &mut rng);
            let (fh, hh) = (f.fourier(), h.fourier());
            let lhs = f.inner(&h).expect("same group");
            let rhs = fh.inner(&hh).expect("same group");
            parseval = parseval.max((lhs - rhs).norm());
            inversion = inversion.max(max_abs_diff(fh.inverse().values(), f.values()));
            let fast = f.convolve(&h, ConvolutionMode::Fast).expect("same group");
            let prod: Vec<Complex64> = fh.values().iter().zip(hh.values()).map(|(a, b)| a * b).collect();
            conv_thm = conv_thm.max(max_abs_diff(fast.fourier().values(), &prod));
            if spec.order() <= 1024 && t < 4 {
                let naive = f.convolve(&h, ConvolutionMode::Naive).expect("same group");
                fast_naive = fast_naive.max(max_abs_diff(fast.values(), naive.values()));
            }
            if spec.order() <= 256 && t < 2 {
                dft = dft.max(max_abs_diff(fh.values(), f.fourier_naive().values()));
            }
        }
        let name = spec.to_string();
        for (metric, v) in [
            ("parseval", parseval),
            ("inversion", inversion),
            ("convolution_theorem", conv_thm),
            ("fast_vs_naive_convolution", fast_naive),
            ("fast_vs_naive_transform", dft),
        ] {
            rec.check(&format!("{name}.{metric}"), v <= tol, json!({ "max_error": v, "tolerance": tol }));
            rec.ledger(&name, metric, v, Some(tol));
        }
    });
    Ok(())
}

/// Random systems of every kind in `spec`.
pub(crate) fn system_corpus(spec: &GroupSpec, seed: u64, trials: usize) -> Result<Vec<(String, BourgainSystem)>> {
    let mut rng = rng_for(seed, 100);
    let n = spec.order();
    let mut out: Vec<(String, BourgainSystem)> = Vec::new();
    let mut bohrs = Vec::new();
    for i in 0..trials {
        let r = rng.gen_range(1..=3);
        let freqs: Vec<usize> = (0..r).map(|_| rng.gen_range(1..n)).collect();
        let delta = exact::q(rng.gen_range(1..=8), 32);
        let b = BourgainSystem::bohr(spec, &freqs, delta)?;
        out.push((format!("bohr#{i}"), b.clone()));
        bohrs.push(b);
    }
    let cyclic_sub = |k: usize| GroupSet::subgroup_generated(spec, &[k]);
    for i in 0..trials.div_ceil(2) {
        let d = rng.gen_range(1..=2);
        let lengths = (0..d).map(|_| exact::qi(rng.gen_range(0..=6))).collect();
        let gens = (0..d).map(|_| rng.gen_range(0..n)).collect();
        let h = if i % 2 == 0 {
            GroupSet::singleton(spec, 0)
        } else {
            cyclic_sub(rng.gen_range(0..n))
        };
        let h = if h.len() * 4 > n { GroupSet::singleton(spec, 0) } else { h };
        out.push((format!("cprog#{i}"), BourgainSystem::coset_progression(spec, lengths, gens, h)?));
    }
    out.push(("subgroup#trivial".into(), BourgainSystem::subgroup(GroupSet::singleton(spec, 0))?));
    out.push(("subgroup#whole".into(), BourgainSystem::whole_group(spec)));
    if let Some(p) = (2..n).find(|p| n % p == 0).filter(|_| spec.is_cyclic()) {
        out.push((format!("subgroup#<{p}>"), BourgainSystem::subgroup(cyclic_sub(p))?));
    }
    let base: Vec<(String, BourgainSystem)> = out.clone();
    for (name, s) in base.iter().take(trials.div_ceil(2)) {
        out.push((format!("dilate({name},1/2)"), s.dilate(exact::q(1, 2))?));
        out.push((format!("image({name},x3)"), s.image(Endomorphism::Scalar(3))?));
    }
    for i in 0..trials.div_ceil(3) {
        let a = &bohrs[i % bohrs.len()];
        let b = &bohrs[(i + 1) % bohrs.len()];
        out.push((format!("intersect(bohr#{},bohr#{})", i % bohrs.len(), (i + 1) % bohrs.len()), BourgainSystem::intersect(&[a.clone(), b.clone()])?));
    }
    Ok(out)
}

pub(crate) fn radius_grid() -> Vec<Q> {
    vec![exact::q(1, 4), exact::q(1, 2), exact::qi(1), exact::qi(2), exact::qi(4)]
}

fn systems(rec: &mut Recorder, cfg: &ExperimentConfig) -> Result<()> {
    let trials: usize = cfg.param("trials", 20)?;
    let consts = &cfg.constants;
    let fixed = Constants::default();
    rec.check(
        "constants.fixed",
        consts.c0 == fixed.c0 && consts.c1 == fixed.c1,
        json!({ "c0": consts.c0, "c1": consts.c1, "expected_c0": fixed.c0, "expected_c1": fixed.c1 }),
    );
    let spec = bounded_group(cfg, 2048, "Z1009")?;
    let corpus = system_corpus(&spec, cfg.seed, trials)?;
    par_entries(rec, &corpus, |rec, (name, s)| {
        match verify_axioms(s, &radius_grid(), s.declared_dimension()) {
            Ok(r) => {
                let worst = r.cover_sizes.iter().map(|c| c.1).max().unwrap_or(0);
                rec.ledger(name, "max_cover_size", worst as f64, Some(2f64.powi(r.budget.min(1000) as i32)));
                rec.check(&format!("axioms.{name}"), r.passed(), serde_json::to_value(&r).expect("serializable"));
            }
            Err(e) => rec.fail(&format!("axioms.{name}"), &e),
        }
        if let crate::systems::Backend::Bohr(_) = s.backend() {
            match bohr_density_check(s) {
                Ok(d) => rec.check(&format!("bohr_density.{name}"), d.holds, json!(d)),
                Err(e) => rec.fail(&format!("bohr_density.{name}"), &e),
            }
        }
        for lambda in [exact::q(1, 2), exact::q(1, 3)] {
            let label = format!("dilation_density.{name}@{}", exact::render(&lambda));
            match dilation_density_check(s, &lambda) {
                Ok(d) => rec.check(&label, d.holds, json!(d)),
                Err(e) => rec.fail(&label, &e),
            }
        }
    });
    let bohrs: Vec<&BourgainSystem> = corpus.iter().filter(|(n, _)| n.starts_with("bohr#")).map(|x| &x.1).collect();
    for i in 0..bohrs.len().saturating_sub(1) {
        let pair = [bohrs[i].clone(), bohrs[i + 1].clone()];
        let label = format!("intersection_density.bohr#{i}&bohr#{}", i + 1);
        match intersection_density_check(&pair) {
            Ok(d) => rec.check(&label, d.holds, json!(d)),
            Err(e) => rec.fail(&label, &e),
        }
    }
    regularity_battery(rec, cfg, trials)
}

fn regularity_battery(rec: &mut Recorder, cfg: &ExperimentConfig, trials: usize) -> Result<()> {
    let consts = &cfg.constants;
    let mut entries = Vec::new();
    for (gi, g) in ["Z1009", "Z2003"].into_iter().enumerate() {
        let spec = group(g);
        let mut rng = rng_for(cfg.seed, 200 + gi as u64);
        for i in 0..trials {
            let r = rng.gen_range(1..=3);
            let freqs: Vec<usize> = (0..r).map(|_| rng.gen_range(1..spec.order())).collect();
            let delta = exact::q(rng.gen_range(1..=8), 32);
            entries.push((format!("{g}.bohr#{i}"), BourgainSystem::bohr(&spec, &freqs, delta)?, rng.gen::<u64>()));
        }
    }
    par_entries(rec, &entries, |rec, (name, s, seed)| {
        let d = s.dim_for_bounds();
        let reg = match regularity_scan(s, d, consts) {
            Ok(r) => r,
            Err(e) => return rec.fail(&format!("regularity.{name}"), &e),
        };
        let lambda = exact::to_f64(&reg.lambda);
        rec.ledger(name, "regular_lambda", lambda, None);
        rec.check(
            &format!("regularity.{name}"),
            (0.5..=1.0).contains(&lambda),
            json!({ "lambda": exact::render(&reg.lambda), "regular_at_one": reg.regular_at_one, "tried": reg.lambdas_tried }),
        );
        // Grid radii k / (h C0 d) that also respect rho <= 1/(C1 d).
        let h = (consts.regularity_points / 2) as f64;
        let k_max = ((h * consts.c0 / consts.c1).floor() as i64).min(10);
        if k_max < 1 {
            rec.log(&format!("averaging.{name}"), json!({ "skipped": "no grid radius below 1/(C1 d)" }));
            return;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(*seed);
        for k in [k_max, (k_max / 2).max(1)] {
            let rho = exact::snap(k as f64 / (h * consts.c0 * d as f64)).expect("finite");
            let small = match reg.system.realize(&rho) {
                Ok(b) => b,
                Err(e) => return rec.fail(&format!("averaging.{name}"), &e),
            };
            let half: Vec<usize> = small.iter().filter(|_| rng.gen_bool(0.5)).collect();
            let random_part = if half.is_empty() { vec![0] } else { half };
            let measures = [
                ("uniform", Measure::uniform(&small)),
                ("random_subset", Measure::uniform(&GroupSet::from_indices(s.spec(), random_part))),
                ("point_mass", Ok(Measure::point_mass(s.spec(), 0))),
            ];
            for (mname, mu) in measures {
                let label = format!("averaging.{name}.{mname}@k={k}");
                match mu.and_then(|mu| averaging_check(&reg.system, d, &mu, &rho, consts)) {
                    Ok(r) => {
                        rec.ledger(name, &format!("averaging_ratio_{mname}_k{k}"), r.deviation / r.bound, Some(1.0));
                        rec.check(&label, r.deviation <= r.bound, json!(r));
                    }
                    Err(e) => rec.fail(&label, &e),
                }
            }
        }
    });
    Ok(())
}

fn spectrum(rec: &mut Recorder, cfg: &ExperimentConfig) -> Result<()> {
    let eta: f64 = cfg.param("eta", 0.5)?;
    let nu: f64 = cfg.param("nu", 0.25)?;
    if !(eta > 0.0 && eta <= 1.0) || !(nu > 0.0 && nu <= 2.0) {
        return Err(Error::InvalidArgument("need eta in (0,1] and nu in (0,2]".into()));
    }
    let spec = bounded_group(cfg, 4096, "Z1009")?;
    let mut corpus = match &cfg.set {
        Some(s) => vec![(s.clone(), gen_set_str(&spec, s, cfg.seed)?)],
        None => standard_corpus(&spec, cfg.seed),
    };
    corpus.retain(|(_, a)| !a.is_empty());
    let consts = &cfg.constants;
    let probe = ProbeConfig {
        seed: cfg.seed,
        ..ProbeConfig::default()
    };
    let bohr_base = {
        let mut rng = rng_for(cfg.seed, 300);
        let b = BourgainSystem::bohr(&spec, &[rng.gen_range(1..spec.order())], exact::q(1, 4))?;
        regularity_scan(&b, b.dim_for_bounds(), consts)?.system
    };
    let bohr_level = bohr_base.level()?;
    let whole = BourgainSystem::whole_group(&spec);
    par_entries(rec, &corpus, |rec, (name, a)| {
        let inside = a.intersection(&bohr_level).expect("same group");
        let runs = [("whole", &whole, a.clone()), ("bohr", &bohr_base, inside)];
        for (base_name, base, x) in runs {
            let label = format!("annihilate.{name}.{base_name}");
            if x.is_empty() {
                rec.log(&label, json!({ "skipped": "X is empty" }));
                continue;
            }
            match build_annihilator(base, &x, eta, nu, consts, &probe) {
                Ok(ann) => {
                    let level = ann.system.level().expect("realized");
                    let check = annihilation_check(&spec, &ann.spectrum, &level, nu);
                    rec.check(&label, check.holds, json!({ "trace": ann.trace, "recheck": check }));
                    rec.check(
                        &format!("chang.{name}.{base_name}"),
                        ann.trace.chang.holds,
                        json!(ann.trace.chang),
                    );
                    rec.ledger(&format!("{name}.{base_name}"), "chang_ratio", ann.trace.chang.ratio, Some(consts.c_chang));
                    rec.ledger(&format!("{name}.{base_name}"), "annihilator_m", ann.m as f64, None);
                }
                Err(e) => rec.fail(&label, &e),
            }
        }
    });
    Ok(())
}

/// Characters trivial on the subgroup `k`.
pub(crate) fn annihilator_of(k: &GroupSet) -> Vec<usize> {
    let spec = k.spec();
    (0..spec.order()).filter(|&g| k.iter().all(|t| spec.phase(g, t) == 0)).collect()
}

/// A set that is a union of random cosets of a random subgroup `K`, with a
/// few flipped points. The energy on `K^perp` is then large.
pub(crate) fn synthetic_increment_instance(spec: &GroupSpec, rng: &mut ChaCha8Rng) -> (GroupSet, GroupSet) {
    let n = spec.order();
    let k = loop {
        let gens: Vec<usize> = (0..2).map(|_| rng.gen_range(1..n)).collect();
        let k = GroupSet::subgroup_generated(spec, &gens);
        if k.len() < n && k.len() > 1 {
            break k;
        }
    };
    let mut a = GroupSet::empty(spec);
    let mut seen = GroupSet::empty(spec);
    for x in 0..n {
        if seen.contains(x) {
            continue;
        }
        let coset = k.translate(x);
        seen = seen.union(&coset).expect("same group");
        if rng.gen_bool(0.35) {
            a = a.union(&coset).expect("same group");
        }
    }
    for _ in 0..n / 50 {
        let x = rng.gen_range(0..n);
        if a.contains(x) {
            a.remove(x);
        } else {
            a.insert(x);
        }
    }
    if a.is_empty() {
        a.insert(0);
    }
    (a, k)
}

fn roth(rec: &mut Recorder, cfg: &ExperimentConfig) -> Result<()> {
    let trials: usize = cfg.param("trials", 20)?;
    let g = cfg.spec()?;
    let spec = if g.order() % 2 == 1 && g.order() <= 2048 { g } else { group("Z1009") };
    let mut corpus = standard_corpus(&spec, cfg.seed);
    let mut rng = rng_for(cfg.seed, 400);
    for i in 0..trials {
        let alpha = rng.gen_range(0.02..0.6);
        let s = format!("random({alpha:.3})");
        corpus.push((format!("{s}#{i}"), gen_set_str(&spec, &s, cfg.seed + i as u64)?));
    }
    par_entries(rec, &corpus, |rec, (name, a)| {
        let brute = count_threeaps(a, CountMode::Brute);
        let fourier = count_threeaps(a, CountMode::Fourier);
        rec.check(
            &format!("count.{name}"),
            brute.total == fourier.total,
            json!({ "brute": brute.total, "fourier": fourier.total }),
        );
    });
    let z5 = count_threeaps(&GroupSet::full(&group("Z5")), CountMode::Fourier);
    rec.check("count.Z5", z5.total == 25, json!(z5));
    let greedy = gen_set_str(&spec, "greedy_apfree(60)", cfg.seed)?;
    let gc = count_threeaps(&greedy, CountMode::Fourier);
    rec.check("count.greedy_apfree", gc.total == greedy.len() as u64, json!(gc));
    for i in 0..trials {
        let a = gen_set_str(&spec, "random(0.2)", cfg.seed.wrapping_add(1000 + i as u64))?;
        let x = rng.gen_range(0..spec.order());
        let (lhs, rhs) = eq_chain(&a, x);
        rec.check(&format!("eq_chain#{i}"), (lhs - rhs).abs() <= 1e-9, json!({ "lhs": lhs, "rhs": rhs }));
    }
    let z101 = group("Z101");
    let whole = BourgainSystem::whole_group(&z101);
    let seeds: Vec<u64> = (0..trials as u64).map(|i| cfg.seed.wrapping_add(i)).collect();
    par_entries(rec, &seeds, |rec, &seed| {
        let label = format!("driver.Z101.random(0.4)#{seed}");
        let a = gen_set_str(&z101, "random(0.4)", seed).expect("valid generator");
        match density_increment_driver(&a, &whole, &DriverConfig::default()) {
            Ok(out) => {
                let ok = out.certificate().is_some_and(|c| {
                    c.verify(&z101, &a).is_ok_and(|v| v.valid) && count_threeaps(&a, CountMode::Brute).nontrivial() > 0
                });
                rec.check(&label, ok, serde_json::to_value(&out).expect("serializable"));
            }
            Err(e) => rec.fail(&label, &e),
        }
    });
    let mut fired = 0;
    let groups = [group("Z3^5"), group("Z2^8")];
    for i in 0..trials {
        let spec = &groups[i % 2];
        let (a, k) = synthetic_increment_instance(spec, &mut rng);
        let system = BourgainSystem::whole_group(spec);
        let consts = &cfg.constants;
        let alpha = a.density();
        let rho = exact::snap(consts.c_step * 0.25 * alpha).expect("finite");
        let delta = annihilator_of(&k);
        let label = format!("l2_increment#{i}");
        match l2_increment_step(&a, &system, &delta, &k, 0.25, &rho, consts) {
            Ok(Some(w)) => {
                fired += 1;
                rec.check(&label, w.value >= (1.0 + 0.25 / 8.0) * w.alpha, json!(w));
            }
            Ok(None) => rec.log(&label, json!({ "hypothesis": "energy below threshold" })),
            Err(e) => rec.fail(&label, &e),
        }
    }
    rec.ledger("l2_increment", "hypothesis_fired", fired as f64, None);
    Ok(())
}

fn longaps(rec: &mut Recorder, cfg: &ExperimentConfig) -> Result<()> {
    let spec = bounded_group(cfg, 4096, "Z1009")?;
    let corpus = standard_corpus(&spec, cfg.seed);
    par_entries(rec, &corpus, |rec, (name, a)| {
        for p in [2, 4, 6] {
            match lp_chain_check(a, p) {
                Ok(r) => rec.check(&format!("lp_chain.{name}.p{p}"), r.holds, json!(r)),
                Err(e) => rec.fail(&format!("lp_chain.{name}.p{p}"), &e),
            }
        }
        match pluennecke_chain_check(a) {
            Ok(r) => rec.check(&format!("pluennecke.{name}"), r.holds, json!(r)),
            Err(e) => rec.fail(&format!("pluennecke.{name}"), &e),
        }
        match bogolyubov_containment(a) {
            Ok(r) => {
                rec.check(
                    &format!("bogolyubov.{name}"),
                    r.verified && r.report.dimension as f64 <= r.report.dimension_bound,
                    json!(r.report),
                );
            }
            Err(e) => rec.fail(&format!("bogolyubov.{name}"), &e),
        }
    });
    let mut targets: Vec<(String, GroupSpec, String)> = vec![
        ("Z2^10.index2_subgroup".into(), group("Z2^10"), subgroup_coset_string(10)),
        ("Z10007.interval(50)".into(), group("Z10007"), "interval(50)".into()),
    ];
    if let Some(s) = &cfg.set {
        targets.push((format!("{}.{s}", cfg.group), cfg.spec()?, s.clone()));
    }
    let lcfg = LongApConfig {
        constants: cfg.constants.clone(),
        ..LongApConfig::default()
    };
    for (label, spec, s) in targets {
        let a = gen_set_str(&spec, &s, cfg.seed)?;
        end_to_end(rec, &label, &a, &lcfg);
    }
    Ok(())
}

/// `coset(e_1, ..., e_{r-1}; 0)` in `Z2^r`: an index-2 subgroup.
pub(crate) fn subgroup_coset_string(r: usize) -> String {
    let gens: Vec<String> = (0..r - 1)
        .map(|i| {
            let coords: Vec<String> = (0..r).map(|j| if i == j { "1" } else { "0" }.to_string()).collect();
            format!("({})", coords.join(","))
        })
        .collect();
    format!("coset({})", gens.join(","))
}

fn end_to_end(rec: &mut Recorder, label: &str, a: &GroupSet, cfg: &LongApConfig) {
    let spec = a.spec();
    let name = format!("long_structure.{label}");
    match find_long_structure(a, cfg) {
        Ok(s) => {
            let sumset = a.sum(a).expect("same group");
            let check = s.certificate.verify(spec, &sumset);
            let valid = check.as_ref().is_ok_and(|c| c.valid);
            rec.ledger(label, "certificate_length", s.length as f64, None);
            rec.ledger(label, "length_over_target", s.length as f64 / s.target_length, None);
            rec.ledger(label, "cs_tau", s.almost_periods.smoothing.tau, None);
            rec.ledger(label, "chang_ratio", s.almost_periods.annihilator.chang.ratio, None);
            rec.check(&name, valid, serde_json::to_value(&s).expect("serializable"));
        }
        Err(e) => match e.root() {
            Error::Critical(_) => rec.fail(&name, &e),
            _ => rec.log(&name, json!({ "outcome": "no structure", "reason": e.to_string() })),
        },
    }
}

/// Independent check used by `verify-cert`.
pub fn check_certificate(cert: &Certificate, a: &GroupSet) -> Result<crate::certificate::CertificateCheck> {
    let spec = a.spec();
    match cert {
        Certificate::Nontrivial { .. } | Certificate::Proper { .. } => cert.verify(spec, a),
        _ => cert.verify(spec, &a.sum(a)?),
    }
}
