//! Long progressions and cosets in sumsets via almost-periodicity.
//!
//! The pipeline: a Bohr set inside `2A - 2A`, regularized; a Croot-Sisask
//! smoothing set `X` for `1_A * mu_A`; a system annihilating `Spec_{1/2}(mu_X)`
//! whose elements are verified almost-periods; an arithmetic progression or
//! subgroup `T` inside that system; and finally a translate `x` with
//! `x + T ⊆ A + A`.

use std::collections::HashMap;

use num_complex::Complex64;
use num_rational::Ratio;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bogolyubov::{bogolyubov_containment, pluennecke_chain_check, ContainmentReport, PluenneckeReport};
use crate::certificate::Certificate;
use crate::constants::Constants;
use crate::error::{Error, Result};
use crate::exact;
use crate::group::{GroupSet, GroupSpec};
use crate::harmonic::{sum_counts, DenseFunction, ZERO_THRESHOLD};
use crate::spectrum::{build_annihilator, AnnihilatorTrace, ProbeConfig};
use crate::systems::{regularity_scan, BourgainSystem};

fn check_even(p: usize) -> Result<()> {
    if p < 2 || p % 2 != 0 {
        return Err(Error::InvalidArgument(format!("p must be an even integer >= 2, got {p}")));
    }
    Ok(())
}

/// `1_A * mu_S`, computed from exact representation counts.
pub fn smoothed_indicator(a: &GroupSet, s: &GroupSet) -> Result<DenseFunction> {
    if s.is_empty() {
        return Err(Error::InvalidArgument("mu_S needs a nonempty S".into()));
    }
    let r = sum_counts(a, s)?;
    let k = s.len() as f64;
    Ok(DenseFunction::from_fn(a.spec(), |x| Complex64::new(r[x] as f64 / k, 0.0)))
}

fn doubling(a: &GroupSet) -> Result<Ratio<u64>> {
    a.doubling_constant()
}

fn ratio_f64(r: Ratio<u64>) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpChainReport {
    pub p: usize,
    pub k: f64,
    /// `mu_G(A + A)^(1/p)`.
    pub sumset_term: f64,
    /// `K^(1/2) ||1_A * mu_A||_{p/2}^(1/2)`.
    pub middle: f64,
    /// `||1_A * mu_A||_{p/2}^(1/2)`.
    pub half_norm_root: f64,
    /// `K^(1/2) ||1_A * mu_A||_p`.
    pub right: f64,
    pub holds: bool,
}

/// `mu_G(A+A)^(1/p) <= K^(1/2) ||f||_{p/2}^(1/2)` and
/// `||f||_{p/2}^(1/2) <= K^(1/2) ||f||_p` for `f = 1_A * mu_A`.
pub fn lp_chain_check(a: &GroupSet, p: usize) -> Result<LpChainReport> {
    check_even(p)?;
    if a.is_empty() {
        return Err(Error::InvalidArgument("L^p chain needs a nonempty set".into()));
    }
    let k = ratio_f64(doubling(a)?);
    let f = smoothed_indicator(a, a)?;
    let sumset_term = a.sum(a)?.density().powf(1.0 / p as f64);
    let half_norm_root = f.lp_norm(p as f64 / 2.0)?.sqrt();
    let middle = k.sqrt() * half_norm_root;
    let right = k.sqrt() * f.lp_norm(p as f64)?;
    let tol = 1e-12;
    let holds = sumset_term <= middle * (1.0 + tol) && half_norm_root <= right * (1.0 + tol);
    Ok(LpChainReport {
        p,
        k,
        sumset_term,
        middle,
        half_norm_root,
        right,
        holds,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    pub seed: u64,
    pub rounds: usize,
    /// Smallest fiber accepted as `X`.
    pub min_fiber: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            rounds: 16,
            min_fiber: 2,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SmoothingWitness {
    pub x: GroupSet,
    pub report: SmoothingReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothingReport {
    pub ell: usize,
    pub p: usize,
    pub theta: f64,
    /// `||g - g * lambda_X^(l)||_p`.
    pub error: f64,
    /// `theta ||g||_{p/2}^(1/2)`.
    pub bound: f64,
    pub x_size: usize,
    /// `|X| / |T|`.
    pub tau: f64,
    pub samples: usize,
    pub round: usize,
    /// `|A + S| / |A|`.
    pub k: f64,
    /// `|S + T| / |S|`.
    pub l: f64,
    /// `log2` of the size lower bound `(2L)^(-p l^2 / theta^2)` with constant 1.
    pub log2_density_target: f64,
}

/// `||g - g * lambda_X^(l)||_p` with `lambda_X = mu_X * mu_{-X}`, via
/// `(g * lambda_X^(l))^ = g^ |mu_X^|^(2l)`.
pub fn smoothing_error(g: &DenseFunction, x: &GroupSet, ell: usize, p: usize) -> Result<f64> {
    let mu_hat = DenseFunction::indicator(x)
        .scale(x.spec().order() as f64 / x.len() as f64)
        .fourier();
    let g_hat = g.fourier();
    let smoothed = crate::harmonic::DualFunction::new(
        g.spec(),
        g_hat
            .values()
            .iter()
            .zip(mu_hat.values())
            .map(|(gv, m)| gv * m.norm_sqr().powi(ell as i32))
            .collect(),
    )?
    .inverse();
    g.sub(&smoothed)?.lp_norm(p as f64)
}

/// Croot-Sisask search for `X ⊆ T` with
/// `||1_A * mu_S - 1_A * mu_S * lambda_X^(l)||_p <= theta ||1_A * mu_S||_{p/2}^(1/2)`.
///
/// Round `r` draws `k = 2^r` random sample points, groups `t in T` by the
/// quantized values of `tau_t (1_A * mu_S)` at those points and tries the
/// largest fiber. Every candidate is checked exactly.
#[allow(clippy::too_many_arguments)]
pub fn croot_sisask_search(
    a: &GroupSet,
    s: &GroupSet,
    t: &GroupSet,
    p: usize,
    ell: usize,
    theta: f64,
    cfg: &SearchConfig,
) -> Result<SmoothingWitness> {
    check_even(p)?;
    if ell == 0 {
        return Err(Error::InvalidArgument("l must be >= 1".into()));
    }
    if a.is_empty() || s.is_empty() || t.is_empty() {
        return Err(Error::InvalidArgument("A, S, T must be nonempty".into()));
    }
    let k = a.sum(s)?.len() as f64 / a.len() as f64;
    let l = s.sum(t)?.len() as f64 / s.len() as f64;
    if !(theta > 0.0 && theta <= k.powf(-0.5) * (1.0 + 1e-12)) {
        return Err(Error::Precondition(format!("theta = {theta} outside (0, K^-1/2]")));
    }
    let spec = a.spec();
    let g = smoothed_indicator(a, s)?;
    let bound = theta * g.lp_norm(p as f64 / 2.0)?.sqrt();
    let eps = bound.max(1e-9);
    let members = t.indices();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut best_error = f64::INFINITY;
    let mut tried = std::collections::HashSet::new();
    for round in 0..cfg.rounds {
        let samples = 1usize << round.min(20);
        let points: Vec<usize> = (0..samples).map(|_| rng.gen_range(0..spec.order())).collect();
        let mut fibers: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
        for &tt in &members {
            let sig: Vec<i64> = points
                .iter()
                .map(|&y| (g.get(spec.add(tt, y)).re / eps).floor() as i64)
                .collect();
            fibers.entry(sig).or_default().push(tt);
        }
        let mut ranked: Vec<Vec<usize>> = fibers.into_values().filter(|f| f.len() >= cfg.min_fiber).collect();
        ranked.sort_by(|x, y| y.len().cmp(&x.len()).then(x[0].cmp(&y[0])));
        for fiber in ranked.into_iter().take(4) {
            if !tried.insert(fiber.clone()) {
                continue;
            }
            let x = GroupSet::from_indices(spec, fiber.iter().copied());
            let error = smoothing_error(&g, &x, ell, p)?;
            best_error = best_error.min(error);
            if error <= bound {
                let tau = x.len() as f64 / t.len() as f64;
                return Ok(SmoothingWitness {
                    report: SmoothingReport {
                        ell,
                        p,
                        theta,
                        error,
                        bound,
                        x_size: x.len(),
                        tau,
                        samples,
                        round,
                        k,
                        l,
                        log2_density_target: -(p as f64) * (ell * ell) as f64 / (theta * theta) * (2.0 * l).log2(),
                    },
                    x,
                });
            }
        }
    }
    Err(Error::SearchExhausted(format!(
        "no smoothing set after {} rounds; best error {best_error} vs bound {bound}",
        cfg.rounds
    )))
}

/// `||f - tau_x f||_p / ||f||_p` for every `x` in `set`.
fn period_ratios(f: &DenseFunction, set: &GroupSet, p: usize) -> Result<Vec<(usize, f64)>> {
    let norm = f.lp_norm(p as f64)?;
    set.iter()
        .map(|x| Ok((x, f.sub(&f.translate(x))?.lp_norm(p as f64)? / norm)))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlmostPeriodReport {
    pub p: usize,
    pub k: f64,
    pub theta: f64,
    pub ell: usize,
    pub nu: f64,
    pub smoothing: SmoothingReport,
    pub pluennecke: PluenneckeReport,
    pub annihilator: AnnihilatorTrace,
    pub halvings: usize,
    pub level_size: usize,
    /// Largest `||f - tau_x f||_p / ||f||_p` over the level set.
    pub max_ratio: f64,
    /// Counts of ratios in `[0, 1/8), [1/8, 1/4), [1/4, 3/8), [3/8, 1/2]`.
    pub histogram: [usize; 4],
}

/// `l = max(1, ceil(log2 max(K, 2))) + 1`.
pub fn default_ell(k: f64) -> usize {
    (k.max(2.0).log2().ceil() as usize).max(1) + 1
}

/// A system of verified almost-periods: every `x` in its level set satisfies
/// `||1_A * mu_A - tau_x (1_A * mu_A)||_p <= (1/2) ||1_A * mu_A||_p`.
pub fn almost_period_system(
    a: &GroupSet,
    base: &BourgainSystem,
    p: usize,
    consts: &Constants,
    probe: &ProbeConfig,
    search: &SearchConfig,
) -> Result<(BourgainSystem, AlmostPeriodReport)> {
    check_even(p)?;
    let b = base.level()?;
    let twice = a.iterated_sumset(2, 2)?;
    if let Some(x) = b.first_outside(&twice) {
        return Err(Error::Precondition(format!(
            "B contains {} outside 2A - 2A",
            a.spec().render(x)
        )));
    }
    let k = ratio_f64(doubling(a)?);
    let theta = k.powf(-0.5) / 8.0;
    let ell = default_ell(k);
    let pluennecke = pluennecke_chain_check(a)?;
    let smoothing = croot_sisask_search(a, a, &b, p, ell, theta, search).map_err(Error::stage("croot-sisask"))?;
    let nu = 1.0 / (16.0 * k);
    let ann = build_annihilator(base, &smoothing.x, 0.5, nu, consts, probe).map_err(Error::stage("annihilate"))?;
    let f = smoothed_indicator(a, a)?;
    let mut system = ann.system.clone();
    for halvings in 0..=10 {
        let level = system.level()?;
        let ratios = period_ratios(&f, &level, p)?;
        let max_ratio = ratios.iter().map(|r| r.1).fold(0.0, f64::max);
        if max_ratio <= 0.5 {
            let mut histogram = [0usize; 4];
            for (_, r) in &ratios {
                histogram[((r * 8.0) as usize).min(3)] += 1;
            }
            return Ok((
                system,
                AlmostPeriodReport {
                    p,
                    k,
                    theta,
                    ell,
                    nu,
                    smoothing: smoothing.report,
                    pluennecke,
                    annihilator: ann.trace,
                    halvings,
                    level_size: level.len(),
                    max_ratio,
                    histogram,
                },
            ));
        }
        system = system.dilate(exact::q(1, 2))?;
    }
    Err(Error::SearchExhausted(
        "almost-period inequality still fails after 10 halvings".into(),
    ))
}

/// Finds `x` with `x + T ⊆ Supp(f)`, scanning `G` in enumeration order.
pub fn packing_translate(f: &DenseFunction, t: &GroupSet, p: usize) -> Result<usize> {
    check_even(p)?;
    if p < usize::BITS as usize && t.len() >= 1usize << p {
        return Err(Error::Precondition(format!("|T| = {} is not below 2^{p}", t.len())));
    }
    let norm = f.lp_norm(p as f64)?;
    for tt in t.iter() {
        let dev = f.sub(&f.translate(tt))?.lp_norm(p as f64)?;
        if dev > 0.5 * norm * (1.0 + 1e-12) {
            return Err(Error::Precondition(format!(
                "{} is not a 1/2-almost-period",
                t.spec().render(tt)
            )));
        }
    }
    let supp = f.support();
    let spec = f.spec();
    let members = t.indices();
    (0..spec.order())
        .find(|&x| members.iter().all(|&tt| supp.contains(spec.add(x, tt))))
        .ok_or_else(|| Error::Critical("no translate of T fits in the support".into()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Shape {
    /// `{0, step, ..., (length - 1) step}`.
    Progression { step: usize, length: usize },
    Subgroup { generators: Vec<usize> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Extraction {
    pub shape: Shape,
    pub t: Vec<usize>,
    pub h: usize,
    pub eta: f64,
    pub n: usize,
    pub b_size: usize,
    pub b_eta_size: usize,
    pub window: (f64, f64),
    /// Whether `h >= d` held for the declared dimension.
    pub h_covers_dimension: bool,
}

impl Extraction {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// The certificate for `x + T`.
    pub fn certificate(&self, spec: &GroupSpec, x: usize) -> Certificate {
        match &self.shape {
            Shape::Progression { step, length } => Certificate::ProperAp {
                base: spec.element(x),
                step: spec.element(*step),
                length: *length,
            },
            Shape::Subgroup { generators } => Certificate::Coset {
                base: spec.element(x),
                generators: generators.iter().map(|&g| spec.element(g)).collect(),
            },
        }
    }
}

/// A proper progression of length `N` or a subgroup of size in `[N, N^2)`
/// inside `B`, where `eta = 2|B|^(-1/2h)` and `N = floor(eta^(-1/2))`.
///
/// With `strict_dimension` the precondition `h >= d` is enforced; otherwise it
/// is only recorded.
pub fn extract_ap_or_subgroup(system: &BourgainSystem, h: usize, strict_dimension: bool) -> Result<Extraction> {
    if h == 0 {
        return Err(Error::InvalidArgument("h must be >= 1".into()));
    }
    let d = system.declared_dimension();
    let covers = h >= d;
    if strict_dimension && !covers {
        return Err(Error::Precondition(format!("h = {h} is below the dimension {d}")));
    }
    let spec = system.spec();
    let b = system.level()?;
    let bsz = b.len() as f64;
    if 6 * h >= 64 || (b.len() as u64) < 1u64 << (6 * h) {
        return Err(Error::Precondition(format!("|B| = {} is below 2^(6h) with h = {h}", b.len())));
    }
    let eta = 2.0 * bsz.powf(-1.0 / (2.0 * h as f64));
    let n = (eta.powf(-0.5) + 1e-12).floor() as usize;
    let b_eta = system.realize(&exact::snap(eta)?)?;
    if (b_eta.len() as f64) < bsz.sqrt() * (1.0 - 1e-12) {
        let msg = format!("|B_eta| = {} is below |B|^(1/2) = {}", b_eta.len(), bsz.sqrt());
        return Err(if covers { Error::Critical(msg) } else { Error::Precondition(msg) });
    }
    let (shape, t) = match b_eta.iter().find(|&x| spec.element_order(x) >= n) {
        Some(x) => {
            let terms: Vec<usize> = (0..n as i64).map(|j| spec.scale(j, x)).collect();
            (Shape::Progression { step: x, length: n }, terms)
        }
        None => {
            let mut gens = Vec::new();
            let mut sub = GroupSet::singleton(spec, 0);
            for x in b_eta.iter() {
                if sub.len() >= n {
                    break;
                }
                if !sub.contains(x) {
                    gens.push(x);
                    sub = GroupSet::subgroup_generated(spec, &gens);
                }
            }
            if sub.len() < n {
                return Err(Error::Critical(format!(
                    "B_eta generates a subgroup of size {} < N = {n}",
                    sub.len()
                )));
            }
            (Shape::Subgroup { generators: gens }, sub.indices())
        }
    };
    let tset = GroupSet::from_indices(spec, t.iter().copied());
    if tset.len() != t.len() {
        return Err(Error::Critical("progression terms are not distinct".into()));
    }
    if let Some(x) = tset.first_outside(&b) {
        return Err(Error::Critical(format!("T leaves B at {}", spec.render(x))));
    }
    let low = 0.25 * bsz.powf(1.0 / (4.0 * h as f64));
    let high = bsz.powf(1.0 / (2.0 * h as f64));
    let size = t.len() as f64;
    if size < low * (1.0 - 1e-12) || size > high * (1.0 + 1e-12) {
        return Err(Error::Critical(format!("|T| = {size} outside [{low}, {high}]")));
    }
    Ok(Extraction {
        shape,
        t,
        h,
        eta,
        n,
        b_size: b.len(),
        b_eta_size: b_eta.len(),
        window: (low, high),
        h_covers_dimension: covers,
    })
}

/// Smallest even `p >= max(2, ceil(sqrt(log|A| / (K' (log K')^3))))` with
/// `K' = max(K, 2)`.
pub fn choose_p(a_size: usize, k: f64) -> (usize, bool) {
    let kk = k.max(2.0);
    let raw = ((a_size as f64).ln() / (kk * kk.ln().powi(3))).sqrt().ceil();
    let clamped = raw < 2.0;
    let mut p = raw.max(2.0) as usize;
    if p % 2 == 1 {
        p += 1;
    }
    (p, clamped)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LongApConfig {
    pub constants: Constants,
    pub probe: ProbeConfig,
    pub search: SearchConfig,
    pub max_h: usize,
}

impl Default for LongApConfig {
    fn default() -> Self {
        Self {
            constants: Constants::default(),
            probe: ProbeConfig::default(),
            search: SearchConfig::default(),
            max_h: 10,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LongStructure {
    pub certificate: Certificate,
    pub length: usize,
    pub translate: usize,
    pub k: f64,
    pub p: usize,
    pub p_clamped: bool,
    pub h: usize,
    pub bogolyubov: ContainmentReport,
    pub regular_lambda: String,
    pub almost_periods: AlmostPeriodReport,
    pub extraction: Extraction,
    /// `exp(sqrt(log|A| / (K (log K)^3)))` with `K` clamped to 2.
    pub target_length: f64,
    /// Whether `p K log(pK) (log K)^3 <= log|A|` (constant 1).
    pub condition_chain_holds: bool,
}

/// Runs the whole pipeline and returns a certificate for a progression or
/// coset inside `A + A`, verified against the sumset.
pub fn find_long_structure(a: &GroupSet, cfg: &LongApConfig) -> Result<LongStructure> {
    if a.is_empty() {
        return Err(Error::InvalidArgument("A must be nonempty".into()));
    }
    let spec = a.spec();
    let k = ratio_f64(doubling(a)?);
    let bog = bogolyubov_containment(a).map_err(Error::stage("bogolyubov"))?;
    let d = bog.system.dim_for_bounds();
    let reg = regularity_scan(&bog.system, d, &cfg.constants).map_err(Error::stage("regularity"))?;
    let (p, p_clamped) = choose_p(a.len(), k);
    let (aps, ap_report) = almost_period_system(a, &reg.system, p, &cfg.constants, &cfg.probe, &cfg.search)
        .map_err(Error::stage("almost-periods"))?;
    let level = aps.level()?;
    let mut extraction = None;
    let mut last_err = None;
    for h in 1..=cfg.max_h {
        if 6 * h >= 64 || (level.len() as u64) < 1u64 << (6 * h) {
            break;
        }
        match extract_ap_or_subgroup(&aps, h, false) {
            Ok(e) if p >= usize::BITS as usize || e.len() < 1usize << p => {
                extraction = Some(e);
                break;
            }
            Ok(e) => last_err = Some(format!("h = {h}: |T| = {} is not below 2^{p}", e.len())),
            Err(e) if matches!(e.root(), Error::Critical(_)) => return Err(e),
            Err(e) => last_err = Some(format!("h = {h}: {e}")),
        }
    }
    let extraction = extraction.ok_or_else(|| {
        Error::Stage {
            stage: "extract",
            source: Box::new(Error::SearchExhausted(format!(
                "no usable h with |B| = {} >= 2^(6h); {}",
                level.len(),
                last_err.unwrap_or_else(|| "no h admissible".into())
            ))),
        }
    })?;
    let f = smoothed_indicator(a, a)?;
    let tset = GroupSet::from_indices(spec, extraction.t.iter().copied());
    let x = packing_translate(&f, &tset, p).map_err(Error::stage("packing"))?;
    let certificate = extraction.certificate(spec, x);
    let sumset = a.sum(a)?;
    let check = certificate.verify(spec, &sumset)?;
    if !check.valid {
        return Err(Error::Critical(format!("certificate failed against A + A: {:?}", check.reason)));
    }
    let kk = k.max(2.0);
    let log_a = (a.len() as f64).ln();
    let target_length = (log_a / (kk * kk.ln().powi(3))).sqrt().exp();
    let pk = p as f64 * kk;
    let condition_chain_holds = pk * pk.ln() * kk.ln().powi(3) <= log_a;
    Ok(LongStructure {
        length: check.size,
        translate: x,
        certificate,
        k,
        p,
        p_clamped,
        h: extraction.h,
        bogolyubov: bog.report,
        regular_lambda: exact::render(&reg.lambda),
        almost_periods: ap_report,
        extraction,
        target_length,
        condition_chain_holds,
    })
}

/// `Supp(1_A * mu_A) = A + A`, up to the zero threshold.
pub fn sumset_support(a: &GroupSet) -> Result<GroupSet> {
    let f = smoothed_indicator(a, a)?;
    Ok(GroupSet::from_indices(
        a.spec(),
        (0..a.spec().order()).filter(|&x| f.get(x).norm() > ZERO_THRESHOLD),
    ))
}
