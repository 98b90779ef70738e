//! Three-term progressions: exact counting, the L^2 increment step, the
//! two-scale selection and an executable density-increment driver.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::Ratio;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::certificate::Certificate;
use crate::constants::Constants;
use crate::error::{Error, Result};
use crate::exact::{self, Q};
use crate::group::{GroupSet, GroupSpec};
use crate::harmonic::{sum_counts, DenseFunction};
use crate::spectrum::{annihilation_check, build_annihilator, ProbeConfig};
use crate::systems::{regularity_scan, BourgainSystem, Endomorphism};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CountMode {
    Brute,
    Fourier,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThreeAPCount {
    /// `#{(x, y, z) in A^3 : x + z = 2y}`.
    pub total: u64,
    /// `|A|`, the progressions `(x, x, x)`.
    pub trivial: u64,
    /// `<1_A * 1_A, 1_{2.A}>`.
    pub normalized: f64,
}

impl ThreeAPCount {
    pub fn nontrivial(&self) -> u64 {
        self.total - self.trivial
    }
}

/// `cnt2[u] = #{y in A : 2y = u}`.
fn halves(a: &GroupSet) -> Vec<u64> {
    let spec = a.spec();
    let mut cnt = vec![0u64; spec.order()];
    for y in a.iter() {
        cnt[spec.scale(2, y)] += 1;
    }
    cnt
}

pub fn count_threeaps(a: &GroupSet, mode: CountMode) -> ThreeAPCount {
    let spec = a.spec();
    let n = spec.order() as f64;
    let cnt2 = halves(a);
    let ind = DenseFunction::indicator(a);
    let two_a = DenseFunction::indicator(&a.dilate(2));
    let aa = ind.conv(&ind).expect("same group");
    let normalized = aa.inner(&two_a).expect("same group").re;
    let total = match mode {
        CountMode::Brute => {
            let members = a.indices();
            let mut t = 0u64;
            for &x in &members {
                for &z in &members {
                    t += cnt2[spec.add(x, z)];
                }
            }
            t
        }
        CountMode::Fourier => {
            // sum_u r(u) cnt2(u) = |G|^2 sum_gamma 1_A^(gamma)^2 conj(cnt2^(gamma)).
            let c2 = DenseFunction::from_fn(spec, |u| Complex64::new(cnt2[u] as f64, 0.0));
            let fa = ind.fourier();
            let v = fa.mul(&fa).expect("same group").inner(&c2.fourier()).expect("same group");
            (v.re * n * n).round().max(0.0) as u64
        }
    };
    ThreeAPCount {
        total,
        trivial: a.len() as u64,
        normalized,
    }
}

/// First nontrivial 3AP of `A` in lexicographic order of `(x, z)`, preferring
/// proper progressions.
pub fn find_threeap(a: &GroupSet) -> Option<Certificate> {
    let spec = a.spec();
    let mut roots: Vec<Vec<usize>> = vec![Vec::new(); spec.order()];
    for y in a.iter() {
        roots[spec.scale(2, y)].push(y);
    }
    for x in a.iter() {
        for z in a.iter() {
            if z == x {
                continue;
            }
            if let Some(&y) = roots[spec.add(x, z)].first() {
                return Some(Certificate::three_ap(spec, x, y, z));
            }
        }
    }
    for x in a.iter() {
        if let Some(&y) = roots[spec.scale(2, x)].iter().find(|&&y| y != x) {
            return Some(Certificate::three_ap(spec, x, y, x));
        }
    }
    None
}

/// A nonzero `d in A - A` with `2d = 0`, with `a, a'` such that `a - a' = d`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Order2Witness {
    pub d: usize,
    pub a: usize,
    pub a_prime: usize,
}

impl Order2Witness {
    /// The degenerate progression `(a, a', a)`.
    pub fn certificate(&self, spec: &GroupSpec) -> Certificate {
        Certificate::three_ap(spec, self.a, self.a_prime, self.a)
    }
}

pub fn order2_scan(a: &GroupSet) -> Option<Order2Witness> {
    let spec = a.spec();
    let torsion: Vec<usize> = (1..spec.order()).filter(|&t| spec.scale(2, t) == 0).collect();
    for d in torsion {
        if let Some(ap) = a.iter().find(|&x| a.contains(spec.sub(x, d))) {
            return Some(Order2Witness {
                d,
                a: ap,
                a_prime: spec.sub(ap, d),
            });
        }
    }
    None
}

/// `{a + a' : a, a' in A, a != a'}`.
pub fn restricted_sumset(a: &GroupSet) -> GroupSet {
    let spec = a.spec();
    let r = sum_counts(a, a).expect("same group");
    let cnt2 = halves(a);
    GroupSet::from_indices(spec, (0..spec.order()).filter(|&x| r[x] > cnt2[x]))
}

/// Both sides of `<1_A * 1_A, 1_{2.A}> = <1_{A-x} * 1_{2x-2.A}, 1_{x-A}>`.
pub fn eq_chain(a: &GroupSet, x: usize) -> (f64, f64) {
    let spec = a.spec();
    let ind = DenseFunction::indicator(a);
    let lhs = ind
        .conv(&ind)
        .and_then(|c| c.inner(&DenseFunction::indicator(&a.dilate(2))))
        .expect("same group")
        .re;
    let a_minus_x = DenseFunction::indicator(&a.translate(spec.neg(x)));
    let two = a.dilate(-2).translate(spec.scale(2, x));
    let x_minus_a = DenseFunction::indicator(&a.negate().translate(x));
    let rhs = a_minus_x
        .conv(&DenseFunction::indicator(&two))
        .and_then(|c| c.inner(&x_minus_a))
        .expect("same group")
        .re;
    (lhs, rhs)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IncrementWitness {
    pub x: usize,
    /// `1_A * mu_T (x)`.
    pub value: f64,
    pub count: usize,
    pub alpha: f64,
    pub energy: f64,
    pub energy_threshold: f64,
}

/// If `sum_Delta |f_A^|^2 >= kappa alpha^2 b` (with `f_A = 1_A - alpha 1_B`),
/// returns a maximizer `x` of `1_A * mu_T` and checks
/// `1_A * mu_T(x) >= (1 + kappa/8) alpha`. Returns `None` when the energy
/// hypothesis fails.
pub fn l2_increment_step(
    a: &GroupSet,
    system: &BourgainSystem,
    delta: &[usize],
    t: &GroupSet,
    kappa: f64,
    rho: &Q,
    consts: &Constants,
) -> Result<Option<IncrementWitness>> {
    let spec = system.spec();
    let b = system.level()?;
    if a.is_empty() || !a.is_subset(&b) {
        return Err(Error::Precondition("A must be a nonempty subset of B".into()));
    }
    if !(kappa > 0.0 && kappa <= 1.0) {
        return Err(Error::InvalidArgument(format!("kappa must lie in (0,1], got {kappa}")));
    }
    let alpha = a.len() as f64 / b.len() as f64;
    let d = system.dim_for_bounds();
    let limit = consts.c_step * kappa * alpha / d as f64;
    if exact::to_f64(rho) > limit * (1.0 + 1e-12) {
        return Err(Error::Precondition(format!(
            "rho = {} exceeds c kappa alpha / d = {limit}",
            exact::render(rho)
        )));
    }
    if t.is_empty() || !t.is_subset(&system.realize(rho)?) {
        return Err(Error::Precondition("T must be a nonempty subset of B_rho".into()));
    }
    let ann = annihilation_check(spec, delta, t, 0.5);
    if !ann.holds {
        return Err(Error::Precondition(format!(
            "Delta is not 1/2-annihilated by T (max |1 - gamma(t)| = {})",
            ann.max_deviation
        )));
    }
    let f = DenseFunction::indicator(a).sub(&DenseFunction::indicator(&b).scale(alpha))?;
    let hat = f.fourier();
    let energy: f64 = delta.iter().map(|&g| hat.get(g).norm_sqr()).sum();
    let bdens = b.density();
    let threshold = kappa * alpha * alpha * bdens;
    if energy < threshold {
        return Ok(None);
    }
    let r = sum_counts(a, t)?;
    let (x, &count) = r
        .iter()
        .enumerate()
        .max_by(|p, q| p.1.cmp(q.1).then(q.0.cmp(&p.0)))
        .expect("nonempty group");
    let value = count as f64 / t.len() as f64;
    // Exact form of value >= (1 + kappa/8) alpha.
    let kq = exact::snap(kappa)?;
    let need = (Q::one() + &kq / exact::qi(8)) * Q::new(BigInt::from(a.len()), BigInt::from(b.len()))
        * exact::qi(t.len() as i64);
    if Q::from_integer(BigInt::from(count)) < need {
        return Err(Error::Critical(format!(
            "increment conclusion failed: 1_A * mu_T max = {value} < (1 + kappa/8) alpha = {}",
            (1.0 + kappa / 8.0) * alpha
        )));
    }
    Ok(Some(IncrementWitness {
        x,
        value,
        count: count as usize,
        alpha,
        energy,
        energy_threshold: threshold,
    }))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "branch", rename_all = "snake_case")]
pub enum TwoScale {
    /// `1_A * mu_{B'}` (`which = 1`) or `1_A * mu_{B''}` (`which = 2`) reaches
    /// `(1 + theta/2) alpha` at `x`.
    Increment { which: u8, x: usize, value: f64 },
    /// Both convolutions are at least `(1 - theta) alpha` at `x`.
    Centers { x: usize, value1: f64, value2: f64 },
}

/// `ceil(factor * |A| / |B| * |S|)` as an integer count threshold.
fn count_threshold(factor: &Q, a: usize, b: usize, s: usize) -> u64 {
    let v = factor * Q::new(BigInt::from(a * s), BigInt::from(b));
    v.ceil().to_integer().to_u64().unwrap_or(u64::MAX)
}

/// Exact two-scale pigeonhole on `1_A * mu_{B'}` and `1_A * mu_{B''}`, with
/// `alpha = |A| / |B|`.
pub fn two_scale_select(
    a: &GroupSet,
    b: &GroupSet,
    b1: &GroupSet,
    b2: &GroupSet,
    theta: f64,
) -> Result<TwoScale> {
    if b.is_empty() || b1.is_empty() || b2.is_empty() {
        return Err(Error::InvalidArgument("two-scale selection needs nonempty systems".into()));
    }
    let th = exact::snap(theta)?;
    let r1 = sum_counts(a, b1)?;
    let r2 = sum_counts(a, b2)?;
    let up = Q::one() + &th / exact::qi(2);
    let down = Q::one() - &th;
    for (which, r, s) in [(1u8, &r1, b1), (2u8, &r2, b2)] {
        let need = count_threshold(&up, a.len(), b.len(), s.len());
        if let Some((x, &c)) = r.iter().enumerate().filter(|(_, &c)| c >= need).max_by(|p, q| p.1.cmp(q.1).then(q.0.cmp(&p.0))) {
            return Ok(TwoScale::Increment {
                which,
                x,
                value: c as f64 / s.len() as f64,
            });
        }
    }
    let n1 = count_threshold(&down, a.len(), b.len(), b1.len());
    let n2 = count_threshold(&down, a.len(), b.len(), b2.len());
    match (0..r1.len()).find(|&x| r1[x] >= n1 && r2[x] >= n2) {
        Some(x) => Ok(TwoScale::Centers {
            x,
            value1: r1[x] as f64 / b1.len() as f64,
            value2: r2[x] as f64 / b2.len() as f64,
        }),
        None => Err(Error::SearchExhausted(
            "neither an increment nor a common center was found".into(),
        )),
    }
}

/// Parameters of the density-increment driver.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DriverConfig {
    pub kappa: f64,
    pub theta: f64,
    /// `eta = eta_factor * sqrt(alpha)`.
    pub eta_factor: f64,
    /// `c` in `B' = B_{c alpha / d}`.
    pub scale_c: f64,
    pub step_cap: usize,
    pub constants: Constants,
    pub probe: ProbeConfig,
}

impl Default for DriverConfig {
    fn default() -> Self {
        Self {
            kappa: 0.25,
            theta: 2f64.powi(-15),
            eta_factor: 0.5,
            scale_c: 0.25,
            step_cap: 64,
            constants: Constants::default(),
            probe: ProbeConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriverStep {
    pub step: usize,
    pub alpha: String,
    pub alpha_f64: f64,
    pub system_size: usize,
    pub set_size: usize,
    pub count: ThreeAPCount,
    pub branch: String,
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum DriverOutcome {
    Certificate { certificate: Certificate, trace: Vec<DriverStep> },
    Exhausted { reason: String, trace: Vec<DriverStep> },
}

impl DriverOutcome {
    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            DriverOutcome::Certificate { certificate, .. } => Some(certificate),
            DriverOutcome::Exhausted { .. } => None,
        }
    }

    pub fn trace(&self) -> &[DriverStep] {
        match self {
            DriverOutcome::Certificate { trace, .. } | DriverOutcome::Exhausted { trace, .. } => trace,
        }
    }
}

/// Minimum growth of the relative density per increment.
pub const GROWTH: f64 = 1.0 + 1.0 / 65536.0;

/// Runs the density-increment iteration on `A ⊆ B_1`.
///
/// Each step counts 3APs of the current set; a nontrivial one is translated
/// back to `A` and returned. Otherwise the two-scale selection either yields a
/// denser translate directly, or a common center `x`, in which case the large
/// spectrum of `-2.((A - x) ∩ B'')` is annihilated and the L^2 increment step
/// is applied to `(A - x) ∩ B'`.
pub fn density_increment_driver(
    a: &GroupSet,
    system: &BourgainSystem,
    cfg: &DriverConfig,
) -> Result<DriverOutcome> {
    let spec = system.spec().clone();
    let level = system.level()?;
    if !a.is_subset(&level) {
        return Err(Error::Precondition("A must lie in B_1".into()));
    }
    let mut trace = Vec::new();
    if let Some(w) = order2_scan(a) {
        trace.push(DriverStep {
            step: 0,
            alpha: exact::render(&Q::new(BigInt::from(a.len()), BigInt::from(level.len()))),
            alpha_f64: a.len() as f64 / level.len() as f64,
            system_size: level.len(),
            set_size: a.len(),
            count: count_threeaps(a, CountMode::Brute),
            branch: "order2".into(),
            witness: Some(spec.render(w.d)),
        });
        return Ok(DriverOutcome::Certificate {
            certificate: w.certificate(&spec),
            trace,
        });
    }
    let mut cur_a = a.clone();
    let mut cur_sys = system.clone();
    let mut shift = 0usize;
    let mut last_alpha: Option<Ratio<u64>> = None;
    for step in 0..cfg.step_cap {
        let b = cur_sys.level()?;
        let alpha = Ratio::new(cur_a.len() as u64, b.len() as u64);
        if let Some(prev) = last_alpha {
            let grow = alpha.to_f64().unwrap_or(0.0) / prev.to_f64().unwrap_or(1.0);
            if grow < GROWTH {
                return Err(Error::Critical(format!("density grew only by a factor {grow}")));
            }
        }
        last_alpha = Some(alpha);
        let alpha_f = cur_a.len() as f64 / b.len() as f64;
        let count = count_threeaps(&cur_a, CountMode::Brute);
        let mut record = DriverStep {
            step,
            alpha: format!("{}/{}", alpha.numer(), alpha.denom()),
            alpha_f64: alpha_f,
            system_size: b.len(),
            set_size: cur_a.len(),
            count: count.clone(),
            branch: String::new(),
            witness: None,
        };
        if count.nontrivial() > 0 {
            let local = find_threeap(&cur_a).ok_or_else(|| Error::Critical("count and scan disagree".into()))?;
            let back: Vec<usize> = local
                .elements(&spec)?
                .into_iter()
                .map(|e| spec.add(e, shift))
                .collect();
            let cert = Certificate::three_ap(&spec, back[0], back[1], back[2]);
            if !cert.verify(&spec, a)?.valid {
                return Err(Error::Critical("translated certificate does not verify".into()));
            }
            record.branch = "certificate".into();
            trace.push(record);
            return Ok(DriverOutcome::Certificate {
                certificate: cert,
                trace,
            });
        }
        match increment_once(&cur_a, &cur_sys, alpha_f, cfg) {
            Ok((branch, x, next_sys)) => {
                let next_level = next_sys.level()?;
                let next_a = cur_a.translate(spec.neg(x)).intersection(&next_level)?;
                record.branch = branch;
                record.witness = Some(spec.render(x));
                trace.push(record);
                shift = spec.add(shift, x);
                cur_a = next_a;
                cur_sys = next_sys;
            }
            Err(e) => {
                record.branch = "exhausted".into();
                trace.push(record);
                if matches!(e.root(), Error::Critical(_)) {
                    return Err(e);
                }
                return Ok(DriverOutcome::Exhausted {
                    reason: e.to_string(),
                    trace,
                });
            }
        }
    }
    Ok(DriverOutcome::Exhausted {
        reason: format!("step cap {} reached", cfg.step_cap),
        trace,
    })
}

/// One increment: returns the branch name, the translate and the new system.
fn increment_once(
    a: &GroupSet,
    system: &BourgainSystem,
    alpha: f64,
    cfg: &DriverConfig,
) -> Result<(String, usize, BourgainSystem)> {
    let spec = system.spec();
    let consts = &cfg.constants;
    let d = system.dim_for_bounds();
    let factor = exact::snap((cfg.scale_c * alpha / d as f64).min(1.0))?;
    let b = system.level()?;
    let b1 = regularity_scan(&system.dilate(factor.clone())?, d, consts)
        .map_err(Error::stage("regularize B'"))?
        .system;
    let d1 = b1.dim_for_bounds();
    let factor2 = exact::snap((cfg.scale_c * alpha / d1 as f64).min(1.0))?;
    let b2 = regularity_scan(&b1.dilate(factor2)?, d1, consts)
        .map_err(Error::stage("regularize B''"))?
        .system;
    let (l1, l2) = (b1.level()?, b2.level()?);
    match two_scale_select(a, &b, &l1, &l2, cfg.theta).map_err(Error::stage("two-scale"))? {
        TwoScale::Increment { which, x, .. } => {
            let next = if which == 1 { b1 } else { b2 };
            Ok((format!("increment_b{which}"), x, next))
        }
        TwoScale::Centers { x, .. } => {
            let shifted = a.translate(spec.neg(x));
            let a1 = shifted.intersection(&l1)?;
            let a2 = shifted.intersection(&l2)?;
            if a1.is_empty() || a2.is_empty() {
                return Err(Error::SearchExhausted("empty localized sets".into()));
            }
            let hat_b2 = b2.image(Endomorphism::Scalar(-2))?;
            let hat_a2 = a2.dilate(-2);
            let alpha1 = a1.len() as f64 / l1.len() as f64;
            let eta = (cfg.eta_factor * alpha1.sqrt()).min(1.0);
            let ann = build_annihilator(&hat_b2, &hat_a2, eta, 0.5, consts, &cfg.probe)
                .map_err(Error::stage("annihilate"))?;
            let reg = regularity_scan(&ann.system, ann.system.dim_for_bounds(), consts)
                .map_err(Error::stage("regularize annihilator"))?
                .system;
            let t = reg.level()?;
            let rho = exact::snap(consts.c_step * cfg.kappa * alpha1 / d1 as f64)?;
            let w = l2_increment_step(&a1, &b1, &ann.spectrum, &t, cfg.kappa, &rho, consts)
                .map_err(Error::stage("l2 increment"))?
                .ok_or_else(|| Error::SearchExhausted("energy hypothesis not met".into()))?;
            Ok(("l2_increment".into(), spec.add(x, w.x), reg))
        }
    }
}
