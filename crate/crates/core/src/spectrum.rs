//! Annihilation of character sets, dissociation probing, the Chang budget and
//! the construction of Bourgain systems annihilating a large spectrum.

use num_complex::Complex64;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::constants::{ell, Constants};
use crate::error::{Error, Result};
use crate::exact::{self, Q};
use crate::group::{GroupSet, GroupSpec};
use crate::harmonic::Measure;
use crate::systems::BourgainSystem;

/// Result of `max_{gamma in Delta, t in T} |1 - gamma(t)| <= nu`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Annihilation {
    pub holds: bool,
    pub max_deviation: f64,
    /// `(gamma, t)` attaining the maximum.
    pub witness: Option<(usize, usize)>,
}

/// `|1 - e(r/E)| = 2 sin(pi r / E)` for the circle distance `r`.
fn chord(spec: &GroupSpec, r: usize) -> f64 {
    2.0 * (std::f64::consts::PI * r as f64 / spec.exponent() as f64).sin()
}

pub fn annihilation_check(spec: &GroupSpec, delta: &[usize], t: &GroupSet, nu: f64) -> Annihilation {
    // |1 - gamma(t)| is increasing in the circle distance, so the maximum is
    // found on integers.
    let mut best: Option<(usize, usize, usize)> = None;
    for &g in delta {
        for x in t.iter() {
            let r = spec.circle_distance(g, x);
            if best.is_none_or(|(br, _, _)| r > br) {
                best = Some((r, g, x));
            }
        }
    }
    match best {
        None => Annihilation {
            holds: true,
            max_deviation: 0.0,
            witness: None,
        },
        Some((r, g, x)) => {
            let dev = chord(spec, r);
            Annihilation {
                holds: dev <= nu,
                max_deviation: dev,
                witness: Some((g, x)),
            }
        }
    }
}

/// Search parameters for the dissociation probe.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProbeConfig {
    pub theta: f64,
    /// Phase-grid resolution for starting points.
    pub q: usize,
    pub restarts: usize,
    pub sweeps: usize,
    pub seed: u64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self {
            theta: 1.0,
            q: 16,
            restarts: 8,
            sweeps: 50,
            seed: 0x5eed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Dissociation {
    /// `int prod (1 + re[w(l) l]) dmu > e^theta` at the stated phases.
    NotDissociated { omega: Vec<(f64, f64)>, value: f64 },
    /// No violation found; the best value reached.
    PlausiblyDissociated { max_found: f64 },
}

impl Dissociation {
    pub fn is_certified_not_dissociated(&self) -> bool {
        matches!(self, Dissociation::NotDissociated { .. })
    }
}

/// `E_x mu(x) prod_j (1 + re[w_j lambda_j(x)])`.
pub fn dissociation_integral(spec: &GroupSpec, lambda: &[usize], mu: &Measure, omega: &[Complex64]) -> f64 {
    let f = mu.function();
    let n = spec.order() as f64;
    f.support()
        .iter()
        .map(|x| {
            let p: f64 = lambda
                .iter()
                .zip(omega)
                .map(|(&l, w)| 1.0 + (w * spec.char_value(l, x)).re)
                .product();
            f.get(x).re * p
        })
        .sum::<f64>()
        / n
}

/// Looks for phases `w` with `int prod (1 + re[w(l) l]) dmu > e^theta`.
///
/// Starting points are the constant phase 1 and random points of the
/// `q`-th roots of unity; each is improved by coordinate ascent, where the
/// optimal unit phase for one coordinate is available in closed form. The
/// search is one-sided: a violation is re-evaluated before it is reported.
pub fn dissociation_probe(spec: &GroupSpec, lambda: &[usize], mu: &Measure, cfg: &ProbeConfig) -> Result<Dissociation> {
    if lambda.is_empty() {
        return Err(Error::InvalidArgument("dissociation probe needs a nonempty set".into()));
    }
    if cfg.q < 8 {
        return Err(Error::InvalidArgument("phase grid needs q >= 8".into()));
    }
    let f = mu.function();
    let n = spec.order() as f64;
    let supp = f.support().indices();
    let weights: Vec<f64> = supp.iter().map(|&x| f.get(x).re / n).collect();
    let chars: Vec<Vec<Complex64>> = lambda
        .iter()
        .map(|&l| supp.iter().map(|&x| spec.char_value(l, x)).collect())
        .collect();
    let k = lambda.len();
    let target = cfg.theta.exp();
    let mut best = f64::NEG_INFINITY;
    let mut best_omega = vec![Complex64::one(); k];

    for restart in 0..cfg.restarts.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ (restart as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
        let mut omega: Vec<Complex64> = if restart == 0 {
            vec![Complex64::one(); k]
        } else {
            (0..k)
                .map(|_| {
                    let j = rng.gen_range(0..cfg.q);
                    Complex64::from_polar(1.0, std::f64::consts::TAU * j as f64 / cfg.q as f64)
                })
                .collect()
        };
        let mut factors: Vec<Vec<f64>> = (0..k)
            .map(|j| chars[j].iter().map(|c| 1.0 + (omega[j] * c).re).collect())
            .collect();
        let mut value = total(&weights, &factors);
        for _ in 0..cfg.sweeps {
            let before = value;
            for j in 0..k {
                let mut z = Complex64::new(0.0, 0.0);
                for (i, w) in weights.iter().enumerate() {
                    let rest: f64 = (0..k).filter(|&l| l != j).map(|l| factors[l][i]).product();
                    z += chars[j][i] * (w * rest);
                }
                if z.norm() > 1e-300 {
                    omega[j] = z.conj() / z.norm();
                    for (i, c) in chars[j].iter().enumerate() {
                        factors[j][i] = 1.0 + (omega[j] * c).re;
                    }
                }
            }
            value = total(&weights, &factors);
            if value <= before + 1e-13 {
                break;
            }
        }
        if value > best {
            best = value;
            best_omega = omega;
        }
        if best > target {
            break;
        }
    }
    if best > target {
        let exact_value = dissociation_integral(spec, lambda, mu, &best_omega);
        if exact_value > target {
            return Ok(Dissociation::NotDissociated {
                omega: best_omega.iter().map(|w| (w.re, w.im)).collect(),
                value: exact_value,
            });
        }
    }
    Ok(Dissociation::PlausiblyDissociated { max_found: best })
}

fn total(weights: &[f64], factors: &[Vec<f64>]) -> f64 {
    weights
        .iter()
        .enumerate()
        .map(|(i, w)| w * factors.iter().map(|f| f[i]).product::<f64>())
        .sum()
}

/// Greedily grows a subset of `delta` that the probe cannot refute as
/// dissociated. Returns it with `m = max(|Lambda|, 1)`.
pub fn greedy_dissociated(
    spec: &GroupSpec,
    delta: &[usize],
    mu: &Measure,
    cfg: &ProbeConfig,
) -> Result<(Vec<usize>, usize)> {
    let mut lambda: Vec<usize> = Vec::new();
    for &g in delta {
        lambda.push(g);
        if dissociation_probe(spec, &lambda, mu, cfg)?.is_certified_not_dissociated() {
            lambda.pop();
        }
    }
    let m = lambda.len().max(1);
    Ok((lambda, m))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChangReport {
    pub eta: f64,
    pub tau: f64,
    pub m: usize,
    /// `m eta^2 / l(tau)`.
    pub ratio: f64,
    pub budget: f64,
    pub holds: bool,
}

/// `m <= C eta^-2 l(tau)`, reported through the ratio `m eta^2 / l(tau)`.
pub fn chang_report(eta: f64, tau: f64, m: usize, c_chang: f64) -> Result<ChangReport> {
    if !(eta > 0.0 && eta <= 1.0) || !(tau > 0.0 && tau <= 1.0) {
        return Err(Error::InvalidArgument(format!("need eta, tau in (0,1], got {eta}, {tau}")));
    }
    let ratio = m as f64 * eta * eta / ell(tau);
    Ok(ChangReport {
        eta,
        tau,
        m,
        ratio,
        budget: c_chang,
        holds: ratio <= c_chang,
    })
}

/// A Bourgain system with dimension at most `m` and density at least
/// `exp(-C m log m)`.
#[derive(Clone, Debug)]
pub struct ControlledSystem {
    pub system: BourgainSystem,
    pub m: usize,
    pub c_ctl: f64,
    pub density: f64,
}

impl ControlledSystem {
    pub fn new(system: BourgainSystem, c_ctl: f64) -> Result<Self> {
        let m = system.dim_for_bounds();
        let density = system.density()?;
        let floor = (-c_ctl * m as f64 * (m as f64).ln()).exp();
        if density < floor {
            return Err(Error::Critical(format!(
                "system of dimension {m} has density {density} < exp(-{c_ctl} m log m) = {floor}"
            )));
        }
        Ok(Self {
            system,
            m,
            c_ctl,
            density,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnihilatorTrace {
    pub spectrum_size: usize,
    pub dissociated_size: usize,
    pub m: usize,
    pub retries: u32,
    pub c_ann: String,
    pub nu: f64,
    pub max_deviation: f64,
    /// `nu - max_deviation`.
    pub margin: f64,
    pub level_size: usize,
    pub chang: ChangReport,
}

#[derive(Clone, Debug)]
pub struct Annihilator {
    pub system: BourgainSystem,
    pub controlled: ControlledSystem,
    pub spectrum: Vec<usize>,
    pub lambda: Vec<usize>,
    pub m: usize,
    pub trace: AnnihilatorTrace,
}

/// Builds `B_{c nu / d^2 m} ∧ B~_nu` with `B~ = B(Lambda, c/m)`, where
/// `Lambda` is a greedy dissociated subset of `Spec_eta(mu_X)`, and checks
/// that the result `nu`-annihilates the spectrum. On failure `c` is halved.
pub fn build_annihilator(
    base: &BourgainSystem,
    x: &GroupSet,
    eta: f64,
    nu: f64,
    consts: &Constants,
    probe: &ProbeConfig,
) -> Result<Annihilator> {
    if !(nu > 0.0 && nu <= 2.0) {
        return Err(Error::InvalidArgument(format!("nu must lie in (0,2], got {nu}")));
    }
    let spec = base.spec();
    let b = base.level()?;
    if x.is_empty() {
        return Err(Error::Precondition("X must be nonempty".into()));
    }
    if !x.is_subset(&b) {
        return Err(Error::Precondition("X must lie inside B".into()));
    }
    let mu_x = Measure::uniform(x)?;
    let spectrum = mu_x.function().large_spectrum(eta)?;
    let mu_b = Measure::uniform(&b)?;
    let (lambda, m) = greedy_dissociated(spec, &spectrum, &mu_b, probe)?;
    let tau = x.len() as f64 / b.len() as f64;
    let chang = chang_report(eta, tau, m, consts.c_chang)?;
    let d = base.dim_for_bounds() as i64;
    let nu_q = exact::snap(nu)?;
    let nu_dilate = if nu_q > Q::one() { Q::one() } else { nu_q.clone() };

    let mut c = exact::snap(consts.c_ann)?;
    let mut last = None;
    for retry in 0..=consts.c_ann_halvings {
        let radius = &c / exact::qi(m as i64);
        let tilde = BourgainSystem::bohr(spec, &lambda, radius)?;
        let system = if nu >= 2.0 {
            base.clone()
        } else {
            let mut scale = &c * &nu_q / exact::qi(d * d * m as i64);
            if scale > Q::one() {
                scale = Q::one();
            }
            BourgainSystem::intersect(&[base.dilate(scale)?, tilde.dilate(nu_dilate.clone())?])?
        };
        let level = system.level()?;
        let check = annihilation_check(spec, &spectrum, &level, nu);
        if check.holds {
            let controlled = ControlledSystem::new(tilde, consts.c_ctl)?;
            let trace = AnnihilatorTrace {
                spectrum_size: spectrum.len(),
                dissociated_size: lambda.len(),
                m,
                retries: retry,
                c_ann: exact::render(&c),
                nu,
                max_deviation: check.max_deviation,
                margin: nu - check.max_deviation,
                level_size: level.len(),
                chang,
            };
            return Ok(Annihilator {
                system,
                controlled,
                spectrum,
                lambda,
                m,
                trace,
            });
        }
        last = Some(check);
        c /= exact::qi(2);
    }
    Err(Error::SearchExhausted(format!(
        "annihilator post-check failed after {} halvings of c_ann; last check {last:?}",
        consts.c_ann_halvings
    )))
}
