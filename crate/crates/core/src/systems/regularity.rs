use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::BourgainSystem;
use crate::constants::Constants;
use crate::error::{Error, Result};
use crate::exact::{self, Q};
use crate::harmonic::Measure;

/// Worst grid point of a failed regularity check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularityViolation {
    pub lambda: String,
    pub rho: String,
    /// `|B_{1+rho}| / |B|`.
    pub ratio: f64,
    /// `C0 |rho| d`.
    pub allowance: f64,
}

/// A regular dilate `B_lambda` of a system.
#[derive(Clone, Debug)]
pub struct Regularized {
    pub system: BourgainSystem,
    pub lambda: Q,
    pub regular_at_one: bool,
    pub lambdas_tried: usize,
}

fn grid_half(consts: &Constants) -> Result<i64> {
    let p = consts.regularity_points;
    if p < 3 || p % 2 == 0 {
        return Err(Error::InvalidArgument(format!(
            "regularity grid needs an odd number >= 3 of points, got {p}"
        )));
    }
    Ok(((p - 1) / 2) as i64)
}

/// Checks `1 - C0|rho|d <= |B_{1+rho}|/|B| <= 1 + C0|rho|d` on a symmetric
/// grid of `regularity_points` radii in `[-1/(C0 d), 1/(C0 d)]`.
///
/// On the grid `C0 |rho| d` is exactly `k/h`, so the test is integral.
pub fn is_regular(
    system: &BourgainSystem,
    d: usize,
    consts: &Constants,
) -> Result<(bool, Option<RegularityViolation>)> {
    if d == 0 {
        return Err(Error::InvalidArgument("regularity needs d >= 1".into()));
    }
    let h = grid_half(consts)?;
    let c0 = exact::snap(consts.c0)?;
    if !c0.is_positive() {
        return Err(Error::InvalidArgument("C0 must be positive".into()));
    }
    let base = system.level()?.len() as i64;
    let unit = Q::one() / (Q::from_integer(BigInt::from(h * d as i64)) * &c0);
    let mut worst: Option<RegularityViolation> = None;
    let mut worst_excess = 0.0f64;
    for j in -h..=h {
        if j == 0 {
            continue;
        }
        let rho = &unit * Q::from_integer(BigInt::from(j));
        let radius = Q::one() + &rho;
        if !radius.is_positive() {
            continue;
        }
        let s = system.realize(&radius)?.len() as i64;
        let k = j.abs();
        let ok = (h - k) as i128 * base as i128 <= h as i128 * s as i128
            && h as i128 * s as i128 <= (h + k) as i128 * base as i128;
        if !ok {
            let ratio = s as f64 / base as f64;
            let allowance = k as f64 / h as f64;
            let excess = (ratio - 1.0).abs() - allowance;
            if worst.is_none() || excess > worst_excess {
                worst_excess = excess;
                worst = Some(RegularityViolation {
                    lambda: String::new(),
                    rho: exact::render(&rho),
                    ratio,
                    allowance,
                });
            }
        }
    }
    Ok((worst.is_none(), worst))
}

/// Finds `lambda in [1/2, 1]` with `B_lambda` regular, scanning
/// `lambda_i = 2^(-i/(P-1))` for `i = 0..P`.
pub fn regularity_scan(system: &BourgainSystem, d: usize, consts: &Constants) -> Result<Regularized> {
    let p = consts.lambda_points.max(2);
    let mut worst: Option<RegularityViolation> = None;
    for i in 0..p {
        let lambda = if i == 0 {
            Q::one()
        } else {
            exact::snap((-(i as f64) / (p - 1) as f64).exp2())?
        };
        let candidate = system.dilate(lambda.clone())?;
        let (ok, violation) = is_regular(&candidate, d, consts)?;
        if ok {
            return Ok(Regularized {
                system: candidate,
                lambda,
                regular_at_one: i == 0,
                lambdas_tried: i + 1,
            });
        }
        if let Some(mut v) = violation {
            v.lambda = exact::render(&lambda);
            let excess = (v.ratio - 1.0).abs() - v.allowance;
            if worst
                .as_ref()
                .is_none_or(|w| excess > (w.ratio - 1.0).abs() - w.allowance)
            {
                worst = Some(v);
            }
        }
    }
    Err(Error::SearchExhausted(format!(
        "no regular dilate among {p} factors in [1/2,1] (d = {d}); worst violation {worst:?}"
    )))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AveragingReport {
    pub rho: String,
    pub deviation: f64,
    pub bound: f64,
}

/// `||mu_B * mu - mu_B||_1 <= C1 rho d` for a regular system and a measure
/// supported in `B_rho`, `rho <= 1/(C1 d)`.
pub fn averaging_check(
    system: &BourgainSystem,
    d: usize,
    mu: &Measure,
    rho: &Q,
    consts: &Constants,
) -> Result<AveragingReport> {
    if d == 0 {
        return Err(Error::InvalidArgument("averaging needs d >= 1".into()));
    }
    let c1 = exact::snap(consts.c1)?;
    let limit = Q::one() / (&c1 * Q::from_integer(BigInt::from(d)));
    if rho > &limit || rho.is_zero() {
        return Err(Error::Precondition(format!(
            "rho = {} exceeds 1/(C1 d) = {}",
            exact::render(rho),
            exact::render(&limit)
        )));
    }
    let f = mu.function();
    let spec = system.spec();
    if f.spec() != spec {
        return Err(Error::SpecMismatch(spec.to_string(), f.spec().to_string()));
    }
    let small = system.realize(rho)?;
    let supp = f.support();
    if let Some(x) = supp.first_outside(&small) {
        return Err(Error::Precondition(format!(
            "measure charges {} outside B_rho",
            spec.render(x)
        )));
    }
    let (regular, _) = is_regular(system, d, consts)?;
    if !regular {
        return Err(Error::Precondition("system is not regular".into()));
    }
    let b = system.level()?;
    let n = spec.order();
    let bsize = b.len() as f64;
    // mu_B * mu (x) = |B|^-1 sum_y mu(y) 1_B(x - y), with sum_y mu(y) = |G|.
    let mut conv = vec![0.0f64; n];
    for y in supp.iter() {
        let w = f.get(y).re / bsize;
        for t in b.iter() {
            conv[spec.add(y, t)] += w;
        }
    }
    let mu_b = n as f64 / bsize;
    let deviation = conv
        .iter()
        .enumerate()
        .map(|(x, &v)| (v - if b.contains(x) { mu_b } else { 0.0 }).abs())
        .sum::<f64>()
        / n as f64;
    let bound = exact::to_f64(&(&c1 * rho)) * d as f64;
    if deviation > bound + 1e-12 {
        return Err(Error::Critical(format!(
            "averaging bound failed: {deviation} > {bound}"
        )));
    }
    Ok(AveragingReport {
        rho: exact::render(rho),
        deviation,
        bound,
    })
}
