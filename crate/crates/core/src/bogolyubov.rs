//! Dense-case Bogolyubov surrogate and sumset inequality checks.
//!
//! The surrogate takes `Gamma = Spec_{sqrt(alpha)/2}(1_A)` and the Bohr set
//! `B(Gamma, 1/4)`. On that set every character of `Gamma` has nonnegative
//! real part, so `1_A * 1_A * 1_{-A} * 1_{-A} = sum |1_A^|^4 gamma` is at least
//! `alpha^4 - (sqrt(alpha)/2 alpha)^2 alpha = (3/4) alpha^4 > 0` there.
//! Its dimension bound is `|Gamma| <= 4 / alpha^2`, much weaker than what
//! sparse small-doubling sets would allow.

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact;
use crate::group::GroupSet;
use crate::harmonic::{count_convolve, sum_counts, DenseFunction, Measure};
use crate::systems::BourgainSystem;

#[derive(Clone, Debug)]
pub struct ContainmentResult {
    pub system: BourgainSystem,
    pub frequencies: Vec<usize>,
    pub threshold: f64,
    pub verified: bool,
    pub report: ContainmentReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContainmentReport {
    pub surrogate: bool,
    pub alpha: f64,
    /// `eta = sqrt(alpha) / 2`.
    pub eta: f64,
    pub dimension: usize,
    pub dimension_bound: f64,
    pub level_size: usize,
    /// Smallest count of `1_A * 1_A * 1_-A * 1_-A` on the Bohr set.
    pub min_count: u64,
    /// `(3/4) alpha^4`.
    pub margin: f64,
}

/// `B(Spec_{sqrt(alpha)/2}(1_A), 1/4)`, verified to lie in `2A - 2A` by exact
/// representation counts.
pub fn bogolyubov_containment(a: &GroupSet) -> Result<ContainmentResult> {
    if a.is_empty() {
        return Err(Error::InvalidArgument("Bogolyubov needs a nonempty set".into()));
    }
    let spec = a.spec();
    let alpha = a.density();
    let eta = (alpha.sqrt() / 2.0).min(1.0);
    let gamma = DenseFunction::indicator(a).large_spectrum(eta)?;
    let bound = 4.0 / (alpha * alpha);
    if gamma.len() as f64 > bound {
        return Err(Error::Critical(format!(
            "spectrum has {} characters, above 4/alpha^2 = {bound}",
            gamma.len()
        )));
    }
    let system = BourgainSystem::bohr(spec, &gamma, exact::q(1, 4))?;
    let level = system.level()?;
    let r = sum_counts(a, a)?;
    let neg: Vec<u64> = (0..spec.order()).map(|x| r[spec.neg(x)]).collect();
    let four = count_convolve(spec, &r, &neg);
    let min_count = level.iter().map(|x| four[x]).min().unwrap_or(0);
    let verified = min_count > 0;
    if !verified {
        return Err(Error::Critical("Bohr set escapes 2A - 2A".into()));
    }
    Ok(ContainmentResult {
        system,
        threshold: eta * alpha,
        verified,
        report: ContainmentReport {
            surrogate: true,
            alpha,
            eta,
            dimension: gamma.len(),
            dimension_bound: bound,
            level_size: level.len(),
            min_count,
            margin: 0.75 * alpha.powi(4),
        },
        frequencies: gamma,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationResult {
    pub surrogate: bool,
    pub structure_size: usize,
    pub x: usize,
    pub count: usize,
    /// `max_x 1_A * mu_M (x)`.
    pub value: f64,
    /// `1 / 2K`.
    pub target: f64,
    pub meets_target: bool,
}

/// Takes `M` = the surrogate Bohr set and scans every translate for the
/// maximum of `1_A * mu_M`, compared with `1 / 2K`.
pub fn correlation_locate(a: &GroupSet, k: Ratio<u64>) -> Result<(CorrelationResult, GroupSet)> {
    let m = bogolyubov_containment(a)?.system.level()?;
    let r = sum_counts(a, &m)?;
    let (x, &count) = r
        .iter()
        .enumerate()
        .max_by(|p, q| p.1.cmp(q.1).then(q.0.cmp(&p.0)))
        .expect("nonempty group");
    let value = count as f64 / m.len() as f64;
    // count / |M| >= 1 / 2K  <=>  2 count numer(K) >= |M| denom(K).
    let meets = 2 * count as u128 * *k.numer() as u128 >= m.len() as u128 * *k.denom() as u128;
    Ok((
        CorrelationResult {
            surrogate: true,
            structure_size: m.len(),
            x,
            count: count as usize,
            value,
            target: 0.5 / k.to_f64().unwrap_or(f64::INFINITY),
            meets_target: meets,
        },
        m,
    ))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PluenneckeReport {
    pub a: usize,
    pub a_plus_a: usize,
    pub k: String,
    pub three_minus_two: usize,
    /// `K^5 |A|`.
    pub bound: f64,
    pub holds: bool,
}

/// `|3A - 2A| <= K^5 |A|`, checked as `|3A - 2A| |A|^4 <= |A + A|^5`.
pub fn pluennecke_chain_check(a: &GroupSet) -> Result<PluenneckeReport> {
    if a.is_empty() {
        return Err(Error::InvalidArgument("Plünnecke check needs a nonempty set".into()));
    }
    let aa = a.sum(a)?.len();
    let big = a.iterated_sumset(3, 2)?.len();
    let n = a.len();
    let lhs = BigInt::from(big) * BigInt::from(n).pow(4);
    let rhs = BigInt::from(aa).pow(5);
    let holds = lhs <= rhs;
    let k = aa as f64 / n as f64;
    let report = PluenneckeReport {
        a: n,
        a_plus_a: aa,
        k: format!("{aa}/{n}"),
        three_minus_two: big,
        bound: k.powi(5) * n as f64,
        holds,
    };
    if !holds {
        return Err(Error::Critical(format!("Plünnecke bound failed: {report:?}")));
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolderYoungReport {
    /// `<1_A * mu_V * mu_{A+A} * mu, mu_A>`.
    pub inner: f64,
    /// `||1_A * mu_V * mu_{A+A} * mu||_inf ||mu_A||_1`.
    pub holder: f64,
    /// `||1_A * mu_V||_inf`.
    pub young: f64,
    pub holds: bool,
}

/// `<1_A * mu_V * mu_{A+A} * mu, mu_A> <= ||1_A * mu_V * mu_{A+A} * mu||_inf
/// ||mu_A||_1 <= ||1_A * mu_V||_inf`.
pub fn holder_young_chain(a: &GroupSet, v: &GroupSet, mu: &Measure) -> Result<HolderYoungReport> {
    if !v.is_subgroup() {
        return Err(Error::InvalidArgument("V must be a subgroup".into()));
    }
    let one_a = DenseFunction::indicator(a);
    let mu_v = Measure::uniform(v)?;
    let mu_aa = Measure::uniform(&a.sum(a)?)?;
    let mu_a = Measure::uniform(a)?;
    let base = one_a.conv(mu_v.function())?;
    let full = base.conv(mu_aa.function())?.conv(mu.function())?;
    let inner = full.inner(mu_a.function())?.re;
    let holder = full.sup_norm() * mu_a.function().l1_norm();
    let young = base.sup_norm();
    let tol = 1e-9;
    let holds = inner <= holder + tol && holder <= young + tol;
    Ok(HolderYoungReport {
        inner,
        holder,
        young,
        holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupSpec;

    #[test]
    fn subgroup_containment_is_the_subgroup() {
        let g = GroupSpec::cyclic(24).unwrap();
        let h = GroupSet::subgroup_generated(&g, &[6]);
        let res = bogolyubov_containment(&h).unwrap();
        assert_eq!(res.system.level().unwrap(), h);
        assert_eq!(res.report.dimension, 6);
    }

    #[test]
    fn pluennecke_interval_example() {
        let g = GroupSpec::cyclic(100).unwrap();
        let r = pluennecke_chain_check(&GroupSet::from_indices(&g, 0..10)).unwrap();
        assert_eq!(r.three_minus_two, 46);
        assert!((r.bound - 247.609).abs() < 1e-3);
    }
}
