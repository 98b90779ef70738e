use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Pow};
use serde::{Deserialize, Serialize};

use super::{Backend, BourgainSystem};
use crate::error::{Error, Result};
use crate::exact::{self, Q};
use crate::group::GroupSet;

/// A single failed axiom, with a witness element where one exists.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "axiom", rename_all = "snake_case")]
pub enum AxiomViolation {
    ContainsZero { rho: String },
    Symmetric { rho: String, witness: String },
    Nested { rho: String, rho2: String, witness: String },
    Additive { rho: String, rho2: String, witness: String },
    Covering { rho: String, detail: String },
    CoveringBudget { rho: String, size: usize, budget: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub radii: Vec<String>,
    pub budget: usize,
    /// `(rho, |X_rho|)` for every radius where a covering was found.
    pub cover_sizes: Vec<(String, usize)>,
    pub violations: Vec<AxiomViolation>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the five axioms on a radius grid: `0 in B_rho`, `-B_rho = B_rho`,
/// nesting, `B_rho + B_rho' ⊆ B_{rho + rho'}`, and a covering
/// `B_{2 rho} ⊆ X + B_rho` with `|X| <= 2^budget`.
pub fn verify_axioms(system: &BourgainSystem, radii: &[Q], budget: usize) -> Result<AxiomReport> {
    let mut radii: Vec<Q> = radii.to_vec();
    radii.sort();
    radii.dedup();
    let spec = system.spec();
    let mut violations = Vec::new();
    let mut cover_sizes = Vec::new();
    let levels: Vec<GroupSet> = radii.iter().map(|r| system.realize(r)).collect::<Result<_>>()?;
    for (r, b) in radii.iter().zip(&levels) {
        let rs = exact::render(r);
        if !b.contains(0) {
            violations.push(AxiomViolation::ContainsZero { rho: rs.clone() });
        }
        if let Some(x) = b.first_outside(&b.negate()) {
            violations.push(AxiomViolation::Symmetric {
                rho: rs.clone(),
                witness: spec.render(x),
            });
        }
        match covering_witness(system, r) {
            Ok(x) => {
                cover_sizes.push((rs.clone(), x.len()));
                if !fits_budget(x.len(), budget) {
                    violations.push(AxiomViolation::CoveringBudget {
                        rho: rs,
                        size: x.len(),
                        budget,
                    });
                }
            }
            Err(e) => violations.push(AxiomViolation::Covering {
                rho: rs,
                detail: e.to_string(),
            }),
        }
    }
    for i in 0..radii.len() {
        for j in i..radii.len() {
            let (ri, rj) = (exact::render(&radii[i]), exact::render(&radii[j]));
            if j > i {
                if let Some(x) = levels[i].first_outside(&levels[j]) {
                    violations.push(AxiomViolation::Nested {
                        rho: ri.clone(),
                        rho2: rj.clone(),
                        witness: spec.render(x),
                    });
                }
            }
            let sum = levels[i].sum(&levels[j])?;
            let big = system.realize(&(&radii[i] + &radii[j]))?;
            if let Some(x) = sum.first_outside(&big) {
                violations.push(AxiomViolation::Additive {
                    rho: ri,
                    rho2: rj,
                    witness: spec.render(x),
                });
            }
        }
    }
    Ok(AxiomReport {
        radii: radii.iter().map(exact::render).collect(),
        budget,
        cover_sizes,
        violations,
    })
}

fn fits_budget(size: usize, budget: usize) -> bool {
    budget >= usize::BITS as usize - 1 || size <= 1usize << budget
}

fn covers(system: &BourgainSystem, rho: &Q, x: &GroupSet) -> Result<bool> {
    let big = system.realize(&(rho * Q::from_integer(BigInt::from(2))))?;
    let small = system.realize(rho)?;
    Ok(big.is_subset(&x.sum(&small)?))
}

/// A verified covering set `X` with `B_{2 rho} ⊆ X + B_rho`.
///
/// Two candidates are tried and the smaller verified one is returned: the
/// greedy Ruzsa cover of `B_{2 rho}` by translates of `B_{rho/2}`, and a
/// structural cover read off from the backend.
pub fn covering_witness(system: &BourgainSystem, rho: &Q) -> Result<GroupSet> {
    let mut best: Option<GroupSet> = None;
    let mut consider = |x: GroupSet| -> Result<()> {
        if best.as_ref().is_some_and(|b| b.len() <= x.len()) {
            return Ok(());
        }
        if covers(system, rho, &x)? {
            best = Some(x);
        }
        Ok(())
    };
    if let Some(x) = structural_witness(system, rho)? {
        consider(x)?;
    }
    let half = system.realize(&(rho / Q::from_integer(BigInt::from(2))))?;
    if !half.is_empty() {
        let big = system.realize(&(rho * Q::from_integer(BigInt::from(2))))?;
        consider(big.ruzsa_cover(&half)?)?;
    }
    best.ok_or_else(|| {
        Error::SearchExhausted(format!(
            "no covering of B_{{2rho}} by translates of B_rho at rho = {}",
            exact::render(rho)
        ))
    })
}

fn structural_witness(system: &BourgainSystem, rho: &Q) -> Result<Option<GroupSet>> {
    let spec = system.spec();
    Ok(match system.backend() {
        Backend::Subgroup(_) => Some(GroupSet::singleton(spec, 0)),
        Backend::CosetProgression(c) => {
            let mut x = GroupSet::singleton(spec, 0);
            for (l, &w) in c.lengths.iter().zip(&c.generators) {
                let k = exact::floor_usize(&(rho * l)) as i64;
                let step = 2 * k + 1;
                let t = GroupSet::from_indices(spec, [0, spec.scale(step, w), spec.scale(-step, w)]);
                x = x.sum(&t)?;
            }
            Some(x)
        }
        Backend::Dilate { child, lambda } => Some(covering_witness(child, &(rho * lambda))?),
        Backend::Image { child, map } => Some(map.apply_set(&covering_witness(child, rho)?)),
        Backend::Intersect(children) => intersection_witness(system, children, rho)?,
        Backend::Bohr(_) | Backend::Levels(_) => None,
    })
}

/// Representative points: each child satisfies `B_{2rho} ⊆ T_i + B_{rho/2}`
/// with `T_i = X_rho + X_{rho/2}`. Elements of the intersection at `2 rho`
/// are grouped by which translates they fall in, and one point is kept per
/// nonempty cell. Two points in a cell differ by an element of every
/// `B_{rho/2} - B_{rho/2} ⊆ B_rho`.
fn intersection_witness(
    system: &BourgainSystem,
    children: &[BourgainSystem],
    rho: &Q,
) -> Result<Option<GroupSet>> {
    let spec = system.spec();
    let half = rho / Q::from_integer(BigInt::from(2));
    let mut ts = Vec::with_capacity(children.len());
    let mut halves = Vec::with_capacity(children.len());
    for c in children {
        let (Ok(x1), Ok(x2)) = (covering_witness(c, rho), covering_witness(c, &half)) else {
            return Ok(None);
        };
        ts.push(x1.sum(&x2)?.indices());
        halves.push(c.realize(&half)?);
    }
    let big = system.realize(&(rho * Q::from_integer(BigInt::from(2))))?;
    let mut cells: HashMap<Vec<usize>, usize> = HashMap::new();
    for y in big.iter() {
        let mut sig = Vec::with_capacity(children.len());
        for (t, h) in ts.iter().zip(&halves) {
            match t.iter().position(|&ti| h.contains(spec.sub(y, ti))) {
                Some(k) => sig.push(k),
                None => return Ok(None),
            }
        }
        cells.entry(sig).or_insert(y);
    }
    Ok(Some(GroupSet::from_indices(spec, cells.into_values())))
}

/// Outcome of an exact density inequality `lhs >= rhs`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// `|B(Gamma, delta)| >= delta^|Gamma| |G|` (for `delta <= 1`).
pub fn bohr_density_check(system: &BourgainSystem) -> Result<DensityCheck> {
    let Backend::Bohr(b) = system.backend() else {
        return Err(Error::InvalidArgument("Bohr density check needs a Bohr system".into()));
    };
    let delta = if b.delta > Q::one() { Q::one() } else { b.delta.clone() };
    let size = system.level()?.len();
    let n = system.spec().order();
    let rhs: Q = Pow::pow(&delta, b.frequencies.len()) * Q::from_integer(BigInt::from(n));
    let lhs = Q::from_integer(BigInt::from(size));
    Ok(DensityCheck {
        lhs: exact::to_f64(&lhs),
        rhs: exact::to_f64(&rhs),
        holds: lhs >= rhs,
    })
}

/// `|B_lambda| >= (lambda / 2)^d |B|`.
pub fn dilation_density_check(system: &BourgainSystem, lambda: &Q) -> Result<DensityCheck> {
    let d = system.declared_dimension();
    let b = system.level()?.len();
    let bl = system.realize(lambda)?.len();
    let factor = lambda / Q::from_integer(BigInt::from(2));
    let rhs: Q = Pow::pow(&factor, d) * Q::from_integer(BigInt::from(b));
    let lhs = Q::from_integer(BigInt::from(bl));
    Ok(DensityCheck {
        lhs: exact::to_f64(&lhs),
        rhs: exact::to_f64(&rhs),
        holds: lhs >= rhs,
    })
}

/// `b_{intersection} >= 4^(-sum d_i) prod b_i`, in relative densities.
pub fn intersection_density_check(systems: &[BourgainSystem]) -> Result<DensityCheck> {
    let n = Q::from_integer(BigInt::from(systems[0].spec().order()));
    let mut inter = systems[0].level()?;
    let mut prod = Q::one();
    let mut dsum = 0usize;
    for s in systems {
        let l = s.level()?;
        prod *= Q::from_integer(BigInt::from(l.len())) / &n;
        dsum += s.declared_dimension();
        inter = inter.intersection(&l)?;
    }
    let rhs = prod * exact::pow2(-2 * dsum as i64);
    let lhs = Q::from_integer(BigInt::from(inter.len())) / &n;
    Ok(DensityCheck {
        lhs: exact::to_f64(&lhs),
        rhs: exact::to_f64(&rhs),
        holds: lhs >= rhs,
    })
}
