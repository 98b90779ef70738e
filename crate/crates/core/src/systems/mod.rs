//! Bourgain systems: families `rho -> B_rho` of symmetric neighbourhoods of 0
//! that are nested, approximately closed under addition and covered by a
//! bounded number of translates of the half-size level.
//!
//! Concrete backends are Bohr sets and coset progressions; dilation,
//! intersection and homomorphic images build new systems from old ones. Each
//! system carries a *declared* dimension that bounds its covering numbers.
//! Realizations are computed by exact membership scans and memoized per
//! rational radius.

mod describe;
mod regularity;
mod verify;

pub use describe::SystemDescription;
pub use regularity::{
    averaging_check, is_regular, regularity_scan, AveragingReport, Regularized, RegularityViolation,
};
pub use verify::{
    bohr_density_check, covering_witness, dilation_density_check, intersection_density_check,
    verify_axioms, AxiomReport, AxiomViolation, DensityCheck,
};

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{self, Q};
use crate::group::{GroupSet, GroupSpec};

/// Frequencies and radius of a Bohr set `B(Gamma, delta)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BohrSpec {
    /// Character indices, sorted and distinct.
    pub frequencies: Vec<usize>,
    pub delta: Q,
}

/// `[-L_1, L_1] w_1 + ... + [-L_d, L_d] w_d + H`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetProgressionSpec {
    pub lengths: Vec<Q>,
    pub generators: Vec<usize>,
    pub subgroup: GroupSet,
}

/// A group endomorphism: multiplication by an integer, or an integer matrix
/// acting on coordinates (`y_i = sum_j M_ij x_j`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Endomorphism {
    Scalar(i64),
    Matrix(Vec<Vec<i64>>),
}

impl Endomorphism {
    /// Checks that the map is well defined on `spec`.
    pub fn check(&self, spec: &GroupSpec) -> Result<()> {
        let Endomorphism::Matrix(rows) = self else {
            return Ok(());
        };
        let m = spec.moduli();
        if rows.len() != m.len() || rows.iter().any(|r| r.len() != m.len()) {
            return Err(Error::InvalidArgument(format!(
                "matrix must be {0}x{0} for {spec}",
                m.len()
            )));
        }
        for (i, row) in rows.iter().enumerate() {
            for (j, &a) in row.iter().enumerate() {
                // x_j is only defined mod m_j, so a * m_j must vanish mod m_i.
                if (a as i128 * m[j] as i128).rem_euclid(m[i] as i128) != 0 {
                    return Err(Error::InvalidArgument(format!(
                        "entry ({i},{j}) = {a} does not define a homomorphism Z/{} -> Z/{}",
                        m[j], m[i]
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn apply(&self, spec: &GroupSpec, x: usize) -> usize {
        match self {
            Endomorphism::Scalar(k) => spec.scale(*k, x),
            Endomorphism::Matrix(rows) => {
                let xs = spec.element(x).coords;
                let coords: Vec<i64> = rows
                    .iter()
                    .zip(spec.moduli())
                    .map(|(row, &mi)| {
                        let s: i128 = row.iter().zip(&xs).map(|(&a, &c)| a as i128 * c as i128).sum();
                        s.rem_euclid(mi as i128) as i64
                    })
                    .collect();
                spec.index_from_coords(&coords).expect("reduced coordinates")
            }
        }
    }

    pub fn apply_set(&self, set: &GroupSet) -> GroupSet {
        let spec = set.spec();
        GroupSet::from_indices(spec, set.iter().map(|x| self.apply(spec, x)))
    }
}

#[derive(Clone, Debug)]
pub enum Backend {
    Bohr(BohrSpec),
    CosetProgression(CosetProgressionSpec),
    /// `B_rho = H` for every radius.
    Subgroup(GroupSet),
    Dilate { child: BourgainSystem, lambda: Q },
    Intersect(Vec<BourgainSystem>),
    Image { child: BourgainSystem, map: Endomorphism },
    /// An explicit step family: `B_rho` is the set attached to the largest
    /// listed radius `<= rho` (or the smallest one). Used to exercise the
    /// axiom checker on families that are not Bourgain systems.
    Levels(Vec<(Q, GroupSet)>),
}

struct Inner {
    spec: GroupSpec,
    backend: Backend,
    dim: usize,
    cache: RwLock<HashMap<Q, GroupSet>>,
}

/// A lazily realized Bourgain system. Cloning is cheap and clones share the
/// realization cache.
#[derive(Clone)]
pub struct BourgainSystem(Arc<Inner>);

impl fmt::Debug for BourgainSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BourgainSystem[{}; d = {}; {}]", self.0.spec, self.0.dim, self.kind())
    }
}

fn positive(x: &Q, what: &str) -> Result<()> {
    if !exact::is_positive(x) {
        return Err(Error::InvalidArgument(format!("{what} must be positive, got {}", exact::render(x))));
    }
    Ok(())
}

impl BourgainSystem {
    fn make(spec: &GroupSpec, backend: Backend, dim: usize) -> Self {
        Self(Arc::new(Inner {
            spec: spec.clone(),
            backend,
            dim,
            cache: RwLock::new(HashMap::new()),
        }))
    }

    /// `B(Gamma, delta)` with declared dimension `6 |Gamma|`.
    pub fn bohr(spec: &GroupSpec, frequencies: &[usize], delta: Q) -> Result<Self> {
        positive(&delta, "Bohr radius")?;
        if let Some(&g) = frequencies.iter().find(|&&g| g >= spec.order()) {
            return Err(Error::InvalidArgument(format!("character index {g} out of range")));
        }
        let mut freqs = frequencies.to_vec();
        freqs.sort_unstable();
        freqs.dedup();
        let dim = 6 * freqs.len();
        Ok(Self::make(
            spec,
            Backend::Bohr(BohrSpec {
                frequencies: freqs,
                delta,
            }),
            dim,
        ))
    }

    pub fn bohr_f64(spec: &GroupSpec, frequencies: &[usize], delta: f64) -> Result<Self> {
        Self::bohr(spec, frequencies, exact::snap(delta)?)
    }

    /// Coset progression `M(L, w, H)` with declared dimension `3d`.
    pub fn coset_progression(
        spec: &GroupSpec,
        lengths: Vec<Q>,
        generators: Vec<usize>,
        subgroup: GroupSet,
    ) -> Result<Self> {
        if lengths.is_empty() || lengths.len() != generators.len() {
            return Err(Error::InvalidArgument(
                "coset progression needs d >= 1 lengths and as many generators".into(),
            ));
        }
        if lengths.iter().any(|l| l < &Q::zero()) {
            return Err(Error::InvalidArgument("progression lengths must be nonnegative".into()));
        }
        if generators.iter().any(|&w| w >= spec.order()) {
            return Err(Error::InvalidArgument("generator out of range".into()));
        }
        if subgroup.spec() != spec {
            return Err(Error::SpecMismatch(spec.to_string(), subgroup.spec().to_string()));
        }
        if !subgroup.is_subgroup() {
            return Err(Error::InvalidArgument("H is not a subgroup".into()));
        }
        let dim = 3 * lengths.len();
        Ok(Self::make(
            spec,
            Backend::CosetProgression(CosetProgressionSpec {
                lengths,
                generators,
                subgroup,
            }),
            dim,
        ))
    }

    /// The constant family `B_rho = H`, declared dimension 0.
    pub fn subgroup(h: GroupSet) -> Result<Self> {
        if !h.is_subgroup() {
            return Err(Error::InvalidArgument("subgroup system needs a subgroup".into()));
        }
        let spec = h.spec().clone();
        Ok(Self::make(&spec, Backend::Subgroup(h), 0))
    }

    pub fn whole_group(spec: &GroupSpec) -> Self {
        Self::subgroup(GroupSet::full(spec)).expect("G is a subgroup")
    }

    /// An explicit family of sets with a declared dimension (see [`Backend::Levels`]).
    pub fn from_levels(spec: &GroupSpec, mut levels: Vec<(Q, GroupSet)>, dim: usize) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidArgument("explicit family needs at least one level".into()));
        }
        for (r, s) in &levels {
            positive(r, "level radius")?;
            if s.spec() != spec {
                return Err(Error::SpecMismatch(spec.to_string(), s.spec().to_string()));
            }
        }
        levels.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(Self::make(spec, Backend::Levels(levels), dim))
    }

    /// `(B_lambda)_rho = B_{lambda rho}` for `0 < lambda <= 1`. The dilation
    /// density bound `|B_lambda| >= (lambda/2)^d |B|` is checked on the spot.
    pub fn dilate(&self, lambda: Q) -> Result<Self> {
        positive(&lambda, "dilation factor")?;
        if lambda > Q::one() {
            return Err(Error::InvalidArgument(format!(
                "dilation factor must lie in (0,1], got {}",
                exact::render(&lambda)
            )));
        }
        if lambda.is_one() {
            return Ok(self.clone());
        }
        let out = match &self.0.backend {
            Backend::Dilate { child, lambda: inner } => {
                Self::make(&self.0.spec, Backend::Dilate { child: child.clone(), lambda: inner * &lambda }, self.0.dim)
            }
            _ => Self::make(
                &self.0.spec,
                Backend::Dilate {
                    child: self.clone(),
                    lambda: lambda.clone(),
                },
                self.0.dim,
            ),
        };
        if !matches!(self.0.backend, Backend::Levels(_)) {
            let check = dilation_density_check(self, &lambda)?;
            if !check.holds {
                return Err(Error::Critical(format!("dilation density bound failed: {check:?}")));
            }
        }
        Ok(out)
    }

    pub fn dilate_f64(&self, lambda: f64) -> Result<Self> {
        self.dilate(exact::snap(lambda)?)
    }

    /// Intersection of at least two systems, declared dimension `2 sum d_i`.
    /// The density bound `4^(-sum d_i) prod b_i` is checked on the spot.
    pub fn intersect(systems: &[BourgainSystem]) -> Result<Self> {
        if systems.len() < 2 {
            return Err(Error::InvalidArgument("intersection needs at least two systems".into()));
        }
        let spec = systems[0].spec().clone();
        for s in systems {
            if s.spec() != &spec {
                return Err(Error::SpecMismatch(spec.to_string(), s.spec().to_string()));
            }
        }
        let dim = 2 * systems.iter().map(|s| s.0.dim).sum::<usize>();
        let out = Self::make(&spec, Backend::Intersect(systems.to_vec()), dim);
        let check = intersection_density_check(systems)?;
        if !check.holds {
            return Err(Error::Critical(format!("intersection density bound failed: {check:?}")));
        }
        Ok(out)
    }

    /// `phi(B) = (phi(B_rho))_rho`, same declared dimension.
    pub fn image(&self, map: Endomorphism) -> Result<Self> {
        map.check(&self.0.spec)?;
        Ok(Self::make(
            &self.0.spec,
            Backend::Image {
                child: self.clone(),
                map,
            },
            self.0.dim,
        ))
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.0.spec
    }

    pub fn backend(&self) -> &Backend {
        &self.0.backend
    }

    pub fn declared_dimension(&self) -> usize {
        self.0.dim
    }

    /// Declared dimension clamped below by 1, for formulas that divide by `d`.
    pub fn dim_for_bounds(&self) -> usize {
        self.0.dim.max(1)
    }

    pub fn kind(&self) -> &'static str {
        match &self.0.backend {
            Backend::Bohr(_) => "bohr",
            Backend::CosetProgression(_) => "cprog",
            Backend::Subgroup(_) => "subgroup",
            Backend::Dilate { .. } => "dilate",
            Backend::Intersect(_) => "intersect",
            Backend::Image { .. } => "image",
            Backend::Levels(_) => "levels",
        }
    }

    /// `B_rho`, memoized.
    pub fn realize(&self, rho: &Q) -> Result<GroupSet> {
        positive(rho, "radius")?;
        if let Some(s) = self.0.cache.read().expect("cache lock").get(rho) {
            return Ok(s.clone());
        }
        let set = self.compute(rho)?;
        self.0
            .cache
            .write()
            .expect("cache lock")
            .entry(rho.clone())
            .or_insert_with(|| set.clone());
        Ok(set)
    }

    pub fn realize_f64(&self, rho: f64) -> Result<GroupSet> {
        self.realize(&exact::snap(rho)?)
    }

    /// `B = B_1`.
    pub fn level(&self) -> Result<GroupSet> {
        self.realize(&Q::one())
    }

    /// `b = |B_1| / |G|`.
    pub fn density(&self) -> Result<f64> {
        Ok(self.level()?.density())
    }

    /// Radii currently held in the realization cache, sorted.
    pub fn cached_radii(&self) -> Vec<Q> {
        let mut r: Vec<Q> = self.0.cache.read().expect("cache lock").keys().cloned().collect();
        r.sort();
        r
    }

    fn compute(&self, rho: &Q) -> Result<GroupSet> {
        let spec = &self.0.spec;
        Ok(match &self.0.backend {
            Backend::Bohr(b) => realize_bohr(spec, &b.frequencies, &(rho * &b.delta)),
            Backend::CosetProgression(c) => {
                let mut acc = c.subgroup.clone();
                for (l, &w) in c.lengths.iter().zip(&c.generators) {
                    let k = exact::floor_usize(&(rho * l));
                    let ord = spec.element_order(w);
                    let terms: Vec<usize> = if k >= ord {
                        (0..ord as i64).map(|n| spec.scale(n, w)).collect()
                    } else {
                        (-(k as i64)..=k as i64).map(|n| spec.scale(n, w)).collect()
                    };
                    acc = acc.sum(&GroupSet::from_indices(spec, terms))?;
                }
                acc
            }
            Backend::Subgroup(h) => h.clone(),
            Backend::Dilate { child, lambda } => child.realize(&(rho * lambda))?,
            Backend::Intersect(children) => {
                let mut acc = children[0].realize(rho)?;
                for c in &children[1..] {
                    acc = acc.intersection(&c.realize(rho)?)?;
                }
                acc
            }
            Backend::Image { child, map } => map.apply_set(&child.realize(rho)?),
            Backend::Levels(levels) => levels
                .iter()
                .rev()
                .find(|(r, _)| r <= rho)
                .unwrap_or(&levels[0])
                .1
                .clone(),
        })
    }

    pub fn describe(&self) -> Result<SystemDescription> {
        SystemDescription::of(self)
    }
}

/// Exact Bohr membership: `||gamma(x)||_U <= radius` for all frequencies,
/// compared on the common denominator `E` as `dist <= floor(radius E)`.
pub fn realize_bohr(spec: &GroupSpec, freqs: &[usize], radius: &Q) -> GroupSet {
    let e = spec.exponent();
    let thr_q = radius * Q::from_integer(BigInt::from(e));
    let thr = exact::floor_usize(&thr_q);
    if thr >= e / 2 {
        return GroupSet::full(spec);
    }
    GroupSet::from_indices(
        spec,
        (0..spec.order()).filter(|&x| freqs.iter().all(|&g| spec.circle_distance(g, x) <= thr)),
    )
}
