use serde::{Deserialize, Serialize};

use super::{Backend, BourgainSystem, Endomorphism};
use crate::error::{Error, Result};
use crate::exact::{serde_q, Q};
use crate::group::{Element, GroupSet, GroupSpec};

/// Recursive JSON description of a system, e.g.
/// `{"kind":"bohr","freqs":[[1]],"delta":"1/20"}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SystemDescription {
    Bohr {
        freqs: Vec<Element>,
        #[serde(with = "serde_q")]
        delta: Q,
    },
    Cprog {
        #[serde(with = "serde_q::vec")]
        lengths: Vec<Q>,
        generators: Vec<Element>,
        /// Generators of `H`.
        #[serde(default)]
        subgroup: Vec<Element>,
    },
    Subgroup {
        generators: Vec<Element>,
    },
    Dilate {
        child: Box<SystemDescription>,
        #[serde(with = "serde_q")]
        lambda: Q,
    },
    Intersect {
        children: Vec<SystemDescription>,
    },
    Image {
        child: Box<SystemDescription>,
        map: Endomorphism,
    },
}

/// A small generating set of a subgroup, chosen greedily in enumeration order.
fn generators_of(h: &GroupSet) -> Vec<usize> {
    let spec = h.spec();
    let mut gens = Vec::new();
    let mut cur = GroupSet::singleton(spec, 0);
    for x in h.iter() {
        if !cur.contains(x) {
            gens.push(x);
            cur = GroupSet::subgroup_generated(spec, &gens);
        }
    }
    gens
}

impl SystemDescription {
    pub fn of(system: &BourgainSystem) -> Result<Self> {
        let spec = system.spec();
        let el = |i: usize| spec.element(i);
        Ok(match system.backend() {
            Backend::Bohr(b) => SystemDescription::Bohr {
                freqs: b.frequencies.iter().map(|&g| el(g)).collect(),
                delta: b.delta.clone(),
            },
            Backend::CosetProgression(c) => SystemDescription::Cprog {
                lengths: c.lengths.clone(),
                generators: c.generators.iter().map(|&w| el(w)).collect(),
                subgroup: generators_of(&c.subgroup).into_iter().map(el).collect(),
            },
            Backend::Subgroup(h) => SystemDescription::Subgroup {
                generators: generators_of(h).into_iter().map(el).collect(),
            },
            Backend::Dilate { child, lambda } => SystemDescription::Dilate {
                child: Box::new(Self::of(child)?),
                lambda: lambda.clone(),
            },
            Backend::Intersect(children) => SystemDescription::Intersect {
                children: children.iter().map(Self::of).collect::<Result<_>>()?,
            },
            Backend::Image { child, map } => SystemDescription::Image {
                child: Box::new(Self::of(child)?),
                map: map.clone(),
            },
            Backend::Levels(_) => {
                return Err(Error::InvalidArgument("explicit families have no description".into()))
            }
        })
    }

    pub fn build(&self, spec: &GroupSpec) -> Result<BourgainSystem> {
        let idx = |xs: &[Element]| xs.iter().map(|x| spec.index_of(x)).collect::<Result<Vec<_>>>();
        match self {
            SystemDescription::Bohr { freqs, delta } => BourgainSystem::bohr(spec, &idx(freqs)?, delta.clone()),
            SystemDescription::Cprog {
                lengths,
                generators,
                subgroup,
            } => {
                let h = GroupSet::subgroup_generated(spec, &idx(subgroup)?);
                BourgainSystem::coset_progression(spec, lengths.clone(), idx(generators)?, h)
            }
            SystemDescription::Subgroup { generators } => {
                BourgainSystem::subgroup(GroupSet::subgroup_generated(spec, &idx(generators)?))
            }
            SystemDescription::Dilate { child, lambda } => child.build(spec)?.dilate(lambda.clone()),
            SystemDescription::Intersect { children } => {
                let built = children.iter().map(|c| c.build(spec)).collect::<Result<Vec<_>>>()?;
                BourgainSystem::intersect(&built)
            }
            SystemDescription::Image { child, map } => child.build(spec)?.image(map.clone()),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("descriptions serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}
