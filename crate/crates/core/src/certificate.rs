//! Machine-checkable witnesses. Verification uses only group arithmetic, so a
//! certificate can be checked without trusting the code that produced it.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{Element, GroupSet, GroupSpec};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// `x + z = 2y`, not all equal.
    Nontrivial { x: Element, y: Element, z: Element },
    /// `x + z = 2y`, pairwise distinct.
    Proper { x: Element, y: Element, z: Element },
    /// `base, base + step, ..., base + (length - 1) step`, all distinct.
    ProperAp { base: Element, step: Element, length: usize },
    /// `base + <generators>`.
    Coset { base: Element, generators: Vec<Element> },
}

/// Outcome of [`Certificate::verify`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateCheck {
    pub valid: bool,
    /// Number of elements the certificate lists.
    pub size: usize,
    pub reason: Option<String>,
}

impl CertificateCheck {
    fn ok(size: usize) -> Self {
        Self {
            valid: true,
            size,
            reason: None,
        }
    }

    fn fail(size: usize, reason: String) -> Self {
        Self {
            valid: false,
            size,
            reason: Some(reason),
        }
    }
}

impl Certificate {
    pub fn three_ap(spec: &GroupSpec, x: usize, y: usize, z: usize) -> Self {
        let (ex, ey, ez) = (spec.element(x), spec.element(y), spec.element(z));
        if x != y && y != z && x != z {
            Certificate::Proper { x: ex, y: ey, z: ez }
        } else {
            Certificate::Nontrivial { x: ex, y: ey, z: ez }
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Certificate::Nontrivial { .. } => "nontrivial",
            Certificate::Proper { .. } => "proper",
            Certificate::ProperAp { .. } => "proper_ap",
            Certificate::Coset { .. } => "coset",
        }
    }

    /// The listed elements, as indices.
    pub fn elements(&self, spec: &GroupSpec) -> Result<Vec<usize>> {
        Ok(match self {
            Certificate::Nontrivial { x, y, z } | Certificate::Proper { x, y, z } => {
                vec![spec.index_of(x)?, spec.index_of(y)?, spec.index_of(z)?]
            }
            Certificate::ProperAp { base, step, length } => {
                let (b, s) = (spec.index_of(base)?, spec.index_of(step)?);
                (0..*length as i64).map(|j| spec.add(b, spec.scale(j, s))).collect()
            }
            Certificate::Coset { base, generators } => {
                let b = spec.index_of(base)?;
                let gens = generators.iter().map(|g| spec.index_of(g)).collect::<Result<Vec<_>>>()?;
                GroupSet::subgroup_generated(spec, &gens)
                    .translate(b)
                    .indices()
            }
        })
    }

    /// Checks the certificate against `container` (the set `A` for 3APs, the
    /// sumset `A + A` for progressions and cosets).
    pub fn verify(&self, spec: &GroupSpec, container: &GroupSet) -> Result<CertificateCheck> {
        if container.spec() != spec {
            return Err(Error::SpecMismatch(spec.to_string(), container.spec().to_string()));
        }
        let elems = self.elements(spec)?;
        let size = elems.len();
        if let Some(&e) = elems.iter().find(|&&e| !container.contains(e)) {
            return Ok(CertificateCheck::fail(size, format!("{} is not in the container", spec.render(e))));
        }
        match self {
            Certificate::Nontrivial { .. } | Certificate::Proper { .. } => {
                let (x, y, z) = (elems[0], elems[1], elems[2]);
                if spec.add(x, z) != spec.scale(2, y) {
                    return Ok(CertificateCheck::fail(size, "x + z != 2y".into()));
                }
                let distinct = x != y && y != z && x != z;
                let trivial = x == y && y == z;
                if matches!(self, Certificate::Proper { .. }) && !distinct {
                    return Ok(CertificateCheck::fail(size, "terms are not pairwise distinct".into()));
                }
                if trivial {
                    return Ok(CertificateCheck::fail(size, "progression is trivial".into()));
                }
            }
            Certificate::ProperAp { length, .. } => {
                if *length == 0 {
                    return Ok(CertificateCheck::fail(size, "empty progression".into()));
                }
                let distinct = GroupSet::from_indices(spec, elems.iter().copied());
                if distinct.len() != *length {
                    return Ok(CertificateCheck::fail(size, "progression terms repeat".into()));
                }
            }
            Certificate::Coset { generators, .. } => {
                let gens = generators.iter().map(|g| spec.index_of(g)).collect::<Result<Vec<_>>>()?;
                if !GroupSet::subgroup_generated(spec, &gens).is_subgroup() {
                    return Ok(CertificateCheck::fail(size, "generated set is not a subgroup".into()));
                }
            }
        }
        Ok(CertificateCheck::ok(size))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificates serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json() + "\n").map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })
    }
}
