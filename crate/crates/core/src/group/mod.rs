//! Finite abelian groups `Z/m_1 x ... x Z/m_k`, their elements and characters.
//!
//! Elements are addressed by their little-endian mixed-radix index: the first
//! coordinate varies fastest. This ordering is part of the public contract so
//! that bitsets, dense functions and transform layouts all agree. The dual
//! group is identified with the group itself: the character with index `j`
//! has the coordinates of element `j` as coefficients.

mod set;

pub use set::{set_arith, GroupSet, SetOp};

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest group order the library accepts.
pub const MAX_ORDER: usize = 1 << 26;

/// A finite abelian group given as a product of cyclic factors.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GroupSpec {
    moduli: Vec<usize>,
    order: usize,
    exponent: usize,
    /// `exponent / m_i`, used to put every character phase over one denominator.
    phase_weights: Vec<usize>,
}

impl GroupSpec {
    pub fn new(moduli: Vec<usize>) -> Result<Self> {
        if moduli.iter().any(|&m| m == 0) {
            return Err(Error::GroupSpec(format!("{moduli:?}: moduli must be >= 1")));
        }
        let mut order: usize = 1;
        for &m in &moduli {
            order = order
                .checked_mul(m)
                .filter(|&o| o <= MAX_ORDER)
                .ok_or_else(|| Error::GroupSpec(format!("{moduli:?}: order exceeds {MAX_ORDER}")))?;
        }
        let exponent = moduli.iter().fold(1usize, |acc, &m| acc.lcm(&m));
        let phase_weights = moduli.iter().map(|&m| exponent / m).collect();
        Ok(Self {
            moduli,
            order,
            exponent,
            phase_weights,
        })
    }

    /// The cyclic group `Z/n`.
    pub fn cyclic(n: usize) -> Result<Self> {
        Self::new(vec![n])
    }

    pub fn moduli(&self) -> &[usize] {
        &self.moduli
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn rank(&self) -> usize {
        self.moduli.len()
    }

    /// Least common multiple of the moduli.
    pub fn exponent(&self) -> usize {
        self.exponent
    }

    pub fn is_cyclic(&self) -> bool {
        self.moduli.len() <= 1
    }

    pub fn zero(&self) -> usize {
        0
    }

    pub fn index_of(&self, x: &Element) -> Result<usize> {
        if x.coords.len() != self.moduli.len()
            || x.coords.iter().zip(&self.moduli).any(|(&c, &m)| c >= m)
        {
            return Err(Error::ElementMismatch(x.to_string(), self.to_string()));
        }
        let mut idx = 0;
        for (&c, &m) in x.coords.iter().zip(&self.moduli).rev() {
            idx = idx * m + c;
        }
        Ok(idx)
    }

    pub fn element(&self, idx: usize) -> Element {
        debug_assert!(idx < self.order);
        let mut rest = idx;
        let coords = self
            .moduli
            .iter()
            .map(|&m| {
                let c = rest % m;
                rest /= m;
                c
            })
            .collect();
        Element { coords }
    }

    /// Reduces arbitrary integer coordinates into an element index.
    pub fn index_from_coords(&self, coords: &[i64]) -> Result<usize> {
        if coords.len() != self.moduli.len() {
            return Err(Error::ElementMismatch(format!("{coords:?}"), self.to_string()));
        }
        let mut idx = 0;
        for (&c, &m) in coords.iter().zip(&self.moduli).rev() {
            idx = idx * m + c.rem_euclid(m as i64) as usize;
        }
        Ok(idx)
    }

    #[inline]
    pub fn add(&self, i: usize, j: usize) -> usize {
        if self.moduli.len() == 1 {
            let s = i + j;
            return if s >= self.order { s - self.order } else { s };
        }
        let (mut i, mut j) = (i, j);
        let mut out = 0;
        let mut place = 1;
        for &m in &self.moduli {
            let s = i % m + j % m;
            out += if s >= m { s - m } else { s } * place;
            place *= m;
            i /= m;
            j /= m;
        }
        out
    }

    /// The table `u -> u + x` over all indices, built with an odometer so no
    /// per-element division is needed.
    pub fn translation(&self, x: usize) -> Vec<usize> {
        let n = self.order;
        if self.moduli.len() == 1 {
            return (0..n).map(|u| if u + x >= n { u + x - n } else { u + x }).collect();
        }
        let xs = self.element(x).coords;
        let r = self.moduli.len();
        let mut places = Vec::with_capacity(r);
        let mut p = 1;
        for &m in &self.moduli {
            places.push(p);
            p *= m;
        }
        // Digits of u, digits of u + x, and the running index of u + x.
        let mut du = vec![0usize; r];
        let mut dv = xs.clone();
        let mut v = x;
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            out.push(v);
            for k in 0..r {
                let m = self.moduli[k];
                du[k] += 1;
                dv[k] += 1;
                if dv[k] == m {
                    dv[k] = 0;
                    v -= (m - 1) * places[k];
                } else {
                    v += places[k];
                }
                if du[k] == m {
                    du[k] = 0;
                    // Carry into the next axis.
                    continue;
                }
                break;
            }
        }
        out
    }

    #[inline]
    pub fn neg(&self, i: usize) -> usize {
        if self.moduli.len() == 1 {
            return if i == 0 { 0 } else { self.order - i };
        }
        let mut rest = i;
        let mut out = 0;
        let mut place = 1;
        for &m in &self.moduli {
            let c = rest % m;
            out += if c == 0 { 0 } else { m - c } * place;
            place *= m;
            rest /= m;
        }
        out
    }

    #[inline]
    pub fn sub(&self, i: usize, j: usize) -> usize {
        self.add(i, self.neg(j))
    }

    /// `k . x`, reducing `k` modulo each coordinate modulus.
    pub fn scale(&self, k: i64, i: usize) -> usize {
        let mut rest = i;
        let mut out = 0;
        let mut place = 1;
        for &m in &self.moduli {
            let c = (rest % m) as i128;
            let v = (c * k as i128).rem_euclid(m as i128) as usize;
            out += v * place;
            place *= m;
            rest /= m;
        }
        out
    }

    /// Least `n >= 1` with `n . x = 0`.
    pub fn element_order(&self, i: usize) -> usize {
        let mut rest = i;
        let mut ord = 1usize;
        for &m in &self.moduli {
            let c = rest % m;
            rest /= m;
            ord = ord.lcm(&(m / m.gcd(&c)));
        }
        ord
    }

    /// Character phase numerator: `gamma_j(x) = e(phase / exponent)`.
    #[inline]
    pub fn phase(&self, char_idx: usize, x: usize) -> usize {
        if self.moduli.len() == 1 {
            return ((char_idx as u128 * x as u128) % self.order as u128) as usize;
        }
        let (mut a, mut b) = (char_idx, x);
        let mut acc: u128 = 0;
        for (&m, &w) in self.moduli.iter().zip(&self.phase_weights) {
            let prod = ((a % m) as u128 * (b % m) as u128) % m as u128;
            acc += prod * w as u128;
            a /= m;
            b /= m;
        }
        (acc % self.exponent as u128) as usize
    }

    /// Distance of the phase to the nearest integer, scaled by the exponent:
    /// `||gamma_j(x)||_U = circle_distance / exponent`.
    #[inline]
    pub fn circle_distance(&self, char_idx: usize, x: usize) -> usize {
        let r = self.phase(char_idx, x);
        r.min(self.exponent - r)
    }

    pub fn char_value(&self, char_idx: usize, x: usize) -> Complex64 {
        let theta = std::f64::consts::TAU * self.phase(char_idx, x) as f64 / self.exponent as f64;
        Complex64::from_polar(1.0, theta)
    }

    pub fn character(&self, idx: usize) -> Character {
        Character {
            index: idx,
            coeffs: self.element(idx),
        }
    }

    /// Canonical rendering of element `i`.
    pub fn render(&self, i: usize) -> String {
        self.element(i).to_string()
    }

    /// Parses an element written as `a` (rank one) or `(a,b,...)`.
    pub fn parse_element(&self, s: &str) -> Result<usize> {
        let t = s.trim();
        let inner = t
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .unwrap_or(t);
        let coords = inner
            .split(',')
            .map(|c| {
                c.trim()
                    .parse::<i64>()
                    .map_err(|_| Error::Parse(format!("bad element `{s}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        self.index_from_coords(&coords)
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.moduli.is_empty() {
            return write!(f, "Z1");
        }
        let parts: Vec<String> = self.moduli.iter().map(|m| format!("Z{m}")).collect();
        write!(f, "{}", parts.join("x"))
    }
}

impl fmt::Debug for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupSpec({self})")
    }
}

/// Parses `Z7`, `Z3^4`, `Z4xZ8` (also `×` and `*` as separators).
impl FromStr for GroupSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::GroupSpec(s.to_string());
        let normalized = s.trim().replace(['×', '*'], "x");
        if normalized.is_empty() {
            return Err(bad());
        }
        let mut moduli = Vec::new();
        for factor in normalized.split('x') {
            let factor = factor.trim();
            let body = factor
                .strip_prefix('Z')
                .or_else(|| factor.strip_prefix('z'))
                .ok_or_else(bad)?;
            let (m, k) = match body.split_once('^') {
                Some((m, k)) => (m, k.parse::<usize>().map_err(|_| bad())?),
                None => (body, 1),
            };
            let m = m.parse::<usize>().map_err(|_| bad())?;
            if m == 0 || k == 0 {
                return Err(bad());
            }
            moduli.extend(std::iter::repeat(m).take(k));
        }
        GroupSpec::new(moduli)
    }
}

impl Serialize for GroupSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for GroupSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A group element as reduced coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Element {
    pub coords: Vec<usize>,
}

impl Element {
    pub fn new(coords: Vec<usize>) -> Self {
        Self { coords }
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// `x -> e(sum_i a_i x_i / m_i)`, identified with the element of index `index`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Character {
    pub index: usize,
    pub coeffs: Element,
}

impl Character {
    pub fn eval(&self, spec: &GroupSpec, x: usize) -> Complex64 {
        spec.char_value(self.index, x)
    }

    pub fn is_trivial(&self) -> bool {
        self.index == 0
    }
}

/// `k . x` on an explicit element.
pub fn scalar_action(spec: &GroupSpec, k: i64, x: &Element) -> Result<Element> {
    let i = spec.index_of(x)?;
    Ok(spec.element(spec.scale(k, i)))
}

/// Least `n >= 1` with `n . x = 0`.
pub fn element_order(spec: &GroupSpec, x: &Element) -> Result<usize> {
    Ok(spec.element_order(spec.index_of(x)?))
}
