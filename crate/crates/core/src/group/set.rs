use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::{Element, GroupSpec};
use crate::error::{Error, Result};

/// A subset of a finite abelian group, stored as a dense bitset over the
/// element enumeration.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GroupSet {
    spec: GroupSpec,
    bits: Vec<u64>,
    size: usize,
}

/// Binary and unary set arithmetic supported by [`set_arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SetOp {
    Sum,
    Difference,
    Dilate(i64),
    Negate,
}

/// `A + B`, `A - B`, `k . A` or `-A`. The unary operations ignore `b` but
/// still require it to live in the same group.
pub fn set_arith(a: &GroupSet, b: &GroupSet, op: SetOp) -> Result<GroupSet> {
    a.check_same(b)?;
    Ok(match op {
        SetOp::Sum => a.sum(b)?,
        SetOp::Difference => a.difference_set(b)?,
        SetOp::Dilate(k) => a.dilate(k),
        SetOp::Negate => a.negate(),
    })
}

impl GroupSet {
    pub fn empty(spec: &GroupSpec) -> Self {
        Self {
            spec: spec.clone(),
            bits: vec![0; spec.order().div_ceil(64)],
            size: 0,
        }
    }

    pub fn full(spec: &GroupSpec) -> Self {
        let mut s = Self::empty(spec);
        for w in s.bits.iter_mut() {
            *w = u64::MAX;
        }
        s.clear_tail();
        s.size = spec.order();
        s
    }

    pub fn singleton(spec: &GroupSpec, idx: usize) -> Self {
        let mut s = Self::empty(spec);
        s.insert(idx);
        s
    }

    /// Builds a set from element indices; indices outside the group are ignored.
    pub fn from_indices<I: IntoIterator<Item = usize>>(spec: &GroupSpec, it: I) -> Self {
        let mut s = Self::empty(spec);
        for i in it {
            if i < spec.order() {
                s.insert(i);
            }
        }
        s
    }

    pub fn from_elements(spec: &GroupSpec, elements: &[Element]) -> Result<Self> {
        let mut s = Self::empty(spec);
        for x in elements {
            s.insert(spec.index_of(x)?);
        }
        Ok(s)
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn is_full(&self) -> bool {
        self.size == self.spec.order()
    }

    /// `|S| / |G|`.
    pub fn density(&self) -> f64 {
        self.size as f64 / self.spec.order() as f64
    }

    #[inline]
    pub fn contains(&self, idx: usize) -> bool {
        idx < self.spec.order() && (self.bits[idx >> 6] >> (idx & 63)) & 1 == 1
    }

    pub fn insert(&mut self, idx: usize) -> bool {
        let (w, b) = (idx >> 6, idx & 63);
        let fresh = (self.bits[w] >> b) & 1 == 0;
        if fresh {
            self.bits[w] |= 1 << b;
            self.size += 1;
        }
        fresh
    }

    pub fn remove(&mut self, idx: usize) -> bool {
        let (w, b) = (idx >> 6, idx & 63);
        let present = (self.bits[w] >> b) & 1 == 1;
        if present {
            self.bits[w] &= !(1 << b);
            self.size -= 1;
        }
        present
    }

    /// Member indices in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().flat_map(|(w, &word)| {
            let mut word = word;
            std::iter::from_fn(move || {
                if word == 0 {
                    return None;
                }
                let b = word.trailing_zeros() as usize;
                word &= word - 1;
                Some(w * 64 + b)
            })
        })
    }

    pub fn indices(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn elements(&self) -> Vec<Element> {
        self.iter().map(|i| self.spec.element(i)).collect()
    }

    pub fn first(&self) -> Option<usize> {
        self.iter().next()
    }

    pub(crate) fn check_same(&self, other: &GroupSet) -> Result<()> {
        if self.spec != other.spec {
            return Err(Error::SpecMismatch(
                self.spec.to_string(),
                other.spec.to_string(),
            ));
        }
        Ok(())
    }

    fn clear_tail(&mut self) {
        let n = self.spec.order();
        if n % 64 != 0 {
            if let Some(last) = self.bits.last_mut() {
                *last &= (1u64 << (n % 64)) - 1;
            }
        }
    }

    fn recount(&mut self) {
        self.size = self.bits.iter().map(|w| w.count_ones() as usize).sum();
    }

    fn zip_with(&self, other: &GroupSet, f: impl Fn(u64, u64) -> u64) -> Result<GroupSet> {
        self.check_same(other)?;
        let bits = self
            .bits
            .iter()
            .zip(&other.bits)
            .map(|(&a, &b)| f(a, b))
            .collect();
        let mut out = GroupSet {
            spec: self.spec.clone(),
            bits,
            size: 0,
        };
        out.clear_tail();
        out.recount();
        Ok(out)
    }

    pub fn union(&self, other: &GroupSet) -> Result<GroupSet> {
        self.zip_with(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &GroupSet) -> Result<GroupSet> {
        self.zip_with(other, |a, b| a & b)
    }

    /// Set difference `self \ other`.
    pub fn without(&self, other: &GroupSet) -> Result<GroupSet> {
        self.zip_with(other, |a, b| a & !b)
    }

    pub fn complement(&self) -> GroupSet {
        let mut out = GroupSet {
            spec: self.spec.clone(),
            bits: self.bits.iter().map(|w| !w).collect(),
            size: 0,
        };
        out.clear_tail();
        out.size = self.spec.order() - self.size;
        out
    }

    pub fn is_subset(&self, other: &GroupSet) -> bool {
        self.spec == other.spec
            && self.bits.iter().zip(&other.bits).all(|(&a, &b)| a & !b == 0)
    }

    pub fn is_disjoint(&self, other: &GroupSet) -> bool {
        self.spec == other.spec && self.bits.iter().zip(&other.bits).all(|(&a, &b)| a & b == 0)
    }

    /// First member of `self` missing from `other`.
    pub fn first_outside(&self, other: &GroupSet) -> Option<usize> {
        self.iter().find(|&i| !other.contains(i))
    }

    /// `x + S`.
    pub fn translate(&self, x: usize) -> GroupSet {
        if self.spec.is_cyclic() {
            let mut out = GroupSet::empty(&self.spec);
            rotate_or_into(&mut out.bits, &self.bits, x, self.spec.order());
            out.size = self.size;
            return out;
        }
        if self.size * 8 >= self.spec.order() {
            let table = self.spec.translation(x);
            return GroupSet::from_indices(&self.spec, self.iter().map(|i| table[i]));
        }
        GroupSet::from_indices(&self.spec, self.iter().map(|i| self.spec.add(i, x)))
    }

    pub fn negate(&self) -> GroupSet {
        GroupSet::from_indices(&self.spec, self.iter().map(|i| self.spec.neg(i)))
    }

    /// `k . S = {k . s}`.
    pub fn dilate(&self, k: i64) -> GroupSet {
        GroupSet::from_indices(&self.spec, self.iter().map(|i| self.spec.scale(k, i)))
    }

    /// Exact sumset `A + B`.
    pub fn sum(&self, other: &GroupSet) -> Result<GroupSet> {
        self.check_same(other)?;
        let mut out = GroupSet::empty(&self.spec);
        if self.is_empty() || other.is_empty() {
            return Ok(out);
        }
        let (small, big) = if self.size <= other.size {
            (self, other)
        } else {
            (other, self)
        };
        let n = self.spec.order();
        // Word-level rotation only pays off when the larger set is not tiny.
        if self.spec.is_cyclic() && big.size * 4 > n / 64 {
            for a in small.iter() {
                rotate_or_into(&mut out.bits, &big.bits, a, n);
                if a % 16 == 0 {
                    out.recount();
                    if out.size == n {
                        return Ok(out);
                    }
                }
            }
            out.recount();
            return Ok(out);
        }
        let log_n = (usize::BITS - n.leading_zeros()) as usize;
        if small.size * big.size > 16 * n * log_n {
            let r = crate::harmonic::sum_counts(self, other)?;
            return Ok(GroupSet::from_indices(&self.spec, (0..n).filter(|&x| r[x] > 0)));
        }
        let big_members = big.indices();
        let tabled = big.size * 8 >= n;
        for (k, a) in small.iter().enumerate() {
            if tabled {
                let table = self.spec.translation(a);
                for &b in &big_members {
                    let s = table[b];
                    out.bits[s >> 6] |= 1 << (s & 63);
                }
            } else {
                for &b in &big_members {
                    let s = self.spec.add(a, b);
                    out.bits[s >> 6] |= 1 << (s & 63);
                }
            }
            if k % 16 == 15 {
                out.recount();
                if out.size == n {
                    return Ok(out);
                }
            }
        }
        out.recount();
        Ok(out)
    }

    /// Exact difference set `A - B`.
    pub fn difference_set(&self, other: &GroupSet) -> Result<GroupSet> {
        self.sum(&other.negate())
    }

    /// `k A - l A` for nonnegative `k, l` with `k + l >= 1`.
    pub fn iterated_sumset(&self, k: usize, l: usize) -> Result<GroupSet> {
        if k + l == 0 {
            return Err(Error::InvalidArgument("iterated sumset needs k + l >= 1".into()));
        }
        let neg = self.negate();
        let mut acc: Option<GroupSet> = None;
        for part in std::iter::repeat(self).take(k).chain(std::iter::repeat(&neg).take(l)) {
            acc = Some(match acc {
                None => part.clone(),
                Some(s) => s.sum(part)?,
            });
        }
        Ok(acc.expect("k + l >= 1"))
    }

    /// `|A + A| / |A|` as an exact rational.
    pub fn doubling_constant(&self) -> Result<Ratio<u64>> {
        if self.is_empty() {
            return Err(Error::InvalidArgument("doubling constant of the empty set".into()));
        }
        let aa = self.sum(self)?;
        Ok(Ratio::new(aa.len() as u64, self.size as u64))
    }

    /// Greedy maximal family of pairwise disjoint translates `x + B`, `x in S`.
    ///
    /// Maximality gives `S ⊆ X + B - B`, and disjointness gives
    /// `|X| |B| <= |S + B|`.
    pub fn ruzsa_cover(&self, b: &GroupSet) -> Result<GroupSet> {
        self.check_same(b)?;
        if b.is_empty() {
            return Err(Error::InvalidArgument("ruzsa cover needs a nonempty B".into()));
        }
        let mut occupied = GroupSet::empty(&self.spec);
        let mut chosen = GroupSet::empty(&self.spec);
        for s in self.iter() {
            let shifted = b.translate(s);
            if shifted.is_disjoint(&occupied) {
                occupied = occupied.union(&shifted)?;
                chosen.insert(s);
            }
        }
        Ok(chosen)
    }

    /// Smallest subgroup containing `generators`.
    pub fn subgroup_generated(spec: &GroupSpec, generators: &[usize]) -> GroupSet {
        let mut h = GroupSet::singleton(spec, 0);
        for &g in generators {
            if h.contains(g) {
                continue;
            }
            let mut cyclic = GroupSet::singleton(spec, 0);
            let mut acc = g;
            while acc != 0 {
                cyclic.insert(acc);
                acc = spec.add(acc, g);
            }
            h = h.sum(&cyclic).expect("same group");
        }
        h
    }

    /// Whether the set is a subgroup (contains 0, closed under `+` and `-`).
    pub fn is_subgroup(&self) -> bool {
        if !self.contains(0) {
            return false;
        }
        let members = self.indices();
        members
            .iter()
            .all(|&a| self.contains(self.spec.neg(a)) && members.iter().all(|&b| self.contains(self.spec.add(a, b))))
    }

    pub fn render(&self) -> String {
        let parts: Vec<String> = self.iter().map(|i| self.spec.render(i)).collect();
        format!("{{{}}}", parts.join(", "))
    }
}

impl fmt::Debug for GroupSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.size <= 32 {
            write!(f, "GroupSet[{}]{}", self.spec, self.render())
        } else {
            write!(f, "GroupSet[{}](|S| = {})", self.spec, self.size)
        }
    }
}

/// Reads `len <= 64` bits starting at `pos` (no wrap-around).
#[inline]
fn read_bits(src: &[u64], pos: usize, len: usize) -> u64 {
    if len == 0 {
        return 0;
    }
    let (w, off) = (pos >> 6, pos & 63);
    let mut v = src[w] >> off;
    if off != 0 && w + 1 < src.len() {
        v |= src[w + 1] << (64 - off);
    }
    if len < 64 {
        v &= (1u64 << len) - 1;
    }
    v
}

/// `dst |= src` rotated by `shift` positions on a ring of `n` bits, i.e.
/// bit `j` of `dst` receives bit `(j - shift) mod n` of `src`.
fn rotate_or_into(dst: &mut [u64], src: &[u64], shift: usize, n: usize) {
    let shift = shift % n;
    for (w, slot) in dst.iter_mut().enumerate() {
        let start = w * 64;
        if start >= n {
            break;
        }
        let len = 64.min(n - start);
        let from = (start + n - shift) % n;
        let word = if from + len <= n {
            read_bits(src, from, len)
        } else {
            let head = n - from;
            read_bits(src, from, head) | (read_bits(src, 0, len - head) << head)
        };
        *slot |= word;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: usize) -> GroupSpec {
        GroupSpec::cyclic(n).unwrap()
    }

    #[test]
    fn small_sumsets() {
        let g = z(5);
        let a = GroupSet::from_indices(&g, [0, 1]);
        assert_eq!(a.sum(&a).unwrap().indices(), vec![0, 1, 2]);
        let e = GroupSet::empty(&g);
        assert!(a.sum(&e).unwrap().is_empty());
        assert_eq!(set_arith(&a, &a, SetOp::Negate).unwrap().indices(), vec![0, 4]);
        assert_eq!(set_arith(&a, &a, SetOp::Dilate(3)).unwrap().indices(), vec![0, 3]);
        assert_eq!(set_arith(&a, &a, SetOp::Difference).unwrap().indices(), vec![0, 1, 4]);
    }

    #[test]
    fn mismatched_groups_are_rejected() {
        let a = GroupSet::full(&z(5));
        let b = GroupSet::full(&z(6));
        assert!(matches!(set_arith(&a, &b, SetOp::Sum), Err(Error::SpecMismatch(..))));
    }

    #[test]
    fn rotation_matches_pointwise_translate() {
        for n in [1, 5, 63, 64, 65, 130, 200] {
            let g = z(n);
            let s = GroupSet::from_indices(&g, (0..n).filter(|i| i % 3 == 0 || i % 7 == 2));
            for x in [0, 1, n / 2, n.saturating_sub(1)] {
                let expect = GroupSet::from_indices(&g, s.iter().map(|i| (i + x) % n));
                assert_eq!(s.translate(x), expect, "n={n} x={x}");
            }
        }
    }

    #[test]
    fn subgroup_examples() {
        let z8 = z(8);
        assert_eq!(GroupSet::subgroup_generated(&z8, &[2]).indices(), vec![0, 2, 4, 6]);
        assert_eq!(GroupSet::subgroup_generated(&z8, &[]).indices(), vec![0]);
        let g = GroupSpec::new(vec![4, 4]).unwrap();
        let gens = [
            g.index_of(&Element::new(vec![1, 0])).unwrap(),
            g.index_of(&Element::new(vec![0, 2])).unwrap(),
        ];
        let h = GroupSet::subgroup_generated(&g, &gens);
        assert_eq!(h.len(), 8);
        assert!(h.is_subgroup());
    }

    #[test]
    fn doubling_examples() {
        let g = z(100);
        let a = GroupSet::from_indices(&g, 0..10);
        assert_eq!(a.doubling_constant().unwrap(), Ratio::new(19, 10));
        let h = GroupSet::subgroup_generated(&g, &[25]);
        assert_eq!(h.doubling_constant().unwrap(), Ratio::from_integer(1));
        assert!(GroupSet::empty(&g).doubling_constant().is_err());
    }

    #[test]
    fn ruzsa_cover_examples() {
        let g = z(10);
        let b = GroupSet::from_indices(&g, 0..5);
        assert_eq!(b.ruzsa_cover(&b).unwrap().indices(), vec![0]);
        let all = GroupSet::full(&g);
        let x = all.ruzsa_cover(&b).unwrap();
        // |S + B| / |B| = 10 / 5
        assert!(x.len() <= 2);
        let cover = x.sum(&b.difference_set(&b).unwrap()).unwrap();
        assert!(all.is_subset(&cover));
        assert!(all.ruzsa_cover(&GroupSet::empty(&g)).is_err());
    }

    #[test]
    fn iterated_sumset_of_interval() {
        let g = z(100);
        let a = GroupSet::from_indices(&g, 0..10);
        // 3A - 2A = {-18, ..., 27}
        assert_eq!(a.iterated_sumset(3, 2).unwrap().len(), 46);
    }
}
