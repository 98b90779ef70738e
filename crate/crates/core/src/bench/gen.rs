//! Test-set generators addressed by short strings such as `interval(10)`,
//! `random(0.3)` or `coset(2;1)`.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{GroupSet, GroupSpec};
use crate::roth::{count_threeaps, CountMode};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "snake_case")]
pub enum Generator {
    /// `{0, e, ..., (m - 1) e}` with `e` the first basis element.
    Interval { m: usize },
    /// Exactly `round(alpha |G|)` elements, uniformly at random.
    Random { alpha: f64 },
    /// `k` intervals of length `m`, evenly spaced around the first axis.
    UnionIntervals { k: usize, m: usize },
    /// `shift + <generators>`, both in element notation.
    Coset { generators: Vec<String>, shift: Option<String> },
    /// Integers with `k` base-`b` digits below `b/2` on the most popular sphere.
    BehrendLike { b: usize, k: usize },
    /// Greedy 3AP-free set in enumeration order, at most `max` elements.
    GreedyApFree { max: usize },
}

fn parse_err(s: &str, why: &str) -> Error {
    Error::Parse(format!("generator `{s}`: {why}"))
}

/// Splits on commas that are not inside parentheses.
fn split_top(s: &str, sep: char) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            c if c == sep && depth == 0 => {
                parts.push(s[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(s[start..].trim());
    parts
}

impl FromStr for Generator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let open = t.find('(').ok_or_else(|| parse_err(s, "expected name(args)"))?;
        let name = t[..open].trim();
        let args = t[open + 1..]
            .strip_suffix(')')
            .ok_or_else(|| parse_err(s, "missing closing parenthesis"))?;
        let nums = |n: usize| -> Result<Vec<&str>> {
            let parts = split_top(args, ',');
            if parts.len() != n || parts.iter().any(|p| p.is_empty()) {
                return Err(parse_err(s, &format!("expected {n} argument(s)")));
            }
            Ok(parts)
        };
        let int = |p: &str| p.parse::<usize>().map_err(|_| parse_err(s, &format!("bad integer `{p}`")));
        match name {
            "interval" => Ok(Generator::Interval { m: int(nums(1)?[0])? }),
            "random" => {
                let alpha: f64 = nums(1)?[0].parse().map_err(|_| parse_err(s, "bad density"))?;
                if !(0.0..=1.0).contains(&alpha) {
                    return Err(parse_err(s, "density must lie in [0, 1]"));
                }
                Ok(Generator::Random { alpha })
            }
            "union_intervals" => {
                let p = nums(2)?;
                Ok(Generator::UnionIntervals {
                    k: int(p[0])?,
                    m: int(p[1])?,
                })
            }
            "coset" => {
                let halves = split_top(args, ';');
                if halves.len() > 2 || halves[0].is_empty() {
                    return Err(parse_err(s, "expected coset(GENS) or coset(GENS;SHIFT)"));
                }
                Ok(Generator::Coset {
                    generators: split_top(halves[0], ',').into_iter().map(String::from).collect(),
                    shift: halves.get(1).map(|x| x.to_string()),
                })
            }
            "behrend_like" => {
                let p = nums(2)?;
                Ok(Generator::BehrendLike {
                    b: int(p[0])?,
                    k: int(p[1])?,
                })
            }
            "greedy_apfree" => Ok(Generator::GreedyApFree { max: int(nums(1)?[0])? }),
            _ => Err(parse_err(s, "unknown generator")),
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Interval { m } => write!(f, "interval({m})"),
            Generator::Random { alpha } => write!(f, "random({alpha})"),
            Generator::UnionIntervals { k, m } => write!(f, "union_intervals({k},{m})"),
            Generator::Coset { generators, shift } => {
                write!(f, "coset({}", generators.join(","))?;
                if let Some(s) = shift {
                    write!(f, ";{s}")?;
                }
                write!(f, ")")
            }
            Generator::BehrendLike { b, k } => write!(f, "behrend_like({b},{k})"),
            Generator::GreedyApFree { max } => write!(f, "greedy_apfree({max})"),
        }
    }
}

/// Index of the first basis element `(1, 0, ..., 0)`.
fn first_axis(spec: &GroupSpec) -> Result<usize> {
    if spec.order() < 2 {
        return Err(Error::InvalidArgument("the trivial group has no intervals".into()));
    }
    let mut coords = vec![0i64; spec.rank()];
    let axis = spec.moduli().iter().position(|&m| m > 1).expect("nontrivial group");
    coords[axis] = 1;
    spec.index_from_coords(&coords)
}

fn progression(spec: &GroupSpec, start: i64, len: usize) -> Result<Vec<usize>> {
    let e = first_axis(spec)?;
    let ord = spec.element_order(e);
    if len > ord {
        return Err(Error::InvalidArgument(format!("interval of length {len} wraps around (order {ord})")));
    }
    Ok((0..len as i64).map(|j| spec.scale(start + j, e)).collect())
}

/// Would adding `x` to the 3AP-free set `a` create a nontrivial 3AP?
fn creates_threeap(spec: &GroupSpec, a: &GroupSet, x: usize) -> bool {
    let two_x = spec.scale(2, x);
    a.iter().any(|q| {
        let two_q = spec.scale(2, q);
        // x as an end point, q in the middle; the far end is in A or is x itself.
        a.contains(spec.sub(two_q, x)) || two_q == two_x
            // x in the middle, q and 2x - q at the ends.
            || a.contains(spec.sub(two_x, q))
    })
}

pub fn gen_set(spec: &GroupSpec, generator: &Generator, seed: u64) -> Result<GroupSet> {
    let n = spec.order();
    match generator {
        Generator::Interval { m } => Ok(GroupSet::from_indices(spec, progression(spec, 0, *m)?)),
        Generator::Random { alpha } => {
            let size = (alpha * n as f64).round() as usize;
            let mut idx: Vec<usize> = (0..n).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (chosen, _) = idx.partial_shuffle(&mut rng, size);
            Ok(GroupSet::from_indices(spec, chosen.iter().copied()))
        }
        Generator::UnionIntervals { k, m } => {
            if *k == 0 {
                return Err(Error::InvalidArgument("union_intervals needs k >= 1".into()));
            }
            let ord = spec.element_order(first_axis(spec)?);
            if k * m > ord {
                return Err(Error::InvalidArgument(format!("{k} intervals of length {m} overlap in order {ord}")));
            }
            let gap = ord / k;
            let mut out = GroupSet::empty(spec);
            for i in 0..*k {
                for x in progression(spec, (i * gap) as i64, *m)? {
                    out.insert(x);
                }
            }
            Ok(out)
        }
        Generator::Coset { generators, shift } => {
            let gens = generators
                .iter()
                .map(|g| spec.parse_element(g))
                .collect::<Result<Vec<_>>>()?;
            let h = GroupSet::subgroup_generated(spec, &gens);
            let s = match shift {
                Some(x) => spec.parse_element(x)?,
                None => 0,
            };
            Ok(h.translate(s))
        }
        Generator::BehrendLike { b, k } => behrend_like(spec, *b, *k),
        Generator::GreedyApFree { max } => {
            let mut a = GroupSet::empty(spec);
            for x in 0..n {
                if a.len() >= *max {
                    break;
                }
                if !creates_threeap(spec, &a, x) {
                    a.insert(x);
                }
            }
            let count = count_threeaps(&a, CountMode::Brute);
            if count.nontrivial() != 0 {
                return Err(Error::Critical("greedy set is not 3AP-free".into()));
            }
            Ok(a)
        }
    }
}

/// Digit-restriction construction: numbers `sum x_i b^i` with digits
/// `0 <= x_i < b/2` and `sum x_i^2` equal to its most frequent value. Sums of
/// two elements never carry, so the set has no nontrivial 3APs in the
/// integers, and none in `Z/N` when `2 max < N`.
fn behrend_like(spec: &GroupSpec, b: usize, k: usize) -> Result<GroupSet> {
    if !spec.is_cyclic() {
        return Err(Error::InvalidArgument("behrend_like needs a cyclic group".into()));
    }
    if b < 3 || k == 0 {
        return Err(Error::InvalidArgument("behrend_like needs b >= 3 and k >= 1".into()));
    }
    let n = spec.order();
    let top = b.checked_pow(k as u32).filter(|&t| 2 * t <= n + 1);
    if top.is_none() {
        return Err(Error::InvalidArgument(format!("b^k must be at most (N + 1)/2 = {}", (n + 1) / 2)));
    }
    let half = b.div_ceil(2);
    let mut by_norm: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    let total = half.pow(k as u32);
    for code in 0..total {
        let (mut rest, mut value, mut place, mut norm) = (code, 0, 1, 0);
        for _ in 0..k {
            let digit = rest % half;
            rest /= half;
            value += digit * place;
            norm += digit * digit;
            place *= b;
        }
        by_norm.entry(norm).or_default().push(value);
    }
    // Largest sphere; ties go to the smallest radius.
    let best = by_norm
        .into_iter()
        .max_by(|x, y| x.1.len().cmp(&y.1.len()).then(y.0.cmp(&x.0)))
        .map(|(_, v)| v)
        .unwrap_or_default();
    let a = GroupSet::from_indices(spec, best);
    if count_threeaps(&a, CountMode::Brute).nontrivial() != 0 {
        return Err(Error::Critical("Behrend-like set has a 3AP".into()));
    }
    Ok(a)
}

/// Parses `s` and generates.
pub fn gen_set_str(spec: &GroupSpec, s: &str, seed: u64) -> Result<GroupSet> {
    gen_set(spec, &s.parse()?, seed)
}
