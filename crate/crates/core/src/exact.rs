//! Exact rational helpers. Radii and dilation factors are kept as rationals so
//! that Bohr membership and cache keys never depend on float rounding.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

/// Largest denominator produced by [`snap`].
pub const SNAP_DENOMINATOR: u64 = 1 << 32;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Closest continued-fraction convergent of `x` with denominator at most 2^32.
pub fn snap(x: f64) -> Result<Q> {
    if !x.is_finite() {
        return Err(Error::InvalidArgument(format!("non-finite radius {x}")));
    }
    let exact = Q::from_float(x).expect("finite");
    if exact.denom() <= &BigInt::from(SNAP_DENOMINATOR) {
        return Ok(exact);
    }
    let bound = BigInt::from(SNAP_DENOMINATOR);
    let (mut p0, mut q0) = (BigInt::zero(), BigInt::one());
    let (mut p1, mut q1) = (BigInt::one(), BigInt::zero());
    let mut rest = exact.clone();
    loop {
        let a = rest.floor().to_integer();
        let p2 = &a * &p1 + &p0;
        let q2 = &a * &q1 + &q0;
        if q2 > bound {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let frac = &rest - Q::from_integer(a);
        if frac.is_zero() {
            break;
        }
        rest = frac.recip();
    }
    Ok(Q::new(p1, q1))
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// `floor(x)` for `x >= 0`, saturating at `usize::MAX`.
pub fn floor_usize(x: &Q) -> usize {
    if x.is_negative() {
        return 0;
    }
    x.floor().to_integer().to_usize().unwrap_or(usize::MAX)
}

pub fn is_positive(x: &Q) -> bool {
    x.is_positive()
}

/// Renders `p/q` (or `p` for integers).
pub fn render(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `p/q`, an integer, or a decimal float (snapped).
pub fn parse(s: &str) -> Result<Q> {
    let t = s.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| Error::Parse(format!("bad rational `{s}`")))?;
        let d: BigInt = d.trim().parse().map_err(|_| Error::Parse(format!("bad rational `{s}`")))?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in `{s}`")));
        }
        return Ok(Q::new(n, d));
    }
    if let Ok(n) = t.parse::<BigInt>() {
        return Ok(Q::from_integer(n));
    }
    let f: f64 = t.parse().map_err(|_| Error::Parse(format!("bad number `{s}`")))?;
    snap(f)
}

/// `2^k` as a rational, `k` possibly negative.
pub fn pow2(k: i64) -> Q {
    let p = BigInt::one() << k.unsigned_abs();
    if k >= 0 {
        Q::from_integer(p)
    } else {
        Q::new(BigInt::one(), p)
    }
}

/// Serde adapter: rationals are written as `"p/q"` strings and read from
/// either strings or JSON numbers.
pub mod serde_q {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&render(x))
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(f64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Q, D::Error> {
        match Raw::deserialize(d)? {
            Raw::Num(f) => snap(f).map_err(serde::de::Error::custom),
            Raw::Str(s) => parse(&s).map_err(serde::de::Error::custom),
        }
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(xs: &[Q], s: S) -> std::result::Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(xs.len()))?;
            for x in xs {
                seq.serialize_element(&render(x))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Q>, D::Error> {
            Vec::<Raw>::deserialize(d)?
                .into_iter()
                .map(|r| match r {
                    Raw::Num(f) => snap(f).map_err(serde::de::Error::custom),
                    Raw::Str(s) => parse(&s).map_err(serde::de::Error::custom),
                })
                .collect()
        }
    }
}
