//! Exact rationals and the extended value set `Q ∪ {∞}`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Parses `"a"`, `"-a/b"` into an exact rational.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::Input(format!("not a rational literal: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rat::new(n, d))
        }
        None => Ok(Rat::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

pub fn fmt_rat(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Serde adapters writing rationals as `"a/b"` strings.
pub mod serde_rat {
    use super::{fmt_rat, parse_rat, Rat};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rat, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_rat(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rat, D::Error> {
        let s = String::deserialize(d)?;
        parse_rat(&s).map_err(serde::de::Error::custom)
    }

    pub mod vec {
        use super::*;
        use serde::Serialize;

        pub fn serialize<S: Serializer>(v: &[Rat], s: S) -> std::result::Result<S::Ok, S::Error> {
            v.iter().map(fmt_rat).collect::<Vec<_>>().serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Rat>, D::Error> {
            let v = Vec::<String>::deserialize(d)?;
            v.iter().map(|s| parse_rat(s).map_err(serde::de::Error::custom)).collect()
        }
    }
}

/// Exponent of the prime `p` in a nonzero rational.
pub fn padic_val(r: &Rat, p: u64) -> i64 {
    assert!(!r.is_zero(), "valuation of zero");
    let p = BigInt::from(p);
    let count = |mut x: BigInt| {
        let mut k = 0i64;
        loop {
            let (q, rem) = x.div_rem(&p);
            if !rem.is_zero() {
                return k;
            }
            x = q;
            k += 1;
        }
    };
    count(r.numer().abs()) - count(r.denom().clone())
}

/// Residue of a `p`-integral rational in `F_p`.
pub fn reduce_mod_p(r: &Rat, p: u64) -> u64 {
    let pb = BigInt::from(p);
    let n = r.numer().mod_floor(&pb);
    let d = r.denom().mod_floor(&pb);
    assert!(!d.is_zero(), "denominator divisible by p");
    let n: u64 = n.try_into().unwrap();
    let d: u64 = d.try_into().unwrap();
    n * mod_inverse(d, p) % p
}

pub fn mod_inverse(a: u64, p: u64) -> u64 {
    let g = (a as i128).extended_gcd(&(p as i128));
    assert_eq!(g.gcd, 1, "not invertible mod {p}");
    g.x.rem_euclid(p as i128) as u64
}

pub fn lcm_denoms<'a>(it: impl IntoIterator<Item = &'a Rat>) -> BigInt {
    it.into_iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}

/// A value in `Q ∪ {∞}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ExtRat {
    Fin(Rat),
    Inf,
}

impl ExtRat {
    pub fn zero() -> Self {
        ExtRat::Fin(Rat::zero())
    }

    pub fn is_inf(&self) -> bool {
        matches!(self, ExtRat::Inf)
    }

    pub fn finite(&self) -> Option<&Rat> {
        match self {
            ExtRat::Fin(r) => Some(r),
            ExtRat::Inf => None,
        }
    }

    pub fn min(self, other: ExtRat) -> ExtRat {
        if self <= other {
            self
        } else {
            other
        }
    }
}

impl From<Rat> for ExtRat {
    fn from(r: Rat) -> Self {
        ExtRat::Fin(r)
    }
}

impl PartialOrd for ExtRat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtRat {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtRat::Inf, ExtRat::Inf) => Ordering::Equal,
            (ExtRat::Inf, _) => Ordering::Greater,
            (_, ExtRat::Inf) => Ordering::Less,
            (ExtRat::Fin(a), ExtRat::Fin(b)) => a.cmp(b),
        }
    }
}

impl Add for ExtRat {
    type Output = ExtRat;
    fn add(self, rhs: ExtRat) -> ExtRat {
        match (self, rhs) {
            (ExtRat::Fin(a), ExtRat::Fin(b)) => ExtRat::Fin(a + b),
            _ => ExtRat::Inf,
        }
    }
}

impl fmt::Display for ExtRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRat::Fin(r) => write!(f, "{}", fmt_rat(r)),
            ExtRat::Inf => write!(f, "inf"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinity_absorbs_and_is_neutral_for_min() {
        assert_eq!(ExtRat::Inf + ExtRat::from(int(3)), ExtRat::Inf);
        assert_eq!(ExtRat::Inf.min(ExtRat::from(rat(1, 2))), ExtRat::from(rat(1, 2)));
    }

    #[test]
    fn padic_valuation_of_rationals() {
        assert_eq!(padic_val(&rat(12, 5), 2), 2);
        assert_eq!(padic_val(&rat(3, 8), 2), -3);
        assert_eq!(reduce_mod_p(&rat(-1, 3), 2), 1);
        assert_eq!(reduce_mod_p(&rat(1, 2), 5), 3);
    }

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["0", "-7", "1/6", "-2/3"] {
            assert_eq!(fmt_rat(&parse_rat(s).unwrap()), s);
        }
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("x").is_err());
    }
}
