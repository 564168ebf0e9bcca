//! Residue fields: the rationals or a finite field `F_{p^k}`.

use std::sync::Arc;

use num_traits::{One, Zero};

use crate::algebra::{Field, GF, QQ};
use crate::error::{Error, Result};
use crate::rational::{fmt_rat, parse_rat, Rat};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ResidueField {
    Rationals,
    Finite(Arc<GF>),
}

/// An element of a [`ResidueField`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Res {
    Q(Rat),
    F(u32),
}

impl ResidueField {
    pub fn finite(p: u64, k: u32) -> Result<Self> {
        Ok(ResidueField::Finite(GF::get(p, k)?))
    }

    pub fn gf(&self) -> Option<&Arc<GF>> {
        match self {
            ResidueField::Finite(g) => Some(g),
            ResidueField::Rationals => None,
        }
    }

    /// Number of elements, `None` for the rationals.
    pub fn cardinality(&self) -> Option<u64> {
        self.gf().map(|g| g.q)
    }

    pub fn format(&self, a: &Res) -> String {
        match (self, a) {
            (ResidueField::Rationals, Res::Q(r)) => fmt_rat(r),
            (ResidueField::Finite(g), Res::F(x)) => g.format(*x),
            _ => panic!("residue element from another field"),
        }
    }

    pub fn parse(&self, s: &str) -> Result<Res> {
        match self {
            ResidueField::Rationals => Ok(Res::Q(parse_rat(s)?)),
            ResidueField::Finite(g) => {
                if let Ok(r) = parse_rat(s) {
                    // Rationals with denominator prime to p are accepted.
                    let p = g.p;
                    if r.is_zero() {
                        return Ok(Res::F(0));
                    }
                    if crate::rational::padic_val(&r, p) < 0 {
                        return Err(Error::Input(format!("{s} is not integral at {p}")));
                    }
                    return Ok(Res::F(crate::rational::reduce_mod_p(&r, p) as u32));
                }
                Ok(Res::F(g.parse(s)?))
            }
        }
    }

    pub fn describe(&self) -> String {
        match self {
            ResidueField::Rationals => "Q".into(),
            ResidueField::Finite(g) if g.k == 1 => format!("F_{}", g.p),
            ResidueField::Finite(g) => format!("F_{}^{}", g.p, g.k),
        }
    }

    /// Inverse of [`ResidueField::describe`].
    pub fn from_descriptor(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "Q" {
            return Ok(ResidueField::Rationals);
        }
        let bad = || Error::Input(format!("unknown residue field {s:?}"));
        let rest = s.strip_prefix("F_").ok_or_else(bad)?;
        let (p, k) = match rest.split_once('^') {
            Some((p, k)) => (p, k.parse::<u32>().map_err(|_| bad())?),
            None => (rest, 1),
        };
        ResidueField::finite(p.parse::<u64>().map_err(|_| bad())?, k)
    }

    pub fn unwrap_f(a: &Res) -> u32 {
        match a {
            Res::F(x) => *x,
            Res::Q(_) => panic!("expected a finite-field element"),
        }
    }

    pub fn unwrap_q(a: &Res) -> &Rat {
        match a {
            Res::Q(r) => r,
            Res::F(_) => panic!("expected a rational element"),
        }
    }
}

impl Field for ResidueField {
    type Elem = Res;

    fn zero(&self) -> Res {
        match self {
            ResidueField::Rationals => Res::Q(Rat::zero()),
            ResidueField::Finite(_) => Res::F(0),
        }
    }
    fn one(&self) -> Res {
        match self {
            ResidueField::Rationals => Res::Q(Rat::one()),
            ResidueField::Finite(_) => Res::F(1),
        }
    }
    fn add(&self, a: &Res, b: &Res) -> Res {
        match (self, a, b) {
            (ResidueField::Rationals, Res::Q(x), Res::Q(y)) => Res::Q(x + y),
            (ResidueField::Finite(g), Res::F(x), Res::F(y)) => Res::F(g.add(x, y)),
            _ => panic!("residue element from another field"),
        }
    }
    fn neg(&self, a: &Res) -> Res {
        match (self, a) {
            (ResidueField::Rationals, Res::Q(x)) => Res::Q(-x),
            (ResidueField::Finite(g), Res::F(x)) => Res::F(g.neg(x)),
            _ => panic!("residue element from another field"),
        }
    }
    fn mul(&self, a: &Res, b: &Res) -> Res {
        match (self, a, b) {
            (ResidueField::Rationals, Res::Q(x), Res::Q(y)) => Res::Q(x * y),
            (ResidueField::Finite(g), Res::F(x), Res::F(y)) => Res::F(g.mul(x, y)),
            _ => panic!("residue element from another field"),
        }
    }
    fn inv(&self, a: &Res) -> Option<Res> {
        match (self, a) {
            (ResidueField::Rationals, Res::Q(x)) => QQ.inv(x).map(Res::Q),
            (ResidueField::Finite(g), Res::F(x)) => g.inv(x).map(Res::F),
            _ => panic!("residue element from another field"),
        }
    }
    fn is_zero(&self, a: &Res) -> bool {
        match a {
            Res::Q(x) => x.is_zero(),
            Res::F(x) => *x == 0,
        }
    }
    fn from_int(&self, n: i64) -> Res {
        match self {
            ResidueField::Rationals => Res::Q(QQ.from_int(n)),
            ResidueField::Finite(g) => Res::F(g.from_int(n)),
        }
    }
    fn characteristic(&self) -> u64 {
        match self {
            ResidueField::Rationals => 0,
            ResidueField::Finite(g) => g.p,
        }
    }
}
