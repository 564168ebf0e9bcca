//! Complete discretely valued fields with exact arithmetic.
//!
//! Both backends compute in a dense subfield where every operation is exact:
//!
//! * `PAdic`: the number field `Q(ζ)[π]/(π^e − p·U)`, where `ζ` is a root of
//!   the integer lift of the residue field's defining polynomial and `U` is a
//!   rational `p`-unit. The basis `π^j ζ^k` is integral at `p`, so valuations
//!   are read off coefficientwise and are never lower bounds.
//! * `Laurent`: rational functions `k₀(s)` with the `s`-adic valuation, where
//!   `t = s^e` is the uniformizer of the declared base field `k₀((t))`.
//!
//! Valuations are normalized so that the base uniformizer (`p` or `t`) has
//! valuation 1; an extension with ramification index `e` has value group
//! `(1/e)·Z`.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::algebra::{matrix, upoly, Field, GF, QQ};
use crate::error::{Error, Result};
use crate::rational::{fmt_rat, padic_val, rat, reduce_mod_p, ExtRat, Rat};
use crate::residue::{Res, ResidueField};

pub const DEFAULT_PRECISION: u32 = 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Backend {
    /// Extension of `Q_p` with residue field `residue` and `π^e = p·unit`.
    PAdic { p: u64, unit: Rat, residue: Arc<GF> },
    /// `k₀((s))` with `s^e = t`; `residue` is `k₀`.
    Laurent { residue: ResidueField },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValuedField {
    pub backend: Backend,
    /// Ramification index over the declared base field.
    pub e: u32,
    /// Declared digit precision. Arithmetic is exact, so this is carried for
    /// descriptor round trips and never truncates.
    pub precision: u32,
}

/// `s^shift · num(s)/den(s)` with `num(0) ≠ 0`, `den(0) = 1`, coprime.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LaurentElem {
    pub shift: i64,
    pub num: Vec<Res>,
    pub den: Vec<Res>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FieldElement {
    /// Coefficients of `π^j ζ^k` at index `j·m + k`.
    P(Vec<Rat>),
    L(LaurentElem),
}

impl ValuedField {
    pub fn padic(p: u64) -> Result<Self> {
        Ok(ValuedField {
            backend: Backend::PAdic { p, unit: Rat::one(), residue: GF::get(p, 1)? },
            e: 1,
            precision: DEFAULT_PRECISION,
        })
    }

    pub fn laurent(residue: ResidueField) -> Self {
        ValuedField { backend: Backend::Laurent { residue }, e: 1, precision: DEFAULT_PRECISION }
    }

    pub fn with_precision(mut self, n: u32) -> Self {
        self.precision = n;
        self
    }

    pub fn residue_field(&self) -> ResidueField {
        match &self.backend {
            Backend::PAdic { residue, .. } => ResidueField::Finite(residue.clone()),
            Backend::Laurent { residue } => residue.clone(),
        }
    }

    /// Value group `(1/e)·Z` as its generator `1/e`.
    pub fn value_group_step(&self) -> Rat {
        rat(1, self.e as i64)
    }

    pub fn in_value_group(&self, v: &Rat) -> bool {
        (v * Rat::from_integer(BigInt::from(self.e))).is_integer()
    }

    fn m(&self) -> usize {
        match &self.backend {
            Backend::PAdic { residue, .. } => residue.k as usize,
            Backend::Laurent { .. } => 1,
        }
    }

    fn dim(&self) -> usize {
        self.e as usize * self.m()
    }

    fn laurent_residue(&self) -> &ResidueField {
        match &self.backend {
            Backend::Laurent { residue } => residue,
            Backend::PAdic { .. } => unreachable!(),
        }
    }

    pub fn describe(&self) -> String {
        match &self.backend {
            Backend::PAdic { p, unit, residue } => {
                let mut s = format!("Q_{p}");
                if residue.k > 1 {
                    s += &format!(" unramified of degree {}", residue.k);
                }
                if self.e > 1 {
                    s += &format!(", pi^{} = {}", self.e, fmt_rat(&(unit * Rat::from_integer((*p).into()))));
                }
                s
            }
            Backend::Laurent { residue } => {
                let mut s = format!("{}((t))", residue.describe());
                if self.e > 1 {
                    s += &format!(", s^{} = t", self.e);
                }
                s
            }
        }
    }

    // ---------------------------------------------------------------- elements

    pub fn rational(&self, r: &Rat) -> FieldElement {
        match &self.backend {
            Backend::PAdic { .. } => {
                let mut v = vec![Rat::zero(); self.dim()];
                v[0] = r.clone();
                FieldElement::P(v)
            }
            Backend::Laurent { residue } => {
                let c = match residue {
                    ResidueField::Rationals => Res::Q(r.clone()),
                    ResidueField::Finite(g) => {
                        if r.is_zero() {
                            Res::F(0)
                        } else {
                            assert!(padic_val(r, g.p) >= 0, "rational not integral in the residue field");
                            Res::F(reduce_mod_p(r, g.p) as u32)
                        }
                    }
                };
                self.laurent_from_poly(0, vec![c])
            }
        }
    }

    /// The uniformizer, of valuation `1/e`.
    pub fn uniformizer(&self) -> FieldElement {
        match &self.backend {
            Backend::PAdic { p, .. } => {
                if self.e == 1 {
                    self.rational(&Rat::from_integer((*p).into()))
                } else {
                    let mut v = vec![Rat::zero(); self.dim()];
                    v[self.m()] = Rat::one();
                    FieldElement::P(v)
                }
            }
            Backend::Laurent { residue } => self.laurent_from_poly(1, vec![residue.one()]),
        }
    }

    /// `π^k` for any integer `k`.
    pub fn uniformizer_pow(&self, k: i64) -> FieldElement {
        let u = self.uniformizer();
        let pk = self.pow(&u, k.unsigned_abs());
        if k >= 0 {
            pk
        } else {
            self.inv(&pk).unwrap()
        }
    }

    /// The base uniformizer (`p` or `t`), of valuation 1.
    pub fn base_uniformizer(&self) -> FieldElement {
        match &self.backend {
            Backend::PAdic { p, .. } => self.rational(&Rat::from_integer((*p).into())),
            Backend::Laurent { .. } => self.uniformizer_pow(self.e as i64),
        }
    }

    /// The adjoined residue generator `ζ` (lift of `z`); `None` if the residue
    /// field is prime or the rationals.
    pub fn residue_generator(&self) -> Option<FieldElement> {
        let rf = self.residue_field();
        let g = rf.gf()?;
        if g.k == 1 {
            return None;
        }
        self.lift(&Res::F(g.generator()), &rf).ok()
    }

    fn laurent_from_poly(&self, shift: i64, num: Vec<Res>) -> FieldElement {
        let k = self.laurent_residue().clone();
        FieldElement::L(normalize_laurent(&k, shift, num, vec![k.one()]))
    }

    // ------------------------------------------------------------- operations

    /// Exact valuation; `∞` exactly for zero.
    pub fn valuation(&self, x: &FieldElement) -> ExtRat {
        match (&self.backend, x) {
            (Backend::PAdic { p, .. }, FieldElement::P(v)) => {
                let m = self.m();
                v.iter()
                    .enumerate()
                    .filter(|(_, q)| !q.is_zero())
                    .map(|(i, q)| ExtRat::Fin(Rat::from_integer(padic_val(q, *p).into()) + rat((i / m) as i64, self.e as i64)))
                    .min()
                    .unwrap_or(ExtRat::Inf)
            }
            (Backend::Laurent { .. }, FieldElement::L(l)) => {
                if l.num.is_empty() {
                    ExtRat::Inf
                } else {
                    ExtRat::Fin(rat(l.shift, self.e as i64))
                }
            }
            _ => panic!("element from another backend"),
        }
    }

    /// Image in the residue field.
    pub fn reduce(&self, x: &FieldElement) -> Result<Res> {
        match self.valuation(x) {
            ExtRat::Inf => return Ok(self.residue_field().zero()),
            ExtRat::Fin(v) if v.is_negative() => return Err(Error::NegativeValuation),
            ExtRat::Fin(v) if v.is_positive() => return Ok(self.residue_field().zero()),
            _ => {}
        }
        match (&self.backend, x) {
            (Backend::PAdic { p, residue, .. }, FieldElement::P(v)) => {
                let digits: Vec<u64> = v[..self.m()]
                    .iter()
                    .map(|q| if q.is_zero() || padic_val(q, *p) > 0 { 0 } else { reduce_mod_p(q, *p) })
                    .collect();
                Ok(Res::F(residue.from_digits(&digits)))
            }
            (Backend::Laurent { .. }, FieldElement::L(l)) => Ok(l.num[0].clone()),
            _ => panic!("element from another backend"),
        }
    }

    /// Canonical lift: integer digits for `p`-adic fields, constants for
    /// Laurent series.
    pub fn lift(&self, r: &Res, from: &ResidueField) -> Result<FieldElement> {
        if *from != self.residue_field() {
            return Err(Error::ResidueMismatch);
        }
        match (&self.backend, r) {
            (Backend::PAdic { residue, .. }, Res::F(a)) => {
                let mut v = vec![Rat::zero(); self.dim()];
                for (k, d) in residue.digits_of(*a).into_iter().enumerate() {
                    v[k] = Rat::from_integer(d.into());
                }
                Ok(FieldElement::P(v))
            }
            (Backend::Laurent { .. }, c) => Ok(self.laurent_from_poly(0, vec![c.clone()])),
            _ => Err(Error::ResidueMismatch),
        }
    }

    /// Adjoins a root of `X^e − π·u`. For Laurent fields `u` must be 1 and the
    /// extension is the substitution `t = s^e`.
    pub fn extend_ramified_with_unit(&self, e: u32, u: &Rat) -> Result<ValuedField> {
        if e == 0 {
            return Err(Error::Input("ramification index must be positive".into()));
        }
        if e == 1 {
            return Ok(self.clone());
        }
        let backend = match &self.backend {
            Backend::PAdic { p, unit, residue } => {
                if u.is_zero() || padic_val(u, *p) != 0 {
                    return Err(Error::UnsupportedExtension(format!("{} is not a unit", fmt_rat(u))));
                }
                let ue = num_traits::pow::pow(u.clone(), self.e as usize);
                Backend::PAdic { p: *p, unit: unit * ue, residue: residue.clone() }
            }
            Backend::Laurent { residue } => {
                if !u.is_one() {
                    return Err(Error::UnsupportedExtension("Laurent extensions use t = s^e".into()));
                }
                Backend::Laurent { residue: residue.clone() }
            }
        };
        let e_total = self
            .e
            .checked_mul(e)
            .ok_or_else(|| Error::UnsupportedExtension("ramification index overflow".into()))?;
        Ok(ValuedField { backend, e: e_total, precision: self.precision })
    }

    pub fn extend_ramified(&self, e: u32) -> Result<ValuedField> {
        self.extend_ramified_with_unit(e, &Rat::one())
    }

    /// Unramified extension of degree `m` (residue field `F_{q^m}`).
    pub fn extend_unramified(&self, m: u32) -> Result<ValuedField> {
        if m == 0 {
            return Err(Error::Input("degree must be positive".into()));
        }
        let backend = match &self.backend {
            _ if m == 1 => return Ok(self.clone()),
            Backend::PAdic { p, unit, residue } => {
                if residue.k != 1 {
                    return Err(Error::UnsupportedExtension(
                        "p-adic unramified extensions are built over the prime residue field only".into(),
                    ));
                }
                Backend::PAdic { p: *p, unit: unit.clone(), residue: GF::get(*p, m)? }
            }
            Backend::Laurent { residue: ResidueField::Rationals } => {
                return Err(Error::UnsupportedResidue("residue field Q has no finite extensions here".into()))
            }
            Backend::Laurent { residue: ResidueField::Finite(g) } => {
                Backend::Laurent { residue: ResidueField::Finite(GF::get(g.p, g.k * m)?) }
            }
        };
        Ok(ValuedField { backend, e: self.e, precision: self.precision })
    }

    /// Whether `self` is an extension of `sub` reachable by the extension
    /// constructors, so that [`ValuedField::embed`] applies.
    pub fn extends(&self, sub: &ValuedField) -> bool {
        self.embedding_data(sub).is_ok()
    }

    fn embedding_data(&self, sub: &ValuedField) -> Result<(u32, Rat)> {
        if self.e % sub.e != 0 {
            return Err(Error::ResidueMismatch);
        }
        let r = self.e / sub.e;
        match (&self.backend, &sub.backend) {
            (Backend::PAdic { p, unit, residue }, Backend::PAdic { p: p2, unit: u2, residue: r2 }) => {
                if p != p2 || !(r2.k == 1 || r2.k == residue.k) {
                    return Err(Error::ResidueMismatch);
                }
                // π_sub ↦ π^r / u with u^{e_sub} = unit / unit_sub.
                let ratio = unit / u2;
                let u = rational_root(&ratio, sub.e).ok_or(Error::ResidueMismatch)?;
                Ok((r, u))
            }
            (Backend::Laurent { residue }, Backend::Laurent { residue: r2 }) => match (residue, r2) {
                (ResidueField::Rationals, ResidueField::Rationals) => Ok((r, Rat::one())),
                (ResidueField::Finite(a), ResidueField::Finite(b)) if a.p == b.p && a.k % b.k == 0 => {
                    Ok((r, Rat::one()))
                }
                _ => Err(Error::ResidueMismatch),
            },
            _ => Err(Error::ResidueMismatch),
        }
    }

    /// Image of an element of the subfield `sub` in `self`.
    pub fn embed(&self, sub: &ValuedField, x: &FieldElement) -> Result<FieldElement> {
        let (r, u) = self.embedding_data(sub)?;
        match (x, &sub.backend) {
            (FieldElement::P(v), _) => {
                let (ms, m) = (sub.m(), self.m());
                let mut out = vec![Rat::zero(); self.dim()];
                let uinv = u.recip();
                for (i, q) in v.iter().enumerate() {
                    if q.is_zero() {
                        continue;
                    }
                    let (j, k) = (i / ms, i % ms);
                    out[j * r as usize * m + k] = q * num_traits::pow::pow(uinv.clone(), j);
                }
                Ok(FieldElement::P(out))
            }
            (FieldElement::L(l), Backend::Laurent { residue: small }) => {
                let big = self.laurent_residue().clone();
                let map = |c: &Res| -> Result<Res> {
                    match (&big, small, c) {
                        (ResidueField::Finite(b), ResidueField::Finite(s), Res::F(a)) => {
                            Ok(Res::F(b.embedding_from(s)?[*a as usize]))
                        }
                        _ => Ok(c.clone()),
                    }
                };
                let spread = |poly: &[Res]| -> Result<Vec<Res>> {
                    let mut out = vec![big.zero(); (poly.len().max(1) - 1) * r as usize + 1];
                    for (i, c) in poly.iter().enumerate() {
                        out[i * r as usize] = map(c)?;
                    }
                    Ok(out)
                };
                if l.num.is_empty() {
                    return Ok(self.zero());
                }
                Ok(FieldElement::L(normalize_laurent(&big, l.shift * r as i64, spread(&l.num)?, spread(&l.den)?)))
            }
            _ => Err(Error::ResidueMismatch),
        }
    }

    // ---------------------------------------------------------- serialization

    pub fn format(&self, x: &FieldElement) -> String {
        match (&self.backend, x) {
            (Backend::PAdic { .. }, FieldElement::P(v)) => {
                let m = self.m();
                let terms: Vec<(Rat, String)> = v
                    .iter()
                    .enumerate()
                    .filter(|(_, q)| !q.is_zero())
                    .map(|(i, q)| {
                        let (j, k) = (i / m, i % m);
                        let mut mono = Vec::new();
                        if j > 0 {
                            mono.push(if j == 1 { "pi".to_string() } else { format!("pi^{j}") });
                        }
                        if k > 0 {
                            mono.push(if k == 1 { "z".to_string() } else { format!("z^{k}") });
                        }
                        (q.clone(), mono.join("*"))
                    })
                    .collect();
                join_terms(terms)
            }
            (Backend::Laurent { residue }, FieldElement::L(l)) => {
                if l.num.is_empty() {
                    return "0".into();
                }
                let var = if self.e == 1 { "t" } else { "s" };
                let poly = |shift: i64, p: &[Res]| -> String {
                    let mut parts = Vec::new();
                    for (i, c) in p.iter().enumerate() {
                        if residue.is_zero(c) {
                            continue;
                        }
                        let ex = shift + i as i64;
                        let mono = match ex {
                            0 => String::new(),
                            1 => var.to_string(),
                            _ => format!("{var}^{ex}"),
                        };
                        let cs = residue.format(c);
                        let cs = if cs.contains('+') { format!("({cs})") } else { cs };
                        parts.push(match (cs.as_str(), mono.is_empty()) {
                            (_, true) => cs.clone(),
                            ("1", false) => mono,
                            ("-1", false) => format!("-{mono}"),
                            _ => format!("{cs}*{mono}"),
                        });
                    }
                    parts.join(" + ").replace("+ -", "- ")
                };
                if l.den.len() == 1 {
                    poly(l.shift, &l.num)
                } else {
                    format!("({})/({})", poly(l.shift, &l.num), poly(0, &l.den))
                }
            }
            _ => panic!("element from another backend"),
        }
    }

    /// Parses expressions built from integers, `+ - * / ^`, parentheses and
    /// the symbols `pi` (uniformizer), `z` (residue generator lift), `t`
    /// (base uniformizer of a Laurent field) and `s` (its `e`-th root).
    pub fn parse(&self, s: &str) -> Result<FieldElement> {
        let mut p = Parser { src: s.as_bytes(), pos: 0, field: self };
        let v = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(Error::Input(format!("trailing input in {s:?}")));
        }
        Ok(v)
    }

    // ------------------------------------------------------------ internals

    fn padic_mul(&self, a: &[Rat], b: &[Rat]) -> Vec<Rat> {
        let Backend::PAdic { p, unit, residue } = &self.backend else { unreachable!() };
        let (e, m) = (self.e as usize, self.m());
        let mut acc = vec![vec![Rat::zero(); 2 * m - 1]; 2 * e - 1];
        for (i1, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (i2, y) in b.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                acc[i1 / m + i2 / m][i1 % m + i2 % m] += x * y;
            }
        }
        if m > 1 {
            for row in acc.iter_mut() {
                for k in (m..2 * m - 1).rev() {
                    let c = std::mem::take(&mut row[k]);
                    if c.is_zero() {
                        continue;
                    }
                    for (i, fi) in residue.modulus.iter().enumerate() {
                        row[k - m + i] -= &c * Rat::from_integer((*fi).into());
                    }
                }
            }
        }
        let pu = unit * Rat::from_integer((*p).into());
        let mut out = vec![Rat::zero(); e * m];
        for (j, row) in acc.into_iter().enumerate() {
            for (k, c) in row.into_iter().take(m).enumerate() {
                if j >= e {
                    out[(j - e) * m + k] += c * &pu;
                } else {
                    out[j * m + k] += c;
                }
            }
        }
        out
    }

    fn padic_inv(&self, a: &[Rat]) -> Option<Vec<Rat>> {
        let n = self.dim();
        let cols: Vec<Vec<Rat>> = (0..n)
            .map(|i| {
                let mut b = vec![Rat::zero(); n];
                b[i] = Rat::one();
                self.padic_mul(a, &b)
            })
            .collect();
        let mat = matrix::transpose(&cols);
        let mut rhs = vec![Rat::zero(); n];
        rhs[0] = Rat::one();
        matrix::solve(&QQ, &mat, &rhs)
    }
}

fn join_terms(terms: Vec<(Rat, String)>) -> String {
    if terms.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, (c, mono)) in terms.into_iter().enumerate() {
        let neg = c.is_negative();
        let a = c.abs();
        let body = if mono.is_empty() {
            fmt_rat(&a)
        } else if a.is_one() {
            mono
        } else {
            format!("{}*{}", fmt_rat(&a), mono)
        };
        match (i, neg) {
            (0, false) => out += &body,
            (0, true) => out += &format!("-{body}"),
            (_, false) => out += &format!(" + {body}"),
            (_, true) => out += &format!(" - {body}"),
        }
    }
    out
}

/// Exact `n`-th root of a positive rational, if one exists.
fn rational_root(r: &Rat, n: u32) -> Option<Rat> {
    if n == 1 {
        return Some(r.clone());
    }
    let neg = r.is_negative();
    if neg && n % 2 == 0 {
        return None;
    }
    let root = |x: &BigInt| -> Option<BigInt> {
        let c = x.abs().nth_root(n);
        (num_traits::pow::pow(c.clone(), n as usize) == x.abs()).then_some(c)
    };
    let v = Rat::new(root(r.numer())?, root(r.denom())?);
    Some(if neg { -v } else { v })
}

fn normalize_laurent(k: &ResidueField, mut shift: i64, num: Vec<Res>, den: Vec<Res>) -> LaurentElem {
    let num = upoly::trim(k, num);
    if num.is_empty() {
        return LaurentElem { shift: 0, num: Vec::new(), den: vec![k.one()] };
    }
    let mut den = upoly::trim(k, den);
    let strip = |p: &mut Vec<Res>| -> i64 {
        let z = p.iter().take_while(|c| k.is_zero(c)).count();
        p.drain(..z);
        z as i64
    };
    let mut num = num;
    shift += strip(&mut num);
    shift -= strip(&mut den);
    let g = upoly::gcd(k, &num, &den);
    if g.len() > 1 {
        num = upoly::divrem(k, &num, &g).0;
        den = upoly::divrem(k, &den, &g).0;
    }
    let c = k.inv(&den[0]).unwrap();
    LaurentElem { shift, num: upoly::scale(k, &num, &c), den: upoly::scale(k, &den, &c) }
}

impl Field for ValuedField {
    type Elem = FieldElement;

    fn zero(&self) -> FieldElement {
        self.rational(&Rat::zero())
    }

    fn one(&self) -> FieldElement {
        self.rational(&Rat::one())
    }

    fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        match (a, b) {
            (FieldElement::P(x), FieldElement::P(y)) => {
                FieldElement::P(x.iter().zip(y).map(|(u, v)| u + v).collect())
            }
            (FieldElement::L(x), FieldElement::L(y)) => {
                let k = self.laurent_residue();
                if x.num.is_empty() {
                    return b.clone();
                }
                if y.num.is_empty() {
                    return a.clone();
                }
                let base = x.shift.min(y.shift);
                let lift = |l: &LaurentElem, other_den: &Vec<Res>| {
                    let mut p = vec![k.zero(); (l.shift - base) as usize];
                    p.extend(upoly::mul(k, &l.num, other_den));
                    p
                };
                let num = upoly::add(k, &lift(x, &y.den), &lift(y, &x.den));
                let den = upoly::mul(k, &x.den, &y.den);
                FieldElement::L(normalize_laurent(k, base, num, den))
            }
            _ => panic!("elements from different backends"),
        }
    }

    fn neg(&self, a: &FieldElement) -> FieldElement {
        match a {
            FieldElement::P(x) => FieldElement::P(x.iter().map(|u| -u).collect()),
            FieldElement::L(l) => {
                let k = self.laurent_residue();
                FieldElement::L(LaurentElem { shift: l.shift, num: upoly::neg(k, &l.num), den: l.den.clone() })
            }
        }
    }

    fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        match (a, b) {
            (FieldElement::P(x), FieldElement::P(y)) => FieldElement::P(self.padic_mul(x, y)),
            (FieldElement::L(x), FieldElement::L(y)) => {
                let k = self.laurent_residue();
                if x.num.is_empty() || y.num.is_empty() {
                    return self.zero();
                }
                FieldElement::L(normalize_laurent(
                    k,
                    x.shift + y.shift,
                    upoly::mul(k, &x.num, &y.num),
                    upoly::mul(k, &x.den, &y.den),
                ))
            }
            _ => panic!("elements from different backends"),
        }
    }

    fn inv(&self, a: &FieldElement) -> Option<FieldElement> {
        if self.is_zero(a) {
            return None;
        }
        match a {
            FieldElement::P(x) => self.padic_inv(x).map(FieldElement::P),
            FieldElement::L(l) => {
                let k = self.laurent_residue();
                Some(FieldElement::L(normalize_laurent(k, -l.shift, l.den.clone(), l.num.clone())))
            }
        }
    }

    fn is_zero(&self, a: &FieldElement) -> bool {
        match a {
            FieldElement::P(x) => x.iter().all(|q| q.is_zero()),
            FieldElement::L(l) => l.num.is_empty(),
        }
    }

    fn from_int(&self, n: i64) -> FieldElement {
        self.rational(&crate::rational::int(n))
    }

    fn characteristic(&self) -> u64 {
        match &self.backend {
            Backend::PAdic { .. } => 0,
            Backend::Laurent { residue } => residue.characteristic(),
        }
    }
}

impl fmt::Display for ValuedField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.describe())
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    field: &'a ValuedField,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Input(format!("{msg} at offset {} in {:?}", self.pos, String::from_utf8_lossy(self.src)))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<FieldElement> {
        let f = self.field;
        let mut acc = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                let t = self.term()?;
                f.neg(&t)
            }
            _ => self.term()?,
        };
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let t = self.term()?;
            acc = if c == b'+' { f.add(&acc, &t) } else { f.sub(&acc, &t) };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<FieldElement> {
        let f = self.field;
        let mut acc = self.power()?;
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let x = self.power()?;
            acc = if c == b'*' {
                f.mul(&acc, &x)
            } else {
                f.div(&acc, &x).ok_or_else(|| self.err("division by zero"))?
            };
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<FieldElement> {
        let f = self.field;
        let base = self.atom()?;
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        let neg = if self.peek() == Some(b'-') {
            self.pos += 1;
            true
        } else {
            false
        };
        let k = self.integer()?;
        let k: u64 = k.try_into().map_err(|_| self.err("exponent too large"))?;
        let p = f.pow(&base, k);
        if neg {
            f.inv(&p).ok_or_else(|| self.err("division by zero"))
        } else {
            Ok(p)
        }
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a number"));
        }
        std::str::from_utf8(&self.src[start..self.pos]).unwrap().parse().map_err(|_| self.err("bad number"))
    }

    fn atom(&mut self) -> Result<FieldElement> {
        let f = self.field;
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                Ok(f.rational(&Rat::from_integer(n)))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                match (name, &f.backend) {
                    ("pi", _) => Ok(f.uniformizer()),
                    ("s", Backend::Laurent { .. }) => Ok(f.uniformizer()),
                    ("t", Backend::Laurent { .. }) => Ok(f.base_uniformizer()),
                    ("z", _) => f.residue_generator().ok_or_else(|| self.err("no residue generator")),
                    _ => Err(self.err(&format!("unknown symbol {name:?}"))),
                }
            }
            _ => Err(self.err("unexpected input")),
        }
    }
}

/// JSON descriptor of a valued field:
/// `{"backend":"padic","p":2,"precision":20,"ramification":[6,"-1"],"unramified":1}`
/// or `{"backend":"laurent","base":"Q","ramification":[6,"1"]}`. The
/// ramification pair `[e, u]` adjoins `π` with `π^e = u·p` (resp. `s^e = t`).
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldDescriptor {
    pub backend: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<String>,
    #[serde(default = "default_precision")]
    pub precision: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ramification: Option<(u32, String)>,
    #[serde(default = "one_u32")]
    pub unramified: u32,
}

fn default_precision() -> u32 {
    DEFAULT_PRECISION
}

fn one_u32() -> u32 {
    1
}

impl FieldDescriptor {
    pub fn to_field(&self) -> Result<ValuedField> {
        let base = match self.backend.as_str() {
            "padic" => {
                let p = self.p.ok_or_else(|| Error::Input("padic descriptor needs \"p\"".into()))?;
                if !is_prime(p) {
                    return Err(Error::Input(format!("{p} is not prime")));
                }
                ValuedField::padic(p)?
            }
            "laurent" => {
                let b = self.base.as_deref().unwrap_or("Q");
                ValuedField::laurent(ResidueField::from_descriptor(b)?)
            }
            other => return Err(Error::Input(format!("unknown backend {other:?}"))),
        };
        let mut k = base.with_precision(self.precision).extend_unramified(self.unramified)?;
        if let Some((e, u)) = &self.ramification {
            k = k.extend_ramified_with_unit(*e, &crate::rational::parse_rat(u)?)?;
        }
        Ok(k)
    }

    pub fn from_field(k: &ValuedField) -> Self {
        match &k.backend {
            Backend::PAdic { p, unit, residue } => FieldDescriptor {
                backend: "padic".into(),
                p: Some(*p),
                base: None,
                precision: k.precision,
                ramification: (k.e > 1 || !unit.is_one()).then(|| (k.e, fmt_rat(unit))),
                unramified: residue.k,
            },
            Backend::Laurent { residue } => FieldDescriptor {
                backend: "laurent".into(),
                p: None,
                base: Some(residue.describe()),
                precision: k.precision,
                ramification: (k.e > 1).then(|| (k.e, "1".to_string())),
                unramified: 1,
            },
        }
    }

    /// Parses either JSON or a short form: `Q_p`, `Q((t))`, `F_p((t))`.
    pub fn parse(s: &str) -> Result<ValuedField> {
        let t = s.trim();
        if t.starts_with('{') {
            let d: FieldDescriptor = serde_json::from_str(t).map_err(|e| Error::Input(format!("field descriptor: {e}")))?;
            return d.to_field();
        }
        if let Some(p) = t.strip_prefix("Q_") {
            let p: u64 = p.parse().map_err(|_| Error::Input(format!("unknown field {t:?}")))?;
            return FieldDescriptor { backend: "padic".into(), p: Some(p), base: None, precision: DEFAULT_PRECISION, ramification: None, unramified: 1 }
                .to_field();
        }
        if let Some(b) = t.strip_suffix("((t))") {
            return Ok(ValuedField::laurent(ResidueField::from_descriptor(b)?));
        }
        Err(Error::Input(format!("unknown field {t:?}")))
    }
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|i| i * i <= p).all(|i| p % i != 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn q2() -> ValuedField {
        ValuedField::padic(2).unwrap()
    }

    #[test]
    fn uniformizer_and_zero_valuations() {
        let k = q2();
        assert_eq!(k.valuation(&k.uniformizer()), ExtRat::Fin(int(1)));
        assert_eq!(k.valuation(&k.zero()), ExtRat::Inf);
        let l = k.extend_ramified(6).unwrap();
        assert_eq!(l.valuation(&l.uniformizer()), ExtRat::Fin(rat(1, 6)));
    }

    #[test]
    fn reduce_in_sextic_extension_with_minus_one_unit() {
        let l = q2().extend_ramified_with_unit(6, &int(-1)).unwrap();
        let a = l.uniformizer();
        let x = l.div(&l.pow(&a, 6), &l.from_int(2)).unwrap();
        assert_eq!(l.reduce(&x).unwrap(), Res::F(1));
        assert_eq!(l.reduce(&l.from_int(2)).unwrap(), Res::F(0));
        assert_eq!(l.reduce(&l.inv(&a).unwrap()), Err(Error::NegativeValuation));
    }

    #[test]
    fn quadratic_extension_pi_squared_is_minus_two() {
        let l = q2().extend_ramified_with_unit(2, &int(-1)).unwrap();
        let pi = l.uniformizer();
        assert_eq!(l.mul(&pi, &pi), l.from_int(-2));
    }

    #[test]
    fn unramified_lift_reduces_back() {
        let l = q2().extend_unramified(2).unwrap();
        let rf = l.residue_field();
        let g = rf.gf().unwrap().clone();
        for a in g.elements() {
            let x = l.lift(&Res::F(a), &rf).unwrap();
            assert_eq!(l.reduce(&x).unwrap(), Res::F(a));
        }
        let zeta = l.residue_generator().unwrap();
        let rel = l.add(&l.add(&l.mul(&zeta, &zeta), &zeta), &l.one());
        assert!(l.is_zero(&rel));
        assert_eq!(l.lift(&Res::F(1), &ResidueField::finite(2, 1).unwrap()), Err(Error::ResidueMismatch));
    }

    #[test]
    fn laurent_extension_and_reduction() {
        let k = ValuedField::laurent(ResidueField::Rationals);
        let x = k.parse("1 + t").unwrap();
        assert_eq!(k.reduce(&x).unwrap(), Res::Q(int(1)));
        let l = k.extend_ramified(6).unwrap();
        let t = l.embed(&k, &k.uniformizer()).unwrap();
        assert_eq!(t, l.pow(&l.uniformizer(), 6));
        assert_eq!(l.valuation(&t), ExtRat::Fin(int(1)));
        let f3 = ValuedField::laurent(ResidueField::finite(3, 1).unwrap()).extend_unramified(2).unwrap();
        assert_eq!(f3.residue_field().cardinality(), Some(9));
        assert!(ValuedField::laurent(ResidueField::Rationals).extend_unramified(2).is_err());
    }

    #[test]
    fn padic_inverse_and_embedding() {
        let l = q2().extend_ramified_with_unit(2, &int(-1)).unwrap();
        let x = l.parse("1 + pi").unwrap();
        let y = l.inv(&x).unwrap();
        assert_eq!(l.mul(&x, &y), l.one());
        let l6 = l.extend_ramified(3).unwrap();
        let pi = l6.embed(&l, &l.uniformizer()).unwrap();
        assert_eq!(l6.mul(&pi, &pi), l6.from_int(-2));
        assert_eq!(l6.valuation(&pi), ExtRat::Fin(rat(1, 2)));
    }

    #[test]
    fn format_parse_round_trip() {
        let l = q2().extend_unramified(2).unwrap().extend_ramified(3).unwrap();
        for s in ["0", "1/3", "2*pi^2*z - pi + 5", "-pi*z^1"] {
            let x = l.parse(s).unwrap();
            assert_eq!(l.parse(&l.format(&x)).unwrap(), x);
        }
        let k = ValuedField::laurent(ResidueField::finite(2, 2).unwrap()).extend_ramified(2).unwrap();
        for s in ["t + z*s", "1/(1+s)", "(z+1)*s^-3"] {
            let x = k.parse(s).unwrap();
            assert_eq!(k.parse(&k.format(&x)).unwrap(), x);
        }
    }

    #[test]
    fn descriptor_round_trip() {
        let l = q2().extend_unramified(2).unwrap().extend_ramified_with_unit(3, &int(-1)).unwrap();
        let d = FieldDescriptor::from_field(&l);
        let j = serde_json::to_string(&d).unwrap();
        assert_eq!(FieldDescriptor::parse(&j).unwrap(), l);
        let k = FieldDescriptor::parse(r#"{"backend":"laurent","base":"Q","ramification":[6,"1"]}"#).unwrap();
        assert_eq!(k, ValuedField::laurent(ResidueField::Rationals).extend_ramified(6).unwrap());
        assert_eq!(FieldDescriptor::parse("Q_7").unwrap(), ValuedField::padic(7).unwrap());
        assert_eq!(FieldDescriptor::parse("F_5((t))").unwrap(), ValuedField::laurent(ResidueField::finite(5, 1).unwrap()));
        assert!(FieldDescriptor::parse(r#"{"backend":"padic","p":4}"#).is_err());
        assert!(FieldDescriptor::parse(r#"{"backend":"padic","p":3,"bogus":1}"#).is_err());
    }
}
