//! Sparse homogeneous forms, the coordinate-change action, normalization and
//! reduction.
//!
//! A matrix `g` acts by `ᵍF(x) = F(gᵀx)`, i.e. `x_i ↦ Σ_j g_{j,i} x_j`. This
//! is a left action, `act(g₂, act(g₁, F)) = act(g₂g₁, F)`. Read geometrically,
//! the rows of `g` are the points of the new projective frame: the new
//! coordinate point `e_j` is the old point `row_j(g)`.

use std::collections::BTreeMap;

use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::algebra::matrix::{self, Mat};
use crate::algebra::Field;
use crate::error::{Error, Result};
use crate::rational::{ExtRat, Rat};
use crate::residue::{Res, ResidueField};
use crate::valued_field::{FieldElement, ValuedField};

pub type Exps = Vec<u32>;

/// A homogeneous form of degree `d` in `n + 1` variables. Stored
/// coefficients are nonzero, so the key set is the support.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Form<E> {
    pub n: usize,
    pub d: u32,
    pub terms: BTreeMap<Exps, E>,
}

impl<E: Clone> Form<E> {
    pub fn zero(n: usize, d: u32) -> Self {
        Form { n, d, terms: BTreeMap::new() }
    }

    pub fn nvars(&self) -> usize {
        self.n + 1
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn support(&self) -> Vec<Exps> {
        self.terms.keys().cloned().collect()
    }

    pub fn map<G: Clone>(&self, f: impl Fn(&E) -> G) -> Form<G> {
        Form { n: self.n, d: self.d, terms: self.terms.iter().map(|(k, v)| (k.clone(), f(v))).collect() }
    }

    pub fn try_map<G: Clone>(&self, f: impl Fn(&E) -> Result<G>) -> Result<Form<G>> {
        let mut terms = BTreeMap::new();
        for (k, v) in &self.terms {
            terms.insert(k.clone(), f(v)?);
        }
        Ok(Form { n: self.n, d: self.d, terms })
    }
}

/// Builds a form from terms, summing repeats and pruning zeros.
pub fn from_terms<F: Field>(
    f: &F,
    n: usize,
    d: u32,
    terms: impl IntoIterator<Item = (Exps, F::Elem)>,
) -> Result<Form<F::Elem>> {
    let mut out = Form::zero(n, d);
    for (e, c) in terms {
        if e.len() != n + 1 || e.iter().sum::<u32>() != d {
            return Err(Error::Input(format!("exponent {e:?} is not of degree {d} in {} variables", n + 1)));
        }
        add_term(f, &mut out.terms, e, c);
    }
    Ok(out)
}

fn add_term<F: Field>(f: &F, terms: &mut BTreeMap<Exps, F::Elem>, e: Exps, c: F::Elem) {
    if f.is_zero(&c) {
        return;
    }
    match terms.get_mut(&e) {
        Some(v) => {
            let s = f.add(v, &c);
            if f.is_zero(&s) {
                terms.remove(&e);
            } else {
                *v = s;
            }
        }
        None => {
            terms.insert(e, c);
        }
    }
}

pub fn add<F: Field>(f: &F, a: &Form<F::Elem>, b: &Form<F::Elem>) -> Form<F::Elem> {
    let mut out = a.clone();
    for (e, c) in &b.terms {
        add_term(f, &mut out.terms, e.clone(), c.clone());
    }
    out
}

pub fn scale<F: Field>(f: &F, a: &Form<F::Elem>, c: &F::Elem) -> Form<F::Elem> {
    let mut out = Form::zero(a.n, a.d);
    for (e, x) in &a.terms {
        add_term(f, &mut out.terms, e.clone(), f.mul(x, c));
    }
    out
}

pub fn mul<F: Field>(f: &F, a: &Form<F::Elem>, b: &Form<F::Elem>) -> Form<F::Elem> {
    let mut out = Form::zero(a.n, a.d + b.d);
    for (ea, x) in &a.terms {
        for (eb, y) in &b.terms {
            let e = ea.iter().zip(eb).map(|(u, v)| u + v).collect();
            add_term(f, &mut out.terms, e, f.mul(x, y));
        }
    }
    out
}

pub fn pow<F: Field>(f: &F, a: &Form<F::Elem>, k: u32) -> Form<F::Elem> {
    let mut acc = from_terms(f, a.n, 0, [(vec![0; a.n + 1], f.one())]).unwrap();
    for _ in 0..k {
        acc = mul(f, &acc, a);
    }
    acc
}

/// The linear form `Σ a_i x_i`.
pub fn linear<F: Field>(f: &F, a: &[F::Elem]) -> Form<F::Elem> {
    let n = a.len() - 1;
    from_terms(
        f,
        n,
        1,
        a.iter().enumerate().map(|(i, c)| {
            let mut e = vec![0; n + 1];
            e[i] = 1;
            (e, c.clone())
        }),
    )
    .unwrap()
}

/// `ᵍF(x) = F(gᵀx)`.
pub fn act<F: Field>(f: &F, g: &Mat<F::Elem>, form: &Form<F::Elem>) -> Result<Form<F::Elem>> {
    let nv = form.n + 1;
    if g.len() != nv || g.iter().any(|r| r.len() != nv) {
        return Err(Error::Input("matrix size does not match the form".into()));
    }
    if f.is_zero(&matrix::det(f, g)) {
        return Err(Error::SingularMatrix);
    }
    Ok(substitute(f, g, form))
}

/// Largest dense table used by [`substitute`].
const DENSE_LIMIT: usize = 1 << 20;

/// `F(gᵀx)` without the invertibility check.
pub fn substitute<F: Field>(f: &F, g: &Mat<F::Elem>, form: &Form<F::Elem>) -> Form<F::Elem> {
    let nv = form.n + 1;
    let base = form.d as usize + 1;
    match base.checked_pow(nv as u32) {
        Some(size) if size <= DENSE_LIMIT => substitute_dense(f, g, form, base, size),
        _ => substitute_sparse(f, g, form),
    }
}

/// Monomials of degree `≤ d` are coded in radix `d + 1`, so multiplying
/// monomials adds their codes.
fn substitute_dense<F: Field>(f: &F, g: &Mat<F::Elem>, form: &Form<F::Elem>, base: usize, size: usize) -> Form<F::Elem> {
    let nv = form.n + 1;
    let unit: Vec<usize> = (0..nv).map(|i| base.pow(i as u32)).collect();
    let mut buf = vec![f.zero(); size];
    let mut touched: Vec<usize> = Vec::new();
    let mut mul = |a: &[(usize, F::Elem)], b: &[(usize, F::Elem)]| -> Vec<(usize, F::Elem)> {
        for (ca, x) in a {
            for (cb, y) in b {
                let c = ca + cb;
                if f.is_zero(&buf[c]) {
                    touched.push(c);
                }
                buf[c] = f.add(&buf[c], &f.mul(x, y));
            }
        }
        let mut out = Vec::with_capacity(touched.len());
        for c in touched.drain(..) {
            let v = std::mem::replace(&mut buf[c], f.zero());
            if !f.is_zero(&v) {
                out.push((c, v));
            }
        }
        out.sort_unstable_by_key(|t| t.0);
        out.dedup_by_key(|t| t.0);
        out
    };
    let mut powers: Vec<Vec<Vec<(usize, F::Elem)>>> = Vec::with_capacity(nv);
    for i in 0..nv {
        let img: Vec<(usize, F::Elem)> =
            (0..nv).filter(|&j| !f.is_zero(&g[j][i])).map(|j| (unit[j], g[j][i].clone())).collect();
        let mut pw = vec![vec![(0, f.one())]];
        for k in 1..=form.d as usize {
            let next = mul(&pw[k - 1], &img);
            pw.push(next);
        }
        powers.push(pw);
    }
    let mut acc: Vec<F::Elem> = vec![f.zero(); size];
    let mut used: Vec<usize> = Vec::new();
    for (e, c) in &form.terms {
        let mut prod = vec![(0, c.clone())];
        for (i, &k) in e.iter().enumerate() {
            if k > 0 {
                prod = mul(&prod, &powers[i][k as usize]);
            }
        }
        for (code, v) in prod {
            if f.is_zero(&acc[code]) {
                used.push(code);
            }
            acc[code] = f.add(&acc[code], &v);
        }
    }
    used.sort_unstable();
    used.dedup();
    let mut out = Form::zero(form.n, form.d);
    for code in used {
        if f.is_zero(&acc[code]) {
            continue;
        }
        let e: Vec<u32> = (0..nv).map(|i| ((code / unit[i]) % base) as u32).collect();
        out.terms.insert(e, acc[code].clone());
    }
    out
}

fn substitute_sparse<F: Field>(f: &F, g: &Mat<F::Elem>, form: &Form<F::Elem>) -> Form<F::Elem> {
    let nv = form.n + 1;
    let images: Vec<Form<F::Elem>> =
        (0..nv).map(|i| linear(f, &(0..nv).map(|j| g[j][i].clone()).collect::<Vec<_>>())).collect();
    let mut powers: Vec<Vec<Form<F::Elem>>> = Vec::with_capacity(nv);
    for img in &images {
        let mut pw = vec![pow(f, img, 0)];
        for k in 1..=form.d {
            let next = mul(f, &pw[k as usize - 1], img);
            pw.push(next);
        }
        powers.push(pw);
    }
    let mut out = Form::zero(form.n, form.d);
    for (e, c) in &form.terms {
        let mut prod = from_terms(f, form.n, 0, [(vec![0; nv], c.clone())]).unwrap();
        for (i, &k) in e.iter().enumerate() {
            if k > 0 {
                prod = mul(f, &prod, &powers[i][k as usize]);
            }
        }
        for (e2, c2) in prod.terms {
            add_term(f, &mut out.terms, e2, c2);
        }
    }
    out
}

pub fn eval<F: Field>(f: &F, form: &Form<F::Elem>, x: &[F::Elem]) -> F::Elem {
    let mut acc = f.zero();
    for (e, c) in &form.terms {
        let mut t = c.clone();
        for (xi, &k) in x.iter().zip(e) {
            if k > 0 {
                t = f.mul(&t, &f.pow(xi, k as u64));
            }
        }
        acc = f.add(&acc, &t);
    }
    acc
}

/// Partial derivative `∂F/∂x_i`, a form of degree `d − 1`.
pub fn partial<F: Field>(f: &F, form: &Form<F::Elem>, i: usize) -> Form<F::Elem> {
    let mut out = Form::zero(form.n, form.d.saturating_sub(1));
    for (e, c) in &form.terms {
        if e[i] == 0 {
            continue;
        }
        let mut e2 = e.clone();
        e2[i] -= 1;
        add_term(f, &mut out.terms, e2, f.mul(c, &f.from_int(e[i] as i64)));
    }
    out
}

/// Converts the coordinate list `y = Mx` (rows of `M` are the new coordinates
/// as linear forms in the old ones) into the acting matrix `(M⁻¹)ᵀ`.
pub fn coordinates_to_action<F: Field>(f: &F, m: &Mat<F::Elem>) -> Result<Mat<F::Elem>> {
    let inv = matrix::inverse(f, m).ok_or(Error::SingularMatrix)?;
    Ok(matrix::transpose(&inv))
}

// ------------------------------------------------------------------ valued

/// Minimum coefficient valuation, `∞` for the zero form.
pub fn min_valuation(k: &ValuedField, form: &Form<FieldElement>) -> ExtRat {
    form.terms.values().map(|c| k.valuation(c)).min().unwrap_or(ExtRat::Inf)
}

/// Divides by `π^m` where `m` is the minimum coefficient valuation; returns
/// the primitive form and `m`.
pub fn primitive_normalize(k: &ValuedField, form: &Form<FieldElement>) -> Result<(Form<FieldElement>, Rat)> {
    let m = match min_valuation(k, form) {
        ExtRat::Inf => return Err(Error::Input("the zero form has no normalization".into())),
        ExtRat::Fin(m) => m,
    };
    if !k.in_value_group(&m) {
        return Err(Error::ShiftNotInValueGroup(crate::rational::fmt_rat(&m)));
    }
    let steps = (&m * Rat::from_integer(k.e.into())).to_integer();
    let steps: i64 = steps.try_into().map_err(|_| Error::Input("valuation too large".into()))?;
    let c = k.uniformizer_pow(-steps);
    Ok((scale(k, form, &c), m))
}

/// Coefficientwise reduction of a primitive form.
pub fn reduce_form(k: &ValuedField, form: &Form<FieldElement>) -> Result<Form<Res>> {
    match min_valuation(k, form) {
        ExtRat::Fin(m) if m.is_zero_value() => {}
        _ => return Err(Error::NotPrimitive),
    }
    let rf = k.residue_field();
    let mut out = Form::zero(form.n, form.d);
    for (e, c) in &form.terms {
        add_term(&rf, &mut out.terms, e.clone(), k.reduce(c)?);
    }
    Ok(out)
}

trait ZeroValue {
    fn is_zero_value(&self) -> bool;
}

impl ZeroValue for Rat {
    fn is_zero_value(&self) -> bool {
        !self.is_positive() && !self.is_negative()
    }
}

pub fn embed_form(
    big: &ValuedField,
    small: &ValuedField,
    form: &Form<FieldElement>,
) -> Result<Form<FieldElement>> {
    form.try_map(|c| big.embed(small, c))
}

// ----------------------------------------------------------- serialization

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub exps: Vec<u32>,
    pub coeff: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormJson {
    pub n: usize,
    pub d: u32,
    pub terms: Vec<TermJson>,
}

impl FormJson {
    pub fn to_form(&self, k: &ValuedField) -> Result<Form<FieldElement>> {
        let terms = self.terms.iter().map(|t| Ok((t.exps.clone(), k.parse(&t.coeff)?))).collect::<Result<Vec<_>>>()?;
        from_terms(k, self.n, self.d, terms)
    }

    pub fn to_residue_form(&self, rf: &ResidueField) -> Result<Form<Res>> {
        let terms = self.terms.iter().map(|t| Ok((t.exps.clone(), rf.parse(&t.coeff)?))).collect::<Result<Vec<_>>>()?;
        from_terms(rf, self.n, self.d, terms)
    }

    pub fn from_form(k: &ValuedField, form: &Form<FieldElement>) -> Self {
        Self::build(form, |c| k.format(c))
    }

    pub fn from_residue_form(rf: &ResidueField, form: &Form<Res>) -> Self {
        Self::build(form, |c| rf.format(c))
    }

    fn build<E: Clone>(form: &Form<E>, fmt: impl Fn(&E) -> String) -> Self {
        FormJson {
            n: form.n,
            d: form.d,
            terms: form.terms.iter().rev().map(|(e, c)| TermJson { exps: e.clone(), coeff: fmt(c) }).collect(),
        }
    }
}

/// Parses a compact polynomial string such as `"x0^2*x2 - x1^3 + 2*x2^3"`.
/// Coefficients are field literals in the syntax of [`ValuedField::parse`]
/// wrapped in parentheses when they are not plain rationals.
pub fn parse_poly(k: &ValuedField, n: usize, s: &str) -> Result<Form<FieldElement>> {
    let terms = split_terms(s)?;
    let mut parsed = Vec::new();
    let mut degree = None;
    for (sign, body) in terms {
        let mut coeff = k.one();
        let mut e = vec![0u32; n + 1];
        for factor in body.split('*').map(str::trim).filter(|t| !t.is_empty()) {
            if let Some(rest) = factor.strip_prefix('x') {
                let (idx, pw) = match rest.split_once('^') {
                    Some((i, p)) => (i, p.parse::<u32>().map_err(|_| Error::Input(format!("bad exponent in {factor}")))?),
                    None => (rest, 1),
                };
                let idx: usize = idx.parse().map_err(|_| Error::Input(format!("bad variable {factor}")))?;
                if idx > n {
                    return Err(Error::Input(format!("variable {factor} out of range")));
                }
                e[idx] += pw;
            } else {
                coeff = k.mul(&coeff, &k.parse(factor)?);
            }
        }
        if sign {
            coeff = k.neg(&coeff);
        }
        let deg: u32 = e.iter().sum();
        match degree {
            None => degree = Some(deg),
            Some(d) if d != deg => return Err(Error::Input("polynomial is not homogeneous".into())),
            _ => {}
        }
        parsed.push((e, coeff));
    }
    from_terms(k, n, degree.unwrap_or(0), parsed)
}

/// Splits on top-level `+`/`-`, keeping parenthesized groups intact.
fn split_terms(s: &str) -> Result<Vec<(bool, String)>> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    let mut neg = false;
    let mut prev_caret = false;
    for ch in s.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        if depth == 0 && (ch == '+' || ch == '-') && !prev_caret {
            if !cur.trim().is_empty() {
                out.push((neg, cur.trim().to_string()));
            }
            cur.clear();
            neg = ch == '-';
        } else {
            cur.push(ch);
        }
        if !ch.is_whitespace() {
            prev_caret = ch == '^';
        }
    }
    if depth != 0 {
        return Err(Error::Input("unbalanced parentheses".into()));
    }
    if !cur.trim().is_empty() {
        out.push((neg, cur.trim().to_string()));
    }
    Ok(out)
}

/// Residue-field counterpart of [`parse_poly`].
pub fn parse_residue_poly(rf: &ResidueField, n: usize, s: &str) -> Result<Form<Res>> {
    let mut parsed = Vec::new();
    let mut degree = None;
    for (sign, body) in split_terms(s)? {
        let mut coeff = rf.one();
        let mut e = vec![0u32; n + 1];
        for factor in body.split('*').map(str::trim).filter(|t| !t.is_empty()) {
            if let Some(rest) = factor.strip_prefix('x') {
                let (idx, pw) = match rest.split_once('^') {
                    Some((i, p)) => (i, p.parse::<u32>().map_err(|_| Error::Input(format!("bad exponent in {factor}")))?),
                    None => (rest, 1),
                };
                let idx: usize = idx.parse().map_err(|_| Error::Input(format!("bad variable {factor}")))?;
                if idx > n {
                    return Err(Error::Input(format!("variable {factor} out of range")));
                }
                e[idx] += pw;
            } else {
                let lit = factor.trim_start_matches('(').trim_end_matches(')');
                coeff = rf.mul(&coeff, &rf.parse(lit)?);
            }
        }
        if sign {
            coeff = rf.neg(&coeff);
        }
        let deg: u32 = e.iter().sum();
        match degree {
            None => degree = Some(deg),
            Some(d) if d != deg => return Err(Error::Input("polynomial is not homogeneous".into())),
            _ => {}
        }
        parsed.push((e, coeff));
    }
    from_terms(rf, n, degree.unwrap_or(0), parsed)
}

/// Human-readable rendering, e.g. `x0^2*x2 + x1^3`.
pub fn format_form<E: Clone>(form: &Form<E>, fmt: impl Fn(&E) -> String) -> String {
    if form.is_zero() {
        return "0".into();
    }
    let mut parts = Vec::new();
    for (e, c) in form.terms.iter().rev() {
        let mono: Vec<String> = e
            .iter()
            .enumerate()
            .filter(|(_, &k)| k > 0)
            .map(|(i, &k)| if k == 1 { format!("x{i}") } else { format!("x{i}^{k}") })
            .collect();
        let cs = fmt(c);
        let cs = if cs.contains(' ') || cs[1..].contains(['+', '-']) { format!("({cs})") } else { cs };
        let mono = mono.join("*");
        parts.push(match (cs.as_str(), mono.is_empty()) {
            (_, true) => cs.clone(),
            ("1", false) => mono,
            ("-1", false) => format!("-{mono}"),
            _ => format!("{cs}*{mono}"),
        });
    }
    parts.join(" + ").replace("+ -", "- ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::QQ;
    use crate::rational::int;

    fn q(m: &[&[i64]]) -> Mat<Rat> {
        m.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()
    }

    #[test]
    fn dense_and_sparse_substitution_agree() {
        let k = ValuedField::padic(3).unwrap();
        let f = parse_poly(&k, 2, "x0^4 - 3*x0^2*x1*x2 + 9*x1^4 + x1*x2^3 - x2^4").unwrap();
        let g: Mat<FieldElement> =
            [[1, 2, 0], [0, 3, -1], [5, 0, 1]].iter().map(|r| r.iter().map(|&x| k.from_int(x)).collect()).collect();
        let base = f.d as usize + 1;
        let dense = substitute_dense(&k, &g, &f, base, base.pow(3));
        assert_eq!(dense, substitute_sparse(&k, &g, &f));
    }

    #[test]
    fn act_substitutes_transpose() {
        let k = ValuedField::padic(2).unwrap();
        let f = parse_poly(&k, 2, "x0^2*x2 - x1^3 + 2*x2^3").unwrap();
        // g2 = [[1,0,0],[0,1,0],[1,0,1]] realizes F(x0 + x2, x1, x2).
        let g: Mat<FieldElement> = matrix::map(&q(&[&[1, 0, 0], &[0, 1, 0], &[1, 0, 1]]), |r| k.rational(r));
        let got = act(&k, &g, &f).unwrap();
        let want = parse_poly(&k, 2, "x0^2*x2 + 2*x0*x2^2 - x1^3 + 3*x2^3").unwrap();
        assert_eq!(got, want);
    }

    #[test]
    fn act_is_a_left_action() {
        let f = from_terms(&QQ, 2, 3, [(vec![2, 0, 1], int(1)), (vec![0, 3, 0], int(-1)), (vec![1, 1, 1], int(5))]).unwrap();
        let g1 = q(&[&[1, 2, 0], &[0, 1, 0], &[3, 0, 1]]);
        let g2 = q(&[&[2, 0, 1], &[1, 1, 0], &[0, 0, 1]]);
        let lhs = act(&QQ, &g2, &act(&QQ, &g1, &f).unwrap()).unwrap();
        let rhs = act(&QQ, &matrix::mul(&QQ, &g2, &g1), &f).unwrap();
        assert_eq!(lhs, rhs);
        assert_eq!(act(&QQ, &matrix::identity(&QQ, 3), &f).unwrap(), f);
        assert_eq!(act(&QQ, &q(&[&[1, 1, 0], &[1, 1, 0], &[0, 0, 1]]), &f), Err(Error::SingularMatrix));
    }

    #[test]
    fn normalize_and_reduce_cusp() {
        let k = ValuedField::padic(2).unwrap();
        let f = parse_poly(&k, 2, "x0^2*x2 - x1^3 + 2*x2^3").unwrap();
        let (g, m) = primitive_normalize(&k, &f).unwrap();
        assert_eq!((g.clone(), m), (f.clone(), int(0)));
        let fbar = reduce_form(&k, &f).unwrap();
        let rf = k.residue_field();
        assert_eq!(fbar, parse_residue_poly(&rf, 2, "x0^2*x2 + x1^3").unwrap());
        let two = parse_poly(&k, 2, "2*x0^3").unwrap();
        assert_eq!(primitive_normalize(&k, &two).unwrap(), (parse_poly(&k, 2, "x0^3").unwrap(), int(1)));
        assert_eq!(reduce_form(&k, &two), Err(Error::NotPrimitive));
    }

    #[test]
    fn normalize_over_sextic_extension() {
        let l = ValuedField::padic(2).unwrap().extend_ramified_with_unit(6, &int(-1)).unwrap();
        let f = parse_poly(&l, 2, "pi^6*x0^2*x2 - pi^6*x1^3 + 2*x2^3").unwrap();
        let (g, m) = primitive_normalize(&l, &f).unwrap();
        assert_eq!(m, int(1));
        assert_eq!(g, parse_poly(&l, 2, "x0^2*x2 - x1^3 - x2^3").unwrap());
    }

    #[test]
    fn json_round_trip() {
        let k = ValuedField::padic(2).unwrap().extend_ramified_with_unit(2, &int(-1)).unwrap();
        let f = parse_poly(&k, 2, "(1+pi)*x0^2*x2 - x1^3 + 2*x2^3").unwrap();
        let j = FormJson::from_form(&k, &f);
        let s = serde_json::to_string(&j).unwrap();
        let back: FormJson = serde_json::from_str(&s).unwrap();
        assert_eq!(back.to_form(&k).unwrap(), f);
    }
}
