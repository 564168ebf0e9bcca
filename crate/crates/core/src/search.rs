//! Rational points and lines of plane curves over residue fields.
//!
//! Over a finite field `F_q` the search runs level by level over `F_{q^j}`,
//! `j ≤ m_max`, and reports at each level only the objects not already
//! defined over a smaller level. Over `Q` it finds the rational linear
//! factors and the rational singular points by elimination and the rational
//! root theorem.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::algebra::groebner::{self, MPoly, Order};
use crate::algebra::upoly::{self, UPoly};
use crate::algebra::{Field, GF, QQ};
use crate::error::{Error, Result};
use crate::forms::{self, Form};
use crate::geometry;
use crate::rational::Rat;
use crate::residue::{Res, ResidueField};

/// Largest number of plane points enumerated at one level.
pub const MAX_LEVEL_POINTS: u64 = 1 << 20;

/// Largest integer fully factored by trial division in the rational root
/// search.
const TRIAL_DIVISION_LIMIT: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Level {
    /// Degree `j` of the level over the base residue field.
    pub degree: u32,
    pub field: ResidueField,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoundPoint {
    pub point: Vec<Res>,
    pub multiplicity: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoundLine {
    pub line: Vec<Res>,
    pub multiplicity: u32,
}

/// Objects first defined at one level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelSearch {
    pub level: Level,
    /// The form with coefficients moved into the level field.
    pub form: Form<Res>,
    pub singular_points: Vec<FoundPoint>,
    pub lines: Vec<FoundLine>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchResult {
    pub levels: Vec<LevelSearch>,
    /// Highest level degree searched; below `m_max` when a level was too
    /// large to enumerate.
    pub searched_to: u32,
}

/// The levels `F_{q^j}`, `j ≤ m_max`, small enough to enumerate; only the
/// base level for the rationals.
pub fn levels(rf: &ResidueField, m_max: u32) -> Result<Vec<Level>> {
    match rf {
        ResidueField::Rationals => Ok(vec![Level { degree: 1, field: rf.clone() }]),
        ResidueField::Finite(g) => {
            let mut out = Vec::new();
            for j in 1..=m_max.max(1) {
                let Some(q) = g.q.checked_pow(j) else { break };
                if q.saturating_mul(q) > MAX_LEVEL_POINTS {
                    break;
                }
                out.push(Level { degree: j, field: ResidueField::Finite(GF::get(g.p, g.k * j)?) });
            }
            Ok(out)
        }
    }
}

/// Moves a residue element into an extension residue field.
pub fn embed_residue(from: &ResidueField, to: &ResidueField, a: &Res) -> Result<Res> {
    match (from, to, a) {
        (ResidueField::Rationals, ResidueField::Rationals, _) => Ok(a.clone()),
        (ResidueField::Finite(s), ResidueField::Finite(b), Res::F(x)) => {
            if s == b {
                return Ok(a.clone());
            }
            Ok(Res::F(embedding(b, s)?[*x as usize]))
        }
        _ => Err(Error::ResidueMismatch),
    }
}

fn embedding(big: &Arc<GF>, small: &Arc<GF>) -> Result<Vec<u32>> {
    big.embedding_from(small)
}

pub fn embed_residue_form(from: &ResidueField, to: &ResidueField, form: &Form<Res>) -> Result<Form<Res>> {
    if from == to {
        return Ok(form.clone());
    }
    if let (ResidueField::Finite(s), ResidueField::Finite(b)) = (from, to) {
        let table = embedding(b, s)?;
        return Ok(form.map(|c| Res::F(table[ResidueField::unwrap_f(c) as usize])));
    }
    form.try_map(|c| embed_residue(from, to, c))
}

/// Normalized points of `P^2` over a finite field, `[x:y:1]`, `[x:1:0]`,
/// `[1:0:0]`.
pub fn plane_points(g: &GF) -> impl Iterator<Item = Vec<Res>> + '_ {
    let q = g.q as u32;
    let affine = (0..q).flat_map(move |x| (0..q).map(move |y| vec![Res::F(x), Res::F(y), Res::F(1)]));
    let infinity = (0..q).map(|x| vec![Res::F(x), Res::F(1), Res::F(0)]);
    affine.chain(infinity).chain(std::iter::once(vec![Res::F(1), Res::F(0), Res::F(0)]))
}

/// Normalized points of `P^1`, `[x:1]` and `[1:0]`.
pub fn line_points(g: &GF) -> impl Iterator<Item = Vec<Res>> + '_ {
    (0..g.q as u32).map(|x| vec![Res::F(x), Res::F(1)]).chain(std::iter::once(vec![Res::F(1), Res::F(0)]))
}

/// Whether a normalized vector over `F_{q^degree}` is defined over a proper
/// subfield `F_{q^i}`, `i | degree`.
pub fn defined_below(g: &GF, base_k: u32, degree: u32, v: &[Res]) -> bool {
    (1..degree)
        .filter(|i| degree % i == 0)
        .any(|i| v.iter().all(|c| g.in_subfield(ResidueField::unwrap_f(c), base_k * i)))
}

pub fn rational_lines_and_points(rf: &ResidueField, form: &Form<Res>, m_max: u32) -> Result<SearchResult> {
    if form.n != 2 {
        return Err(Error::Input("point and line search is implemented for plane curves".into()));
    }
    match rf {
        ResidueField::Finite(base) => {
            let lv = levels(rf, m_max)?;
            let searched_to = lv.last().map_or(0, |l| l.degree);
            let mut out = Vec::new();
            for level in lv {
                out.push(search_finite_level(rf, base.k, level, form)?);
            }
            Ok(SearchResult { levels: out, searched_to })
        }
        ResidueField::Rationals => {
            let (lines, points) = rational_search(form)?;
            Ok(SearchResult {
                levels: vec![LevelSearch {
                    level: Level { degree: 1, field: rf.clone() },
                    form: form.clone(),
                    singular_points: points,
                    lines,
                }],
                searched_to: 1,
            })
        }
    }
}

fn search_finite_level(base: &ResidueField, base_k: u32, level: Level, form: &Form<Res>) -> Result<LevelSearch> {
    let f = level.field.clone();
    let g = f.gf().unwrap().clone();
    let form_l = embed_residue_form(base, &f, form)?;
    let partials: Vec<Form<Res>> = (0..3).map(|i| forms::partial(&f, &form_l, i)).collect();
    let mut singular_points = Vec::new();
    for p in plane_points(&g) {
        if defined_below(&g, base_k, level.degree, &p) {
            continue;
        }
        if !f.is_zero(&forms::eval(&f, &form_l, &p)) || partials.iter().any(|d| !f.is_zero(&forms::eval(&f, d, &p))) {
            continue;
        }
        let m = geometry::point_multiplicity(&f, &form_l, &p);
        singular_points.push(FoundPoint { point: p, multiplicity: m });
    }
    let mut lines = Vec::new();
    let d = form.d as u64;
    for l in plane_points(&g) {
        if defined_below(&g, base_k, level.degree, &l) {
            continue;
        }
        if g.q + 1 > d {
            // d + 1 zeros on the line force the restriction to vanish.
            let basis = geometry::points_on(&f, &l);
            let mut on = true;
            for s in 0..=d {
                let pt: Vec<Res> = if s == d {
                    basis[1].clone()
                } else {
                    let c = Res::F(s as u32);
                    (0..3).map(|j| f.add(&basis[0][j], &f.mul(&c, &basis[1][j]))).collect()
                };
                if !f.is_zero(&forms::eval(&f, &form_l, &pt)) {
                    on = false;
                    break;
                }
            }
            if !on {
                continue;
            }
        }
        let m = geometry::line_multiplicity(&f, &form_l, &l);
        if m > 0 {
            lines.push(FoundLine { line: l, multiplicity: m });
        }
    }
    Ok(LevelSearch { level, form: form_l, singular_points, lines })
}

// ---------------------------------------------------------------- over Q

fn q(x: &Res) -> &Rat {
    ResidueField::unwrap_q(x)
}

fn to_q_form(form: &Form<Res>) -> Form<Rat> {
    form.map(|c| q(c).clone())
}

fn from_q_vec(v: &[Rat]) -> Vec<Res> {
    v.iter().cloned().map(Res::Q).collect()
}

/// All rational roots of a univariate polynomial with rational coefficients.
pub fn rational_roots(p: &UPoly<Rat>) -> Result<Vec<Rat>> {
    let p = upoly::trim(&QQ, p.clone());
    if p.len() <= 1 {
        return Ok(Vec::new());
    }
    let l = crate::rational::lcm_denoms(p.iter());
    let mut c: Vec<BigInt> = p.iter().map(|x| (x * Rat::from_integer(l.clone())).to_integer()).collect();
    let mut roots = Vec::new();
    let zeros = c.iter().position(|x| !x.is_zero()).unwrap();
    if zeros > 0 {
        roots.push(Rat::zero());
        c.drain(..zeros);
    }
    if c.len() <= 1 {
        return Ok(roots);
    }
    let a0 = c[0].abs();
    let an = c.last().unwrap().abs();
    let nums = divisors(&a0)?;
    let dens = divisors(&an)?;
    let cq: UPoly<Rat> = c.iter().map(|x| Rat::from_integer(x.clone())).collect();
    let mut found = std::collections::BTreeSet::new();
    for a in &nums {
        for b in &dens {
            for s in [1i64, -1] {
                let r = Rat::new(a * BigInt::from(s), b.clone());
                if upoly::eval(&QQ, &cq, &r).is_zero() {
                    found.insert(r);
                }
            }
        }
    }
    roots.extend(found);
    Ok(roots)
}

fn divisors(n: &BigInt) -> Result<Vec<BigInt>> {
    let mut factors: Vec<(BigInt, u32)> = Vec::new();
    let mut m = n.clone();
    let mut p = BigInt::from(2);
    let limit = BigInt::from(TRIAL_DIVISION_LIMIT);
    while &p * &p <= m && p <= limit {
        let mut k = 0;
        while (&m % &p).is_zero() {
            m /= &p;
            k += 1;
        }
        if k > 0 {
            factors.push((p.clone(), k));
        }
        p += 1;
    }
    if m > BigInt::one() {
        if &limit * &limit < m {
            return Err(Error::UnsupportedResidue(format!("cannot factor {n} for the rational root search")));
        }
        factors.push((m, 1));
    }
    let mut out = vec![BigInt::one()];
    for (p, k) in factors {
        let prev = out.clone();
        let mut pk = BigInt::one();
        for _ in 0..k {
            pk *= &p;
            out.extend(prev.iter().map(|x| x * &pk));
        }
    }
    Ok(out)
}

/// Projective rational roots `[a:b]` of a binary form in `(y_0, y_1)`.
pub fn binary_roots(form: &Form<Rat>) -> Result<Vec<Vec<Rat>>> {
    let d = form.d as usize;
    let mut coeffs = vec![Rat::zero(); d + 1];
    for (e, c) in &form.terms {
        coeffs[e[0] as usize] = c.clone();
    }
    let mut out: Vec<Vec<Rat>> = rational_roots(&coeffs)?.into_iter().map(|a| vec![a, Rat::one()]).collect();
    if coeffs[d].is_zero() && !form.is_zero() {
        out.push(vec![Rat::one(), Rat::zero()]);
    }
    Ok(out)
}

/// Lagrange interpolation through `(x_k, y_k)`.
fn interpolate(xs: &[Rat], ys: &[Rat]) -> UPoly<Rat> {
    let mut acc: UPoly<Rat> = Vec::new();
    for (k, (xk, yk)) in xs.iter().zip(ys).enumerate() {
        if yk.is_zero() {
            continue;
        }
        let mut basis: UPoly<Rat> = vec![Rat::one()];
        let mut denom = Rat::one();
        for (j, xj) in xs.iter().enumerate() {
            if j != k {
                basis = upoly::mul(&QQ, &basis, &vec![-xj, Rat::one()]);
                denom *= xk - xj;
            }
        }
        acc = upoly::add(&QQ, &acc, &upoly::scale(&QQ, &basis, &(yk / denom)));
    }
    upoly::trim(&QQ, acc)
}

/// Rational linear factors with their multiplicities.
pub fn rational_linear_factors(form: &Form<Rat>) -> Result<Vec<(Vec<Rat>, u32)>> {
    let f = QQ;
    let mut out = Vec::new();
    let k2 = form.terms.keys().map(|e| e[2]).min().unwrap_or(0);
    if k2 > 0 {
        out.push((vec![Rat::zero(), Rat::zero(), Rat::one()], k2));
    }
    let rest = forms::from_terms(
        &f,
        2,
        form.d - k2,
        form.terms.iter().map(|(e, c)| (vec![e[0], e[1], e[2] - k2], c.clone())),
    )?;
    if rest.d == 0 {
        return Ok(out);
    }
    let at_infinity = forms::from_terms(
        &f,
        1,
        rest.d,
        rest.terms.iter().filter(|(e, _)| e[2] == 0).map(|(e, c)| (vec![e[0], e[1]], c.clone())),
    )?;
    let d = rest.d as i64;
    let xs: Vec<Rat> = (0..=d).map(|k| Rat::from_integer(k.into())).collect();
    for root in binary_roots(&at_infinity)? {
        // Lines with `x_2`-free part `b·x0 − a·x1`, plus an unknown `c·x2`.
        let (a, b) = (&root[0], &root[1]);
        let image = |c: &Rat| -> Form<Rat> {
            let z = Rat::zero();
            let o = Rat::one();
            // Rows hold coefficients of (y0, y1, y2) in each x_i, transposed.
            let g = if b.is_zero() {
                // x1 = c·x2.
                vec![vec![o.clone(), z.clone(), z.clone()], vec![z.clone(), z.clone(), z.clone()], vec![z.clone(), c.clone(), o.clone()]]
            } else {
                // x0 = a·x1 − c·x2.
                vec![vec![z.clone(), z.clone(), z.clone()], vec![a.clone(), o.clone(), z.clone()], vec![-c, z.clone(), o.clone()]]
            };
            forms::substitute(&f, &g, &rest)
        };
        let samples: Vec<Form<Rat>> = xs.iter().map(image).collect();
        let mut keys: std::collections::BTreeSet<Vec<u32>> = std::collections::BTreeSet::new();
        for s in &samples {
            keys.extend(s.terms.keys().cloned());
        }
        let mut common: Option<UPoly<Rat>> = None;
        for key in keys {
            let ys: Vec<Rat> = samples.iter().map(|s| s.terms.get(&key).cloned().unwrap_or_else(Rat::zero)).collect();
            let poly = interpolate(&xs, &ys);
            common = Some(match common {
                None => poly,
                Some(c) => upoly::gcd(&QQ, &c, &poly),
            });
        }
        let cs = match common {
            None => return Err(Error::Input("form vanishes identically".into())),
            Some(c) => rational_roots(&c)?,
        };
        for c in cs {
            let l = if b.is_zero() {
                vec![Rat::zero(), -Rat::one(), c]
            } else {
                vec![Rat::one(), -a, c]
            };
            let l = geometry::normalize(&f, &l);
            let m = geometry::line_multiplicity(&f, &rest, &l);
            if m > 0 && !out.iter().any(|(o, _)| *o == l) {
                out.push((l, m));
            }
        }
    }
    Ok(out)
}

fn chart_poly(form: &Form<Rat>, order: Order) -> MPoly<Rat> {
    let mut map: BTreeMap<Vec<u32>, Rat> = BTreeMap::new();
    for (e, c) in &form.terms {
        let k = vec![e[0], e[1]];
        let v = map.remove(&k).unwrap_or_else(Rat::zero) + c;
        if !v.is_zero() {
            map.insert(k, v);
        }
    }
    groebner::from_map(&QQ, order, &map)
}

/// Common rational zeros of plane forms, assuming finitely many.
fn common_rational_zeros(gens: &[Form<Rat>]) -> Result<Vec<Vec<Rat>>> {
    let mut out = Vec::new();
    // Chart x2 = 1.
    let polys: Vec<MPoly<Rat>> = gens.iter().map(|g| chart_poly(g, Order::Lex)).collect();
    let gb = groebner::groebner(&QQ, Order::Lex, &polys);
    let is_unit = gb.iter().any(|g| g.lead().iter().all(|&e| e == 0));
    if !is_unit {
        let has_pure = |v: usize| gb.iter().any(|g| g.lead()[v] > 0 && g.lead()[1 - v] == 0);
        if !(has_pure(0) && has_pure(1)) {
            return Err(Error::UnsupportedResidue("singular locus is not finite".into()));
        }
        let elim = gb.iter().find(|g| g.terms.iter().all(|(m, _)| m[0] == 0)).expect("lex basis eliminates x0");
        let mut u1 = vec![Rat::zero(); elim.lead()[1] as usize + 1];
        for (m, c) in &elim.terms {
            u1[m[1] as usize] = c.clone();
        }
        for y in rational_roots(&u1)? {
            let mut common: Option<UPoly<Rat>> = None;
            for g in &gb {
                let mut u: UPoly<Rat> = Vec::new();
                for (m, c) in &g.terms {
                    let k = m[0] as usize;
                    if u.len() <= k {
                        u.resize(k + 1, Rat::zero());
                    }
                    u[k] += c * num_traits::pow::pow(y.clone(), m[1] as usize);
                }
                let u = upoly::trim(&QQ, u);
                common = Some(match common {
                    None => u,
                    Some(c) => upoly::gcd(&QQ, &c, &u),
                });
            }
            for x in rational_roots(&common.unwrap_or_default())? {
                out.push(vec![x, y.clone(), Rat::one()]);
            }
        }
    }
    // Line at infinity x2 = 0: points [a:1:0] and [1:0:0].
    let mut common: Option<UPoly<Rat>> = None;
    for g in gens {
        let mut u: UPoly<Rat> = vec![Rat::zero(); g.d as usize + 1];
        for (e, c) in &g.terms {
            if e[2] == 0 {
                u[e[0] as usize] += c;
            }
        }
        let u = upoly::trim(&QQ, u);
        common = Some(match common {
            None => u,
            Some(c) => upoly::gcd(&QQ, &c, &u),
        });
    }
    let common = common.unwrap_or_default();
    if common.is_empty() {
        return Err(Error::UnsupportedResidue("singular locus contains the line at infinity".into()));
    }
    for a in rational_roots(&common)? {
        out.push(vec![a, Rat::one(), Rat::zero()]);
    }
    let e0 = vec![Rat::one(), Rat::zero(), Rat::zero()];
    if gens.iter().all(|g| forms::eval(&QQ, g, &e0).is_zero()) {
        out.push(e0);
    }
    Ok(out)
}

fn rational_search(form: &Form<Res>) -> Result<(Vec<FoundLine>, Vec<FoundPoint>)> {
    let f = QQ;
    let fq = to_q_form(form);
    let factors = rational_linear_factors(&fq)?;
    // Strip multiple lines; their generic points are dominated by the line
    // itself, so only their meeting points with the rest of the curve matter.
    let mut h = fq.clone();
    for (l, m) in factors.iter().filter(|(_, m)| *m >= 2) {
        h = geometry::divide_by_line_power(&f, &h, l, *m);
    }
    let mut pts: Vec<Vec<Rat>> = Vec::new();
    if h.d >= 2 {
        let mut gens = vec![h.clone()];
        gens.extend((0..3).map(|i| forms::partial(&f, &h, i)));
        gens.retain(|g| !g.is_zero());
        pts.extend(common_rational_zeros(&gens)?);
    }
    for (l, m) in factors.iter().filter(|(_, m)| *m >= 2) {
        let rest = geometry::divide_by_line_power(&f, &fq, l, *m);
        let frame = geometry::line_frame(&f, l);
        let on_line = forms::act(&f, &frame, &rest)?;
        let restricted = forms::from_terms(
            &f,
            1,
            rest.d,
            on_line.terms.iter().filter(|(e, _)| e[0] == 0).map(|(e, c)| (vec![e[1], e[2]], c.clone())),
        )?;
        if restricted.d == 0 {
            continue;
        }
        for r in binary_roots(&restricted)? {
            let p: Vec<Rat> = (0..3).map(|j| &r[0] * &frame[1][j] + &r[1] * &frame[2][j]).collect();
            pts.push(p);
        }
    }
    let mut points: Vec<FoundPoint> = Vec::new();
    for p in pts {
        let p = geometry::normalize(&f, &p);
        if points.iter().any(|o| from_q_vec(&p) == o.point) {
            continue;
        }
        let m = geometry::point_multiplicity(&f, &fq, &p);
        if m >= 2 {
            points.push(FoundPoint { point: from_q_vec(&p), multiplicity: m });
        }
    }
    points.sort_by(|a, b| a.point.cmp(&b.point));
    let lines = factors.into_iter().map(|(l, m)| FoundLine { line: from_q_vec(&l), multiplicity: m }).collect();
    Ok((lines, points))
}

/// Projective roots of a binary residue form over a level field.
pub fn residue_binary_roots(f: &ResidueField, form: &Form<Res>) -> Result<Vec<Vec<Res>>> {
    match f {
        ResidueField::Finite(g) => {
            Ok(line_points(g).filter(|p| f.is_zero(&forms::eval(f, form, p))).collect())
        }
        ResidueField::Rationals => Ok(binary_roots(&to_q_form(form))?.iter().map(|r| from_q_vec(r)).collect()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn gf2() -> ResidueField {
        ResidueField::finite(2, 1).unwrap()
    }

    #[test]
    fn three_double_points_of_the_quartic_fiber() {
        let f = gf2();
        let form = forms::parse_residue_poly(&f, 2, "x0^4 + x0^3*x2 + x0*x1^2*x2 + x0^2*x2^2 + x0*x2^3 + x2^4").unwrap();
        let res = rational_lines_and_points(&f, &form, 2).unwrap();
        assert_eq!(res.searched_to, 2);
        let base = &res.levels[0];
        assert_eq!(base.singular_points, vec![FoundPoint { point: vec![Res::F(0), Res::F(1), Res::F(0)], multiplicity: 2 }]);
        assert_eq!(res.levels[1].singular_points.len(), 2);
        assert!(res.levels[1].singular_points.iter().all(|p| p.multiplicity == 2));
        assert!(res.levels.iter().all(|l| l.lines.is_empty()));
    }

    #[test]
    fn lines_of_a_reducible_quartic() {
        let f = gf2();
        let form = forms::mul(
            &f,
            &forms::parse_residue_poly(&f, 2, "x0*x2").unwrap(),
            &forms::pow(&f, &forms::parse_residue_poly(&f, 2, "x0 + x1 + x2").unwrap(), 2),
        );
        let res = rational_lines_and_points(&f, &form, 1).unwrap();
        let mut lines: Vec<(Vec<Res>, u32)> = res.levels[0].lines.iter().map(|l| (l.line.clone(), l.multiplicity)).collect();
        lines.sort();
        let v = |a: &[u32]| a.iter().map(|&x| Res::F(x)).collect::<Vec<_>>();
        let mut want = vec![(v(&[1, 0, 0]), 1), (v(&[0, 0, 1]), 1), (v(&[1, 1, 1]), 2)];
        want.sort();
        assert_eq!(lines, want);
    }

    #[test]
    fn smooth_fermat_cubic_over_f7() {
        let f = ResidueField::finite(7, 1).unwrap();
        let form = forms::parse_residue_poly(&f, 2, "x0^3 + x1^3 + x2^3").unwrap();
        let res = rational_lines_and_points(&f, &form, 1).unwrap();
        assert!(res.levels[0].singular_points.is_empty());
        assert!(res.levels[0].lines.is_empty());
    }

    #[test]
    fn rational_roots_and_factors() {
        // 2x^3 − 3x^2 − 3x + 2 = (x − 2)(2x − 1)(x + 1).
        let p = vec![int(2), int(-3), int(-3), int(2)];
        assert_eq!(rational_roots(&p).unwrap(), vec![int(-1), crate::rational::rat(1, 2), int(2)]);
        let rf = ResidueField::Rationals;
        // (x0 − x1 + 2x2)^2 · x2 · (x0^2 + x1^2 + x2^2)
        let l = forms::parse_residue_poly(&rf, 2, "x0 - x1 + 2*x2").unwrap();
        let form = forms::mul(
            &rf,
            &forms::mul(&rf, &forms::pow(&rf, &l, 2), &forms::parse_residue_poly(&rf, 2, "x2").unwrap()),
            &forms::parse_residue_poly(&rf, 2, "x0^2 + x1^2 + x2^2").unwrap(),
        );
        let facs = rational_linear_factors(&to_q_form(&form)).unwrap();
        assert_eq!(facs.len(), 2);
        assert!(facs.contains(&(vec![int(0), int(0), int(1)], 1)));
        assert!(facs.contains(&(vec![crate::rational::rat(1, 2), crate::rational::rat(-1, 2), int(1)], 2)));
    }

    #[test]
    fn rational_singular_points_of_nodal_cubic() {
        let rf = ResidueField::Rationals;
        // Node at [0:0:1] and nothing else.
        let form = forms::parse_residue_poly(&rf, 2, "x1^2*x2 - x0^2*x2 - x0^3").unwrap();
        let res = rational_lines_and_points(&rf, &form, 1).unwrap();
        assert_eq!(
            res.levels[0].singular_points,
            vec![FoundPoint { point: vec![Res::Q(int(0)), Res::Q(int(0)), Res::Q(int(1))], multiplicity: 2 }]
        );
        let cusp = forms::parse_residue_poly(&rf, 2, "x0^2*x2 - x1^3 + x2^3").unwrap();
        let res = rational_lines_and_points(&rf, &cusp, 1).unwrap();
        assert!(res.levels[0].singular_points.is_empty());
    }
}
