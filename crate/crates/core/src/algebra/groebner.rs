//! Sparse multivariate polynomials and Buchberger's algorithm.
//!
//! Used to certify emptiness of singular loci (smoothness) and to eliminate
//! variables when searching for rational singular points.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use super::field::Field;

pub type Monomial = Vec<u32>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Order {
    /// Lexicographic with `x_0 > x_1 > …`.
    Lex,
    /// Graded reverse lexicographic.
    GrevLex,
}

pub fn cmp_monomials(order: Order, a: &[u32], b: &[u32]) -> Ordering {
    match order {
        Order::Lex => a.cmp(b),
        Order::GrevLex => {
            let (da, db): (u32, u32) = (a.iter().sum(), b.iter().sum());
            da.cmp(&db).then_with(|| {
                for i in (0..a.len()).rev() {
                    if a[i] != b[i] {
                        return b[i].cmp(&a[i]);
                    }
                }
                Ordering::Equal
            })
        }
    }
}

/// Polynomial as terms sorted by decreasing monomial order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MPoly<E> {
    pub terms: Vec<(Monomial, E)>,
}

impl<E: Clone> MPoly<E> {
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn lead(&self) -> &Monomial {
        &self.terms[0].0
    }
}

pub fn from_map<F: Field>(f: &F, order: Order, map: &BTreeMap<Monomial, F::Elem>) -> MPoly<F::Elem> {
    let mut terms: Vec<_> =
        map.iter().filter(|(_, c)| !f.is_zero(c)).map(|(m, c)| (m.clone(), c.clone())).collect();
    terms.sort_by(|a, b| cmp_monomials(order, &b.0, &a.0));
    MPoly { terms }
}

fn combine<F: Field>(
    f: &F,
    order: Order,
    a: &MPoly<F::Elem>,
    b: &MPoly<F::Elem>,
    cb: &F::Elem,
    shift: &[u32],
) -> MPoly<F::Elem> {
    // a + cb * x^shift * b
    let mut out = Vec::with_capacity(a.terms.len() + b.terms.len());
    let shifted: Vec<(Monomial, F::Elem)> = b
        .terms
        .iter()
        .map(|(m, c)| (m.iter().zip(shift).map(|(x, y)| x + y).collect(), f.mul(c, cb)))
        .collect();
    let (mut i, mut j) = (0, 0);
    while i < a.terms.len() || j < shifted.len() {
        let ord = match (a.terms.get(i), shifted.get(j)) {
            (Some(x), Some(y)) => cmp_monomials(order, &x.0, &y.0),
            (Some(_), None) => Ordering::Greater,
            (None, Some(_)) => Ordering::Less,
            (None, None) => unreachable!(),
        };
        match ord {
            Ordering::Greater => {
                out.push(a.terms[i].clone());
                i += 1;
            }
            Ordering::Less => {
                out.push(shifted[j].clone());
                j += 1;
            }
            Ordering::Equal => {
                let c = f.add(&a.terms[i].1, &shifted[j].1);
                if !f.is_zero(&c) {
                    out.push((a.terms[i].0.clone(), c));
                }
                i += 1;
                j += 1;
            }
        }
    }
    MPoly { terms: out }
}

fn divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn monic<F: Field>(f: &F, p: MPoly<F::Elem>) -> MPoly<F::Elem> {
    if p.is_zero() {
        return p;
    }
    let inv = f.inv(&p.terms[0].1).unwrap();
    MPoly { terms: p.terms.into_iter().map(|(m, c)| (m, f.mul(&c, &inv))).collect() }
}

/// Full reduction of `p` modulo `basis`.
pub fn reduce<F: Field>(f: &F, order: Order, p: &MPoly<F::Elem>, basis: &[MPoly<F::Elem>]) -> MPoly<F::Elem> {
    let mut p = p.clone();
    let mut rem: Vec<(Monomial, F::Elem)> = Vec::new();
    while !p.is_zero() {
        let (lm, lc) = p.terms[0].clone();
        match basis.iter().find(|g| !g.is_zero() && divides(g.lead(), &lm)) {
            Some(g) => {
                let shift: Vec<u32> = lm.iter().zip(g.lead()).map(|(x, y)| x - y).collect();
                let c = f.neg(&f.div(&lc, &g.terms[0].1).unwrap());
                p = combine(f, order, &p, g, &c, &shift);
            }
            None => {
                rem.push((lm, lc));
                p.terms.remove(0);
            }
        }
    }
    MPoly { terms: rem }
}

/// Reduced Gröbner basis of the ideal generated by `gens`.
pub fn groebner<F: Field>(f: &F, order: Order, gens: &[MPoly<F::Elem>]) -> Vec<MPoly<F::Elem>> {
    let mut basis: Vec<MPoly<F::Elem>> =
        gens.iter().filter(|g| !g.is_zero()).cloned().map(|g| monic(f, g)).collect();
    let mut pairs: Vec<(usize, usize)> =
        (0..basis.len()).flat_map(|j| (0..j).map(move |i| (i, j))).collect();
    while let Some((i, j)) = pairs.pop() {
        let (a, b) = (&basis[i], &basis[j]);
        let lcm: Vec<u32> = a.lead().iter().zip(b.lead()).map(|(x, y)| *x.max(y)).collect();
        if a.lead().iter().zip(b.lead()).all(|(x, y)| *x == 0 || *y == 0) {
            continue;
        }
        let sa: Vec<u32> = lcm.iter().zip(a.lead()).map(|(x, y)| x - y).collect();
        let sb: Vec<u32> = lcm.iter().zip(b.lead()).map(|(x, y)| x - y).collect();
        let zero = MPoly { terms: Vec::new() };
        let left = combine(f, order, &zero, a, &f.one(), &sa);
        let s = combine(f, order, &left, b, &f.neg(&f.one()), &sb);
        let r = reduce(f, order, &s, &basis);
        if !r.is_zero() {
            basis.push(monic(f, r));
            let k = basis.len() - 1;
            pairs.extend((0..k).map(|i| (i, k)));
        }
    }
    // Minimalize and interreduce.
    let mut minimal: Vec<MPoly<F::Elem>> = Vec::new();
    for (idx, g) in basis.iter().enumerate() {
        let redundant = basis.iter().enumerate().any(|(j, h)| {
            j != idx && divides(h.lead(), g.lead()) && (h.lead() != g.lead() || j < idx)
        });
        if !redundant {
            minimal.push(g.clone());
        }
    }
    let mut out = Vec::with_capacity(minimal.len());
    for i in 0..minimal.len() {
        let others: Vec<_> =
            minimal.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, g)| g.clone()).collect();
        let head = MPoly { terms: vec![minimal[i].terms[0].clone()] };
        let tail = MPoly { terms: minimal[i].terms[1..].to_vec() };
        let tail = reduce(f, order, &tail, &others);
        let mut terms = head.terms;
        terms.extend(tail.terms);
        out.push(MPoly { terms });
    }
    out.sort_by(|a, b| cmp_monomials(order, a.lead(), b.lead()));
    out
}

/// Whether the ideal of homogeneous generators defines the empty set in
/// projective space, i.e. contains a power of every variable.
pub fn projectively_empty<F: Field>(f: &F, gens: &[MPoly<F::Elem>], nvars: usize) -> bool {
    let gb = groebner(f, Order::GrevLex, gens);
    (0..nvars).all(|v| {
        gb.iter().any(|g| g.lead().iter().enumerate().all(|(i, &e)| (i == v) == (e > 0)))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::field::QQ;
    use crate::rational::int;

    fn poly(terms: &[(&[u32], i64)]) -> MPoly<crate::rational::Rat> {
        let map = terms.iter().map(|(m, c)| (m.to_vec(), int(*c))).collect();
        from_map(&QQ, Order::GrevLex, &map)
    }

    #[test]
    fn coordinate_axes_meet_only_at_origin() {
        let gens = [poly(&[(&[1, 0, 0], 1)]), poly(&[(&[0, 1, 0], 1)]), poly(&[(&[0, 0, 1], 1)])];
        assert!(projectively_empty(&QQ, &gens, 3));
        let gens = [poly(&[(&[1, 0, 0], 1)]), poly(&[(&[0, 1, 0], 1)])];
        assert!(!projectively_empty(&QQ, &gens, 3));
    }

    #[test]
    fn gradient_of_smooth_conic_has_no_common_zero() {
        // x0^2 + x1^2 + x2^2: partials 2x0, 2x1, 2x2.
        let gens = [
            poly(&[(&[2, 0, 0], 1), (&[0, 2, 0], 1), (&[0, 0, 2], 1)]),
            poly(&[(&[1, 0, 0], 2)]),
            poly(&[(&[0, 1, 0], 2)]),
            poly(&[(&[0, 0, 1], 2)]),
        ];
        assert!(projectively_empty(&QQ, &gens, 3));
    }

    #[test]
    fn reduction_by_basis_is_zero_on_ideal_members() {
        let a = poly(&[(&[2, 0, 0], 1), (&[0, 1, 1], -1)]);
        let b = poly(&[(&[1, 1, 0], 1), (&[0, 0, 2], -1)]);
        let gb = groebner(&QQ, Order::GrevLex, &[a.clone(), b.clone()]);
        let prod = combine(&QQ, Order::GrevLex, &a, &b, &int(3), &[1, 0, 1]);
        assert!(reduce(&QQ, Order::GrevLex, &prod, &gb).is_zero());
    }
}
