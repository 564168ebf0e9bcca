//! Dense univariate polynomials over a [`Field`], little-endian coefficient
//! vectors with no trailing zeros.

use super::field::Field;

pub type UPoly<E> = Vec<E>;

pub fn trim<F: Field>(f: &F, mut a: UPoly<F::Elem>) -> UPoly<F::Elem> {
    while a.last().is_some_and(|c| f.is_zero(c)) {
        a.pop();
    }
    a
}

pub fn degree<E>(a: &UPoly<E>) -> Option<usize> {
    a.len().checked_sub(1)
}

pub fn add<F: Field>(f: &F, a: &UPoly<F::Elem>, b: &UPoly<F::Elem>) -> UPoly<F::Elem> {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| match (a.get(i), b.get(i)) {
            (Some(x), Some(y)) => f.add(x, y),
            (Some(x), None) | (None, Some(x)) => x.clone(),
            (None, None) => unreachable!(),
        })
        .collect();
    trim(f, out)
}

pub fn neg<F: Field>(f: &F, a: &UPoly<F::Elem>) -> UPoly<F::Elem> {
    a.iter().map(|c| f.neg(c)).collect()
}

pub fn sub<F: Field>(f: &F, a: &UPoly<F::Elem>, b: &UPoly<F::Elem>) -> UPoly<F::Elem> {
    add(f, a, &neg(f, b))
}

pub fn mul<F: Field>(f: &F, a: &UPoly<F::Elem>, b: &UPoly<F::Elem>) -> UPoly<F::Elem> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![f.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if f.is_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = f.add(&out[i + j], &f.mul(x, y));
        }
    }
    trim(f, out)
}

pub fn scale<F: Field>(f: &F, a: &UPoly<F::Elem>, c: &F::Elem) -> UPoly<F::Elem> {
    trim(f, a.iter().map(|x| f.mul(x, c)).collect())
}

/// Quotient and remainder; panics on division by zero.
pub fn divrem<F: Field>(
    f: &F,
    a: &UPoly<F::Elem>,
    b: &UPoly<F::Elem>,
) -> (UPoly<F::Elem>, UPoly<F::Elem>) {
    let db = degree(b).expect("division by zero polynomial");
    let lead_inv = f.inv(&b[db]).unwrap();
    let mut r = a.clone();
    let mut q = vec![f.zero(); a.len().saturating_sub(db)];
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let c = f.mul(&r[dr], &lead_inv);
        for (i, y) in b.iter().enumerate() {
            let k = dr - db + i;
            r[k] = f.sub(&r[k], &f.mul(&c, y));
        }
        q[dr - db] = c;
        r = trim(f, r);
    }
    (trim(f, q), r)
}

pub fn monic<F: Field>(f: &F, a: &UPoly<F::Elem>) -> UPoly<F::Elem> {
    match a.last() {
        None => Vec::new(),
        Some(l) => scale(f, a, &f.inv(l).unwrap()),
    }
}

pub fn gcd<F: Field>(f: &F, a: &UPoly<F::Elem>, b: &UPoly<F::Elem>) -> UPoly<F::Elem> {
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_empty() {
        let (_, r) = divrem(f, &a, &b);
        a = b;
        b = r;
    }
    monic(f, &a)
}

pub fn eval<F: Field>(f: &F, a: &UPoly<F::Elem>, x: &F::Elem) -> F::Elem {
    a.iter().rev().fold(f.zero(), |acc, c| f.add(&f.mul(&acc, x), c))
}

/// Multiplicity of `x` as a root of a nonzero polynomial.
pub fn root_multiplicity<F: Field>(f: &F, a: &UPoly<F::Elem>, x: &F::Elem) -> usize {
    let lin = vec![f.neg(x), f.one()];
    let mut a = a.clone();
    let mut k = 0;
    loop {
        let (q, r) = divrem(f, &a, &lin);
        if !r.is_empty() || a.is_empty() {
            return k;
        }
        a = q;
        k += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::field::QQ;
    use crate::rational::int;

    fn p(v: &[i64]) -> UPoly<crate::rational::Rat> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn division_identity() {
        let f = QQ;
        let a = p(&[1, 2, 3, 4]);
        let b = p(&[1, 1]);
        let (q, r) = divrem(&f, &a, &b);
        assert_eq!(add(&f, &mul(&f, &q, &b), &r), a);
    }

    #[test]
    fn gcd_and_roots() {
        let f = QQ;
        let a = mul(&f, &p(&[-1, 1]), &p(&[-1, 1]));
        let b = mul(&f, &p(&[-1, 1]), &p(&[2, 1]));
        assert_eq!(gcd(&f, &a, &b), p(&[-1, 1]));
        assert_eq!(root_multiplicity(&f, &a, &int(1)), 2);
        assert_eq!(root_multiplicity(&f, &b, &int(3)), 0);
    }
}
