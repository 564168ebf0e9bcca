//! Square and rectangular matrices over a [`Field`], stored row-major.

use super::field::Field;

pub type Mat<E> = Vec<Vec<E>>;

pub fn identity<F: Field>(f: &F, n: usize) -> Mat<F::Elem> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { f.one() } else { f.zero() }).collect())
        .collect()
}

pub fn transpose<E: Clone>(a: &Mat<E>) -> Mat<E> {
    if a.is_empty() {
        return Vec::new();
    }
    (0..a[0].len()).map(|j| a.iter().map(|row| row[j].clone()).collect()).collect()
}

pub fn mul<F: Field>(f: &F, a: &Mat<F::Elem>, b: &Mat<F::Elem>) -> Mat<F::Elem> {
    let m = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..m)
                .map(|j| {
                    row.iter()
                        .zip(b.iter())
                        .fold(f.zero(), |acc, (x, brow)| f.add(&acc, &f.mul(x, &brow[j])))
                })
                .collect()
        })
        .collect()
}

pub fn map<E, G>(a: &Mat<E>, g: impl Fn(&E) -> G) -> Mat<G> {
    a.iter().map(|row| row.iter().map(&g).collect()).collect()
}

pub fn try_map<E, G, X>(a: &Mat<E>, g: impl Fn(&E) -> Result<G, X>) -> Result<Mat<G>, X> {
    a.iter().map(|row| row.iter().map(&g).collect()).collect()
}

/// Determinant by Gaussian elimination.
pub fn det<F: Field>(f: &F, a: &Mat<F::Elem>) -> F::Elem {
    let n = a.len();
    let mut m = a.clone();
    let mut d = f.one();
    for c in 0..n {
        let Some(piv) = (c..n).find(|&r| !f.is_zero(&m[r][c])) else {
            return f.zero();
        };
        if piv != c {
            m.swap(piv, c);
            d = f.neg(&d);
        }
        d = f.mul(&d, &m[c][c]);
        let inv = f.inv(&m[c][c]).unwrap();
        for r in c + 1..n {
            if f.is_zero(&m[r][c]) {
                continue;
            }
            let factor = f.mul(&m[r][c], &inv);
            for k in c..n {
                let t = f.mul(&factor, &m[c][k]);
                m[r][k] = f.sub(&m[r][k], &t);
            }
        }
    }
    d
}

/// Inverse by Gauss–Jordan; `None` if singular.
pub fn inverse<F: Field>(f: &F, a: &Mat<F::Elem>) -> Option<Mat<F::Elem>> {
    let n = a.len();
    let mut m: Mat<F::Elem> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { f.one() } else { f.zero() }));
            r
        })
        .collect();
    for c in 0..n {
        let piv = (c..n).find(|&r| !f.is_zero(&m[r][c]))?;
        m.swap(piv, c);
        let inv = f.inv(&m[c][c]).unwrap();
        for k in 0..2 * n {
            m[c][k] = f.mul(&m[c][k], &inv);
        }
        for r in 0..n {
            if r == c || f.is_zero(&m[r][c]) {
                continue;
            }
            let factor = m[r][c].clone();
            for k in 0..2 * n {
                let t = f.mul(&factor, &m[c][k]);
                m[r][k] = f.sub(&m[r][k], &t);
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Solves `a x = b` for square nonsingular `a`.
pub fn solve<F: Field>(f: &F, a: &Mat<F::Elem>, b: &[F::Elem]) -> Option<Vec<F::Elem>> {
    let inv = inverse(f, a)?;
    Some(
        inv.iter()
            .map(|row| row.iter().zip(b).fold(f.zero(), |acc, (x, y)| f.add(&acc, &f.mul(x, y))))
            .collect(),
    )
}

/// A basis of the null space of `a` (vectors `x` with `a x = 0`).
pub fn kernel<F: Field>(f: &F, a: &Mat<F::Elem>, ncols: usize) -> Vec<Vec<F::Elem>> {
    let mut m = a.clone();
    let mut pivots = Vec::new();
    let mut row = 0;
    for c in 0..ncols {
        let Some(piv) = (row..m.len()).find(|&r| !f.is_zero(&m[r][c])) else {
            continue;
        };
        m.swap(piv, row);
        let inv = f.inv(&m[row][c]).unwrap();
        for k in 0..ncols {
            m[row][k] = f.mul(&m[row][k], &inv);
        }
        for r in 0..m.len() {
            if r == row || f.is_zero(&m[r][c]) {
                continue;
            }
            let factor = m[r][c].clone();
            for k in 0..ncols {
                let t = f.mul(&factor, &m[row][k]);
                m[r][k] = f.sub(&m[r][k], &t);
            }
        }
        pivots.push(c);
        row += 1;
    }
    (0..ncols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut x = vec![f.zero(); ncols];
            x[free] = f.one();
            for (r, &pc) in pivots.iter().enumerate() {
                x[pc] = f.neg(&m[r][free]);
            }
            x
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::field::QQ;
    use crate::rational::int;

    #[test]
    fn inverse_and_determinant() {
        let f = QQ;
        let a = map(&vec![vec![2, 0, 0], vec![0, 1, 0], vec![1, 0, 1]], |&x| int(x));
        assert_eq!(det(&f, &a), int(2));
        let ai = inverse(&f, &a).unwrap();
        assert_eq!(mul(&f, &a, &ai), identity(&f, 3));
        let s = map(&vec![vec![1, 2], vec![2, 4]], |&x| int(x));
        assert!(inverse(&f, &s).is_none());
        assert_eq!(kernel(&f, &s, 2).len(), 1);
    }
}
