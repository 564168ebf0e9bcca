//! Local geometry of plane curves over a field: projective frames, point and
//! line multiplicities, tangent cones and intersection multiplicities.
//!
//! A frame is an invertible matrix whose rows are projective points. Acting
//! with it expresses a form in coordinates `y` where `x = gᵀy`, so the
//! coordinate point `e_j` of the new system is the old point `row_j`.

use crate::algebra::matrix::{self, Mat};
use crate::algebra::Field;
use crate::error::{Error, Result};
use crate::forms::{self, Form};

/// Scales so the last nonzero coordinate is 1. Panics on the zero vector.
pub fn normalize<F: Field>(f: &F, v: &[F::Elem]) -> Vec<F::Elem> {
    let k = v.iter().rposition(|x| !f.is_zero(x)).expect("nonzero vector");
    let inv = f.inv(&v[k]).unwrap();
    v.iter().map(|x| f.mul(x, &inv)).collect()
}

pub fn dot<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> F::Elem {
    a.iter().zip(b).fold(f.zero(), |acc, (x, y)| f.add(&acc, &f.mul(x, y)))
}

fn unit<F: Field>(f: &F, n1: usize, i: usize) -> Vec<F::Elem> {
    (0..n1).map(|j| if i == j { f.one() } else { f.zero() }).collect()
}

/// Frame sending `[0:…:0:1]` to `p`.
pub fn point_frame<F: Field>(f: &F, p: &[F::Elem]) -> Mat<F::Elem> {
    let n1 = p.len();
    let k = p.iter().rposition(|x| !f.is_zero(x)).expect("nonzero point");
    let mut rows: Vec<Vec<F::Elem>> = (0..n1).filter(|&i| i != k).map(|i| unit(f, n1, i)).collect();
    rows.push(p.to_vec());
    rows
}

/// A basis of the points on the hyperplane `l = 0`.
pub fn points_on<F: Field>(f: &F, l: &[F::Elem]) -> Vec<Vec<F::Elem>> {
    matrix::kernel(f, &vec![l.to_vec()], l.len())
}

/// Frame in which the hyperplane `l` becomes `{y_0 = 0}`.
pub fn line_frame<F: Field>(f: &F, l: &[F::Elem]) -> Mat<F::Elem> {
    let n1 = l.len();
    let k = l.iter().position(|x| !f.is_zero(x)).expect("nonzero line");
    let mut rows = vec![unit(f, n1, k)];
    rows.extend(points_on(f, l));
    rows
}

/// Plane frame for a flag `p ∈ l`: `l = {y_0 = 0}` and `p = [0:0:1]`.
pub fn flag_frame<F: Field>(f: &F, l: &[F::Elem], p: &[F::Elem]) -> Result<Mat<F::Elem>> {
    if !f.is_zero(&dot(f, l, p)) {
        return Err(Error::PointNotOnCurve);
    }
    let n1 = l.len();
    let off = unit(f, n1, l.iter().position(|x| !f.is_zero(x)).expect("nonzero line"));
    let other = points_on(f, l)
        .into_iter()
        .find(|q| normalize(f, q) != normalize(f, p))
        .expect("a line has two independent points");
    Ok(vec![off, other, p.to_vec()])
}

/// Coefficients `a` with `a · x = c · y` under `x = gᵀy`: the line given in
/// `y`-coordinates by `c`, expressed in the original coordinates.
pub fn line_from_frame<F: Field>(f: &F, g: &Mat<F::Elem>, c: &[F::Elem]) -> Vec<F::Elem> {
    let inv = matrix::inverse(f, g).expect("frame is invertible");
    let a: Vec<F::Elem> = (0..c.len()).map(|i| dot(f, &inv[i], c)).collect();
    normalize(f, &a)
}

/// Multiplicity of `p` on `V(F)`; 0 when `p` is off the curve.
pub fn point_multiplicity<F: Field>(f: &F, form: &Form<F::Elem>, p: &[F::Elem]) -> u32 {
    let g = forms::act(f, &point_frame(f, p), form).expect("frame is invertible");
    g.terms.keys().map(|e| form.d - e[form.n]).min().unwrap_or(0)
}

/// Largest `m` with `l^m | F`.
pub fn line_multiplicity<F: Field>(f: &F, form: &Form<F::Elem>, l: &[F::Elem]) -> u32 {
    if form.is_zero() {
        return form.d;
    }
    let g = forms::act(f, &line_frame(f, l), form).expect("frame is invertible");
    g.terms.keys().map(|e| e[0]).min().unwrap()
}

/// The tangent cone at `p` on a plane curve: the lowest-degree part in the
/// local coordinates `(y_0, y_1)` of the frame `g` sending `[0:0:1]` to `p`.
/// A root `[a:b]` corresponds to the line through `p` and `a·row_0 + b·row_1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TangentCone<E> {
    pub multiplicity: u32,
    /// Binary form of degree `multiplicity` in `(y_0, y_1)`.
    pub cone: Form<E>,
    pub frame: Mat<E>,
}

pub fn tangent_cone<F: Field>(f: &F, form: &Form<F::Elem>, p: &[F::Elem]) -> Result<TangentCone<F::Elem>> {
    let frame = point_frame(f, p);
    let g = forms::act(f, &frame, form)?;
    let m = g.terms.keys().map(|e| form.d - e[form.n]).min().unwrap_or(0);
    if m == 0 {
        return Err(Error::PointNotOnCurve);
    }
    let cone = forms::from_terms(
        f,
        form.n - 1,
        m,
        g.terms.iter().filter(|(e, _)| form.d - e[form.n] == m).map(|(e, c)| (e[..form.n].to_vec(), c.clone())),
    )?;
    Ok(TangentCone { multiplicity: m, cone, frame })
}

impl<E: Clone> TangentCone<E> {
    /// The line through the cone's base point in direction `[a:b]`.
    pub fn line_through<F: Field<Elem = E>>(&self, f: &F, dir: &[E]) -> Vec<E> {
        let q: Vec<E> = (0..3).map(|j| f.add(&f.mul(&dir[0], &self.frame[0][j]), &f.mul(&dir[1], &self.frame[1][j]))).collect();
        line_through_points(f, &q, &self.frame[2])
    }
}

/// The line through two distinct plane points (their cross product).
pub fn line_through_points<F: Field>(f: &F, p: &[F::Elem], q: &[F::Elem]) -> Vec<F::Elem> {
    let c = |i: usize, j: usize| f.sub(&f.mul(&p[i], &q[j]), &f.mul(&p[j], &q[i]));
    normalize(f, &[c(1, 2), c(2, 0), c(0, 1)])
}

/// The intersection point of two distinct plane lines.
pub fn meet<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    line_through_points(f, a, b)
}

/// Order of vanishing at `p` of `G` restricted to the line `l`.
pub fn intersection_multiplicity<F: Field>(
    f: &F,
    l: &[F::Elem],
    form: &Form<F::Elem>,
    p: &[F::Elem],
) -> Result<u32> {
    let frame = flag_frame(f, l, p)?;
    let g = forms::act(f, &frame, form)?;
    g.terms.iter().filter(|(e, _)| e[0] == 0).map(|(e, _)| e[1]).min().ok_or(Error::LineDividesForm)
}

/// `F / l^k` for `l^k | F`.
pub fn divide_by_line_power<F: Field>(f: &F, form: &Form<F::Elem>, l: &[F::Elem], k: u32) -> Form<F::Elem> {
    let frame = line_frame(f, l);
    let g = forms::act(f, &frame, form).expect("frame is invertible");
    let shifted = forms::from_terms(
        f,
        form.n,
        form.d - k,
        g.terms.iter().map(|(e, c)| {
            let mut e2 = e.clone();
            e2[0] -= k;
            (e2, c.clone())
        }),
    )
    .expect("l^k divides F");
    let inv = matrix::inverse(f, &frame).unwrap();
    let back = forms::act(f, &inv, &shifted).unwrap();
    // act(frame, l) = c·y_0, so the quotient picks up c^{-k}.
    let c = dot(f, &frame[0], l);
    let ck = f.pow(&c, u64::from(k));
    forms::scale(f, &back, &f.inv(&ck).unwrap())
}
