//! Points of the Bruhat–Tits building in marked-apartment coordinates and the
//! stability function `φ_F = d·ω − v(F)`.
//!
//! A point is a pair `(B, w)`: an invertible matrix `B` over `K` and a weight
//! vector. The coefficients of `F` in the marked basis are those of
//! `act(B, F)`, that is `F(Bᵀy)`, and the coordinate `y_j` gets valuation
//! `w_j`. Hence `v_{B,w}(F) = min_i (v(a_i) + ⟨i,w⟩)` over the coefficients
//! `a_i` of `act(B, F)`, and `ω = (Σw + v(det B))/(n+1)`.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::matrix::{self, Mat};
use crate::error::{Error, Result};
use crate::forms::{self, Form};
use crate::lp::AffinePiece;
use crate::rational::{fmt_rat, parse_rat, ExtRat, Rat};
use crate::valued_field::{FieldElement, ValuedField};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BuildingPoint {
    pub basis: Mat<FieldElement>,
    pub weights: Vec<Rat>,
}

impl BuildingPoint {
    pub fn new(basis: Mat<FieldElement>, weights: Vec<Rat>) -> Self {
        BuildingPoint { basis, weights }.canonical()
    }

    /// The reference point: identity basis, zero weights.
    pub fn reference(k: &ValuedField, n: usize) -> Self {
        BuildingPoint { basis: matrix::identity(k, n + 1), weights: vec![Rat::zero(); n + 1] }
    }

    /// Shifts the weights so that `w_n = 0`.
    pub fn canonical(mut self) -> Self {
        if let Some(last) = self.weights.last().cloned() {
            for w in &mut self.weights {
                *w -= &last;
            }
        }
        self
    }

    pub fn to_json(&self, k: &ValuedField) -> PointJson {
        PointJson {
            basis: self.basis.iter().map(|r| r.iter().map(|x| k.format(x)).collect()).collect(),
            weights: self.weights.iter().map(fmt_rat).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointJson {
    pub basis: Vec<Vec<String>>,
    pub weights: Vec<String>,
}

/// Parses a square matrix given as rows of element strings.
pub fn parse_matrix<S: AsRef<str>>(k: &ValuedField, rows: &[Vec<S>]) -> Result<Mat<FieldElement>> {
    if rows.iter().any(|r| r.len() != rows.len()) {
        return Err(Error::Input("matrix is not square".into()));
    }
    rows.iter().map(|r| r.iter().map(|s| k.parse(s.as_ref())).collect()).collect()
}

impl PointJson {
    pub fn to_point(&self, k: &ValuedField) -> Result<BuildingPoint> {
        let basis = parse_matrix(k, &self.basis)?;
        let weights = self.weights.iter().map(|s| parse_rat(s)).collect::<Result<Vec<_>>>()?;
        if basis.len() != weights.len() || basis.iter().any(|r| r.len() != weights.len()) {
            return Err(Error::Input("basis and weights have mismatched sizes".into()));
        }
        Ok(BuildingPoint { basis, weights })
    }
}

fn pairing(e: &[u32], w: &[Rat]) -> Rat {
    e.iter().zip(w).map(|(&k, wj)| wj * Rat::from_integer(k.into())).sum()
}

fn det_valuation(k: &ValuedField, b: &Mat<FieldElement>) -> Result<Rat> {
    match k.valuation(&matrix::det(k, b)) {
        ExtRat::Fin(v) => Ok(v),
        ExtRat::Inf => Err(Error::SingularMatrix),
    }
}

/// `v_{B,w}(F)`; `∞` for the zero form.
pub fn v_of_form(k: &ValuedField, point: &BuildingPoint, form: &Form<FieldElement>) -> Result<ExtRat> {
    let moved = forms::act(k, &point.basis, form)?;
    Ok(moved
        .terms
        .iter()
        .map(|(e, c)| k.valuation(c) + ExtRat::Fin(pairing(e, &point.weights)))
        .min()
        .unwrap_or(ExtRat::Inf))
}

pub fn omega(k: &ValuedField, point: &BuildingPoint) -> Result<Rat> {
    let n1 = point.weights.len() as i64;
    let s: Rat = point.weights.iter().sum();
    Ok((s + det_valuation(k, &point.basis)?) / Rat::from_integer(n1.into()))
}

/// `φ_F = d·ω − v(F)`.
pub fn phi(k: &ValuedField, form: &Form<FieldElement>, point: &BuildingPoint) -> Result<Rat> {
    let v = match v_of_form(k, point, form)? {
        ExtRat::Fin(v) => v,
        ExtRat::Inf => return Err(Error::Input("the stability function of the zero form is undefined".into())),
    };
    Ok(Rat::from_integer(form.d.into()) * omega(k, point)? - v)
}

/// `φ_F` on the apartment of `B`: `max_i (l_i(w) − v(a_i)) + offset`, with
/// `l_i(w) = d/(n+1)·Σw − ⟨i,w⟩` and `offset = d·v(det B)/(n+1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApartmentRestriction {
    pub exponents: Vec<Vec<u32>>,
    /// `(l_i, −v(a_i))` for each exponent in the support.
    pub pieces: Vec<(Vec<Rat>, Rat)>,
    pub offset: Rat,
}

impl ApartmentRestriction {
    pub fn eval(&self, w: &[Rat]) -> Rat {
        self.pieces
            .iter()
            .map(|(l, c)| crate::lp::dot(l, w) + c)
            .max()
            .expect("nonempty support")
            + &self.offset
    }

    /// The pieces with the offset folded into the constants.
    pub fn affine_pieces(&self) -> Vec<AffinePiece> {
        self.pieces.iter().map(|(l, c)| AffinePiece { linear: l.clone(), constant: c + &self.offset }).collect()
    }
}

pub fn linear_part(n: usize, d: u32, e: &[u32]) -> Vec<Rat> {
    let c = Rat::new(d.into(), ((n + 1) as i64).into());
    e.iter().map(|&k| &c - Rat::from_integer(k.into())).collect()
}

pub fn restrict_to_apartment(k: &ValuedField, form: &Form<FieldElement>, basis: &Mat<FieldElement>) -> Result<ApartmentRestriction> {
    if form.is_zero() {
        return Err(Error::Input("zero form".into()));
    }
    let n = form.n;
    let moved = forms::act(k, basis, form)?;
    let mut exponents = Vec::new();
    let mut pieces = Vec::new();
    for (e, c) in &moved.terms {
        let v = k.valuation(c).finite().cloned().expect("stored coefficients are nonzero");
        exponents.push(e.clone());
        pieces.push((linear_part(n, form.d, e), -v));
    }
    let offset = Rat::from_integer(form.d.into()) * det_valuation(k, basis)? / Rat::from_integer(((n + 1) as i64).into());
    Ok(ApartmentRestriction { exponents, pieces, offset })
}

/// Whether all weight differences lie in the value group `step·Z`.
pub fn is_vertex(point: &BuildingPoint, step: &Rat) -> bool {
    let w0 = &point.weights[0];
    point.weights.iter().all(|w| ((w - w0) / step).is_integer())
}

/// Smallest `e ≥ 1` with `e·(w_i − w_j) ∈ step·Z` for all `i, j`.
pub fn required_ramification(weights: &[Rat], step: &Rat) -> u32 {
    let w0 = &weights[0];
    let l = crate::rational::lcm_denoms(weights.iter().map(|w| (w - w0) / step).collect::<Vec<_>>().iter());
    l.try_into().expect("ramification index fits in u32")
}

/// `v(det g)` for an invertible matrix.
pub fn det_val(k: &ValuedField, g: &Mat<FieldElement>) -> Result<Rat> {
    det_valuation(k, g)
}

/// `F ↦ c·F` shifts `φ` by `−v(c)`; exposed for checks on scaling.
pub fn scale_form(k: &ValuedField, form: &Form<FieldElement>, c: &FieldElement) -> Form<FieldElement> {
    forms::scale(k, form, c)
}

/// Whether the basis is integral with unit determinant.
pub fn in_gl_o(k: &ValuedField, g: &Mat<FieldElement>) -> bool {
    let integral = g.iter().flatten().all(|x| !matches!(k.valuation(x), ExtRat::Fin(ref v) if v.is_negative()));
    integral && matches!(k.valuation(&matrix::det(k, g)), ExtRat::Fin(ref v) if v.is_zero())
}
