//! Search for a semistable plane model by descent on the stability function.
//!
//! Each round minimizes `φ_F` on the current apartment, moves to a vertex of
//! the optimal face (extending the base field when the face has none),
//! reduces the model there and checks its special fiber. An unstable fiber
//! comes with a destabilizing frame; lifting it gives a new apartment on
//! which the minimum is strictly smaller.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::matrix::{self, Mat};
use crate::building::{self, BuildingPoint};
use crate::error::{Error, Result};
use crate::forms::{self, Form, FormJson};
use crate::git_stability::{self, CertificateJson, FiberVerdict, InstabilityCertificate, VerdictJson};
use crate::lp::{self, LpOutcome, OptimalFace};
use crate::rational::{serde_rat, Rat};
use crate::residue::Res;
use crate::valued_field::{FieldDescriptor, FieldElement, ValuedField};

pub const DEFAULT_MAX_ITER: u32 = 64;
pub const DEFAULT_E_CAP: u32 = 24;
pub const DEFAULT_M_MAX: u32 = 2;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DescentOptions {
    pub max_iter: u32,
    pub allow_ramified: bool,
    pub allow_unramified: bool,
    /// Largest total ramification index over the input field.
    pub e_cap: u32,
    /// Largest residue extension degree searched for destabilizing flags.
    pub m_max: u32,
    /// The unit `u` in `π^e = u·p` for ramified p-adic extensions.
    pub unit: Rat,
}

impl Default for DescentOptions {
    fn default() -> Self {
        DescentOptions {
            max_iter: DEFAULT_MAX_ITER,
            allow_ramified: true,
            allow_unramified: true,
            e_cap: DEFAULT_E_CAP,
            m_max: DEFAULT_M_MAX,
            unit: Rat::one(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Action {
    ExtendedField { ramification: u32, unramified: u32, field: String },
    VertexReduced {
        #[serde(with = "serde_rat::vec")]
        weights: Vec<Rat>,
        fiber: FormJson,
    },
    InstabilityApplied { certificate: CertificateJson },
    Finished { verdict: VerdictJson },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DescentStep {
    pub field: String,
    pub basis: Vec<Vec<String>>,
    /// Minimum of `φ_F` on the apartment of `basis`.
    #[serde(with = "serde_rat")]
    pub minimum: Rat,
    #[serde(with = "serde_rat::vec")]
    pub point: Vec<Rat>,
    pub actions: Vec<Action>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinalModel {
    pub field: FieldDescriptor,
    /// Ramification index of the final field over the input field.
    pub ramification: u32,
    pub basis: Vec<Vec<String>>,
    #[serde(with = "serde_rat::vec")]
    pub weights: Vec<Rat>,
    #[serde(with = "serde_rat")]
    pub value: Rat,
    pub model: FormJson,
    pub fiber: FormJson,
    pub verdict: VerdictJson,
    /// Whether the minimum on the final apartment is attained at one point.
    pub unique_minimizer: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Outcome {
    Stable(FinalModel),
    Semistable(FinalModel),
    NeedsExtensionAt {
        #[serde(with = "serde_rat::vec")]
        point: Vec<Rat>,
        ramification: u32,
        unramified: u32,
    },
    IterationCapReached,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DescentReport {
    pub input_field: FieldDescriptor,
    pub steps: Vec<DescentStep>,
    pub outcome: Outcome,
}

impl DescentReport {
    pub fn final_model(&self) -> Option<&FinalModel> {
        match &self.outcome {
            Outcome::Stable(m) | Outcome::Semistable(m) => Some(m),
            _ => None,
        }
    }
}

/// Minimum of `φ_F` on the apartment of `basis` with its optimal face.
pub fn minimize_on_apartment(
    k: &ValuedField,
    form: &Form<FieldElement>,
    basis: &Mat<FieldElement>,
) -> Result<(Rat, OptimalFace)> {
    let r = building::restrict_to_apartment(k, form, basis)?;
    match lp::minimize_max_affine(&r.affine_pieces()) {
        LpOutcome::Optimal(face) => Ok((face.value.clone(), face)),
        LpOutcome::UnboundedBelow { .. } => Err(Error::GenericFiberNotStable),
    }
}

/// `diag(π^{e·w_j})`, so that acting with it adds `⟨i,w⟩` to the valuation of
/// the coefficient of `x^i`.
pub fn weight_matrix(k: &ValuedField, w: &[Rat]) -> Result<Mat<FieldElement>> {
    let n1 = w.len();
    let mut out = matrix::identity(k, n1);
    for (j, wj) in w.iter().enumerate() {
        if !k.in_value_group(wj) {
            return Err(Error::NotAVertex);
        }
        let steps: i64 = (wj * Rat::from_integer(k.e.into()))
            .to_integer()
            .try_into()
            .map_err(|_| Error::Input("weight too large".into()))?;
        out[j][j] = k.uniformizer_pow(steps);
    }
    Ok(out)
}

/// The primitive model at the vertex `(basis, w)`, its special fiber, and
/// the basis `D_w·basis` in which the model is written.
pub fn reduce_model_at_vertex(
    k: &ValuedField,
    form: &Form<FieldElement>,
    basis: &Mat<FieldElement>,
    w: &[Rat],
) -> Result<(Form<FieldElement>, Form<Res>, Mat<FieldElement>)> {
    let point = BuildingPoint::new(basis.clone(), w.to_vec());
    if !building::is_vertex(&point, &k.value_group_step()) {
        return Err(Error::NotAVertex);
    }
    let vertex_basis = matrix::mul(k, &weight_matrix(k, &point.weights)?, basis);
    let moved = forms::act(k, &vertex_basis, form)?;
    let (model, _) = forms::primitive_normalize(k, &moved)?;
    let fiber = forms::reduce_form(k, &model)?;
    Ok((model, fiber, vertex_basis))
}

/// Entrywise lift of a certificate frame to a matrix over the valuation ring.
pub fn lift_instability(cert: &InstabilityCertificate, k: &ValuedField) -> Result<Mat<FieldElement>> {
    let rf = k.residue_field();
    if cert.field != rf {
        return Err(Error::ResidueMismatch);
    }
    cert.matrix.iter().map(|row| row.iter().map(|x| k.lift(x, &rf)).collect()).collect()
}

/// `φ_F` at the point `(g, 0)` and the verdict on the special fiber of the
/// model `act(g, F)`.
pub fn verify_model(
    k: &ValuedField,
    form: &Form<FieldElement>,
    g: &Mat<FieldElement>,
    m_max: u32,
) -> Result<(Rat, FiberVerdict, Form<Res>)> {
    let n1 = form.n + 1;
    let value = building::phi(k, form, &BuildingPoint { basis: g.clone(), weights: vec![Rat::zero(); n1] })?;
    let (model, _) = forms::primitive_normalize(k, &forms::act(k, g, form)?)?;
    let fiber = forms::reduce_form(k, &model)?;
    let verdict = git_stability::check_fiber(&k.residue_field(), &fiber, m_max)?;
    Ok((value, verdict, fiber))
}

fn format_matrix(k: &ValuedField, g: &Mat<FieldElement>) -> Vec<Vec<String>> {
    g.iter().map(|r| r.iter().map(|x| k.format(x)).collect()).collect()
}

fn embed_matrix(big: &ValuedField, small: &ValuedField, g: &Mat<FieldElement>) -> Result<Mat<FieldElement>> {
    g.iter().map(|r| r.iter().map(|x| big.embed(small, x)).collect()).collect()
}

fn vertex_choice(face: &OptimalFace, step: &Rat) -> Option<Vec<Rat>> {
    lp::lattice_minimizers(face, step).0.into_iter().min()
}

/// Runs the descent from the reference apartment of `k`.
pub fn descend(form: &Form<FieldElement>, k: &ValuedField, opts: &DescentOptions) -> Result<DescentReport> {
    descend_from(form, k, &matrix::identity(k, form.n + 1), opts)
}

/// Runs the descent from the apartment of `basis`.
pub fn descend_from(
    form: &Form<FieldElement>,
    k0: &ValuedField,
    basis: &Mat<FieldElement>,
    opts: &DescentOptions,
) -> Result<DescentReport> {
    if form.is_zero() {
        return Err(Error::Input("zero form".into()));
    }
    let input_field = FieldDescriptor::from_field(k0);
    let mut k = k0.clone();
    let mut f = form.clone();
    let mut b = basis.clone();
    let mut steps = Vec::new();
    for _ in 0..opts.max_iter {
        let (m, face) = minimize_on_apartment(&k, &f, &b)?;
        let mut step = DescentStep {
            field: k.describe(),
            basis: format_matrix(&k, &b),
            minimum: m.clone(),
            point: face.minimizer.clone(),
            actions: Vec::new(),
        };
        let w = match vertex_choice(&face, &k.value_group_step()) {
            Some(w) => w,
            None => {
                let w = face.smallest_denominator_minimizer();
                let e = building::required_ramification(&w, &k.value_group_step());
                let total = (k.e / k0.e).saturating_mul(e);
                if !opts.allow_ramified || total > opts.e_cap {
                    step.point = w.clone();
                    steps.push(step);
                    return Ok(DescentReport {
                        input_field,
                        steps,
                        outcome: Outcome::NeedsExtensionAt { point: w, ramification: e, unramified: 1 },
                    });
                }
                let big = k.extend_ramified_with_unit(e, &opts.unit)?;
                f = forms::embed_form(&big, &k, &f)?;
                b = embed_matrix(&big, &k, &b)?;
                k = big;
                step.actions.push(Action::ExtendedField { ramification: e, unramified: 1, field: k.describe() });
                w
            }
        };
        step.point = w.clone();
        let (model, fiber, vertex_basis) = reduce_model_at_vertex(&k, &f, &b, &w)?;
        let rf = k.residue_field();
        step.actions.push(Action::VertexReduced { weights: w.clone(), fiber: FormJson::from_residue_form(&rf, &fiber) });
        let verdict = git_stability::check_fiber(&rf, &fiber, opts.m_max)?;
        match verdict {
            FiberVerdict::Unstable(cert) => {
                let mut cert = cert;
                if cert.field != rf {
                    let degree = level_degree(&rf, &cert)?;
                    if !opts.allow_unramified {
                        steps.push(step);
                        return Ok(DescentReport {
                            input_field,
                            steps,
                            outcome: Outcome::NeedsExtensionAt { point: w, ramification: 1, unramified: degree },
                        });
                    }
                    let big = k.extend_unramified(degree)?;
                    f = forms::embed_form(&big, &k, &f)?;
                    let vb = embed_matrix(&big, &k, &vertex_basis)?;
                    k = big;
                    step.actions.push(Action::ExtendedField { ramification: 1, unramified: degree, field: k.describe() });
                    cert.field = k.residue_field();
                    let g = lift_instability(&cert, &k)?;
                    step.actions.push(Action::InstabilityApplied { certificate: cert.to_json() });
                    b = matrix::mul(&k, &g, &vb);
                } else {
                    let g = lift_instability(&cert, &k)?;
                    step.actions.push(Action::InstabilityApplied { certificate: cert.to_json() });
                    b = matrix::mul(&k, &g, &vertex_basis);
                }
                steps.push(step);
            }
            verdict => {
                let unique = face.bounded && face.vertices.len() == 1;
                step.actions.push(Action::Finished { verdict: verdict.to_json() });
                steps.push(step);
                let fm = FinalModel {
                    field: FieldDescriptor::from_field(&k),
                    ramification: k.e / k0.e,
                    basis: format_matrix(&k, &vertex_basis),
                    weights: w,
                    value: m,
                    model: FormJson::from_form(&k, &model),
                    fiber: FormJson::from_residue_form(&rf, &fiber),
                    verdict: verdict.to_json(),
                    unique_minimizer: unique,
                };
                let outcome = match verdict {
                    FiberVerdict::Stable => Outcome::Stable(fm),
                    _ => Outcome::Semistable(fm),
                };
                return Ok(DescentReport { input_field, steps, outcome });
            }
        }
    }
    Ok(DescentReport { input_field, steps, outcome: Outcome::IterationCapReached })
}

/// Degree of the certificate's field over the residue field `rf`.
fn level_degree(rf: &crate::residue::ResidueField, cert: &InstabilityCertificate) -> Result<u32> {
    match (rf.gf(), cert.field.gf()) {
        (Some(small), Some(big)) if big.p == small.p && big.k % small.k == 0 => Ok(big.k / small.k),
        _ => Err(Error::ResidueMismatch),
    }
}

/// The sequence of recorded minima is strictly decreasing between field
/// extensions and constant across them.
pub fn check_monotone(report: &DescentReport) -> bool {
    report.steps.windows(2).all(|p| p[1].minimum < p[0].minimum)
}
