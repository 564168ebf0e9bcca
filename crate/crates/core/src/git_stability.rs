//! The Hilbert–Mumford numerical criterion for plane curves over a residue
//! field.
//!
//! A form is unstable when some coordinate system and balanced weight vector
//! `w` make every support pairing `⟨i,w⟩` positive, and semistable but not
//! stable when only a nonzero `w` with nonnegative pairings exists. For plane
//! curves every such `w` can be taken ordered in a frame adapted to a flag
//! `P ∈ L`, so the search runs over lines of the curve, its singular points and
//! the tangent lines at those points.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::groebner::{self, Order};
use crate::algebra::matrix::{self, Mat};
use crate::algebra::Field;
use crate::error::{Error, Result};
use crate::forms::{self, Form};
use crate::geometry;
use crate::lp::{self, Constraint, Rel};
use crate::rational::{fmt_rat, parse_rat, Rat};
use crate::residue::{Res, ResidueField};
use crate::search::{self, FoundLine, FoundPoint};

/// Number of flags above which the brute-force oracle refuses to run.
pub const ORACLE_FLAG_LIMIT: u64 = 2_000_000;

/// `min_{i ∈ supp F} ⟨i,w⟩`.
pub fn sigma<E: Clone>(form: &Form<E>, w: &[Rat]) -> Rat {
    sigma_of_support(form.terms.keys(), w)
}

pub fn sigma_of_support<'a>(support: impl IntoIterator<Item = &'a Vec<u32>>, w: &[Rat]) -> Rat {
    support
        .into_iter()
        .map(|e| e.iter().zip(w).map(|(&k, wj)| wj * Rat::from_integer(k.into())).sum::<Rat>())
        .min()
        .expect("nonempty support")
}

pub fn int_weights(w: &[i64]) -> Vec<Rat> {
    w.iter().map(|&x| Rat::from_integer(x.into())).collect()
}

/// Scales a nonzero rational vector to the primitive integral vector on its ray.
pub fn primitive_integral(w: &[Rat]) -> Vec<i64> {
    let l = w.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = w.iter().map(|x| (x * Rat::from_integer(l.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    let g = if g.is_zero() { BigInt::one() } else { g };
    ints.iter().map(|x| (x / &g).to_i64().expect("weight fits in i64")).collect()
}

/// A balanced weight vector with strictly positive (or, non-strict, nonnegative
/// and `w ≠ 0`) pairings on the support, as a primitive integral vector.
pub fn weight_search(support: &[Vec<u32>], strict: bool) -> Option<Vec<i64>> {
    weight_search_with(support, strict, false)
}

/// [`weight_search`], optionally restricted to ordered `w_0 ≥ … ≥ w_n`.
pub fn weight_search_with(support: &[Vec<u32>], strict: bool, ordered: bool) -> Option<Vec<i64>> {
    let n1 = support.first()?.len();
    if ordered && n1 == 3 && !ordered_plane_feasible(support, strict) {
        return None;
    }
    weight_search_lp(support, strict, ordered)
}

fn weight_search_lp(support: &[Vec<u32>], strict: bool, ordered: bool) -> Option<Vec<i64>> {
    let n1 = support.first()?.len();
    let mut base: Vec<Constraint> = support
        .iter()
        .map(|e| {
            let coeffs = e.iter().map(|&k| Rat::from_integer(k.into())).collect();
            Constraint::new(coeffs, if strict { Rel::Gt } else { Rel::Ge }, Rat::zero())
        })
        .collect();
    base.push(Constraint::new(vec![Rat::one(); n1], Rel::Eq, Rat::zero()));
    if ordered {
        for j in 0..n1 - 1 {
            let mut c = vec![Rat::zero(); n1];
            c[j] = Rat::one();
            c[j + 1] = -Rat::one();
            base.push(Constraint::new(c, Rel::Ge, Rat::zero()));
        }
    }
    if strict {
        return lp::feasible_point(n1, &base).map(|w| primitive_integral(&w));
    }
    for j in 0..n1 {
        for s in [1i64, -1] {
            let mut sys = base.clone();
            let mut c = vec![Rat::zero(); n1];
            c[j] = Rat::from_integer(s.into());
            sys.push(Constraint::new(c, Rel::Ge, Rat::one()));
            if let Some(w) = lp::feasible_point(n1, &sys) {
                return Some(primitive_integral(&w));
            }
        }
    }
    None
}

/// Ordered balanced weights in three variables form the cone spanned by
/// `(2,−1,−1)` and `(1,1,−2)`. On the segment `(1−t)·a + t·b` every pairing
/// is affine in `t`, so feasibility is an intersection of intervals in `[0,1]`.
fn ordered_plane_feasible(support: &[Vec<u32>], strict: bool) -> bool {
    let (mut lo, mut hi) = (Rat::zero(), Rat::one());
    let (mut lo_open, mut hi_open) = (false, false);
    for e in support {
        let (x, y, z) = (i64::from(e[0]), i64::from(e[1]), i64::from(e[2]));
        let alpha = 2 * x - y - z;
        let slope = (x + y - 2 * z) - alpha;
        if slope == 0 {
            if alpha < 0 || (strict && alpha == 0) {
                return false;
            }
            continue;
        }
        let root = Rat::new((-alpha).into(), slope.into());
        if slope > 0 {
            if root > lo || (root == lo && strict) {
                lo_open = strict || (root == lo && lo_open);
                lo = root;
            }
        } else if root < hi || (root == hi && strict) {
            hi_open = strict || (root == hi && hi_open);
            hi = root;
        }
    }
    lo < hi || (lo == hi && !lo_open && !hi_open)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CertificateKind {
    Strict,
    Semi,
}

/// A frame `ḡ` of determinant 1 and an ordered balanced integral `w` with
/// `σ(act(ḡ, F̄), w) > 0` (strict) or `≥ 0` (semi).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InstabilityCertificate {
    /// Field containing the entries of `matrix`; an extension of the residue
    /// field of the form when the destabilizing flag is not rational.
    pub field: ResidueField,
    pub matrix: Mat<Res>,
    pub weights: Vec<i64>,
    pub sigma: Rat,
    pub kind: CertificateKind,
    /// The line `{y_0 = 0}` of the frame, in original coordinates.
    pub line: Option<Vec<Res>>,
    /// The point `[0:…:0:1]` of the frame.
    pub point: Option<Vec<Res>>,
}

impl InstabilityCertificate {
    /// Recomputes `σ` on the form and checks the sign and the determinant.
    pub fn validate(&self, rf: &ResidueField, form: &Form<Res>) -> Result<bool> {
        let f = &self.field;
        let form_l = search::embed_residue_form(rf, f, form)?;
        if !f.is_one(&matrix::det(f, &self.matrix)) {
            return Ok(false);
        }
        let moved = forms::act(f, &self.matrix, &form_l)?;
        let s = sigma(&moved, &int_weights(&self.weights));
        let balanced = self.weights.iter().sum::<i64>() == 0;
        let ordered = self.weights.windows(2).all(|p| p[0] >= p[1]);
        let sign = match self.kind {
            CertificateKind::Strict => s.is_positive(),
            CertificateKind::Semi => !s.is_negative() && self.weights.iter().any(|&x| x != 0),
        };
        Ok(s == self.sigma && balanced && ordered && sign)
    }

    pub fn to_json(&self) -> CertificateJson {
        let f = &self.field;
        let vec = |v: &Vec<Res>| v.iter().map(|x| f.format(x)).collect::<Vec<_>>();
        CertificateJson {
            matrix: self.matrix.iter().map(vec).collect(),
            weights: self.weights.clone(),
            sigma: fmt_rat(&self.sigma),
            kind: self.kind,
            residue_field: f.describe(),
            line: self.line.as_ref().map(vec),
            point: self.point.as_ref().map(vec),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateJson {
    pub matrix: Vec<Vec<String>>,
    pub weights: Vec<i64>,
    pub sigma: String,
    pub kind: CertificateKind,
    pub residue_field: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub line: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<Vec<String>>,
}

impl CertificateJson {
    pub fn to_certificate(&self) -> Result<InstabilityCertificate> {
        let field = ResidueField::from_descriptor(&self.residue_field)?;
        let vec = |v: &Vec<String>| v.iter().map(|s| field.parse(s)).collect::<Result<Vec<_>>>();
        Ok(InstabilityCertificate {
            matrix: self.matrix.iter().map(vec).collect::<Result<_>>()?,
            weights: self.weights.clone(),
            sigma: parse_rat(&self.sigma)?,
            kind: self.kind,
            line: self.line.as_ref().map(vec).transpose()?,
            point: self.point.as_ref().map(vec).transpose()?,
            field,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FiberVerdict {
    Stable,
    SemistableNotStable(Vec<InstabilityCertificate>),
    Unstable(InstabilityCertificate),
}

impl FiberVerdict {
    pub fn name(&self) -> &'static str {
        match self {
            FiberVerdict::Stable => "stable",
            FiberVerdict::SemistableNotStable(_) => "semistable",
            FiberVerdict::Unstable(_) => "unstable",
        }
    }

    pub fn is_semistable(&self) -> bool {
        !matches!(self, FiberVerdict::Unstable(_))
    }

    pub fn to_json(&self) -> VerdictJson {
        match self {
            FiberVerdict::Stable => VerdictJson { verdict: "stable".into(), certificates: Vec::new() },
            FiberVerdict::SemistableNotStable(c) => {
                VerdictJson { verdict: "semistable".into(), certificates: c.iter().map(|c| c.to_json()).collect() }
            }
            FiberVerdict::Unstable(c) => VerdictJson { verdict: "unstable".into(), certificates: vec![c.to_json()] },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictJson {
    pub verdict: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub certificates: Vec<CertificateJson>,
}

impl VerdictJson {
    pub fn to_verdict(&self) -> Result<FiberVerdict> {
        let certs: Vec<InstabilityCertificate> =
            self.certificates.iter().map(|c| c.to_certificate()).collect::<Result<_>>()?;
        match self.verdict.as_str() {
            "stable" => Ok(FiberVerdict::Stable),
            "semistable" => Ok(FiberVerdict::SemistableNotStable(certs)),
            "unstable" => certs
                .into_iter()
                .next()
                .map(FiberVerdict::Unstable)
                .ok_or_else(|| Error::Input("unstable verdict without certificate".into())),
            other => Err(Error::Input(format!("unknown verdict {other:?}"))),
        }
    }
}

// ------------------------------------------------------------ certificates

const LINE_WEIGHTS: [i64; 3] = [2, -1, -1];
const POINT_WEIGHTS: [i64; 3] = [1, 1, -2];

fn certificate(
    field: &ResidueField,
    form: &Form<Res>,
    mut frame: Mat<Res>,
    weights: Vec<i64>,
    kind: CertificateKind,
    line: Option<Vec<Res>>,
    point: Option<Vec<Res>>,
) -> Result<InstabilityCertificate> {
    let det = matrix::det(field, &frame);
    let inv = field.inv(&det).ok_or(Error::SingularMatrix)?;
    frame[0] = frame[0].iter().map(|x| field.mul(x, &inv)).collect();
    let moved = forms::act(field, &frame, form)?;
    let s = sigma(&moved, &int_weights(&weights));
    Ok(InstabilityCertificate { field: field.clone(), matrix: frame, weights, sigma: s, kind, line, point })
}

fn support_of(form: &Form<Res>) -> Vec<Vec<u32>> {
    form.terms.keys().cloned().collect()
}

/// Weight search on flag supports, memoized since many flags share a support.
#[derive(Default)]
struct FlagLp {
    cache: HashMap<(Vec<Vec<u32>>, bool), Option<Vec<i64>>>,
}

impl FlagLp {
    fn search(&mut self, support: Vec<Vec<u32>>, strict: bool) -> Option<Vec<i64>> {
        self.cache
            .entry((support, strict))
            .or_insert_with_key(|(s, strict)| weight_search_with(s, *strict, true))
            .clone()
    }
}

// ------------------------------------------------------------ candidates

struct LevelCandidates {
    field: ResidueField,
    form: Form<Res>,
    lines: Vec<FoundLine>,
    points: Vec<FoundPoint>,
    flags: Vec<(Vec<Res>, Vec<Res>)>,
}

fn candidates(rf: &ResidueField, form: &Form<Res>, m_max: u32) -> Result<Vec<LevelCandidates>> {
    let found = search::rational_lines_and_points(rf, form, m_max)?;
    let mut out: Vec<LevelCandidates> = Vec::new();
    for (li, level) in found.levels.iter().enumerate() {
        let f = &level.level.field;
        let mut all_points: Vec<Vec<Res>> = Vec::new();
        for earlier in &found.levels[..li] {
            if level.level.degree % earlier.level.degree == 0 {
                for p in &earlier.singular_points {
                    all_points.push(
                        p.point.iter().map(|c| search::embed_residue(&earlier.level.field, &level.level.field, c)).collect::<Result<_>>()?,
                    );
                }
            }
        }
        all_points.extend(level.singular_points.iter().map(|p| p.point.clone()));
        let mut flags = BTreeSet::new();
        for p in &all_points {
            let cone = geometry::tangent_cone(f, &level.form, p)?;
            for dir in search::residue_binary_roots(f, &cone.cone)? {
                let l = cone.line_through(f, &dir);
                if let ResidueField::Finite(g) = f {
                    let base_k = rf.gf().unwrap().k;
                    let both: Vec<Res> = l.iter().chain(p).cloned().collect();
                    if search::defined_below(&g, base_k, level.level.degree, &both) {
                        continue;
                    }
                }
                flags.insert((l, p.clone()));
            }
        }
        out.push(LevelCandidates {
            field: level.level.field.clone(),
            form: level.form.clone(),
            lines: level.lines.clone(),
            points: level.singular_points.clone(),
            flags: flags.into_iter().collect(),
        });
    }
    Ok(out)
}

fn check_plane(form: &Form<Res>) -> Result<()> {
    if form.n != 2 {
        return Err(Error::Input(format!("plane curves only, got {} variables", form.n + 1)));
    }
    if form.d < 3 {
        return Err(Error::Input(format!("degree {} is below 3", form.d)));
    }
    if form.is_zero() {
        return Err(Error::Input("zero form".into()));
    }
    Ok(())
}

/// Whether `V(F̄)` is smooth over the algebraic closure.
pub fn is_smooth(rf: &ResidueField, form: &Form<Res>) -> bool {
    let mut gens = vec![form.clone()];
    gens.extend((0..=form.n).map(|i| forms::partial(rf, form, i)));
    let polys: Vec<_> = gens
        .iter()
        .filter(|g| !g.is_zero())
        .map(|g| groebner::from_map(rf, Order::GrevLex, &g.terms.clone().into_iter().collect()))
        .collect();
    groebner::projectively_empty(rf, &polys, form.n + 1)
}

fn lone_line(lc: &LevelCandidates, l: &[Res], kind: CertificateKind) -> Result<InstabilityCertificate> {
    let frame = geometry::line_frame(&lc.field, l);
    certificate(&lc.field, &lc.form, frame, LINE_WEIGHTS.to_vec(), kind, Some(l.to_vec()), None)
}

fn lone_point(lc: &LevelCandidates, p: &[Res], kind: CertificateKind) -> Result<InstabilityCertificate> {
    let frame = geometry::point_frame(&lc.field, p);
    certificate(&lc.field, &lc.form, frame, POINT_WEIGHTS.to_vec(), kind, None, Some(p.to_vec()))
}

fn flag_search(
    field: &ResidueField,
    form: &Form<Res>,
    l: &[Res],
    p: &[Res],
    strict: bool,
    lp: &mut FlagLp,
) -> Result<Option<InstabilityCertificate>> {
    let frame = geometry::flag_frame(field, l, p)?;
    let moved = forms::act(field, &frame, form)?;
    match lp.search(support_of(&moved), strict) {
        None => Ok(None),
        Some(w) => {
            let kind = if strict { CertificateKind::Strict } else { CertificateKind::Semi };
            certificate(field, form, frame, w, kind, Some(l.to_vec()), Some(p.to_vec())).map(Some)
        }
    }
}

/// Looks for a strict instability of a plane curve of degree `d ≥ 3`: a
/// line of multiplicity `> d/3`, a point of multiplicity `> 2d/3`, or a flag
/// of a singular point and one of its tangent lines admitting a strictly
/// positive ordered weight. Finite residue fields are searched over
/// `F_{q^j}`, `j ≤ m_max`.
pub fn find_instability_plane(rf: &ResidueField, form: &Form<Res>, m_max: u32) -> Result<Option<InstabilityCertificate>> {
    check_plane(form)?;
    if is_smooth(rf, form) {
        return Ok(None);
    }
    let cands = candidates(rf, form, m_max)?;
    strict_instability(&cands, form.d, &mut FlagLp::default())
}

fn strict_instability(cands: &[LevelCandidates], d: u32, lp: &mut FlagLp) -> Result<Option<InstabilityCertificate>> {
    for lc in cands {
        if let Some(l) = lc.lines.iter().find(|l| 3 * l.multiplicity > d) {
            return lone_line(lc, &l.line, CertificateKind::Strict).map(Some);
        }
    }
    for lc in cands {
        if let Some(p) = lc.points.iter().find(|p| 3 * p.multiplicity > 2 * d) {
            return lone_point(lc, &p.point, CertificateKind::Strict).map(Some);
        }
    }
    for lc in cands {
        for (l, p) in &lc.flags {
            if let Some(c) = flag_search(&lc.field, &lc.form, l, p, true, lp)? {
                return Ok(Some(c));
            }
        }
    }
    Ok(None)
}

/// Stability verdict for a plane curve fiber, relative to the levels
/// `j ≤ m_max` for finite residue fields. Smooth fibers are stable outright.
pub fn check_fiber(rf: &ResidueField, form: &Form<Res>, m_max: u32) -> Result<FiberVerdict> {
    check_plane(form)?;
    if is_smooth(rf, form) {
        return Ok(FiberVerdict::Stable);
    }
    let d = form.d;
    let cands = candidates(rf, form, m_max)?;
    let mut lp = FlagLp::default();
    if let Some(c) = strict_instability(&cands, d, &mut lp)? {
        return Ok(FiberVerdict::Unstable(c));
    }
    let mut semis = Vec::new();
    for lc in &cands {
        for l in lc.lines.iter().filter(|l| 3 * l.multiplicity >= d) {
            semis.push(lone_line(lc, &l.line, CertificateKind::Semi)?);
        }
        for p in lc.points.iter().filter(|p| 3 * p.multiplicity >= 2 * d) {
            semis.push(lone_point(lc, &p.point, CertificateKind::Semi)?);
        }
        for (l, p) in &lc.flags {
            if let Some(c) = flag_search(&lc.field, &lc.form, l, p, false, &mut lp)? {
                semis.push(c);
            }
        }
    }
    Ok(if semis.is_empty() { FiberVerdict::Stable } else { FiberVerdict::SemistableNotStable(semis) })
}

/// Brute-force verdict over a finite residue field: every flag `P ∈ L`, every
/// line and every point of the curve over `F_{q^j}`, `j ≤ m_max`, each with
/// its ordered weight search.
pub fn check_fiber_oracle(rf: &ResidueField, form: &Form<Res>, m_max: u32) -> Result<FiberVerdict> {
    check_plane(form)?;
    let base = rf.gf().ok_or_else(|| Error::UnsupportedResidue("the oracle enumerates finite fields only".into()))?;
    let mut flags_total: u64 = 0;
    for j in 1..=m_max {
        let q = base.q.checked_pow(j).ok_or_else(|| Error::SearchSpaceTooLarge("field too large".into()))?;
        flags_total = flags_total.saturating_add((q * q + q + 1).saturating_mul(q + 1));
    }
    if flags_total > ORACLE_FLAG_LIMIT {
        return Err(Error::SearchSpaceTooLarge(format!("{flags_total} flags over {} up to degree {m_max}", rf.describe())));
    }
    let levels = search::levels(rf, m_max)?;
    let mut lp = FlagLp::default();
    let mut semis = Vec::new();
    for level in &levels {
        let f = &level.field;
        let g = f.gf().unwrap().clone();
        let form_l = search::embed_residue_form(rf, f, form)?;
        let below = |v: &[Res]| search::defined_below(&g, base.k, level.degree, v);
        let lc = LevelCandidates { field: f.clone(), form: form_l.clone(), lines: Vec::new(), points: Vec::new(), flags: Vec::new() };
        for p in search::plane_points(&g) {
            if below(&p) || !f.is_zero(&forms::eval(f, &form_l, &p)) {
                continue;
            }
            let c = lone_point(&lc, &p, CertificateKind::Strict)?;
            if c.sigma.is_positive() {
                return Ok(FiberVerdict::Unstable(c));
            }
            if !c.sigma.is_negative() {
                semis.push(InstabilityCertificate { kind: CertificateKind::Semi, ..c });
            }
        }
        for l in search::plane_points(&g) {
            let frame = geometry::line_frame(f, &l);
            if !below(&l) {
                let c = certificate(f, &form_l, frame.clone(), LINE_WEIGHTS.to_vec(), CertificateKind::Strict, Some(l.clone()), None)?;
                if c.sigma.is_positive() {
                    return Ok(FiberVerdict::Unstable(c));
                }
                if !c.sigma.is_negative() {
                    semis.push(InstabilityCertificate { kind: CertificateKind::Semi, ..c });
                }
            }
            for dir in search::line_points(&g) {
                let p: Vec<Res> = (0..3).map(|j| f.add(&f.mul(&dir[0], &frame[1][j]), &f.mul(&dir[1], &frame[2][j]))).collect();
                let p = geometry::normalize(f, &p);
                let both: Vec<Res> = l.iter().chain(&p).cloned().collect();
                if below(&both) {
                    continue;
                }
                let frame = geometry::flag_frame(f, &l, &p)?;
                let support = support_of(&forms::act(f, &frame, &form_l)?);
                let flag = |w, kind| certificate(f, &form_l, frame.clone(), w, kind, Some(l.clone()), Some(p.clone()));
                if let Some(w) = lp.search(support.clone(), true) {
                    return Ok(FiberVerdict::Unstable(flag(w, CertificateKind::Strict)?));
                }
                if semis.is_empty() {
                    if let Some(w) = lp.search(support, false) {
                        semis.push(flag(w, CertificateKind::Semi)?);
                    }
                }
            }
        }
    }
    Ok(if semis.is_empty() { FiberVerdict::Stable } else { FiberVerdict::SemistableNotStable(semis) })
}
