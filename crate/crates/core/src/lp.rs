//! Exact rational linear programming.
//!
//! A dense two-phase simplex with Bland's rule underlies everything here:
//! minimization of a maximum of affine functions on `R^{n+1}/R·(1,…,1)`,
//! strict and non-strict feasibility with Farkas certificates, enumeration of
//! the optimal face, and Fourier–Motzkin projection with tracked multipliers.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::{matrix, QQ};
use crate::error::{Error, Result};
use crate::rational::{fmt_rat, int, lcm_denoms, Rat};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Ge,
    Eq,
}

/// `coeffs · x  cmp  rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Row {
    pub coeffs: Vec<Rat>,
    pub cmp: Cmp,
    pub rhs: Rat,
}

impl Row {
    pub fn new(coeffs: Vec<Rat>, cmp: Cmp, rhs: Rat) -> Self {
        Row { coeffs, cmp, rhs }
    }

    pub fn holds(&self, x: &[Rat]) -> bool {
        let lhs = dot(&self.coeffs, x);
        match self.cmp {
            Cmp::Le => lhs <= self.rhs,
            Cmp::Ge => lhs >= self.rhs,
            Cmp::Eq => lhs == self.rhs,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpSolution {
    Optimal { x: Vec<Rat>, value: Rat },
    Infeasible,
    /// `x` is feasible and `x + s·ray` stays feasible with objective → −∞.
    Unbounded { x: Vec<Rat>, ray: Vec<Rat> },
}

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).fold(Rat::zero(), |acc, (x, y)| acc + x * y)
}

struct Tableau {
    t: Vec<Vec<Rat>>,
    basis: Vec<usize>,
    ncols: usize,
}

impl Tableau {
    fn rhs(&self, r: usize) -> &Rat {
        &self.t[r][self.ncols]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = Rat::one() / &self.t[r][c];
        for x in self.t[r].iter_mut() {
            *x = &*x * &inv;
        }
        let prow = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(&prow) {
                if !p.is_zero() {
                    *x = &*x - &f * p;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Minimizes `cost` over the allowed columns. `Err(col)` signals an
    /// unbounded entering column.
    fn run(&mut self, cost: &[Rat], allowed: &dyn Fn(usize) -> bool) -> std::result::Result<(), usize> {
        loop {
            let mut entering = None;
            for j in 0..self.ncols {
                if !allowed(j) || self.basis.contains(&j) {
                    continue;
                }
                let mut d = cost[j].clone();
                for (r, &b) in self.basis.iter().enumerate() {
                    if !cost[b].is_zero() && !self.t[r][j].is_zero() {
                        d -= &cost[b] * &self.t[r][j];
                    }
                }
                if d.is_negative() {
                    entering = Some(j);
                    break;
                }
            }
            let Some(j) = entering else { return Ok(()) };
            let mut best: Option<(usize, Rat)> = None;
            for r in 0..self.t.len() {
                if self.t[r][j].is_positive() {
                    let ratio = self.rhs(r) / &self.t[r][j];
                    let better = match &best {
                        None => true,
                        Some((br, bv)) => ratio < *bv || (ratio == *bv && self.basis[r] < self.basis[*br]),
                    };
                    if better {
                        best = Some((r, ratio));
                    }
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, j),
                None => return Err(j),
            }
        }
    }

    fn values(&self) -> Vec<Rat> {
        let mut y = vec![Rat::zero(); self.ncols];
        for (r, &b) in self.basis.iter().enumerate() {
            y[b] = self.rhs(r).clone();
        }
        y
    }
}

/// Minimizes `objective · x` over free variables `x ∈ Q^nvars` subject to
/// `rows`.
pub fn minimize(nvars: usize, rows: &[Row], objective: &[Rat]) -> LpSolution {
    solve(nvars, rows, objective, true)
}

/// As [`minimize`], with all variables constrained to be nonnegative.
pub fn minimize_nonneg(nvars: usize, rows: &[Row], objective: &[Rat]) -> LpSolution {
    solve(nvars, rows, objective, false)
}

fn solve(nvars: usize, rows: &[Row], objective: &[Rat], free: bool) -> LpSolution {
    let m = rows.len();
    let nslack = rows.iter().filter(|r| r.cmp != Cmp::Eq).count();
    let nx = if free { 2 * nvars } else { nvars };
    let art0 = nx + nslack;
    let ncols = art0 + m;
    let mut t = Vec::with_capacity(m);
    let mut slack = nx;
    for (r, row) in rows.iter().enumerate() {
        let mut line = vec![Rat::zero(); ncols + 1];
        for (j, a) in row.coeffs.iter().enumerate() {
            line[j] = a.clone();
            if free {
                line[nvars + j] = -a;
            }
        }
        match row.cmp {
            Cmp::Le => {
                line[slack] = Rat::one();
                slack += 1;
            }
            Cmp::Ge => {
                line[slack] = -Rat::one();
                slack += 1;
            }
            Cmp::Eq => {}
        }
        line[ncols] = row.rhs.clone();
        if row.rhs.is_negative() {
            for x in line.iter_mut() {
                *x = -&*x;
            }
        }
        line[art0 + r] = Rat::one();
        t.push(line);
    }
    let mut tab = Tableau { t, basis: (art0..art0 + m).collect(), ncols };
    let mut cost1 = vec![Rat::zero(); ncols];
    for c in cost1.iter_mut().skip(art0) {
        *c = Rat::one();
    }
    tab.run(&cost1, &|_| true).expect("phase one is bounded");
    let infeas: Rat = tab.basis.iter().enumerate().filter(|(_, &b)| b >= art0).map(|(r, _)| tab.rhs(r).clone()).sum();
    if infeas.is_positive() {
        return LpSolution::Infeasible;
    }
    // Drive remaining artificial variables out of the basis.
    let mut r = 0;
    while r < tab.t.len() {
        if tab.basis[r] >= art0 {
            match (0..art0).find(|&j| !tab.t[r][j].is_zero()) {
                Some(j) => tab.pivot(r, j),
                None => {
                    tab.t.remove(r);
                    tab.basis.remove(r);
                    continue;
                }
            }
        }
        r += 1;
    }
    let mut cost2 = vec![Rat::zero(); ncols];
    for (j, c) in objective.iter().enumerate() {
        cost2[j] = c.clone();
        if free {
            cost2[nvars + j] = -c;
        }
    }
    let split = |y: &[Rat]| -> Vec<Rat> {
        (0..nvars).map(|j| if free { &y[j] - &y[nvars + j] } else { y[j].clone() }).collect()
    };
    match tab.run(&cost2, &|j| j < art0) {
        Ok(()) => {
            let x = split(&tab.values());
            let value = dot(objective, &x);
            LpSolution::Optimal { x, value }
        }
        Err(j) => {
            let mut dir = vec![Rat::zero(); ncols];
            dir[j] = Rat::one();
            for (r, &b) in tab.basis.iter().enumerate() {
                dir[b] = -&tab.t[r][j];
            }
            LpSolution::Unbounded { x: split(&tab.values()), ray: split(&dir) }
        }
    }
}

// ------------------------------------------------------------ feasibility

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rel {
    Ge,
    Gt,
    Eq,
}

/// `coeffs · x  rel  rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: Vec<Rat>,
    pub rel: Rel,
    pub rhs: Rat,
}

impl Constraint {
    pub fn new(coeffs: Vec<Rat>, rel: Rel, rhs: Rat) -> Self {
        Constraint { coeffs, rel, rhs }
    }

    pub fn holds(&self, x: &[Rat]) -> bool {
        let lhs = dot(&self.coeffs, x);
        match self.rel {
            Rel::Ge => lhs >= self.rhs,
            Rel::Gt => lhs > self.rhs,
            Rel::Eq => lhs == self.rhs,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Feasibility {
    Feasible(Vec<Rat>),
    /// Multipliers `y` (nonnegative on inequality rows) with `Σ y_r a_r = 0`
    /// and either `Σ y_r b_r > 0`, or `Σ y_r b_r = 0` with positive weight on
    /// a strict row.
    Infeasible(Vec<Rat>),
}

/// Decides whether the system has a rational solution.
pub fn feasibility(nvars: usize, system: &[Constraint]) -> Feasibility {
    match feasible_point(nvars, system) {
        Some(x) => Feasibility::Feasible(x),
        None => Feasibility::Infeasible(farkas(nvars, system).expect("an infeasible system has a certificate")),
    }
}

/// A solution of the system, without an infeasibility certificate.
pub fn feasible_point(nvars: usize, system: &[Constraint]) -> Option<Vec<Rat>> {
    let has_strict = system.iter().any(|c| c.rel == Rel::Gt);
    let mut rows: Vec<Row> = Vec::with_capacity(system.len() + 1);
    for c in system {
        let mut coeffs = c.coeffs.clone();
        if has_strict {
            coeffs.push(if c.rel == Rel::Gt { -Rat::one() } else { Rat::zero() });
        }
        let cmp = if c.rel == Rel::Eq { Cmp::Eq } else { Cmp::Ge };
        rows.push(Row::new(coeffs, cmp, c.rhs.clone()));
    }
    let nv = nvars + usize::from(has_strict);
    let mut objective = vec![Rat::zero(); nv];
    if has_strict {
        let mut cap = vec![Rat::zero(); nv];
        cap[nvars] = Rat::one();
        rows.push(Row::new(cap, Cmp::Le, Rat::one()));
        objective[nvars] = -Rat::one();
    }
    match minimize(nv, &rows, &objective) {
        LpSolution::Optimal { x, .. } if !has_strict || x[nvars].is_positive() => Some(x[..nvars].to_vec()),
        LpSolution::Unbounded { .. } => unreachable!("margin is capped"),
        _ => None,
    }
}

fn farkas(nvars: usize, system: &[Constraint]) -> Option<Vec<Rat>> {
    let m = system.len();
    // Variables y_r, free for equalities; sign rows enforce y_r ≥ 0 otherwise.
    let mut base: Vec<Row> = Vec::new();
    for j in 0..nvars {
        base.push(Row::new(system.iter().map(|c| c.coeffs[j].clone()).collect(), Cmp::Eq, Rat::zero()));
    }
    for (r, c) in system.iter().enumerate() {
        if c.rel != Rel::Eq {
            base.push(Row::new(unit(m, r), Cmp::Ge, Rat::zero()));
        }
    }
    let abs_bound = |rows: &mut Vec<Row>| {
        // Normalization Σ|y| ≤ 1 for sign-constrained y, and |y_r| ≤ 1 for free ones.
        let ineq: Vec<Rat> = system.iter().map(|c| if c.rel == Rel::Eq { Rat::zero() } else { Rat::one() }).collect();
        rows.push(Row::new(ineq, Cmp::Le, Rat::one()));
        for (r, c) in system.iter().enumerate() {
            if c.rel == Rel::Eq {
                rows.push(Row::new(unit(m, r), Cmp::Le, Rat::one()));
                rows.push(Row::new(unit(m, r), Cmp::Ge, -Rat::one()));
            }
        }
    };
    let b: Vec<Rat> = system.iter().map(|c| c.rhs.clone()).collect();
    let mut rows = base.clone();
    abs_bound(&mut rows);
    let neg_b: Vec<Rat> = b.iter().map(|x| -x).collect();
    if let LpSolution::Optimal { x, value } = minimize(m, &rows, &neg_b) {
        if value.is_negative() {
            return Some(x);
        }
    }
    let mut rows = base;
    abs_bound(&mut rows);
    rows.push(Row::new(b, Cmp::Ge, Rat::zero()));
    let strict: Vec<Rat> = system.iter().map(|c| if c.rel == Rel::Gt { -Rat::one() } else { Rat::zero() }).collect();
    if let LpSolution::Optimal { x, value } = minimize(m, &rows, &strict) {
        if value.is_negative() {
            return Some(x);
        }
    }
    None
}

/// Checks a Farkas certificate returned by [`feasibility`].
pub fn check_farkas(nvars: usize, system: &[Constraint], y: &[Rat]) -> bool {
    if y.len() != system.len() {
        return false;
    }
    for (c, yr) in system.iter().zip(y) {
        if c.rel != Rel::Eq && yr.is_negative() {
            return false;
        }
    }
    for j in 0..nvars {
        let s: Rat = system.iter().zip(y).map(|(c, yr)| &c.coeffs[j] * yr).sum();
        if !s.is_zero() {
            return false;
        }
    }
    let rhs: Rat = system.iter().zip(y).map(|(c, yr)| &c.rhs * yr).sum();
    rhs.is_positive()
        || (rhs.is_zero() && system.iter().zip(y).any(|(c, yr)| c.rel == Rel::Gt && yr.is_positive()))
}

fn unit(m: usize, r: usize) -> Vec<Rat> {
    let mut v = vec![Rat::zero(); m];
    v[r] = Rat::one();
    v
}

// --------------------------------------------------- max of affine pieces

/// The affine function `w ↦ linear · w + constant` on `R^{n+1}`; the linear
/// part annihilates `(1,…,1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffinePiece {
    pub linear: Vec<Rat>,
    pub constant: Rat,
}

impl AffinePiece {
    pub fn eval(&self, w: &[Rat]) -> Rat {
        dot(&self.linear, w) + &self.constant
    }
}

pub fn eval_max(pieces: &[AffinePiece], w: &[Rat]) -> Rat {
    pieces.iter().map(|p| p.eval(w)).max().expect("nonempty family")
}

/// The set `M = {w : w_n = 0, max_i piece_i(w) ≤ value}` of minimizers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OptimalFace {
    pub value: Rat,
    /// Deterministic minimizer: the lexicographically smallest vertex when the
    /// face is bounded.
    pub minimizer: Vec<Rat>,
    pub pieces: Vec<AffinePiece>,
    pub bounded: bool,
    /// Vertices in lexicographic order.
    pub vertices: Vec<Vec<Rat>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal(OptimalFace),
    /// A direction (with `ray_n = 0`) along which the maximum decreases
    /// without bound.
    UnboundedBelow { ray: Vec<Rat> },
}

impl OptimalFace {
    pub fn contains(&self, w: &[Rat]) -> bool {
        w.last().is_some_and(|x| x.is_zero()) && eval_max(&self.pieces, w) <= self.value
    }

    /// Pieces attaining the maximum at the minimizer.
    pub fn active(&self) -> Vec<usize> {
        (0..self.pieces.len()).filter(|&i| self.pieces[i].eval(&self.minimizer) == self.value).collect()
    }

    /// The vertex whose coordinates have the smallest common denominator;
    /// ties go to the lexicographically smaller vertex.
    pub fn smallest_denominator_minimizer(&self) -> Vec<Rat> {
        self.vertices
            .iter()
            .min_by(|a, b| lcm_denoms(a.iter()).cmp(&lcm_denoms(b.iter())).then_with(|| a.cmp(b)))
            .cloned()
            .unwrap_or_else(|| self.minimizer.clone())
    }

    /// Weights `λ ≥ 0` on the active pieces, summing to 1, whose combined
    /// linear part vanishes and whose combined constant equals the value.
    /// This proves that no point does better than `value`.
    pub fn dual_certificate(&self) -> Option<Vec<(usize, Rat)>> {
        let active = self.active();
        let k = active.len();
        let n1 = self.minimizer.len();
        let mut rows = Vec::new();
        for j in 0..n1 - 1 {
            rows.push(Row::new(active.iter().map(|&i| self.pieces[i].linear[j].clone()).collect(), Cmp::Eq, Rat::zero()));
        }
        rows.push(Row::new(vec![Rat::one(); k], Cmp::Eq, Rat::one()));
        for r in 0..k {
            rows.push(Row::new(unit(k, r), Cmp::Ge, Rat::zero()));
        }
        let obj: Vec<Rat> = active.iter().map(|&i| -&self.pieces[i].constant).collect();
        match minimize(k, &rows, &obj) {
            LpSolution::Optimal { x, .. } => {
                let cert: Vec<(usize, Rat)> =
                    active.iter().zip(x).filter(|(_, l)| !l.is_zero()).map(|(&i, l)| (i, l)).collect();
                self.check_dual(&cert).then_some(cert)
            }
            _ => None,
        }
    }

    pub fn check_dual(&self, cert: &[(usize, Rat)]) -> bool {
        let n1 = self.minimizer.len();
        let sum: Rat = cert.iter().map(|(_, l)| l.clone()).sum();
        if !sum.is_one() || cert.iter().any(|(_, l)| l.is_negative()) {
            return false;
        }
        for j in 0..n1 {
            let s: Rat = cert.iter().map(|(i, l)| l * &self.pieces[*i].linear[j]).sum();
            if !s.is_zero() {
                return false;
            }
        }
        let c: Rat = cert.iter().map(|(i, l)| l * &self.pieces[*i].constant).sum();
        c == self.value
    }
}

/// Minimizes `max_i (linear_i · w + constant_i)` over `w ∈ Q^{n+1}` modulo the
/// diagonal (normalized by `w_n = 0`).
pub fn minimize_max_affine(pieces: &[AffinePiece]) -> LpOutcome {
    assert!(!pieces.is_empty(), "empty affine family");
    let n1 = pieces[0].linear.len();
    let n = n1 - 1;
    // Variables (w_0..w_{n-1}, t).
    let rows: Vec<Row> = pieces
        .iter()
        .map(|p| {
            let mut c: Vec<Rat> = p.linear[..n].iter().map(|x| -x).collect();
            c.push(Rat::one());
            Row::new(c, Cmp::Ge, p.constant.clone())
        })
        .collect();
    let mut obj = vec![Rat::zero(); n + 1];
    obj[n] = Rat::one();
    let (x, value) = match minimize(n + 1, &rows, &obj) {
        LpSolution::Optimal { x, value } => (x, value),
        LpSolution::Unbounded { ray, .. } => {
            let mut r = ray[..n].to_vec();
            r.push(Rat::zero());
            return LpOutcome::UnboundedBelow { ray: r };
        }
        LpSolution::Infeasible => unreachable!("epigraph is never empty"),
    };
    let face_rows: Vec<Row> = pieces
        .iter()
        .map(|p| Row::new(p.linear[..n].to_vec(), Cmp::Le, &value - &p.constant))
        .collect();
    let bounded = (0..n).all(|j| {
        let mut c = vec![Rat::zero(); n];
        c[j] = Rat::one();
        let lo = matches!(minimize(n, &face_rows, &c), LpSolution::Optimal { .. });
        c[j] = -Rat::one();
        lo && matches!(minimize(n, &face_rows, &c), LpSolution::Optimal { .. })
    });
    let vertices = face_vertices(&face_rows, n);
    let minimizer = if bounded && !vertices.is_empty() {
        vertices[0].clone()
    } else {
        let mut w = x[..n].to_vec();
        w.push(Rat::zero());
        w
    };
    LpOutcome::Optimal(OptimalFace { value, minimizer, pieces: pieces.to_vec(), bounded, vertices })
}

fn face_vertices(rows: &[Row], n: usize) -> Vec<Vec<Rat>> {
    let mut out = BTreeSet::new();
    let idx: Vec<usize> = (0..rows.len()).collect();
    for subset in combinations(&idx, n) {
        let a: Vec<Vec<Rat>> = subset.iter().map(|&i| rows[i].coeffs.clone()).collect();
        let b: Vec<Rat> = subset.iter().map(|&i| rows[i].rhs.clone()).collect();
        if let Some(x) = matrix::solve(&QQ, &a, &b) {
            if rows.iter().all(|r| r.holds(&x)) {
                let mut w = x;
                w.push(Rat::zero());
                out.insert(w);
            }
        }
    }
    if n == 0 {
        out.insert(vec![Rat::zero()]);
    }
    out.into_iter().collect()
}

pub fn combinations<T: Clone>(items: &[T], k: usize) -> Vec<Vec<T>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if items.len() < k {
        return Vec::new();
    }
    let mut out = Vec::new();
    for (i, x) in items.iter().enumerate() {
        for mut rest in combinations(&items[i + 1..], k - 1) {
            rest.insert(0, x.clone());
            out.push(rest);
        }
    }
    out
}

/// Points of the optimal face with all coordinates in `step·Z` (so all
/// weight differences lie in the value group `step·Z`). The flag is `true`
/// when the face is unbounded and only its lattice vertices are returned.
pub fn lattice_minimizers(face: &OptimalFace, step: &Rat) -> (Vec<Vec<Rat>>, bool) {
    let on_lattice = |w: &Vec<Rat>| w.iter().all(|x| (x / step).is_integer());
    if !face.bounded {
        return (face.vertices.iter().filter(|w| on_lattice(w)).cloned().collect(), true);
    }
    let n1 = face.minimizer.len();
    let mut ranges = Vec::new();
    for j in 0..n1 - 1 {
        let lo = face.vertices.iter().map(|v| &v[j]).min().unwrap();
        let hi = face.vertices.iter().map(|v| &v[j]).max().unwrap();
        let lo = (lo / step).ceil().to_integer();
        let hi = (hi / step).floor().to_integer();
        ranges.push((lo, hi));
    }
    let mut out = Vec::new();
    let mut cur: Vec<BigInt> = ranges.iter().map(|r| r.0.clone()).collect();
    if ranges.iter().any(|(lo, hi)| lo > hi) {
        return (out, false);
    }
    loop {
        let mut w: Vec<Rat> = cur.iter().map(|k| Rat::from_integer(k.clone()) * step).collect();
        w.push(Rat::zero());
        if face.contains(&w) {
            out.push(w);
        }
        let mut j = 0;
        loop {
            if j == cur.len() {
                return (out, false);
            }
            if cur[j] < ranges[j].1 {
                cur[j] += 1;
                break;
            }
            cur[j] = ranges[j].0.clone();
            j += 1;
        }
    }
}

// --------------------------------------------------------- Fourier–Motzkin

/// Rows `coeffs · x ≥ rhs`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InequalitySystem {
    pub nvars: usize,
    #[serde(with = "rat_rows")]
    pub rows: Vec<(Vec<Rat>, Rat)>,
}

mod rat_rows {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(rows: &[(Vec<Rat>, Rat)], s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<(Vec<String>, String)> =
            rows.iter().map(|(a, b)| (a.iter().map(fmt_rat).collect(), fmt_rat(b))).collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<(Vec<Rat>, Rat)>, D::Error> {
        let v: Vec<(Vec<String>, String)> = Vec::deserialize(d)?;
        v.into_iter()
            .map(|(a, b)| {
                let a = a.iter().map(|s| crate::rational::parse_rat(s)).collect::<Result<Vec<_>>>();
                let b = crate::rational::parse_rat(&b);
                match (a, b) {
                    (Ok(a), Ok(b)) => Ok((a, b)),
                    _ => Err(serde::de::Error::custom("bad rational")),
                }
            })
            .collect()
    }
}

/// Nonnegative integer multipliers `e_{r,k}` over the original rows, one row
/// per projected inequality, all with the common sum `e`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectionCertificate {
    pub rows: Vec<Vec<BigInt>>,
    pub e: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Projection {
    /// The projected system over the retained variables, in their original
    /// relative order.
    pub system: InequalitySystem,
    pub retained: Vec<usize>,
    pub certificate: ProjectionCertificate,
}

/// Bound on the candidate rows of a single elimination step. The full
/// `(n, d) = (2, 4)` system peaks at 582 candidates; `(2, 5)` needs 2710.
pub const DEFAULT_ROW_BOUND: usize = 1000;

#[derive(Clone)]
struct FmRow {
    coeffs: Vec<Rat>,
    rhs: Rat,
    mult: Vec<Rat>,
}

/// Eliminates the listed variables. Multipliers over the original rows are
/// tracked so each projected row is a certified nonnegative combination.
pub fn fourier_motzkin_project(
    system: &InequalitySystem,
    eliminate: &[usize],
    row_bound: usize,
) -> Result<Projection> {
    let m = system.rows.len();
    let mut rows: Vec<FmRow> = system
        .rows
        .iter()
        .enumerate()
        .map(|(r, (a, b))| FmRow { coeffs: a.clone(), rhs: b.clone(), mult: unit(m, r) })
        .collect();
    let mut eliminated = 0usize;
    for &v in eliminate {
        let (mut pos, mut neg, mut keep) = (Vec::new(), Vec::new(), Vec::new());
        for r in rows {
            if r.coeffs[v].is_positive() {
                pos.push(r);
            } else if r.coeffs[v].is_negative() {
                neg.push(r);
            } else {
                keep.push(r);
            }
        }
        eliminated += 1;
        let candidates = pos.len() * neg.len() + keep.len();
        if candidates > row_bound {
            return Err(Error::SystemTooLarge(format!(
                "eliminating a variable would produce {candidates} candidate rows (bound {row_bound})"
            )));
        }
        for p in &pos {
            for q in &neg {
                let (cp, cq) = (p.coeffs[v].clone(), -&q.coeffs[v]);
                let comb = FmRow {
                    coeffs: p.coeffs.iter().zip(&q.coeffs).map(|(x, y)| x * &cq + y * &cp).collect(),
                    rhs: &p.rhs * &cq + &q.rhs * &cp,
                    mult: p.mult.iter().zip(&q.mult).map(|(x, y)| x * &cq + y * &cp).collect(),
                };
                // Chernikov: a row built from more than `eliminated + 1`
                // originals is implied by the others.
                if comb.mult.iter().filter(|x| !x.is_zero()).count() <= eliminated + 1 {
                    keep.push(comb);
                }
            }
        }
        rows = prune_redundant(dedupe(keep), system.nvars);
    }
    let retained: Vec<usize> = (0..system.nvars).filter(|j| !eliminate.contains(j)).collect();
    let projected = InequalitySystem {
        nvars: retained.len(),
        rows: rows.iter().map(|r| (retained.iter().map(|&j| r.coeffs[j].clone()).collect(), r.rhs.clone())).collect(),
    };
    let mut int_rows: Vec<Vec<BigInt>> = rows.iter().map(|r| primitive_integers(&r.mult)).collect();
    let sums: Vec<BigInt> = int_rows.iter().map(|r| r.iter().sum()).collect();
    let e = sums.iter().fold(BigInt::one(), |acc, s| acc.lcm(s));
    for (row, s) in int_rows.iter_mut().zip(&sums) {
        let f = &e / s;
        for x in row.iter_mut() {
            *x *= &f;
        }
    }
    let e = if int_rows.is_empty() { BigInt::zero() } else { e };
    Ok(Projection { system: projected, retained, certificate: ProjectionCertificate { rows: int_rows, e } })
}

fn primitive_integers(v: &[Rat]) -> Vec<BigInt> {
    let l = lcm_denoms(v.iter());
    let ints: Vec<BigInt> = v.iter().map(|x| (x * Rat::from_integer(l.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}

fn normalize_row(r: FmRow) -> FmRow {
    let mut all = r.coeffs.clone();
    all.push(r.rhs.clone());
    let l = lcm_denoms(all.iter());
    let ints: Vec<BigInt> = all.iter().map(|x| (x * Rat::from_integer(l.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return r;
    }
    let s = Rat::from_integer(l) / Rat::from_integer(g);
    FmRow {
        coeffs: r.coeffs.iter().map(|x| x * &s).collect(),
        rhs: &r.rhs * &s,
        mult: r.mult.iter().map(|x| x * &s).collect(),
    }
}

fn dedupe(rows: Vec<FmRow>) -> Vec<FmRow> {
    let mut out: Vec<FmRow> = Vec::new();
    for r in rows.into_iter().map(normalize_row) {
        if r.coeffs.iter().all(|x| x.is_zero()) && !r.rhs.is_positive() {
            continue;
        }
        let total: Rat = r.mult.iter().sum();
        match out.iter_mut().find(|o| o.coeffs == r.coeffs && o.rhs == r.rhs) {
            Some(o) => {
                if total < o.mult.iter().sum::<Rat>() {
                    *o = r;
                }
            }
            None => out.push(r),
        }
    }
    out
}

/// Drops rows implied by the remaining ones. Row `r` is implied when
/// `a_r = Σ λ_j a_j` with `λ ≥ 0` and `Σ λ_j b_j ≥ b_r`, decided by LP over
/// the multipliers.
fn prune_redundant(mut rows: Vec<FmRow>, nvars: usize) -> Vec<FmRow> {
    let mut i = 0;
    while i < rows.len() {
        if rows.len() == 1 {
            break;
        }
        let others: Vec<&FmRow> = rows.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, r)| r).collect();
        let k = others.len();
        let eqs: Vec<Row> = (0..nvars)
            .map(|v| Row::new(others.iter().map(|r| r.coeffs[v].clone()).collect(), Cmp::Eq, rows[i].coeffs[v].clone()))
            .collect();
        let obj: Vec<Rat> = others.iter().map(|r| -&r.rhs).collect();
        let implied = match minimize_nonneg(k, &eqs, &obj) {
            LpSolution::Optimal { value, .. } => -value >= rows[i].rhs,
            LpSolution::Unbounded { .. } => true,
            LpSolution::Infeasible => false,
        };
        if implied {
            rows.remove(i);
        } else {
            i += 1;
        }
    }
    rows
}

/// The system `t_i − l_i(w) ≥ 0` over `i ∈ I_d`, with variables ordered as
/// `(t_i)_{i ∈ I_d}` followed by `w_0,…,w_{n−1}` (the coordinate `w_n` is
/// fixed to 0, which loses nothing because every `l_i` annihilates the
/// diagonal). Here `l_i(w) = d/(n+1)·Σ_j w_j − ⟨i,w⟩`.
pub fn stability_system(n: usize, d: u32) -> (Vec<Vec<u32>>, InequalitySystem) {
    let exps = all_exponents(n, d);
    let k = exps.len();
    let c = Rat::new(BigInt::from(d), BigInt::from(n + 1));
    let rows = exps
        .iter()
        .enumerate()
        .map(|(r, i)| {
            let mut a = unit(k + n, r);
            for j in 0..n {
                // −l_i contributes (i_j − d/(n+1)) · w_j.
                a[k + j] = int(i64::from(i[j])) - &c;
            }
            (a, Rat::zero())
        })
        .collect();
    (exps, InequalitySystem { nvars: k + n, rows })
}

/// Exponent tuples of degree `d` in `n+1` variables, in descending
/// lexicographic order.
pub fn all_exponents(n: usize, d: u32) -> Vec<Vec<u32>> {
    fn rec(n: usize, d: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if n == 0 {
            prefix.push(d);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for a in (0..=d).rev() {
            prefix.push(a);
            rec(n - 1, d - a, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, d, &mut Vec::new(), &mut out);
    out
}

/// The nonnegative integers `e_{i,k}` with common row sum `e` such that
/// `t_i ≥ l_i(w)` is solvable in `w` exactly when `Σ_i e_{i,k} t_i ≥ 0` for
/// every `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilityCertificate {
    pub n: usize,
    pub d: u32,
    pub exponents: Vec<Vec<u32>>,
    pub rows: Vec<Vec<BigInt>>,
    pub e: BigInt,
}

#[derive(Serialize, Deserialize)]
struct StabilityCertificateJson {
    n: usize,
    d: u32,
    exponents: Vec<Vec<u32>>,
    rows: Vec<Vec<String>>,
    e: String,
}

impl Serialize for StabilityCertificate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        StabilityCertificateJson {
            n: self.n,
            d: self.d,
            exponents: self.exponents.clone(),
            rows: self.rows.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect(),
            e: self.e.to_string(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for StabilityCertificate {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = StabilityCertificateJson::deserialize(d)?;
        let parse = |s: &str| s.parse::<BigInt>().map_err(serde::de::Error::custom);
        Ok(StabilityCertificate {
            n: j.n,
            d: j.d,
            exponents: j.exponents,
            rows: j.rows.iter().map(|r| r.iter().map(|x| parse(x)).collect()).collect::<std::result::Result<_, _>>()?,
            e: parse(&j.e)?,
        })
    }
}

pub fn certify_projection(n: usize, d: u32, row_bound: usize) -> Result<StabilityCertificate> {
    if n == 0 || d == 0 {
        return Err(Error::Input("need n ≥ 1 and d ≥ 1".into()));
    }
    let (exponents, system) = stability_system(n, d);
    let k = exponents.len();
    let proj = fourier_motzkin_project(&system, &(k..k + n).collect::<Vec<_>>(), row_bound)?;
    Ok(StabilityCertificate { n, d, exponents, rows: proj.certificate.rows, e: proj.certificate.e })
}

impl StabilityCertificate {
    /// Whether `(t_i)` satisfies every certificate row.
    pub fn admits(&self, t: &[Rat]) -> bool {
        self.rows.iter().all(|r| {
            let s: Rat = r.iter().zip(t).map(|(e, x)| Rat::from_integer(e.clone()) * x).sum();
            !s.is_negative()
        })
    }

    /// `−min_k Σ_i e_{i,k} v_i / e` for finite valuations `v_i`; rows that
    /// put weight on an infinite valuation are skipped.
    pub fn apartment_minimum(&self, valuations: &[Option<Rat>]) -> Option<Rat> {
        let e = Rat::from_integer(self.e.clone());
        self.rows
            .iter()
            .filter_map(|r| {
                let mut s = Rat::zero();
                for (x, v) in r.iter().zip(valuations) {
                    if x.is_zero() {
                        continue;
                    }
                    s += Rat::from_integer(x.clone()) * v.as_ref()?;
                }
                Some(s)
            })
            .min()
            .map(|s| -s / e)
    }
}

/// Outcome of comparing a certificate against the direct LP on random data.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplingReport {
    pub samples: usize,
    /// Samples for which the system was solvable.
    pub feasible: usize,
    /// Samples where the certificate and the LP disagree.
    pub mismatches: usize,
}

impl StabilityCertificate {
    /// Draws `samples` vectors `t` and checks `admits(t)` against
    /// [`stability_system_feasible`]. Half of the draws are `t = l(w) + s`
    /// with `s ≥ 0`, which are solvable by construction; the rest perturb
    /// `l(w)` in both directions.
    pub fn check_by_sampling<R: rand::Rng>(&self, samples: usize, rng: &mut R) -> SamplingReport {
        let c = Rat::new(BigInt::from(self.d), BigInt::from(self.n + 1));
        let mut report = SamplingReport { samples, feasible: 0, mismatches: 0 };
        let small = |rng: &mut R, lo: i64, hi: i64| Rat::new(BigInt::from(rng.gen_range(lo..=hi)), BigInt::from(6));
        for s in 0..samples {
            let w: Vec<Rat> = (0..self.n).map(|_| small(rng, -18, 18)).collect();
            let t: Vec<Rat> = self
                .exponents
                .iter()
                .map(|i| {
                    let l: Rat = w.iter().zip(i).map(|(wj, &ij)| (&c - int(i64::from(ij))) * wj).sum();
                    let slack = if s % 2 == 0 { small(rng, 0, 12) } else { small(rng, -6, 6) };
                    l + slack
                })
                .collect();
            let direct = stability_system_feasible(self.n, self.d, &t);
            report.feasible += usize::from(direct);
            report.mismatches += usize::from(direct != self.admits(&t));
        }
        report
    }
}

/// Whether `t_i ≥ l_i(w)` has a solution `w` (direct LP check).
pub fn stability_system_feasible(n: usize, d: u32, t: &[Rat]) -> bool {
    let (_, system) = stability_system(n, d);
    let k = t.len();
    let rows: Vec<Constraint> = system
        .rows
        .iter()
        .map(|(a, _)| {
            let idx = a[..k].iter().position(|x| !x.is_zero()).unwrap();
            Constraint::new(a[k..].to_vec(), Rel::Ge, -&t[idx])
        })
        .collect();
    matches!(feasibility(n, &rows), Feasibility::Feasible(_))
}
