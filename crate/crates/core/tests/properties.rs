//! Randomized invariants of the field backends, forms, the stability
//! classifier, the stability function, the linear programs and the descent.

use num_traits::{Signed, Zero};
use proptest::prelude::*;
use semistable::algebra::matrix::{self, Mat};
use semistable::algebra::Field;
use semistable::building::{self, BuildingPoint};
use semistable::descent::{self, DescentOptions};
use semistable::forms::{self, Form};
use semistable::geometry;
use semistable::git_stability::{check_fiber, int_weights, sigma, FiberVerdict};
use semistable::lp::{self, AffinePiece, LpOutcome};
use semistable::rational::{int, rat, ExtRat, Rat};
use semistable::search;
use semistable::{FieldElement, Res, ResidueField, ValuedField};

fn backends() -> Vec<ValuedField> {
    vec![
        ValuedField::padic(3).unwrap(),
        ValuedField::padic(2).unwrap().extend_ramified_with_unit(2, &int(-1)).unwrap(),
        ValuedField::padic(2).unwrap().extend_unramified(2).unwrap(),
        ValuedField::laurent(ResidueField::Rationals),
        ValuedField::laurent(ResidueField::finite(3, 1).unwrap()).extend_ramified(3).unwrap(),
    ]
}

/// `c·π^k + c'` from a small integer triple.
fn element(k: &ValuedField, (c, e, c0): (i64, i64, i64)) -> FieldElement {
    k.add(&k.mul(&k.from_int(c), &k.uniformizer_pow(e)), &k.from_int(c0))
}

fn elem_strategy() -> impl Strategy<Value = (i64, i64, i64)> {
    (-6i64..=6, -2i64..=4, -6i64..=6)
}

fn val(k: &ValuedField, x: &FieldElement) -> ExtRat {
    k.valuation(x)
}

fn finite_field(p: u64, m: u32) -> ResidueField {
    ResidueField::finite(p, m).unwrap()
}

fn residue_form(f: &ResidueField, d: u32, coeffs: &[u64]) -> Form<Res> {
    let q = f.cardinality().unwrap() as i64;
    let terms: Vec<_> = lp::all_exponents(2, d)
        .into_iter()
        .zip(coeffs.iter().cycle())
        .map(|(e, &c)| (e, f.from_int(c as i64 % q)))
        .collect();
    forms::from_terms(f, 2, d, terms).unwrap()
}

fn residue_matrix(f: &ResidueField, entries: &[u64]) -> Option<Mat<Res>> {
    let q = f.cardinality().unwrap() as i64;
    let g: Mat<Res> = (0..3).map(|i| (0..3).map(|j| f.from_int(entries[3 * i + j] as i64 % q)).collect()).collect();
    (!f.is_zero(&matrix::det(f, &g))).then_some(g)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn valuation_is_multiplicative_and_ultrametric(b in 0usize..5, x in elem_strategy(), y in elem_strategy()) {
        let k = &backends()[b];
        let (x, y) = (element(k, x), element(k, y));
        prop_assume!(!k.is_zero(&x) && !k.is_zero(&y));
        let (vx, vy) = (val(k, &x).finite().unwrap().clone(), val(k, &y).finite().unwrap().clone());
        prop_assert_eq!(val(k, &k.mul(&x, &y)), ExtRat::Fin(&vx + &vy));
        let s = k.add(&x, &y);
        let m = vx.clone().min(vy.clone());
        match val(k, &s) {
            ExtRat::Inf => prop_assert_eq!(&vx, &vy),
            ExtRat::Fin(vs) => {
                prop_assert!(vs >= m);
                if vx != vy {
                    prop_assert_eq!(vs, m);
                }
            }
        }
    }

    #[test]
    fn reduction_is_a_ring_map(b in 0usize..5, x in (-6i64..=6, 0i64..=4, -6i64..=6), y in (-6i64..=6, 0i64..=4, -6i64..=6)) {
        let k = &backends()[b];
        let rf = k.residue_field();
        let (x, y) = (element(k, x), element(k, y));
        let (rx, ry) = (k.reduce(&x).unwrap(), k.reduce(&y).unwrap());
        prop_assert_eq!(k.reduce(&k.add(&x, &y)).unwrap(), rf.add(&rx, &ry));
        prop_assert_eq!(k.reduce(&k.mul(&x, &y)).unwrap(), rf.mul(&rx, &ry));
    }

    #[test]
    fn ramified_towers_multiply_value_groups(e1 in 1u32..4, e2 in 1u32..4, laurent in any::<bool>()) {
        let k = if laurent { ValuedField::laurent(ResidueField::Rationals) } else { ValuedField::padic(3).unwrap() };
        let l = k.extend_ramified(e1).unwrap().extend_ramified(e2).unwrap();
        prop_assert_eq!(l.value_group_step(), k.value_group_step() / Rat::from_integer((e1 * e2).into()));
    }

    #[test]
    fn act_is_a_left_action_over_finite_fields(p in prop::sample::select(vec![2u64, 3, 5]), c in prop::collection::vec(0u64..25, 10), a in prop::collection::vec(0u64..25, 9), b in prop::collection::vec(0u64..25, 9)) {
        let f = finite_field(p, 1);
        let form = residue_form(&f, 3, &c);
        let (Some(g), Some(h)) = (residue_matrix(&f, &a), residue_matrix(&f, &b)) else { return Ok(()) };
        let lhs = forms::act(&f, &matrix::mul(&f, &g, &h), &form).unwrap();
        let rhs = forms::act(&f, &g, &forms::act(&f, &h, &form).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn act_is_a_left_action_over_q2(c in prop::collection::vec(elem_strategy(), 10), a in prop::collection::vec(elem_strategy(), 9), b in prop::collection::vec(elem_strategy(), 9)) {
        let k = ValuedField::padic(2).unwrap();
        let terms: Vec<_> = lp::all_exponents(2, 3).into_iter().zip(&c).map(|(e, &x)| (e, element(&k, x))).collect();
        let form = forms::from_terms(&k, 2, 3, terms).unwrap();
        let m = |v: &[(i64, i64, i64)]| -> Mat<FieldElement> { (0..3).map(|i| (0..3).map(|j| element(&k, v[3 * i + j])).collect()).collect() };
        let (g, h) = (m(&a), m(&b));
        prop_assume!(!k.is_zero(&matrix::det(&k, &g)) && !k.is_zero(&matrix::det(&k, &h)));
        let lhs = forms::act(&k, &matrix::mul(&k, &g, &h), &form).unwrap();
        let rhs = forms::act(&k, &g, &forms::act(&k, &h, &form).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn multiplicities_are_invariant_and_bounded(p in prop::sample::select(vec![2u64, 3]), d in 3u32..=5, c in prop::collection::vec(0u64..9, 21), a in prop::collection::vec(0u64..9, 9)) {
        let f = finite_field(p, 1);
        let form = residue_form(&f, d, &c);
        prop_assume!(!form.is_zero());
        let Some(g) = residue_matrix(&f, &a) else { return Ok(()) };
        let moved = forms::act(&f, &g, &form).unwrap();
        let gt_inv = matrix::inverse(&f, &matrix::transpose(&g)).unwrap();
        let gf = f.gf().unwrap().clone();
        let mut line_total = 0;
        for v in search::plane_points(&gf) {
            let mp = geometry::point_multiplicity(&f, &form, &v);
            prop_assert!(mp <= d);
            let image: Vec<Res> = (0..3).map(|i| (0..3).fold(f.zero(), |s, j| f.add(&s, &f.mul(&gt_inv[i][j], &v[j])))).collect();
            prop_assert_eq!(geometry::point_multiplicity(&f, &moved, &image), mp);
            let ml = geometry::line_multiplicity(&f, &form, &v);
            line_total += ml;
            let line_image: Vec<Res> = (0..3).map(|i| (0..3).fold(f.zero(), |s, j| f.add(&s, &f.mul(&g[i][j], &v[j])))).collect();
            prop_assert_eq!(geometry::line_multiplicity(&f, &moved, &line_image), ml);
        }
        prop_assert!(line_total <= d);
    }

    #[test]
    fn reduction_commutes_with_integral_action(c in prop::collection::vec((-4i64..=4, 0i64..=2, -4i64..=4), 10), a in prop::collection::vec((-3i64..=3, 0i64..=2, -3i64..=3), 9), b in 0usize..5) {
        let k = &backends()[b];
        let mut terms: Vec<_> = lp::all_exponents(2, 3).into_iter().zip(&c).map(|(e, &x)| (e, element(k, x))).collect();
        terms[0].1 = k.add(&k.one(), &k.mul(&k.uniformizer(), &terms[0].1));
        let form = forms::from_terms(k, 2, 3, terms).unwrap();
        let g: Mat<FieldElement> = (0..3).map(|i| (0..3).map(|j| element(k, a[3 * i + j])).collect()).collect();
        prop_assume!(building::in_gl_o(k, &g));
        let rf = k.residue_field();
        let gbar: Mat<Res> = g.iter().map(|r| r.iter().map(|x| k.reduce(x).unwrap()).collect()).collect();
        let lhs = forms::reduce_form(k, &forms::act(k, &g, &form).unwrap()).unwrap();
        let rhs = forms::act(&rf, &gbar, &forms::reduce_form(k, &form).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn sigma_is_positively_homogeneous(c in prop::collection::vec(0u64..5, 10), w in prop::collection::vec(-6i64..=6, 2), num in 1i64..10, den in 1i64..10) {
        let f = finite_field(5, 1);
        let form = residue_form(&f, 3, &c);
        prop_assume!(!form.is_zero());
        let w = vec![int(w[0]), int(w[1]), int(-w[0] - w[1])];
        let s = rat(num, den);
        let scaled: Vec<Rat> = w.iter().map(|x| x * &s).collect();
        prop_assert_eq!(sigma(&form, &scaled), sigma(&form, &w) * s);
    }

    #[test]
    fn verdicts_are_invariant_and_certificates_validate(p in prop::sample::select(vec![2u64, 3]), d in 3u32..=5, c in prop::collection::vec(0u64..9, 21), sparse in prop::collection::vec(any::<bool>(), 21), a in prop::collection::vec(0u64..9, 9)) {
        let f = finite_field(p, 1);
        let form = residue_form(&f, d, &c);
        let terms: Vec<_> = form.terms.iter().zip(sparse.iter().cycle()).filter(|(_, &s)| s).map(|((e, x), _)| (e.clone(), x.clone())).collect();
        let form = forms::from_terms(&f, 2, d, terms).unwrap();
        prop_assume!(!form.is_zero());
        let Some(g) = residue_matrix(&f, &a) else { return Ok(()) };
        let v = check_fiber(&f, &form, 1).unwrap();
        let moved = forms::act(&f, &g, &form).unwrap();
        prop_assert_eq!(check_fiber(&f, &moved, 1).unwrap().name(), v.name());
        let certs = match &v {
            FiberVerdict::Stable => vec![],
            FiberVerdict::SemistableNotStable(cs) => cs.clone(),
            FiberVerdict::Unstable(c) => vec![c.clone()],
        };
        for c in certs {
            prop_assert!(c.validate(&f, &form).unwrap());
            let moved = forms::act(&c.field, &c.matrix, &search::embed_residue_form(&f, &c.field, &form).unwrap()).unwrap();
            prop_assert_eq!(sigma(&moved, &int_weights(&c.weights)), c.sigma.clone());
            if let FiberVerdict::Unstable(_) = v {
                match (&c.line, &c.point) {
                    (Some(_), None) => prop_assert_eq!(&c.weights, &vec![2, -1, -1]),
                    (None, Some(_)) => prop_assert_eq!(&c.weights, &vec![1, 1, -2]),
                    _ => {}
                }
            }
        }
    }
}

fn random_basis(k: &ValuedField, a: &[(i64, i64, i64)]) -> Option<Mat<FieldElement>> {
    let g: Mat<FieldElement> = (0..3).map(|i| (0..3).map(|j| element(k, a[3 * i + j])).collect()).collect();
    (!k.is_zero(&matrix::det(k, &g))).then_some(g)
}

fn random_cubic(k: &ValuedField, c: &[(i64, i64, i64)]) -> Form<FieldElement> {
    let terms: Vec<_> = lp::all_exponents(2, 3).into_iter().zip(c).map(|(e, &x)| (e, element(k, x))).collect();
    forms::from_terms(k, 2, 3, terms).unwrap()
}

fn weights() -> impl Strategy<Value = Vec<Rat>> {
    prop::collection::vec((-12i64..=12, 1i64..=6), 3).prop_map(|v| v.into_iter().map(|(a, b)| rat(a, b)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn phi_presentation_invariance(b in 0usize..5, c in prop::collection::vec(elem_strategy(), 10), a in prop::collection::vec(elem_strategy(), 9), w in weights(), perm in prop::sample::select(vec![[0usize, 1, 2], [1, 0, 2], [2, 1, 0], [1, 2, 0]]), j in 0usize..3, shift in -2i64..=2, unit in 1i64..4) {
        let k = &backends()[b];
        let f = random_cubic(k, &c);
        prop_assume!(!f.is_zero());
        let Some(basis) = random_basis(k, &a) else { return Ok(()) };
        let phi = |b: &Mat<FieldElement>, w: &[Rat]| building::phi(k, &f, &BuildingPoint { basis: b.clone(), weights: w.to_vec() }).unwrap();
        let base = phi(&basis, &w);
        let pb: Mat<FieldElement> = perm.iter().map(|&i| basis[i].clone()).collect();
        let pw: Vec<Rat> = perm.iter().map(|&i| w[i].clone()).collect();
        prop_assert_eq!(phi(&pb, &pw), base.clone());
        let u = k.add(&k.one(), &k.mul(&k.from_int(unit), &k.uniformizer()));
        let mut ub = basis.clone();
        ub[j] = ub[j].iter().map(|x| k.mul(x, &u)).collect();
        prop_assert_eq!(phi(&ub, &w), base.clone());
        let mut sb = basis.clone();
        sb[j] = sb[j].iter().map(|x| k.mul(x, &k.uniformizer_pow(shift))).collect();
        let mut sw = w.clone();
        sw[j] -= Rat::from_integer(shift.into()) * k.value_group_step();
        prop_assert_eq!(phi(&sb, &sw), base);
    }

    #[test]
    fn restriction_matches_phi(b in 0usize..5, c in prop::collection::vec(elem_strategy(), 10), a in prop::collection::vec(elem_strategy(), 9), w in weights()) {
        let k = &backends()[b];
        let f = random_cubic(k, &c);
        prop_assume!(!f.is_zero());
        let Some(basis) = random_basis(k, &a) else { return Ok(()) };
        let r = building::restrict_to_apartment(k, &f, &basis).unwrap();
        let direct = building::phi(k, &f, &BuildingPoint { basis, weights: w.clone() }).unwrap();
        prop_assert_eq!(r.eval(&w), direct.clone());
        prop_assert_eq!(lp::eval_max(&r.affine_pieces(), &w), direct);
    }

    #[test]
    fn minimization_is_certified_and_beats_a_grid(b in 0usize..5, c in prop::collection::vec(elem_strategy(), 10)) {
        let k = &backends()[b];
        let f = random_cubic(k, &c);
        prop_assume!(!f.is_zero());
        let pieces = building::restrict_to_apartment(k, &f, &matrix::identity(k, 3)).unwrap().affine_pieces();
        match lp::minimize_max_affine(&pieces) {
            LpOutcome::Optimal(face) => {
                prop_assert_eq!(lp::eval_max(&pieces, &face.minimizer), face.value.clone());
                let dual = face.dual_certificate().expect("dual certificate");
                prop_assert!(face.check_dual(&dual));
                for x in -10..=10 {
                    for y in -10..=10 {
                        let w = vec![rat(x, 2), rat(y, 2), int(0)];
                        prop_assert!(lp::eval_max(&pieces, &w) >= face.value);
                    }
                }
            }
            LpOutcome::UnboundedBelow { ray } => {
                prop_assert!(ray.last().unwrap().is_zero());
                let far: Vec<Rat> = ray.iter().map(|r| r * int(1000)).collect();
                prop_assert!(lp::eval_max(&pieces, &far) < lp::eval_max(&pieces, &[int(0), int(0), int(0)]));
            }
        }
    }

    #[test]
    fn projected_systems_are_sound_and_complete(seed_t in prop::collection::vec((-8i64..=8, 1i64..=4), 4), w in (-8i64..=8, 1i64..=4)) {
        let cert = lp::certify_projection(1, 3, lp::DEFAULT_ROW_BOUND).unwrap();
        let t: Vec<Rat> = seed_t.into_iter().map(|(a, b)| rat(a, b)).collect();
        prop_assert_eq!(cert.admits(&t), lp::stability_system_feasible(1, 3, &t));
        let w = rat(w.0, w.1);
        let lifted: Vec<Rat> = lp::all_exponents(1, 3).iter().map(|i| (rat(3, 2) - int(i64::from(i[0]))) * &w).collect();
        prop_assert!(cert.admits(&lifted));
    }
}

fn laurent_cubic(c: &[(i64, i64)]) -> (ValuedField, Form<FieldElement>) {
    let k = ValuedField::laurent(ResidueField::finite(5, 1).unwrap());
    let terms: Vec<_> = lp::all_exponents(2, 3)
        .into_iter()
        .zip(c)
        .map(|(e, &(x, v))| (e, k.mul(&k.from_int(x), &k.uniformizer_pow(v))))
        .collect();
    (k.clone(), forms::from_terms(&k, 2, 3, terms).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn descent_progress_and_final_models(c in prop::collection::vec((-2i64..=2, 0i64..=3), 10)) {
        let (k, f) = laurent_cubic(&c);
        prop_assume!(!f.is_zero());
        let opts = DescentOptions { max_iter: 8, e_cap: 12, ..DescentOptions::default() };
        let r = match descent::descend(&f, &k, &opts) {
            Ok(r) => r,
            Err(semistable::Error::GenericFiberNotStable) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(format!("{e}"))),
        };
        prop_assert!(descent::check_monotone(&r));
        let json = serde_json::to_string(&r).unwrap();
        prop_assert_eq!(serde_json::from_str::<descent::DescentReport>(&json).unwrap(), r.clone());
        if let Some(m) = r.final_model() {
            let l = m.field.to_field().unwrap();
            let rf = l.residue_field();
            let fiber = m.fiber.to_residue_form(&rf).unwrap();
            prop_assert!(check_fiber(&rf, &fiber, 2).unwrap().is_semistable());
            let rows: Vec<Vec<String>> = m.basis.clone();
            let basis = building::parse_matrix(&l, &rows).unwrap();
            let fl = forms::embed_form(&l, &k, &f).unwrap();
            let (min, _) = descent::minimize_on_apartment(&l, &fl, &basis).unwrap();
            prop_assert_eq!(&min, &m.value);
            let at_vertex = building::phi(&l, &fl, &BuildingPoint { basis: basis.clone(), weights: vec![int(0); 3] }).unwrap();
            prop_assert_eq!(&at_vertex, &m.value);
            let bigger = l.extend_ramified(2).unwrap();
            let fb = forms::embed_form(&bigger, &k, &f).unwrap();
            let bb: Mat<FieldElement> = basis.iter().map(|r| r.iter().map(|x| bigger.embed(&l, x).unwrap()).collect()).collect();
            let again = building::phi(&bigger, &fb, &BuildingPoint { basis: bb, weights: vec![int(0); 3] }).unwrap();
            prop_assert_eq!(&again, &m.value);
        }
    }
}

#[test]
fn lipschitz_constant_is_independent_of_the_frame() {
    let k = ValuedField::padic(3).unwrap();
    let f = forms::parse_poly(&k, 2, "x0^3 + 3*x1^3 + 9*x2^3 + x0*x1*x2").unwrap();
    let bound: Rat = lp::all_exponents(2, 3)
        .iter()
        .map(|i| i.iter().map(|&x| (int(1) - int(i64::from(x))).abs()).sum::<Rat>())
        .max()
        .unwrap();
    for basis in [matrix::identity(&k, 3), building::parse_matrix(&k, &[vec!["1", "1", "0"], vec!["0", "3", "1"], vec!["1", "0", "9"]]).unwrap()] {
        let r = building::restrict_to_apartment(&k, &f, &basis).unwrap();
        for (a, b) in [([0, 0, 0], [1, 0, 0]), ([2, -1, 0], [0, 3, 0]), ([-5, 4, 0], [5, -4, 0])] {
            let wa: Vec<Rat> = a.iter().map(|&x| int(x)).collect();
            let wb: Vec<Rat> = b.iter().map(|&x| int(x)).collect();
            let dist = wa.iter().zip(&wb).map(|(x, y)| (x - y).abs()).max().unwrap();
            assert!((r.eval(&wa) - r.eval(&wb)).abs() <= &bound * dist);
        }
    }
}

#[test]
fn affine_pieces_evaluate_linearly() {
    let p = AffinePiece { linear: vec![int(1), int(0), int(0)], constant: int(0) };
    assert_eq!(p.eval(&[int(2), int(5), int(0)]), int(2));
}
