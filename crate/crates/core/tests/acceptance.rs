//! The acceptance suite. Each criterion prints one PASS/FAIL line with its
//! running time; the test fails if any criterion fails or exceeds its budget.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use semistable::algebra::matrix::{self, Mat};
use semistable::algebra::Field;
use semistable::building::{self, parse_matrix, BuildingPoint};
use semistable::descent::{self, minimize_on_apartment, verify_model, DescentOptions, Outcome};
use semistable::forms::{self, Form};
use semistable::git_stability::{
    check_fiber, check_fiber_oracle, find_instability_plane, int_weights, is_smooth, sigma, weight_search,
    CertificateKind, FiberVerdict, InstabilityCertificate,
};
use semistable::lp::{self, lattice_minimizers};
use semistable::rational::{int, rat, Rat};
use semistable::search;
use semistable::{FieldElement, Res, ResidueField, ValuedField};

type Check = std::result::Result<(), String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn e<E: std::fmt::Debug>(x: E) -> String {
    format!("{x:?}")
}

fn mat(k: &ValuedField, rows: &[&[&str]]) -> Mat<FieldElement> {
    let rows: Vec<Vec<&str>> = rows.iter().map(|r| r.to_vec()).collect();
    parse_matrix(k, &rows).unwrap()
}

const CUSP_CUBIC: &str = "x0^2*x2 - x1^3 + 2*x2^3";
const QUARTIC: &str = "x1^4 + 2*x0^3*x2 + x0*x1^2*x2 + 2*x0*x2^3";

fn cusp_cubic_minimum() -> Check {
    let k = ValuedField::padic(2).map_err(e)?;
    let f = forms::parse_poly(&k, 2, CUSP_CUBIC).map_err(e)?;
    let (m, face) = minimize_on_apartment(&k, &f, &matrix::identity(&k, 3)).map_err(e)?;
    ensure(m == rat(-1, 6), format!("minimum {m}"))?;
    ensure(face.minimizer == vec![rat(1, 2), rat(1, 3), int(0)], format!("minimizer {:?}", face.minimizer))?;
    let step = k.value_group_step();
    ensure(lattice_minimizers(&face, &step).0.is_empty(), "unexpected vertex over Q_2")?;
    let e_req = building::required_ramification(&face.smallest_denominator_minimizer(), &step);
    ensure(e_req == 6, format!("required ramification {e_req}"))
}

fn cusp_cubic_model() -> Check {
    let l = ValuedField::padic(2).and_then(|k| k.extend_ramified_with_unit(2, &int(-1))).map_err(e)?;
    let f = forms::parse_poly(&l, 2, CUSP_CUBIC).map_err(e)?;
    let g = mat(&l, &[&["2*pi", "0", "0"], &["0", "pi^2", "0"], &["pi", "0", "1"]]);
    let (value, verdict, fiber) = verify_model(&l, &f, &g, 2).map_err(e)?;
    ensure(value == rat(-1, 2), format!("value {value}"))?;
    ensure(verdict == FiberVerdict::Stable, format!("verdict {}", verdict.name()))?;
    ensure(is_smooth(&l.residue_field(), &fiber), "fiber is singular")
}

fn quartic_two_stages() -> Check {
    let k = ValuedField::padic(2).map_err(e)?;
    let f = forms::parse_poly(&k, 2, QUARTIC).map_err(e)?;
    let (m0, face) = minimize_on_apartment(&k, &f, &matrix::identity(&k, 3)).map_err(e)?;
    ensure(m0 == rat(-1, 3), format!("first minimum {m0}"))?;
    ensure(face.minimizer == vec![int(0), rat(1, 2), int(0)], format!("first minimizer {:?}", face.minimizer))?;
    let l = k.extend_ramified(2).map_err(e)?;
    let fl = forms::embed_form(&l, &k, &f).map_err(e)?;
    let moved = mat(&l, &[&["1", "pi", "0"], &["0", "pi", "0"], &["0", "pi", "1"]]);
    let (m1, face1) = minimize_on_apartment(&l, &fl, &moved).map_err(e)?;
    ensure(m1 == rat(-2, 3), format!("second minimum {m1}"))?;
    let vertex = BuildingPoint::new(moved, face1.minimizer.clone());
    ensure(building::is_vertex(&vertex, &l.value_group_step()), "second minimizer is not a vertex")?;
    let g = mat(&l, &[&["1", "pi", "0"], &["0", "pi^2", "0"], &["0", "pi", "1"]]);
    let (value, verdict, fiber) = verify_model(&l, &fl, &g, 2).map_err(e)?;
    ensure(value == rat(-2, 3), format!("model value {value}"))?;
    ensure(verdict == FiberVerdict::Stable, format!("verdict {}", verdict.name()))?;
    let rf = l.residue_field();
    let found = search::rational_lines_and_points(&rf, &fiber, 2).map_err(e)?;
    let counts: Vec<(u32, usize)> = found.levels.iter().map(|lv| (lv.level.degree, lv.singular_points.len())).collect();
    ensure(counts == vec![(1, 1), (2, 2)], format!("singular points per level {counts:?}"))?;
    let all_double = found.levels.iter().flat_map(|lv| &lv.singular_points).all(|p| p.multiplicity == 2);
    ensure(all_double, "a singular point is not a double point")?;
    ensure(found.levels.iter().all(|lv| lv.lines.is_empty()), "fiber contains a line")
}

fn quintic_flag() -> Check {
    let f3 = ResidueField::finite(3, 1).map_err(e)?;
    let f = forms::parse_residue_poly(&f3, 2, "x0^3*x2^2 + x1^3*x2^2 + x1^5").map_err(e)?;
    let c = find_instability_plane(&f3, &f, 1).map_err(e)?.ok_or("no instability found")?;
    ensure(c.kind == CertificateKind::Strict && c.sigma > int(0), format!("certificate {c:?}"))?;
    ensure(c.validate(&f3, &f).map_err(e)?, "certificate does not validate")?;
    let r = |xs: &[i64]| xs.iter().map(|&x| f3.from_int(x)).collect::<Vec<Res>>();
    let line = c.line.clone().map(|l| semistable::geometry::normalize(&f3, &l));
    ensure(line == Some(r(&[1, 1, 0])), format!("line {:?}", c.line))?;
    ensure(c.point == Some(r(&[0, 0, 1])), format!("point {:?}", c.point))?;
    let coords = vec![r(&[1, 1, 0]), r(&[0, 1, 0]), r(&[0, 0, 1])];
    let g = forms::coordinates_to_action(&f3, &coords).map_err(e)?;
    let by_hand = InstabilityCertificate {
        field: f3.clone(),
        matrix: g.clone(),
        weights: vec![3, 1, -4],
        sigma: int(1),
        kind: CertificateKind::Strict,
        line: None,
        point: None,
    };
    ensure(by_hand.validate(&f3, &f).map_err(e)?, "hand-made certificate does not validate")?;
    let s = sigma(&forms::act(&f3, &g, &f).map_err(e)?, &int_weights(&[3, 1, -4]));
    ensure(s == int(1), format!("sigma {s}"))
}

fn double_conic() -> Check {
    let f5 = ResidueField::finite(5, 1).map_err(e)?;
    let f = forms::parse_residue_poly(&f5, 2, "x0^4 + 2*x0^2*x1*x2 + x1^2*x2^2").map_err(e)?;
    let v = check_fiber(&f5, &f, 2).map_err(e)?;
    ensure(matches!(v, FiberVerdict::SemistableNotStable(_)), format!("verdict {}", v.name()))?;
    let w = weight_search(&f.support(), false).ok_or("no semi-instability")?;
    let g = w.iter().fold(0i64, |a, &b| num_integer::gcd(a, b));
    let normalized: Vec<i64> = w.iter().map(|x| x / g.abs()).collect();
    ensure(normalized == vec![0, 1, -1], format!("weights {w:?}"))
}

fn conic_family_matrix(k: &ValuedField, t: i64) -> Mat<FieldElement> {
    let (a, b, c) = ((-2 * t).to_string(), t.to_string(), (-t * t).to_string());
    let shear = mat(k, &[&["1", "0", &a], &[&b, "1", &c], &["0", "0", "1"]]);
    let scale = mat(k, &[&["1", "0", "0"], &["0", "1/5", "0"], &["0", "0", "5"]]);
    matrix::mul(k, &scale, &shear)
}

fn double_conic_family() -> Check {
    let k = ValuedField::padic(5).map_err(e)?;
    let f = forms::parse_poly(&k, 2, "3126*x0^4 + 2*x0^2*x1*x2 + x1^2*x2^2 + 3125*x1^4 + 3125*x2^4").map_err(e)?;
    let gs: Vec<_> = (0..3).map(|t| conic_family_matrix(&k, t)).collect();
    for (t, g) in gs.iter().enumerate() {
        let (_, verdict, _) = verify_model(&k, &f, g, 2).map_err(e)?;
        ensure(verdict.name() == "semistable", format!("t = {t}: {}", verdict.name()))?;
    }
    for (t, gt) in gs.iter().enumerate() {
        for (s, gs_) in gs.iter().enumerate() {
            if t == s {
                continue;
            }
            let q = matrix::mul(&k, gt, &matrix::inverse(&k, gs_).ok_or("singular g")?);
            let negative = q.iter().flatten().any(|x| k.valuation(x).finite().is_some_and(|v| *v < int(0)));
            ensure(negative, format!("g_{t} g_{s}^-1 is integral"))?;
        }
    }
    Ok(())
}

fn random_residue_form(rng: &mut ChaCha8Rng, f: &ResidueField, d: u32) -> Form<Res> {
    let q = f.cardinality().unwrap() as i64;
    let coeff = |rng: &mut ChaCha8Rng| f.from_int(rng.gen_range(0..q));
    let exps = lp::all_exponents(2, d);
    let dense = |rng: &mut ChaCha8Rng, d: u32, keep: &dyn Fn(&Vec<u32>) -> bool| {
        let terms: Vec<_> = lp::all_exponents(2, d).into_iter().filter(|x| keep(x)).map(|x| (x, coeff(rng))).collect();
        forms::from_terms(f, 2, d, terms).unwrap()
    };
    match rng.gen_range(0..4) {
        0 => dense(rng, d, &|_| true),
        1 => {
            let count = rng.gen_range(2..=4);
            let terms: Vec<_> = (0..count).map(|_| (exps[rng.gen_range(0..exps.len())].clone(), f.one())).collect();
            forms::from_terms(f, 2, d, terms).unwrap()
        }
        2 => {
            let l = forms::linear(f, &[coeff(rng), coeff(rng), f.one()]);
            let rest = dense(rng, d - 2, &|_| true);
            forms::mul(f, &forms::pow(f, &l, 2), &rest)
        }
        _ => {
            let m = rng.gen_range(2..=3.min(d));
            dense(rng, d, &|x| x[2] <= d - m)
        }
    }
}

fn oracle_equivalence() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut tally: BTreeMap<&str, usize> = BTreeMap::new();
    let mut total = 0;
    while total < 400 {
        let p = if total % 2 == 0 { 2 } else { 3 };
        let f = ResidueField::finite(p, 1).unwrap();
        let d = rng.gen_range(3..=5);
        let form = random_residue_form(&mut rng, &f, d);
        if form.is_zero() {
            continue;
        }
        let fast = check_fiber(&f, &form, 2).map_err(e)?;
        let slow = check_fiber_oracle(&f, &form, 2).map_err(e)?;
        if fast.name() != slow.name() {
            return Err(format!(
                "disagreement on {} over F_{p}: {} vs oracle {}",
                forms::format_form(&form, |c| f.format(c)),
                fast.name(),
                slow.name()
            ));
        }
        for c in match &fast {
            FiberVerdict::Unstable(c) => vec![c.clone()],
            FiberVerdict::SemistableNotStable(cs) => cs.clone(),
            FiberVerdict::Stable => vec![],
        } {
            ensure(c.validate(&f, &form).map_err(e)?, "certificate does not validate")?;
        }
        *tally.entry(fast.name()).or_default() += 1;
        total += 1;
    }
    println!("    verdicts over {total} forms: {tally:?}");
    ensure(tally.len() == 3, "not every verdict class occurred")
}

/// `max_i Σ_j |d/(n+1) − i_j|`: a sup-norm Lipschitz constant of each
/// linear part on the apartment.
fn lipschitz_constant(n: usize, d: u32) -> Rat {
    let c = rat(i64::from(d), (n + 1) as i64);
    lp::all_exponents(n, d)
        .iter()
        .map(|i| i.iter().map(|&x| (c.clone() - int(i64::from(x))).abs()).sum::<Rat>())
        .max()
        .unwrap()
}

fn random_small(rng: &mut ChaCha8Rng, k: &ValuedField, lo: i64, hi: i64) -> FieldElement {
    let a = k.from_int(rng.gen_range(-4..=4));
    let b = k.from_int(rng.gen_range(-4..=4));
    let pi = k.uniformizer_pow(rng.gen_range(lo..=hi));
    k.add(&k.mul(&a, &pi), &b)
}

fn random_weights(rng: &mut ChaCha8Rng, n1: usize) -> Vec<Rat> {
    (0..n1).map(|_| rat(rng.gen_range(-12..=12), rng.gen_range(1..=6))).collect()
}

fn random_invertible(rng: &mut ChaCha8Rng, k: &ValuedField, n1: usize) -> Mat<FieldElement> {
    loop {
        let g: Mat<FieldElement> = (0..n1).map(|_| (0..n1).map(|_| random_small(rng, k, -1, 2)).collect()).collect();
        if !k.is_zero(&matrix::det(k, &g)) {
            return g;
        }
    }
}

fn random_form(rng: &mut ChaCha8Rng, k: &ValuedField, n: usize, d: u32) -> Form<FieldElement> {
    loop {
        let mut terms = Vec::new();
        for x in lp::all_exponents(n, d) {
            if rng.gen_bool(0.6) {
                terms.push((x, random_small(rng, k, 0, 3)));
            }
        }
        let f = forms::from_terms(k, n, d, terms).unwrap();
        if !f.is_zero() {
            return f;
        }
    }
}

fn stability_function_suite() -> Check {
    let backends = [
        ValuedField::padic(3).unwrap(),
        ValuedField::laurent(ResidueField::finite(2, 1).unwrap()).extend_ramified(2).unwrap(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for k in &backends {
        let mut counts = [0usize; 4];
        for s in 0..500 {
            let (n, d) = if s % 2 == 0 { (2, 3) } else { (1, 4) };
            let n1 = n + 1;
            let f = random_form(&mut rng, k, n, d);
            let b = random_invertible(&mut rng, k, n1);
            let w1 = random_weights(&mut rng, n1);
            let w2 = random_weights(&mut rng, n1);
            let phi = |b: &Mat<FieldElement>, f: &Form<FieldElement>, w: &[Rat]| {
                building::phi(k, f, &BuildingPoint { basis: b.clone(), weights: w.to_vec() }).map_err(e)
            };
            let p1 = phi(&b, &f, &w1)?;
            let p2 = phi(&b, &f, &w2)?;

            let c = rat(rng.gen_range(-20..=20), rng.gen_range(1..=7));
            let shifted: Vec<Rat> = w1.iter().map(|x| x + &c).collect();
            ensure(phi(&b, &f, &shifted)? == p1, format!("homothety fails on {}", k.describe()))?;
            counts[0] += 1;

            let t = rat(rng.gen_range(0..=8), 8);
            let mid: Vec<Rat> = w1.iter().zip(&w2).map(|(a, b)| &t * a + (int(1) - &t) * b).collect();
            ensure(phi(&b, &f, &mid)? <= &t * &p1 + (int(1) - &t) * &p2, format!("convexity fails on {}", k.describe()))?;
            counts[1] += 1;

            let dist = w1.iter().zip(&w2).map(|(a, b)| (a - b).abs()).max().unwrap();
            ensure((&p1 - &p2).abs() <= lipschitz_constant(n, d) * dist, format!("Lipschitz bound fails on {}", k.describe()))?;
            counts[2] += 1;

            let g = random_invertible(&mut rng, k, n1);
            let gf = forms::act(k, &g, &f).map_err(e)?;
            let moved = matrix::mul(k, &b, &matrix::inverse(k, &g).unwrap());
            let vdet = building::det_val(k, &g).map_err(e)?;
            let expected = &p1 - rat(i64::from(d), n1 as i64) * vdet;
            ensure(phi(&moved, &gf, &w1)? == expected, format!("equivariance fails on {}", k.describe()))?;
            counts[3] += 1;
        }
        ensure(counts.iter().all(|&c| c >= 500), format!("too few samples {counts:?}"))?;
    }
    Ok(())
}

fn projection_certificate() -> Check {
    let cert = lp::certify_projection(2, 3, lp::DEFAULT_ROW_BOUND).map_err(e)?;
    ensure(
        cert.rows.iter().all(|r| r.iter().sum::<num_bigint::BigInt>() == cert.e && r.iter().all(|x| x.sign() != num_bigint::Sign::Minus)),
        "rows are not nonnegative with a common sum",
    )?;
    let out = semistable::cli::cmd_certify_projection(2, 3, 1000, 0, lp::DEFAULT_ROW_BOUND, Some(("Q_2", CUSP_CUBIC)))
        .map_err(e)?;
    ensure(out.json["sampling"]["mismatches"] == 0, format!("sampling {}", out.json["sampling"]))?;
    ensure(out.json["sampling"]["samples"] == 1000, "wrong sample count")?;
    let k = ValuedField::padic(2).map_err(e)?;
    let f = forms::parse_poly(&k, 2, CUSP_CUBIC).map_err(e)?;
    let vals: Vec<Option<Rat>> =
        cert.exponents.iter().map(|x| f.terms.get(x).and_then(|c| k.valuation(c).finite().cloned())).collect();
    let m = cert.apartment_minimum(&vals).ok_or("no finite row")?;
    ensure(m == rat(-1, 6), format!("certificate minimum {m}"))
}

fn laurent_descent() -> Check {
    let k = ValuedField::laurent(ResidueField::Rationals);
    let f = forms::parse_poly(&k, 2, "x0^2*x2 - x1^3 + t*x2^3").map_err(e)?;
    let r = descent::descend(&f, &k, &DescentOptions::default()).map_err(e)?;
    ensure(r.steps.len() <= 64, format!("{} steps", r.steps.len()))?;
    let Outcome::Stable(m) = &r.outcome else { return Err(format!("outcome {:?}", r.outcome)) };
    ensure(m.value == rat(-1, 6), format!("value {}", m.value))?;
    ensure(m.ramification == 6, format!("ramification {}", m.ramification))?;
    let l = m.field.to_field().map_err(e)?;
    let rf = l.residue_field();
    let fiber = m.fiber.to_residue_form(&rf).map_err(e)?;
    ensure(is_smooth(&rf, &fiber), "fiber is singular")
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Check, Duration); 10] = [
        ("cubic apartment minimum -1/6, ramification 6", cusp_cubic_minimum, Duration::from_secs(1)),
        ("cubic model over Q_2(π) with value -1/2, smooth", cusp_cubic_model, Duration::from_secs(1)),
        ("quartic minima -1/3 then -2/3, three double points", quartic_two_stages, Duration::from_secs(5)),
        ("quintic flag certificate over F_3", quintic_flag, Duration::from_secs(1)),
        ("double conic semistable, weights (0,1,-1)", double_conic, Duration::from_secs(1)),
        ("double conic family gives distinct models", double_conic_family, Duration::from_secs(2)),
        ("classifier agrees with the flag oracle", oracle_equivalence, Duration::from_secs(300)),
        ("stability function invariants", stability_function_suite, Duration::from_secs(120)),
        ("projection certificate for plane cubics", projection_certificate, Duration::from_secs(60)),
        ("descent over Q((t)) terminates stable", laurent_descent, Duration::from_secs(10)),
    ];
    let mut failures = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let took = start.elapsed();
        let result = result.and_then(|()| {
            ensure(took <= *budget, format!("took {took:.2?}, budget {budget:?}"))
        });
        match result {
            Ok(()) => println!("criterion {:>2} PASS ({took:.2?}) {name}", i + 1),
            Err(msg) => {
                failures += 1;
                println!("criterion {:>2} FAIL ({took:.2?}) {name}: {msg}", i + 1);
            }
        }
    }
    assert_eq!(failures, 0, "{failures} acceptance criteria failed");
}
