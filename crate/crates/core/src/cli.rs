//! Command-line front end for the `semistable` binary.
//!
//! Every command produces a text rendering and a JSON value; `--json`
//! selects the latter. Exit codes: 0 ok, 2 input, 3 precision, 4 not
//! stable, 5 resource limit.

use std::fmt::Write as _;
use std::path::Path;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use serde_json::{json, Value};

use crate::algebra::matrix::{self, Mat};
use crate::algebra::Field;
use crate::building::{self, BuildingPoint, PointJson};
use crate::descent::{self, Action, DescentOptions, DescentReport, Outcome};
use crate::error::{Error, Result};
use crate::forms::{self, Form, FormJson};
use crate::git_stability::{self, CertificateJson, FiberVerdict, InstabilityCertificate};
use crate::lp::{self, DEFAULT_ROW_BOUND};
use crate::rational::{fmt_rat, parse_rat, Rat};
use crate::residue::{Res, ResidueField};
use crate::valued_field::{FieldDescriptor, FieldElement, ValuedField};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NOT_STABLE: i32 = 4;
pub const EXIT_RESOURCE: i32 = 5;

#[derive(Debug, Parser)]
#[command(name = "semistable", version, about = "Semistable models of plane curves over discretely valued fields")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Print JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
}

#[derive(Debug, Clone, Args)]
pub struct Input {
    /// Valued field: `Q_p`, `Q((t))`, `F_p((t))`, or a JSON descriptor such
    /// as `{"backend":"padic","p":2,"ramification":[2,"-1"]}`.
    #[arg(long)]
    pub field: String,
    /// Form as polynomial text (`x0^2*x2 - x1^3 + 2*x2^3`), form JSON, or a
    /// path to a file holding either. Polynomial text uses one more variable
    /// than the largest index that occurs.
    #[arg(long)]
    pub form: String,
}

#[derive(Debug, Clone, Args)]
pub struct FiberInput {
    /// Residue field (`F_2`, `F_2^2`, `Q`) or a valued field whose residue
    /// field is used.
    #[arg(long)]
    pub field: String,
    /// Residue form as polynomial text, form JSON, or a path.
    #[arg(long)]
    pub form: String,
    /// Largest residue extension degree searched for destabilizing flags.
    #[arg(long, default_value_t = descent::DEFAULT_M_MAX)]
    pub m_max: u32,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Evaluate the stability function at a point of the building.
    Eval {
        #[command(flatten)]
        input: Input,
        /// Weights, e.g. `1/2,1/3,0`.
        #[arg(long)]
        point: String,
        /// Frame as JSON rows of field elements; the identity by default.
        #[arg(long)]
        basis: Option<String>,
    },
    /// Minimize the stability function on one apartment.
    Minimize {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        basis: Option<String>,
    },
    /// Decide stability of a plane curve over a residue field.
    CheckFiber(FiberInput),
    /// Search for a strict destabilizing flag of a plane curve.
    FindInstability(FiberInput),
    /// Run the descent to a semistable model.
    Descend {
        #[command(flatten)]
        input: Input,
        /// Starting frame; the identity by default.
        #[arg(long)]
        basis: Option<String>,
        #[arg(long, default_value_t = descent::DEFAULT_MAX_ITER)]
        max_iter: u32,
        /// Largest total ramification index.
        #[arg(long, default_value_t = descent::DEFAULT_E_CAP)]
        e_cap: u32,
        #[arg(long, default_value_t = descent::DEFAULT_M_MAX)]
        m_max: u32,
        /// Refuse ramified extensions.
        #[arg(long)]
        no_ramified: bool,
        /// Refuse unramified extensions.
        #[arg(long)]
        no_unramified: bool,
        /// Unit `u` for ramified p-adic extensions `π^e = u·p`.
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        unit: String,
    },
    /// Evaluate the model `act(g, F)`: stability function value and fiber verdict.
    Verify {
        #[command(flatten)]
        input: Input,
        /// The frame `g` as JSON rows of field elements.
        #[arg(long)]
        basis: String,
        #[arg(long, default_value_t = descent::DEFAULT_M_MAX)]
        m_max: u32,
    },
    /// Fourier–Motzkin certificate for the apartment minimum in degree d.
    CertifyProjection {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: u32,
        /// Random samples compared against the direct LP.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_ROW_BOUND)]
        row_bound: usize,
        /// Field of `--form` for the apartment-minimum cross-check.
        #[arg(long, requires = "form")]
        field: Option<String>,
        /// Form whose apartment minimum is recomputed from the certificate.
        #[arg(long, requires = "field")]
        form: Option<String>,
    },
    /// List or run the bundled worked examples.
    Examples {
        /// Example to run; lists the examples when omitted.
        name: Option<String>,
        /// Run every example.
        #[arg(long)]
        all: bool,
    },
}

/// Result of one command: both renderings and the exit code.
#[derive(Clone, Debug, PartialEq)]
pub struct Output {
    pub text: String,
    pub json: Value,
    pub code: i32,
}

impl Output {
    fn ok(text: String, json: Value) -> Self {
        Output { text, json, code: EXIT_OK }
    }
}

/// Parses arguments, runs the command, prints, and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match run(&cli) {
        Ok(out) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&out.json).expect("serializable"));
            } else {
                print!("{}", out.text);
            }
            out.code
        }
        Err(e) => {
            if cli.json {
                println!("{}", json!({ "error": e.to_string(), "exit_code": e.exit_code() }));
            }
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: &Cli) -> Result<Output> {
    match &cli.command {
        Command::Eval { input, point, basis } => cmd_eval(input, point, basis.as_deref()),
        Command::Minimize { input, basis } => cmd_minimize(input, basis.as_deref()),
        Command::CheckFiber(f) => cmd_check_fiber(f),
        Command::FindInstability(f) => cmd_find_instability(f),
        Command::Descend { input, basis, max_iter, e_cap, m_max, no_ramified, no_unramified, unit } => {
            let opts = DescentOptions {
                max_iter: *max_iter,
                allow_ramified: !no_ramified,
                allow_unramified: !no_unramified,
                e_cap: *e_cap,
                m_max: *m_max,
                unit: parse_rat(unit)?,
            };
            cmd_descend(input, basis.as_deref(), &opts)
        }
        Command::Verify { input, basis, m_max } => cmd_verify(input, basis, *m_max),
        Command::CertifyProjection { n, d, samples, seed, row_bound, field, form } => {
            let check = field.as_deref().zip(form.as_deref());
            cmd_certify_projection(*n, *d, *samples, *seed, *row_bound, check)
        }
        Command::Examples { name, all } => cmd_examples(name.as_deref(), *all),
    }
}

// ------------------------------------------------------------------ parsing

fn read_source(s: &str) -> Result<String> {
    let t = s.trim();
    if !t.starts_with('{') && Path::new(t).is_file() {
        return std::fs::read_to_string(t).map_err(|e| Error::Input(format!("{t}: {e}")));
    }
    Ok(t.to_string())
}

fn form_json(s: &str) -> Result<Option<FormJson>> {
    if !s.starts_with('{') {
        return Ok(None);
    }
    serde_json::from_str(s).map(Some).map_err(|e| Error::Input(format!("form JSON: {e}")))
}

fn variable_count(s: &str) -> usize {
    let b = s.as_bytes();
    let mut top = 0;
    for (i, &c) in b.iter().enumerate() {
        if c == b'x' {
            let digits: String = b[i + 1..].iter().take_while(|c| c.is_ascii_digit()).map(|&c| c as char).collect();
            if let Ok(k) = digits.parse::<usize>() {
                top = top.max(k);
            }
        }
    }
    top.max(1)
}

pub fn parse_form(k: &ValuedField, s: &str) -> Result<Form<FieldElement>> {
    let src = read_source(s)?;
    match form_json(src.trim())? {
        Some(j) => j.to_form(k),
        None => forms::parse_poly(k, variable_count(&src), src.trim()),
    }
}

pub fn parse_residue_form(rf: &ResidueField, s: &str) -> Result<Form<Res>> {
    let src = read_source(s)?;
    match form_json(src.trim())? {
        Some(j) => j.to_residue_form(rf),
        None => forms::parse_residue_poly(rf, variable_count(&src), src.trim()),
    }
}

pub fn parse_residue_field(s: &str) -> Result<ResidueField> {
    ResidueField::from_descriptor(s.trim()).or_else(|_| Ok(FieldDescriptor::parse(s)?.residue_field()))
}

/// Parses `1/2,1/3,0`, optionally bracketed or as a JSON list.
pub fn parse_point(s: &str) -> Result<Vec<Rat>> {
    let t = s.trim().trim_start_matches(['[', '(']).trim_end_matches([']', ')']);
    t.split(',').map(|x| parse_rat(x.trim().trim_matches('"'))).collect()
}

pub fn parse_basis(k: &ValuedField, s: &str) -> Result<Mat<FieldElement>> {
    let src = read_source(s)?;
    let rows: Vec<Vec<Value>> =
        serde_json::from_str(&src).map_err(|e| Error::Input(format!("basis JSON: {e}")))?;
    let rows: Vec<Vec<String>> = rows
        .into_iter()
        .map(|r| r.into_iter().map(|x| x.as_str().map(str::to_string).unwrap_or_else(|| x.to_string())).collect())
        .collect();
    let g = building::parse_matrix(k, &rows)?;
    if k.is_zero(&matrix::det(k, &g)) {
        return Err(Error::SingularMatrix);
    }
    Ok(g)
}

fn basis_or_identity(k: &ValuedField, s: Option<&str>, n1: usize) -> Result<Mat<FieldElement>> {
    let g = match s {
        Some(s) => parse_basis(k, s)?,
        None => matrix::identity(k, n1),
    };
    if g.len() != n1 {
        return Err(Error::Input(format!("basis must be {n1}×{n1}")));
    }
    Ok(g)
}

// --------------------------------------------------------------- rendering

fn show_point(w: &[Rat]) -> String {
    format!("({})", w.iter().map(fmt_rat).collect::<Vec<_>>().join(","))
}

fn rats(w: &[Rat]) -> Value {
    Value::from(w.iter().map(fmt_rat).collect::<Vec<_>>())
}

fn show_form_json(j: &FormJson) -> String {
    let form: Form<String> = Form {
        n: j.n,
        d: j.d,
        terms: j.terms.iter().map(|t| (t.exps.clone(), t.coeff.clone())).collect(),
    };
    forms::format_form(&form, |c| c.clone())
}

fn show_certificate(c: &CertificateJson) -> String {
    let rows: Vec<String> = c.matrix.iter().map(|r| format!("[{}]", r.join(","))).collect();
    let mut s = format!(
        "{} weights ({}) sigma {} over {}, frame [{}]",
        match c.kind {
            git_stability::CertificateKind::Strict => "strict",
            git_stability::CertificateKind::Semi => "semi",
        },
        c.weights.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(","),
        c.sigma,
        c.residue_field,
        rows.join(","),
    );
    if let Some(l) = &c.line {
        let _ = write!(s, ", line [{}]", l.join(","));
    }
    if let Some(p) = &c.point {
        let _ = write!(s, ", point [{}]", p.join(","));
    }
    s
}

fn verdict_text(v: &FiberVerdict) -> String {
    let mut s = format!("{}\n", v.name());
    for c in v.to_json().certificates {
        let _ = writeln!(s, "  certificate: {}", show_certificate(&c));
    }
    s
}

fn verdict_code(v: &FiberVerdict) -> i32 {
    if v.is_semistable() {
        EXIT_OK
    } else {
        EXIT_NOT_STABLE
    }
}

// ----------------------------------------------------------------- commands

pub fn cmd_eval(input: &Input, point: &str, basis: Option<&str>) -> Result<Output> {
    let k = FieldDescriptor::parse(&input.field)?;
    let f = parse_form(&k, &input.form)?;
    let w = parse_point(point)?;
    if w.len() != f.n + 1 {
        return Err(Error::Input(format!("point needs {} coordinates", f.n + 1)));
    }
    let b = basis_or_identity(&k, basis, f.n + 1)?;
    let pt = BuildingPoint { basis: b, weights: w };
    let value = building::phi(&k, &f, &pt)?;
    let pj: PointJson = pt.to_json(&k);
    Ok(Output::ok(format!("{}\n", fmt_rat(&value)), json!({ "value": fmt_rat(&value), "point": pj })))
}

pub fn cmd_minimize(input: &Input, basis: Option<&str>) -> Result<Output> {
    let k = FieldDescriptor::parse(&input.field)?;
    let f = parse_form(&k, &input.form)?;
    let b = basis_or_identity(&k, basis, f.n + 1)?;
    let (m, face) = descent::minimize_on_apartment(&k, &f, &b)?;
    let step = k.value_group_step();
    let (lattice, partial) = lp::lattice_minimizers(&face, &step);
    let required = if lattice.is_empty() {
        Some(building::required_ramification(&face.smallest_denominator_minimizer(), &step))
    } else {
        None
    };
    let mut text = format!("minimum {} at {}\n", fmt_rat(&m), show_point(&face.minimizer));
    let _ = writeln!(
        text,
        "face: {}, vertices {}",
        if face.bounded { "bounded" } else { "unbounded" },
        face.vertices.iter().map(|v| show_point(v)).collect::<Vec<_>>().join(" ")
    );
    if lattice.is_empty() {
        let _ = writeln!(text, "no vertices over the value group of {}", k.describe());
    } else {
        let _ = writeln!(
            text,
            "vertices over the value group: {}",
            lattice.iter().map(|v| show_point(v)).collect::<Vec<_>>().join(" ")
        );
    }
    if let Some(e) = required {
        let _ = writeln!(text, "required ramification {e}");
    }
    let j = json!({
        "minimum": fmt_rat(&m),
        "minimizer": rats(&face.minimizer),
        "bounded": face.bounded,
        "vertices": face.vertices.iter().map(|v| rats(v)).collect::<Vec<_>>(),
        "lattice_minimizers": lattice.iter().map(|v| rats(v)).collect::<Vec<_>>(),
        "lattice_minimizers_partial": partial,
        "required_ramification": required,
    });
    Ok(Output::ok(text, j))
}

pub fn cmd_check_fiber(input: &FiberInput) -> Result<Output> {
    let rf = parse_residue_field(&input.field)?;
    let f = parse_residue_form(&rf, &input.form)?;
    let v = git_stability::check_fiber(&rf, &f, input.m_max)?;
    let j = serde_json::to_value(v.to_json()).expect("serializable");
    Ok(Output { text: verdict_text(&v), json: j, code: verdict_code(&v) })
}

pub fn cmd_find_instability(input: &FiberInput) -> Result<Output> {
    let rf = parse_residue_field(&input.field)?;
    let f = parse_residue_form(&rf, &input.form)?;
    let found: Option<InstabilityCertificate> = git_stability::find_instability_plane(&rf, &f, input.m_max)?;
    Ok(match found {
        Some(c) => {
            let cj = c.to_json();
            Output::ok(format!("{}\n", show_certificate(&cj)), json!({ "certificate": cj }))
        }
        None => Output::ok(
            format!("no strict instability up to degree {}\n", input.m_max),
            json!({ "certificate": Value::Null }),
        ),
    })
}

pub fn report_text(r: &DescentReport) -> String {
    let mut s = String::new();
    for (i, st) in r.steps.iter().enumerate() {
        let _ = writeln!(s, "step {}: over {}, minimum {} at {}", i + 1, st.field, fmt_rat(&st.minimum), show_point(&st.point));
        for a in &st.actions {
            let _ = match a {
                Action::ExtendedField { field, .. } => writeln!(s, "  extended to {field}"),
                Action::VertexReduced { weights, fiber } => {
                    writeln!(s, "  reduced at {}: fiber {}", show_point(weights), show_form_json(fiber))
                }
                Action::InstabilityApplied { certificate } => {
                    writeln!(s, "  applied {}", show_certificate(certificate))
                }
                Action::Finished { verdict } => writeln!(s, "  fiber is {}", verdict.verdict),
            };
        }
    }
    let _ = match &r.outcome {
        Outcome::Stable(m) | Outcome::Semistable(m) => writeln!(
            s,
            "{} model with value {} after ramification {}\n  model {}\n  fiber {}",
            m.verdict.verdict,
            fmt_rat(&m.value),
            m.ramification,
            show_form_json(&m.model),
            show_form_json(&m.fiber)
        ),
        Outcome::NeedsExtensionAt { point, ramification, unramified } => writeln!(
            s,
            "stopped: the minimizer {} needs ramification {ramification} and residue degree {unramified}",
            show_point(point)
        ),
        Outcome::IterationCapReached => writeln!(s, "stopped: iteration cap reached"),
    };
    s
}

pub fn cmd_descend(input: &Input, basis: Option<&str>, opts: &DescentOptions) -> Result<Output> {
    let k = FieldDescriptor::parse(&input.field)?;
    let f = parse_form(&k, &input.form)?;
    let b = basis_or_identity(&k, basis, f.n + 1)?;
    let r = descent::descend_from(&f, &k, &b, opts)?;
    let code = if r.final_model().is_some() { EXIT_OK } else { EXIT_RESOURCE };
    Ok(Output { text: report_text(&r), json: serde_json::to_value(&r).expect("serializable"), code })
}

pub fn cmd_verify(input: &Input, basis: &str, m_max: u32) -> Result<Output> {
    let k = FieldDescriptor::parse(&input.field)?;
    let f = parse_form(&k, &input.form)?;
    let g = basis_or_identity(&k, Some(basis), f.n + 1)?;
    let (value, v, fiber) = descent::verify_model(&k, &f, &g, m_max)?;
    let fj = FormJson::from_residue_form(&k.residue_field(), &fiber);
    let text = format!("value {}\nfiber {}\n{}", fmt_rat(&value), show_form_json(&fj), verdict_text(&v));
    let j = json!({ "value": fmt_rat(&value), "fiber": fj, "verdict": v.to_json() });
    Ok(Output { text, json: j, code: verdict_code(&v) })
}

pub fn cmd_certify_projection(
    n: usize,
    d: u32,
    samples: usize,
    seed: u64,
    row_bound: usize,
    check: Option<(&str, &str)>,
) -> Result<Output> {
    let cert = lp::certify_projection(n, d, row_bound)?;
    let constant_sums = cert.rows.iter().all(|r| r.iter().sum::<num_bigint::BigInt>() == cert.e);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let sampling = cert.check_by_sampling(samples, &mut rng);
    let mut text = format!(
        "{} rows over {} monomials, row sum {}{}\n",
        cert.rows.len(),
        cert.exponents.len(),
        cert.e,
        if constant_sums { "" } else { " (NOT constant)" }
    );
    let _ = writeln!(
        text,
        "sampling: {} samples ({} solvable), {} mismatches",
        sampling.samples, sampling.feasible, sampling.mismatches
    );
    let mut identity = Value::Null;
    let mut code = if constant_sums && sampling.mismatches == 0 { EXIT_OK } else { EXIT_INPUT };
    if let Some((field, form)) = check {
        let k = FieldDescriptor::parse(field)?;
        let f = parse_form(&k, form)?;
        if f.n != n || f.d != d {
            return Err(Error::Input(format!("form has (n, d) = ({}, {}), certificate ({n}, {d})", f.n, f.d)));
        }
        let vals: Vec<Option<Rat>> = cert
            .exponents
            .iter()
            .map(|e| f.terms.get(e).and_then(|c| k.valuation(c).finite().cloned()))
            .collect();
        let from_cert = cert.apartment_minimum(&vals);
        let (m, _) = descent::minimize_on_apartment(&k, &f, &matrix::identity(&k, n + 1))?;
        let agrees = from_cert.as_ref() == Some(&m);
        if !agrees {
            code = EXIT_INPUT;
        }
        let shown = from_cert.as_ref().map(fmt_rat).unwrap_or_else(|| "none".into());
        let _ = writeln!(text, "apartment minimum from certificate {shown}, by LP {}", fmt_rat(&m));
        identity = json!({ "from_certificate": from_cert.as_ref().map(fmt_rat), "minimum": fmt_rat(&m), "agrees": agrees });
    }
    let j = json!({
        "certificate": cert,
        "row_sums_constant": constant_sums,
        "sampling": sampling,
        "identity": identity,
    });
    Ok(Output { text, json: j, code })
}

// ----------------------------------------------------------------- examples

/// A worked example: a command line and a check on its JSON output.
pub struct Example {
    pub name: &'static str,
    pub about: &'static str,
    pub args: &'static [&'static str],
    pub check: fn(&Value) -> bool,
}

const CUSP_CUBIC: &str = "x0^2*x2 - x1^3 + 2*x2^3";
const QUARTIC: &str = "x1^4 + 2*x0^3*x2 + x0*x1^2*x2 + 2*x0*x2^3";
const RAMIFIED_Q2: &str = r#"{"backend":"padic","p":2,"ramification":[2,"-1"]}"#;
const SQRT2_Q2: &str = r#"{"backend":"padic","p":2,"ramification":[2,"1"]}"#;

pub const EXAMPLES: &[Example] = &[
    Example {
        name: "cusp-cubic-minimum",
        about: "Cuspidal reduction over Q_2: apartment minimum -1/6 away from the vertices",
        args: &["minimize", "--field", "Q_2", "--form", CUSP_CUBIC],
        check: |v| v["minimum"] == "-1/6" && v["minimizer"] == json!(["1/2", "1/3", "0"]) && v["required_ramification"] == 6,
    },
    Example {
        name: "cusp-cubic-model",
        about: "The same cubic over Q_2(π), π² = -2: a smooth model with value -1/2",
        args: &[
            "verify",
            "--field",
            RAMIFIED_Q2,
            "--form",
            CUSP_CUBIC,
            "--basis",
            r#"[["2*pi","0","0"],["0","pi^2","0"],["pi","0","1"]]"#,
        ],
        check: |v| v["value"] == "-1/2" && v["verdict"]["verdict"] == "stable",
    },
    Example {
        name: "cusp-cubic-descent",
        about: "Descent on the cubic over Q_2 with ramified extensions π^e = -2",
        args: &["descend", "--field", "Q_2", "--unit", "-1", "--form", CUSP_CUBIC],
        check: |v| v["outcome"]["status"] == "stable" && v["outcome"]["value"] == "-1/2",
    },
    Example {
        name: "quartic-first-minimum",
        about: "A quartic over Q_2 whose apartment minimum -1/3 sits at (0,1/2,0)",
        args: &["minimize", "--field", "Q_2", "--form", QUARTIC],
        check: |v| v["minimum"] == "-1/3" && v["minimizer"] == json!(["0", "1/2", "0"]) && v["required_ramification"] == 2,
    },
    Example {
        name: "quartic-model",
        about: "The quartic over Q_2(√2) after translating and rescaling: value -2/3, stable fiber",
        args: &[
            "verify",
            "--field",
            SQRT2_Q2,
            "--form",
            QUARTIC,
            "--basis",
            r#"[["1","pi","0"],["0","pi^2","0"],["0","pi","1"]]"#,
        ],
        check: |v| v["value"] == "-2/3" && v["verdict"]["verdict"] == "stable",
    },
    Example {
        name: "unstable-quintic",
        about: "A quintic over F_3 destabilized by a flag through [0:0:1]",
        args: &["find-instability", "--field", "F_3", "--form", "x0^3*x2^2 + x1^3*x2^2 + x1^5"],
        check: |v| v["certificate"]["kind"] == "strict" && v["certificate"]["point"] == json!(["0", "0", "1"]),
    },
    Example {
        name: "double-conic",
        about: "A double conic over F_5: semistable but not stable",
        args: &["check-fiber", "--field", "F_5", "--form", "x0^4 + 2*x0^2*x1*x2 + x1^2*x2^2"],
        check: |v| v["verdict"] == "semistable",
    },
    Example {
        name: "cusp-fiber",
        about: "The cuspidal cubic over F_2 is unstable",
        args: &["check-fiber", "--field", "F_2", "--form", "x0^2*x2 + x1^3"],
        check: |v| v["verdict"] == "unstable",
    },
    Example {
        name: "laurent-cusp",
        about: "Descent over Q((t)): six-fold ramification gives a smooth cubic",
        args: &["descend", "--field", "Q((t))", "--form", "x0^2*x2 - x1^3 + t*x2^3"],
        check: |v| {
            v["outcome"]["status"] == "stable" && v["outcome"]["value"] == "-1/6" && v["outcome"]["ramification"] == 6
        },
    },
    Example {
        name: "fermat-cubic",
        about: "The Fermat cubic over Q_7 has good reduction",
        args: &["descend", "--field", "Q_7", "--form", "x0^3 + x1^3 + x2^3"],
        check: |v| v["outcome"]["status"] == "stable" && v["steps"].as_array().is_some_and(|s| s.len() == 1),
    },
    Example {
        name: "ternary-cubic-certificate",
        about: "Projection certificate for plane cubics, checked by sampling and on the cusp cubic",
        args: &["certify-projection", "--n", "2", "--d", "3", "--field", "Q_2", "--form", CUSP_CUBIC],
        check: |v| v["row_sums_constant"] == true && v["sampling"]["mismatches"] == 0 && v["identity"]["agrees"] == true,
    },
];

/// Runs one example and reports its output and whether the check passed.
pub fn run_example(ex: &Example) -> Result<(Output, bool)> {
    let cli = Cli::try_parse_from(std::iter::once("semistable").chain(ex.args.iter().copied()))
        .map_err(|e| Error::Input(e.to_string()))?;
    let out = run(&cli)?;
    let pass = (ex.check)(&out.json);
    Ok((out, pass))
}

fn cmd_examples(name: Option<&str>, all: bool) -> Result<Output> {
    let selected: Vec<&Example> = match (name, all) {
        (Some(n), _) => {
            vec![EXAMPLES.iter().find(|e| e.name == n).ok_or_else(|| Error::Input(format!("no example named {n:?}")))?]
        }
        (None, true) => EXAMPLES.iter().collect(),
        (None, false) => {
            let mut text = String::new();
            for e in EXAMPLES {
                let _ = writeln!(text, "{:28} {}", e.name, e.about);
            }
            let list: Vec<Value> = EXAMPLES.iter().map(|e| json!({ "name": e.name, "about": e.about })).collect();
            return Ok(Output::ok(text, Value::from(list)));
        }
    };
    let mut text = String::new();
    let mut results = Vec::new();
    let mut failed = false;
    for ex in selected {
        let (out, pass) = match run_example(ex) {
            Ok(r) => r,
            Err(e) => (Output { text: format!("error: {e}\n"), json: Value::Null, code: e.exit_code() }, false),
        };
        failed |= !pass;
        let _ = writeln!(text, "== {} ({})\n$ semistable {}", ex.name, ex.about, ex.args.join(" "));
        text.push_str(&out.text);
        let _ = writeln!(text, "{}\n", if pass { "PASS" } else { "FAIL" });
        results.push(json!({ "name": ex.name, "pass": pass, "output": out.json }));
    }
    Ok(Output { text, json: Value::from(results), code: if failed { EXIT_INPUT } else { EXIT_OK } })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> Result<Output> {
        let cli = Cli::try_parse_from(std::iter::once("semistable").chain(args.iter().copied()))
            .map_err(|e| Error::Input(e.to_string()))?;
        run(&cli)
    }

    #[test]
    fn every_example_passes() {
        for ex in EXAMPLES {
            let (out, pass) = run_example(ex).unwrap();
            assert!(pass, "{}: {}", ex.name, out.json);
        }
    }

    #[test]
    fn eval_values() {
        let out = run_args(&["eval", "--field", "Q_2", "--form", CUSP_CUBIC, "--point", "1/2,1/3,0"]).unwrap();
        assert_eq!(out.text, "-1/6\n");
        let out = run_args(&["eval", "--field", "Q_2", "--form", CUSP_CUBIC, "--point", "0,0,0"]).unwrap();
        assert_eq!(out.text, "0\n");
    }

    #[test]
    fn error_exit_codes() {
        let bad = run_args(&["eval", "--field", "Q_2", "--form", "{\"n\": 2,", "--point", "0,0,0"]).unwrap_err();
        assert_eq!(bad.exit_code(), 2);
        assert!(bad.to_string().contains("line 1 column"), "{bad}");
        let mono = run_args(&["minimize", "--field", "Q_2", "--form", "x0^3"]).unwrap_err();
        assert_eq!(mono.exit_code(), 4);
        let big = run_args(&["certify-projection", "--n", "2", "--d", "6", "--samples", "0"]).unwrap_err();
        assert_eq!(big.exit_code(), 5);
        let out = run_args(&["check-fiber", "--field", "F_2", "--form", "x0^2*x2 + x1^3"]).unwrap();
        assert_eq!(out.code, 4);
    }

    #[test]
    fn descent_json_round_trips_and_is_deterministic() {
        let args = ["descend", "--field", "Q((t))", "--form", "x0^2*x2 - x1^3 + t*x2^3"];
        let a = run_args(&args).unwrap();
        let b = run_args(&args).unwrap();
        assert_eq!(serde_json::to_string(&a.json).unwrap(), serde_json::to_string(&b.json).unwrap());
        let r: DescentReport = serde_json::from_value(a.json.clone()).unwrap();
        assert_eq!(serde_json::to_value(&r).unwrap(), a.json);
    }

    #[test]
    fn minimize_text() {
        let out = run_args(&["minimize", "--field", "Q_2", "--form", QUARTIC]).unwrap();
        assert!(out.text.starts_with("minimum -1/3 at (0,1/2,0)\n"), "{}", out.text);
        assert!(out.text.contains("no vertices over the value group"));
    }

    #[test]
    fn point_and_variable_parsing() {
        assert_eq!(parse_point("[1/2, 1/3, 0]").unwrap(), parse_point("1/2,1/3,0").unwrap());
        assert_eq!(variable_count("x0^3"), 1);
        assert_eq!(variable_count("x0*x12"), 12);
    }
}
