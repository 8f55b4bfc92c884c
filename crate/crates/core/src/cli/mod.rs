//! Command-line driver. Every subcommand writes one report to `out`;
//! exit codes: 0 all checks pass, 1 a check failed, 2 usage or parse
//! error, 3 an Unknown or Unsupported result was met.

pub mod suite;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::bounds::{
    harnack_bound, mk_argmax, mk_envelope, mk_value, nodal_degree_bound, nondicritical_degree_bound, thm1_bound,
    thm2_bound, thm4_bound, BoundReport,
};
use crate::branches::{certified_multiplicities, corollary2_check, default_truncation, euler_identity_check};
use crate::construct::{eee_system, gallery, logarithmic_form, thm2b, LogarithmicSpec};
use crate::cycles::{certify_cycle, location_check};
use crate::field::{
    darboux_check, iif_check, infinity_invariant, invariance_check, projectivize, AffineVectorField, Invariance,
    ProjectiveOneForm,
};
use crate::polyring::{Arity, GaussianRational, MultiPoly};
use crate::projective::ProjectivePoint;
use crate::realtopo::{count_ovals, default_box, trace_ovals, OvalSet, Rect, TraceOptions};
use crate::singularities::{
    classify_dicritical, closure, curve_singularities, foliation_of, foliation_singularities, is_nodal, GeometryError,
    Nodality, Verdict,
};
use crate::textio::{parse_constant, parse_poly, parse_system, print_poly, print_system, Approx, SystemDocument};

/// Overrides the default series truncation order.
pub const TRUNCATION_ENV: &str = "FOLIA_TRUNCATION";

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_UNKNOWN: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "folia", version, about = "Invariant algebraic curves, foliations and algebraic limit cycles")]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Exact test of Xf = Kf.
    CheckInvariant { doc: PathBuf, field: String, curve: String },
    /// The cofactor K of an invariant curve.
    Cofactor { doc: PathBuf, field: String, curve: String },
    /// Projective one-form of an affine field, as a .fol document.
    Projectivize { doc: PathBuf, field: String },
    /// Singular points of a field or form, finite and at infinity.
    Singularities { doc: PathBuf, foliation: String },
    /// Dicritical verdicts at the singular points.
    Classify {
        doc: PathBuf,
        foliation: String,
        #[arg(long)]
        point: Option<String>,
    },
    /// Whether a curve has only nodes as singularities.
    Nodal {
        doc: PathBuf,
        curve: String,
        #[arg(long)]
        with_infinity: bool,
    },
    /// Branch multiplicities at the singular points on a curve.
    Multiplicity {
        doc: PathBuf,
        foliation: String,
        curve: String,
        #[arg(long)]
        point: Option<String>,
        #[arg(long)]
        truncation: Option<usize>,
    },
    /// chi = sum mu - n(m - 1) for an invariant curve.
    EulerCheck {
        doc: PathBuf,
        foliation: String,
        curve: String,
        #[arg(long, allow_hyphen_values = true)]
        chi: i64,
        #[arg(long)]
        truncation: Option<usize>,
    },
    /// chi = -n(n - 3) through the Hamiltonian foliation of a smooth curve.
    Corollary2 {
        doc: PathBuf,
        curve: String,
        #[arg(long)]
        truncation: Option<usize>,
    },
    /// Closed-form bounds.
    Bounds {
        #[arg(long, value_enum)]
        theorem: TheoremArg,
        #[arg(long)]
        m: Option<u32>,
        /// Inclusive range `a..b` for a table.
        #[arg(long)]
        m_range: Option<String>,
        #[arg(long)]
        n: Option<u32>,
        /// Orders of the singular points, comma separated.
        #[arg(long)]
        orders: Option<String>,
        /// Degrees of the curves, comma separated.
        #[arg(long)]
        partition: Option<String>,
        #[arg(long)]
        k: Option<u32>,
        /// Theorem 2 case with the line at infinity invariant.
        #[arg(long)]
        r_zero: bool,
    },
    /// Build foliations and systems as .fol documents.
    Construct {
        #[command(subcommand)]
        what: ConstructCmd,
        #[arg(short, long, global = true)]
        output: Option<PathBuf>,
    },
    /// Real ovals of a curve.
    Ovals {
        doc: PathBuf,
        curve: String,
        /// `xmin,xmax,ymin,ymax` with rational entries.
        #[arg(long = "box")]
        rect: Option<String>,
        #[arg(long, default_value_t = 512)]
        res: usize,
        #[arg(long)]
        emit_polylines: Option<PathBuf>,
    },
    /// Hyperbolicity certificates for ovals of an invariant curve.
    Certify {
        doc: PathBuf,
        field: String,
        curve: String,
        #[arg(long)]
        all_ovals: bool,
        #[arg(long = "box")]
        rect: Option<String>,
        #[arg(long, default_value_t = 512)]
        res: usize,
        /// Also run the location check with this inverse integrating factor.
        #[arg(long)]
        iif: Option<String>,
    },
    /// Exact test of XV = div(X) V.
    IifCheck { doc: PathBuf, field: String, curve: String },
    /// Exact test of sum lambda_i K_i = 0.
    DarbouxCheck {
        doc: PathBuf,
        field: String,
        /// Curve names, comma separated.
        #[arg(long)]
        curves: String,
        /// Weights, semicolon separated.
        #[arg(long, allow_hyphen_values = true)]
        weights: String,
    },
    /// Every reproducible claim, end to end.
    PaperSuite,
}

#[derive(Debug, Subcommand)]
enum ConstructCmd {
    /// Logarithmic form from homogeneous curves and weights.
    Log {
        /// Curves, semicolon separated.
        #[arg(long)]
        curves: String,
        /// Weights, semicolon separated.
        #[arg(long, allow_hyphen_values = true)]
        weights: String,
    },
    /// The system x' = a g - h g_y, y' = b g + h g_x.
    Eee {
        #[arg(long)]
        g: String,
        #[arg(long)]
        h: String,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        a: String,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        b: String,
    },
    /// Degree-m logarithmic foliation with invariant curves of total degree m + 2.
    Thm2b {
        #[arg(long)]
        m: u32,
    },
    /// A named fixture.
    Gallery { name: String },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TheoremArg {
    T1,
    T2,
    T4,
    Harnack,
    DegreeNodal,
    DegreeNondicritical,
    Mk,
}

/// A finished command: exit code, JSON report and its text rendering.
struct Outcome {
    code: i32,
    report: Value,
    text: String,
}

impl Outcome {
    fn new(code: i32, report: Value) -> Self {
        let text = render_text(&report, 0);
        Self { code, report, text }
    }

    fn with_text(code: i32, report: Value, text: String) -> Self {
        Self { code, report, text }
    }
}

#[derive(Debug)]
struct CliError {
    code: i32,
    msg: String,
}

impl CliError {
    fn usage(msg: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, msg: msg.into() }
    }

    fn fail(msg: impl Into<String>) -> Self {
        Self { code: EXIT_FAIL, msg: msg.into() }
    }
}

impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> Self {
        let code = match e {
            GeometryError::Unsupported { .. } | GeometryError::Undecided(_) => EXIT_UNKNOWN,
            _ => EXIT_FAIL,
        };
        Self { code, msg: e.to_string() }
    }
}

macro_rules! fail_from {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::fail(e.to_string())
            }
        }
    )*};
}

fail_from!(
    crate::field::FieldError,
    crate::polyring::PolyError,
    crate::construct::ConstructError,
    crate::realtopo::TopoError,
    crate::cycles::CyclesError,
    crate::bounds::BoundsError,
    std::io::Error
);

impl From<crate::textio::TextError> for CliError {
    fn from(e: crate::textio::TextError) -> Self {
        CliError::usage(e.to_string())
    }
}

fn render_text(v: &Value, indent: usize) -> String {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(map) => {
            let mut s = String::new();
            for (k, val) in map {
                match val {
                    Value::Object(_) | Value::Array(_) if !is_flat(val) => {
                        s.push_str(&format!("{pad}{k}:\n{}", render_text(val, indent + 1)));
                    }
                    _ => s.push_str(&format!("{pad}{k}: {}\n", scalar(val))),
                }
            }
            s
        }
        Value::Array(items) => {
            let mut s = String::new();
            for it in items {
                if is_flat(it) {
                    s.push_str(&format!("{pad}- {}\n", scalar(it)));
                } else {
                    s.push_str(&format!("{pad}-\n{}", render_text(it, indent + 1)));
                }
            }
            s
        }
        _ => format!("{pad}{}\n", scalar(v)),
    }
}

fn is_flat(v: &Value) -> bool {
    match v {
        Value::Array(a) => a.iter().all(|x| !x.is_object() && !x.is_array()),
        Value::Object(_) => false,
        _ => true,
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(a) => a.iter().map(scalar).collect::<Vec<_>>().join(", "),
        other => other.to_string(),
    }
}

fn load(path: &PathBuf) -> Result<SystemDocument, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    Ok(parse_system(&text)?)
}

fn field<'a>(doc: &'a SystemDocument, name: &str) -> Result<&'a AffineVectorField, CliError> {
    doc.field(name).ok_or_else(|| CliError::usage(format!("no [field {name}] in document")))
}

fn curve(doc: &SystemDocument, name: &str) -> Result<MultiPoly, CliError> {
    doc.curve(name).map(|c| c.poly.clone()).ok_or_else(|| CliError::usage(format!("no [curve {name}] in document")))
}

fn affine_curve(doc: &SystemDocument, name: &str) -> Result<MultiPoly, CliError> {
    let c = curve(doc, name)?;
    Ok(if c.arity() == Arity::Projective { c.dehomogenize()? } else { c })
}

/// A `[field]` is taken to its saturated projective foliation.
fn foliation(doc: &SystemDocument, name: &str) -> Result<ProjectiveOneForm, CliError> {
    if let Some(f) = doc.form(name) {
        return Ok(f.clone());
    }
    if let Some(f) = doc.field(name) {
        return Ok(foliation_of(f)?);
    }
    Err(CliError::usage(format!("no [field {name}] or [form {name}] in document")))
}

fn parse_point(s: &str) -> Result<ProjectivePoint, CliError> {
    let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
    let parts: Vec<&str> = inner.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::usage(format!("point `{s}` must look like (a : b : c)")));
    }
    let c: Vec<GaussianRational> = parts.iter().map(|p| parse_constant(p.trim())).collect::<Result<_, _>>()?;
    ProjectivePoint::new(c[0].clone(), c[1].clone(), c[2].clone())
        .ok_or_else(|| CliError::usage(format!("point `{s}` has all coordinates zero")))
}

fn split_list(s: &str, sep: char) -> Vec<&str> {
    s.split(sep).map(str::trim).filter(|x| !x.is_empty()).collect()
}

fn parse_u32_list(s: &str) -> Result<Vec<u32>, CliError> {
    split_list(s, ',').iter().map(|x| x.parse().map_err(|_| CliError::usage(format!("`{x}` is not a count")))).collect()
}

fn parse_real(s: &str) -> Result<num_rational::BigRational, CliError> {
    let c = parse_constant(s)?;
    if !c.is_real() {
        return Err(CliError::usage(format!("`{s}` must be real")));
    }
    Ok(c.re)
}

fn parse_box(s: &str) -> Result<Rect, CliError> {
    let v = split_list(s, ',').into_iter().map(parse_real).collect::<Result<Vec<_>, _>>()?;
    if v.len() != 4 {
        return Err(CliError::usage("--box takes xmin,xmax,ymin,ymax"));
    }
    Rect::new(v[0].clone(), v[1].clone(), v[2].clone(), v[3].clone()).map_err(|e| CliError::usage(e.to_string()))
}

fn env_truncation() -> Result<Option<usize>, CliError> {
    match std::env::var(TRUNCATION_ENV) {
        Ok(v) => v.trim().parse().map(Some).map_err(|_| CliError::usage(format!("{TRUNCATION_ENV}=`{v}` is not a count"))),
        Err(_) => Ok(None),
    }
}

fn truncation(flag: Option<usize>) -> Result<Option<usize>, CliError> {
    Ok(match flag {
        Some(n) => Some(n),
        None => env_truncation()?,
    })
}

fn form_json(f: &ProjectiveOneForm) -> Value {
    json!({ "P": print_poly(f.p()), "Q": print_poly(f.q()), "R": print_poly(f.r()), "degree": f.degree() })
}

fn invariance_json(inv: &Invariance) -> Value {
    match inv {
        Invariance::Invariant(c) => json!({ "invariant": true, "certificate": c }),
        Invariance::NotInvariant => json!({ "invariant": false }),
    }
}

fn bound_outcome(reports: Vec<BoundReport>) -> Outcome {
    let text = if reports.len() == 1 {
        format!("{}\n", reports[0].value)
    } else {
        reports.iter().map(|r| format!("{} {}\n", r.inputs.m.unwrap_or(0), r.value)).collect()
    };
    Outcome::with_text(EXIT_PASS, serde_json::to_value(&reports).unwrap(), text)
}

fn oval_summary(set: &OvalSet) -> Value {
    let ovals: Vec<Value> = set
        .ovals
        .iter()
        .map(|o| {
            let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
            for &(x, y) in &o.vertices {
                x0 = x0.min(x);
                x1 = x1.max(x);
                y0 = y0.min(y);
                y1 = y1.max(y);
            }
            json!({
                "vertices": o.vertices.len(),
                "certified": o.certified,
                "bbox": [Approx::new(x0).render(), Approx::new(x1).render(), Approx::new(y0).render(), Approx::new(y1).render()],
            })
        })
        .collect();
    json!({
        "box": set.rect,
        "resolution": set.resolution,
        "count": set.count(),
        "certified": set.certified_count(),
        "ovals": ovals,
        "warnings": set.warnings,
    })
}

fn run_bounds(
    theorem: TheoremArg,
    m: Option<u32>,
    m_range: Option<String>,
    n: Option<u32>,
    orders: Option<String>,
    partition: Option<String>,
    k: Option<u32>,
    r_zero: bool,
) -> Result<Outcome, CliError> {
    let ms: Vec<u32> = match (m, m_range) {
        (Some(m), None) => vec![m],
        (None, Some(r)) => {
            let (a, b) = r.split_once("..").ok_or_else(|| CliError::usage("--m-range takes a..b"))?;
            let a: u32 = a.trim().parse().map_err(|_| CliError::usage("bad range start"))?;
            let b: u32 = b.trim().parse().map_err(|_| CliError::usage("bad range end"))?;
            (a..=b).collect()
        }
        (None, None) => Vec::new(),
        _ => return Err(CliError::usage("give --m or --m-range, not both")),
    };
    let need_m = || if ms.is_empty() { Err(CliError::usage("this theorem needs --m or --m-range")) } else { Ok(()) };
    let usage = |e: crate::bounds::BoundsError| CliError::usage(e.to_string());
    match theorem {
        TheoremArg::T1 => {
            need_m()?;
            Ok(bound_outcome(ms.iter().map(|&m| thm1_bound(m)).collect::<Result<_, _>>().map_err(usage)?))
        }
        TheoremArg::T2 => {
            need_m()?;
            Ok(bound_outcome(ms.iter().map(|&m| thm2_bound(m, r_zero)).collect::<Result<_, _>>().map_err(usage)?))
        }
        TheoremArg::T4 => {
            need_m()?;
            Ok(bound_outcome(ms.iter().map(|&m| thm4_bound(m)).collect::<Result<_, _>>().map_err(usage)?))
        }
        TheoremArg::DegreeNodal => {
            need_m()?;
            Ok(bound_outcome(ms.iter().map(|&m| nodal_degree_bound(m)).collect()))
        }
        TheoremArg::DegreeNondicritical => {
            need_m()?;
            Ok(bound_outcome(ms.iter().map(|&m| nondicritical_degree_bound(m)).collect()))
        }
        TheoremArg::Harnack => {
            let n = n.ok_or_else(|| CliError::usage("harnack needs --n"))?;
            let orders = orders.map(|o| parse_u32_list(&o)).transpose()?.unwrap_or_default();
            Ok(bound_outcome(vec![harnack_bound(n, &orders).map_err(usage)?]))
        }
        TheoremArg::Mk => {
            need_m()?;
            if let Some(p) = partition {
                let parts = parse_u32_list(&p)?;
                let v = mk_value(ms[0], &parts).map_err(usage)?;
                return Ok(Outcome::with_text(EXIT_PASS, json!({ "m": ms[0], "partition": parts, "value": v }), format!("{v}\n")));
            }
            if let Some(k) = k {
                let v = mk_envelope(ms[0], k).map_err(usage)?;
                return Ok(Outcome::with_text(EXIT_PASS, json!({ "m": ms[0], "k": k, "envelope": v }), format!("{v}\n")));
            }
            let rows = ms.iter().map(|&m| mk_argmax(m)).collect::<Result<Vec<_>, _>>().map_err(usage)?;
            let code = if rows.iter().all(|r| r.matches_proof) { EXIT_PASS } else { EXIT_FAIL };
            let text = rows
                .iter()
                .map(|r| format!("m={} k={} partition={:?} value={} thm1={} {}\n", r.m, r.k, r.partition, r.value, r.thm1, if r.matches_proof { "ok" } else { "MISMATCH" }))
                .collect();
            Ok(Outcome::with_text(code, serde_json::to_value(&rows).unwrap(), text))
        }
    }
}

fn run_construct(what: ConstructCmd) -> Result<Outcome, CliError> {
    let doc = match what {
        ConstructCmd::Log { curves, weights } => {
            let cs = split_list(&curves, ';').into_iter().map(|c| parse_poly(c, Arity::Projective)).collect::<Result<Vec<_>, _>>()?;
            let ws = split_list(&weights, ';').into_iter().map(parse_constant).collect::<Result<Vec<_>, _>>()?;
            let spec = LogarithmicSpec::new(cs, ws)?;
            let form = logarithmic_form(&spec)?;
            let mut doc = SystemDocument::default();
            doc.add_form("F", form.clone())?;
            for (k, (c, w)) in spec.curves.iter().zip(&spec.weights).enumerate() {
                doc.add_curve(&format!("F{}", k + 1), c.clone(), vec![])?;
                doc.add_param(&format!("lambda{}", k + 1), w.clone())?;
            }
            let field = form.affine_field()?;
            let mut doc_text = print_system(&doc);
            doc_text.push_str(&format!("# line at infinity invariant: {}\n", infinity_invariant(&field)));
            return Ok(Outcome::with_text(EXIT_PASS, json!({ "document": doc_text, "form": form_json(&form), "infinity_invariant": infinity_invariant(&field) }), doc_text));
        }
        ConstructCmd::Eee { g, h, a, b } => {
            let g = parse_poly(&g, Arity::Affine)?;
            let h = parse_poly(&h, Arity::Affine)?;
            let sys = eee_system(&g, &h, &parse_constant(&a)?, &parse_constant(&b)?)?;
            let mut doc = SystemDocument::default();
            doc.add_field("X", sys.field)?;
            doc.add_curve("g", g, vec![])?;
            let mut text = print_system(&doc);
            text.push_str(&format!("# cofactor of g: {}\n", print_poly(&sys.certificate.cofactor)));
            for w in &sys.warnings {
                text.push_str(&format!("# warning: {w}\n"));
            }
            return Ok(Outcome::with_text(EXIT_PASS, json!({ "document": print_system(&doc), "certificate": sys.certificate, "warnings": sys.warnings }), text));
        }
        ConstructCmd::Thm2b { m } => {
            let (spec, form) = thm2b(m)?;
            let mut doc = SystemDocument::default();
            doc.add_form("F", form)?;
            let mut names = Vec::new();
            for (k, (c, w)) in spec.curves.iter().zip(&spec.weights).enumerate() {
                let name = format!("F{}", k + 1);
                doc.add_curve(&name, c.clone(), vec![])?;
                doc.add_param(&format!("lambda{}", k + 1), w.clone())?;
                names.push(name);
            }
            let product = spec.curves.iter().fold(MultiPoly::one(Arity::Projective), |acc, c| &acc * c);
            doc.add_curve("S", product, names)?;
            doc
        }
        ConstructCmd::Gallery { name } => {
            let fx = gallery(&name).map_err(|e| CliError::usage(e.to_string()))?;
            let mut text = format!("# {}\n", fx.description);
            for n in &fx.notes {
                text.push_str(&format!("# note: {n}\n"));
            }
            text.push_str(&print_system(&fx.document));
            return Ok(Outcome::with_text(EXIT_PASS, json!({ "name": fx.name, "description": fx.description, "notes": fx.notes, "document": print_system(&fx.document) }), text));
        }
    };
    let text = print_system(&doc);
    Ok(Outcome::with_text(EXIT_PASS, json!({ "document": text }), text))
}

fn run_cmd(cmd: Cmd) -> Result<Outcome, CliError> {
    match cmd {
        Cmd::CheckInvariant { doc, field: fname, curve: cname } | Cmd::Cofactor { doc, field: fname, curve: cname } => {
            let d = load(&doc)?;
            let inv = invariance_check(field(&d, &fname)?, &affine_curve(&d, &cname)?)?;
            let code = if matches!(inv, Invariance::Invariant(_)) { EXIT_PASS } else { EXIT_FAIL };
            Ok(Outcome::new(code, invariance_json(&inv)))
        }
        Cmd::Projectivize { doc, field: fname } => {
            let d = load(&doc)?;
            let form = projectivize(field(&d, &fname)?)?;
            let mut out = SystemDocument::default();
            out.add_form(&fname, form.clone())?;
            let text = print_system(&out);
            Ok(Outcome::with_text(EXIT_PASS, json!({ "form": form_json(&form), "document": text }), text))
        }
        Cmd::Singularities { doc, foliation: name } => {
            let d = load(&doc)?;
            let form = foliation(&d, &name)?;
            let sol = foliation_singularities(&form)?;
            let code = if sol.residual > 0 { EXIT_UNKNOWN } else { EXIT_PASS };
            let pts: Vec<String> = sol.points.iter().map(|p| p.to_string()).collect();
            Ok(Outcome::new(code, json!({ "foliation_degree": form.degree(), "points": pts, "unresolved": sol.residual })))
        }
        Cmd::Classify { doc, foliation: name, point } => {
            let d = load(&doc)?;
            let form = foliation(&d, &name)?;
            let (points, residual) = match point {
                Some(p) => (vec![parse_point(&p)?], 0),
                None => {
                    let sol = foliation_singularities(&form)?;
                    (sol.points, sol.residual)
                }
            };
            let records = points.iter().map(|p| classify_dicritical(&form, p)).collect::<Result<Vec<_>, _>>()?;
            let unknown = residual > 0 || records.iter().any(|r| r.verdict == Verdict::Unknown);
            let code = if unknown { EXIT_UNKNOWN } else { EXIT_PASS };
            Ok(Outcome::new(code, json!({ "records": records, "unresolved": residual })))
        }
        Cmd::Nodal { doc, curve: cname, with_infinity } => {
            let d = load(&doc)?;
            let c = curve(&d, &cname)?;
            let verdict = is_nodal(&c, with_infinity)?;
            let sing = curve_singularities(&c, with_infinity)?;
            let code = match verdict {
                Nodality::Nodal => EXIT_PASS,
                Nodality::NotNodal => EXIT_FAIL,
                Nodality::Unknown => EXIT_UNKNOWN,
            };
            Ok(Outcome::new(code, json!({ "verdict": verdict, "singular_points": sing })))
        }
        Cmd::Multiplicity { doc, foliation: name, curve: cname, point, truncation: t } => {
            let d = load(&doc)?;
            let form = foliation(&d, &name)?.saturate()?;
            let big_f = closure(&curve(&d, &cname)?)?;
            let n0 = truncation(t)?.unwrap_or_else(|| default_truncation(form.degree(), big_f.degree().unwrap_or(1)));
            let (points, residual) = match point {
                Some(p) => (vec![parse_point(&p)?], 0),
                None => {
                    let mut sys = vec![big_f.clone()];
                    sys.extend(form.coefficients().into_iter().cloned());
                    let sol = crate::solve::solve_projective(&sys).map_err(GeometryError::from)?;
                    (sol.points, sol.residual)
                }
            };
            let mut rows = Vec::new();
            let mut unknown = residual > 0;
            for p in &points {
                let chart = p.standard_chart();
                let ms = certified_multiplicities(&form, &big_f, p, &chart, n0)?;
                for (k, m) in ms.iter().enumerate() {
                    unknown |= !m.certified;
                    rows.push(json!({ "point": p.to_string(), "chart": chart.name(), "branch": k, "mu": m.mu, "certified": m.certified }));
                }
            }
            let code = if unknown { EXIT_UNKNOWN } else { EXIT_PASS };
            Ok(Outcome::new(code, json!({ "truncation": n0, "multiplicities": rows, "unresolved": residual })))
        }
        Cmd::EulerCheck { doc, foliation: name, curve: cname, chi, truncation: t } => {
            let d = load(&doc)?;
            let form = foliation(&d, &name)?;
            let r = euler_identity_check(&form, &curve(&d, &cname)?, chi, truncation(t)?)?;
            let code = if !r.checkable {
                EXIT_UNKNOWN
            } else if r.identity_holds {
                EXIT_PASS
            } else {
                EXIT_FAIL
            };
            Ok(Outcome::new(code, serde_json::to_value(&r).unwrap()))
        }
        Cmd::Corollary2 { doc, curve: cname, truncation: t } => {
            let d = load(&doc)?;
            let r = corollary2_check(&curve(&d, &cname)?, truncation(t)?)?;
            let code = if !r.euler.checkable {
                EXIT_UNKNOWN
            } else if r.holds {
                EXIT_PASS
            } else {
                EXIT_FAIL
            };
            Ok(Outcome::new(code, serde_json::to_value(&r).unwrap()))
        }
        Cmd::Bounds { theorem, m, m_range, n, orders, partition, k, r_zero } => {
            run_bounds(theorem, m, m_range, n, orders, partition, k, r_zero)
        }
        Cmd::Construct { what, output } => {
            let o = run_construct(what)?;
            if let Some(path) = output {
                let doc = o.report.get("document").and_then(Value::as_str).unwrap_or_default();
                std::fs::write(&path, doc)?;
            }
            Ok(o)
        }
        Cmd::Ovals { doc, curve: cname, rect, res, emit_polylines } => {
            let d = load(&doc)?;
            let f = affine_curve(&d, &cname)?;
            let rect = match rect {
                Some(b) => parse_box(&b)?,
                None => default_box(&f)?,
            };
            let set = count_ovals(&f, &rect, res)?;
            if let Some(path) = emit_polylines {
                std::fs::write(path, set.polylines_text())?;
            }
            let code = if set.certified_count() == set.count() { EXIT_PASS } else { EXIT_UNKNOWN };
            Ok(Outcome::new(code, oval_summary(&set)))
        }
        Cmd::Certify { doc, field: fname, curve: cname, all_ovals, rect, res, iif } => {
            let d = load(&doc)?;
            let x = field(&d, &fname)?;
            let f = affine_curve(&d, &cname)?;
            if !matches!(invariance_check(x, &f)?, Invariance::Invariant(_)) {
                return Err(CliError::fail(format!("curve `{cname}` is not invariant")));
            }
            let rect = match rect {
                Some(b) => parse_box(&b)?,
                None => default_box(&f)?,
            };
            let set = count_ovals(&f, &rect, res)?;
            let mut ovals = trace_ovals(&f, &set, &TraceOptions::default())?;
            if !all_ovals {
                ovals.truncate(1);
            }
            let mut certs = Vec::new();
            let mut all_hyperbolic = true;
            for (k, o) in ovals.iter().enumerate() {
                let c = certify_cycle(x, &f, k, o)?;
                all_hyperbolic &= c.hyperbolic;
                certs.push(json!({
                    "oval": c.oval,
                    "period": Approx::new(c.period).render(),
                    "divergence": Approx::new(c.divergence).render(),
                    "error_estimate": Approx::new(c.error_estimate).render(),
                    "stability": c.stability,
                    "hyperbolic": c.hyperbolic,
                    "v_residual": Approx::new(c.v_residual).render(),
                }));
            }
            let mut report = json!({ "ovals_found": set.count(), "certificates": certs });
            let mut code = if all_hyperbolic { EXIT_PASS } else { EXIT_UNKNOWN };
            if let Some(vname) = iif {
                let v = affine_curve(&d, &vname)?;
                match location_check(x, &v, &ovals, 1e-8) {
                    Ok(rows) => {
                        if rows.iter().any(|r| !r.pass) {
                            code = EXIT_FAIL;
                        }
                        report["location"] = json!(rows
                            .iter()
                            .map(|r| json!({ "oval": r.oval, "residual": Approx::new(r.residual).render(), "pass": r.pass }))
                            .collect::<Vec<_>>());
                    }
                    Err(e) => {
                        code = EXIT_FAIL;
                        report["location"] = json!(e.to_string());
                    }
                }
            }
            if ovals.is_empty() {
                code = EXIT_FAIL;
            }
            Ok(Outcome::new(code, report))
        }
        Cmd::IifCheck { doc, field: fname, curve: cname } => {
            let d = load(&doc)?;
            let ok = iif_check(field(&d, &fname)?, &affine_curve(&d, &cname)?)?;
            Ok(Outcome::new(if ok { EXIT_PASS } else { EXIT_FAIL }, json!({ "inverse_integrating_factor": ok })))
        }
        Cmd::DarbouxCheck { doc, field: fname, curves, weights } => {
            let d = load(&doc)?;
            let x = field(&d, &fname)?;
            let names = split_list(&curves, ',');
            let ws = split_list(&weights, ';').into_iter().map(parse_constant).collect::<Result<Vec<_>, _>>()?;
            let mut certs = Vec::new();
            for n in &names {
                match invariance_check(x, &affine_curve(&d, n)?)? {
                    Invariance::Invariant(c) => certs.push(c),
                    Invariance::NotInvariant => {
                        return Ok(Outcome::new(EXIT_FAIL, json!({ "first_integral": false, "not_invariant": n })));
                    }
                }
            }
            let ok = darboux_check(&certs, &ws)?;
            Ok(Outcome::new(if ok { EXIT_PASS } else { EXIT_FAIL }, json!({ "first_integral": ok, "certificates": certs })))
        }
        Cmd::PaperSuite => {
            let rows = suite::paper_suite(env_truncation()?);
            let code = if rows.iter().all(|r| r.pass) { EXIT_PASS } else { EXIT_FAIL };
            let mut text = String::new();
            for r in &rows {
                text.push_str(&r.line());
                text.push('\n');
                for d in &r.details {
                    text.push_str(&format!("    {d}\n"));
                }
            }
            Ok(Outcome::with_text(code, serde_json::to_value(&rows).unwrap(), text))
        }
    }
}

/// Runs the CLI on `argv` (program name first) and returns the exit code.
pub fn run<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    let json = cli.json;
    match run_cmd(cli.cmd) {
        Ok(o) => {
            let _ = if json {
                writeln!(out, "{}", serde_json::to_string_pretty(&o.report).unwrap())
            } else {
                write!(out, "{}", o.text)
            };
            o.code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.msg);
            if json {
                let _ = writeln!(out, "{}", serde_json::to_string_pretty(&json!({ "error": e.msg, "exit_code": e.code })).unwrap());
            }
            e.code
        }
    }
}
