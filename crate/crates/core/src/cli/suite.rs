//! End-to-end checks of every quantitative claim the toolkit can reproduce.

use std::time::{Duration, Instant};

use num_traits::One;
use serde::Serialize;

use crate::bounds::{mk_argmax, nodal_degree_bound, nondicritical_degree_bound, thm1_bound, thm2_bound, thm4_bound};
use crate::branches::{corollary2_check, curve_invariant, euler_identity_check};
use crate::construct::{eee_system, gallery, logarithmic_form, quartic_four_ovals, thm2b, LogarithmicSpec};
use crate::cycles::{certify_cycle, location_check, vanishing_residuals, CyclesError};
use crate::field::{darboux_check, iif_check, infinity_invariant, invariance_check, ProjectiveOneForm};
use crate::polyring::{Arity, GaussianRational, MultiPoly};
use crate::realtopo::{count_ovals, count_ovals_default, trace_oval, trace_ovals, Rect, TraceOptions};
use crate::textio::{parse_poly, print_poly};

/// One line of the suite.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: String,
    pub pass: bool,
    pub details: Vec<String>,
}

impl CriterionResult {
    pub fn new(id: u32, name: &str) -> Self {
        Self { id, name: name.into(), pass: true, details: Vec::new() }
    }

    pub fn check(&mut self, ok: bool, what: impl Into<String>) {
        let what = what.into();
        self.details.push(format!("{} {}", if ok { "ok  " } else { "FAIL" }, what));
        self.pass &= ok;
    }

    pub fn fail(&mut self, what: impl Into<String>) {
        self.check(false, what);
    }

    pub fn line(&self) -> String {
        format!("criterion {} [{}] {}", self.id, if self.pass { "PASS" } else { "FAIL" }, self.name)
    }
}

fn hp(s: &str) -> MultiPoly {
    parse_poly(s, Arity::Projective).expect("suite literal")
}

fn ap(s: &str) -> MultiPoly {
    parse_poly(s, Arity::Affine).expect("suite literal")
}

fn fmt_secs(d: Duration) -> String {
    format!("{:.3}s", d.as_secs_f64())
}

/// Euler identity on Examples 1 to 3.
pub fn euler_examples(truncation: Option<usize>) -> CriterionResult {
    let mut c = CriterionResult::new(1, "Euler identity on Examples 1-3");
    let expected = [("example1", "F1", (2, 1, 1, 2)), ("example2", "F", (3, 1, 2, 2)), ("example3", "F", (4, 1, 3, 2))];
    let start = Instant::now();
    for (name, form_name, (sum_mu, n, m, chi)) in expected {
        let fx = gallery(name).expect("gallery");
        let form = fx.document.form(form_name).expect("form").clone();
        let curve = fx.document.curve("S").expect("curve").poly.clone();
        match euler_identity_check(&form, &curve, chi, truncation) {
            Ok(r) => {
                let got = (r.sum_mu, r.curve_degree as i64, r.foliation_degree as i64, r.rhs);
                c.check(
                    got == (sum_mu, n, m, chi) && r.identity_holds,
                    format!("{name}: (sum mu, n, m, chi) = {got:?}, identity {}", r.identity_holds),
                );
            }
            Err(e) => c.fail(format!("{name}: {e}")),
        }
    }
    let took = start.elapsed();
    c.check(took < Duration::from_secs(1), format!("runtime {} < 1s", fmt_secs(took)));
    c
}

/// Corollary 2 at degrees 1, 2, 3.
pub fn corollary2_values(truncation: Option<usize>) -> CriterionResult {
    let mut c = CriterionResult::new(2, "Corollary 2 at n = 1, 2, 3");
    for (f, chi) in [("y - 2*x - 1", 2), ("x^2 + y^2 - 1", 2), ("x*y*(x - y) - 1", 0)] {
        match corollary2_check(&ap(f), truncation) {
            Ok(r) => c.check(
                r.chi == chi && r.euler.rhs == chi && r.all_infinity_mu_one && r.holds,
                format!("{f}: n = {}, chi = {}, sum mu = {}, infinity mu all 1 = {}", r.degree, r.euler.rhs, r.euler.sum_mu, r.all_infinity_mu_one),
            ),
            Err(e) => c.fail(format!("{f}: {e}")),
        }
    }
    c
}

/// Closed-form bound tables.
pub fn bound_tables() -> CriterionResult {
    let mut c = CriterionResult::new(3, "bound tables");
    let t1: Vec<u64> = (2..=7).map(|m| thm1_bound(m).unwrap().value).collect();
    c.check(t1[..5] == [1, 1, 4, 6, 11], format!("Theorem 1, m = 2..7: {t1:?}"));
    let t2a: Vec<u64> = (2..=7).map(|m| thm2_bound(m, true).unwrap().value).collect();
    c.check(t2a[..2] == [2, 3], format!("Theorem 2(a), m = 2..7: {t2a:?}"));
    let t2b: Vec<u64> = (2..=7).map(|m| thm2_bound(m, false).unwrap().value).collect();
    c.check(t2b[..2] == [4, 6], format!("Theorem 2(b), m = 2..7: {t2b:?}"));
    let t4: Vec<u64> = (2..=7).map(|m| thm4_bound(m).unwrap().value).collect();
    c.check(t4 == t1, format!("Theorem 4, m = 2..7: {t4:?}"));
    let deg = (1..=7).all(|m| nodal_degree_bound(m).value == m as u64 + 2 && nondicritical_degree_bound(m).value == m as u64 + 2);
    c.check(deg, "degree bounds n <= m + 2 for m = 1..7");
    c
}

/// The proof's claim that `M(k)` peaks at `k = 3` with Theorem 1's value.
pub fn mk_maximization() -> CriterionResult {
    let mut c = CriterionResult::new(4, "M(k) maximized at k = 3 with Theorem 1's value, m = 2..30");
    let start = Instant::now();
    let mut bad = Vec::new();
    for m in 2..=30 {
        let a = mk_argmax(m).expect("m >= 2");
        if !a.matches_proof {
            bad.push(format!("m = {m}: max {} at k = {} with partition {:?}, Theorem 1 gives {}", a.value, a.k, a.partition, a.thm1));
        }
    }
    let took = start.elapsed();
    if bad.is_empty() {
        c.check(true, "every m agrees");
    }
    for b in bad {
        c.fail(b);
    }
    c.check(took < Duration::from_secs(10), format!("runtime {} < 10s", fmt_secs(took)));
    c
}

/// The printed three-line example, for several weight choices.
pub fn three_line_example() -> CriterionResult {
    let mut c = CriterionResult::new(5, "three-line logarithmic example");
    let g = |re: i64, im: i64| GaussianRational::from_parts((re, 1), (im, 1));
    for (l1, l2) in [(g(1, 0), g(2, 0)), (g(1, 0), g(0, 1)), (g(-3, 2), g(5, -1))] {
        let l3 = -&(&l1 + &l2);
        let spec = LogarithmicSpec::new(vec![hp("X"), hp("Y"), hp("Y - X - Z")], vec![l1.clone(), l2.clone(), l3.clone()]);
        let form = match spec.and_then(|s| logarithmic_form(&s)) {
            Ok(f) => f,
            Err(e) => {
                c.fail(format!("lambda = ({l1}, {l2}, {l3}): {e}"));
                continue;
            }
        };
        let (x, y, z) = (hp("X"), hp("Y"), hp("Z"));
        let lin = |a: &GaussianRational, b: &GaussianRational, cz: &GaussianRational| {
            &(&y.scale(a) + &x.scale(b)) + &z.scale(cz)
        };
        let want_p = &y * &lin(&l1, &l2, &-&l1);
        let want_q = -&(&x * &lin(&l1, &l2, &l2));
        let want_r = -&(&x * &y).scale(&l3);
        let same = print_poly(form.p()) == print_poly(&want_p)
            && print_poly(form.q()) == print_poly(&want_q)
            && print_poly(form.r()) == print_poly(&want_r);
        let at_infinity = form.affine_field().map(|f| infinity_invariant(&f)).unwrap_or(true);
        c.check(
            same && !at_infinity,
            format!("lambda = ({l1}, {l2}, {l3}): coefficients match {same}, line at infinity invariant {at_infinity}"),
        );
    }
    c
}

fn log_certificates(c: &mut CriterionResult, label: &str, spec: &LogarithmicSpec, form: &ProjectiveOneForm) {
    let field = match form.affine_field() {
        Ok(f) => f,
        Err(e) => return c.fail(format!("{label}: {e}")),
    };
    let mut certs = Vec::new();
    for (big, f) in spec.curves.iter().zip(spec.affine_curves()) {
        let projective = curve_invariant(form, big).unwrap_or(false);
        match invariance_check(&field, &f).map(|i| i.certificate()) {
            Ok(Some(cert)) if cert.residual_check && projective => certs.push(cert),
            _ => return c.fail(format!("{label}: {} not invariant", print_poly(big))),
        }
    }
    let darboux = darboux_check(&certs, &spec.weights).unwrap_or(false);
    let v = spec.affine_curves().iter().fold(MultiPoly::one(Arity::Affine), |acc, f| &acc * f);
    let iif = iif_check(&field, &v).unwrap_or(false);
    c.check(
        darboux && iif,
        format!("{label}: {} invariant curves with exact cofactors, sum lambda K = 0 {darboux}, iif {iif}", certs.len()),
    );
}

/// Certificates for the gallery's logarithmic foliations and the degree
/// presets.
pub fn logarithmic_certificates() -> CriterionResult {
    let mut c = CriterionResult::new(6, "invariance and inverse integrating factor of logarithmic foliations");
    let one = GaussianRational::one();
    let i = GaussianRational::i();
    let ex1 = LogarithmicSpec::new(vec![hp("X"), hp("Y"), hp("Z")], vec![one.clone(), i.clone(), -&(&one + &i)]).unwrap();
    let lines = LogarithmicSpec::new(vec![hp("X"), hp("Y"), hp("Y - X - Z")], vec![one.clone(), i.clone(), -&(&one + &i)]).unwrap();
    for (label, spec) in [("example1", ex1), ("three-lines", lines)] {
        match logarithmic_form(&spec) {
            Ok(form) => log_certificates(&mut c, label, &spec, &form),
            Err(e) => c.fail(format!("{label}: {e}")),
        }
    }
    for m in 1..=3 {
        match thm2b(m) {
            Ok((spec, form)) => log_certificates(&mut c, &format!("degree-{m} preset"), &spec, &form),
            Err(e) => c.fail(format!("degree-{m} preset: {e}")),
        }
    }
    c
}

/// The limit-cycle construction on the circle and the four-oval quartic.
pub fn eee_pipeline() -> CriterionResult {
    let mut c = CriterionResult::new(7, "limit-cycle construction on the circle and the four-oval quartic");
    let one = GaussianRational::one();
    let h = ap("x - 2");
    let g = ap("x^2 + y^2 - 1");
    let sys = eee_system(&g, &h, &one, &one).expect("circle system");
    c.check(sys.certificate.cofactor == ap("2*x + 2*y"), format!("circle cofactor {}", print_poly(&sys.certificate.cofactor)));
    match count_ovals_default(&g, 512) {
        Ok(s) => c.check(s.count() == 1 && s.certified_count() == 1, format!("circle: {} oval(s), {} certified", s.count(), s.certified_count())),
        Err(e) => c.fail(format!("circle ovals: {e}")),
    }
    let oval = trace_oval(&g, (1.0, 0.0), &TraceOptions::default()).expect("circle trace");
    match crate::cycles::divergence_integral(&sys.field, &g, &oval) {
        Ok(d) => c.check(
            d.d.abs() > 0.1 && d.relative_agreement < 1e-6,
            format!("circle: D = {:.10}, relative agreement {:.2e}", d.d, d.relative_agreement),
        ),
        Err(e) => c.fail(format!("circle divergence: {e}")),
    }
    let residual = vanishing_residuals(&g, std::slice::from_ref(&oval), 1e-8)[0].residual;
    match location_check(&sys.field, &g, std::slice::from_ref(&oval), 1e-8) {
        Ok(r) => c.check(r[0].pass, format!("circle location residual {:.2e}", r[0].residual)),
        Err(CyclesError::NotIif) => c.fail(format!(
            "circle location check: x^2 + y^2 - 1 is not an inverse integrating factor (oval residual {residual:.2e})"
        )),
        Err(e) => c.fail(format!("circle location check: {e}")),
    }

    let q = quartic_four_ovals();
    let qsys = eee_system(&q, &h, &one, &one).expect("quartic system");
    match count_ovals(&q, &Rect::symmetric_int(2), 512) {
        Ok(set) => {
            c.check(set.certified_count() == 4, format!("quartic: {} oval(s), {} certified", set.count(), set.certified_count()));
            match trace_ovals(&q, &set, &TraceOptions::default()) {
                Ok(ovals) => {
                    let certs: Vec<_> = ovals.iter().enumerate().map(|(k, o)| certify_cycle(&qsys.field, &q, k, o)).collect();
                    let hyperbolic = certs.iter().filter(|r| matches!(r, Ok(x) if x.hyperbolic)).count();
                    let bound = thm1_bound(4).unwrap().value as usize;
                    c.check(hyperbolic == 4 && hyperbolic == bound, format!("quartic: {hyperbolic} hyperbolic cycles, Theorem 1 bound at m = 4 is {bound}"));
                }
                Err(e) => c.fail(format!("quartic trace: {e}")),
            }
        }
        Err(e) => c.fail(format!("quartic ovals: {e}")),
    }
    c
}

/// Criteria 1 to 7 in order.
pub fn paper_suite(truncation: Option<usize>) -> Vec<CriterionResult> {
    vec![
        euler_examples(truncation),
        corollary2_values(truncation),
        bound_tables(),
        mk_maximization(),
        three_line_example(),
        logarithmic_certificates(),
        eee_pipeline(),
    ]
}
