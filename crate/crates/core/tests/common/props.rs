//! Randomized property suites shared by `properties` and `acceptance`.
//! Each suite returns the number of cases that ran to completion.

use std::cell::Cell;

use folia::branches::{branch_multiplicity, certified_multiplicities, local_branches_in};
use folia::construct::{eee_system, logarithmic_form, LogarithmicSpec};
use folia::field::{invariance_check, projectivize, AffineVectorField, Invariance};
use folia::polyring::{Arity, GaussianRational, Monomial, MultiPoly};
use folia::projective::{Chart, ProjectivePoint};
use folia::realtopo::{count_ovals, Rect};
use folia::series::Series;
use folia::textio::{parse_poly, print_poly};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

pub const CASES: u32 = 256;

pub type Suite = fn() -> Result<u32, String>;

#[allow(dead_code)]
pub const SUITES: [(&str, Suite); 8] = [
    ("polynomial ring axioms", ring_axioms),
    ("parse/print round-trip", parse_print_round_trip),
    ("cofactor multiplicativity", cofactor_multiplicativity),
    ("projective condition on constructed forms", projective_condition),
    ("branch pullback consistency", branch_pullback),
    ("chart independence of mu", chart_independence),
    ("truncation stability of mu", truncation_stability),
    ("monotone certified-oval count", monotone_oval_count),
];

fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config { cases, failure_persistence: None, max_global_rejects: 4 * cases, ..Config::default() })
}

fn run<S, F>(cases: u32, strategy: S, test: F) -> Result<u32, String>
where
    S: Strategy,
    S::Value: Clone + std::fmt::Debug,
    F: Fn(S::Value) -> Result<(), TestCaseError>,
{
    let done = Cell::new(0u32);
    runner(cases)
        .run(&strategy, |v| {
            test(v)?;
            done.set(done.get() + 1);
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok(done.get())
}

fn gr() -> impl Strategy<Value = GaussianRational> + Clone {
    (-5i64..=5, 1i64..=3, prop_oneof![3 => Just(0i64), 1 => -3i64..=3])
        .prop_map(|(a, d, b)| GaussianRational::from_parts((a, d), (b, 1)))
}

fn nonzero_gr() -> impl Strategy<Value = GaussianRational> + Clone {
    gr().prop_filter("nonzero", |c| !num_traits::Zero::is_zero(c))
}

fn affine_poly(max_exp: u32, max_terms: usize) -> impl Strategy<Value = MultiPoly> + Clone {
    prop::collection::vec(((0..=max_exp), (0..=max_exp), gr()), 0..=max_terms).prop_map(|ts| {
        MultiPoly::from_terms(Arity::Affine, ts.into_iter().map(|(i, j, c)| (Monomial([i, j, 0]), c)))
    })
}

fn int_affine_poly(max_deg: u32, max_terms: usize) -> impl Strategy<Value = MultiPoly> + Clone {
    prop::collection::vec(((0..=max_deg), (0..=max_deg), -4i64..=4), 1..=max_terms).prop_map(move |ts| {
        MultiPoly::from_terms(
            Arity::Affine,
            ts.into_iter().filter(|(i, j, _)| i + j <= max_deg).map(|(i, j, c)| (Monomial([i, j, 0]), c.into())),
        )
    })
}

fn projective_poly(max_exp: u32, max_terms: usize) -> impl Strategy<Value = MultiPoly> + Clone {
    prop::collection::vec(((0..=max_exp), (0..=max_exp), (0..=max_exp), gr()), 0..=max_terms).prop_map(|ts| {
        MultiPoly::from_terms(Arity::Projective, ts.into_iter().map(|(i, j, k, c)| (Monomial([i, j, k]), c)))
    })
}

/// All coefficients of a homogeneous form of degree `d`.
fn form_of_degree(d: u32, coeffs: &[i64]) -> MultiPoly {
    let mut terms = Vec::new();
    let mut idx = 0;
    for i in 0..=d {
        for j in 0..=d - i {
            terms.push((Monomial([i, j, d - i - j]), GaussianRational::from_int(coeffs[idx % coeffs.len()])));
            idx += 1;
        }
    }
    MultiPoly::from_terms(Arity::Projective, terms)
}

fn linear(c: [i64; 3]) -> MultiPoly {
    form_of_degree(1, &[c[2], c[1], c[0]])
}

fn eval_at(f: &MultiPoly, p: &ProjectivePoint) -> GaussianRational {
    f.eval(p.coords())
}

/// `G·L(p)^d − G(p)·L^d`, a degree-`d` form vanishing at `p`.
fn through(g: &MultiPoly, l: &MultiPoly, p: &ProjectivePoint) -> MultiPoly {
    let d = g.degree().unwrap_or(0);
    let lp = eval_at(l, p).pow(d);
    let gp = eval_at(g, p);
    &g.scale(&lp) - &l.pow(d).scale(&gp)
}

fn point_nonzero() -> impl Strategy<Value = ProjectivePoint> + Clone {
    let c = prop_oneof![-3i64..=-1, 1i64..=3];
    (c.clone(), c.clone(), c).prop_map(|(a, b, z)| ProjectivePoint::from_ints(a, b, z).unwrap())
}

fn charts() -> [Chart; 3] {
    [Chart::z(), Chart::x(), Chart::y()]
}

fn is_zero(c: &GaussianRational) -> bool {
    num_traits::Zero::is_zero(c)
}

pub fn ring_axioms() -> Result<u32, String> {
    let p = || affine_poly(3, 5);
    run(CASES, (p(), p(), p(), gr()), |(a, b, c, s)| {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &MultiPoly::one(Arity::Affine), a.clone());
        #[allow(clippy::eq_op)]
        let diff = &a - &a;
        prop_assert!(diff.is_zero());
        prop_assert_eq!((&a * &b).scale(&s), &a.scale(&s) * &b);
        if !a.is_zero() && !b.is_zero() {
            prop_assert_eq!((&a * &b).degree(), Some(a.degree().unwrap() + b.degree().unwrap()));
            prop_assert_eq!((&a * &b).exact_divide(&b).unwrap(), a.clone());
        }
        for k in 0..2 {
            prop_assert_eq!((&a * &b).partial(k), &(&a.partial(k) * &b) + &(&a * &b.partial(k)));
        }
        Ok(())
    })
}

pub fn parse_print_round_trip() -> Result<u32, String> {
    run(CASES, (affine_poly(4, 6), projective_poly(3, 6)), |(a, p)| {
        let sa = print_poly(&a);
        prop_assert_eq!(parse_poly(&sa, Arity::Affine).map_err(|e| TestCaseError::fail(e.to_string()))?, a.clone());
        let sp = print_poly(&p);
        prop_assert_eq!(parse_poly(&sp, Arity::Projective).map_err(|e| TestCaseError::fail(e.to_string()))?, p.clone());
        // printing is canonical
        let again = print_poly(&parse_poly(&sa, Arity::Affine).unwrap());
        prop_assert_eq!(again, sa);
        Ok(())
    })
}

fn cofactor(field: &AffineVectorField, f: &MultiPoly) -> Result<MultiPoly, TestCaseError> {
    match invariance_check(field, f).map_err(|e| TestCaseError::fail(e.to_string()))? {
        Invariance::Invariant(c) => Ok(c.cofactor),
        Invariance::NotInvariant => Err(TestCaseError::fail(format!("{} not invariant", print_poly(f)))),
    }
}

/// Logarithmic foliation of two lines and a conic, and a planar field
/// `f g (u, v)`; in both every product of invariant curves has the summed cofactor.
pub fn cofactor_multiplicativity() -> Result<u32, String> {
    let lin = || prop::array::uniform3(-3i64..=3);
    let strat = (lin(), lin(), prop::collection::vec(-3i64..=3, 6), nonzero_gr(), nonzero_gr(), int_affine_poly(2, 4), int_affine_poly(2, 4), int_affine_poly(1, 3), int_affine_poly(1, 3));
    run(CASES, strat, |(l1, l2, conic, w1, w2, f, g, u, v)| {
        let c = form_of_degree(2, &conic);
        let w3 = -(&(&w1 + &w2) + &w2);
        prop_assume!(!is_zero(&w3));
        let spec = LogarithmicSpec::new(vec![linear(l1), c, linear(l2)], vec![w1, w2, w3]);
        if let Ok(spec) = spec {
            if let Ok(form) = logarithmic_form(&spec) {
                let field = form.affine_field().map_err(|e| TestCaseError::fail(e.to_string()))?;
                let fs: Vec<MultiPoly> = spec.affine_curves().into_iter().filter(|f| !f.is_constant()).collect();
                for i in 0..fs.len() {
                    for j in i + 1..fs.len() {
                        let k = cofactor(&field, &(&fs[i] * &fs[j]))?;
                        prop_assert_eq!(k, &cofactor(&field, &fs[i])? + &cofactor(&field, &fs[j])?);
                    }
                }
            }
        }
        prop_assume!(!f.is_constant() && !g.is_constant() && !(u.is_zero() && v.is_zero()));
        let fg = &f * &g;
        let field = AffineVectorField::planar(&fg * &u, &fg * &v).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(cofactor(&field, &fg)?, &cofactor(&field, &f)? + &cofactor(&field, &g)?);
        Ok(())
    })
}

/// `X P + Y Q + Z R = 0` for logarithmic forms, eee systems and projectivized fields.
pub fn projective_condition() -> Result<u32, String> {
    let lin = || prop::array::uniform3(-3i64..=3);
    let strat = (lin(), lin(), lin(), nonzero_gr(), nonzero_gr(), affine_poly(2, 5), affine_poly(2, 5), int_affine_poly(2, 5), lin(), nonzero_gr());
    run(CASES, strat, |(l1, l2, l3, w1, w2, p, q, g, h, a)| {
        let w3 = -(&w1 + &w2);
        prop_assume!(!is_zero(&w3));
        if let Ok(spec) = LogarithmicSpec::new(vec![linear(l1), linear(l2), linear(l3)], vec![w1, w2, w3]) {
            if let Ok(form) = logarithmic_form(&spec) {
                prop_assert!(form.projective_residual().is_zero());
                prop_assert!(form.saturate().unwrap().projective_residual().is_zero());
            }
        }
        if let Ok(x) = AffineVectorField::planar(p, q) {
            if let Ok(form) = projectivize(&x) {
                prop_assert!(form.projective_residual().is_zero());
            }
        }
        let hl = MultiPoly::from_terms(
            Arity::Affine,
            [(Monomial([1, 0, 0]), h[0].into()), (Monomial([0, 1, 0]), h[1].into()), (Monomial([0, 0, 0]), h[2].into())],
        );
        if let Ok(sys) = eee_system(&g, &hl, &a, &GaussianRational::from_int(1)) {
            let form = projectivize(&sys.field).map_err(|e| TestCaseError::fail(e.to_string()))?;
            prop_assert!(form.projective_residual().is_zero());
        }
        Ok(())
    })
}

/// Branches through a point satisfy the curve in every chart and agree on
/// the base point and their number.
pub fn branch_pullback() -> Result<u32, String> {
    let strat = (point_nonzero(), 2u32..=3, prop::collection::vec(-3i64..=3, 10), prop::array::uniform3(-2i64..=2), 6usize..=10);
    run(CASES, strat, |(p, d, gc, lc, n)| {
        let l = linear(lc);
        prop_assume!(!is_zero(&eval_at(&l, &p)));
        let f = through(&form_of_degree(d, &gc), &l, &p);
        prop_assume!(!f.is_constant());
        let mut counts = Vec::new();
        for chart in charts() {
            let branches = match local_branches_in(&f, &p, &chart, n) {
                Ok(b) => b,
                Err(_) => return Err(TestCaseError::reject("not squarefree or unsupported singularity")),
            };
            let g = chart.pull_curve(&f);
            let (u0, v0) = chart.local_coords(&p).unwrap();
            for b in &branches {
                prop_assert!(Series::compose(&g, &b.phi1, &b.phi2).is_zero());
                prop_assert_eq!(b.phi1.coeff(0), u0.clone());
                prop_assert_eq!(b.phi2.coeff(0), v0.clone());
                prop_assert_eq!(chart.point(&b.phi1.coeff(0), &b.phi2.coeff(0)), p.clone());
                prop_assert!(!(b.phi1.sub(&Series::constant(u0.clone(), n)).is_zero() && b.phi2.sub(&Series::constant(v0.clone(), n)).is_zero()));
            }
            counts.push(branches.len());
        }
        prop_assert!(counts.windows(2).all(|w| w[0] == w[1]), "branch counts differ across charts: {:?}", counts);
        Ok(())
    })
}

/// Logarithmic foliation with a conic and a line through `p` plus a free line.
fn conic_foliation(
    p: &ProjectivePoint,
    gc: &[i64],
    lc: [i64; 3],
    qc: [i64; 3],
    mc: [i64; 3],
    w1: &GaussianRational,
    w2: &GaussianRational,
) -> Result<(folia::field::ProjectiveOneForm, MultiPoly), TestCaseError> {
    let l = linear(lc);
    if is_zero(&eval_at(&l, p)) {
        return Err(TestCaseError::reject("auxiliary line through p"));
    }
    let conic = through(&form_of_degree(2, gc), &l, p);
    // line through p and q
    let pc = p.coords();
    let q: Vec<GaussianRational> = qc.iter().map(|&v| GaussianRational::from_int(v)).collect();
    let cross = [
        &(&pc[1] * &q[2]) - &(&pc[2] * &q[1]),
        &(&pc[2] * &q[0]) - &(&pc[0] * &q[2]),
        &(&pc[0] * &q[1]) - &(&pc[1] * &q[0]),
    ];
    let line = MultiPoly::from_terms(
        Arity::Projective,
        (0..3).map(|k| (Monomial::var(k, 1), cross[k].clone())),
    );
    let w3 = -(&(w1 + w1) + w2);
    if is_zero(&w3) || line.is_zero() {
        return Err(TestCaseError::reject("degenerate data"));
    }
    let spec = LogarithmicSpec::new(vec![conic.clone(), line, linear(mc)], vec![w1.clone(), w2.clone(), w3])
        .map_err(|_| TestCaseError::reject("invalid spec"))?;
    let form = logarithmic_form(&spec).map_err(|_| TestCaseError::reject("form not constructed"))?;
    Ok((form, conic))
}

fn conic_strategy() -> impl Strategy<Value = (ProjectivePoint, Vec<i64>, [i64; 3], [i64; 3], [i64; 3], GaussianRational, GaussianRational)> {
    let lin = || prop::array::uniform3(-3i64..=3);
    (point_nonzero(), prop::collection::vec(-3i64..=3, 6), lin(), lin(), lin(), nonzero_gr(), nonzero_gr())
}

pub fn chart_independence() -> Result<u32, String> {
    run(CASES, conic_strategy(), |(p, gc, lc, qc, mc, w1, w2)| {
        let (form, conic) = conic_foliation(&p, &gc, lc, qc, mc, &w1, &w2)?;
        let mut seen: Vec<Vec<usize>> = Vec::new();
        for chart in charts() {
            let ms = certified_multiplicities(&form, &conic, &p, &chart, 8)
                .map_err(|_| TestCaseError::reject("branch computation unsupported"))?;
            prop_assume!(ms.iter().all(|m| m.certified));
            let mut mus: Vec<usize> = ms.iter().map(|m| m.mu).collect();
            mus.sort_unstable();
            seen.push(mus);
        }
        prop_assert!(seen.windows(2).all(|w| w[0] == w[1]), "mu differs across charts: {:?}", seen);
        Ok(())
    })
}

pub fn truncation_stability() -> Result<u32, String> {
    run(CASES, (conic_strategy(), 4usize..=8), |((p, gc, lc, qc, mc, w1, w2), n)| {
        let (form, conic) = conic_foliation(&p, &gc, lc, qc, mc, &w1, &w2)?;
        let chart = p.standard_chart();
        let at = |n: usize| -> Result<Vec<folia::branches::BranchMultiplicity>, TestCaseError> {
            let bs = local_branches_in(&conic, &p, &chart, n).map_err(|_| TestCaseError::reject("unsupported"))?;
            bs.iter().map(|b| branch_multiplicity(&form, b).map_err(|e| TestCaseError::fail(e.to_string()))).collect()
        };
        let lo = at(n)?;
        let hi = at(2 * n)?;
        prop_assert_eq!(lo.len(), hi.len());
        for (a, b) in lo.iter().zip(&hi) {
            if a.certified {
                prop_assert!(b.certified);
                prop_assert_eq!(a.mu, b.mu);
            } else {
                prop_assert!(a.mu <= b.mu);
            }
        }
        Ok(())
    })
}

fn circle(cx: (i64, i64), cy: (i64, i64), r: (i64, i64)) -> MultiPoly {
    let x = MultiPoly::var(Arity::Affine, 0);
    let y = MultiPoly::var(Arity::Affine, 1);
    let c = |v: (i64, i64)| MultiPoly::constant(Arity::Affine, GaussianRational::from_ratio(v.0, v.1));
    let dx = &x - &c(cx);
    let dy = &y - &c(cy);
    let r2 = c(r);
    &(&(&dx * &dx) + &(&dy * &dy)) - &(&r2 * &r2)
}

/// Unions of disjoint circles; doubling the grid never loses a certificate.
pub fn monotone_oval_count() -> Result<u32, String> {
    let one = (-9i64..=9, -9i64..=9, 2i64..=7);
    let strat = (prop::collection::vec(one, 1..=3), prop_oneof![Just(20usize), Just(28), Just(36)]);
    run(CASES, strat, |(cs, res)| {
        let circles: Vec<((i64, i64), (i64, i64), (i64, i64))> =
            cs.iter().map(|&(a, b, r)| ((a, 3), (b, 3), (r, 5))).collect();
        for i in 0..circles.len() {
            for j in i + 1..circles.len() {
                let (a, b) = (&circles[i], &circles[j]);
                let d = (((a.0 .0 - b.0 .0) as f64 / 3.0).powi(2) + ((a.1 .0 - b.1 .0) as f64 / 3.0).powi(2)).sqrt();
                let (ra, rb) = (a.2 .0 as f64 / 5.0, b.2 .0 as f64 / 5.0);
                prop_assume!(d > ra + rb + 0.2 || d < (ra - rb).abs() - 0.2);
            }
        }
        let f = circles.iter().fold(MultiPoly::one(Arity::Affine), |acc, &(a, b, r)| &acc * &circle(a, b, r));
        let rect = Rect::symmetric_int(5);
        let coarse = count_ovals(&f, &rect, res).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let fine = count_ovals(&f, &rect, 2 * res).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert!(fine.certified_count() >= coarse.certified_count(), "{} -> {}", coarse.certified_count(), fine.certified_count());
        prop_assert!(fine.certified_count() <= circles.len());
        Ok(())
    })
}
