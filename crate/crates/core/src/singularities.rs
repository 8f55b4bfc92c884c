//! Singular points of foliations and curves, the dicritical classifier and
//! the nodality test.

use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::field::{projectivize, AffineVectorField, FieldError, ProjectiveOneForm};
use crate::polyring::{is_squarefree, rational_sqrt, Arity, GaussianRational, MultiPoly, PolyError};
use crate::projective::{translate, Chart, ProjectivePoint};
use crate::solve::{solve_affine, solve_at_infinity, solve_projective, ProjectiveSolution, SolveError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("curve is not squarefree; pass its reduced equation")]
    NotSquarefree,
    #[error("{0} is not a singular point")]
    NotSingular(ProjectivePoint),
    #[error("{point} is not in chart {chart}")]
    NotInChart { point: ProjectivePoint, chart: String },
    #[error("{0} is not on the curve")]
    NotOnCurve(ProjectivePoint),
    #[error("unsupported branch structure at {point}: {reason}")]
    Unsupported { point: ProjectivePoint, reason: String },
    #[error("the curve is not invariant by the foliation")]
    NotInvariant,
    #[error("the curve does not meet the line at infinity transversally at {0}")]
    NonTransversal(ProjectivePoint),
    #[error("the curve does not meet the line at infinity transversally")]
    InfinityNotTransversal,
    #[error("expected a point on the line at infinity, got {0}")]
    NotAtInfinity(ProjectivePoint),
    #[error("this route requires r = 0 (line at infinity invariant)")]
    NonPlanarField,
    #[error("curve is not nodal")]
    NotNodal,
    #[error("curve is not smooth")]
    NotSmooth,
    #[error("could not decide: {0} zero(s) outside Q(i)")]
    Undecided(usize),
    #[error("component {index} has negative arithmetic genus; it is reducible")]
    Reducible { index: usize },
}

/// Saturated projective foliation of an affine field.
pub fn foliation_of(field: &AffineVectorField) -> Result<ProjectiveOneForm, FieldError> {
    projectivize(field)?.saturate()
}

/// Singular points of the field in the affine plane.
pub fn affine_singularities(field: &AffineVectorField) -> Result<ProjectiveSolution, GeometryError> {
    let sol = solve_affine(&[field.x_component(), field.y_component()])?;
    Ok(ProjectiveSolution {
        points: sol.points.into_iter().map(|(x, y)| ProjectivePoint::affine(x, y)).collect(),
        residual: sol.residual,
    })
}

/// Common zeros of `P, Q, R` on `Z = 0`.
pub fn infinite_singularities(form: &ProjectiveOneForm) -> Result<ProjectiveSolution, GeometryError> {
    let c: Vec<MultiPoly> = form.coefficients().into_iter().cloned().collect();
    Ok(solve_at_infinity(&c)?)
}

/// All singular points of the (saturated) foliation in ℂP².
pub fn foliation_singularities(form: &ProjectiveOneForm) -> Result<ProjectiveSolution, GeometryError> {
    let sat = form.saturate()?;
    let c: Vec<MultiPoly> = sat.coefficients().into_iter().cloned().collect();
    Ok(solve_projective(&c)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    NonDicritical,
    Dicritical,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum VerdictReason {
    /// `λ₁λ₂ ≠ 0` and `λ₁/λ₂ ∉ ℚ_{>0}`.
    RatioNotPositiveRational,
    /// Jacobian is a nonzero multiple of the identity.
    StarNode,
    /// Eigenvalue ratio in `ℚ_{>0}` but not a star node.
    PositiveRationalRatio,
    /// Exactly one zero eigenvalue.
    ZeroEigenvalue,
    /// Nonzero nilpotent Jacobian.
    Nilpotent,
    ZeroLinearPart,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingularityRecord {
    pub point: ProjectivePoint,
    pub chart: String,
    #[serde(serialize_with = "ser_matrix")]
    pub jacobian: [[GaussianRational; 2]; 2],
    pub verdict: Verdict,
    pub verdict_reason: VerdictReason,
}

fn ser_matrix<S: serde::Serializer>(m: &[[GaussianRational; 2]; 2], s: S) -> Result<S::Ok, S::Error> {
    let rows: Vec<Vec<String>> = m.iter().map(|r| r.iter().map(|c| c.to_string()).collect()).collect();
    serde::Serialize::serialize(&rows, s)
}

/// Classifies `p` in its standard chart.
pub fn classify_dicritical(form: &ProjectiveOneForm, p: &ProjectivePoint) -> Result<SingularityRecord, GeometryError> {
    classify_dicritical_in(form, p, &p.standard_chart())
}

pub fn classify_dicritical_in(
    form: &ProjectiveOneForm,
    p: &ProjectivePoint,
    chart: &Chart,
) -> Result<SingularityRecord, GeometryError> {
    let (u0, v0) = chart
        .local_coords(p)
        .ok_or_else(|| GeometryError::NotInChart { point: p.clone(), chart: chart.name().to_string() })?;
    let (a, b) = chart.local_field(&form.saturate()?)?;
    let at = [u0, v0];
    if !a.eval(&at).is_zero() || !b.eval(&at).is_zero() {
        return Err(GeometryError::NotSingular(p.clone()));
    }
    let j = [
        [a.partial(0).eval(&at), a.partial(1).eval(&at)],
        [b.partial(0).eval(&at), b.partial(1).eval(&at)],
    ];
    let (verdict, reason) = eigen_verdict(&j);
    Ok(SingularityRecord {
        point: p.clone(),
        chart: chart.name().to_string(),
        jacobian: j,
        verdict,
        verdict_reason: reason,
    })
}

fn eigen_verdict(j: &[[GaussianRational; 2]; 2]) -> (Verdict, VerdictReason) {
    let tr = &j[0][0] + &j[1][1];
    let det = &(&j[0][0] * &j[1][1]) - &(&j[0][1] * &j[1][0]);
    if det.is_zero() {
        let reason = if !tr.is_zero() {
            VerdictReason::ZeroEigenvalue
        } else if j.iter().flatten().all(Zero::is_zero) {
            VerdictReason::ZeroLinearPart
        } else {
            VerdictReason::Nilpotent
        };
        return (Verdict::Unknown, reason);
    }
    if j[0][1].is_zero() && j[1][0].is_zero() && j[0][0] == j[1][1] {
        return (Verdict::Dicritical, VerdictReason::StarNode);
    }
    if ratio_is_positive_rational(&tr, &det) {
        (Verdict::Unknown, VerdictReason::PositiveRationalRatio)
    } else {
        (Verdict::NonDicritical, VerdictReason::RatioNotPositiveRational)
    }
}

/// With `s = tr²/det = ρ + 2 + 1/ρ` for the ratio `ρ = λ₁/λ₂`: `ρ ∈ ℚ_{>0}`
/// iff `s ∈ ℚ`, `s ≥ 4` and `s(s − 4)` is a rational square.
fn ratio_is_positive_rational(tr: &GaussianRational, det: &GaussianRational) -> bool {
    let s = (tr * tr).checked_div(det).expect("det ≠ 0");
    if !s.is_real() {
        return false;
    }
    let s = s.re;
    let four = num_rational::BigRational::from_integer(num_bigint::BigInt::from(4));
    s >= four && rational_sqrt(&(&s * &(&s - &four))).is_some()
}

/// A singular point of a curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveSingularity {
    pub point: ProjectivePoint,
    pub order: u32,
    pub is_node: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveSingularities {
    pub points: Vec<CurveSingularity>,
    pub residual: usize,
}

/// Projective closure of a curve given affinely, or the curve itself.
pub fn closure(f: &MultiPoly) -> Result<MultiPoly, PolyError> {
    match f.arity() {
        Arity::Projective if f.is_homogeneous() => Ok(f.clone()),
        Arity::Projective => Err(PolyError::WrongArity { expected: Arity::Affine }),
        Arity::Affine => f.homogenize(f.degree().ok_or(PolyError::ZeroPolynomial)?),
    }
}

/// Local equation of the curve at `p`, translated so `p` is the origin.
pub(crate) fn local_equation(big_f: &MultiPoly, p: &ProjectivePoint, chart: &Chart) -> Result<MultiPoly, GeometryError> {
    let (u0, v0) = chart
        .local_coords(p)
        .ok_or_else(|| GeometryError::NotInChart { point: p.clone(), chart: chart.name().to_string() })?;
    Ok(translate(&chart.pull_curve(big_f), &u0, &v0))
}

/// `(ν, is_node)` for the local equation `g` at the origin.
pub(crate) fn local_order(g: &MultiPoly) -> (u32, bool) {
    let nu = g.terms().map(|(m, _)| m.degree()).min().unwrap_or(0);
    if nu != 2 {
        return (nu, false);
    }
    let c = |e: [u32; 2]| g.coeff(&crate::polyring::Monomial([e[0], e[1], 0]));
    let (a, b, cc) = (c([2, 0]), c([1, 1]), c([0, 2]));
    let disc = &(&b * &b) - &(&GaussianRational::from_int(4) * &(&a * &cc));
    (2, !disc.is_zero())
}

/// Points where `f = f_x = f_y = 0` (and on `Z = 0` when requested).
pub fn curve_singularities(f: &MultiPoly, include_infinity: bool) -> Result<CurveSingularities, GeometryError> {
    let big_f = closure(f)?;
    if !is_squarefree(&big_f)? {
        return Err(GeometryError::NotSquarefree);
    }
    let aff = big_f.dehomogenize()?;
    let sol = solve_affine(&[aff.clone(), aff.partial(0), aff.partial(1)])?;
    let mut points: Vec<ProjectivePoint> = sol.points.into_iter().map(|(x, y)| ProjectivePoint::affine(x, y)).collect();
    let mut residual = sol.residual;
    if include_infinity && big_f.degree().unwrap_or(0) > 0 {
        let grads: Vec<MultiPoly> = (0..3).map(|k| big_f.partial(k)).collect();
        let inf = solve_at_infinity(&grads)?;
        points.extend(inf.points);
        residual += inf.residual;
    }
    let mut out = Vec::new();
    for p in points {
        let g = local_equation(&big_f, &p, &p.standard_chart())?;
        let (order, is_node) = local_order(&g);
        out.push(CurveSingularity { point: p, order, is_node });
    }
    Ok(CurveSingularities { points: out, residual })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Nodality {
    Nodal,
    NotNodal,
    Unknown,
}

/// Nodality of the curve; with `include_infinity` the closure must also
/// cross `Z = 0` transversally, so that the curve together with the line at
/// infinity is nodal.
pub fn is_nodal(f: &MultiPoly, include_infinity: bool) -> Result<Nodality, GeometryError> {
    let sing = curve_singularities(f, include_infinity)?;
    if sing.points.iter().any(|s| !s.is_node) {
        return Ok(Nodality::NotNodal);
    }
    if include_infinity && !meets_infinity_transversally(&closure(f)?)? {
        return Ok(Nodality::NotNodal);
    }
    if sing.residual > 0 {
        return Ok(Nodality::Unknown);
    }
    Ok(Nodality::Nodal)
}

/// True iff `F(X, Y, 0)` has degree `deg F` and no repeated linear factor.
pub fn meets_infinity_transversally(big_f: &MultiPoly) -> Result<bool, GeometryError> {
    let at_inf = big_f.substitute(2, &GaussianRational::zero());
    if at_inf.is_zero() {
        return Ok(false);
    }
    if at_inf.is_constant() {
        return Ok(true);
    }
    Ok(is_squarefree(&at_inf)?)
}

/// Points where the closure meets the line at infinity.
pub fn infinity_points(big_f: &MultiPoly) -> Result<ProjectiveSolution, GeometryError> {
    Ok(solve_at_infinity(std::slice::from_ref(big_f))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textio::parse_poly;

    fn a(s: &str) -> MultiPoly {
        parse_poly(s, Arity::Affine).unwrap()
    }
    fn field(p: &str, q: &str) -> AffineVectorField {
        AffineVectorField::planar(a(p), a(q)).unwrap()
    }

    #[test]
    fn rotation_singularities() {
        let rot = field("-y", "x");
        let s = affine_singularities(&rot).unwrap();
        assert_eq!(s.points, vec![ProjectivePoint::from_ints(0, 0, 1).unwrap()]);
        let inf = infinite_singularities(&projectivize(&rot).unwrap()).unwrap();
        assert_eq!(inf.points.len(), 2);
        let s = affine_singularities(&field("x^2 - 1", "y")).unwrap();
        assert_eq!(s.points.len(), 2);
        assert_eq!(s.residual, 0);
    }

    #[test]
    fn dicritical_verdicts() {
        let o = ProjectivePoint::from_ints(0, 0, 1).unwrap();
        let star = foliation_of(&field("x", "y")).unwrap();
        assert_eq!(classify_dicritical(&star, &o).unwrap().verdict, Verdict::Dicritical);
        let saddle = foliation_of(&field("x", "-y")).unwrap();
        assert_eq!(classify_dicritical(&saddle, &o).unwrap().verdict, Verdict::NonDicritical);
        let node = foliation_of(&field("x", "2*y")).unwrap();
        assert_eq!(classify_dicritical(&node, &o).unwrap().verdict, Verdict::Unknown);
        let focus = foliation_of(&field("x - y", "x + y")).unwrap();
        assert_eq!(classify_dicritical(&focus, &o).unwrap().verdict, Verdict::NonDicritical);
        let p = ProjectivePoint::from_ints(1, 1, 1).unwrap();
        assert!(matches!(classify_dicritical(&saddle, &p), Err(GeometryError::NotSingular(_))));
    }

    #[test]
    fn curve_nodes() {
        let s = curve_singularities(&a("y^2 - x^2*(x + 1)"), false).unwrap();
        assert_eq!(s.points.len(), 1);
        assert_eq!(s.points[0].order, 2);
        assert!(s.points[0].is_node);
        let s = curve_singularities(&a("y^2 - x^3"), false).unwrap();
        assert!(!s.points[0].is_node);
        assert_eq!(is_nodal(&a("x^2 + y^2 - 1"), true).unwrap(), Nodality::Nodal);
        assert_eq!(is_nodal(&a("y^2 - x^3"), false).unwrap(), Nodality::NotNodal);
        // parabola is tangent to the line at infinity
        assert_eq!(is_nodal(&a("y - x^2"), false).unwrap(), Nodality::Nodal);
        assert_eq!(is_nodal(&a("y - x^2"), true).unwrap(), Nodality::NotNodal);
        assert!(matches!(curve_singularities(&a("(x - y)^2"), false), Err(GeometryError::NotSquarefree)));
    }
}
