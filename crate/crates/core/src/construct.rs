//! Logarithmic foliations, the limit-cycle system with a prescribed
//! invariant curve, and the fixture gallery.

use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::field::{
    iif_check, infinity_invariant, invariance_check, AffineVectorField, CofactorCertificate, FieldError, Invariance,
    ProjectiveOneForm,
};
use crate::polyring::{is_squarefree, Arity, GaussianRational, MultiPoly, PolyError};
use crate::singularities::GeometryError;
use crate::textio::{parse_poly, SystemDocument, TextError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConstructError {
    #[error("need at least {min} curves, got {got}")]
    TooFewCurves { min: usize, got: usize },
    #[error("{curves} curves but {weights} weights")]
    LengthMismatch { curves: usize, weights: usize },
    #[error("weight {0} is zero")]
    ZeroWeight(usize),
    #[error("weights violate sum of lambda_i * deg F_i = 0 (sum is {0})")]
    WeightSum(GaussianRational),
    #[error("curve {0} is not a nonzero homogeneous polynomial")]
    NotHomogeneous(usize),
    #[error("curve {0} is not squarefree")]
    NotSquarefree(usize),
    #[error("curve {0} is not invariant by the constructed form")]
    NotInvariant(usize),
    #[error("h must have degree exactly 1")]
    NotLinear,
    #[error("a*h_x + b*h_y = 0")]
    Degenerate,
    #[error("unknown gallery entry `{0}`; known: {1}")]
    UnknownFixture(String, String),
    #[error("m must be at least 1")]
    BadDegree,
    #[error("could not place curves in general position")]
    GeneralPosition,
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Text(#[from] TextError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Curves `Fᵢ` and weights `λᵢ` of `ω* = Σ λⱼ (Π_{i≠j} Fᵢ) dFⱼ`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogarithmicSpec {
    pub curves: Vec<MultiPoly>,
    pub weights: Vec<GaussianRational>,
}

impl LogarithmicSpec {
    pub fn new(curves: Vec<MultiPoly>, weights: Vec<GaussianRational>) -> Result<Self, ConstructError> {
        if curves.len() < 2 {
            return Err(ConstructError::TooFewCurves { min: 2, got: curves.len() });
        }
        if curves.len() != weights.len() {
            return Err(ConstructError::LengthMismatch { curves: curves.len(), weights: weights.len() });
        }
        if let Some(i) = weights.iter().position(Zero::is_zero) {
            return Err(ConstructError::ZeroWeight(i));
        }
        for (i, c) in curves.iter().enumerate() {
            if c.arity() != Arity::Projective || c.is_zero() || c.is_constant() || !c.is_homogeneous() {
                return Err(ConstructError::NotHomogeneous(i));
            }
            if !is_squarefree(c)? {
                return Err(ConstructError::NotSquarefree(i));
            }
        }
        let mut sum = GaussianRational::zero();
        for (c, w) in curves.iter().zip(&weights) {
            sum += &(w * &GaussianRational::from_int(c.degree().unwrap() as i64));
        }
        if !sum.is_zero() {
            return Err(ConstructError::WeightSum(sum));
        }
        Ok(Self { curves, weights })
    }

    /// Affine equations `fᵢ = Fᵢ(x, y, 1)`.
    pub fn affine_curves(&self) -> Vec<MultiPoly> {
        self.curves.iter().map(|c| c.dehomogenize().expect("projective")).collect()
    }
}

/// Expands `ω*`. The projective condition and the invariance of every `Fᵢ`
/// are checked on the result.
pub fn logarithmic_form(spec: &LogarithmicSpec) -> Result<ProjectiveOneForm, ConstructError> {
    let k = spec.curves.len();
    let mut coeffs = [0, 1, 2].map(|_| MultiPoly::zero(Arity::Projective));
    for j in 0..k {
        let mut others = MultiPoly::one(Arity::Projective);
        for (i, c) in spec.curves.iter().enumerate() {
            if i != j {
                others = &others * c;
            }
        }
        let weighted = others.scale(&spec.weights[j]);
        for (v, coeff) in coeffs.iter_mut().enumerate() {
            *coeff = &*coeff + &(&weighted * &spec.curves[j].partial(v));
        }
    }
    let [p, q, r] = coeffs;
    let form = ProjectiveOneForm::new(p, q, r)?;
    assert!(form.projective_residual().is_zero());
    let field = form.affine_field()?;
    for (i, f) in spec.affine_curves().iter().enumerate() {
        if f.is_constant() {
            continue;
        }
        if let Invariance::NotInvariant = invariance_check(&field, f)? {
            return Err(ConstructError::NotInvariant(i));
        }
    }
    Ok(form)
}

/// `Π fᵢ` is an inverse integrating factor of the affine field of `ω*`.
pub fn logarithmic_iif(spec: &LogarithmicSpec, form: &ProjectiveOneForm) -> Result<bool, ConstructError> {
    let v = spec
        .affine_curves()
        .iter()
        .fold(MultiPoly::one(Arity::Affine), |acc, f| &acc * f);
    Ok(iif_check(&form.affine_field()?, &v)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RatioStatus {
    Satisfied,
    Violated,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioPair {
    pub i: usize,
    pub j: usize,
    pub ratio: String,
    pub status: RatioStatus,
}

/// For each pair, whether `λᵢ/λⱼ` is a negative rational (violated).
pub fn ratio_condition_report(weights: &[GaussianRational]) -> Result<Vec<RatioPair>, ConstructError> {
    if let Some(i) = weights.iter().position(Zero::is_zero) {
        return Err(ConstructError::ZeroWeight(i));
    }
    let mut out = Vec::new();
    for i in 0..weights.len() {
        for j in i + 1..weights.len() {
            let r = weights[i].checked_div(&weights[j]).expect("nonzero");
            let violated = r.is_real() && r.re < num_rational::BigRational::zero();
            out.push(RatioPair {
                i,
                j,
                ratio: r.to_string(),
                status: if violated { RatioStatus::Violated } else { RatioStatus::Satisfied },
            });
        }
    }
    Ok(out)
}

/// The field `ẋ = a g − h g_y`, `ẏ = b g + h g_x` with its certificate for `g`.
#[derive(Debug, Clone, PartialEq)]
pub struct EeeSystem {
    pub field: AffineVectorField,
    pub certificate: CofactorCertificate,
    pub warnings: Vec<String>,
}

pub fn eee_system(
    g: &MultiPoly,
    h: &MultiPoly,
    a: &GaussianRational,
    b: &GaussianRational,
) -> Result<EeeSystem, ConstructError> {
    if h.degree() != Some(1) {
        return Err(ConstructError::NotLinear);
    }
    let hx = h.partial(0).constant_term();
    let hy = h.partial(1).constant_term();
    if (&(a * &hx) + &(b * &hy)).is_zero() {
        return Err(ConstructError::Degenerate);
    }
    let (gx, gy) = (g.partial(0), g.partial(1));
    let p = &g.scale(a) - &(h * &gy);
    let q = &g.scale(b) + &(h * &gx);
    let field = AffineVectorField::planar(p, q)?;
    let certificate = invariance_check(&field, g)?.certificate().ok_or(ConstructError::NotInvariant(0))?;
    assert_eq!(certificate.cofactor, &gx.scale(a) + &gy.scale(b));
    let mut warnings = Vec::new();
    if !(a.is_real() && b.is_real() && g.has_real_coefficients() && h.has_real_coefficients()) {
        warnings.push("non-real data: the system has no planar dynamical interpretation".into());
    }
    Ok(EeeSystem { field, certificate, warnings })
}

/// A named gallery entry.
#[derive(Debug, Clone, PartialEq)]
pub struct Fixture {
    pub name: String,
    pub description: String,
    pub document: SystemDocument,
    /// Statements the source makes about the fixture, recorded verbatim in
    /// spirit and not asserted.
    pub notes: Vec<String>,
}

pub const GALLERY: &[&str] =
    &["example1", "example2", "example3", "three-lines", "circle", "nodal-cubic", "quartic-4-ovals"];

fn hp(s: &str) -> MultiPoly {
    parse_poly(s, Arity::Projective).expect("fixture")
}

fn ap(s: &str) -> MultiPoly {
    parse_poly(s, Arity::Affine).expect("fixture")
}

/// Four-oval quartic: two crossing ellipses, smoothed into the four lunes.
pub fn quartic_four_ovals() -> MultiPoly {
    ap("(x^2 + 2*y^2 - 1)*(2*x^2 + y^2 - 1) + 1/100")
}

/// `α YZ dX + β XZ dY − (α+β) XY dZ` with the invariant line `X = 0`.
pub fn example1(alpha: &GaussianRational, beta: &GaussianRational) -> Result<Fixture, ConstructError> {
    let spec = LogarithmicSpec::new(
        vec![hp("X"), hp("Y"), hp("Z")],
        vec![alpha.clone(), beta.clone(), -&(alpha + beta)],
    )?;
    let form = logarithmic_form(&spec)?;
    let mut doc = SystemDocument::default();
    doc.add_form("F1", form)?;
    doc.add_curve("S", hp("X"), vec![])?;
    doc.add_param("alpha", alpha.clone())?;
    doc.add_param("beta", beta.clone())?;
    Ok(Fixture {
        name: "example1".into(),
        description: "degree-1 foliation with invariant line X = 0; singular points (0:1:0), (0:0:1) on it".into(),
        document: doc,
        notes: vec!["alpha/beta not real makes every singularity non-dicritical".into()],
    })
}

fn example_form(name: &str, p: &str, q: &str, r: &str, notes: Vec<String>) -> Result<Fixture, ConstructError> {
    let mut doc = SystemDocument::default();
    doc.add_form("F", ProjectiveOneForm::new(hp(p), hp(q), hp(r))?)?;
    doc.add_curve("S", hp("X"), vec![])?;
    Ok(Fixture {
        name: name.into(),
        description: "foliation with invariant line X = 0 through (0:1:0) and (0:0:1)".into(),
        document: doc,
        notes,
    })
}

fn circle_fixture() -> Result<Fixture, ConstructError> {
    let g = ap("x^2 + y^2 - 1");
    let one = GaussianRational::one();
    let sys = eee_system(&g, &ap("x - 2"), &one, &one)?;
    let mut doc = SystemDocument::default();
    doc.add_field("X", sys.field)?;
    doc.add_curve("circle", g, vec![])?;
    Ok(Fixture {
        name: "circle".into(),
        description: "unit circle as the algebraic limit cycle of the system with h = x - 2, a = b = 1".into(),
        document: doc,
        notes: vec![],
    })
}

fn quartic_fixture() -> Result<Fixture, ConstructError> {
    let g = quartic_four_ovals();
    let one = GaussianRational::one();
    let sys = eee_system(&g, &ap("x - 2"), &one, &one)?;
    let mut doc = SystemDocument::default();
    doc.add_field("X", sys.field)?;
    doc.add_curve("quartic", g, vec![])?;
    doc.add_param("eps", GaussianRational::from_ratio(1, 100))?;
    Ok(Fixture {
        name: "quartic-4-ovals".into(),
        description: "(x^2 + 2y^2 - 1)(2x^2 + y^2 - 1) + eps with four ovals, each a limit cycle of the system with h = x - 2, a = b = 1".into(),
        document: doc,
        notes: vec!["the opposite sign of eps gives two nested ovals instead of four".into()],
    })
}

/// Builds a gallery entry by name.
pub fn gallery(name: &str) -> Result<Fixture, ConstructError> {
    match name {
        "example1" => example1(&GaussianRational::one(), &GaussianRational::i()),
        "example2" => example_form(
            "example2",
            "(2*Y*Z - X^2)*Z",
            "X*(Y + Z)*Z",
            "X^3 - X*Y^2 - 3*X*Y*Z",
            vec![
                "stated: P1 and P2 are both non-dicritical".into(),
                "also stated: P1 and P2 are respectively dicritical and nondicritical".into(),
            ],
        ),
        "example3" => example_form(
            "example3",
            "(X^3 - 2*Y^2*Z)*Z",
            "-X*(Y^2 + Z^2)*Z",
            "-(X^4 - 2*X*Y^2*Z - X*Y*Z^2 - X*Y^3)",
            vec![
                "stated: only non-dicritical singularities on X = 0".into(),
                "also stated: P1 and P2 are both dicritical (saddle nodes)".into(),
            ],
        ),
        "three-lines" => {
            let weights = vec![GaussianRational::one(), GaussianRational::i(), -&(GaussianRational::one() + GaussianRational::i())];
            let spec = LogarithmicSpec::new(vec![hp("X"), hp("Y"), hp("Y - X - Z")], weights.clone())?;
            let form = logarithmic_form(&spec)?;
            let mut doc = SystemDocument::default();
            doc.add_form("F", form)?;
            doc.add_curve("L1", hp("X"), vec![])?;
            doc.add_curve("L2", hp("Y"), vec![])?;
            doc.add_curve("L3", hp("Y - X - Z"), vec![])?;
            doc.add_curve("S", hp("X*Y*(Y - X - Z)"), vec!["L1".into(), "L2".into(), "L3".into()])?;
            for (k, w) in weights.into_iter().enumerate() {
                doc.add_param(&format!("lambda{}", k + 1), w)?;
            }
            Ok(Fixture {
                name: "three-lines".into(),
                description: "logarithmic degree-1 foliation with invariant lines X, Y, Y - X - Z".into(),
                document: doc,
                notes: vec![
                    "ratio condition used: lambda_i/lambda_j not a negative rational".into(),
                    "the source's closing sentence asks for non-negative rational ratios instead".into(),
                ],
            })
        }
        "circle" => circle_fixture(),
        "nodal-cubic" => {
            let mut doc = SystemDocument::default();
            doc.add_curve("S", ap("y^2 - x^2*(x + 1)"), vec![])?;
            Ok(Fixture {
                name: "nodal-cubic".into(),
                description: "cubic with one node at the origin; genus 0".into(),
                document: doc,
                notes: vec![],
            })
        }
        "quartic-4-ovals" => quartic_fixture(),
        other => Err(ConstructError::UnknownFixture(other.into(), GALLERY.join(", "))),
    }
}

/// A point of the unit circle from the rational parameter `s`.
fn circle_point(s: i64) -> [GaussianRational; 2] {
    let d = 1 + s * s;
    [GaussianRational::from_ratio(1 - s * s, d), GaussianRational::from_ratio(2 * s, d)]
}

/// Coefficients `(a, b, c)` of the line `aX + bY + cZ` through two points.
fn line_through(p: &[GaussianRational; 2], q: &[GaussianRational; 2]) -> [GaussianRational; 3] {
    [&q[1] - &p[1], &p[0] - &q[0], &(&q[0] * &p[1]) - &(&p[0] * &q[1])]
}

fn det3(a: &[GaussianRational; 3], b: &[GaussianRational; 3], c: &[GaussianRational; 3]) -> GaussianRational {
    let minor = |i: usize, j: usize| &(&b[i] * &c[j]) - &(&b[j] * &c[i]);
    &(&(&a[0] * &minor(1, 2)) - &(&a[1] * &minor(0, 2))) + &(&a[2] * &minor(0, 1))
}

fn line_poly(l: &[GaussianRational; 3]) -> MultiPoly {
    (0..3).fold(MultiPoly::zero(Arity::Projective), |acc, k| &acc + &MultiPoly::var(Arity::Projective, k).scale(&l[k]))
}

/// Logarithmic foliation of degree `m` whose invariant curves have total
/// degree `m + 2`: three lines for `m = 1`, otherwise the unit circle and
/// `m` chords with pairwise distinct endpoints. The line at infinity is not
/// invariant.
///
/// Distinct endpoints make every chord cross the circle transversally and
/// keep line intersections off the circle, so the union is nodal exactly
/// when no three lines are concurrent (points at infinity included).
pub fn thm2b(m: u32) -> Result<(LogarithmicSpec, ProjectiveOneForm), ConstructError> {
    if m == 0 {
        return Err(ConstructError::BadDegree);
    }
    let nlines = if m == 1 { 3 } else { m as usize };
    'shift: for shift in 0..8i64 {
        let lines: Vec<[GaussianRational; 3]> = (0..nlines as i64)
            .map(|j| line_through(&circle_point(3 * j + shift), &circle_point(3 * j + 1 + shift)))
            .collect();
        for a in 0..nlines {
            for b in a + 1..nlines {
                for c in b + 1..nlines {
                    if det3(&lines[a], &lines[b], &lines[c]).is_zero() {
                        continue 'shift;
                    }
                }
            }
        }
        let mut curves: Vec<MultiPoly> = if m == 1 { vec![] } else { vec![hp("X^2 + Y^2 - Z^2")] };
        curves.extend(lines.iter().map(line_poly));
        let k = curves.len();
        let mut weights: Vec<GaussianRational> =
            (0..k - 1).map(|j| GaussianRational::from_parts((1, 1), ((j as i64 + 1) * (j as i64 + 1), 1))).collect();
        let mut sum = GaussianRational::zero();
        for (c, w) in curves.iter().zip(&weights) {
            sum += &(w * &GaussianRational::from_int(c.degree().unwrap() as i64));
        }
        let last_deg = GaussianRational::from_int(curves[k - 1].degree().unwrap() as i64);
        weights.push(-&sum.checked_div(&last_deg).unwrap());
        if ratio_condition_report(&weights)?.iter().any(|r| r.status == RatioStatus::Violated) {
            continue;
        }
        let spec = LogarithmicSpec::new(curves, weights)?;
        let form = logarithmic_form(&spec)?;
        if form.degree() != m || infinity_invariant(&form.affine_field()?) {
            continue;
        }
        return Ok((spec, form));
    }
    Err(ConstructError::GeneralPosition)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textio::print_poly;

    #[test]
    fn section_three_example_matches_print() {
        let (l1, l2) = (GaussianRational::from_int(2), GaussianRational::from_int(3));
        let l3 = -&(&l1 + &l2);
        let spec = LogarithmicSpec::new(vec![hp("X"), hp("Y"), hp("Y - X - Z")], vec![l1, l2, l3]).unwrap();
        let form = logarithmic_form(&spec).unwrap();
        assert_eq!(print_poly(form.p()), print_poly(&hp("Y*(2*Y + 3*X - 2*Z)")));
        assert_eq!(print_poly(form.q()), print_poly(&hp("-X*(2*Y + 3*X + 3*Z)")));
        assert_eq!(print_poly(form.r()), print_poly(&hp("5*X*Y")));
        assert_eq!(form.degree(), 1);
        assert!(!infinity_invariant(&form.affine_field().unwrap()));
        assert!(logarithmic_iif(&spec, &form).unwrap());
    }

    #[test]
    fn weight_condition_enforced() {
        let one = GaussianRational::one();
        assert!(matches!(
            LogarithmicSpec::new(vec![hp("X"), hp("Y")], vec![one.clone(), one.clone()]),
            Err(ConstructError::WeightSum(_))
        ));
        let spec = LogarithmicSpec::new(vec![hp("X"), hp("Y")], vec![one.clone(), -&one]).unwrap();
        assert!(logarithmic_form(&spec).is_ok());
    }

    #[test]
    fn ratio_report() {
        let w = [GaussianRational::from_int(1), GaussianRational::from_int(1), GaussianRational::from_int(-2)];
        let r = ratio_condition_report(&w).unwrap();
        assert_eq!(r.iter().filter(|p| p.status == RatioStatus::Violated).count(), 2);
        let w = [GaussianRational::from_parts((1, 1), (1, 1)), GaussianRational::from_parts((1, 1), (-1, 1)), GaussianRational::from_int(-2)];
        let r = ratio_condition_report(&w).unwrap();
        assert!(r.iter().all(|p| p.status == RatioStatus::Satisfied));
        assert!(ratio_condition_report(&[GaussianRational::i(), GaussianRational::zero()]).is_err());
    }

    #[test]
    fn eee_circle() {
        let one = GaussianRational::one();
        let s = eee_system(&ap("x^2 + y^2 - 1"), &ap("x - 2"), &one, &one).unwrap();
        assert_eq!(s.certificate.cofactor, ap("2*x + 2*y"));
        assert_eq!(s.field.degree(), 2);
        assert!(matches!(eee_system(&ap("x^2 + y^2 - 1"), &ap("1"), &one, &one), Err(ConstructError::NotLinear)));
        let zero = GaussianRational::zero();
        assert!(matches!(eee_system(&ap("x^2 + y^2 - 1"), &ap("y"), &one, &zero), Err(ConstructError::Degenerate)));
    }

    #[test]
    fn gallery_builds() {
        for name in GALLERY {
            gallery(name).unwrap();
        }
        assert!(gallery("nope").is_err());
    }

    #[test]
    fn thm2b_presets() {
        for m in 1..=3 {
            let (spec, form) = thm2b(m).unwrap();
            let total: u32 = spec.curves.iter().map(|c| c.degree().unwrap()).sum();
            assert_eq!(total, m + 2);
            assert_eq!(form.degree(), m);
            assert!(!infinity_invariant(&form.affine_field().unwrap()));
        }
    }

    #[test]
    fn thm2b_union_is_nodal() {
        use crate::singularities::curve_singularities;
        for m in 1..=2 {
            let (spec, _) = thm2b(m).unwrap();
            let product = spec.curves.iter().fold(MultiPoly::one(Arity::Projective), |acc, c| &acc * c);
            let sing = curve_singularities(&product, true).unwrap();
            assert_eq!(sing.residual, 0);
            assert!(sing.points.iter().all(|p| p.is_node));
            let lines = if m == 1 { 3 } else { m as usize };
            let expected = lines * (lines - 1) / 2 + if m == 1 { 0 } else { 2 * lines };
            assert_eq!(sing.points.len(), expected);
        }
    }
}
