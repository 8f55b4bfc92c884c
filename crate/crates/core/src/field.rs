//! Affine polynomial vector fields, their projective one-forms, and the
//! exact invariance / cofactor / inverse-integrating-factor checks.

use serde::Serialize;
use thiserror::Error;

use crate::polyring::{gcd_all, Arity, GaussianRational, MultiPoly, PolyError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("vector field is identically zero")]
    ZeroField,
    #[error("r must be zero or homogeneous")]
    NonHomogeneousR,
    #[error("field components must be affine polynomials in x, y")]
    NotAffine,
    #[error("one-form coefficients must be homogeneous of one common degree >= 1")]
    NotHomogeneous,
    #[error("projective condition XP + YQ + ZR = 0 fails")]
    ProjectiveCondition,
    #[error("curve is the zero polynomial")]
    ZeroCurve,
    #[error("{0} weights for {1} certificates")]
    LengthMismatch(usize, usize),
    #[error("certificate did not pass its residual check")]
    InvalidCertificate,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// `ẋ = p + x·r, ẏ = q + y·r` with `r` zero or homogeneous of degree `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineVectorField {
    p: MultiPoly,
    q: MultiPoly,
    r: MultiPoly,
    m: u32,
}

impl AffineVectorField {
    pub fn new(p: MultiPoly, q: MultiPoly, r: MultiPoly) -> Result<Self, FieldError> {
        if [&p, &q, &r].iter().any(|c| c.arity() != Arity::Affine) {
            return Err(FieldError::NotAffine);
        }
        if !r.is_zero() && !r.is_homogeneous() {
            return Err(FieldError::NonHomogeneousR);
        }
        let m = [&p, &q, &r]
            .iter()
            .filter_map(|c| c.degree())
            .max()
            .ok_or(FieldError::ZeroField)?;
        let f = Self { p, q, r, m };
        if f.x_component().is_zero() && f.y_component().is_zero() {
            return Err(FieldError::ZeroField);
        }
        Ok(f)
    }

    /// Planar field `(p, q)` with `r = 0`.
    pub fn planar(p: MultiPoly, q: MultiPoly) -> Result<Self, FieldError> {
        Self::new(p, q, MultiPoly::zero(Arity::Affine))
    }

    /// Splits a general field `(A, B)` into normal form: when the top-degree
    /// parts are `(x·s, y·s)` the homogeneous `s` becomes `r`.
    pub fn from_components(a: MultiPoly, b: MultiPoly) -> Result<Self, FieldError> {
        let d = [&a, &b].iter().filter_map(|c| c.degree()).max().ok_or(FieldError::ZeroField)?;
        let at = a.homogeneous_part(d);
        let bt = b.homogeneous_part(d);
        let x = MultiPoly::var(Arity::Affine, 0);
        let y = MultiPoly::var(Arity::Affine, 1);
        if d >= 1 && (&y * &at) == (&x * &bt) {
            let s = at.exact_divide(&x).or_else(|_| bt.exact_divide(&y))?;
            let p = &a - &(&x * &s);
            let q = &b - &(&y * &s);
            return Self::new(p, q, s);
        }
        Self::planar(a, b)
    }

    pub fn p(&self) -> &MultiPoly {
        &self.p
    }
    pub fn q(&self) -> &MultiPoly {
        &self.q
    }
    pub fn r(&self) -> &MultiPoly {
        &self.r
    }

    /// The degree `m = max{deg p, deg q, deg r}`.
    pub fn degree(&self) -> u32 {
        self.m
    }

    /// `p + x·r`
    pub fn x_component(&self) -> MultiPoly {
        &self.p + &(&MultiPoly::var(Arity::Affine, 0) * &self.r)
    }

    /// `q + y·r`
    pub fn y_component(&self) -> MultiPoly {
        &self.q + &(&MultiPoly::var(Arity::Affine, 1) * &self.r)
    }

    pub fn is_real(&self) -> bool {
        self.p.has_real_coefficients() && self.q.has_real_coefficients() && self.r.has_real_coefficients()
    }

    pub fn eval_f64(&self, x: f64, y: f64) -> (f64, f64) {
        let r = self.r.eval_f64(&[x, y]);
        (self.p.eval_f64(&[x, y]) + x * r, self.q.eval_f64(&[x, y]) + y * r)
    }
}

/// `P dX + Q dY + R dZ` with homogeneous coefficients of degree `m + 1` and
/// `XP + YQ + ZR = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectiveOneForm {
    p: MultiPoly,
    q: MultiPoly,
    r: MultiPoly,
    m: u32,
}

impl ProjectiveOneForm {
    pub fn new(p: MultiPoly, q: MultiPoly, r: MultiPoly) -> Result<Self, FieldError> {
        if [&p, &q, &r].iter().any(|c| c.arity() != Arity::Projective) {
            return Err(FieldError::NotHomogeneous);
        }
        let degs: Vec<u32> = [&p, &q, &r].iter().filter_map(|c| c.degree()).collect();
        let Some(&d) = degs.first() else {
            return Err(FieldError::ZeroField);
        };
        if d == 0 || degs.iter().any(|&e| e != d) || ![&p, &q, &r].iter().all(|c| c.is_homogeneous()) {
            return Err(FieldError::NotHomogeneous);
        }
        let form = Self { p, q, r, m: d - 1 };
        if !form.projective_residual().is_zero() {
            return Err(FieldError::ProjectiveCondition);
        }
        Ok(form)
    }

    pub fn p(&self) -> &MultiPoly {
        &self.p
    }
    pub fn q(&self) -> &MultiPoly {
        &self.q
    }
    pub fn r(&self) -> &MultiPoly {
        &self.r
    }

    pub fn coefficients(&self) -> [&MultiPoly; 3] {
        [&self.p, &self.q, &self.r]
    }

    /// Foliation degree.
    pub fn degree(&self) -> u32 {
        self.m
    }

    /// `XP + YQ + ZR`, identically zero for a valid form.
    pub fn projective_residual(&self) -> MultiPoly {
        let v = |k| MultiPoly::var(Arity::Projective, k);
        &(&(&v(0) * &self.p) + &(&v(1) * &self.q)) + &(&v(2) * &self.r)
    }

    /// Divides out the common polynomial factor of the three coefficients.
    pub fn saturate(&self) -> Result<Self, FieldError> {
        let g = gcd_all(Arity::Projective, self.coefficients());
        if g.is_constant() {
            return Ok(self.clone());
        }
        Self::new(self.p.exact_divide(&g)?, self.q.exact_divide(&g)?, self.r.exact_divide(&g)?)
    }

    /// The affine field of the chart `Z = 1`: the one-form restricts to
    /// `P̃ dx + Q̃ dy`, whose kernel is spanned by `(−Q̃, P̃)`.
    pub fn affine_field(&self) -> Result<AffineVectorField, FieldError> {
        let pa = self.p.dehomogenize()?;
        let qa = self.q.dehomogenize()?;
        AffineVectorField::from_components(-&qa, pa)
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        Self { p: self.p.scale(c), q: self.q.scale(c), r: self.r.scale(c), m: self.m }
    }
}

/// Exact certificate that `f` is invariant with cofactor `K`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CofactorCertificate {
    #[serde(serialize_with = "ser_poly")]
    pub curve: MultiPoly,
    #[serde(serialize_with = "ser_poly")]
    pub cofactor: MultiPoly,
    pub residual_check: bool,
    pub cofactor_degree: Option<u32>,
    pub degree_bound: u32,
    pub degree_within_bound: bool,
}

pub(crate) fn ser_poly<S: serde::Serializer>(p: &MultiPoly, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&p.to_string())
}

/// `𝒳f = (p + x r) f_x + (q + y r) f_y`.
pub fn lie_derivative(field: &AffineVectorField, f: &MultiPoly) -> MultiPoly {
    &(&field.x_component() * &f.partial(0)) + &(&field.y_component() * &f.partial(1))
}

/// Outcome of an invariance test.
#[derive(Debug, Clone, PartialEq)]
pub enum Invariance {
    Invariant(CofactorCertificate),
    NotInvariant,
}

impl Invariance {
    pub fn certificate(self) -> Option<CofactorCertificate> {
        match self {
            Invariance::Invariant(c) => Some(c),
            Invariance::NotInvariant => None,
        }
    }
}

/// Checks `𝒳f = K f` by exact division.
pub fn invariance_check(field: &AffineVectorField, f: &MultiPoly) -> Result<Invariance, FieldError> {
    if f.is_zero() {
        return Err(FieldError::ZeroCurve);
    }
    if f.arity() != Arity::Affine {
        return Err(FieldError::NotAffine);
    }
    let xf = lie_derivative(field, f);
    let k = match xf.exact_divide(f) {
        Ok(k) => k,
        Err(PolyError::NotDivisible) => return Ok(Invariance::NotInvariant),
        Err(e) => return Err(e.into()),
    };
    let residual_check = (&xf - &(&k * f)).is_zero();
    let comp_deg = [field.x_component(), field.y_component()]
        .iter()
        .filter_map(MultiPoly::degree)
        .max()
        .unwrap_or(0);
    let degree_bound = comp_deg.saturating_sub(1);
    let cofactor_degree = k.degree();
    Ok(Invariance::Invariant(CofactorCertificate {
        curve: f.clone(),
        degree_within_bound: cofactor_degree.is_none_or(|d| d <= degree_bound),
        cofactor: k,
        residual_check,
        cofactor_degree,
        degree_bound,
    }))
}

/// Projective one-form of an affine field:
/// `(ZQ̂ + YR̂) dX − (ZP̂ + XR̂) dY + (YP̂ − XQ̂) dZ` with `P̂ = Zᵐ p(X/Z, Y/Z)`.
/// A common power of `Z` (present when the top-degree part is radial) is
/// divided out so the result carries the true foliation degree.
pub fn projectivize(field: &AffineVectorField) -> Result<ProjectiveOneForm, FieldError> {
    let m = field.degree();
    let ph = field.p().homogenize(m)?;
    let qh = field.q().homogenize(m)?;
    let rh = field.r().homogenize(m)?;
    let v = |k| MultiPoly::var(Arity::Projective, k);
    let (x, y, z) = (v(0), v(1), v(2));
    let big_p = &(&z * &qh) + &(&y * &rh);
    let big_q = -&(&(&z * &ph) + &(&x * &rh));
    let big_r = &(&y * &ph) - &(&x * &qh);
    let mut coeffs = [big_p, big_q, big_r];
    while let (Ok(p), Ok(q), Ok(r)) =
        (coeffs[0].exact_divide(&z), coeffs[1].exact_divide(&z), coeffs[2].exact_divide(&z))
    {
        coeffs = [p, q, r];
    }
    let [p, q, r] = coeffs;
    let form = ProjectiveOneForm::new(p, q, r)?;
    assert!(form.projective_residual().is_zero(), "projective condition violated");
    Ok(form)
}

/// True iff the line at infinity is invariant, i.e. `r ≡ 0`.
pub fn infinity_invariant(field: &AffineVectorField) -> bool {
    field.r().is_zero()
}

/// `∂x(p + x r) + ∂y(q + y r)`.
pub fn divergence(field: &AffineVectorField) -> MultiPoly {
    &field.x_component().partial(0) + &field.y_component().partial(1)
}

/// Exact test of `𝒳V = div(𝒳)·V`.
pub fn iif_check(field: &AffineVectorField, v: &MultiPoly) -> Result<bool, FieldError> {
    if v.is_zero() {
        return Err(FieldError::ZeroCurve);
    }
    Ok((&lie_derivative(field, v) - &(&divergence(field) * v)).is_zero())
}

/// Exact test of `Σ λᵢ Kᵢ = 0`, i.e. `∏ fᵢ^λᵢ` is a first integral.
pub fn darboux_check(certs: &[CofactorCertificate], weights: &[GaussianRational]) -> Result<bool, FieldError> {
    if certs.len() != weights.len() {
        return Err(FieldError::LengthMismatch(weights.len(), certs.len()));
    }
    if certs.iter().any(|c| !c.residual_check) {
        return Err(FieldError::InvalidCertificate);
    }
    let mut sum = MultiPoly::zero(Arity::Affine);
    for (c, w) in certs.iter().zip(weights) {
        sum = &sum + &c.cofactor.scale(w);
    }
    Ok(sum.is_zero())
}

/// Affine one-form `(q + y r) dx − (p + x r) dy`, as its two coefficients.
pub fn affine_one_form(field: &AffineVectorField) -> (MultiPoly, MultiPoly) {
    (field.y_component(), -&field.x_component())
}
