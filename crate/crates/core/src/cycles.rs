//! Numeric checks on periodic orbits carried by invariant ovals:
//! the divergence integral, the location statement for inverse
//! integrating factors, and a fixed-step integrator for cross-checks.

use serde::Serialize;
use thiserror::Error;

use crate::field::{iif_check, AffineVectorField, FieldError};
use crate::polyring::MultiPoly;
use crate::realtopo::{CurveEval, TopoError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CyclesError {
    #[error("vector field has non-real coefficients")]
    NonReal,
    #[error("vector field vanishes near ({x:.6}, {y:.6}) on the oval")]
    Singular { x: f64, y: f64 },
    #[error("oval polyline needs at least 3 distinct vertices and must be closed")]
    BadPolyline,
    #[error("could not refine the polyline onto the curve near ({x:.6}, {y:.6})")]
    Refinement { x: f64, y: f64 },
    #[error("V is not an inverse integrating factor of the field")]
    NotIif,
    #[error("step must be positive")]
    BadStep,
    #[error("orbit left the ball of radius {0:e} at t = {1}")]
    BlowUp(f64, f64),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Topo(#[from] TopoError),
}

fn require_real(field: &AffineVectorField) -> Result<(), CyclesError> {
    if field.is_real() {
        Ok(())
    } else {
        Err(CyclesError::NonReal)
    }
}

/// Floating-point evaluation of `(p + x r, q + y r)` and its divergence.
struct FieldEval {
    xc: MultiPoly,
    yc: MultiPoly,
    div: MultiPoly,
}

impl FieldEval {
    fn new(field: &AffineVectorField) -> Self {
        let (xc, yc) = (field.x_component(), field.y_component());
        let div = &xc.partial(0) + &yc.partial(1);
        Self { xc, yc, div }
    }

    fn at(&self, p: (f64, f64)) -> (f64, f64) {
        (self.xc.eval_f64(&[p.0, p.1]), self.yc.eval_f64(&[p.0, p.1]))
    }

    fn div(&self, p: (f64, f64)) -> f64 {
        self.div.eval_f64(&[p.0, p.1])
    }
}

/// Midpoint sums of `∮ div X dt` and `∮ dt` with `dt = |ds| / |X|`.
fn midpoint_sums(fe: &FieldEval, poly: &[(f64, f64)]) -> Result<(f64, f64), CyclesError> {
    let (mut d, mut t) = (0.0, 0.0);
    let speeds: Vec<f64> = poly.iter().map(|&p| fe.at(p).0.hypot(fe.at(p).1)).collect();
    let scale = speeds.iter().copied().fold(0.0, f64::max);
    if let Some(k) = speeds.iter().position(|&s| s <= 1e-12 * scale.max(1.0)) {
        return Err(CyclesError::Singular { x: poly[k].0, y: poly[k].1 });
    }
    for w in poly.windows(2) {
        let mid = (0.5 * (w[0].0 + w[1].0), 0.5 * (w[0].1 + w[1].1));
        let (vx, vy) = fe.at(mid);
        let speed = vx.hypot(vy);
        if speed <= 1e-12 * scale.max(1.0) {
            return Err(CyclesError::Singular { x: mid.0, y: mid.1 });
        }
        let dt = (w[1].0 - w[0].0).hypot(w[1].1 - w[0].1) / speed;
        d += fe.div(mid) * dt;
        t += dt;
    }
    Ok((d, t))
}

/// Inserts the projection of every chord midpoint onto the curve.
fn refine(curve: &CurveEval, poly: &[(f64, f64)]) -> Result<Vec<(f64, f64)>, CyclesError> {
    let mut out = Vec::with_capacity(2 * poly.len());
    for w in poly.windows(2) {
        out.push(w[0]);
        let mid = (0.5 * (w[0].0 + w[1].0), 0.5 * (w[0].1 + w[1].1));
        let (q, _) = curve.project(mid, 1e-14, 30).ok_or(CyclesError::Refinement { x: mid.0, y: mid.1 })?;
        out.push(q);
    }
    out.push(*poly.last().unwrap());
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivergenceIntegral {
    /// Extrapolated `∮ div X dt`.
    pub d: f64,
    /// Extrapolated period.
    pub period: f64,
    /// Raw midpoint sums at the given density and two refinements.
    pub raw: [f64; 3],
    /// Richardson values from the coarse pair and the fine pair.
    pub extrapolated: [f64; 2],
    /// `|extrapolated[1] − extrapolated[0]|`.
    pub error_estimate: f64,
    /// `error_estimate / |d|`, or 0 when both vanish.
    pub relative_agreement: f64,
}

/// `∮ div X dt` over a closed polyline lying on the invariant curve
/// `curve = 0`, by the midpoint rule at three nested densities with
/// Richardson extrapolation.
pub fn divergence_integral(
    field: &AffineVectorField,
    curve: &MultiPoly,
    oval: &[(f64, f64)],
) -> Result<DivergenceIntegral, CyclesError> {
    require_real(field)?;
    if oval.len() < 4 || oval.first() != oval.last() {
        return Err(CyclesError::BadPolyline);
    }
    let fe = FieldEval::new(field);
    let ce = CurveEval::new(curve);
    let p1 = refine(&ce, oval)?;
    let p2 = refine(&ce, &p1)?;
    let (d0, _) = midpoint_sums(&fe, oval)?;
    let (d1, t1) = midpoint_sums(&fe, &p1)?;
    let (d2, t2) = midpoint_sums(&fe, &p2)?;
    let rich = |coarse: f64, fine: f64| (4.0 * fine - coarse) / 3.0;
    let (r1, r2) = (rich(d0, d1), rich(d1, d2));
    let error_estimate = (r2 - r1).abs();
    let relative_agreement = if error_estimate == 0.0 { 0.0 } else { error_estimate / r2.abs() };
    Ok(DivergenceIntegral {
        d: r2,
        period: rich(t1, t2),
        raw: [d0, d1, d2],
        extrapolated: [r1, r2],
        error_estimate,
        relative_agreement,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Stability {
    Stable,
    Unstable,
    Neutral,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CycleCertificate {
    pub oval: usize,
    pub period: f64,
    pub divergence: f64,
    pub error_estimate: f64,
    pub stability: Stability,
    /// `|D|` exceeds [`HYPERBOLICITY_FACTOR`] times the error estimate.
    /// `false` means inconclusive, not "not hyperbolic".
    pub hyperbolic: bool,
    /// Largest `|curve|` over the polyline.
    pub v_residual: f64,
}

pub const HYPERBOLICITY_FACTOR: f64 = 1e3;

pub fn certify_cycle(
    field: &AffineVectorField,
    curve: &MultiPoly,
    oval_id: usize,
    oval: &[(f64, f64)],
) -> Result<CycleCertificate, CyclesError> {
    let di = divergence_integral(field, curve, oval)?;
    let hyperbolic = di.d.abs() > HYPERBOLICITY_FACTOR * di.error_estimate;
    let stability = if !hyperbolic {
        Stability::Neutral
    } else if di.d < 0.0 {
        Stability::Stable
    } else {
        Stability::Unstable
    };
    let ce = CurveEval::new(curve);
    let v_residual = oval.iter().map(|&p| ce.value(p).abs()).fold(0.0, f64::max);
    Ok(CycleCertificate {
        oval: oval_id,
        period: di.period,
        divergence: di.d,
        error_estimate: di.error_estimate,
        stability,
        hyperbolic,
        v_residual,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocationResult {
    pub oval: usize,
    /// Largest `|V| / |∇V|` over the vertices.
    pub residual: f64,
    pub pass: bool,
}

/// Checks that each oval lies on `V = 0`, after establishing exactly that
/// `V` is an inverse integrating factor.
pub fn location_check(
    field: &AffineVectorField,
    v: &MultiPoly,
    ovals: &[Vec<(f64, f64)>],
    tol: f64,
) -> Result<Vec<LocationResult>, CyclesError> {
    require_real(field)?;
    if !iif_check(field, v)? {
        return Err(CyclesError::NotIif);
    }
    Ok(vanishing_residuals(v, ovals, tol))
}

/// The residual part of [`location_check`] without the precondition.
pub fn vanishing_residuals(v: &MultiPoly, ovals: &[Vec<(f64, f64)>], tol: f64) -> Vec<LocationResult> {
    let ce = CurveEval::new(v);
    ovals
        .iter()
        .enumerate()
        .map(|(k, o)| {
            let residual = o
                .iter()
                .map(|&p| {
                    let (gx, gy) = ce.gradient(p);
                    ce.value(p).abs() / gx.hypot(gy).max(f64::MIN_POSITIVE)
                })
                .fold(0.0, f64::max);
            LocationResult { oval: k, residual, pass: residual < tol }
        })
        .collect()
}

/// Classical fixed-step RK4. Returns `(t, x, y)` samples, one per step.
pub fn integrate_orbit(
    field: &AffineVectorField,
    x0: (f64, f64),
    t_end: f64,
    step: f64,
) -> Result<Vec<(f64, f64, f64)>, CyclesError> {
    require_real(field)?;
    if !(step > 0.0) {
        return Err(CyclesError::BadStep);
    }
    const BOUND: f64 = 1e8;
    let fe = FieldEval::new(field);
    let n = (t_end / step).ceil().max(0.0) as usize;
    let mut out = Vec::with_capacity(n + 1);
    let (mut x, mut y) = x0;
    out.push((0.0, x, y));
    for k in 0..n {
        let h = step.min(t_end - k as f64 * step);
        let k1 = fe.at((x, y));
        let k2 = fe.at((x + 0.5 * h * k1.0, y + 0.5 * h * k1.1));
        let k3 = fe.at((x + 0.5 * h * k2.0, y + 0.5 * h * k2.1));
        let k4 = fe.at((x + h * k3.0, y + h * k3.1));
        x += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        y += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        let t = (k + 1) as f64 * step;
        if !(x.hypot(y) < BOUND) {
            return Err(CyclesError::BlowUp(BOUND, t));
        }
        out.push((t.min(t_end), x, y));
    }
    Ok(out)
}
