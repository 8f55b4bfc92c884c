//! Points of ℂP² with ℚ(i) coordinates and affine charts.
//!
//! A chart is an invertible matrix `A`: homogeneous coordinates are
//! `V = A·W` and the chart is `{W₂ ≠ 0}` with affine coordinates
//! `(u, v) = (W₀/W₂, W₁/W₂)`. The three standard charts are permutations.

use std::fmt;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::field::{FieldError, ProjectiveOneForm};
use crate::polyring::{cmp_gaussian, Arity, GaussianRational, MultiPoly};

/// A point `(X : Y : Z)`, scaled so its last nonzero coordinate is 1.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ProjectivePoint {
    coords: [GaussianRational; 3],
}

impl ProjectivePoint {
    /// `None` for the zero vector.
    pub fn new(x: GaussianRational, y: GaussianRational, z: GaussianRational) -> Option<Self> {
        let mut coords = [x, y, z];
        let k = (0..3).rev().find(|&k| !coords[k].is_zero())?;
        let inv = coords[k].inv().expect("nonzero");
        for c in coords.iter_mut() {
            *c = &*c * &inv;
        }
        Some(Self { coords })
    }

    pub fn affine(x: GaussianRational, y: GaussianRational) -> Self {
        Self::new(x, y, GaussianRational::one()).expect("z = 1")
    }

    pub fn from_ints(x: i64, y: i64, z: i64) -> Option<Self> {
        Self::new(x.into(), y.into(), z.into())
    }

    pub fn coords(&self) -> &[GaussianRational; 3] {
        &self.coords
    }

    pub fn is_at_infinity(&self) -> bool {
        self.coords[2].is_zero()
    }

    /// `(x, y)` when the point is finite.
    pub fn affine_coords(&self) -> Option<(GaussianRational, GaussianRational)> {
        if self.is_at_infinity() {
            None
        } else {
            Some((self.coords[0].clone(), self.coords[1].clone()))
        }
    }

    pub fn is_real(&self) -> bool {
        self.coords.iter().all(GaussianRational::is_real)
    }

    /// Standard chart containing the point: `Z = 1` if finite, otherwise
    /// the appendix chart `X = 1`, otherwise `Y = 1`.
    pub fn standard_chart(&self) -> Chart {
        if !self.coords[2].is_zero() {
            Chart::z()
        } else if !self.coords[0].is_zero() {
            Chart::x()
        } else {
            Chart::y()
        }
    }
}

impl PartialOrd for ProjectivePoint {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ProjectivePoint {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // finite points first
        let key = |p: &Self| p.coords[2].is_zero();
        key(self).cmp(&key(other)).then_with(|| {
            (0..3)
                .map(|k| cmp_gaussian(&self.coords[k], &other.coords[k]))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
    }
}

impl fmt::Display for ProjectivePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} : {} : {})", self.coords[0], self.coords[1], self.coords[2])
    }
}

impl fmt::Debug for ProjectivePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl Serialize for ProjectivePoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

type Matrix = [[GaussianRational; 3]; 3];

fn int_matrix(rows: [[i64; 3]; 3]) -> Matrix {
    rows.map(|r| r.map(GaussianRational::from_int))
}

/// An affine chart of ℂP².
#[derive(Clone, PartialEq, Eq)]
pub struct Chart {
    name: String,
    a: Matrix,
    a_inv: Matrix,
}

impl Chart {
    /// `Z = 1`, coordinates `(x, y)`.
    pub fn z() -> Self {
        Self::from_matrix("Z=1", int_matrix([[1, 0, 0], [0, 1, 0], [0, 0, 1]])).unwrap()
    }

    /// `X = 1`, coordinates `(u, v) = (Y/X, Z/X)`: the chart `u = y/x`,
    /// `v = 1/x` at infinity.
    pub fn x() -> Self {
        Self::from_matrix("X=1", int_matrix([[0, 0, 1], [1, 0, 0], [0, 1, 0]])).unwrap()
    }

    /// `Y = 1`, coordinates `(u, v) = (X/Y, Z/Y)`.
    pub fn y() -> Self {
        Self::from_matrix("Y=1", int_matrix([[1, 0, 0], [0, 0, 1], [0, 1, 0]])).unwrap()
    }

    /// General linear chart; `None` if `a` is singular.
    pub fn from_matrix(name: &str, a: Matrix) -> Option<Self> {
        let a_inv = invert(&a)?;
        Some(Self { name: name.to_string(), a, a_inv })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn contains(&self, p: &ProjectivePoint) -> bool {
        !self.to_chart_homogeneous(p)[2].is_zero()
    }

    fn to_chart_homogeneous(&self, p: &ProjectivePoint) -> [GaussianRational; 3] {
        let v = p.coords();
        std::array::from_fn(|i| {
            let mut acc = GaussianRational::zero();
            for k in 0..3 {
                acc += &(&self.a_inv[i][k] * &v[k]);
            }
            acc
        })
    }

    /// Affine coordinates of `p` in this chart.
    pub fn local_coords(&self, p: &ProjectivePoint) -> Option<(GaussianRational, GaussianRational)> {
        let w = self.to_chart_homogeneous(p);
        let inv = w[2].inv()?;
        Some((&w[0] * &inv, &w[1] * &inv))
    }

    /// The point with affine coordinates `(u, v)`.
    pub fn point(&self, u: &GaussianRational, v: &GaussianRational) -> ProjectivePoint {
        let w = [u.clone(), v.clone(), GaussianRational::one()];
        let coords: [GaussianRational; 3] = std::array::from_fn(|i| {
            let mut acc = GaussianRational::zero();
            for k in 0..3 {
                acc += &(&self.a[i][k] * &w[k]);
            }
            acc
        });
        let [x, y, z] = coords;
        ProjectivePoint::new(x, y, z).expect("invertible chart")
    }

    fn images(&self) -> [MultiPoly; 3] {
        std::array::from_fn(|i| {
            let mut acc = MultiPoly::zero(Arity::Projective);
            for k in 0..3 {
                acc = &acc + &MultiPoly::var(Arity::Projective, k).scale(&self.a[i][k]);
            }
            acc
        })
    }

    /// `F(A·W)`, still homogeneous.
    pub fn pull_curve_homogeneous(&self, f: &MultiPoly) -> MultiPoly {
        f.compose(&self.images())
    }

    /// Affine equation of the curve in this chart.
    pub fn pull_curve(&self, f: &MultiPoly) -> MultiPoly {
        self.pull_curve_homogeneous(f).dehomogenize().expect("projective")
    }

    /// Pulled-back one-form: `P'_k = Σ_j A_jk P_j(A·W)`.
    pub fn pull_form(&self, form: &ProjectiveOneForm) -> Result<ProjectiveOneForm, FieldError> {
        let imgs = self.images();
        let pulled: Vec<MultiPoly> = form.coefficients().iter().map(|c| c.compose(&imgs)).collect();
        let coeffs: [MultiPoly; 3] = std::array::from_fn(|k| {
            let mut acc = MultiPoly::zero(Arity::Projective);
            for (j, pj) in pulled.iter().enumerate() {
                acc = &acc + &pj.scale(&self.a[j][k]);
            }
            acc
        });
        let [p, q, r] = coeffs;
        ProjectiveOneForm::new(p, q, r)
    }

    /// Vector field `(A, B)` spanning the kernel of the form in this chart.
    pub fn local_field(&self, form: &ProjectiveOneForm) -> Result<(MultiPoly, MultiPoly), FieldError> {
        let pulled = self.pull_form(form)?;
        let p0 = pulled.p().dehomogenize()?;
        let p1 = pulled.q().dehomogenize()?;
        Ok((-&p1, p0))
    }
}

impl fmt::Debug for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Chart({})", self.name)
    }
}

fn invert(a: &Matrix) -> Option<Matrix> {
    let m = |i: usize, j: usize| &a[i % 3][j % 3];
    let cof = |i: usize, j: usize| -> GaussianRational {
        &(m(i + 1, j + 1) * m(i + 2, j + 2)) - &(m(i + 1, j + 2) * m(i + 2, j + 1))
    };
    let mut det = GaussianRational::zero();
    for j in 0..3 {
        det += &(&a[0][j] * &cof(0, j));
    }
    let inv = det.inv()?;
    Some(std::array::from_fn(|i| std::array::from_fn(|j| &cof(j, i) * &inv)))
}

/// Translates an affine polynomial so that `(u0, v0)` moves to the origin.
pub fn translate(f: &MultiPoly, u0: &GaussianRational, v0: &GaussianRational) -> MultiPoly {
    let u = &MultiPoly::var(Arity::Affine, 0) + &MultiPoly::constant(Arity::Affine, u0.clone());
    let v = &MultiPoly::var(Arity::Affine, 1) + &MultiPoly::constant(Arity::Affine, v0.clone());
    f.compose(&[u, v])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textio::parse_poly;

    fn h(s: &str) -> MultiPoly {
        parse_poly(s, Arity::Projective).unwrap()
    }

    #[test]
    fn normalization_is_canonical() {
        let p = ProjectivePoint::from_ints(2, 4, 2).unwrap();
        let q = ProjectivePoint::from_ints(1, 2, 1).unwrap();
        assert_eq!(p, q);
        let r = ProjectivePoint::from_ints(3, 0, 0).unwrap();
        assert_eq!(r.coords()[0], GaussianRational::one());
        assert!(ProjectivePoint::from_ints(0, 0, 0).is_none());
    }

    #[test]
    fn chart_coordinates_round_trip() {
        let p = ProjectivePoint::new(GaussianRational::one(), GaussianRational::i(), GaussianRational::zero()).unwrap();
        let cx = Chart::x();
        let (u, v) = cx.local_coords(&p).unwrap();
        assert_eq!(u, GaussianRational::i());
        assert!(v.is_zero());
        assert_eq!(cx.point(&u, &v), p);
        assert!(!Chart::z().contains(&p));
        let sheared = Chart::from_matrix(
            "shear",
            int_matrix([[1, 0, 0], [1, 0, 1], [0, 1, 0]]),
        )
        .unwrap();
        let q = ProjectivePoint::from_ints(0, 1, 0).unwrap();
        let (u, v) = sheared.local_coords(&q).unwrap();
        assert_eq!(sheared.point(&u, &v), q);
    }

    #[test]
    fn pulled_forms_stay_projective() {
        let form = ProjectiveOneForm::new(h("Z*X"), h("Z*Y"), h("-(X^2 + Y^2)")).unwrap();
        let f = Chart::x().pull_form(&form).unwrap();
        assert!(f.projective_residual().is_zero());
        // u = Y/X, v = Z/X: the rotation field becomes (1 + u², u v)
        let (a, b) = Chart::x().local_field(&form).unwrap();
        assert_eq!(a, parse_poly("x^2 + 1", Arity::Affine).unwrap());
        assert_eq!(b, parse_poly("x*y", Arity::Affine).unwrap());
    }

    #[test]
    fn curve_pullback() {
        let circle = h("X^2 + Y^2 - Z^2");
        assert_eq!(
            Chart::x().pull_curve(&circle),
            parse_poly("1 + x^2 - y^2", Arity::Affine).unwrap()
        );
    }
}
