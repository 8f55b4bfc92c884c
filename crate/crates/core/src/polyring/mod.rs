//! Exact polynomial arithmetic over the Gaussian rationals ℚ(i).

mod gaussian;
mod gcd;
mod poly;
pub mod univariate;

use thiserror::Error;

pub use gaussian::{rational_sqrt, GaussianRational};
pub use gcd::{gcd, gcd_all, is_squarefree, resultant_y, specialize_x};
pub use poly::{Arity, Monomial, MultiPoly};
pub use univariate::{gaussian_roots, RootSet, UniPoly};

pub(crate) use gaussian::ratio_to_f64;
pub(crate) use gcd::is_unit;
pub(crate) use univariate::cmp_gaussian;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("arity mismatch: {left:?} vs {right:?}")]
    ArityMismatch { left: Arity, right: Arity },
    #[error("expected a polynomial in {expected:?} variables")]
    WrongArity { expected: Arity },
    #[error("cannot homogenize a degree-{degree} polynomial at degree {requested}")]
    HomogenizeDegree { requested: u32, degree: u32 },
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("not divisible")]
    NotDivisible,
    #[error("zero polynomial not allowed here")]
    ZeroPolynomial,
}
