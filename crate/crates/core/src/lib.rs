//! Exact toolkit for invariant algebraic curves of planar polynomial vector
//! fields and their foliations of the complex projective plane.
#![allow(clippy::result_large_err)]

pub mod bounds;
pub mod branches;
pub mod cli;
pub mod construct;
pub mod cycles;
pub mod field;
pub mod projective;
pub mod realtopo;
pub mod series;
pub mod singularities;
pub mod solve;
pub mod polyring;
pub mod textio;
