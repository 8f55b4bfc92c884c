//! Exact common zeros of polynomial systems over ℚ(i).
//!
//! Shared factors are split off first (`V(ha, hb) = V(h) ∪ V(a, b)`), so the
//! elimination step only ever sees pairwise coprime pairs. Candidate
//! abscissae are the roots of `gcd_j Res_y(s₀, s_j)`; each is substituted
//! back and the ordinates are the roots of the gcd of the specializations.
//! Zeros whose coordinates are not in ℚ(i) are counted in `residual`.

use num_traits::Zero;
use thiserror::Error;

use crate::polyring::{gaussian_roots, gcd, gcd_all, is_unit, resultant_y, specialize_x, Arity, GaussianRational, MultiPoly, UniPoly};
use crate::projective::ProjectivePoint;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    /// The system vanishes along a curve (given by a common factor).
    #[error("zero set is not finite: common component {0}")]
    NotIsolated(MultiPoly),
    #[error("the whole line at infinity lies in the zero set")]
    LineAtInfinity,
    #[error("expected polynomials of arity {0:?}")]
    WrongArity(Arity),
}

/// Finite solution set in the affine plane.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineSolution {
    pub points: Vec<(GaussianRational, GaussianRational)>,
    /// Upper bound on the number of zeros not expressible in ℚ(i).
    pub residual: usize,
}

/// Finite solution set in ℂP².
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectiveSolution {
    pub points: Vec<ProjectivePoint>,
    pub residual: usize,
}

impl ProjectiveSolution {
    pub fn is_complete(&self) -> bool {
        self.residual == 0
    }
}

/// Common zeros in ℂ² of affine polynomials.
pub fn solve_affine(system: &[MultiPoly]) -> Result<AffineSolution, SolveError> {
    if system.iter().any(|p| p.arity() != Arity::Affine) {
        return Err(SolveError::WrongArity(Arity::Affine));
    }
    let mut sol = AffineSolution { points: Vec::new(), residual: 0 };
    solve_rec(system.to_vec(), &mut sol)?;
    let mut pts: Vec<ProjectivePoint> = sol
        .points
        .drain(..)
        .map(|(x, y)| ProjectivePoint::affine(x, y))
        .collect();
    pts.sort();
    pts.dedup();
    sol.points = pts.into_iter().filter_map(|p| p.affine_coords()).collect();
    Ok(sol)
}

fn solve_rec(mut sys: Vec<MultiPoly>, out: &mut AffineSolution) -> Result<(), SolveError> {
    sys.retain(|p| !p.is_zero());
    if sys.iter().any(|p| p.is_constant()) {
        return Ok(());
    }
    if sys.is_empty() {
        return Err(SolveError::NotIsolated(MultiPoly::zero(Arity::Affine)));
    }
    let g = gcd_all(Arity::Affine, &sys);
    if !is_unit(&g) {
        return Err(SolveError::NotIsolated(g));
    }
    for j in 1..sys.len() {
        let h = gcd(&sys[0], &sys[j]).expect("same arity");
        if !is_unit(&h) {
            let mut with_h = sys.clone();
            with_h[0] = h.clone();
            with_h.remove(j);
            solve_rec(with_h, out)?;
            let mut rest = sys.clone();
            rest[0] = sys[0].exact_divide(&h).expect("gcd divides");
            rest[j] = sys[j].exact_divide(&h).expect("gcd divides");
            return solve_rec(rest, out);
        }
    }
    let mut r = UniPoly::zero();
    for p in &sys[1..] {
        r = r.gcd(&resultant_y(&sys[0], p));
    }
    let xs = gaussian_roots(&r);
    out.residual += xs.residual;
    for x0 in xs.roots {
        let mut u = UniPoly::zero();
        for p in &sys {
            u = u.gcd(&specialize_x(p, &x0));
        }
        if u.is_zero() {
            return Err(SolveError::NotIsolated(
                &MultiPoly::var(Arity::Affine, 0) - &MultiPoly::constant(Arity::Affine, x0),
            ));
        }
        let ys = gaussian_roots(&u);
        out.residual += ys.residual;
        out.points.extend(ys.roots.into_iter().map(|y0| (x0.clone(), y0)));
    }
    Ok(())
}

/// Common zeros in ℂP² of homogeneous polynomials.
pub fn solve_projective(system: &[MultiPoly]) -> Result<ProjectiveSolution, SolveError> {
    if system.iter().any(|p| p.arity() != Arity::Projective || !p.is_homogeneous()) {
        return Err(SolveError::WrongArity(Arity::Projective));
    }
    let affine: Vec<MultiPoly> = system.iter().map(|p| p.dehomogenize().expect("projective")).collect();
    let finite = solve_affine(&affine)?;
    let mut points: Vec<ProjectivePoint> = finite
        .points
        .into_iter()
        .map(|(x, y)| ProjectivePoint::affine(x, y))
        .collect();
    let at_inf = solve_at_infinity(system)?;
    points.extend(at_inf.points);
    points.sort();
    points.dedup();
    Ok(ProjectiveSolution { points, residual: finite.residual + at_inf.residual })
}

/// Common zeros on the line `Z = 0`.
pub fn solve_at_infinity(system: &[MultiPoly]) -> Result<ProjectiveSolution, SolveError> {
    let zero = GaussianRational::zero();
    let restricted: Vec<MultiPoly> = system.iter().map(|p| p.substitute(2, &zero)).collect();
    if restricted.iter().all(MultiPoly::is_zero) {
        return Err(SolveError::LineAtInfinity);
    }
    let mut points = Vec::new();
    let pole = [zero.clone(), GaussianRational::from_int(1), zero.clone()];
    if restricted.iter().all(|p| p.eval(&pole).is_zero()) {
        points.push(ProjectivePoint::from_ints(0, 1, 0).unwrap());
    }
    let one = GaussianRational::from_int(1);
    let mut u = UniPoly::zero();
    for p in &restricted {
        let q = p.substitute(0, &one);
        u = u.gcd(&UniPoly::from_multi(&q, 1).expect("only Y remains"));
    }
    let ys = gaussian_roots(&u);
    points.extend(ys.roots.into_iter().map(|y| ProjectivePoint::new(one.clone(), y, zero.clone()).unwrap()));
    points.sort();
    Ok(ProjectiveSolution { points, residual: ys.residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textio::parse_poly;

    fn a(s: &str) -> MultiPoly {
        parse_poly(s, Arity::Affine).unwrap()
    }
    fn h(s: &str) -> MultiPoly {
        parse_poly(s, Arity::Projective).unwrap()
    }
    fn g(n: i64) -> GaussianRational {
        GaussianRational::from_int(n)
    }

    #[test]
    fn circle_meets_lines() {
        let s = solve_affine(&[a("x^2 + y^2 - 25"), a("x - y + 1")]).unwrap();
        assert_eq!(s.points, vec![(g(-4), g(-3)), (g(3), g(4))]);
        assert_eq!(s.residual, 0);
        let s = solve_affine(&[a("x^2 + y^2 - 1"), a("x - y")]).unwrap();
        assert!(s.points.is_empty());
        assert_eq!(s.residual, 2);
    }

    #[test]
    fn shared_factors_are_split() {
        // {x y, x (y - 1), y (x - 1)}: only the origin
        let s = solve_affine(&[a("x*y"), a("x*(y - 1)"), a("y*(x - 1)")]).unwrap();
        assert_eq!(s.points, vec![(g(0), g(0))]);
        assert!(matches!(solve_affine(&[a("x*y"), a("x*(y - 1)")]), Err(SolveError::NotIsolated(_))));
    }

    #[test]
    fn projective_points() {
        // the circle meets the line at infinity in the cyclic points
        let s = solve_projective(&[h("X^2 + Y^2 - Z^2"), h("Z")]).unwrap();
        let i = GaussianRational::i();
        assert_eq!(s.points.len(), 2);
        assert!(s.points.contains(&ProjectivePoint::new(g(1), i.clone(), g(0)).unwrap()));
        assert!(s.points.contains(&ProjectivePoint::new(g(1), -i, g(0)).unwrap()));
        let s = solve_projective(&[h("X*Y"), h("Y*Z"), h("X*Z")]).unwrap();
        assert_eq!(s.points.len(), 3);
        assert!(s.points.contains(&ProjectivePoint::from_ints(0, 1, 0).unwrap()));
    }
}
