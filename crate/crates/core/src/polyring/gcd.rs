//! Multivariate gcd by primitive pseudo-remainder sequences, squarefree
//! testing and bivariate resultants.

use num_traits::One;

use super::gaussian::GaussianRational;
use super::poly::{Arity, Monomial, MultiPoly};
use super::univariate::UniPoly;
use super::PolyError;

/// Coefficients of `p` as a polynomial in variable `v`.
fn coeffs_in(p: &MultiPoly, v: usize) -> Vec<MultiPoly> {
    let d = p.degree_in(v).unwrap_or(0) as usize;
    let mut out = vec![MultiPoly::zero(p.arity()); d + 1];
    for (m, c) in p.terms() {
        let e = m.0[v] as usize;
        let mut nm = *m;
        nm.0[v] = 0;
        out[e].add_term(nm, c.clone());
    }
    out
}

fn deg_in(p: &MultiPoly, v: usize) -> i64 {
    if p.is_zero() {
        -1
    } else {
        p.degree_in(v).unwrap_or(0) as i64
    }
}

/// Content with respect to variable `k-1`, as a polynomial in the first
/// `k-1` variables.
fn content(p: &MultiPoly, k: usize) -> MultiPoly {
    let mut g = MultiPoly::zero(p.arity());
    for c in coeffs_in(p, k - 1) {
        if c.is_zero() {
            continue;
        }
        g = gcd_rec(&g, &c, k - 1);
        if g.is_constant() && !g.is_zero() {
            return MultiPoly::one(p.arity());
        }
    }
    g
}

fn prem(a: &MultiPoly, b: &MultiPoly, v: usize) -> MultiPoly {
    let db = deg_in(b, v);
    let bc = coeffs_in(b, v);
    let lb = bc[db as usize].clone();
    let mut r = a.clone();
    while deg_in(&r, v) >= db && !r.is_zero() {
        let dr = deg_in(&r, v);
        let lr = coeffs_in(&r, v)[dr as usize].clone();
        let shift = Monomial::var(v, (dr - db) as u32);
        r = &(&lb * &r) - &(&lr * &b.mul_monomial(&shift));
    }
    r
}

fn gcd_rec(a: &MultiPoly, b: &MultiPoly, k: usize) -> MultiPoly {
    let arity = a.arity();
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if k == 0 {
        return MultiPoly::one(arity);
    }
    let v = k - 1;
    if deg_in(a, v) == 0 && deg_in(b, v) == 0 {
        return gcd_rec(a, b, k - 1);
    }
    let ca = content(a, k);
    let cb = content(b, k);
    let c = gcd_rec(&ca, &cb, k - 1);
    let mut pa = a.exact_divide(&ca).expect("content divides");
    let mut pb = b.exact_divide(&cb).expect("content divides");
    if deg_in(&pa, v) < deg_in(&pb, v) {
        std::mem::swap(&mut pa, &mut pb);
    }
    let g = loop {
        if deg_in(&pb, v) == 0 {
            break MultiPoly::one(arity);
        }
        let r = prem(&pa, &pb, v);
        if r.is_zero() {
            break pb;
        }
        if deg_in(&r, v) == 0 {
            break MultiPoly::one(arity);
        }
        let cr = content(&r, k);
        pa = pb;
        pb = r.exact_divide(&cr).expect("content divides");
    };
    let cg = content(&g, k);
    let pg = g.exact_divide(&cg).expect("content divides");
    (&c * &pg).monic()
}

/// Greatest common divisor, normalized to leading coefficient 1 in graded-lex
/// order. `gcd(0, 0) = 0`.
pub fn gcd(a: &MultiPoly, b: &MultiPoly) -> Result<MultiPoly, PolyError> {
    if a.arity() != b.arity() {
        return Err(PolyError::ArityMismatch { left: a.arity(), right: b.arity() });
    }
    Ok(gcd_rec(a, b, a.arity().nvars()))
}

pub fn gcd_all<'a, I: IntoIterator<Item = &'a MultiPoly>>(arity: Arity, ps: I) -> MultiPoly {
    let mut g = MultiPoly::zero(arity);
    for p in ps {
        g = gcd_rec(&g, p, arity.nvars());
    }
    g
}

/// True when `f` has no repeated factor.
pub fn is_squarefree(f: &MultiPoly) -> Result<bool, PolyError> {
    if f.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    let n = f.arity().nvars();
    let mut g = f.clone();
    for v in 0..n {
        g = gcd_rec(&g, &f.partial(v), n);
        if g.is_constant() {
            return Ok(true);
        }
    }
    // Over characteristic zero gcd(f, ∇f) is nonconstant exactly when a
    // factor repeats.
    Ok(g.is_constant())
}

/// `Res_y(a, b)` for affine polynomials, as a univariate polynomial in `x`.
pub fn resultant_y(a: &MultiPoly, b: &MultiPoly) -> UniPoly {
    let to_uni = |p: &MultiPoly| -> Vec<UniPoly> {
        coeffs_in(p, 1)
            .iter()
            .map(|c| UniPoly::from_multi(c, 0).expect("affine coefficient in x only"))
            .collect()
    };
    if a.is_zero() || b.is_zero() {
        return UniPoly::zero();
    }
    let ac = to_uni(a);
    let bc = to_uni(b);
    let m = ac.len() - 1;
    let n = bc.len() - 1;
    if m == 0 && n == 0 {
        return UniPoly::one();
    }
    if m == 0 {
        return pow_uni(&ac[0], n);
    }
    if n == 0 {
        return pow_uni(&bc[0], m);
    }
    let size = m + n;
    let mut mat = vec![vec![UniPoly::zero(); size]; size];
    for r in 0..n {
        for (j, c) in ac.iter().rev().enumerate() {
            mat[r][r + j] = c.clone();
        }
    }
    for r in 0..m {
        for (j, c) in bc.iter().rev().enumerate() {
            mat[n + r][r + j] = c.clone();
        }
    }
    bareiss_det(mat)
}

fn pow_uni(p: &UniPoly, e: usize) -> UniPoly {
    (0..e).fold(UniPoly::one(), |acc, _| acc.mul(p))
}

/// Fraction-free determinant over ℚ(i)[x].
fn bareiss_det(mut m: Vec<Vec<UniPoly>>) -> UniPoly {
    let n = m.len();
    let mut sign = GaussianRational::one();
    let mut prev = UniPoly::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&r| !m[r][k].is_zero()) else {
                return UniPoly::zero();
            };
            m.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = m[i][j].mul(&m[k][k]).sub(&m[i][k].mul(&m[k][j]));
                m[i][j] = num.exact_div(&prev).expect("Bareiss division is exact");
            }
            m[i][k] = UniPoly::zero();
        }
        prev = m[k][k].clone();
    }
    m[n - 1][n - 1].scale(&sign)
}

/// Substitutes `x = x0` into an affine polynomial, giving a polynomial in `y`.
pub fn specialize_x(p: &MultiPoly, x0: &GaussianRational) -> UniPoly {
    let q = p.substitute(0, x0);
    UniPoly::from_multi(&q, 1).expect("only y remains")
}

pub(crate) fn is_unit(p: &MultiPoly) -> bool {
    p.is_constant() && !p.is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;
    use crate::textio::parse_poly;

    fn a(s: &str) -> MultiPoly {
        parse_poly(s, Arity::Affine).unwrap()
    }
    fn p(s: &str) -> MultiPoly {
        parse_poly(s, Arity::Projective).unwrap()
    }

    #[test]
    fn gcd_of_products() {
        let g = gcd(&a("(x - y)*(x^2 + y + 1)"), &a("(x - y)*(y - 3)")).unwrap();
        assert_eq!(g, a("x - y"));
        let g = gcd(&a("x^2 - 1"), &a("x^2 + 2*x + 1")).unwrap();
        assert_eq!(g, a("x + 1"));
        assert!(is_unit(&gcd(&a("x"), &a("y")).unwrap()));
        let g = gcd(&p("X*Z*(X + Y)"), &p("Z^2*(X + Y)*(Y - Z)")).unwrap();
        assert_eq!(g, p("X*Z + Y*Z"));
    }

    #[test]
    fn squarefree_examples() {
        assert!(!is_squarefree(&a("(x - y)^2")).unwrap());
        assert!(is_squarefree(&a("x^2 + y^2 - 1")).unwrap());
        assert!(is_squarefree(&a("x*y*(y - x - 1)")).unwrap());
        assert!(!is_squarefree(&a("x*(y - 1)^2*(x + 3)")).unwrap());
        assert!(!is_squarefree(&p("X*Z^2")).unwrap());
        assert!(is_squarefree(&p("X*Y*(Y - X - Z)")).unwrap());
        assert_eq!(is_squarefree(&MultiPoly::zero(Arity::Affine)), Err(PolyError::ZeroPolynomial));
    }

    #[test]
    fn resultant_detects_common_roots() {
        // circle and line y = x meet at x = ±1/√2  → resultant 2x² - 1 (up to unit)
        let r = resultant_y(&a("x^2 + y^2 - 1"), &a("y - x"));
        let r = r.monic();
        assert_eq!(r, UniPoly::new(vec![GaussianRational::from_ratio(-1, 2), GaussianRational::zero(), GaussianRational::one()]));
        let r = resultant_y(&a("y^2 - x"), &a("y^2 - x"));
        assert!(r.is_zero());
    }
}
