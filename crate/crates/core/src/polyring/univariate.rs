//! Dense univariate polynomials over ℚ(i) and exact root extraction.

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::gaussian::GaussianRational;
use super::poly::{Arity, Monomial, MultiPoly};

/// Coefficients indexed by power; no trailing zeros.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct UniPoly {
    coeffs: Vec<GaussianRational>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<GaussianRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: GaussianRational) -> Self {
        Self::new(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(GaussianRational::one())
    }

    /// `x - r`.
    pub fn linear_root(r: &GaussianRational) -> Self {
        Self::new(vec![-r, GaussianRational::one()])
    }

    pub fn coeffs(&self) -> &[GaussianRational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> GaussianRational {
        self.coeffs.get(k).cloned().unwrap_or_else(GaussianRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> GaussianRational {
        self.coeffs.last().cloned().unwrap_or_else(GaussianRational::zero)
    }

    /// Lowest power with a nonzero coefficient.
    pub fn order(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// Extracts variable `var` of `p` as the univariate indeterminate. Every
    /// other variable must be absent.
    pub fn from_multi(p: &MultiPoly, var: usize) -> Option<Self> {
        let mut coeffs = vec![GaussianRational::zero(); p.degree_in(var).unwrap_or(0) as usize + 1];
        for (m, c) in p.terms() {
            for k in 0..p.arity().nvars() {
                if k != var && m.0[k] != 0 {
                    return None;
                }
            }
            coeffs[m.0[var] as usize] = c.clone();
        }
        Some(Self::new(coeffs))
    }

    pub fn to_multi(&self, arity: Arity, var: usize) -> MultiPoly {
        MultiPoly::from_terms(
            arity,
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| (Monomial::var(var, k as u32), c.clone())),
        )
    }

    pub fn eval(&self, x: &GaussianRational) -> GaussianRational {
        let mut acc = GaussianRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }

    pub fn eval_c64(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            let (re, im) = c.to_f64_pair();
            acc = acc * z + Complex64::new(re, im);
        }
        acc
    }

    pub fn add(&self, o: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        Self::new((0..n).map(|k| &self.coeff(k) + &o.coeff(k)).collect())
    }

    pub fn sub(&self, o: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        Self::new((0..n).map(|k| &self.coeff(k) - &o.coeff(k)).collect())
    }

    pub fn mul(&self, o: &UniPoly) -> UniPoly {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut out = vec![GaussianRational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += &(a * b);
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, c: &GaussianRational) -> UniPoly {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn derivative(&self) -> UniPoly {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * &GaussianRational::from_int(k as i64))
                .collect(),
        )
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &UniPoly) -> (UniPoly, UniPoly) {
        let dd = d.degree().expect("division by zero polynomial");
        let inv = d.leading().inv().expect("nonzero leading coefficient");
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut q = vec![GaussianRational::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] * &inv;
            if c.is_zero() {
                continue;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                let t = &c * dc;
                r[k + j] -= &t;
            }
            q[k] = c;
        }
        r.truncate(dd);
        (Self::new(q), Self::new(r))
    }

    pub fn exact_div(&self, d: &UniPoly) -> Option<UniPoly> {
        let (q, r) = self.div_rem(d);
        r.is_zero().then_some(q)
    }

    pub fn monic(&self) -> UniPoly {
        match self.leading().inv() {
            Some(inv) => self.scale(&inv),
            None => self.clone(),
        }
    }

    pub fn gcd(&self, o: &UniPoly) -> UniPoly {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Product of the distinct irreducible factors (monic).
    pub fn squarefree_part(&self) -> UniPoly {
        if self.degree().unwrap_or(0) == 0 {
            return self.monic();
        }
        let g = self.gcd(&self.derivative());
        self.exact_div(&g).expect("gcd divides").monic()
    }

    /// Multiplies through by the lcm of all denominators, giving Gaussian
    /// integer coefficients.
    fn clear_denominators(&self) -> UniPoly {
        let mut l = BigInt::one();
        for c in &self.coeffs {
            l = l.lcm(&c.denom_lcm());
        }
        self.scale(&GaussianRational::from_rational(BigRational::from_integer(l)))
    }
}

impl fmt::Debug for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_multi(Arity::Affine, 0))
    }
}

/// Distinct roots lying in ℚ(i), plus the number of roots (counted once)
/// that could not be expressed there.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootSet {
    pub roots: Vec<GaussianRational>,
    pub residual: usize,
}

/// Exact extraction of the ℚ(i)-rational roots of `p`.
///
/// Candidates come from floating-point approximations: for a Gaussian-integer
/// polynomial with leading coefficient `a`, every root `r ∈ ℚ(i)` has
/// `a·r ∈ ℤ[i]`, so rounding `a·z` for an approximation `z` proposes the exact
/// value, which is then confirmed by exact evaluation. The last quadratic
/// factor is solved in closed form.
pub fn gaussian_roots(p: &UniPoly) -> RootSet {
    let mut rest = p.squarefree_part();
    let mut roots = Vec::new();
    loop {
        let Some(deg) = rest.degree() else { break };
        match deg {
            0 => break,
            1 => {
                roots.push(-&(&rest.coeff(0) * &rest.leading().inv().unwrap()));
                rest = UniPoly::one();
                break;
            }
            2 => {
                if let Some((r1, r2)) = quadratic_roots(&rest) {
                    roots.push(r1);
                    roots.push(r2);
                    rest = UniPoly::one();
                }
                break;
            }
            _ => {}
        }
        let found = numeric_candidates(&rest)
            .into_iter()
            .find(|r| rest.eval(r).is_zero());
        match found {
            Some(r) => {
                rest = rest.exact_div(&UniPoly::linear_root(&r)).expect("verified root");
                roots.push(r);
            }
            None => break,
        }
    }
    roots.sort_by(cmp_gaussian);
    roots.dedup();
    RootSet { roots, residual: rest.degree().unwrap_or(0) }
}

pub(crate) fn cmp_gaussian(a: &GaussianRational, b: &GaussianRational) -> std::cmp::Ordering {
    a.re.cmp(&b.re).then_with(|| a.im.cmp(&b.im))
}

fn quadratic_roots(p: &UniPoly) -> Option<(GaussianRational, GaussianRational)> {
    let a = p.coeff(2);
    let b = p.coeff(1);
    let c = p.coeff(0);
    let four = GaussianRational::from_int(4);
    let disc = &(&b * &b) - &(&four * &(&a * &c));
    let s = disc.sqrt()?;
    let two_a_inv = (&GaussianRational::from_int(2) * &a).inv()?;
    let nb = -&b;
    Some((&(&nb + &s) * &two_a_inv, &(&nb - &s) * &two_a_inv))
}

fn numeric_candidates(p: &UniPoly) -> Vec<GaussianRational> {
    let ip = p.clear_denominators();
    let lead = ip.leading();
    let approx = approximate_roots(&ip);
    let (lr, li) = lead.to_f64_pair();
    let lead_c = Complex64::new(lr, li);
    let lead_inv = lead.inv().expect("nonzero leading coefficient");
    let mut out = Vec::new();
    for z in approx {
        let w = lead_c * z;
        if !(w.re.is_finite() && w.im.is_finite()) || w.norm() > 1e15 {
            continue;
        }
        let g = GaussianRational::new(
            BigRational::from_integer(BigInt::from(w.re.round() as i64)),
            BigRational::from_integer(BigInt::from(w.im.round() as i64)),
        );
        out.push(&g * &lead_inv);
    }
    out
}

/// Aberth iteration in double precision followed by Newton polishing.
pub fn approximate_roots(p: &UniPoly) -> Vec<Complex64> {
    let n = match p.degree() {
        Some(d) if d > 0 => d,
        _ => return Vec::new(),
    };
    // scale to avoid overflow in f64
    let lead = p.leading();
    let monic = p.scale(&lead.inv().unwrap());
    let cs: Vec<Complex64> = monic
        .coeffs()
        .iter()
        .map(|c| {
            let (re, im) = c.to_f64_pair();
            Complex64::new(re, im)
        })
        .collect();
    let eval = |z: Complex64| -> (Complex64, Complex64) {
        let mut v = Complex64::new(0.0, 0.0);
        let mut d = Complex64::new(0.0, 0.0);
        for c in cs.iter().rev() {
            d = d * z + v;
            v = v * z + c;
        }
        (v, d)
    };
    // Cauchy bound for the initial circle
    let bound = 1.0 + cs[..n].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut zs: Vec<Complex64> = (0..n)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * (k as f64) / (n as f64) + 0.4;
            Complex64::from_polar(bound * 0.5 + 0.1, theta)
        })
        .collect();
    for _ in 0..500 {
        let mut max_step: f64 = 0.0;
        for i in 0..n {
            let (v, d) = eval(zs[i]);
            if v.norm() == 0.0 {
                continue;
            }
            let ratio = v / d;
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    let diff = zs[i] - zs[j];
                    if diff.norm() > 0.0 {
                        s += diff.inv();
                    }
                }
            }
            let denom = Complex64::new(1.0, 0.0) - ratio * s;
            let step = if denom.norm() > 0.0 { ratio / denom } else { ratio };
            if step.re.is_finite() && step.im.is_finite() {
                zs[i] -= step;
                max_step = max_step.max(step.norm() / (1.0 + zs[i].norm()));
            }
        }
        if max_step < 1e-15 {
            break;
        }
    }
    for z in zs.iter_mut() {
        for _ in 0..5 {
            let (v, d) = eval(*z);
            if d.norm() == 0.0 {
                break;
            }
            let step = v / d;
            if !(step.re.is_finite() && step.im.is_finite()) {
                break;
            }
            *z -= step;
        }
    }
    zs
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(re: i64, im: i64) -> GaussianRational {
        GaussianRational::from_parts((re, 1), (im, 1))
    }

    fn from_roots(rs: &[GaussianRational]) -> UniPoly {
        rs.iter().fold(UniPoly::one(), |acc, r| acc.mul(&UniPoly::linear_root(r)))
    }

    #[test]
    fn recovers_gaussian_roots() {
        let rs = vec![
            g(1, 0),
            g(-2, 0),
            g(0, 1),
            GaussianRational::from_parts((3, 7), (-1, 2)),
            g(5, 5),
        ];
        let p = from_roots(&rs).scale(&GaussianRational::from_ratio(3, 5));
        let set = gaussian_roots(&p);
        assert_eq!(set.residual, 0);
        let mut expect = rs.clone();
        expect.sort_by(cmp_gaussian);
        assert_eq!(set.roots, expect);
    }

    #[test]
    fn irrational_roots_become_residual() {
        // (x² - 2)(x - 1)(x³ - 3)
        let p = UniPoly::new(vec![g(-2, 0), g(0, 0), g(1, 0)])
            .mul(&UniPoly::linear_root(&g(1, 0)))
            .mul(&UniPoly::new(vec![g(-3, 0), g(0, 0), g(0, 0), g(1, 0)]));
        let set = gaussian_roots(&p);
        assert_eq!(set.roots, vec![g(1, 0)]);
        assert_eq!(set.residual, 5);
    }

    #[test]
    fn repeated_roots_counted_once() {
        let p = from_roots(&[g(1, 1), g(1, 1), g(0, -1)]);
        let set = gaussian_roots(&p);
        assert_eq!(set.roots.len(), 2);
        assert_eq!(set.residual, 0);
    }

    #[test]
    fn quadratic_closed_form() {
        // x² + 1
        let p = UniPoly::new(vec![g(1, 0), g(0, 0), g(1, 0)]);
        let set = gaussian_roots(&p);
        assert_eq!(set.roots, vec![g(0, -1), g(0, 1)]);
    }

    #[test]
    fn gcd_and_division() {
        let a = from_roots(&[g(1, 0), g(2, 0), g(3, 0)]);
        let b = from_roots(&[g(2, 0), g(3, 0), g(4, 0)]);
        assert_eq!(a.gcd(&b), from_roots(&[g(2, 0), g(3, 0)]));
        let (q, r) = a.div_rem(&b);
        assert_eq!(q.mul(&b).add(&r), a);
    }
}
