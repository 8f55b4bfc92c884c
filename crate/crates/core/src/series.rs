//! Truncated power series in one variable `t` over ℚ(i).

use std::fmt;

use num_traits::{One, Zero};

use crate::polyring::{GaussianRational, MultiPoly};

/// `Σ_{k ≤ prec} c_k t^k`, known modulo `t^{prec+1}`.
#[derive(Clone, PartialEq, Eq)]
pub struct Series {
    c: Vec<GaussianRational>,
}

impl Series {
    pub fn new(mut coeffs: Vec<GaussianRational>, prec: usize) -> Self {
        coeffs.resize(prec + 1, GaussianRational::zero());
        Self { c: coeffs }
    }

    pub fn zero(prec: usize) -> Self {
        Self::new(Vec::new(), prec)
    }

    pub fn constant(c: GaussianRational, prec: usize) -> Self {
        Self::new(vec![c], prec)
    }

    /// The series `t`.
    pub fn t(prec: usize) -> Self {
        Self::new(vec![GaussianRational::zero(), GaussianRational::one()], prec)
    }

    pub fn prec(&self) -> usize {
        self.c.len() - 1
    }

    pub fn coeffs(&self) -> &[GaussianRational] {
        &self.c
    }

    pub fn coeff(&self, k: usize) -> GaussianRational {
        self.c.get(k).cloned().unwrap_or_else(GaussianRational::zero)
    }

    /// Index of the first nonzero coefficient, `None` if zero to precision.
    pub fn order(&self) -> Option<usize> {
        self.c.iter().position(|c| !c.is_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.order().is_none()
    }

    pub fn truncate(&self, prec: usize) -> Self {
        Self::new(self.c[..=prec.min(self.prec())].to_vec(), prec.min(self.prec()))
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.prec().min(o.prec());
        Self { c: (0..=n).map(|k| &self.c[k] + &o.c[k]).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.prec().min(o.prec());
        Self { c: (0..=n).map(|k| &self.c[k] - &o.c[k]).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.prec().min(o.prec());
        let mut c = vec![GaussianRational::zero(); n + 1];
        for (i, a) in self.c.iter().enumerate().take(n + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate().take(n + 1 - i) {
                if !b.is_zero() {
                    c[i + j] += &(a * b);
                }
            }
        }
        Self { c }
    }

    pub fn scale(&self, s: &GaussianRational) -> Self {
        Self { c: self.c.iter().map(|a| a * s).collect() }
    }

    /// `d/dt`; precision drops by one.
    pub fn derivative(&self) -> Self {
        if self.prec() == 0 {
            return Self::zero(0);
        }
        let c = (1..self.c.len())
            .map(|k| &self.c[k] * &GaussianRational::from_int(k as i64))
            .collect();
        Self { c }
    }

    /// Multiplicative inverse; `None` unless the constant term is nonzero.
    pub fn inverse(&self) -> Option<Self> {
        let a0 = self.c[0].inv()?;
        let n = self.prec();
        let mut b = vec![GaussianRational::zero(); n + 1];
        b[0] = a0.clone();
        for k in 1..=n {
            let mut s = GaussianRational::zero();
            for j in 1..=k {
                if !self.c[j].is_zero() {
                    s += &(&self.c[j] * &b[k - j]);
                }
            }
            b[k] = -&(&s * &a0);
        }
        Some(Self { c: b })
    }

    /// Evaluates an affine polynomial at `(u(t), v(t))`.
    pub fn compose(f: &MultiPoly, u: &Series, v: &Series) -> Series {
        let n = u.prec().min(v.prec());
        let du = f.degree_in(0).unwrap_or(0) as usize;
        let dv = f.degree_in(1).unwrap_or(0) as usize;
        let powers = |s: &Series, d: usize| {
            let mut out = vec![Series::constant(GaussianRational::one(), n)];
            for k in 1..=d {
                let next = out[k - 1].mul(s);
                out.push(next);
            }
            out
        };
        let pu = powers(u, du);
        let pv = powers(v, dv);
        let mut acc = Series::zero(n);
        for (m, c) in f.terms() {
            let term = pu[m.0[0] as usize].mul(&pv[m.0[1] as usize]).scale(c);
            acc = acc.add(&term);
        }
        acc
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.c.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{}", c)?,
                1 => write!(f, "{}*t", c)?,
                _ => write!(f, "{}*t^{}", c, k)?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(t^{})", self.prec() + 1)
    }
}

impl fmt::Debug for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

/// Solves `h(t, w(t)) = 0` with `w(0) = 0` to precision `prec`, given
/// `h(0,0) = 0` and `∂h/∂w(0,0) ≠ 0`. Newton iteration; each step doubles
/// the number of correct coefficients.
pub fn implicit_series(h: &MultiPoly, prec: usize) -> Option<Series> {
    let hw = h.partial(1);
    let origin = [GaussianRational::zero(), GaussianRational::zero()];
    if !h.eval(&origin).is_zero() || hw.eval(&origin).is_zero() {
        return None;
    }
    let t = Series::t(prec);
    let mut w = Series::zero(prec);
    let mut correct = 1usize;
    while correct <= prec {
        let e = Series::compose(h, &t, &w);
        if e.is_zero() {
            break;
        }
        let d = Series::compose(&hw, &t, &w).inverse()?;
        w = w.sub(&e.mul(&d));
        correct *= 2;
    }
    Some(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::Arity;
    use crate::textio::parse_poly;

    fn g(n: i64, d: i64) -> GaussianRational {
        GaussianRational::from_ratio(n, d)
    }

    #[test]
    fn inverse_of_one_minus_t() {
        let s = Series::new(vec![g(1, 1), g(-1, 1)], 6);
        let inv = s.inverse().unwrap();
        assert!(inv.coeffs().iter().all(|c| *c == g(1, 1)));
        assert!(s.mul(&inv).sub(&Series::constant(g(1, 1), 6)).is_zero());
    }

    #[test]
    fn circle_branch_at_one_zero() {
        // x = 1 + w(t), y = t on x² + y² − 1: w = −t²/2 − t⁴/8 − t⁶/16 − …
        let h = parse_poly("y^2 + 2*y + x^2", Arity::Affine).unwrap();
        let w = implicit_series(&h, 8).unwrap();
        assert_eq!(w.coeff(2), g(-1, 2));
        assert_eq!(w.coeff(4), g(-1, 8));
        assert_eq!(w.coeff(6), g(-1, 16));
        assert_eq!(w.coeff(8), g(-5, 128));
        assert!(w.coeff(3).is_zero());
    }
}
