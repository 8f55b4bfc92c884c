use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::gaussian::GaussianRational;
use super::PolyError;

/// Variable set of a polynomial: affine `(x, y)` or homogeneous `(X, Y, Z)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum Arity {
    Affine,
    Projective,
}

impl Arity {
    pub fn nvars(self) -> usize {
        match self {
            Arity::Affine => 2,
            Arity::Projective => 3,
        }
    }

    pub fn var_names(self) -> &'static [&'static str] {
        match self {
            Arity::Affine => &["x", "y"],
            Arity::Projective => &["X", "Y", "Z"],
        }
    }
}

/// Exponent vector. Unused trailing slots stay zero for affine polynomials.
///
/// Ordered graded-lexicographically with `x > y > z`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Monomial(pub [u32; 3]);

impl Monomial {
    pub const ONE: Monomial = Monomial([0, 0, 0]);

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn var(idx: usize, e: u32) -> Self {
        let mut m = [0; 3];
        m[idx] = e;
        Monomial(m)
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        Monomial([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }

    pub fn divides(&self, o: &Monomial) -> bool {
        (0..3).all(|k| self.0[k] <= o.0[k])
    }

    pub fn div(&self, o: &Monomial) -> Monomial {
        Monomial([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Sparse exact polynomial over ℚ(i) in two or three variables.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    arity: Arity,
    terms: BTreeMap<Monomial, GaussianRational>,
}

impl MultiPoly {
    pub fn zero(arity: Arity) -> Self {
        Self { arity, terms: BTreeMap::new() }
    }

    pub fn constant(arity: Arity, c: GaussianRational) -> Self {
        let mut p = Self::zero(arity);
        p.add_term(Monomial::ONE, c);
        p
    }

    pub fn one(arity: Arity) -> Self {
        Self::constant(arity, GaussianRational::one())
    }

    pub fn int(arity: Arity, n: i64) -> Self {
        Self::constant(arity, GaussianRational::from_int(n))
    }

    /// The variable with index `idx` (0 = x/X, 1 = y/Y, 2 = Z).
    pub fn var(arity: Arity, idx: usize) -> Self {
        assert!(idx < arity.nvars(), "variable index out of range");
        let mut p = Self::zero(arity);
        p.add_term(Monomial::var(idx, 1), GaussianRational::one());
        p
    }

    pub fn from_terms<I>(arity: Arity, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, GaussianRational)>,
    {
        let mut p = Self::zero(arity);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn arity(&self) -> Arity {
        self.arity
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| *m == Monomial::ONE)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &GaussianRational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> GaussianRational {
        self.terms.get(m).cloned().unwrap_or_else(GaussianRational::zero)
    }

    pub fn constant_term(&self) -> GaussianRational {
        self.coeff(&Monomial::ONE)
    }

    /// Adds `c·m`, dropping the entry if it cancels.
    pub fn add_term(&mut self, m: Monomial, c: GaussianRational) {
        debug_assert!(m.0[self.arity.nvars()..].iter().all(|&e| e == 0));
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v += &c;
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    /// Total degree; `None` stands for the degree of the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn degree_in(&self, var: usize) -> Option<u32> {
        self.terms.keys().map(|m| m.0[var]).max()
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &GaussianRational)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coeff(&self) -> GaussianRational {
        self.leading_term()
            .map(|(_, c)| c.clone())
            .unwrap_or_else(GaussianRational::zero)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(Monomial::degree);
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    pub fn homogeneous_part(&self, d: u32) -> MultiPoly {
        Self::from_terms(
            self.arity,
            self.terms
                .iter()
                .filter(|(m, _)| m.degree() == d)
                .map(|(m, c)| (*m, c.clone())),
        )
    }

    pub fn has_real_coefficients(&self) -> bool {
        self.terms.values().all(GaussianRational::is_real)
    }

    pub fn checked_add(&self, o: &MultiPoly) -> Result<MultiPoly, PolyError> {
        self.same_arity(o)?;
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(*m, c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, o: &MultiPoly) -> Result<MultiPoly, PolyError> {
        self.same_arity(o)?;
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(*m, -c);
        }
        Ok(out)
    }

    pub fn checked_mul(&self, o: &MultiPoly) -> Result<MultiPoly, PolyError> {
        self.same_arity(o)?;
        let mut out = Self::zero(self.arity);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        Ok(out)
    }

    fn same_arity(&self, o: &MultiPoly) -> Result<(), PolyError> {
        if self.arity == o.arity {
            Ok(())
        } else {
            Err(PolyError::ArityMismatch { left: self.arity, right: o.arity })
        }
    }

    pub fn scale(&self, c: &GaussianRational) -> MultiPoly {
        if c.is_zero() {
            return Self::zero(self.arity);
        }
        Self {
            arity: self.arity,
            terms: self.terms.iter().map(|(m, v)| (*m, v * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> MultiPoly {
        Self {
            arity: self.arity,
            terms: self.terms.iter().map(|(k, v)| (k.mul(m), v.clone())).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> MultiPoly {
        let mut acc = Self::one(self.arity);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Formal partial derivative with respect to variable `var`.
    pub fn partial(&self, var: usize) -> MultiPoly {
        assert!(var < self.arity.nvars(), "variable index out of range");
        let mut out = Self::zero(self.arity);
        for (m, c) in &self.terms {
            let e = m.0[var];
            if e == 0 {
                continue;
            }
            let mut nm = *m;
            nm.0[var] -= 1;
            out.add_term(nm, c * &GaussianRational::from_int(e as i64));
        }
        out
    }

    /// `F(X,Y,Z) = Zⁿ f(X/Z, Y/Z)`.
    pub fn homogenize(&self, n: u32) -> Result<MultiPoly, PolyError> {
        if self.arity != Arity::Affine {
            return Err(PolyError::WrongArity { expected: Arity::Affine });
        }
        if let Some(d) = self.degree() {
            if n < d {
                return Err(PolyError::HomogenizeDegree { requested: n, degree: d });
            }
        }
        Ok(Self::from_terms(
            Arity::Projective,
            self.terms.iter().map(|(m, c)| {
                (Monomial([m.0[0], m.0[1], n - m.degree()]), c.clone())
            }),
        ))
    }

    /// Substitutes `Z = 1`.
    pub fn dehomogenize(&self) -> Result<MultiPoly, PolyError> {
        if self.arity != Arity::Projective {
            return Err(PolyError::WrongArity { expected: Arity::Projective });
        }
        Ok(Self::from_terms(
            Arity::Affine,
            self.terms.iter().map(|(m, c)| (Monomial([m.0[0], m.0[1], 0]), c.clone())),
        ))
    }

    /// Top-degree homogeneous part.
    pub fn leading_form(&self) -> Result<MultiPoly, PolyError> {
        match self.degree() {
            None => Err(PolyError::ZeroPolynomial),
            Some(d) => Ok(self.homogeneous_part(d)),
        }
    }

    pub fn eval(&self, point: &[GaussianRational]) -> GaussianRational {
        assert_eq!(point.len(), self.arity.nvars());
        let mut acc = GaussianRational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (k, x) in point.iter().enumerate() {
                if m.0[k] > 0 {
                    t = &t * &x.pow(m.0[k]);
                }
            }
            acc += &t;
        }
        acc
    }

    /// Replaces variable `var` by the constant `value`; arity is kept.
    pub fn substitute(&self, var: usize, value: &GaussianRational) -> MultiPoly {
        let mut out = Self::zero(self.arity);
        for (m, c) in &self.terms {
            let mut nm = *m;
            let e = nm.0[var];
            nm.0[var] = 0;
            out.add_term(nm, c * &value.pow(e));
        }
        out
    }

    /// Substitutes polynomial `images[k]` for variable `k`. All images must
    /// share one arity, which becomes the arity of the result.
    pub fn compose(&self, images: &[MultiPoly]) -> MultiPoly {
        assert_eq!(images.len(), self.arity.nvars());
        let target = images[0].arity;
        let max_e: Vec<u32> = (0..images.len())
            .map(|k| self.degree_in(k).unwrap_or(0))
            .collect();
        let powers: Vec<Vec<MultiPoly>> = images
            .iter()
            .zip(&max_e)
            .map(|(img, &e)| {
                let mut v = vec![MultiPoly::one(target)];
                for i in 0..e as usize {
                    let next = &v[i] * img;
                    v.push(next);
                }
                v
            })
            .collect();
        let mut out = Self::zero(target);
        for (m, c) in &self.terms {
            let mut t = MultiPoly::constant(target, c.clone());
            for k in 0..images.len() {
                if m.0[k] > 0 {
                    t = &t * &powers[k][m.0[k] as usize];
                }
            }
            out = &out + &t;
        }
        out
    }

    /// Reinterprets an affine polynomial as a projective one not involving
    /// `Z` (or vice versa when `Z` is absent).
    pub fn with_arity(&self, arity: Arity) -> Result<MultiPoly, PolyError> {
        if arity == Arity::Affine && self.degree_in(2).unwrap_or(0) > 0 {
            return Err(PolyError::WrongArity { expected: Arity::Projective });
        }
        Ok(Self { arity, terms: self.terms.clone() })
    }

    /// Quotient `q` with `self = q·b`, or `NotDivisible`.
    pub fn exact_divide(&self, b: &MultiPoly) -> Result<MultiPoly, PolyError> {
        self.same_arity(b)?;
        let (lm, lc) = match b.leading_term() {
            None => return Err(PolyError::DivisionByZero),
            Some((m, c)) => (*m, c.clone()),
        };
        let lc_inv = lc.inv().expect("nonzero leading coefficient");
        let mut r = self.clone();
        let mut q = Self::zero(self.arity);
        while let Some((rm, rc)) = r.leading_term() {
            if !lm.divides(rm) {
                return Err(PolyError::NotDivisible);
            }
            let tm = rm.div(&lm);
            let tc = rc * &lc_inv;
            q.add_term(tm, tc.clone());
            let sub = b.mul_monomial(&tm).scale(&tc);
            r = &r - &sub;
        }
        Ok(q)
    }

    /// Divides by the leading coefficient.
    pub fn monic(&self) -> MultiPoly {
        match self.leading_coeff().inv() {
            Some(inv) => self.scale(&inv),
            None => self.clone(),
        }
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (m, c) in &self.terms {
            let (re, _) = c.to_f64_pair();
            let mut t = re;
            for (k, &x) in point.iter().enumerate() {
                t *= x.powi(m.0[k] as i32);
            }
            acc += t;
        }
        acc
    }
}

impl<'a> Add<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn add(self, o: &MultiPoly) -> MultiPoly {
        self.checked_add(o).expect("arity mismatch in polynomial addition")
    }
}

impl<'a> Sub<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn sub(self, o: &MultiPoly) -> MultiPoly {
        self.checked_sub(o).expect("arity mismatch in polynomial subtraction")
    }
}

impl<'a> Mul<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn mul(self, o: &MultiPoly) -> MultiPoly {
        self.checked_mul(o).expect("arity mismatch in polynomial multiplication")
    }
}

impl Add for MultiPoly {
    type Output = MultiPoly;
    fn add(self, o: MultiPoly) -> MultiPoly {
        &self + &o
    }
}

impl Sub for MultiPoly {
    type Output = MultiPoly;
    fn sub(self, o: MultiPoly) -> MultiPoly {
        &self - &o
    }
}

impl Mul for MultiPoly {
    type Output = MultiPoly;
    fn mul(self, o: MultiPoly) -> MultiPoly {
        &self * &o
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.scale(&GaussianRational::from_int(-1))
    }
}

impl Neg for MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        -&self
    }
}

fn fmt_monomial(m: &Monomial, names: &[&str]) -> String {
    let mut parts = Vec::new();
    for (k, name) in names.iter().enumerate() {
        match m.0[k] {
            0 => {}
            1 => parts.push((*name).to_string()),
            e => parts.push(format!("{}^{}", name, e)),
        }
    }
    parts.join("*")
}

impl fmt::Display for MultiPoly {
    /// Canonical form: descending graded-lex order, explicit `*`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let names = self.arity.var_names();
        let mut out = String::new();
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            // pull a leading minus out of real and purely imaginary coefficients
            let negative = (c.im.is_zero() && c.re.is_negative())
                || (c.re.is_zero() && c.im.is_negative());
            let mag = if negative { -c } else { c.clone() };
            if idx == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let mono = fmt_monomial(m, names);
            if mono.is_empty() {
                out.push_str(&mag.to_string());
            } else if mag.is_one() {
                out.push_str(&mono);
            } else {
                out.push_str(&format!("{}*{}", mag, mono));
            }
        }
        write!(f, "{}", out)
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> MultiPoly {
        MultiPoly::var(Arity::Affine, 0)
    }
    fn y() -> MultiPoly {
        MultiPoly::var(Arity::Affine, 1)
    }
    fn c(n: i64) -> MultiPoly {
        MultiPoly::int(Arity::Affine, n)
    }

    #[test]
    fn addition_cancels_to_empty_map() {
        assert_eq!(&(&x() + &y()) + &(&x() - &y()), &c(2) * &x());
        let x2 = &x() * &x();
        let z = &x2 + &(-&x2);
        assert!(z.is_zero());
        assert_eq!(z.num_terms(), 0);
        assert_eq!(z.degree(), None);
        assert_eq!(&x2 + &MultiPoly::zero(Arity::Affine), x2);
    }

    #[test]
    fn products() {
        let d = &(&x() - &y()) * &(&x() + &y());
        assert_eq!(d, &(&x() * &x()) - &(&y() * &y()));
        let i = MultiPoly::constant(Arity::Affine, GaussianRational::i());
        assert_eq!(&i * &i, c(-1));
        assert!((&d * &MultiPoly::zero(Arity::Affine)).is_zero());
        assert_eq!(d.degree(), Some(2));
    }

    #[test]
    fn arity_mismatch_is_an_error() {
        let p = MultiPoly::var(Arity::Projective, 2);
        assert!(matches!(x().checked_add(&p), Err(PolyError::ArityMismatch { .. })));
        assert!(x().checked_mul(&p).is_err());
    }

    #[test]
    fn partials() {
        let circle = &(&(&x() * &x()) + &(&y() * &y())) - &c(1);
        assert_eq!(circle.partial(0), &c(2) * &x());
        assert!(c(7).partial(1).is_zero());
        let xyz = &(&MultiPoly::var(Arity::Projective, 0) * &MultiPoly::var(Arity::Projective, 1))
            * &MultiPoly::var(Arity::Projective, 2);
        assert_eq!(
            xyz.partial(2),
            &MultiPoly::var(Arity::Projective, 0) * &MultiPoly::var(Arity::Projective, 1)
        );
    }

    #[test]
    fn homogenize_examples() {
        let f = &(&(&x() * &x()) + &y()) - &c(1);
        let big_x = MultiPoly::var(Arity::Projective, 0);
        let big_y = MultiPoly::var(Arity::Projective, 1);
        let big_z = MultiPoly::var(Arity::Projective, 2);
        let expect = &(&(&big_x * &big_x) + &(&big_y * &big_z)) - &(&big_z * &big_z);
        assert_eq!(f.homogenize(2).unwrap(), expect);
        assert_eq!((-&y()).homogenize(1).unwrap(), -&big_y);
        assert!(matches!(f.homogenize(1), Err(PolyError::HomogenizeDegree { .. })));

        let three_lines = &(&x() * &y()) * &(&(&y() - &x()) - &c(1));
        let big_f = &(&big_x * &big_y) * &(&(&big_y - &big_x) - &big_z);
        assert_eq!(three_lines.homogenize(3).unwrap(), big_f);
        assert_eq!(big_f.dehomogenize().unwrap(), three_lines);
        assert_eq!(big_z.pow(4).dehomogenize().unwrap(), c(1));
    }

    #[test]
    fn exact_division() {
        let a = &(&x() * &x()) - &(&y() * &y());
        assert_eq!(a.exact_divide(&(&x() - &y())).unwrap(), &x() + &y());
        let b = &(&x() * &x()) + &c(1);
        assert_eq!(b.exact_divide(&(&x() - &y())), Err(PolyError::NotDivisible));
        assert!(MultiPoly::zero(Arity::Affine).exact_divide(&x()).unwrap().is_zero());
        assert_eq!(x().exact_divide(&MultiPoly::zero(Arity::Affine)), Err(PolyError::DivisionByZero));
    }

    #[test]
    fn leading_forms() {
        let f = &(&(&x() * &x()) + &(&y() * &y())) - &c(1);
        assert_eq!(f.leading_form().unwrap(), &(&x() * &x()) + &(&y() * &y()));
        let g = &(&x() * &y()) * &(&(&y() - &x()) - &c(1));
        assert_eq!(g.leading_form().unwrap(), &(&x() * &y()) * &(&y() - &x()));
        assert_eq!(MultiPoly::zero(Arity::Affine).leading_form(), Err(PolyError::ZeroPolynomial));
    }

    #[test]
    fn canonical_printing() {
        let f = &(&(&x() * &x()) + &(&y() * &y())) - &c(1);
        assert_eq!(f.to_string(), "x^2 + y^2 - 1");
        assert_eq!(MultiPoly::zero(Arity::Affine).to_string(), "0");
        let g = x().scale(&GaussianRational::from_parts((1, 2), (3, 1)));
        assert_eq!(g.to_string(), "(1/2 + 3*i)*x");
    }
}
