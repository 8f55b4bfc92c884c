//! Real ovals of plane curves: compactness of the real locus, oval counting
//! by marching squares with exact node signs, and predictor-corrector
//! tracing.
//!
//! Topology is decided from exact rational signs at grid nodes; floating
//! point only places vertices. Certification uses outward-rounded interval
//! arithmetic on the cells an oval visits.

use std::cell::RefCell;
use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::polyring::{ratio_to_f64, Arity, GaussianRational, MultiPoly, UniPoly};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TopoError {
    #[error("curve has non-real coefficients")]
    NonReal,
    #[error("expected an affine curve in x, y")]
    NotAffine,
    #[error("curve is the zero polynomial")]
    ZeroCurve,
    #[error("real locus is not compact; supply a box explicitly")]
    NotCompact,
    #[error("box is empty or inverted")]
    BadBox,
    #[error("resolution must be at least 2")]
    BadResolution,
    #[error("singular point of the curve near ({x:.6}, {y:.6})")]
    SingularPoint { x: f64, y: f64 },
    #[error("could not project ({x:.6}, {y:.6}) onto the curve")]
    CorrectionFailed { x: f64, y: f64 },
    #[error("trace did not close within {0} steps")]
    DidNotClose(usize),
}

fn require_real_affine(f: &MultiPoly) -> Result<(), TopoError> {
    if f.arity() != Arity::Affine {
        return Err(TopoError::NotAffine);
    }
    if f.is_zero() {
        return Err(TopoError::ZeroCurve);
    }
    if !f.has_real_coefficients() {
        return Err(TopoError::NonReal);
    }
    Ok(())
}

fn sign(r: &BigRational) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

/// Sturm sequence of the squarefree part; empty for constants.
fn sturm_sequence(p: &UniPoly) -> Vec<UniPoly> {
    let p = p.squarefree_part();
    if p.degree().unwrap_or(0) == 0 {
        return Vec::new();
    }
    let mut seq = vec![p.clone(), p.derivative()];
    loop {
        let n = seq.len();
        let (_, r) = seq[n - 2].div_rem(&seq[n - 1]);
        if r.is_zero() {
            break;
        }
        seq.push(r.scale(&-GaussianRational::one()));
    }
    seq
}

fn sign_changes(signs: impl Iterator<Item = i32>) -> usize {
    let nz: Vec<i32> = signs.filter(|&s| s != 0).collect();
    nz.windows(2).filter(|w| w[0] != w[1]).count()
}

fn changes_at(seq: &[UniPoly], x: &BigRational) -> usize {
    let x = GaussianRational::from_rational(x.clone());
    sign_changes(seq.iter().map(|s| sign(&s.eval(&x).re)))
}

/// Number of distinct real roots of a real univariate polynomial, by a
/// Sturm sequence.
pub fn real_root_count(p: &UniPoly) -> usize {
    let seq = sturm_sequence(p);
    let at_pos = seq.iter().map(|s| sign(&s.leading().re));
    let at_neg = seq.iter().map(|s| {
        let lc = sign(&s.leading().re);
        if s.degree().unwrap_or(0) % 2 == 0 {
            lc
        } else {
            -lc
        }
    });
    sign_changes(at_neg) - sign_changes(at_pos)
}

/// Distinct real roots in `(a, b]`.
pub fn real_roots_between(p: &UniPoly, a: &BigRational, b: &BigRational) -> usize {
    let seq = sturm_sequence(p);
    if seq.is_empty() {
        return 0;
    }
    changes_at(&seq, a) - changes_at(&seq, b)
}

/// True iff the top-degree form of `f` has no real zero on the unit circle,
/// which makes the real locus bounded.
pub fn compactness_check(f: &MultiPoly) -> Result<bool, TopoError> {
    require_real_affine(f)?;
    let d = f.degree().unwrap_or(0);
    if d == 0 {
        return Ok(true);
    }
    let top = f.homogeneous_part(d);
    // direction (0, 1)
    if top.coeff(&crate::polyring::Monomial([0, d, 0])).is_zero() {
        return Ok(false);
    }
    // directions (1, t)
    let restricted = top.substitute(0, &GaussianRational::one());
    let uni = UniPoly::from_multi(&restricted, 1).expect("affine");
    Ok(real_root_count(&uni) == 0)
}

/// Closed rectangle with rational corners.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rect {
    pub xmin: BigRational,
    pub xmax: BigRational,
    pub ymin: BigRational,
    pub ymax: BigRational,
}

impl Rect {
    pub fn new(xmin: BigRational, xmax: BigRational, ymin: BigRational, ymax: BigRational) -> Result<Self, TopoError> {
        if xmin >= xmax || ymin >= ymax {
            return Err(TopoError::BadBox);
        }
        Ok(Self { xmin, xmax, ymin, ymax })
    }

    /// `[−b, b]²`.
    pub fn square(b: BigRational) -> Result<Self, TopoError> {
        Self::new(-b.clone(), b.clone(), -b.clone(), b)
    }

    pub fn symmetric_int(b: i64) -> Self {
        Self::square(BigRational::from_integer(b.into())).expect("positive")
    }

    pub fn to_f64(&self) -> [f64; 4] {
        [ratio_to_f64(&self.xmin), ratio_to_f64(&self.xmax), ratio_to_f64(&self.ymin), ratio_to_f64(&self.ymax)]
    }
}

impl Serialize for Rect {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(4))?;
        for v in [&self.xmin, &self.xmax, &self.ymin, &self.ymax] {
            seq.serialize_element(&v.to_string())?;
        }
        seq.end()
    }
}

/// Default box `[−B, B]²`: `B` doubles from 1 until the top-degree form
/// dominates the rest outside the disc of radius `B`, then grows by 1/32 so
/// that simple rational points are unlikely to fall on grid nodes.
pub fn default_box(f: &MultiPoly) -> Result<Rect, TopoError> {
    if !compactness_check(f)? {
        return Err(TopoError::NotCompact);
    }
    let d = f.degree().unwrap_or(0);
    if d == 0 {
        return Ok(Rect::symmetric_int(1));
    }
    let top = f.homogeneous_part(d);
    let mass = |g: &MultiPoly| g.terms().map(|(_, c)| ratio_to_f64(&c.re).abs()).sum::<f64>();
    // min |top| on the unit circle: sampled, less a Lipschitz allowance for
    // the gaps between samples
    let samples = 4096;
    let sampled = (0..samples)
        .map(|k| {
            let th = std::f64::consts::TAU * k as f64 / samples as f64;
            top.eval_f64(&[th.cos(), th.sin()]).abs()
        })
        .fold(f64::INFINITY, f64::min);
    let c = sampled - d as f64 * mass(&top) * std::f64::consts::PI / samples as f64;
    let lower: Vec<(i32, f64)> = (0..d).map(|k| (k as i32 - d as i32, mass(&f.homogeneous_part(k)))).collect();
    // c − Σ A_k r^(k−d) increases with r; the curve lies in |p| < r once it is positive
    let outside = |r: f64| c - lower.iter().map(|&(e, a)| a * r.powi(e)).sum::<f64>() > 0.0;
    let mut eighths = 8i64;
    if c > 0.0 {
        while !outside(eighths as f64 / 8.0) && eighths < (1 << 40) {
            eighths *= 2;
        }
        let (mut lo, mut hi) = (eighths / 2, eighths);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if outside(mid as f64 / 8.0) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        eighths = hi.max(1);
    } else {
        eighths = 1 << 40;
    }
    Rect::square(BigRational::new((eighths * 33).into(), 256.into()))
}

/// Exact sign evaluation on a uniform grid over a rectangle: node
/// `(i, j)` is `(xmin + i·Δx, ymin + j·Δy)`. After clearing denominators
/// the curve becomes an integer form in `(a + i·b)` and `d`.
struct SignGrid {
    n: usize,
    terms: Vec<(u32, u32, BigInt)>,
    d: u32,
    ax: BigInt,
    bx: BigInt,
    dx: BigInt,
    ay: BigInt,
    by: BigInt,
    dy: BigInt,
}

impl SignGrid {
    fn new(f: &MultiPoly, rect: &Rect, n: usize) -> Self {
        let lcm = f.terms().fold(BigInt::one(), |acc, (_, c)| num_integer::Integer::lcm(&acc, c.re.denom()));
        let d = f.degree().unwrap_or(0);
        let terms = f
            .terms()
            .map(|(m, c)| (m.0[0], m.0[1], (c.re.clone() * BigRational::from_integer(lcm.clone())).to_integer()))
            .collect();
        let axis = |lo: &BigRational, hi: &BigRational| {
            let step = (hi - lo) / BigRational::from_integer(n.into());
            let den = lo.denom() * step.denom();
            (lo.numer() * step.denom(), step.numer() * lo.denom(), den)
        };
        let (ax, bx, dx) = axis(&rect.xmin, &rect.xmax);
        let (ay, by, dy) = axis(&rect.ymin, &rect.ymax);
        Self { n, terms, d, ax, bx, dx, ay, by, dy }
    }

    /// Signs of all nodes, row-major in `j`.
    fn signs(&self) -> Vec<i8> {
        let n1 = self.n + 1;
        let powers = |a: &BigInt, b: &BigInt, den: &BigInt| -> Vec<Vec<BigInt>> {
            (0..n1)
                .map(|i| {
                    let v = a + b * BigInt::from(i);
                    (0..=self.d).map(|e| num_traits::pow(v.clone(), e as usize) * num_traits::pow(den.clone(), (self.d - e) as usize)).collect()
                })
                .collect()
        };
        let px = powers(&self.ax, &self.bx, &self.dx);
        let py = powers(&self.ay, &self.by, &self.dy);
        let bits = |tab: &Vec<Vec<BigInt>>| tab.iter().flatten().map(|v| v.bits()).max().unwrap_or(0);
        let cbits = self.terms.iter().map(|t| t.2.bits()).max().unwrap_or(0);
        let budget = cbits + bits(&px) + bits(&py) + 64 - (self.terms.len() as u64).leading_zeros() as u64;
        let mut out = vec![0i8; n1 * n1];
        if budget < 126 {
            let small = |tab: Vec<Vec<BigInt>>| -> Vec<Vec<i128>> {
                tab.into_iter().map(|r| r.into_iter().map(|v| v.to_i128().unwrap()).collect()).collect()
            };
            let (px, py) = (small(px), small(py));
            let terms: Vec<(usize, usize, i128)> =
                self.terms.iter().map(|(a, b, c)| (*a as usize, *b as usize, c.to_i128().unwrap())).collect();
            for j in 0..n1 {
                for i in 0..n1 {
                    let v: i128 = terms.iter().map(|&(a, b, c)| c * px[i][a] * py[j][b]).sum();
                    out[j * n1 + i] = v.signum() as i8;
                }
            }
        } else {
            for j in 0..n1 {
                for i in 0..n1 {
                    let v: BigInt = self.terms.iter().map(|(a, b, c)| c * &px[i][*a as usize] * &py[j][*b as usize]).sum();
                    out[j * n1 + i] = match v.sign() {
                        num_bigint::Sign::Minus => -1,
                        num_bigint::Sign::NoSign => 0,
                        num_bigint::Sign::Plus => 1,
                    };
                }
            }
        }
        out
    }
}

/// Closed interval with outward rounding.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Iv {
    lo: f64,
    hi: f64,
}

impl Iv {
    fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    fn from_ratio(r: &BigRational) -> Self {
        let v = ratio_to_f64(r);
        let mut lo = v;
        let mut hi = v;
        for _ in 0..4 {
            lo = lo.next_down();
            hi = hi.next_up();
        }
        Self { lo, hi }
    }

    fn add(self, o: Self) -> Self {
        Self::new((self.lo + o.lo).next_down(), (self.hi + o.hi).next_up())
    }

    fn mul(self, o: Self) -> Self {
        let p = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi];
        let lo = p.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Self::new(lo.next_down(), hi.next_up())
    }

    fn pow(self, e: u32) -> Self {
        if e == 0 {
            return Self::new(1.0, 1.0);
        }
        let mut acc = self;
        for _ in 1..e {
            acc = acc.mul(self);
        }
        if e.is_multiple_of(2) && self.lo < 0.0 && self.hi > 0.0 {
            let m = self.lo.abs().max(self.hi);
            let mut top = Self::new(m, m);
            for _ in 1..e {
                top = top.mul(Self::new(m, m));
            }
            return Self::new(0.0, top.hi);
        }
        acc
    }

    fn excludes_zero(self) -> bool {
        self.lo > 0.0 || self.hi < 0.0
    }
}

/// Real polynomial with interval coefficients, for range enclosures.
struct IvPoly {
    terms: Vec<(u32, u32, Iv)>,
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

impl IvPoly {
    fn new(f: &MultiPoly) -> Self {
        Self { terms: f.terms().map(|(m, c)| (m.0[0], m.0[1], Iv::from_ratio(&c.re))).collect() }
    }

    /// Enclosure over a box, from the Taylor expansion at its center; the
    /// shifted coefficients are themselves enclosed.
    fn eval(&self, x: Iv, y: Iv) -> Iv {
        let (cx, cy) = (0.5 * (x.lo + x.hi), 0.5 * (y.lo + y.hi));
        let u = Iv::new((x.lo - cx).next_down(), (x.hi - cx).next_up());
        let v = Iv::new((y.lo - cy).next_down(), (y.hi - cy).next_up());
        let (pcx, pcy) = (Iv::new(cx, cx), Iv::new(cy, cy));
        let mut shifted: HashMap<(u32, u32), Iv> = HashMap::new();
        for &(a, b, c) in &self.terms {
            for i in 0..=a {
                for j in 0..=b {
                    let k = binomial(a, i) * binomial(b, j);
                    let t = c.mul(Iv::new(k, k)).mul(pcx.pow(a - i)).mul(pcy.pow(b - j));
                    let e = shifted.entry((i, j)).or_insert(Iv::new(0.0, 0.0));
                    *e = e.add(t);
                }
            }
        }
        shifted.into_iter().fold(Iv::new(0.0, 0.0), |acc, ((i, j), c)| acc.add(c.mul(u.pow(i)).mul(v.pow(j))))
    }

    /// Strict sign on the box, bisecting the wider side up to `depth` times
    /// when one enclosure is not enough.
    fn sign_on(&self, x: Iv, y: Iv, depth: u32) -> Option<bool> {
        let r = self.eval(x, y);
        if r.excludes_zero() {
            return Some(r.lo > 0.0);
        }
        if depth == 0 {
            return None;
        }
        let halves = |a: Iv| {
            let m = 0.5 * (a.lo + a.hi);
            [Iv::new(a.lo, m), Iv::new(m, a.hi)]
        };
        let parts: Vec<(Iv, Iv)> = if x.hi - x.lo >= y.hi - y.lo {
            halves(x).into_iter().map(|h| (h, y)).collect()
        } else {
            halves(y).into_iter().map(|h| (x, h)).collect()
        };
        let a = self.sign_on(parts[0].0, parts[0].1, depth - 1)?;
        let b = self.sign_on(parts[1].0, parts[1].1, depth - 1)?;
        (a == b).then_some(a)
    }
}

/// Bisection depth for cell enclosures.
const ENCLOSURE_DEPTH: u32 = 8;

/// One closed polyline; the last vertex repeats the first.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Oval {
    pub vertices: Vec<(f64, f64)>,
    pub certified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OvalSet {
    #[serde(rename = "box")]
    pub rect: Rect,
    pub resolution: usize,
    pub ovals: Vec<Oval>,
    pub warnings: Vec<String>,
}

impl OvalSet {
    pub fn count(&self) -> usize {
        self.ovals.len()
    }

    pub fn certified_count(&self) -> usize {
        self.ovals.iter().filter(|o| o.certified).count()
    }

    /// Plain-text polylines: one `x y` line per vertex, ovals separated by
    /// a blank line.
    pub fn polylines_text(&self) -> String {
        let mut s = String::new();
        for (k, o) in self.ovals.iter().enumerate() {
            if k > 0 {
                s.push('\n');
            }
            for (x, y) in &o.vertices {
                s.push_str(&format!("{x:.12} {y:.12}\n"));
            }
        }
        s
    }
}

pub const MAX_SUBDIVISION_DEPTH: u32 = 6;

/// Edge of the base grid: horizontal `(i, j)–(i+1, j)` or vertical
/// `(i, j)–(i, j+1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Edge {
    H(usize, usize),
    V(usize, usize),
}

struct Marcher<'a> {
    f: &'a MultiPoly,
    rect: &'a Rect,
    n: usize,
    signs: Vec<i8>,
    xs: Vec<f64>,
    ys: Vec<f64>,
    fx: IvPoly,
    fy: IvPoly,
    /// Sturm sequences of `f` restricted to grid lines, keyed by edge kind and index.
    lines: RefCell<HashMap<(bool, usize), Vec<UniPoly>>>,
}

impl Marcher<'_> {
    fn neg(&self, i: usize, j: usize) -> bool {
        self.signs[j * (self.n + 1) + i] < 0
    }

    fn coord(&self, lo: &BigRational, hi: &BigRational, k: usize, n: usize) -> BigRational {
        lo + (hi - lo) * BigRational::new(k.into(), n.into())
    }

    fn iv_x(&self, i0: usize, i1: usize) -> Iv {
        let a = Iv::from_ratio(&self.coord(&self.rect.xmin, &self.rect.xmax, i0, self.n));
        let b = Iv::from_ratio(&self.coord(&self.rect.xmin, &self.rect.xmax, i1, self.n));
        Iv::new(a.lo, b.hi)
    }

    fn iv_y(&self, j0: usize, j1: usize) -> Iv {
        let a = Iv::from_ratio(&self.coord(&self.rect.ymin, &self.rect.ymax, j0, self.n));
        let b = Iv::from_ratio(&self.coord(&self.rect.ymin, &self.rect.ymax, j1, self.n));
        Iv::new(a.lo, b.hi)
    }

    /// Zero of `f` on a crossed edge, by bisection in floating point.
    fn place(&self, e: Edge) -> (f64, f64) {
        let (p0, p1) = match e {
            Edge::H(i, j) => ((self.xs[i], self.ys[j]), (self.xs[i + 1], self.ys[j])),
            Edge::V(i, j) => ((self.xs[i], self.ys[j]), (self.xs[i], self.ys[j + 1])),
        };
        let at = |t: f64| (p0.0 + t * (p1.0 - p0.0), p0.1 + t * (p1.1 - p0.1));
        let val = |t: f64| {
            let (x, y) = at(t);
            self.f.eval_f64(&[x, y])
        };
        let (mut a, mut b) = (0.0f64, 1.0f64);
        let (fa, fb) = (val(a), val(b));
        if fa == 0.0 {
            return at(0.0);
        }
        if fb == 0.0 || fa.signum() == fb.signum() {
            // rounding disagrees with the exact signs; fall back to interpolation
            let t = if (fa - fb).abs() > 0.0 { fa / (fa - fb) } else { 0.5 };
            return at(t.clamp(0.0, 1.0));
        }
        for _ in 0..60 {
            let m = 0.5 * (a + b);
            let fm = val(m);
            if fm == 0.0 {
                return at(m);
            }
            if fm.signum() == fa.signum() {
                a = m;
            } else {
                b = m;
            }
        }
        at(0.5 * (a + b))
    }

    /// Whether the two negative corners of a saddle cell are joined by
    /// negative nodes inside it; `None` when subdivision ran out.
    fn saddle_connects_negative(&self, i: usize, j: usize) -> (bool, bool) {
        let xlo = self.coord(&self.rect.xmin, &self.rect.xmax, i, self.n);
        let xhi = self.coord(&self.rect.xmin, &self.rect.xmax, i + 1, self.n);
        let ylo = self.coord(&self.rect.ymin, &self.rect.ymax, j, self.n);
        let yhi = self.coord(&self.rect.ymin, &self.rect.ymax, j + 1, self.n);
        let cell = Rect { xmin: xlo, xmax: xhi, ymin: ylo, ymax: yhi };
        let mut last = false;
        for depth in 1..=MAX_SUBDIVISION_DEPTH {
            let k = 1usize << depth;
            let s = SignGrid::new(self.f, &cell, k).signs();
            let neg = |a: usize, b: usize| s[b * (k + 1) + a] < 0;
            let mut saddles = false;
            for b in 0..k {
                for a in 0..k {
                    let c = [neg(a, b), neg(a + 1, b), neg(a + 1, b + 1), neg(a, b + 1)];
                    if c[0] == c[2] && c[1] == c[3] && c[0] != c[1] {
                        saddles = true;
                    }
                }
            }
            // flood the negative nodes from one negative corner, 4-connected
            let start = if neg(0, 0) { (0, 0) } else { (k, 0) };
            let target = if neg(0, 0) { (k, k) } else { (0, k) };
            let mut seen = vec![false; (k + 1) * (k + 1)];
            let mut stack = vec![start];
            seen[start.1 * (k + 1) + start.0] = true;
            let mut hit = false;
            while let Some((a, b)) = stack.pop() {
                if (a, b) == target {
                    hit = true;
                    break;
                }
                let mut push = |a2: usize, b2: usize| {
                    let idx = b2 * (k + 1) + a2;
                    if !seen[idx] && neg(a2, b2) {
                        seen[idx] = true;
                        stack.push((a2, b2));
                    }
                };
                if a > 0 {
                    push(a - 1, b);
                }
                if a < k {
                    push(a + 1, b);
                }
                if b > 0 {
                    push(a, b - 1);
                }
                if b < k {
                    push(a, b + 1);
                }
            }
            last = hit;
            if !saddles {
                return (hit, true);
            }
        }
        (last, false)
    }

    /// Roots of `f` inside an edge, counted exactly on its grid line.
    fn edge_roots(&self, e: Edge) -> usize {
        let (horizontal, line, k) = match e {
            Edge::H(i, j) => (true, j, i),
            Edge::V(i, j) => (false, i, j),
        };
        let mut lines = self.lines.borrow_mut();
        let seq = lines.entry((horizontal, line)).or_insert_with(|| {
            let restricted = if horizontal {
                let y = self.coord(&self.rect.ymin, &self.rect.ymax, line, self.n);
                UniPoly::from_multi(&self.f.substitute(1, &GaussianRational::from_rational(y)), 0)
            } else {
                let x = self.coord(&self.rect.xmin, &self.rect.xmax, line, self.n);
                UniPoly::from_multi(&self.f.substitute(0, &GaussianRational::from_rational(x)), 1)
            };
            sturm_sequence(&restricted.expect("affine"))
        });
        if seq.is_empty() {
            return 0;
        }
        let (lo, hi) = if horizontal { (&self.rect.xmin, &self.rect.xmax) } else { (&self.rect.ymin, &self.rect.ymax) };
        let a = self.coord(lo, hi, k, self.n);
        let b = self.coord(lo, hi, k + 1, self.n);
        changes_at(seq, &a) - changes_at(seq, &b)
    }

    /// Certificate for one base cell: no node is exactly on the curve, one
    /// partial derivative keeps a strict sign on the cell (interval
    /// enclosure), and every edge carries exactly the crossings its corner
    /// signs announce (Sturm count). Then the curve meets the cell in one
    /// arc per pair of recorded crossings.
    fn certify_cell(&self, i: usize, j: usize) -> bool {
        let n1 = self.n + 1;
        if [(i, j), (i + 1, j), (i, j + 1), (i + 1, j + 1)].iter().any(|&(a, b)| self.signs[b * n1 + a] == 0) {
            return false;
        }
        let (x, y) = (self.iv_x(i, i + 1), self.iv_y(j, j + 1));
        if self.fx.sign_on(x, y, ENCLOSURE_DEPTH).is_none() && self.fy.sign_on(x, y, ENCLOSURE_DEPTH).is_none() {
            return false;
        }
        [Edge::H(i, j), Edge::H(i, j + 1), Edge::V(i, j), Edge::V(i + 1, j)]
            .into_iter()
            .all(|e| self.edge_roots(e) == usize::from(self.crossed(e)))
    }

    fn crossed(&self, e: Edge) -> bool {
        match e {
            Edge::H(i, j) => self.neg(i, j) != self.neg(i + 1, j),
            Edge::V(i, j) => self.neg(i, j) != self.neg(i, j + 1),
        }
    }

    /// Certificate for the `s × s` block of cells at `(i0, j0)`, used when a
    /// single cell fails. The block passes when no boundary node is on the
    /// curve, a partial derivative keeps a strict sign on it, its boundary
    /// carries exactly two crossings (exact counts), and the segments
    /// recorded inside it form one chain between those two crossings. With
    /// a signed partial the zero set in the block is a graph, so it is one
    /// arc, which the chain follows. Interior nodes may lie on the curve.
    fn certify_block(&self, i0: usize, j0: usize, s: usize, segments: &[(Edge, Edge)]) -> bool {
        let n1 = self.n + 1;
        let on_curve = |a: usize, b: usize| self.signs[b * n1 + a] == 0;
        if (0..=s).any(|k| on_curve(i0 + k, j0) || on_curve(i0 + k, j0 + s) || on_curve(i0, j0 + k) || on_curve(i0 + s, j0 + k)) {
            return false;
        }
        let (x, y) = (self.iv_x(i0, i0 + s), self.iv_y(j0, j0 + s));
        if self.fx.sign_on(x, y, ENCLOSURE_DEPTH).is_none() && self.fy.sign_on(x, y, ENCLOSURE_DEPTH).is_none() {
            return false;
        }
        let mut boundary = Vec::new();
        for k in 0..s {
            boundary.extend([Edge::H(i0 + k, j0), Edge::H(i0 + k, j0 + s), Edge::V(i0, j0 + k), Edge::V(i0 + s, j0 + k)]);
        }
        let mut ends = Vec::new();
        for &e in &boundary {
            let crossed = self.crossed(e);
            if self.edge_roots(e) != usize::from(crossed) {
                return false;
            }
            if crossed {
                ends.push(e);
            }
        }
        if ends.len() != 2 {
            return false;
        }
        // walk from one end; every segment must be used and the walk must stop at the other end
        let mut used = vec![false; segments.len()];
        let mut at = ends[0];
        loop {
            let Some(k) = (0..segments.len()).find(|&k| !used[k] && (segments[k].0 == at || segments[k].1 == at)) else {
                break;
            };
            used[k] = true;
            at = if segments[k].0 == at { segments[k].1 } else { segments[k].0 };
        }
        at == ends[1] && used.iter().all(|&u| u)
    }
}

/// Largest block side tried when a cell fails its own certificate.
const MAX_BLOCK_LEVEL: u32 = 3;

/// Blocks containing cell `(i, j)`, smallest first; at each size the
/// aligned block comes before the shifted ones.
fn block_origins(i: usize, j: usize, n: usize) -> impl Iterator<Item = (usize, usize, usize)> {
    (1..=MAX_BLOCK_LEVEL).flat_map(move |level| {
        let s = 1usize << level;
        let aligned = (i - i % s, j - j % s);
        let shifted = (0..s).flat_map(move |dj| (0..s).map(move |di| (i + 1 + di, j + 1 + dj)));
        std::iter::once(aligned)
            .chain(shifted.filter_map(move |(a, b)| Some((a.checked_sub(s)?, b.checked_sub(s)?))).filter(move |&o| o != aligned))
            .filter(move |&(i0, j0)| i0 + s <= n && j0 + s <= n)
            .map(move |(i0, j0)| (i0, j0, s))
    })
}

/// Counts ovals of `f` inside `rect` on an `n × n` grid. Components that
/// leave the box are reported as warnings and not counted.
pub fn count_ovals(f: &MultiPoly, rect: &Rect, resolution: usize) -> Result<OvalSet, TopoError> {
    require_real_affine(f)?;
    if resolution < 2 {
        return Err(TopoError::BadResolution);
    }
    let n = resolution;
    let signs = SignGrid::new(f, rect, n).signs();
    let [x0, x1, y0, y1] = rect.to_f64();
    let xs = (0..=n).map(|i| x0 + (x1 - x0) * i as f64 / n as f64).collect();
    let ys = (0..=n).map(|j| y0 + (y1 - y0) * j as f64 / n as f64).collect();
    let mut warnings = Vec::new();
    if signs.contains(&0) {
        warnings.push("curve passes through grid nodes; zero treated as positive".into());
    }
    let m = Marcher { f, rect, n, signs, xs, ys, fx: IvPoly::new(&f.partial(0)), fy: IvPoly::new(&f.partial(1)), lines: RefCell::new(HashMap::new()) };

    // segments between edge crossings, tagged with their cell
    let mut segments: Vec<(Edge, Edge, (usize, usize))> = Vec::new();
    let mut undecided = Vec::new();
    for j in 0..n {
        for i in 0..n {
            let c = [m.neg(i, j), m.neg(i + 1, j), m.neg(i + 1, j + 1), m.neg(i, j + 1)];
            let (bottom, right, top, left) = (Edge::H(i, j), Edge::V(i + 1, j), Edge::H(i, j + 1), Edge::V(i, j));
            let crossed: Vec<Edge> =
                [bottom, right, top, left].into_iter().filter(|&e| m.crossed(e)).collect();
            match crossed.len() {
                0 => {}
                2 => segments.push((crossed[0], crossed[1], (i, j))),
                _ => {
                    let (joined, decided) = m.saddle_connects_negative(i, j);
                    if !decided {
                        undecided.push((i, j));
                    }
                    // corners of the side that is cut off
                    let cut_pos = joined;
                    let corner_zero_cut = c[0] != cut_pos;
                    if corner_zero_cut {
                        segments.push((left, bottom, (i, j)));
                        segments.push((right, top, (i, j)));
                    } else {
                        segments.push((bottom, right, (i, j)));
                        segments.push((top, left, (i, j)));
                    }
                }
            }
        }
    }
    if !undecided.is_empty() {
        warnings.push(format!(
            "{} ambiguous cell(s) unresolved at subdivision depth {}",
            undecided.len(),
            MAX_SUBDIVISION_DEPTH
        ));
    }

    let mut adj: HashMap<Edge, Vec<usize>> = HashMap::new();
    for (k, (a, b, _)) in segments.iter().enumerate() {
        adj.entry(*a).or_default().push(k);
        adj.entry(*b).or_default().push(k);
    }
    let mut used = vec![false; segments.len()];
    let mut ovals = Vec::new();
    let mut open = 0usize;
    let mut placed: HashMap<Edge, (f64, f64)> = HashMap::new();
    let mut block_cache: HashMap<(usize, usize, usize), bool> = HashMap::new();
    let pos = |e: Edge, placed: &mut HashMap<Edge, (f64, f64)>| *placed.entry(e).or_insert_with(|| m.place(e));
    for start in 0..segments.len() {
        if used[start] {
            continue;
        }
        // walk both ways to the ends of the chain
        used[start] = true;
        let (a, b, cell) = segments[start];
        let mut cells = vec![cell];
        let mut chain = vec![a, b];
        let mut closed = false;
        loop {
            let last = *chain.last().unwrap();
            let next = adj[&last].iter().copied().find(|&s| !used[s]);
            match next {
                Some(s) => {
                    used[s] = true;
                    let (p, q, c) = segments[s];
                    cells.push(c);
                    let other = if p == last { q } else { p };
                    if other == chain[0] {
                        chain.push(other);
                        closed = true;
                        break;
                    }
                    chain.push(other);
                }
                None => break,
            }
        }
        if !closed {
            // extend backwards from the first crossing
            loop {
                let first = chain[0];
                let Some(s) = adj[&first].iter().copied().find(|&s| !used[s]) else { break };
                used[s] = true;
                let (p, q, c) = segments[s];
                cells.push(c);
                chain.insert(0, if p == first { q } else { p });
            }
            open += 1;
            continue;
        }
        let certified = cells.iter().all(|&(i, j)| {
            if undecided.contains(&(i, j)) {
                return false;
            }
            m.certify_cell(i, j)
                || block_origins(i, j, n).any(|(i0, j0, s)| {
                    *block_cache.entry((i0, j0, s)).or_insert_with(|| {
                        let inside = |(a, b): (usize, usize)| a >= i0 && a < i0 + s && b >= j0 && b < j0 + s;
                        if undecided.iter().any(|&c| inside(c)) {
                            return false;
                        }
                        let segs: Vec<(Edge, Edge)> =
                            segments.iter().filter(|seg| inside(seg.2)).map(|seg| (seg.0, seg.1)).collect();
                        m.certify_block(i0, j0, s, &segs)
                    })
                })
        });
        let vertices = chain.iter().map(|&e| pos(e, &mut placed)).collect();
        ovals.push(Oval { vertices, certified });
    }
    if open > 0 {
        warnings.push(format!("{open} component(s) leave the box and are not counted"));
    }
    ovals.sort_by(|a, b| {
        let key = |o: &Oval| o.vertices.iter().fold((f64::INFINITY, f64::INFINITY), |acc, &v| if v < acc { v } else { acc });
        key(a).partial_cmp(&key(b)).unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(OvalSet { rect: rect.clone(), resolution, ovals, warnings })
}

/// [`count_ovals`] on [`default_box`].
pub fn count_ovals_default(f: &MultiPoly, resolution: usize) -> Result<OvalSet, TopoError> {
    count_ovals(f, &default_box(f)?, resolution)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceOptions {
    /// Largest distance between consecutive vertices.
    pub max_step: f64,
    pub min_step: f64,
    /// Target for `|f| / |∇f|` at every vertex.
    pub tolerance: f64,
    pub max_steps: usize,
    /// Largest distance the seed may move when projected onto the curve.
    pub max_seed_correction: f64,
}

impl Default for TraceOptions {
    fn default() -> Self {
        Self { max_step: 0.01, min_step: 1e-7, tolerance: 1e-13, max_steps: 2_000_000, max_seed_correction: 0.25 }
    }
}

/// Evaluates `f` and its gradient in floating point.
#[derive(Debug, Clone)]
pub struct CurveEval {
    f: MultiPoly,
    fx: MultiPoly,
    fy: MultiPoly,
}

impl CurveEval {
    pub fn new(f: &MultiPoly) -> Self {
        Self { f: f.clone(), fx: f.partial(0), fy: f.partial(1) }
    }

    pub fn value(&self, p: (f64, f64)) -> f64 {
        self.f.eval_f64(&[p.0, p.1])
    }

    pub fn gradient(&self, p: (f64, f64)) -> (f64, f64) {
        (self.fx.eval_f64(&[p.0, p.1]), self.fy.eval_f64(&[p.0, p.1]))
    }

    /// Newton projection along the gradient. Returns the point and the
    /// number of iterations, or `None` without convergence.
    pub fn project(&self, p: (f64, f64), tol: f64, max_iter: usize) -> Option<((f64, f64), usize)> {
        let mut q = p;
        for it in 0..=max_iter {
            let v = self.value(q);
            let (gx, gy) = self.gradient(q);
            let g2 = gx * gx + gy * gy;
            if g2 == 0.0 || !g2.is_finite() {
                return None;
            }
            let dist = v.abs() / g2.sqrt();
            if dist <= tol {
                return Some((q, it));
            }
            q = (q.0 - v * gx / g2, q.1 - v * gy / g2);
        }
        None
    }
}

fn norm(v: (f64, f64)) -> f64 {
    v.0.hypot(v.1)
}

/// Follows the component of `f = 0` through the projection of `seed`
/// until it closes. The result is closed: its last vertex equals the first.
pub fn trace_oval(f: &MultiPoly, seed: (f64, f64), opts: &TraceOptions) -> Result<Vec<(f64, f64)>, TopoError> {
    require_real_affine(f)?;
    let ev = CurveEval::new(f);
    let fail = |p: (f64, f64)| TopoError::CorrectionFailed { x: p.0, y: p.1 };
    let (start, _) = ev.project(seed, opts.tolerance, 50).ok_or(fail(seed))?;
    if norm((start.0 - seed.0, start.1 - seed.1)) > opts.max_seed_correction {
        return Err(fail(seed));
    }
    let tangent = |p: (f64, f64)| {
        let (gx, gy) = ev.gradient(p);
        let g = gx.hypot(gy);
        ((-gy / g, gx / g), g)
    };
    let (t0, g0) = tangent(start);
    if g0 == 0.0 {
        return Err(TopoError::SingularPoint { x: start.0, y: start.1 });
    }
    let mut pts = vec![start];
    let (mut cur, mut t, mut g) = (start, t0, g0);
    let mut h = opts.max_step;
    let mut travelled = 0.0;
    for _ in 0..opts.max_steps {
        let pred = (cur.0 + h * t.0, cur.1 + h * t.1);
        let accepted = ev.project(pred, opts.tolerance, 8).and_then(|(q, it)| {
            let (tq, gq) = tangent(q);
            let moved = norm((q.0 - pred.0, q.1 - pred.1));
            let ok = moved <= 0.5 * h && tq.0 * t.0 + tq.1 * t.1 > 0.95 && gq >= 0.25 * g;
            ok.then_some((q, it, tq, gq))
        });
        let Some((q, it, tq, gq)) = accepted else {
            h *= 0.5;
            if h < opts.min_step {
                return Err(TopoError::SingularPoint { x: cur.0, y: cur.1 });
            }
            continue;
        };
        let step = norm((q.0 - cur.0, q.1 - cur.1));
        travelled += step;
        let to_start = norm((q.0 - start.0, q.1 - start.1));
        if travelled > 4.0 * opts.max_step && to_start <= opts.max_step && tq.0 * t0.0 + tq.1 * t0.1 > 0.0 {
            let ahead = (start.0 - q.0) * tq.0 + (start.1 - q.1) * tq.1 > 0.0;
            if ahead {
                pts.push(q);
            }
            pts.push(start);
            return Ok(pts);
        }
        pts.push(q);
        cur = q;
        t = tq;
        g = gq;
        if it <= 3 {
            h = (h * 1.5).min(opts.max_step);
        }
    }
    Err(TopoError::DidNotClose(opts.max_steps))
}

/// Traces every oval of a set from its first vertex.
pub fn trace_ovals(f: &MultiPoly, set: &OvalSet, opts: &TraceOptions) -> Result<Vec<Vec<(f64, f64)>>, TopoError> {
    set.ovals.iter().map(|o| trace_oval(f, o.vertices[0], opts)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textio::parse_poly;

    fn ap(s: &str) -> MultiPoly {
        parse_poly(s, Arity::Affine).unwrap()
    }

    #[test]
    fn compactness() {
        assert!(compactness_check(&ap("x^2 + y^2 - 1")).unwrap());
        assert!(!compactness_check(&ap("y^2 - x^3")).unwrap());
        assert!(compactness_check(&crate::construct::quartic_four_ovals()).unwrap());
        assert!(!compactness_check(&ap("x^2 - y^2 - 1")).unwrap());
        assert!(!compactness_check(&ap("x*y - 1")).unwrap());
        assert!(compactness_check(&ap("x^2 + y^2 + 1")).unwrap());
    }

    #[test]
    fn sturm_counts() {
        let p = UniPoly::from_multi(&ap("x^3 - x"), 0).unwrap();
        assert_eq!(real_root_count(&p), 3);
        let p = UniPoly::from_multi(&ap("x^4 + 1"), 0).unwrap();
        assert_eq!(real_root_count(&p), 0);
        let p = UniPoly::from_multi(&ap("(x - 1)^2*(x + 2)"), 0).unwrap();
        assert_eq!(real_root_count(&p), 2);
        let q = |a: i64, b: i64| (BigRational::from_integer(a.into()), BigRational::new(b.into(), 2.into()));
        let p = UniPoly::from_multi(&ap("x^3 - x"), 0).unwrap();
        let (a, b) = q(-2, -1);
        assert_eq!(real_roots_between(&p, &a, &b), 1);
        let (a, b) = q(0, 3);
        assert_eq!(real_roots_between(&p, &a, &b), 1);
        let (a, b) = q(-1, 1);
        assert_eq!(real_roots_between(&p, &a, &b), 1);
    }

    #[test]
    fn curve_through_grid_nodes() {
        let f = ap("x^2 + y^2 - 1");
        for res in [8, 16, 64, 512] {
            let s = count_ovals(&f, &Rect::symmetric_int(2), res).unwrap();
            assert!(!s.warnings.is_empty());
            assert_eq!((s.count(), s.certified_count()), (1, 1), "res {res}");
        }
    }

    #[test]
    fn bulge_across_an_edge_keeps_certificate() {
        // the leftmost point pokes across the grid line x = 15/28 at res 56
        let f = ap("(x - 4/3)^2 + (y - 1)^2 - 16/25");
        for res in [28, 56, 112] {
            let s = count_ovals(&f, &Rect::symmetric_int(5), res).unwrap();
            assert_eq!((s.count(), s.certified_count()), (1, 1), "res {res}");
        }
    }

    #[test]
    fn circle_and_empty() {
        let s = count_ovals(&ap("x^2 + y^2 - 1"), &Rect::symmetric_int(2), 64).unwrap();
        assert_eq!(s.count(), 1);
        let s = count_ovals(&ap("x^2 + y^2 + 1"), &Rect::symmetric_int(2), 64).unwrap();
        assert_eq!(s.count(), 0);
        let s = count_ovals_default(&ap("x^2 + y^2 - 1"), 128).unwrap();
        assert_eq!((s.count(), s.certified_count()), (1, 1));
        let o = &s.ovals[0].vertices;
        assert_eq!(o.first(), o.last());
    }

    #[test]
    fn quartic_has_four_ovals() {
        let f = crate::construct::quartic_four_ovals();
        let s = count_ovals(&f, &Rect::symmetric_int(2), 512).unwrap();
        assert_eq!(s.count(), 4);
        assert_eq!(s.certified_count(), 4);
        let flipped = ap("(x^2 + 2*y^2 - 1)*(2*x^2 + y^2 - 1) - 1/100");
        assert_eq!(count_ovals(&flipped, &Rect::symmetric_int(2), 512).unwrap().count(), 2);
    }

    #[test]
    fn open_branches_not_counted() {
        let s = count_ovals(&ap("x*y - 1"), &Rect::symmetric_int(3), 64).unwrap();
        assert_eq!(s.count(), 0);
        assert!(s.warnings.iter().any(|w| w.contains("leave the box")));
    }

    #[test]
    fn trace_circle() {
        let pts = trace_oval(&ap("x^2 + y^2 - 1"), (1.01, 0.0), &TraceOptions::default()).unwrap();
        assert_eq!(pts.first(), pts.last());
        let dev = pts.iter().map(|p| (p.0.hypot(p.1) - 1.0).abs()).fold(0.0, f64::max);
        assert!(dev < 1e-9, "{dev}");
        assert!(pts.windows(2).all(|w| norm((w[1].0 - w[0].0, w[1].1 - w[0].1)) <= 0.01 + 1e-12));
        assert!(matches!(
            trace_oval(&ap("x^2 + y^2 - 1"), (5.0, 5.0), &TraceOptions::default()),
            Err(TopoError::CorrectionFailed { .. })
        ));
    }

    #[test]
    fn trace_nodal_cubic_hits_node() {
        let f = ap("y^2 - x^2*(x + 1)");
        let r = trace_oval(&f, (0.01, 0.012), &TraceOptions::default());
        assert!(matches!(r, Err(TopoError::SingularPoint { .. })), "{r:?}");
        let r = trace_oval(&f, (-1.0, 0.0), &TraceOptions::default());
        assert!(matches!(r, Err(TopoError::SingularPoint { .. })), "{r:?}");
    }
}
