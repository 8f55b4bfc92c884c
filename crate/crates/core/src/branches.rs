//! Local branches of curves through singular points of a foliation, the
//! branch multiplicity `μ_p(F, B)` and the identities built on it.

use num_traits::Zero;
use serde::{Serialize, Serializer};

use crate::field::{invariance_check, AffineVectorField, Invariance, ProjectiveOneForm};
use crate::polyring::{is_squarefree, Arity, GaussianRational, Monomial, MultiPoly};
use crate::projective::{Chart, ProjectivePoint};
use crate::series::{implicit_series, Series};
use crate::singularities::{
    closure, curve_singularities, foliation_of, local_equation, local_order, meets_infinity_transversally,
    GeometryError,
};
use crate::solve::solve_projective;

/// A local branch `t ↦ (φ₁(t), φ₂(t))` in the affine coordinates of `chart`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Branch {
    pub base: ProjectivePoint,
    #[serde(serialize_with = "ser_chart")]
    pub chart: Chart,
    #[serde(serialize_with = "ser_series")]
    pub phi1: Series,
    #[serde(serialize_with = "ser_series")]
    pub phi2: Series,
    pub truncation: usize,
    /// Whether the base point is a smooth point of the curve.
    pub smooth: bool,
}

fn ser_chart<S: Serializer>(c: &Chart, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(c.name())
}

fn ser_series<S: Serializer>(x: &Series, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

/// Default truncation order `2·(m + 2)·n`.
pub fn default_truncation(foliation_degree: u32, curve_degree: u32) -> usize {
    (2 * (foliation_degree + 2) * curve_degree.max(1)) as usize
}

fn affine_var(k: usize) -> MultiPoly {
    MultiPoly::var(Arity::Affine, k)
}

/// Branches of the curve through `p`, in the standard chart of `p`.
pub fn local_branches(f: &MultiPoly, p: &ProjectivePoint, n: usize) -> Result<Vec<Branch>, GeometryError> {
    local_branches_in(f, p, &p.standard_chart(), n)
}

pub fn local_branches_in(
    f: &MultiPoly,
    p: &ProjectivePoint,
    chart: &Chart,
    n: usize,
) -> Result<Vec<Branch>, GeometryError> {
    let big_f = closure(f)?;
    if !is_squarefree(&big_f)? {
        return Err(GeometryError::NotSquarefree);
    }
    let g = local_equation(&big_f, p, chart)?;
    if !g.constant_term().is_zero() {
        return Err(GeometryError::NotOnCurve(p.clone()));
    }
    let (u0, v0) = chart.local_coords(p).expect("checked by local_equation");
    let unsupported = |reason: String| GeometryError::Unsupported { point: p.clone(), reason };
    let (nu, _) = local_order(&g);
    let c = |i: u32, j: u32| g.coeff(&Monomial([i, j, 0]));
    let local: Vec<(Series, Series)> = match nu {
        1 => {
            if !c(0, 1).is_zero() {
                let w = implicit_series(&g, n).expect("smooth point");
                vec![(Series::t(n), w)]
            } else {
                let swapped = g.compose(&[affine_var(1), affine_var(0)]);
                let w = implicit_series(&swapped, n).expect("smooth point");
                vec![(w, Series::t(n))]
            }
        }
        2 => {
            let (a, b, cc) = (c(2, 0), c(1, 1), c(0, 2));
            let disc = &(&b * &b) - &(&GaussianRational::from_int(4) * &(&a * &cc));
            if disc.is_zero() {
                return Err(unsupported("double tangent (not a node)".into()));
            }
            let mut out = Vec::new();
            if cc.is_zero() {
                out.push(vertical_branch(&g, n));
                out.push(slope_branch(&g, &(-&(&a * &b.inv().unwrap())), n));
            } else {
                let s = disc.sqrt().ok_or_else(|| unsupported("tangent slopes outside Q(i)".into()))?;
                let inv = (&GaussianRational::from_int(2) * &cc).inv().unwrap();
                for root in [&(-&b) + &s, &(-&b) - &s] {
                    out.push(slope_branch(&g, &(&root * &inv), n));
                }
            }
            out
        }
        k => return Err(unsupported(format!("singular point of order {}", k))),
    };
    let chart_curve = chart.pull_curve(&big_f);
    let branches: Vec<Branch> = local
        .into_iter()
        .map(|(s1, s2)| {
            let phi1 = s1.add(&Series::constant(u0.clone(), n));
            let phi2 = s2.add(&Series::constant(v0.clone(), n));
            assert!(
                Series::compose(&chart_curve, &phi1, &phi2).is_zero(),
                "branch does not satisfy the curve equation to order {}",
                n
            );
            Branch { base: p.clone(), chart: chart.clone(), phi1, phi2, truncation: n, smooth: nu == 1 }
        })
        .collect();
    Ok(branches)
}

/// Branch tangent to `v = m·u`: blow up with `v = t·(m + w)`.
fn slope_branch(g: &MultiPoly, m: &GaussianRational, n: usize) -> (Series, Series) {
    let t = affine_var(0);
    let s = &affine_var(1) + &MultiPoly::constant(Arity::Affine, m.clone());
    let h = g.compose(&[t.clone(), &t * &s]).exact_divide(&t.pow(2)).expect("order two");
    let w = implicit_series(&h, n).expect("simple tangent");
    let ts = Series::t(n);
    let v = ts.mul(&w.add(&Series::constant(m.clone(), n)));
    (ts, v)
}

/// Branch tangent to `u = 0`: blow up with `u = t·w`.
fn vertical_branch(g: &MultiPoly, n: usize) -> (Series, Series) {
    let t = affine_var(0);
    let h = g.compose(&[&t * &affine_var(1), t.clone()]).exact_divide(&t.pow(2)).expect("order two");
    let w = implicit_series(&h, n).expect("simple tangent");
    let ts = Series::t(n);
    (ts.mul(&w), ts)
}

/// `μ` with its certification flag; uncertified values are lower bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BranchMultiplicity {
    pub mu: usize,
    pub certified: bool,
}

/// Order at `t = 0` of `R` where the pulled-back field is `R(t) d/dt`.
pub fn branch_multiplicity(form: &ProjectiveOneForm, branch: &Branch) -> Result<BranchMultiplicity, GeometryError> {
    let (a, b) = branch.chart.local_field(&form.saturate()?)?;
    let n = branch.truncation;
    let a1 = Series::compose(&a, &branch.phi1, &branch.phi2);
    let a2 = Series::compose(&b, &branch.phi1, &branch.phi2);
    let d1 = branch.phi1.derivative();
    let d2 = branch.phi2.derivative();
    let cross = a1.mul(&d2).sub(&a2.mul(&d1));
    if !cross.is_zero() {
        return Err(GeometryError::NotInvariant);
    }
    let (num, den) = if d1.is_zero() { (a2, d2) } else { (a1, d1) };
    let k = den.order().expect("nonconstant branch");
    match num.order() {
        Some(o) if o + k < n => {
            if o < k {
                return Err(GeometryError::NotInvariant);
            }
            Ok(BranchMultiplicity { mu: o - k, certified: true })
        }
        _ => Ok(BranchMultiplicity { mu: n.saturating_sub(2 * k), certified: false }),
    }
}

/// True when every component of the curve is invariant, tested through
/// `𝒳f = K f` in each standard chart.
pub fn curve_invariant(form: &ProjectiveOneForm, big_f: &MultiPoly) -> Result<bool, GeometryError> {
    for chart in [Chart::z(), Chart::x(), Chart::y()] {
        let g = chart.pull_curve(big_f);
        if g.is_constant() {
            continue;
        }
        let (a, b) = chart.local_field(form)?;
        let xg = &(&a * &g.partial(0)) + &(&b * &g.partial(1));
        if xg.exact_divide(&g).is_err() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultiplicityEntry {
    pub point: ProjectivePoint,
    pub chart: String,
    pub branch: usize,
    pub mu: usize,
    pub certified: bool,
}

/// Outcome of `χ = Σμ − n(m − 1)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EulerReport {
    pub curve_degree: u32,
    pub foliation_degree: u32,
    pub table: Vec<MultiplicityEntry>,
    pub sum_mu: i64,
    pub chi_claimed: i64,
    pub rhs: i64,
    pub identity_holds: bool,
    pub checkable: bool,
    pub notes: Vec<String>,
}

/// Multiplicities of all branches through `p`, doubling the truncation up
/// to three times while any of them is uncertified.
pub fn certified_multiplicities(
    form: &ProjectiveOneForm,
    big_f: &MultiPoly,
    p: &ProjectivePoint,
    chart: &Chart,
    n0: usize,
) -> Result<Vec<BranchMultiplicity>, GeometryError> {
    let mut n = n0;
    let mut last = Vec::new();
    for _ in 0..4 {
        let branches = local_branches_in(big_f, p, chart, n)?;
        last = branches
            .iter()
            .map(|b| branch_multiplicity(form, b))
            .collect::<Result<Vec<_>, _>>()?;
        if last.iter().all(|m| m.certified) {
            break;
        }
        n *= 2;
    }
    Ok(last)
}

/// Checks the Euler identity for an invariant curve against the claimed
/// `χ`. `truncation` overrides the default `2·(m + 2)·n`.
pub fn euler_identity_check(
    form: &ProjectiveOneForm,
    f: &MultiPoly,
    chi: i64,
    truncation: Option<usize>,
) -> Result<EulerReport, GeometryError> {
    let big_f = closure(f)?;
    if !is_squarefree(&big_f)? {
        return Err(GeometryError::NotSquarefree);
    }
    let form = form.saturate()?;
    if !curve_invariant(&form, &big_f)? {
        return Err(GeometryError::NotInvariant);
    }
    let n = big_f.degree().unwrap_or(0);
    let m = form.degree();
    let n0 = truncation.unwrap_or_else(|| default_truncation(m, n));
    let mut system = vec![big_f.clone()];
    system.extend(form.coefficients().into_iter().cloned());
    let sol = solve_projective(&system)?;
    let mut notes = Vec::new();
    let mut checkable = true;
    if sol.residual > 0 {
        checkable = false;
        notes.push(format!("{} singular point(s) on the curve lie outside Q(i)", sol.residual));
    }
    let mut table = Vec::new();
    for p in &sol.points {
        let chart = p.standard_chart();
        match certified_multiplicities(&form, &big_f, p, &chart, n0) {
            Ok(ms) => {
                for (i, bm) in ms.into_iter().enumerate() {
                    if !bm.certified {
                        checkable = false;
                        notes.push(format!("multiplicity at {} branch {} not certified", p, i));
                    }
                    table.push(MultiplicityEntry {
                        point: p.clone(),
                        chart: chart.name().to_string(),
                        branch: i,
                        mu: bm.mu,
                        certified: bm.certified,
                    });
                }
            }
            Err(e @ GeometryError::Unsupported { .. }) => {
                checkable = false;
                notes.push(e.to_string());
            }
            Err(e) => return Err(e),
        }
    }
    let sum_mu: i64 = table.iter().map(|e| e.mu as i64).sum();
    let rhs = sum_mu - n as i64 * (m as i64 - 1);
    Ok(EulerReport {
        curve_degree: n,
        foliation_degree: m,
        table,
        sum_mu,
        chi_claimed: chi,
        rhs,
        identity_holds: checkable && rhs == chi,
        checkable,
        notes,
    })
}

/// The appendix computation at a point at infinity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InfinityBranchData {
    pub point: ProjectivePoint,
    pub chart: String,
    /// Order of `P̃` along the branch `u = ψ(v)`.
    pub l: usize,
    /// `l + 1`.
    pub mu: usize,
    /// The same branch through [`branch_multiplicity`].
    pub mu_branch: BranchMultiplicity,
    pub agree: bool,
}

/// Chart `u = y/x, v = 1/x` (or `u = x/y, v = 1/y` at `(0:1:0)`), branch
/// `u = ψ(v)`, `l = ord P̃(ψ(t), t)` with `P̃ = vᵐ P(1/v, u/v)`, `μ = l + 1`.
pub fn infinity_branch_data(
    field: &AffineVectorField,
    f: &MultiPoly,
    p: &ProjectivePoint,
    truncation: Option<usize>,
) -> Result<InfinityBranchData, GeometryError> {
    if !field.r().is_zero() {
        return Err(GeometryError::NonPlanarField);
    }
    if !p.is_at_infinity() {
        return Err(GeometryError::NotAtInfinity(p.clone()));
    }
    let affine_f = closure(f)?.dehomogenize()?;
    if let Invariance::NotInvariant = invariance_check(field, &affine_f)? {
        return Err(GeometryError::NotInvariant);
    }
    let big_f = closure(f)?;
    let chart = p.standard_chart();
    let (u0, _) = chart.local_coords(p).expect("standard chart");
    let g = local_equation(&big_f, p, &chart)?;
    if !g.constant_term().is_zero() {
        return Err(GeometryError::NotOnCurve(p.clone()));
    }
    if g.coeff(&Monomial([1, 0, 0])).is_zero() {
        return Err(GeometryError::NonTransversal(p.clone()));
    }
    let m = field.degree();
    let n = truncation.unwrap_or_else(|| default_truncation(m, big_f.degree().unwrap_or(1)));
    // u − u0 = ψ(v): solve h(t, w) = g(w, t)
    let swapped = g.compose(&[affine_var(1), affine_var(0)]);
    let psi = implicit_series(&swapped, n).expect("transversal");
    let branch = Branch {
        base: p.clone(),
        chart: chart.clone(),
        phi1: psi.add(&Series::constant(u0, n)),
        phi2: Series::t(n),
        truncation: n,
        smooth: true,
    };
    let main = if chart.name() == Chart::x().name() { field.p() } else { field.q() };
    let tilde = chart.pull_curve(&main.homogenize(m)?);
    let l = Series::compose(&tilde, &branch.phi1, &branch.phi2)
        .order()
        .ok_or_else(|| GeometryError::Unsupported { point: p.clone(), reason: "P̃ vanishes to the truncation order".into() })?;
    let mu_branch = branch_multiplicity(&foliation_of(field)?, &branch)?;
    Ok(InfinityBranchData {
        point: p.clone(),
        chart: chart.name().to_string(),
        l,
        mu: l + 1,
        agree: mu_branch.certified && mu_branch.mu == l + 1,
        mu_branch,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentGenus {
    #[serde(serialize_with = "crate::field::ser_poly")]
    pub component: MultiPoly,
    pub degree: u32,
    pub nodes: usize,
    pub genus: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenusReport {
    pub components: Vec<ComponentGenus>,
    pub chi: i64,
}

/// Genus `(d−1)(d−2)/2 − δ` of each irreducible component and the intrinsic
/// `χ = Σ(2 − 2gᵢ)`.
pub fn genus_and_chi(components: &[MultiPoly]) -> Result<GenusReport, GeometryError> {
    let mut out = Vec::new();
    for (index, c) in components.iter().enumerate() {
        let big = closure(c)?;
        let sing = curve_singularities(&big, true)?;
        if sing.points.iter().any(|s| !s.is_node) {
            return Err(GeometryError::NotNodal);
        }
        if sing.residual > 0 {
            return Err(GeometryError::Undecided(sing.residual));
        }
        let d = big.degree().unwrap_or(0) as i64;
        let nodes = sing.points.len();
        let genus = (d - 1) * (d - 2) / 2 - nodes as i64;
        if genus < 0 {
            return Err(GeometryError::Reducible { index });
        }
        out.push(ComponentGenus { component: c.clone(), degree: d as u32, nodes, genus });
    }
    let chi = out.iter().map(|c| 2 - 2 * c.genus).sum();
    Ok(GenusReport { components: out, chi })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Corollary2Report {
    pub degree: u32,
    /// `−n(n − 3)`.
    pub chi: i64,
    pub euler: EulerReport,
    pub all_infinity_mu_one: bool,
    pub holds: bool,
}

/// Runs the Euler identity for the Hamiltonian foliation `df` of a smooth
/// curve crossing the line at infinity transversally.
pub fn corollary2_check(f: &MultiPoly, truncation: Option<usize>) -> Result<Corollary2Report, GeometryError> {
    let big_f = closure(f)?;
    let affine_f = big_f.dehomogenize()?;
    let sing = curve_singularities(&big_f, true)?;
    if !sing.points.is_empty() {
        return Err(GeometryError::NotSmooth);
    }
    if sing.residual > 0 {
        return Err(GeometryError::Undecided(sing.residual));
    }
    if !meets_infinity_transversally(&big_f)? {
        return Err(GeometryError::InfinityNotTransversal);
    }
    let n = big_f.degree().unwrap_or(0);
    let hamiltonian = AffineVectorField::planar(-&affine_f.partial(1), affine_f.partial(0))?;
    let form = foliation_of(&hamiltonian)?;
    let chi = -(n as i64) * (n as i64 - 3);
    let euler = euler_identity_check(&form, &big_f, chi, truncation)?;
    let all_infinity_mu_one = euler.table.iter().all(|e| e.point.is_at_infinity() && e.mu == 1)
        && euler.table.len() == n as usize;
    Ok(Corollary2Report { degree: n, chi, holds: euler.identity_holds && all_infinity_mu_one, euler, all_infinity_mu_one })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;
    use crate::textio::parse_poly;

    fn a(s: &str) -> MultiPoly {
        parse_poly(s, Arity::Affine).unwrap()
    }
    fn h(s: &str) -> MultiPoly {
        parse_poly(s, Arity::Projective).unwrap()
    }
    fn unit() -> GaussianRational {
        GaussianRational::one()
    }
    fn form(p: &str, q: &str, r: &str) -> ProjectiveOneForm {
        ProjectiveOneForm::new(h(p), h(q), h(r)).unwrap()
    }

    #[test]
    fn circle_branch() {
        let p = ProjectivePoint::from_ints(1, 0, 1).unwrap();
        let bs = local_branches(&a("x^2 + y^2 - 1"), &p, 6).unwrap();
        assert_eq!(bs.len(), 1);
        let b = &bs[0];
        assert_eq!(b.phi2, Series::t(6));
        assert_eq!(b.phi1.coeff(0), unit());
        assert_eq!(b.phi1.coeff(2), GaussianRational::from_ratio(-1, 2));
        assert_eq!(b.phi1.coeff(4), GaussianRational::from_ratio(-1, 8));
    }

    #[test]
    fn node_and_cusp() {
        let o = ProjectivePoint::from_ints(0, 0, 1).unwrap();
        let bs = local_branches(&a("y^2 - x^2"), &o, 5).unwrap();
        assert_eq!(bs.len(), 2);
        let slopes: Vec<GaussianRational> = bs.iter().map(|b| b.phi2.coeff(1)).collect();
        assert!(slopes.contains(&unit()) && slopes.contains(&-unit()));
        assert!(matches!(local_branches(&a("y^2 - x^3"), &o, 5), Err(GeometryError::Unsupported { .. })));
        let bs = local_branches(&a("x*y + x^3 + y^3"), &o, 5).unwrap();
        assert_eq!(bs.len(), 2);
    }

    #[test]
    fn paper_examples_euler() {
        let x0 = h("X");
        let ex1 = form("Y*Z", "i*X*Z", "-(1 + i)*X*Y");
        let r = euler_identity_check(&ex1, &x0, 2, None).unwrap();
        assert_eq!((r.sum_mu, r.curve_degree, r.foliation_degree), (2, 1, 1));
        assert!(r.identity_holds);
        let ex2 = form("(2*Y*Z - X^2)*Z", "X*(Y + Z)*Z", "X^3 - X*Y^2 - 3*X*Y*Z");
        let r = euler_identity_check(&ex2, &x0, 2, None).unwrap();
        assert_eq!((r.sum_mu, r.foliation_degree), (3, 2));
        assert!(r.identity_holds);
        let ex3 = form("(X^3 - 2*Y^2*Z)*Z", "-X*(Y^2 + Z^2)*Z", "-(X^4 - 2*X*Y^2*Z - X*Y*Z^2 - X*Y^3)");
        let r = euler_identity_check(&ex3, &x0, 2, None).unwrap();
        assert_eq!((r.sum_mu, r.foliation_degree), (4, 3));
        assert!(r.identity_holds);
    }

    #[test]
    fn rotation_at_infinity() {
        let rot = AffineVectorField::planar(a("-y"), a("x")).unwrap();
        let p = ProjectivePoint::new(unit(), GaussianRational::i(), GaussianRational::zero()).unwrap();
        let d = infinity_branch_data(&rot, &a("x^2 + y^2 - 1"), &p, None).unwrap();
        assert_eq!(d.l, 0);
        assert_eq!(d.mu, 1);
        assert!(d.agree);
        // y = x² is invariant under (x, 2y) but tangent to the line at infinity
        let lin = AffineVectorField::planar(a("x"), a("2*y")).unwrap();
        let q = ProjectivePoint::from_ints(0, 1, 0).unwrap();
        assert!(matches!(infinity_branch_data(&lin, &a("y - x^2"), &q, None), Err(GeometryError::NonTransversal(_))));
        let lin3 = AffineVectorField::planar(a("x"), a("3*y")).unwrap();
        assert!(matches!(infinity_branch_data(&lin3, &a("y - x^2"), &q, None), Err(GeometryError::NotInvariant)));
    }

    #[test]
    fn genus_values() {
        assert_eq!(genus_and_chi(&[a("x^2 + y^2 - 1")]).unwrap().chi, 2);
        assert_eq!(genus_and_chi(&[a("x*y*(x - y) - 1")]).unwrap().chi, 0);
        let nodal = genus_and_chi(&[a("y^2 - x^2*(x + 1)")]).unwrap();
        assert_eq!(nodal.components[0].genus, 0);
        assert_eq!(nodal.chi, 2);
    }

    #[test]
    fn corollary2_small_degrees() {
        for (f, chi) in [("y - 2*x - 1", 2), ("x*y - 1", 2), ("x^2 + y^2 - 1", 2), ("x*y*(x - y) - 1", 0)] {
            let r = corollary2_check(&a(f), None).unwrap();
            assert_eq!(r.chi, chi);
            assert!(r.holds, "{}", f);
        }
    }
}
