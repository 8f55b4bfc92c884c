//! Closed-form bounds from the theorems and the `M(k)` enumeration used in
//! the proof of Theorem 1.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundsError {
    #[error("{what} must be at least {min}, got {got}")]
    TooSmall { what: &'static str, min: u64, got: u64 },
    #[error("partition {parts:?} does not sum to m + 2 = {expected}")]
    BadPartition { parts: Vec<u32>, expected: u32 },
    #[error("partition needs at least 3 parts, got {0}")]
    TooFewParts(usize),
}

fn at_least(what: &'static str, min: u64, got: u64) -> Result<(), BoundsError> {
    if got < min {
        Err(BoundsError::TooSmall { what, min, got })
    } else {
        Ok(())
    }
}

fn even(n: u64) -> u64 {
    u64::from(n.is_multiple_of(2))
}

/// Which bound a report refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Theorem {
    /// Algebraic limit cycles, nodal invariant curves.
    T1,
    /// Algebraic limit cycles, non-dicritical invariant curves.
    T2,
    /// Three or more invariant curves without dicritical singularities.
    T4,
    Harnack,
    DegreeNodal,
    DegreeNondicritical,
    Mk,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Default)]
pub struct BoundInputs {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_zero: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orders: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub partition: Option<Vec<u32>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundReport {
    pub theorem: Theorem,
    pub inputs: BoundInputs,
    pub value: u64,
    /// The formula before clamping; differs from `value` only for Harnack.
    pub raw: i64,
    pub clamped: bool,
    pub notes: Vec<String>,
}

impl BoundReport {
    fn exact(theorem: Theorem, inputs: BoundInputs, value: u64) -> Self {
        Self { theorem, inputs, value, raw: value as i64, clamped: false, notes: Vec::new() }
    }
}

/// `(n−1)(n−2)/2 + [n even] − Σ ν(ν−1)`, clamped below at 0.
pub fn harnack_bound(n: u32, orders: &[u32]) -> Result<BoundReport, BoundsError> {
    at_least("degree n", 1, n as u64)?;
    for &nu in orders {
        at_least("singular order", 2, nu as u64)?;
    }
    let n64 = n as i64;
    let raw = (n64 - 1) * (n64 - 2) / 2 + even(n as u64) as i64
        - orders.iter().map(|&v| v as i64 * (v as i64 - 1)).sum::<i64>();
    let inputs = BoundInputs { n: Some(n), orders: Some(orders.to_vec()), ..Default::default() };
    Ok(BoundReport { theorem: Theorem::Harnack, inputs, value: raw.max(0) as u64, raw, clamped: raw < 0, notes: Vec::new() })
}

/// Degree of a nodal invariant curve: `n ≤ m + 2`.
pub fn nodal_degree_bound(m: u32) -> BoundReport {
    let mut r = BoundReport::exact(Theorem::DegreeNodal, BoundInputs { m: Some(m), ..Default::default() }, m as u64 + 2);
    r.notes.push(
        "if n = m + 2 then F is reducible and the foliation is logarithmic: sum of lambda_i * deg F_i = 0".into(),
    );
    r
}

/// Degree of an invariant curve without dicritical singularities: `n ≤ m + 2`.
pub fn nondicritical_degree_bound(m: u32) -> BoundReport {
    BoundReport::exact(Theorem::DegreeNondicritical, BoundInputs { m: Some(m), ..Default::default() }, m as u64 + 2)
}

/// `(d−1)(d−2)/2`, which vanishes for `d ∈ {1, 2}`.
fn genus_of_degree(d: u64) -> u64 {
    if d < 2 {
        0
    } else {
        (d - 1) * (d - 2) / 2
    }
}

fn t1_formula(m: u64) -> u64 {
    genus_of_degree(m) + even(m)
}

/// `1 + (m−1)(m−2)/2` for even `m`, `(m−1)(m−2)/2` for odd `m`.
pub fn thm1_bound(m: u32) -> Result<BoundReport, BoundsError> {
    at_least("m", 1, m as u64)?;
    Ok(BoundReport::exact(Theorem::T1, BoundInputs { m: Some(m), ..Default::default() }, t1_formula(m as u64)))
}

/// `r ≡ 0`: `m(m−1)/2`, otherwise `(m+1)m/2`; plus one when `m` is even.
pub fn thm2_bound(m: u32, r_zero: bool) -> Result<BoundReport, BoundsError> {
    at_least("m", 1, m as u64)?;
    let m64 = m as u64;
    let value = if r_zero { m64 * (m64 - 1) / 2 } else { (m64 + 1) * m64 / 2 } + even(m64);
    let inputs = BoundInputs { m: Some(m), r_zero: Some(r_zero), ..Default::default() };
    Ok(BoundReport::exact(Theorem::T2, inputs, value))
}

/// Same formula as Theorem 1, for `m ≥ 2`.
pub fn thm4_bound(m: u32) -> Result<BoundReport, BoundsError> {
    at_least("m", 2, m as u64)?;
    Ok(BoundReport::exact(Theorem::T4, BoundInputs { m: Some(m), ..Default::default() }, t1_formula(m as u64)))
}

/// Harnack count of one curve of degree `d`.
fn curve_ovals(d: u32) -> u64 {
    genus_of_degree(d as u64) + even(d as u64)
}

/// `Σ [(dᵢ−1)(dᵢ−2)/2 + aᵢ]` with `aᵢ = [dᵢ even]`.
pub fn mk_value(m: u32, partition: &[u32]) -> Result<u64, BoundsError> {
    if partition.len() < 3 {
        return Err(BoundsError::TooFewParts(partition.len()));
    }
    if partition.contains(&0) || partition.iter().sum::<u32>() != m + 2 {
        return Err(BoundsError::BadPartition { parts: partition.to_vec(), expected: m + 2 });
    }
    Ok(partition.iter().map(|&d| curve_ovals(d)).sum())
}

/// The proof's `M(k)` evaluated on its extremal partition
/// `(1, …, 1, m + 3 − k)`.
pub fn mk_envelope(m: u32, k: u32) -> Result<u64, BoundsError> {
    at_least("k", 3, k as u64)?;
    if k > m + 2 {
        return Err(BoundsError::TooFewParts(k as usize));
    }
    let big = m + 3 - k;
    let (m64, k64) = (m as u64, k as u64);
    Ok((m64 + 2 - k64) * (m64 + 1 - k64) / 2 + even(big as u64))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MkArgmax {
    pub m: u32,
    pub k: u32,
    pub partition: Vec<u32>,
    pub value: u64,
    pub thm1: u64,
    /// `k = 3` and `value = thm1`, as the proof claims.
    pub matches_proof: bool,
}

fn partitions(total: u32, parts: u32, max: u32, prefix: &mut Vec<u32>, visit: &mut dyn FnMut(&[u32])) {
    if parts == 0 {
        if total == 0 {
            visit(prefix);
        }
        return;
    }
    let hi = max.min(total.saturating_sub(parts - 1));
    for d in (1..=hi).rev() {
        if d * parts < total {
            break;
        }
        prefix.push(d);
        partitions(total - d, parts - 1, d, prefix, visit);
        prefix.pop();
    }
}

/// Exhaustive maximum of [`mk_value`] over `k ∈ {3, …, m+2}` and all
/// partitions of `m + 2` into `k` parts. Ties keep the smallest `k`.
pub fn mk_argmax(m: u32) -> Result<MkArgmax, BoundsError> {
    at_least("m", 1, m as u64)?;
    let mut best: Option<(u64, u32, Vec<u32>)> = None;
    for k in 3..=m + 2 {
        partitions(m + 2, k, m + 2, &mut Vec::new(), &mut |p| {
            let v: u64 = p.iter().map(|&d| curve_ovals(d)).sum();
            if best.as_ref().is_none_or(|(bv, _, _)| v > *bv) {
                best = Some((v, k, p.to_vec()));
            }
        });
    }
    let (value, k, partition) = best.expect("k = 3 always has a partition");
    let thm1 = t1_formula(m as u64);
    Ok(MkArgmax { m, k, partition, value, thm1, matches_proof: k == 3 && value == thm1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theorem_tables() {
        let t1: Vec<u64> = (2..=6).map(|m| thm1_bound(m).unwrap().value).collect();
        assert_eq!(t1, vec![1, 1, 4, 6, 11]);
        assert_eq!(thm2_bound(2, true).unwrap().value, 2);
        assert_eq!(thm2_bound(3, true).unwrap().value, 3);
        assert_eq!(thm2_bound(2, false).unwrap().value, 4);
        assert_eq!(thm2_bound(3, false).unwrap().value, 6);
        assert_eq!(thm4_bound(3).unwrap().value, 1);
        assert_eq!(thm4_bound(6).unwrap().value, 11);
        assert!(thm4_bound(1).is_err());
        assert_eq!(nodal_degree_bound(1).value, 3);
        assert_eq!(nondicritical_degree_bound(10).value, 12);
    }

    #[test]
    fn harnack_values() {
        assert_eq!(harnack_bound(4, &[]).unwrap().value, 4);
        assert_eq!(harnack_bound(3, &[]).unwrap().value, 1);
        let r = harnack_bound(3, &[2]).unwrap();
        assert_eq!((r.value, r.raw, r.clamped), (0, -1, true));
    }

    #[test]
    fn mk_examples() {
        assert_eq!(mk_value(4, &[1, 1, 4]).unwrap(), 4);
        assert_eq!(mk_value(4, &[1, 1, 1, 1, 1, 1]).unwrap(), 0);
        assert!(mk_value(4, &[1, 1, 3]).is_err());
        let a = mk_argmax(4).unwrap();
        assert_eq!((a.k, a.value), (3, 4));
        assert_eq!(mk_envelope(4, 3).unwrap(), 4);
        // two conics and a line beat the proof's extremal partition at m = 3
        let a = mk_argmax(3).unwrap();
        assert_eq!((a.k, a.value, a.partition.clone()), (3, 2, vec![2, 2, 1]));
        assert!(!a.matches_proof);
    }
}
