//! The star construction, the Steiner-augmented family and the closed-form
//! lower bound.

use num_integer::binomial;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::hypergraph::Hypergraph;
use crate::set::{VertexSet, MAX_VERTEX};

/// Exact binomial coefficient; zero when `k > n`.
pub fn binom(n: usize, k: usize) -> u128 {
    if k > n {
        0
    } else {
        binomial(n as u128, k as u128)
    }
}

/// `C(n, r) - C(n-s+1, r)`, the size of the star construction.
pub fn lower_bound_value(n: usize, r: usize, s: usize) -> u128 {
    if s == 0 {
        return 0;
    }
    binom(n, r) - binom((n + 1).saturating_sub(s), r)
}

fn check(n: usize, r: usize, s: usize) -> Result<()> {
    if r < 2 || n < r {
        return Err(invalid(format!("need n ≥ r ≥ 2, got n = {n}, r = {r}")));
    }
    if s == 0 {
        return Err(invalid("s must be at least 1"));
    }
    if n > MAX_VERTEX {
        return Err(invalid(format!("n = {n} exceeds {MAX_VERTEX}")));
    }
    Ok(())
}

/// All r-subsets of `[n]` meeting `[s-1]`.
pub fn star_construction(n: usize, r: usize, s: usize) -> Result<Hypergraph> {
    check(n, r, s)?;
    let apex = VertexSet::full(s - 1);
    Ok(Hypergraph::complete(n, r)?.filter(|e| !e.is_disjoint(apex)))
}

/// `E_1 ∪ E_2`: the r-sets with exactly one vertex in `A = [s-1]`, plus a
/// greedy lexicographic packing of r-sets on `[n] \ A` in which no two
/// members share r-1 vertices.
pub fn steiner_augmented(n: usize, r: usize, s: usize) -> Result<Hypergraph> {
    steiner_parts(n, r, s).map(|(h, _, _)| h)
}

fn steiner_parts(n: usize, r: usize, s: usize) -> Result<(Hypergraph, usize, usize)> {
    check(n, r, s)?;
    if n + 1 < s + r {
        return Err(invalid(format!("need n - s + 1 ≥ r, got n = {n}, s = {s}, r = {r}")));
    }
    let apex = VertexSet::full(s - 1);
    let rest = VertexSet::full(n) - apex;
    let mut edges: Vec<VertexSet> = Hypergraph::complete(n, r)?
        .edges()
        .iter()
        .copied()
        .filter(|e| (*e & apex).len() == 1)
        .collect();
    let e1 = edges.len();
    let mut covered: std::collections::HashSet<VertexSet> = std::collections::HashSet::new();
    let mut e2 = 0;
    let mut pool: Vec<VertexSet> = rest.subsets_of_size(r).collect();
    pool.sort_unstable();
    for e in pool {
        let subs: Vec<VertexSet> = e.subsets_of_size(r - 1).collect();
        if subs.iter().all(|y| !covered.contains(y)) {
            covered.extend(subs);
            edges.push(e);
            e2 += 1;
        }
    }
    Ok((Hypergraph::new(n, r, edges)?, e1, e2))
}

/// Closed-form and realized sizes of a generated family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstructionReport {
    pub kind: String,
    pub n: usize,
    pub r: usize,
    pub s: usize,
    pub closed_form: Option<u128>,
    pub realized: usize,
    /// Steiner part only: realized packing size and the ideal `C(n-s+1, r-1)/r`.
    pub packing: Option<usize>,
    pub packing_ideal: Option<f64>,
    /// Result of a containment check, when one was run.
    pub bush_free: Option<bool>,
}

pub fn star_report(n: usize, r: usize, s: usize) -> Result<(Hypergraph, ConstructionReport)> {
    let h = star_construction(n, r, s)?;
    let rep = ConstructionReport {
        kind: "star".into(),
        n,
        r,
        s,
        closed_form: Some(lower_bound_value(n, r, s)),
        realized: h.len(),
        packing: None,
        packing_ideal: None,
        bush_free: None,
    };
    Ok((h, rep))
}

pub fn steiner_report(n: usize, r: usize, s: usize) -> Result<(Hypergraph, ConstructionReport)> {
    let (h, e1, e2) = steiner_parts(n, r, s)?;
    let ideal = binom(n + 1 - s, r - 1) as f64 / r as f64;
    let rep = ConstructionReport {
        kind: "steiner".into(),
        n,
        r,
        s,
        closed_form: None,
        realized: e1 + e2,
        packing: Some(e2),
        packing_ideal: Some(ideal),
        bush_free: None,
    };
    Ok((h, rep))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn star_counts() {
        assert_eq!(star_construction(8, 3, 2).unwrap().len(), 21);
        assert_eq!(star_construction(8, 3, 3).unwrap().len(), 36);
        assert!(star_construction(8, 3, 1).unwrap().is_empty());
    }

    #[test]
    fn bound_values() {
        assert_eq!(lower_bound_value(8, 3, 2), 21);
        assert_eq!(lower_bound_value(9, 4, 1), 0);
        assert_eq!(lower_bound_value(10, 4, 3), 140);
    }

    #[test]
    fn steiner_parts_sizes() {
        let (h, rep) = steiner_report(9, 3, 2).unwrap();
        assert_eq!(rep.realized - rep.packing.unwrap(), 28);
        assert_eq!(h.len(), rep.realized);
        assert!(rep.packing.unwrap() as f64 <= rep.packing_ideal.unwrap());
        let only_packing = steiner_augmented(7, 3, 1).unwrap();
        assert!(only_packing.edges().iter().all(|e| e.len() == 3));
    }

    #[test]
    fn packing_shares_no_r_minus_one_set() {
        let h = steiner_augmented(12, 3, 3).unwrap();
        let apex = VertexSet::full(2);
        let e2: Vec<VertexSet> = h.edges().iter().copied().filter(|e| e.is_disjoint(apex)).collect();
        for i in 0..e2.len() {
            for j in i + 1..e2.len() {
                assert!((e2[i] & e2[j]).len() < 2);
            }
        }
    }
}
