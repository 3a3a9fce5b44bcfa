//! Lovász-form Kruskal-Katona bounds and the numeric stability checks.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::constructions::binom;
use crate::delta::{verify_certificate, PartitionResult};
use crate::error::{invalid, Error, Result};
use crate::hypergraph::Hypergraph;
use crate::set::VertexSet;

/// `x(x-1)...(x-k+1)/k!` for `x ≥ k-1`, zero below.
pub fn lovasz_binomial(x: f64, k: usize) -> f64 {
    assert!(k >= 1, "k must be at least 1");
    if x < (k - 1) as f64 {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (x - i as f64) / (i + 1) as f64)
}

/// The unique `x ≥ k-1` with `lovasz_binomial(x, k) = m`, by bisection.
pub fn lovasz_root(m: f64, k: usize) -> f64 {
    assert!(k >= 1, "k must be at least 1");
    let lo0 = (k - 1) as f64;
    if m <= 0.0 {
        return lo0;
    }
    let mut lo = lo0;
    let mut hi = lo0 + 1.0;
    while lovasz_binomial(hi, k) < m {
        hi = lo0 + 2.0 * (hi - lo0);
    }
    while hi - lo > 1e-11 {
        let mid = 0.5 * (lo + hi);
        if lovasz_binomial(mid, k) < m {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KkReport {
    pub size: usize,
    pub k: usize,
    pub root: f64,
    pub shadow_size: usize,
    pub bound: f64,
    pub holds: bool,
}

/// Shadow size against `C(x, k-1)` where `|F| = C(x, k)`.
///
/// A violation is returned as [`Error::Inconsistency`].
pub fn kk_check(f: &Hypergraph) -> Result<KkReport> {
    let k = f.r();
    let size = f.len();
    let shadow_size = f.shadow().len();
    let (root, bound) = if size == 0 {
        ((k - 1) as f64, 0.0)
    } else {
        let x = lovasz_root(size as f64, k);
        (x, if k == 1 { 1.0 } else { lovasz_binomial(x, k - 1) })
    };
    let holds = shadow_size as f64 >= bound - 1e-6;
    let rep = KkReport { size, k, root, shadow_size, bound, holds };
    if !holds {
        return Err(Error::Inconsistency(format!(
            "shadow {shadow_size} below Kruskal-Katona bound {bound:.6} for |F| = {size}, k = {k}"
        )));
    }
    Ok(rep)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub n: usize,
    pub r: usize,
    pub s: usize,
    pub c: f64,
    pub c0: f64,
    pub roots: Vec<f64>,
    pub b: f64,
    /// `Σ_i C(x_i, r-1)` and its required lower bound.
    pub sum_top: f64,
    pub sum_top_required: f64,
    /// `Σ_i C(x_i, r-2)` and its allowed upper bound.
    pub sum_low: f64,
    pub sum_low_allowed: f64,
    pub hypotheses_hold: bool,
    /// `x_i > n - b` for all `i ≤ s-1`; `None` when the hypotheses fail.
    pub conclusion: Option<bool>,
    pub flags: Vec<String>,
}

impl StabilityReport {
    /// True when the conclusion holds or the hypotheses fail.
    pub fn passed(&self) -> bool {
        self.conclusion.unwrap_or(true)
    }
}

/// Evaluates both hypotheses on a descending root sequence and, when they
/// hold, checks `x_1, ..., x_{s-1} > n - b` with `b = 3(r-1)!(C+C0)`.
pub fn stability_roots_check(x: &[f64], n: usize, r: usize, s: usize, c: f64, c0: f64) -> Result<StabilityReport> {
    if r < 3 {
        return Err(invalid(format!("need r ≥ 3, got {r}")));
    }
    if s == 0 || s > x.len() + 1 {
        return Err(invalid(format!("s = {s} out of range for {} roots", x.len())));
    }
    if x.windows(2).any(|w| w[0] < w[1]) || x.iter().any(|v| v.is_nan()) {
        return Err(invalid("roots must be sorted in descending order"));
    }
    let mut flags = Vec::new();
    if n < r * r {
        flags.push(format!("n = {n} is below r² = {}", r * r));
    }
    let nf = n as f64;
    let fact: f64 = (1..r).map(|i| i as f64).product();
    let b = 3.0 * fact * (c + c0);
    let npow = nf.powi(r as i32 - 2);
    let sum_top: f64 = x.iter().map(|&v| lovasz_binomial(v, r - 1)).sum();
    let sum_top_required = (s - 1) as f64 * binom(n, r - 1) as f64 - (c + c0) * npow;
    let sum_low: f64 = x.iter().map(|&v| lovasz_binomial(v, r - 2)).sum();
    let sum_low_allowed = (s - 1) as f64 * binom(n, r - 2) as f64;
    let hypotheses_hold = sum_top >= sum_top_required && sum_low_allowed >= sum_low;
    let conclusion = if hypotheses_hold {
        Some(x.iter().take(s - 1).all(|&v| v > nf - b))
    } else {
        flags.push("hypotheses not met".into());
        None
    };
    Ok(StabilityReport {
        n,
        r,
        s,
        c,
        c0,
        roots: x.to_vec(),
        b,
        sum_top,
        sum_top_required,
        sum_low,
        sum_low_allowed,
        hypotheses_hold,
        conclusion,
        flags,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeavyReport {
    pub threshold: f64,
    /// `(vertex, degree)` in descending degree, ties by vertex.
    pub vertices: Vec<(usize, usize)>,
    /// At least `s-1` vertices qualify.
    pub enough: bool,
}

impl HeavyReport {
    pub fn vertex_set(&self) -> VertexSet {
        self.vertices.iter().map(|&(v, _)| v).collect()
    }
}

/// Vertices of degree at least `C(n, r-1) - C1·n^(r-2)`.
pub fn heavy_vertices(h: &Hypergraph, s: usize, c1: f64) -> HeavyReport {
    let (n, r) = (h.n(), h.r());
    let threshold = binom(n, r - 1) as f64 - c1 * (n as f64).powi(r as i32 - 2);
    let deg = h.degrees();
    let mut vertices: Vec<(usize, usize)> =
        (1..=n).map(|v| (v, deg[v])).filter(|&(_, d)| d as f64 >= threshold).collect();
    vertices.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    let enough = vertices.len() + 1 >= s;
    HeavyReport { threshold, vertices, enough }
}

/// Roots of `|G(v)| = C(x_v, r-1)` sorted descending. Empty families get
/// root 0 so that both of their binomial terms vanish.
pub fn g_roots(g: &BTreeMap<usize, Vec<VertexSet>>, n: usize, r: usize) -> Vec<f64> {
    let mut x: Vec<f64> = (1..=n)
        .map(|v| match g.get(&v).map_or(0, |f| f.len()) {
            0 => 0.0,
            m => lovasz_root(m as f64, r - 1),
        })
        .collect();
    x.sort_by(|a, b| b.partial_cmp(a).unwrap());
    x
}

/// `G(v)` with every edge meeting `apex` assigned to its smallest apex vertex.
pub fn apex_g_families(h: &Hypergraph, apex: VertexSet) -> BTreeMap<usize, Vec<VertexSet>> {
    let mut g: BTreeMap<usize, Vec<VertexSet>> = BTreeMap::new();
    for &e in h.edges() {
        if let Some(v) = (e & apex).min() {
            g.entry(v).or_default().push(e.without(v));
        }
    }
    g
}

/// `G(v) = {E - v : c(E) = v}` over the verified classes whose pattern
/// family has at least r-1 members of size r-1.
pub fn g_families(pr: &PartitionResult) -> BTreeMap<usize, Vec<VertexSet>> {
    let mut g: BTreeMap<usize, Vec<VertexSet>> = BTreeMap::new();
    for cert in &pr.classes {
        let r = cert.subfamily.r();
        let alpha = cert.structure.as_ref().is_some_and(|c| c.k + 1 >= r);
        if !alpha || !verify_certificate(cert).passed() {
            continue;
        }
        for &e in cert.subfamily.edges() {
            if let Some(c) = cert.special_vertex(e) {
                g.entry(c).or_default().push(e.without(c));
            }
        }
    }
    g
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpreadReport {
    pub s: usize,
    pub max_multiplicity: usize,
    /// (r-2)-sets in the shadow of more than s-1 families.
    pub violations: Vec<VertexSet>,
}

impl SpreadReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Counts, for every (r-2)-set, how many families `G(v)` have it in their shadow.
pub fn shadow_spread(g: &BTreeMap<usize, Vec<VertexSet>>, r: usize, s: usize) -> SpreadReport {
    let mut count: HashMap<VertexSet, usize> = HashMap::new();
    for fam in g.values() {
        let sh: BTreeSet<VertexSet> = fam.iter().flat_map(|y| y.subsets_of_size(r - 2)).collect();
        for z in sh {
            *count.entry(z).or_default() += 1;
        }
    }
    let max_multiplicity = count.values().copied().max().unwrap_or(0);
    let mut violations: Vec<VertexSet> =
        count.into_iter().filter(|&(_, c)| c + 1 > s).map(|(z, _)| z).collect();
    violations.sort_unstable();
    SpreadReport { s, max_multiplicity, violations }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShadowBoundReport {
    pub families: Vec<KkReport>,
    pub degrees: Vec<usize>,
    pub stability: Option<StabilityReport>,
    pub heavy: Option<HeavyReport>,
    pub spread: Option<SpreadReport>,
}

impl ShadowBoundReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}
