use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::pattern::{classify_covering, make_jk, CoveringClass, PatternFamily};
use super::sunflower::{find_sunflower_with, intersections_within, Sunflower, SunflowerOptions};
use crate::error::{invalid, Error, Result};
use crate::hypergraph::{Hypergraph, Partition};
use crate::set::VertexSet;

/// Tuning for [`extract_homogeneous`].
#[derive(Clone, Debug)]
pub struct ExtractConfig {
    /// Independent randomized partition proposals.
    pub restarts: usize,
    pub seed: u64,
    /// Use this r-partition instead of proposing one.
    pub partition: Option<Partition>,
    /// Node limit per sunflower search; members whose witness search runs
    /// out are dropped.
    pub sunflower_node_budget: Option<u64>,
    /// How many of the largest homogeneous classes to refine per restart.
    pub top_classes: usize,
    pub local_search_passes: usize,
    /// Smallest acceptable subfamily.
    pub min_size: usize,
}

impl Default for ExtractConfig {
    fn default() -> Self {
        ExtractConfig {
            restarts: 8,
            seed: 0,
            partition: None,
            sunflower_node_budget: Some(20_000),
            top_classes: 3,
            local_search_passes: 4,
            min_size: 1,
        }
    }
}

/// A q-star inside the subfamily witnessing that `kernel` is a q-kernel
/// through `member`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StarWitness {
    pub member: VertexSet,
    pub sunflower: Sunflower,
}

/// An r-partite homogeneous subfamily together with everything needed to
/// check it independently.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractionCertificate {
    pub subfamily: Hypergraph,
    pub partition: Partition,
    pub j: PatternFamily,
    pub q: usize,
    pub witnesses: Vec<StarWitness>,
    /// Which `J^(k)` the pattern family contains, when it is closed and
    /// (r-2)-covering.
    pub structure: Option<CoveringClass>,
    /// 1-based part holding the distinguished vertex `c(E)` (or `b(E)`).
    pub special_part: Option<usize>,
}

impl ExtractionCertificate {
    pub fn len(&self) -> usize {
        self.subfamily.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subfamily.is_empty()
    }

    /// The vertex of `e` in the special part.
    pub fn special_vertex(&self, e: VertexSet) -> Option<usize> {
        let p = self.special_part?;
        (*self.partition.parts().get(p - 1)? & e).min()
    }

    /// JSON audit record: partition, J as bitmasks, witnesses as member indices.
    pub fn to_json(&self) -> serde_json::Value {
        let members = self.subfamily.edges();
        let idx = |e: VertexSet| members.binary_search(&e).ok();
        let witnesses: Vec<_> = self
            .witnesses
            .iter()
            .map(|w| {
                json!({
                    "member": idx(w.member),
                    "kernel": w.sunflower.kernel.to_vec(),
                    "star": w.sunflower.members().into_iter().map(idx).collect::<Vec<_>>(),
                })
            })
            .collect();
        json!({
            "n": self.subfamily.n(),
            "r": self.subfamily.r(),
            "q": self.q,
            "size": self.len(),
            "partition": self.partition.parts().iter().map(|p| p.to_vec()).collect::<Vec<_>>(),
            "J": self.j.bitmasks(),
            "k": self.structure.as_ref().map(|s| s.k),
            "relabel": self.structure.as_ref().map(|s| s.relabel.clone()),
            "special_part": self.special_part,
            "members": members.iter().map(|e| e.to_vec()).collect::<Vec<_>>(),
            "witnesses": witnesses,
        })
    }
}

/// Per-clause outcome of [`verify_certificate`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub partition: bool,
    pub r_partite: bool,
    pub homogeneous: bool,
    pub closed: bool,
    pub witnesses: bool,
    pub special_part: bool,
    /// Human-readable description of every failed clause.
    pub failures: Vec<String>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.partition && self.r_partite && self.homogeneous && self.closed && self.witnesses && self.special_part
    }
}

/// Distinguished part under the `J^(k)` relabelling: the part playing
/// element `r` when `k ≥ r-1`, element 1 when `1 ≤ k ≤ r-2`.
pub fn special_part_for(class: &CoveringClass, r: usize) -> Option<usize> {
    if class.k >= r.saturating_sub(1) {
        Some(class.relabel[r])
    } else if class.k >= 1 {
        Some(class.relabel[1])
    } else {
        None
    }
}

/// Exhaustively re-checks every clause of a certificate.
pub fn verify_certificate(c: &ExtractionCertificate) -> VerificationReport {
    let f = &c.subfamily;
    let r = f.r();
    let members = f.edges();
    let mut failures = Vec::new();

    let mut partition_ok = c.partition.len() == r;
    let mut acc = VertexSet::EMPTY;
    for p in c.partition.parts() {
        if !acc.is_disjoint(*p) {
            partition_ok = false;
        }
        acc = acc | *p;
    }
    if acc != c.partition.ground() || !acc.is_subset(VertexSet::full(f.n())) {
        partition_ok = false;
    }
    if !partition_ok {
        failures.push(format!("partition: expected {r} pairwise disjoint parts inside [{}]", f.n()));
    }

    let r_partite = partition_ok && members.iter().all(|&e| c.partition.is_transversal(e));
    if !r_partite {
        failures.push("r-partite: some member is not transversal".into());
    }

    let mut homogeneous = r_partite && !members.is_empty() && c.j.r() == r;
    if homogeneous {
        for &e in members {
            let got: BTreeSet<VertexSet> = intersections_within(members, e)
                .into_iter()
                .map(|x| c.partition.pattern_unchecked(x))
                .collect();
            if &got != c.j.members() {
                failures.push(format!("homogeneous: Π(I({{{e}}})) differs from J"));
                homogeneous = false;
                break;
            }
        }
    } else if members.is_empty() {
        failures.push("homogeneous: empty subfamily".into());
    }

    let closed = c.j.is_closed() && c.j.members().iter().all(|m| m.len() < r);
    if !closed {
        failures.push("closed: J is not closed under intersection".into());
    }

    let mut witnesses = true;
    let mut witnessed: BTreeSet<(VertexSet, VertexSet)> = BTreeSet::new();
    for w in &c.witnesses {
        let sf = &w.sunflower;
        let ms = sf.members();
        let ok = sf.q() == c.q
            && sf.is_valid()
            && ms.contains(&w.member)
            && ms.iter().all(|&m| f.contains_edge(m));
        if ok {
            witnessed.insert((w.member, sf.kernel));
        } else {
            witnesses = false;
            failures.push(format!("witnesses: invalid star for {{{}}} with kernel {{{}}}", w.member, sf.kernel));
        }
    }
    'outer: for &e in members {
        for a in intersections_within(members, e) {
            if !witnessed.contains(&(e, a)) {
                witnesses = false;
                failures.push(format!("witnesses: no q-star for {{{e}}} with kernel {{{a}}}"));
                break 'outer;
            }
        }
    }

    let special_part = match &c.structure {
        None => c.special_part.is_none(),
        Some(class) => {
            let mut perm = class.relabel.clone();
            perm.sort_unstable();
            let is_perm = class.relabel.len() == r + 1 && perm == (0..=r).collect::<Vec<_>>();
            is_perm
                && class.k == c.j.count_of_size(r - 1)
                && make_jk(r, class.k).map_or(false, |jk| c.j.is_superset_of(&jk.relabel(&class.relabel)))
                && c.special_part == special_part_for(class, r)
        }
    };
    if !special_part {
        failures.push("special-part: classification or distinguished part is inconsistent".into());
    }

    VerificationReport {
        partition: partition_ok,
        r_partite,
        homogeneous,
        closed,
        witnesses,
        special_part,
        failures,
    }
}

struct Settled {
    members: Vec<VertexSet>,
    j: BTreeSet<VertexSet>,
    witnesses: Vec<StarWitness>,
}

fn structure_of(members: &[VertexSet], e: VertexSet, p: &Partition) -> BTreeSet<VertexSet> {
    members
        .iter()
        .filter(|&&x| x != e)
        .map(|&x| p.pattern_unchecked(x & e))
        .collect()
}

fn structures(members: &[VertexSet], p: &Partition) -> Vec<BTreeSet<VertexSet>> {
    if members.len() > 256 {
        members.par_iter().map(|&e| structure_of(members, e, p)).collect()
    } else {
        members.iter().map(|&e| structure_of(members, e, p)).collect()
    }
}

/// Homogeneous classes, largest first, ties by the structure's order.
fn ranked_classes(members: &[VertexSet], p: &Partition) -> Vec<Vec<VertexSet>> {
    let mut groups: BTreeMap<BTreeSet<VertexSet>, Vec<VertexSet>> = BTreeMap::new();
    for (e, s) in members.iter().zip(structures(members, p)) {
        groups.entry(s).or_default().push(*e);
    }
    let mut classes: Vec<Vec<VertexSet>> = groups.into_values().collect();
    // stable sort keeps the map order among equal sizes
    classes.sort_by_key(|c| std::cmp::Reverse(c.len()));
    classes
}

/// Alternates "largest homogeneous class" and "drop unwitnessed members"
/// until both are stable.
fn settle(mut cur: Vec<VertexSet>, p: &Partition, q: usize, budget: Option<u64>) -> Option<Settled> {
    loop {
        if cur.is_empty() {
            return None;
        }
        let classes = ranked_classes(&cur, p);
        if classes.len() > 1 {
            cur = classes.into_iter().next().unwrap();
            continue;
        }
        let mut keep = Vec::with_capacity(cur.len());
        let mut witnesses = Vec::new();
        for &e in &cur {
            let mut ws = Vec::new();
            let ok = intersections_within(&cur, e).into_iter().all(|a| {
                let opts = SunflowerOptions { greedy_only: false, node_budget: budget, containing: Some(e) };
                match find_sunflower_with(&cur, a, q, opts) {
                    Some(sf) => {
                        ws.push(StarWitness { member: e, sunflower: sf });
                        true
                    }
                    None => false,
                }
            });
            if ok {
                keep.push(e);
                witnesses.extend(ws);
            }
        }
        if keep.len() == cur.len() {
            let j = structure_of(&cur, cur[0], p);
            let fam = PatternFamily::from_valid(p.len(), j.clone());
            if !fam.is_closed() {
                return None;
            }
            return Some(Settled { members: cur, j, witnesses });
        }
        cur = keep;
    }
}

/// Greedy balanced r-colouring of the co-occurrence graph followed by
/// single-vertex moves that increase the number of transversal edges.
fn propose_partition(edges: &[VertexSet], n: usize, r: usize, passes: usize, rng: &mut ChaCha8Rng) -> Partition {
    Partition::from_coloring(&propose_coloring(edges, n, r, passes, rng), r)
}

/// `pivot` alone in the first part; the rest coloured on its link.
fn pivot_partition(
    edges: &[VertexSet],
    n: usize,
    r: usize,
    pivot: usize,
    passes: usize,
    rng: &mut ChaCha8Rng,
) -> Partition {
    let link: Vec<VertexSet> = edges.iter().filter(|e| e.contains(pivot)).map(|e| e.without(pivot)).collect();
    let mut color = propose_coloring(&link, n, r - 1, passes, rng);
    for c in color.iter_mut().skip(1) {
        *c += 1;
    }
    color[pivot] = 0;
    Partition::from_coloring(&color, r)
}

fn propose_coloring(edges: &[VertexSet], n: usize, r: usize, passes: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut incident: Vec<Vec<VertexSet>> = vec![Vec::new(); n + 1];
    for &e in edges {
        for v in e.iter() {
            incident[v].push(e);
        }
    }
    let mut order: Vec<usize> = (1..=n).filter(|&v| !incident[v].is_empty()).collect();
    order.shuffle(rng);
    const NONE: usize = usize::MAX;
    let mut color = vec![NONE; n + 1];
    let mut sizes = vec![0usize; r];
    for &v in &order {
        let mut conflicts = vec![0usize; r];
        for &e in &incident[v] {
            for u in e.without(v).iter() {
                if color[u] != NONE {
                    conflicts[color[u]] += 1;
                }
            }
        }
        let c = (0..r).min_by_key(|&c| (conflicts[c], sizes[c], c)).unwrap();
        color[v] = c;
        sizes[c] += 1;
    }
    let transversal_at = |color: &[usize], v: usize| -> usize {
        incident[v]
            .iter()
            .filter(|e| {
                let mut seen = 0u64;
                e.iter().all(|u| {
                    let bit = 1u64 << color[u];
                    let fresh = seen & bit == 0;
                    seen |= bit;
                    fresh
                })
            })
            .count()
    };
    for _ in 0..passes {
        let mut moved = false;
        for &v in &order {
            let old = color[v];
            let base = transversal_at(&color, v);
            let mut best = (base, old);
            for c in 0..r {
                if c == old {
                    continue;
                }
                color[v] = c;
                let score = transversal_at(&color, v);
                if score > best.0 {
                    best = (score, c);
                }
            }
            color[v] = best.1;
            if best.1 != old {
                sizes[old] -= 1;
                sizes[best.1] += 1;
                moved = true;
            }
        }
        if !moved {
            break;
        }
    }
    for v in 1..=n {
        if color[v] == NONE {
            let c = (0..r).min_by_key(|&c| (sizes[c], c)).unwrap();
            color[v] = c;
            sizes[c] += 1;
        }
    }
    color
}

fn single_edge_partition(e: VertexSet, n: usize, r: usize) -> Partition {
    let mut color = vec![0usize; n + 1];
    for (i, v) in e.iter().enumerate() {
        color[v] = i;
    }
    let mut next = 0;
    for v in (1..=n).filter(|&v| !e.contains(v)) {
        color[v] = next % r;
        next += 1;
    }
    Partition::from_coloring(&color, r)
}

fn build_certificate(
    n: usize,
    r: usize,
    q: usize,
    p: Partition,
    settled: Settled,
) -> Result<ExtractionCertificate> {
    let j = PatternFamily::from_valid(r, settled.j);
    let structure = if r >= 2 && r <= 8 && j.is_closed() && j.is_m_covering(r - 2) {
        Some(classify_covering(&j)?)
    } else {
        None
    };
    let special_part = structure.as_ref().and_then(|s| special_part_for(s, r));
    let mut members = settled.members;
    members.sort_unstable();
    Ok(ExtractionCertificate {
        subfamily: Hypergraph::from_valid(n, r, members),
        partition: p,
        j,
        q,
        witnesses: settled.witnesses,
        structure,
        special_part,
    })
}

fn better(a: &ExtractionCertificate, b: &ExtractionCertificate) -> bool {
    (std::cmp::Reverse(a.len()), a.subfamily.edges()) < (std::cmp::Reverse(b.len()), b.subfamily.edges())
}

/// Finds an r-partite subfamily with a common intersection pattern family
/// `J`, closed under intersection, with q-star witnesses for every
/// member/kernel pair.
///
/// Candidates from all restarts are verified and the largest passing one is
/// returned (ties lexicographic). A single edge always qualifies, so the
/// result is empty only when `f` is.
pub fn extract_homogeneous(f: &Hypergraph, q: usize, cfg: &ExtractConfig) -> Result<ExtractionCertificate> {
    let (n, r) = (f.n(), f.r());
    if f.is_empty() {
        return Err(Error::ExtractionFailed("family is empty".into()));
    }
    if r > 16 {
        return Err(invalid(format!("extraction supports r ≤ 16, got {r}")));
    }
    if q == 0 {
        return Err(invalid("q must be positive"));
    }
    if let Some(p) = &cfg.partition {
        if p.len() != r {
            return Err(invalid(format!("input partition has {} parts, expected {r}", p.len())));
        }
    }
    let restarts = if cfg.partition.is_some() { 1 } else { cfg.restarts.max(1) };
    let deg = f.degrees();
    let mut by_degree: Vec<usize> = (1..=n).filter(|&v| deg[v] > 0).collect();
    by_degree.sort_by(|&x, &y| deg[y].cmp(&deg[x]).then(x.cmp(&y)));
    let candidates: Vec<Result<Vec<ExtractionCertificate>>> = (0..restarts)
        .into_par_iter()
        .map(|i| {
            let p = match &cfg.partition {
                Some(p) => p.clone(),
                None => {
                    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(i as u64));
                    if i % 2 == 1 && r >= 2 && !by_degree.is_empty() {
                        let pivot = by_degree[(i / 2) % by_degree.len()];
                        pivot_partition(f.edges(), n, r, pivot, cfg.local_search_passes, &mut rng)
                    } else {
                        propose_partition(f.edges(), n, r, cfg.local_search_passes, &mut rng)
                    }
                }
            };
            let transversal: Vec<VertexSet> = f.edges().iter().copied().filter(|&e| p.is_transversal(e)).collect();
            if transversal.is_empty() {
                return Ok(Vec::new());
            }
            let mut out = Vec::new();
            for class in ranked_classes(&transversal, &p).into_iter().take(cfg.top_classes.max(1)) {
                if let Some(s) = settle(class, &p, q, cfg.sunflower_node_budget) {
                    out.push(build_certificate(n, r, q, p.clone(), s)?);
                }
            }
            Ok(out)
        })
        .collect();

    let first = f.edges()[0];
    let fallback_p = match &cfg.partition {
        Some(p) if p.is_transversal(first) => p.clone(),
        _ => single_edge_partition(first, n, r),
    };
    let mut best = build_certificate(
        n,
        r,
        q,
        fallback_p,
        Settled { members: vec![first], j: BTreeSet::new(), witnesses: Vec::new() },
    )?;
    for batch in candidates {
        for c in batch? {
            if better(&c, &best) && verify_certificate(&c).passed() {
                best = c;
            }
        }
    }
    if best.len() < cfg.min_size {
        return Err(Error::ExtractionFailed(format!(
            "best certificate has {} members, below the required {}",
            best.len(),
            cfg.min_size
        )));
    }
    log::debug!("extracted {} of {} edges, |J| = {}", best.len(), f.len(), best.j.len());
    Ok(best)
}

/// Classes `H_1..H_m` and residue `H_0` of the repeated extraction.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PartitionResult {
    pub classes: Vec<ExtractionCertificate>,
    pub residue: Hypergraph,
    /// The stopping size `C·n^(r-2)`.
    pub threshold: f64,
}

impl PartitionResult {
    pub fn m(&self) -> usize {
        self.classes.len()
    }

    /// Classes and residue are pairwise disjoint and cover `h` exactly.
    pub fn is_partition_of(&self, h: &Hypergraph) -> bool {
        let mut all: Vec<VertexSet> = self.residue.edges().to_vec();
        for c in &self.classes {
            all.extend_from_slice(c.subfamily.edges());
        }
        all.sort_unstable();
        let before = all.len();
        all.dedup();
        before == all.len() && all.as_slice() == h.edges()
    }

    /// Union of the classes.
    pub fn covered(&self) -> Vec<VertexSet> {
        let mut out: Vec<VertexSet> = self.classes.iter().flat_map(|c| c.subfamily.edges().iter().copied()).collect();
        out.sort_unstable();
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "m": self.m(),
            "threshold": self.threshold,
            "residue": self.residue.edges().iter().map(|e| e.to_vec()).collect::<Vec<_>>(),
            "classes": self.classes.iter().map(|c| c.to_json()).collect::<Vec<_>>(),
        })
    }
}

/// Peels off extracted classes until at most `C·n^(r-2)` edges remain.
pub fn partition_procedure(h: &Hypergraph, q: usize, c: f64, cfg: &ExtractConfig) -> Result<PartitionResult> {
    if !(c >= 0.0) {
        return Err(invalid(format!("C must be non-negative, got {c}")));
    }
    let threshold = c * (h.n() as f64).powi(h.r() as i32 - 2);
    let mut remainder = h.clone();
    let mut classes = Vec::new();
    while remainder.len() as f64 > threshold {
        let mut step_cfg = cfg.clone();
        step_cfg.seed = cfg.seed.wrapping_add((classes.len() as u64).wrapping_mul(0x9E37_79B9));
        let cert = extract_homogeneous(&remainder, q, &step_cfg)?;
        remainder = remainder.difference(&cert.subfamily);
        classes.push(cert);
    }
    Ok(PartitionResult { classes, residue: remainder, threshold })
}
