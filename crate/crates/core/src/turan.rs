//! Exact Turán numbers of tree blowups for small `n` by branch and bound.
//!
//! Families are bitmasks over the lexicographically ordered r-subsets of
//! `[n]` (at most 128 of them). Every copy of the forbidden blowup is
//! precomputed as such a mask. The search decides r-sets in lexicographic
//! order, trying inclusion first; after an inclusion, any undecided r-set
//! that would complete a copy is excluded at once. A node is pruned when
//! `|S| + |undecided| - (disjoint copies among undecided sets)` cannot beat
//! the incumbent, or when its (included, excluded) pair is isomorphic to one
//! already visited.

use std::collections::HashSet;
use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::canon::canonical_colored;
use crate::constructions::{binom, star_construction};
use crate::containment::contains_blowup;
use crate::error::{invalid, Result};
use crate::hypergraph::Hypergraph;
use crate::set::VertexSet;
use crate::tree::{blob, blowup_vertex_count, BipartiteTree, BlowupSpec, TreeVertex};

/// Search limits and knobs.
#[derive(Clone, Debug)]
pub struct OracleConfig {
    /// Node limit; when reached the best family so far is returned with
    /// `exact = false`.
    pub node_budget: Option<u64>,
    /// Isomorph rejection applies to nodes with at most this many included sets.
    pub memo_depth: usize,
    /// Depth up to which both branches run in parallel.
    pub parallel_depth: usize,
    /// Label for reports.
    pub pattern: String,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { node_budget: None, memo_depth: usize::MAX, parallel_depth: 10, pattern: String::new() }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SearchStats {
    pub nodes: u64,
    pub isomorph_rejections: u64,
    pub copies: usize,
    pub seconds: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OracleResult {
    pub n: usize,
    pub r: usize,
    pub pattern: String,
    /// The maximum (or best found when `exact` is false).
    pub value: u128,
    /// False when the node budget ran out.
    pub exact: bool,
    pub witness: Hypergraph,
    pub stats: SearchStats,
}

impl OracleResult {
    /// The witness has the stated size and contains no copy of the blowup.
    pub fn witness_is_valid(&self, tree: &BipartiteTree, spec: BlowupSpec) -> bool {
        self.witness.len() as u128 == self.value
            && contains_blowup(&self.witness, tree, spec).map_or(false, |e| e.is_none())
    }
}

/// The r-subsets of `[n]` in lexicographic order.
pub fn rsets(n: usize, r: usize) -> Vec<VertexSet> {
    let mut v: Vec<VertexSet> = VertexSet::full(n).subsets_of_size(r).collect();
    v.sort_unstable();
    v
}

/// Edge masks of all copies of the blowup inside `K_n^(r)`.
pub fn copy_masks(n: usize, tree: &BipartiteTree, spec: BlowupSpec) -> Result<Vec<u128>> {
    let r = spec.r();
    let sets = rsets(n, r);
    if sets.len() > 128 {
        return Err(invalid(format!("C({n}, {r}) = {} exceeds 128 r-sets", sets.len())));
    }
    let index: std::collections::HashMap<VertexSet, usize> = sets.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let v = blowup_vertex_count(tree, spec);
    if v > n {
        return Ok(Vec::new());
    }
    // pattern edges over pattern vertices 1..=v
    let pattern_edges: Vec<VertexSet> = tree
        .edges()
        .iter()
        .map(|&(i, j)| blob(tree, spec, TreeVertex::U(i)) | blob(tree, spec, TreeVertex::V(j)))
        .collect();
    let mut seen: HashSet<u128> = HashSet::new();
    let mut map = vec![0usize; v + 1];
    fn rec(
        k: usize,
        v: usize,
        n: usize,
        used: VertexSet,
        map: &mut Vec<usize>,
        pattern_edges: &[VertexSet],
        index: &std::collections::HashMap<VertexSet, usize>,
        seen: &mut HashSet<u128>,
    ) {
        if k > v {
            let mut mask = 0u128;
            for e in pattern_edges {
                mask |= 1u128 << index[&e.map(map)];
            }
            seen.insert(mask);
            return;
        }
        for x in 1..=n {
            if !used.contains(x) {
                map[k] = x;
                rec(k + 1, v, n, used.with(x), map, pattern_edges, index, seen);
            }
        }
    }
    rec(1, v, n, VertexSet::EMPTY, &mut map, &pattern_edges, &index, &mut seen);
    let mut out: Vec<u128> = seen.into_iter().collect();
    out.sort_unstable();
    Ok(out)
}

struct Shared<'a> {
    n: usize,
    m: usize,
    sets: &'a [VertexSet],
    copies: &'a [u128],
    by_edge: Vec<Vec<u32>>,
    best: AtomicUsize,
    witness: Mutex<u128>,
    nodes: AtomicU64,
    rejections: AtomicU64,
    budget: u64,
    exhausted: AtomicBool,
    memo: Mutex<HashSet<Vec<Vec<u64>>>>,
    memo_depth: usize,
    parallel_depth: usize,
    copy_edges: usize,
}

impl Shared<'_> {
    fn offer(&self, s: u128) {
        let size = s.count_ones() as usize;
        let mut w = self.witness.lock().unwrap();
        if size > self.best.load(Ordering::SeqCst) || (size == self.best.load(Ordering::SeqCst) && s < *w && size > 0) {
            self.best.store(size, Ordering::SeqCst);
            *w = s;
        }
    }

    /// Greedy lower bound on how many undecided sets must still be excluded:
    /// disjoint live copies, fewest undecided sets first.
    fn packing(&self, s: u128, x: u128) -> usize {
        let mut used = 0u128;
        let mut k = 0;
        for want in 1..=self.copy_edges {
            for &c in self.copies {
                let rest = c & !s;
                if c & x == 0 && rest & used == 0 && rest.count_ones() as usize == want {
                    used |= rest;
                    k += 1;
                }
            }
        }
        k
    }

    fn search(&self, s: u128, x: u128, i: usize, depth: usize) {
        if self.exhausted.load(Ordering::Relaxed) {
            return;
        }
        let nodes = self.nodes.fetch_add(1, Ordering::Relaxed) + 1;
        if nodes > self.budget {
            self.exhausted.store(true, Ordering::Relaxed);
            return;
        }
        let all = if self.m == 128 { u128::MAX } else { (1u128 << self.m) - 1 };
        let prefix = if i >= 128 { u128::MAX } else { (1u128 << i) - 1 };
        let undecided = all & !prefix & !x & !s;
        let included = s.count_ones() as usize;
        let open = undecided.count_ones() as usize;
        let best = self.best.load(Ordering::SeqCst);
        if included + open <= best {
            return;
        }
        if undecided == 0 {
            self.offer(s);
            return;
        }
        if included + open - self.packing(s, x) <= best {
            return;
        }
        if included <= self.memo_depth {
            let sl: Vec<VertexSet> = bits(s).map(|k| self.sets[k]).collect();
            let xl: Vec<VertexSet> = bits(all & !s & !undecided).map(|k| self.sets[k]).collect();
            let (label, _) = canonical_colored(self.n, &[&sl, &xl]);
            if !self.memo.lock().unwrap().insert(label) {
                self.rejections.fetch_add(1, Ordering::Relaxed);
                return;
            }
        }
        let e = undecided.trailing_zeros() as usize;
        let bit = 1u128 << e;
        // include: exclude every undecided set that would complete a copy
        let s2 = s | bit;
        let mut x2 = x;
        for &ci in &self.by_edge[e] {
            let c = self.copies[ci as usize];
            if c & x != 0 {
                continue;
            }
            let rest = c & !s2;
            if rest.count_ones() == 1 {
                x2 |= rest;
            }
        }
        let x3 = x | bit;
        if depth < self.parallel_depth {
            rayon::join(|| self.search(s2, x2, e + 1, depth + 1), || self.search(s, x3, e + 1, depth + 1));
        } else {
            self.search(s2, x2, e + 1, depth + 1);
            self.search(s, x3, e + 1, depth + 1);
        }
    }
}

fn bits(mut m: u128) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let k = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(k)
        }
    })
}

fn mask_to_hypergraph(n: usize, r: usize, sets: &[VertexSet], mask: u128) -> Hypergraph {
    Hypergraph::from_valid(n, r, bits(mask).map(|k| sets[k]).collect())
}

fn is_free(mask: u128, copies: &[u128]) -> bool {
    copies.iter().all(|&c| c & mask != c)
}

/// `ex_r(n, T(a, b))` by branch and bound.
pub fn turan_exact(
    n: usize,
    r: usize,
    tree: &BipartiteTree,
    spec: BlowupSpec,
    cfg: &OracleConfig,
) -> Result<OracleResult> {
    if spec.r() != r {
        return Err(invalid(format!("a + b = {} but r = {r}", spec.r())));
    }
    if n < r {
        return Err(invalid(format!("need n ≥ r, got n = {n}, r = {r}")));
    }
    let start = Instant::now();
    let pattern = if cfg.pattern.is_empty() { format!("T({},{})", spec.a, spec.b) } else { cfg.pattern.clone() };
    if blowup_vertex_count(tree, spec) > n {
        let witness = Hypergraph::complete(n, r)?;
        return Ok(OracleResult {
            n,
            r,
            pattern,
            value: binom(n, r),
            exact: true,
            witness,
            stats: SearchStats { seconds: start.elapsed().as_secs_f64(), ..Default::default() },
        });
    }
    let sets = rsets(n, r);
    let copies = copy_masks(n, tree, spec)?;
    let m = sets.len();
    let mut by_edge = vec![Vec::new(); m];
    for (ci, &c) in copies.iter().enumerate() {
        for k in bits(c) {
            by_edge[k].push(ci as u32);
        }
    }
    let shared = Shared {
        n,
        m,
        sets: &sets,
        copies: &copies,
        by_edge,
        best: AtomicUsize::new(0),
        witness: Mutex::new(0),
        nodes: AtomicU64::new(0),
        rejections: AtomicU64::new(0),
        budget: cfg.node_budget.unwrap_or(u64::MAX),
        exhausted: AtomicBool::new(false),
        memo: Mutex::new(HashSet::new()),
        memo_depth: cfg.memo_depth,
        parallel_depth: cfg.parallel_depth,
        copy_edges: tree.edges().len(),
    };
    // seed the incumbent with known free families
    for s in 1..=n.min(8) {
        if let Ok(h) = star_construction(n, r, s) {
            let mask = h.edges().iter().fold(0u128, |acc, e| acc | 1u128 << sets.binary_search(e).unwrap());
            if is_free(mask, &copies) {
                shared.offer(mask);
            }
        }
    }
    let k = blowup_vertex_count(tree, spec) - 1;
    if k >= r {
        let mask = sets
            .iter()
            .enumerate()
            .filter(|(_, e)| VertexSet::max(**e).unwrap() <= k)
            .fold(0u128, |acc, (i, _)| acc | 1u128 << i);
        shared.offer(mask);
    }
    shared.search(0, 0, 0, 0);
    let witness_mask = *shared.witness.lock().unwrap();
    let witness = mask_to_hypergraph(n, r, &sets, witness_mask);
    let value = witness.len() as u128;
    let exact = !shared.exhausted.load(Ordering::Relaxed);
    log::info!("ex_{r}({n}, {pattern}) {} {value}", if exact { "=" } else { "≥" });
    Ok(OracleResult {
        n,
        r,
        pattern,
        value,
        exact,
        witness,
        stats: SearchStats {
            nodes: shared.nodes.load(Ordering::Relaxed),
            isomorph_rejections: shared.rejections.load(Ordering::Relaxed),
            copies: copies.len(),
            seconds: start.elapsed().as_secs_f64(),
        },
    })
}

/// One row of a batch run.
#[derive(Clone, Debug)]
pub struct TableRow {
    pub n: usize,
    pub r: usize,
    pub tree: BipartiteTree,
    pub spec: BlowupSpec,
    pub pattern: String,
}

/// Runs every row in order and collects the results.
pub fn turan_table(rows: &[TableRow], cfg: &OracleConfig) -> Result<Vec<OracleResult>> {
    rows.iter()
        .map(|row| {
            let mut c = cfg.clone();
            c.pattern = row.pattern.clone();
            turan_exact(row.n, row.r, &row.tree, row.spec, &c)
        })
        .collect()
}

/// CSV with columns `n,r,pattern,exact_or_lb,value,nodes,seconds`.
pub fn table_csv(results: &[OracleResult]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["n", "r", "pattern", "exact_or_lb", "value", "nodes", "seconds"])?;
    for res in results {
        w.write_record([
            res.n.to_string(),
            res.r.to_string(),
            res.pattern.clone(),
            if res.exact { "exact" } else { "lb" }.to_string(),
            res.value.to_string(),
            res.stats.nodes.to_string(),
            format!("{:.3}", res.stats.seconds),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| crate::Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{bush_tree, path_tree, BushParams};

    #[test]
    fn too_large_pattern_gives_complete() {
        let t = bush_tree(BushParams::new(2, 1).unwrap());
        let spec = BlowupSpec::new(2, 1).unwrap();
        let res = turan_exact(7, 3, &t, spec, &OracleConfig::default()).unwrap();
        assert_eq!(res.value, 35);
        assert!(res.exact);
    }

    #[test]
    fn two_edges_sharing_a_pair() {
        // a=1, b=2 on the single-edge path: forbids nothing but one edge
        let t = path_tree(2).unwrap();
        let spec = BlowupSpec::new(1, 2).unwrap();
        // copies: {u1} ∪ V1, {u2} ∪ V1, i.e. two triples sharing a pair
        let res = turan_exact(6, 3, &t, spec, &OracleConfig::default()).unwrap();
        assert!(res.exact);
        // largest partial Steiner triple system on 6 points has 4 triples
        assert_eq!(res.value, 4);
        assert!(res.witness_is_valid(&t, spec));
    }

    #[test]
    fn graph_paths() {
        // ex(n, P_3) for graphs: a matching plus possibly a triangle
        let t = path_tree(3).unwrap();
        let spec = BlowupSpec::new(1, 1).unwrap();
        let res = turan_exact(6, 2, &t, spec, &OracleConfig::default()).unwrap();
        assert_eq!(res.value, 6);
        assert!(res.witness_is_valid(&t, spec));
    }

    #[test]
    fn csv_header() {
        let csv = table_csv(&[]).unwrap();
        assert_eq!(csv.trim(), "n,r,pattern,exact_or_lb,value,nodes,seconds");
    }
}
