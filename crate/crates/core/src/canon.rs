//! Exact canonical labelling of (edge-coloured) hypergraphs.
//!
//! Individualisation-refinement: vertex colours are refined by the multiset
//! of colour patterns of incident edges until stable, then the search
//! branches on the first non-singleton cell. Every discrete leaf yields a
//! relabelling; the lexicographically smallest relabelled edge list is the
//! canonical label. Branches whose vertex is a twin (the transposition is an
//! automorphism) of an already explored vertex of the same cell are skipped.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::hypergraph::Hypergraph;
use crate::set::VertexSet;

/// Isomorphism-invariant label: equal labels iff isomorphic inputs.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CanonicalLabel {
    pub n: usize,
    pub r: usize,
    /// Relabelled edges per colour class, each sorted by bit value.
    pub classes: Vec<Vec<u64>>,
}

#[derive(Clone, Debug)]
pub struct CanonicalForm {
    pub label: CanonicalLabel,
    /// `relabeling[v]` is the canonical name of vertex `v` (index 0 unused).
    pub relabeling: Vec<usize>,
}

impl CanonicalForm {
    /// The canonical representative as a hypergraph.
    pub fn hypergraph(&self) -> Hypergraph {
        let edges = self.label.classes.first().map(|c| c.as_slice()).unwrap_or(&[]);
        Hypergraph::from_valid(
            self.label.n,
            self.label.r,
            edges.iter().map(|&b| VertexSet::from_bits(b)).collect(),
        )
    }
}

pub fn canonical_form(h: &Hypergraph) -> CanonicalForm {
    let (classes, relabeling) = canonical_colored(h.n(), &[h.edges()]);
    CanonicalForm { label: CanonicalLabel { n: h.n(), r: h.r(), classes }, relabeling }
}

pub fn is_isomorphic(a: &Hypergraph, b: &Hypergraph) -> bool {
    a.n() == b.n()
        && a.r() == b.r()
        && a.len() == b.len()
        && canonical_form(a).label == canonical_form(b).label
}

/// Canonical form of a vertex set `[n]` carrying several edge colour
/// classes. Returns the relabelled classes and the relabelling.
pub fn canonical_colored(n: usize, classes: &[&[VertexSet]]) -> (Vec<Vec<u64>>, Vec<usize>) {
    let ctx = Context::new(n, classes);
    let mut best: Option<(Vec<Vec<u64>>, Vec<usize>)> = None;
    let colors = vec![0u32; n + 1];
    ctx.search(colors, &mut best);
    best.expect("search reaches at least one leaf")
}

struct Context<'a> {
    n: usize,
    classes: &'a [&'a [VertexSet]],
    lookup: Vec<HashSet<u64>>,
    /// For each vertex, the (class, edge) pairs containing it.
    incidence: Vec<Vec<(u32, VertexSet)>>,
    /// Twin-class representative of each vertex.
    twin_root: Vec<usize>,
}

impl<'a> Context<'a> {
    fn new(n: usize, classes: &'a [&'a [VertexSet]]) -> Self {
        let lookup: Vec<HashSet<u64>> =
            classes.iter().map(|c| c.iter().map(|e| e.bits()).collect()).collect();
        let mut incidence = vec![Vec::new(); n + 1];
        for (ci, class) in classes.iter().enumerate() {
            for &e in class.iter() {
                for v in e.iter() {
                    incidence[v].push((ci as u32, e));
                }
            }
        }
        let mut ctx = Context { n, classes, lookup, incidence, twin_root: (0..=n).collect() };
        ctx.twin_root = ctx.twin_classes();
        ctx
    }

    fn is_transposition_automorphism(&self, v: usize, w: usize) -> bool {
        let pair = VertexSet::singleton(v).with(w);
        for (ci, class) in self.classes.iter().enumerate() {
            for &e in class.iter() {
                let hit = e & pair;
                if hit.len() == 1 {
                    let swapped = (e - hit) | (pair - hit);
                    if !self.lookup[ci].contains(&swapped.bits()) {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn twin_classes(&self) -> Vec<usize> {
        let mut root: Vec<usize> = (0..=self.n).collect();
        for v in 1..=self.n {
            if root[v] != v {
                continue;
            }
            for w in v + 1..=self.n {
                if root[w] == w && self.incidence[v].len() == self.incidence[w].len()
                    && self.is_transposition_automorphism(v, w)
                {
                    root[w] = v;
                }
            }
        }
        root
    }

    fn refine(&self, colors: &mut [u32]) {
        let n = self.n;
        let mut cells = count_cells(colors);
        loop {
            let mut keys: Vec<(u32, Vec<(u32, Vec<u32>)>, usize)> = (1..=n)
                .map(|v| {
                    let mut sig: Vec<(u32, Vec<u32>)> = self.incidence[v]
                        .iter()
                        .map(|&(ci, e)| {
                            let mut cs: Vec<u32> =
                                e.iter().filter(|&u| u != v).map(|u| colors[u]).collect();
                            cs.sort_unstable();
                            (ci, cs)
                        })
                        .collect();
                    sig.sort_unstable();
                    (colors[v], sig, v)
                })
                .collect();
            keys.sort_unstable_by(|a, b| (&a.0, &a.1).cmp(&(&b.0, &b.1)));
            let mut rank = 0u32;
            for i in 0..keys.len() {
                if i > 0 && (keys[i].0, &keys[i].1) != (keys[i - 1].0, &keys[i - 1].1) {
                    rank += 1;
                }
                colors[keys[i].2] = rank;
            }
            let new_cells = rank as usize + 1;
            if new_cells == cells || n == 0 {
                return;
            }
            cells = new_cells;
        }
    }

    fn search(&self, mut colors: Vec<u32>, best: &mut Option<(Vec<Vec<u64>>, Vec<usize>)>) {
        self.refine(&mut colors);
        let n = self.n;
        // First non-singleton cell, in colour order.
        let mut sizes = vec![0usize; n + 1];
        for v in 1..=n {
            sizes[colors[v] as usize] += 1;
        }
        let target = (0..=n).find(|&c| sizes[c] > 1);
        match target {
            None => {
                let relabel: Vec<usize> =
                    std::iter::once(0).chain((1..=n).map(|v| colors[v] as usize + 1)).collect();
                let label: Vec<Vec<u64>> = self
                    .classes
                    .iter()
                    .map(|class| {
                        let mut es: Vec<u64> = class.iter().map(|e| e.map(&relabel).bits()).collect();
                        es.sort_unstable();
                        es
                    })
                    .collect();
                if best.as_ref().map_or(true, |(b, _)| label < *b) {
                    *best = Some((label, relabel));
                }
            }
            Some(c) => {
                let mut tried_roots: Vec<usize> = Vec::new();
                for v in (1..=n).filter(|&v| colors[v] as usize == c) {
                    let root = self.twin_root[v];
                    if tried_roots.contains(&root) {
                        continue;
                    }
                    tried_roots.push(root);
                    let mut child = colors.clone();
                    individualize(&mut child, v);
                    self.search(child, best);
                }
            }
        }
    }
}

fn count_cells(colors: &[u32]) -> usize {
    let mut cs: Vec<u32> = colors[1..].to_vec();
    cs.sort_unstable();
    cs.dedup();
    cs.len()
}

/// Splits `v` off the front of its cell and re-ranks.
fn individualize(colors: &mut [u32], v: usize) {
    let n = colors.len() - 1;
    let mut keys: Vec<(u32, bool, usize)> = (1..=n).map(|u| (colors[u], u != v, u)).collect();
    keys.sort_unstable();
    let mut rank = 0u32;
    for i in 0..keys.len() {
        if i > 0 && (keys[i].0, keys[i].1) != (keys[i - 1].0, keys[i - 1].1) {
            rank += 1;
        }
        colors[keys[i].2] = rank;
    }
}
