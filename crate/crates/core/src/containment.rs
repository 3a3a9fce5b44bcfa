//! Exact containment of tree blowups (bushes in particular) in a host.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::hypergraph::Hypergraph;
use crate::set::VertexSet;
use crate::tree::{blowup_vertex_count, bush_leaf_index, bush_tree, BipartiteTree, BlowupSpec, BushParams, TreeVertex};

/// Images of the blobs of a blowup inside a host.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlowupEmbedding {
    /// `u_blobs[i-1]` is the image of `U_i` (an a-set).
    pub u_blobs: Vec<VertexSet>,
    /// `v_blobs[j-1]` is the image of `V_j` (a b-set).
    pub v_blobs: Vec<VertexSet>,
}

impl BlowupEmbedding {
    pub fn blob(&self, x: TreeVertex) -> VertexSet {
        match x {
            TreeVertex::U(i) => self.u_blobs[i - 1],
            TreeVertex::V(j) => self.v_blobs[j - 1],
        }
    }

    /// Independent re-check: sizes, pairwise disjointness, every tree edge
    /// lands on a host edge.
    pub fn verify(&self, host: &Hypergraph, tree: &BipartiteTree, spec: BlowupSpec) -> bool {
        if self.u_blobs.len() != tree.s() || self.v_blobs.len() != tree.t() {
            return false;
        }
        if self.u_blobs.iter().any(|b| b.len() != spec.a) || self.v_blobs.iter().any(|b| b.len() != spec.b) {
            return false;
        }
        if !pairwise_disjoint(self.u_blobs.iter().chain(&self.v_blobs).copied()) {
            return false;
        }
        tree.edges()
            .iter()
            .all(|&(i, j)| host.contains_edge(self.u_blobs[i - 1] | self.v_blobs[j - 1]))
    }
}

/// A copy of `B_{s,h}(a,b)`: center `A`, middles `B_1..B_s`, leaves `A_{i,j}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BushEmbedding {
    pub center: VertexSet,
    pub middles: Vec<VertexSet>,
    /// `leaves[i][j]` is `A_{i+1,j+1}`.
    pub leaves: Vec<Vec<VertexSet>>,
}

impl BushEmbedding {
    pub fn params(&self) -> Option<BushParams> {
        let h = self.leaves.first()?.len();
        BushParams::new(self.middles.len(), h).ok()
    }

    /// The embedding's edges `A ∪ B_i` and `B_i ∪ A_{i,j}`.
    pub fn edges(&self) -> Vec<VertexSet> {
        let mut out = Vec::new();
        for (i, &b) in self.middles.iter().enumerate() {
            out.push(self.center | b);
            out.extend(self.leaves[i].iter().map(|&a| b | a));
        }
        out
    }

    /// Returns the first violated clause, if any.
    pub fn check(&self, host: &Hypergraph, p: BushParams, spec: BlowupSpec) -> Result<(), String> {
        if self.middles.len() != p.s || self.leaves.len() != p.s || self.leaves.iter().any(|l| l.len() != p.h) {
            return Err("shape does not match the bush parameters".into());
        }
        if self.center.len() != spec.a {
            return Err(format!("center has {} vertices, expected {}", self.center.len(), spec.a));
        }
        if self.middles.iter().any(|b| b.len() != spec.b) {
            return Err("a middle blob has the wrong size".into());
        }
        if self.leaves.iter().flatten().any(|a| a.len() != spec.a) {
            return Err("a leaf blob has the wrong size".into());
        }
        let blobs = std::iter::once(self.center)
            .chain(self.middles.iter().copied())
            .chain(self.leaves.iter().flatten().copied());
        if !pairwise_disjoint(blobs) {
            return Err("blobs are not pairwise disjoint".into());
        }
        for (i, &b) in self.middles.iter().enumerate() {
            if !host.contains_edge(self.center | b) {
                return Err(format!("A ∪ B_{} is not a host edge", i + 1));
            }
            for (j, &a) in self.leaves[i].iter().enumerate() {
                if !host.contains_edge(b | a) {
                    return Err(format!("B_{} ∪ A_{},{} is not a host edge", i + 1, i + 1, j + 1));
                }
            }
        }
        Ok(())
    }

    pub fn verify(&self, host: &Hypergraph, p: BushParams, spec: BlowupSpec) -> bool {
        self.check(host, p, spec).is_ok()
    }

    pub fn from_blowup(emb: &BlowupEmbedding, p: BushParams) -> BushEmbedding {
        BushEmbedding {
            center: emb.u_blobs[0],
            middles: emb.v_blobs.clone(),
            leaves: (1..=p.s)
                .map(|i| (1..=p.h).map(|j| emb.u_blobs[bush_leaf_index(p, i, j) - 1]).collect())
                .collect(),
        }
    }
}

fn pairwise_disjoint(sets: impl Iterator<Item = VertexSet>) -> bool {
    let mut acc = VertexSet::EMPTY;
    for s in sets {
        if !acc.is_disjoint(s) {
            return false;
        }
        acc = acc | s;
    }
    true
}

/// For each blob size, the map from a k-set `K` to `{E \ K : K ⊆ E ∈ H}`.
struct LinkIndex {
    by_size: HashMap<usize, HashMap<VertexSet, Vec<VertexSet>>>,
}

impl LinkIndex {
    fn new(host: &Hypergraph, sizes: &[usize]) -> Self {
        let mut by_size = HashMap::new();
        for &k in sizes {
            if by_size.contains_key(&k) {
                continue;
            }
            let mut map: HashMap<VertexSet, Vec<VertexSet>> = HashMap::new();
            for &e in host.edges() {
                for sub in e.subsets_of_size(k) {
                    map.entry(sub).or_default().push(e - sub);
                }
            }
            by_size.insert(k, map);
        }
        LinkIndex { by_size }
    }

    fn link(&self, blob: VertexSet) -> &[VertexSet] {
        self.by_size
            .get(&blob.len())
            .and_then(|m| m.get(&blob))
            .map(|v| v.as_slice())
            .unwrap_or(&[])
    }
}

struct Search<'a> {
    index: LinkIndex,
    order: Vec<(TreeVertex, Option<usize>)>,
    children: Vec<usize>,
    blob_size: Vec<usize>,
    /// Blob vertices still to place after position `k`.
    remaining_need: Vec<usize>,
    ground: VertexSet,
    assigned: Vec<VertexSet>,
    _host: &'a Hypergraph,
}

impl Search<'_> {
    fn extend(&mut self, pos: usize, used: VertexSet) -> bool {
        if pos == self.order.len() {
            return true;
        }
        if (self.ground - used).len() < self.remaining_need[pos] {
            return false;
        }
        let parent = self.order[pos].1.expect("non-root has a parent");
        let pblob = self.assigned[parent];
        let cands: Vec<VertexSet> =
            self.index.link(pblob).iter().copied().filter(|c| c.is_disjoint(used)).collect();
        for c in cands {
            if self.children[pos] > 0 && self.index.link(c).len() < self.children[pos] {
                continue;
            }
            self.assigned[pos] = c;
            if self.extend(pos + 1, used | c) {
                return true;
            }
        }
        false
    }
}

/// Searches `host` for a copy of the (a, b)-blowup of `tree`.
///
/// Blobs are assigned in BFS order from a maximum-degree tree vertex; each
/// child blob is drawn from the host edges containing its parent's blob.
pub fn contains_blowup(
    host: &Hypergraph,
    tree: &BipartiteTree,
    spec: BlowupSpec,
) -> Result<Option<BlowupEmbedding>> {
    if host.r() != spec.r() {
        return Err(invalid(format!("host is {}-uniform but a + b = {}", host.r(), spec.r())));
    }
    if blowup_vertex_count(tree, spec) > host.n() || tree.edges().len() > host.len() {
        return Ok(None);
    }
    let root = tree
        .vertices()
        .max_by_key(|&x| (tree.degree(x), std::cmp::Reverse(x)))
        .expect("tree has vertices");
    let bfs = tree.bfs_order(root);
    let pos_of = |x: TreeVertex| bfs.iter().position(|&(y, _)| y == x).unwrap();
    let order: Vec<(TreeVertex, Option<usize>)> = bfs.iter().map(|&(x, p)| (x, p.map(pos_of))).collect();
    let size_of = |x: TreeVertex| match x {
        TreeVertex::U(_) => spec.a,
        TreeVertex::V(_) => spec.b,
    };
    let blob_size: Vec<usize> = order.iter().map(|&(x, _)| size_of(x)).collect();
    let children: Vec<usize> =
        (0..order.len()).map(|k| order.iter().filter(|(_, p)| *p == Some(k)).count()).collect();
    let mut remaining_need = vec![0; order.len() + 1];
    for k in (0..order.len()).rev() {
        remaining_need[k] = remaining_need[k + 1] + blob_size[k];
    }

    let index = LinkIndex::new(host, &[spec.a, spec.b]);
    let mut roots: Vec<VertexSet> = index.by_size[&blob_size[0]]
        .iter()
        .filter(|(_, l)| l.len() >= children[0])
        .map(|(k, _)| *k)
        .collect();
    roots.sort_unstable();

    let mut search = Search {
        index,
        order,
        children,
        blob_size,
        remaining_need,
        ground: VertexSet::full(host.n()),
        assigned: vec![VertexSet::EMPTY; bfs.len()],
        _host: host,
    };
    for rb in roots {
        search.assigned[0] = rb;
        if search.extend(1, rb) {
            let mut emb = BlowupEmbedding {
                u_blobs: vec![VertexSet::EMPTY; tree.s()],
                v_blobs: vec![VertexSet::EMPTY; tree.t()],
            };
            for (k, &(x, _)) in search.order.iter().enumerate() {
                match x {
                    TreeVertex::U(i) => emb.u_blobs[i - 1] = search.assigned[k],
                    TreeVertex::V(j) => emb.v_blobs[j - 1] = search.assigned[k],
                }
            }
            debug_assert!(emb.verify(host, tree, spec));
            debug_assert_eq!(search.blob_size.len(), bfs.len());
            return Ok(Some(emb));
        }
    }
    Ok(None)
}

/// Searches `host` for the bush `B_{s,h}(a,b)`.
pub fn contains_bush(host: &Hypergraph, p: BushParams, spec: BlowupSpec) -> Result<Option<BushEmbedding>> {
    let tree = bush_tree(p);
    Ok(contains_blowup(host, &tree, spec)?.map(|e| BushEmbedding::from_blowup(&e, p)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{blowup, path_tree};

    fn star(n: usize, r: usize, s: usize) -> Hypergraph {
        let apex = VertexSet::full(s - 1);
        Hypergraph::complete(n, r).unwrap().filter(|e| !e.is_disjoint(apex))
    }

    #[test]
    fn blowup_contains_itself() {
        for (s, h, a, b) in [(2, 1, 2, 1), (2, 2, 1, 2), (3, 1, 2, 2)] {
            let p = BushParams::new(s, h).unwrap();
            let spec = BlowupSpec::new(a, b).unwrap();
            let host = blowup(&bush_tree(p), spec).unwrap();
            let emb = contains_bush(&host, p, spec).unwrap().expect("self embedding");
            assert!(emb.verify(&host, p, spec));
        }
    }

    #[test]
    fn star_construction_is_bush_free() {
        let host = star(10, 3, 2);
        let p = BushParams::new(2, 1).unwrap();
        let spec = BlowupSpec::new(2, 1).unwrap();
        assert!(contains_bush(&host, p, spec).unwrap().is_none());
    }

    #[test]
    fn complete_host_on_eight_vertices() {
        let host = Hypergraph::complete(8, 3).unwrap();
        let p = BushParams::new(2, 1).unwrap();
        let spec = BlowupSpec::new(2, 1).unwrap();
        let emb = contains_bush(&host, p, spec).unwrap().unwrap();
        assert!(emb.verify(&host, p, spec));
        // one vertex short: cannot fit
        let small = Hypergraph::complete(7, 3).unwrap();
        assert!(contains_bush(&small, p, spec).unwrap().is_none());
    }

    #[test]
    fn uniformity_mismatch() {
        let host = Hypergraph::complete(6, 3).unwrap();
        let r = contains_blowup(&host, &path_tree(2).unwrap(), BlowupSpec::new(2, 2).unwrap());
        assert!(matches!(r, Err(crate::Error::InvalidArgument(_))));
    }

    #[test]
    fn check_reports_broken_embeddings() {
        let p = BushParams::new(2, 1).unwrap();
        let spec = BlowupSpec::new(2, 1).unwrap();
        let host = blowup(&bush_tree(p), spec).unwrap();
        let mut emb = contains_bush(&host, p, spec).unwrap().unwrap();
        emb.leaves[0][0] = emb.leaves[1][0];
        assert!(!emb.verify(&host, p, spec));
    }
}
