//! Bipartite trees, graph bushes and their (a, b)-blowups.
//!
//! Blob layout of a blowup is fixed: the U-blob of `u_i` is
//! `{(i-1)a+1, ..., ia}` and the V-blob of `v_j` is
//! `{as+(j-1)b+1, ..., as+jb}`, so the blowup of an (s, t)-tree lives on
//! `[as + bt]`.

use std::collections::VecDeque;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, ParseError, Result};
use crate::hypergraph::{parse_header, significant_lines, Hypergraph};
use crate::set::{VertexSet, MAX_VERTEX};

/// A vertex of a bipartite tree: `U(i)` is `u_i`, `V(j)` is `v_j` (1-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TreeVertex {
    U(usize),
    V(usize),
}

/// A tree with parts `U = {u_1..u_s}` and `V = {v_1..v_t}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BipartiteTree {
    s: usize,
    t: usize,
    /// Pairs `(i, j)` meaning `u_i v_j` is an edge; sorted.
    edges: Vec<(usize, usize)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BlowupSpec {
    pub a: usize,
    pub b: usize,
}

impl BlowupSpec {
    pub fn new(a: usize, b: usize) -> Result<Self> {
        if a == 0 || b == 0 {
            return Err(invalid("blob sizes a and b must be positive"));
        }
        Ok(BlowupSpec { a, b })
    }

    pub fn r(&self) -> usize {
        self.a + self.b
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BushParams {
    pub s: usize,
    pub h: usize,
}

impl BushParams {
    pub fn new(s: usize, h: usize) -> Result<Self> {
        if s == 0 || h == 0 {
            return Err(invalid("bush parameters s and h must be positive"));
        }
        Ok(BushParams { s, h })
    }

    /// Vertex count `1 + s + sh` of the graph bush.
    pub fn vertex_count(&self) -> usize {
        1 + self.s + self.s * self.h
    }
}

impl BipartiteTree {
    /// Validates that the edges form a spanning tree of `K_{s,t}`.
    pub fn new(s: usize, t: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if s == 0 || t == 0 {
            return Err(invalid("both parts of a bipartite tree must be nonempty"));
        }
        let mut edges: Vec<(usize, usize)> = edges.into_iter().collect();
        for &(i, j) in &edges {
            if !(1..=s).contains(&i) || !(1..=t).contains(&j) {
                return Err(invalid(format!("edge u{i} v{j} outside the parts")));
            }
        }
        edges.sort_unstable();
        edges.dedup();
        if edges.len() != s + t - 1 {
            return Err(invalid(format!(
                "a tree on {} vertices needs {} edges, got {}",
                s + t,
                s + t - 1,
                edges.len()
            )));
        }
        let tree = BipartiteTree { s, t, edges };
        let reached = tree.bfs_distances(TreeVertex::U(1)).iter().filter(|d| d.is_some()).count();
        if reached != s + t {
            return Err(invalid("edges do not connect the tree"));
        }
        Ok(tree)
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.s + self.t
    }

    pub fn vertices(&self) -> impl Iterator<Item = TreeVertex> {
        let (s, t) = (self.s, self.t);
        (1..=s).map(TreeVertex::U).chain((1..=t).map(TreeVertex::V))
    }

    pub fn neighbors(&self, x: TreeVertex) -> Vec<TreeVertex> {
        match x {
            TreeVertex::U(i) => {
                self.edges.iter().filter(|e| e.0 == i).map(|e| TreeVertex::V(e.1)).collect()
            }
            TreeVertex::V(j) => {
                self.edges.iter().filter(|e| e.1 == j).map(|e| TreeVertex::U(e.0)).collect()
            }
        }
    }

    pub fn degree(&self, x: TreeVertex) -> usize {
        self.neighbors(x).len()
    }

    fn index(&self, x: TreeVertex) -> usize {
        match x {
            TreeVertex::U(i) => i - 1,
            TreeVertex::V(j) => self.s + j - 1,
        }
    }

    fn vertex_at(&self, idx: usize) -> TreeVertex {
        if idx < self.s {
            TreeVertex::U(idx + 1)
        } else {
            TreeVertex::V(idx - self.s + 1)
        }
    }

    fn bfs_distances(&self, from: TreeVertex) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.s + self.t];
        let mut queue = VecDeque::from([from]);
        dist[self.index(from)] = Some(0);
        while let Some(x) = queue.pop_front() {
            let d = dist[self.index(x)].unwrap();
            for y in self.neighbors(x) {
                let iy = self.index(y);
                if dist[iy].is_none() {
                    dist[iy] = Some(d + 1);
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    fn farthest(&self, from: TreeVertex) -> (TreeVertex, usize, Vec<Option<usize>>) {
        let dist = self.bfs_distances(from);
        let (idx, d) = dist
            .iter()
            .enumerate()
            .map(|(i, d)| (i, d.unwrap_or(0)))
            .max_by_key(|&(i, d)| (d, std::cmp::Reverse(i)))
            .unwrap();
        (self.vertex_at(idx), d, dist)
    }

    pub fn diameter(&self) -> usize {
        let (x, _, _) = self.farthest(TreeVertex::U(1));
        self.farthest(x).1
    }

    /// Vertices in breadth-first order from `root`, each with its parent.
    pub fn bfs_order(&self, root: TreeVertex) -> Vec<(TreeVertex, Option<TreeVertex>)> {
        let mut seen = vec![false; self.s + self.t];
        let mut order = Vec::with_capacity(self.s + self.t);
        let mut queue = VecDeque::from([(root, None)]);
        seen[self.index(root)] = true;
        while let Some((x, p)) = queue.pop_front() {
            order.push((x, p));
            for y in self.neighbors(x) {
                if !seen[self.index(y)] {
                    seen[self.index(y)] = true;
                    queue.push_back((y, Some(x)));
                }
            }
        }
        order
    }

    /// Swaps the roles of the two parts.
    pub fn swapped(&self) -> BipartiteTree {
        BipartiteTree::new(self.t, self.s, self.edges.iter().map(|&(i, j)| (j, i)))
            .expect("swapping parts preserves tree validity")
    }

    /// Relabels vertices within each part: `u_i -> u_{pu[i-1]}`, `v_j -> v_{pv[j-1]}`.
    pub fn permuted(&self, pu: &[usize], pv: &[usize]) -> Result<BipartiteTree> {
        BipartiteTree::new(self.s, self.t, self.edges.iter().map(|&(i, j)| (pu[i - 1], pv[j - 1])))
    }

    /// The tree as a 2-graph on `[s + t]` (u_i -> i, v_j -> s + j).
    pub fn as_graph(&self) -> Result<Hypergraph> {
        blowup(self, BlowupSpec { a: 1, b: 1 })
    }
}

/// The graph bush `B_{s,h}`: a star `K_{1,s}` with `h` new leaves hung on
/// each tip.
///
/// The center `u_1` and the leaves `u_{1+(i-1)h+j}` form part `U` (size
/// `1+sh`), the `s` middle vertices `v_1..v_s` form part `V`. With this
/// orientation the (a, b)-blowup replaces the center and leaves by a-sets
/// and the middle vertices by b-sets.
pub fn bush_tree(p: BushParams) -> BipartiteTree {
    let BushParams { s, h } = p;
    let mut edges = Vec::with_capacity(s + s * h);
    for i in 1..=s {
        edges.push((1, i));
        for j in 1..=h {
            edges.push((bush_leaf_index(p, i, j), i));
        }
    }
    BipartiteTree::new(1 + s * h, s, edges).expect("bush is a tree")
}

/// Index in part U of the `j`-th leaf hung on middle vertex `i`.
pub fn bush_leaf_index(p: BushParams, i: usize, j: usize) -> usize {
    1 + (i - 1) * p.h + j
}

/// The path `P_len` with `len` edges, starting in part U:
/// `u_1 v_1 u_2 v_2 ...`.
pub fn path_tree(len: usize) -> Result<BipartiteTree> {
    if len == 0 {
        return Err(invalid("path must have at least one edge"));
    }
    let s = len / 2 + 1;
    let t = len.div_ceil(2);
    let mut edges = Vec::with_capacity(len);
    for k in 0..len {
        // edge k joins position k and k+1; even positions are in U
        let (i, j) = if k % 2 == 0 { (k / 2 + 1, k / 2 + 1) } else { (k / 2 + 2, k / 2 + 1) };
        edges.push((i, j));
    }
    BipartiteTree::new(s, t, edges)
}

/// The blob that `x` is replaced by in the (a, b)-blowup of `tree`.
pub fn blob(tree: &BipartiteTree, spec: BlowupSpec, x: TreeVertex) -> VertexSet {
    match x {
        TreeVertex::U(i) => VertexSet::range((i - 1) * spec.a + 1, i * spec.a),
        TreeVertex::V(j) => {
            let base = spec.a * tree.s();
            VertexSet::range(base + (j - 1) * spec.b + 1, base + j * spec.b)
        }
    }
}

/// Vertex count `as + bt` of the blowup.
pub fn blowup_vertex_count(tree: &BipartiteTree, spec: BlowupSpec) -> usize {
    spec.a * tree.s() + spec.b * tree.t()
}

/// The (a, b)-blowup `{U_i ∪ V_j : u_i v_j ∈ E(T)}`.
pub fn blowup(tree: &BipartiteTree, spec: BlowupSpec) -> Result<Hypergraph> {
    let n = blowup_vertex_count(tree, spec);
    if n > MAX_VERTEX {
        return Err(invalid(format!("blowup needs {n} vertices, more than {MAX_VERTEX}")));
    }
    let edges = tree
        .edges()
        .iter()
        .map(|&(i, j)| blob(tree, spec, TreeVertex::U(i)) | blob(tree, spec, TreeVertex::V(j)))
        .collect();
    Ok(Hypergraph::from_valid(n, spec.r(), edges))
}

/// The center and its degree when the tree has diameter exactly 4.
pub fn is_diameter4_center_degree(tree: &BipartiteTree) -> Option<(TreeVertex, usize)> {
    let (x, _, _) = tree.farthest(TreeVertex::U(1));
    let (_, d, dist_from_x) = tree.farthest(x);
    if d != 4 {
        return None;
    }
    // The center is the unique vertex at distance 2 from both ends of a
    // longest path; equivalently, eccentricity 2.
    let center = tree
        .vertices()
        .find(|&c| {
            dist_from_x[tree.index(c)] == Some(2)
                && tree.bfs_distances(c).iter().all(|d| d.unwrap_or(0) <= 2)
        })
        .expect("a diameter-4 tree has a center");
    Some((center, tree.degree(center)))
}

pub fn read_tree(text: &str) -> Result<BipartiteTree> {
    let mut lines = significant_lines(text);
    let (hline, header) = lines.next().ok_or(ParseError::Empty)?;
    let (s, t) = parse_header(hline, header)?;
    let mut edges = Vec::new();
    for (line, content) in lines {
        let toks: Vec<&str> = content.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(ParseError::WrongEdgeSize { line, expected: 2, found: toks.len() }.into());
        }
        let parse = |tok: &str| {
            tok.parse::<usize>().map_err(|_| ParseError::BadToken { line, token: tok.to_string() })
        };
        let (i, j) = (parse(toks[0])?, parse(toks[1])?);
        if !(1..=s).contains(&i) {
            return Err(ParseError::VertexOutOfRange { line, vertex: i, n: s }.into());
        }
        if !(1..=t).contains(&j) {
            return Err(ParseError::VertexOutOfRange { line, vertex: j, n: t }.into());
        }
        edges.push((i, j));
    }
    BipartiteTree::new(s, t, edges)
}

pub fn write_tree(tree: &BipartiteTree) -> String {
    let mut out = format!("{} {}\n", tree.s(), tree.t());
    for (i, j) in tree.edges() {
        let _ = writeln!(out, "{i} {j}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::canonical_form;

    #[test]
    fn bush_2_1_is_p4() {
        let b = bush_tree(BushParams::new(2, 1).unwrap());
        assert_eq!(b.vertex_count(), 5);
        assert_eq!(b.edges().len(), 4);
        assert_eq!(b.diameter(), 4);
        let p4 = path_tree(4).unwrap();
        assert_eq!(p4.vertex_count(), 5);
        for (a, bb) in [(1, 1), (2, 1), (1, 2), (2, 3)] {
            let spec = BlowupSpec::new(a, bb).unwrap();
            assert_eq!(
                canonical_form(&blowup(&b, spec).unwrap()).label,
                canonical_form(&blowup(&p4, spec).unwrap()).label
            );
        }
    }

    #[test]
    fn bush_1_1_is_p2() {
        let b = bush_tree(BushParams::new(1, 1).unwrap());
        assert_eq!(b.vertex_count(), 3);
        assert_eq!(b.diameter(), 2);
        assert!(is_diameter4_center_degree(&b).is_none());
    }

    #[test]
    fn bush_3_2_sizes() {
        let b = bush_tree(BushParams::new(3, 2).unwrap());
        assert_eq!(b.vertex_count(), 10);
        let mut parts = [b.s(), b.t()];
        parts.sort();
        assert_eq!(parts, [3, 7]);
        assert_eq!(is_diameter4_center_degree(&b), Some((TreeVertex::U(1), 3)));
    }

    #[test]
    fn p4_center_is_middle_vertex() {
        let b = bush_tree(BushParams::new(2, 1).unwrap());
        assert_eq!(is_diameter4_center_degree(&b), Some((TreeVertex::U(1), 2)));
        let p = path_tree(4).unwrap();
        assert_eq!(is_diameter4_center_degree(&p), Some((TreeVertex::U(2), 2)));
    }

    #[test]
    fn blowup_of_p2_with_unit_blobs_is_the_path() {
        let p2 = path_tree(2).unwrap();
        let g = blowup(&p2, BlowupSpec::new(1, 1).unwrap()).unwrap();
        assert_eq!(g.r(), 2);
        assert_eq!(g.len(), 2);
        assert_eq!(g.n(), 3);
        assert_eq!(g.degrees().iter().filter(|&&d| d == 2).count(), 1);
    }

    #[test]
    fn blowup_bush_2_1_with_2_1() {
        let b = bush_tree(BushParams::new(2, 1).unwrap());
        let spec = BlowupSpec::new(2, 1).unwrap();
        let h = blowup(&b, spec).unwrap();
        assert_eq!((h.n(), h.r(), h.len()), (8, 3, 4));
        // center A = {1,2}, leaves {3,4},{5,6}; middles B_1 = {7}, B_2 = {8}
        let expected = Hypergraph::from_lists(8, 3, [[1, 2, 7], [1, 2, 8], [3, 4, 7], [5, 6, 8]]).unwrap();
        assert_eq!(h, expected);
        // the two center edges meet in A; leaf edges meet center edges in a B_i
        let e = h.edges();
        assert_eq!((e[0] & e[1]).len(), 2);
        assert_eq!(e.iter().filter(|x| x.is_disjoint(e[0])).count(), 1);
    }

    #[test]
    fn rejects_non_trees() {
        assert!(BipartiteTree::new(2, 2, [(1, 1), (2, 2)]).is_err());
        assert!(BipartiteTree::new(2, 2, [(1, 1), (1, 2), (2, 1), (2, 2)]).is_err());
        assert!(BipartiteTree::new(2, 2, [(1, 1), (1, 2), (3, 1)]).is_err());
    }

    #[test]
    fn tree_text_round_trip() {
        let b = bush_tree(BushParams::new(2, 2).unwrap());
        assert_eq!(read_tree(&write_tree(&b)).unwrap(), b);
        assert!(read_tree("2 2\n1 1\n2 2\n").is_err());
    }
}
