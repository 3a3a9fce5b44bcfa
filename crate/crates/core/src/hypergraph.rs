//! r-uniform hypergraphs on `[n]`, vertex partitions and the text format.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, ParseError, Result};
use crate::set::{VertexSet, MAX_VERTEX};

/// An r-uniform hypergraph on the vertex set `[n]`.
///
/// Edges are kept sorted lexicographically and duplicate-free, so two
/// hypergraphs with the same edge set compare equal and iterate identically.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Hypergraph {
    n: usize,
    r: usize,
    edges: Vec<VertexSet>,
}

impl Hypergraph {
    /// Builds a hypergraph, rejecting edges of the wrong size, edges leaving
    /// `[n]`, and repeated edges.
    pub fn new(n: usize, r: usize, edges: impl IntoIterator<Item = VertexSet>) -> Result<Self> {
        check_dims(n, r)?;
        let ground = VertexSet::full(n);
        let mut edges: Vec<VertexSet> = edges.into_iter().collect();
        for &e in &edges {
            if e.len() != r {
                return Err(invalid(format!("edge {{{e}}} has {} vertices, expected {r}", e.len())));
            }
            if !e.is_subset(ground) {
                return Err(invalid(format!("edge {{{e}}} leaves [{n}]")));
            }
        }
        edges.sort_unstable();
        if let Some(w) = edges.windows(2).find(|w| w[0] == w[1]) {
            return Err(invalid(format!("duplicate edge {{{}}}", w[0])));
        }
        Ok(Hypergraph { n, r, edges })
    }

    /// Builds a hypergraph from vertex lists such as `[[1, 2, 3], [1, 2, 4]]`.
    pub fn from_lists<I, L>(n: usize, r: usize, lists: I) -> Result<Self>
    where
        I: IntoIterator<Item = L>,
        L: AsRef<[usize]>,
    {
        let mut edges = Vec::new();
        for l in lists {
            let l = l.as_ref();
            let e = VertexSet::try_from_slice(l)
                .ok_or_else(|| invalid(format!("edge {l:?} has a vertex outside [1, {MAX_VERTEX}]")))?;
            if e.len() != l.len() {
                return Err(invalid(format!("edge {l:?} repeats a vertex")));
            }
            edges.push(e);
        }
        Self::new(n, r, edges)
    }

    pub fn empty(n: usize, r: usize) -> Result<Self> {
        Self::new(n, r, std::iter::empty())
    }

    /// The complete r-graph on `[n]`.
    pub fn complete(n: usize, r: usize) -> Result<Self> {
        check_dims(n, r)?;
        Ok(Hypergraph { n, r, edges: VertexSet::full(n).subsets_of_size(r).collect() })
    }

    /// Trusted constructor for generators that already produce valid,
    /// distinct edges; sorts them.
    pub(crate) fn from_valid(n: usize, r: usize, mut edges: Vec<VertexSet>) -> Self {
        edges.sort_unstable();
        edges.dedup();
        debug_assert!(edges.iter().all(|e| e.len() == r && e.is_subset(VertexSet::full(n))));
        Hypergraph { n, r, edges }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn r(&self) -> usize {
        self.r
    }

    #[inline]
    pub fn edges(&self) -> &[VertexSet] {
        &self.edges
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn contains_edge(&self, e: VertexSet) -> bool {
        self.edges.binary_search(&e).is_ok()
    }

    /// Position of `e` in the sorted edge list.
    pub fn edge_index(&self, e: VertexSet) -> Option<usize> {
        self.edges.binary_search(&e).ok()
    }

    /// Vertices that lie in at least one edge.
    pub fn support(&self) -> VertexSet {
        self.edges.iter().fold(VertexSet::EMPTY, |acc, &e| acc | e)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.contains(v)).count()
    }

    /// Degrees of vertices `1..=n`; index 0 is unused and zero.
    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n + 1];
        for e in &self.edges {
            for v in e.iter() {
                d[v] += 1;
            }
        }
        d
    }

    /// Number of edges containing `y`.
    pub fn codegree(&self, y: VertexSet) -> Result<usize> {
        if y.len() > self.r {
            return Err(invalid(format!("|Y| = {} exceeds r = {}", y.len(), self.r)));
        }
        Ok(self.edges.iter().filter(|e| y.is_subset(**e)).count())
    }

    /// Codegrees of every (r-1)-set lying in some edge.
    pub fn shadow_codegrees(&self) -> HashMap<VertexSet, usize> {
        let mut counts = HashMap::with_capacity(self.edges.len() * self.r);
        for &e in &self.edges {
            for v in e.iter() {
                *counts.entry(e.without(v)).or_insert(0) += 1;
            }
        }
        counts
    }

    /// The shadow: all (r-1)-sets contained in some edge, sorted.
    pub fn shadow(&self) -> Vec<VertexSet> {
        let mut out: Vec<VertexSet> =
            self.edges.iter().flat_map(|&e| e.iter().map(move |v| e.without(v))).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// The shadow as an (r-1)-graph on the same vertex set.
    pub fn shadow_graph(&self) -> Result<Hypergraph> {
        if self.r < 2 {
            return Err(invalid("shadow graph needs r >= 2"));
        }
        Ok(Hypergraph { n: self.n, r: self.r - 1, edges: self.shadow() })
    }

    /// Edges satisfying `keep`.
    pub fn filter(&self, mut keep: impl FnMut(VertexSet) -> bool) -> Hypergraph {
        Hypergraph {
            n: self.n,
            r: self.r,
            edges: self.edges.iter().copied().filter(|&e| keep(e)).collect(),
        }
    }

    /// Edges of `self` not in `other`.
    pub fn difference(&self, other: &Hypergraph) -> Hypergraph {
        self.filter(|e| !other.contains_edge(e))
    }

    /// `self ∪ {e}`; errors if `e` is not a valid new edge.
    pub fn with_edge(&self, e: VertexSet) -> Result<Hypergraph> {
        Hypergraph::new(self.n, self.r, self.edges.iter().copied().chain(std::iter::once(e)))
    }

    /// Image under the vertex map `map` (index 0 unused, `map[v]` in `[m]`).
    pub fn relabel(&self, map: &[usize], m: usize) -> Result<Hypergraph> {
        Hypergraph::new(m, self.r, self.edges.iter().map(|e| e.map(map)))
    }

    /// Same edge set viewed on a larger vertex set.
    pub fn with_n(&self, n: usize) -> Result<Hypergraph> {
        Hypergraph::new(n, self.r, self.edges.iter().copied())
    }
}

impl std::fmt::Debug for Hypergraph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Hypergraph(n={}, r={}, {:?})", self.n, self.r, self.edges)
    }
}

fn check_dims(n: usize, r: usize) -> Result<()> {
    if n > MAX_VERTEX {
        return Err(invalid(format!("n = {n} exceeds the supported maximum {MAX_VERTEX}")));
    }
    if r == 0 {
        return Err(invalid("uniformity r must be positive"));
    }
    Ok(())
}

/// An ordered partition `(X_1, ..., X_k)` of a ground set.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Partition {
    ground: VertexSet,
    parts: Vec<VertexSet>,
}

impl Partition {
    /// Parts must be pairwise disjoint; the ground set is their union.
    pub fn new(parts: Vec<VertexSet>) -> Result<Self> {
        let mut ground = VertexSet::EMPTY;
        for (i, &p) in parts.iter().enumerate() {
            if !ground.is_disjoint(p) {
                return Err(invalid(format!("part {} overlaps an earlier part", i + 1)));
            }
            ground = ground | p;
        }
        Ok(Partition { ground, parts })
    }

    /// Like [`Partition::new`] but also checks that the parts cover `ground`.
    pub fn with_ground(ground: VertexSet, parts: Vec<VertexSet>) -> Result<Self> {
        let p = Self::new(parts)?;
        if p.ground != ground {
            return Err(invalid("parts do not cover the declared ground set"));
        }
        Ok(p)
    }

    /// Assigns each vertex of `1..=n` to the part `color[v] ∈ 0..k`.
    pub fn from_coloring(color: &[usize], k: usize) -> Self {
        let mut parts = vec![VertexSet::EMPTY; k];
        for (v, &c) in color.iter().enumerate().skip(1) {
            parts[c] = parts[c].with(v);
        }
        let ground = parts.iter().fold(VertexSet::EMPTY, |a, &p| a | p);
        Partition { ground, parts }
    }

    pub fn ground(&self) -> VertexSet {
        self.ground
    }

    pub fn parts(&self) -> &[VertexSet] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// 1-based index of the part containing `v`.
    pub fn part_of(&self, v: usize) -> Option<usize> {
        self.parts.iter().position(|p| p.contains(v)).map(|i| i + 1)
    }

    /// `Π(S) = {i : S ∩ X_i ≠ ∅}` as a subset of `[k]`.
    pub fn pattern(&self, s: VertexSet) -> Result<VertexSet> {
        if !s.is_subset(self.ground) {
            return Err(invalid(format!("{{{s}}} is not inside the partition's ground set")));
        }
        Ok(self.pattern_unchecked(s))
    }

    #[inline]
    pub(crate) fn pattern_unchecked(&self, s: VertexSet) -> VertexSet {
        let mut out = 0u64;
        for (i, &p) in self.parts.iter().enumerate() {
            if !p.is_disjoint(s) {
                out |= 1 << i;
            }
        }
        VertexSet::from_bits(out)
    }

    /// Whether `e` meets every part in exactly one vertex.
    pub fn is_transversal(&self, e: VertexSet) -> bool {
        e.is_subset(self.ground) && self.parts.iter().all(|p| p.intersection(e).len() == 1)
    }

    /// The vertices of `s` lying in the parts listed in `pattern`.
    pub fn restrict(&self, s: VertexSet, pattern: VertexSet) -> VertexSet {
        pattern
            .iter()
            .fold(VertexSet::EMPTY, |acc, i| acc | (self.parts[i - 1] & s))
    }
}

/// Free-function form of [`Partition::pattern`].
pub fn pattern(s: VertexSet, p: &Partition) -> Result<VertexSet> {
    p.pattern(s)
}

/// Free-function form of [`Hypergraph::shadow`].
pub fn shadow(h: &Hypergraph) -> Vec<VertexSet> {
    h.shadow()
}

/// Free-function form of [`Hypergraph::codegree`].
pub fn codegree(h: &Hypergraph, y: VertexSet) -> Result<usize> {
    h.codegree(y)
}

/// Parses the hypergraph text format.
///
/// The first significant line is `n r`; every later non-empty line is one
/// edge of `r` integers in any order. Lines starting with `#` are skipped.
pub fn read_hypergraph(text: &str) -> Result<Hypergraph, ParseError> {
    let mut lines = significant_lines(text);
    let (hline, header) = lines.next().ok_or(ParseError::Empty)?;
    let (n, r) = parse_header(hline, header)?;
    if n > MAX_VERTEX || r == 0 {
        return Err(ParseError::MalformedHeader { line: hline });
    }
    let mut edges = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (line, content) in lines {
        let mut e = VertexSet::EMPTY;
        let mut count = 0;
        for tok in content.split_whitespace() {
            let v: usize = tok
                .parse()
                .map_err(|_| ParseError::BadToken { line, token: tok.to_string() })?;
            if v == 0 || v > n {
                return Err(ParseError::VertexOutOfRange { line, vertex: v, n });
            }
            if e.contains(v) {
                return Err(ParseError::RepeatedVertex { line, vertex: v });
            }
            e = e.with(v);
            count += 1;
        }
        if count != r {
            return Err(ParseError::WrongEdgeSize { line, expected: r, found: count });
        }
        if !seen.insert(e) {
            return Err(ParseError::DuplicateEdge { line });
        }
        edges.push(e);
    }
    Ok(Hypergraph::from_valid(n, r, edges))
}

/// Writes the canonical text form: header, then edges in lexicographic order.
pub fn write_hypergraph(h: &Hypergraph) -> String {
    let mut out = String::with_capacity(16 + h.len() * 3 * h.r());
    let _ = writeln!(out, "{} {}", h.n(), h.r());
    for e in h.edges() {
        let _ = writeln!(out, "{e}");
    }
    out
}

/// Non-empty, non-comment lines with their 1-based line numbers.
pub(crate) fn significant_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

pub(crate) fn parse_header(line: usize, content: &str) -> Result<(usize, usize), ParseError> {
    let toks: Vec<&str> = content.split_whitespace().collect();
    if toks.len() != 2 {
        return Err(ParseError::MalformedHeader { line });
    }
    let a = toks[0].parse().map_err(|_| ParseError::MalformedHeader { line })?;
    let b = toks[1].parse().map_err(|_| ParseError::MalformedHeader { line })?;
    Ok((a, b))
}

impl std::str::FromStr for Hypergraph {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(read_hypergraph(s)?)
    }
}
