use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::containment::BushEmbedding;
use crate::error::{invalid, Result};
use crate::hypergraph::Hypergraph;
use crate::set::VertexSet;
use crate::tree::{BlowupSpec, BushParams};

/// Deletes edges through (r-1)-sets of codegree in `[1, s-1]` until none is
/// left; the result is the largest s-normal subfamily.
pub fn s_normalize(h: &Hypergraph, s: usize) -> Hypergraph {
    let mut cur = h.clone();
    loop {
        let codeg = cur.shadow_codegrees();
        let bad: Vec<VertexSet> = codeg.iter().filter(|(_, &d)| d < s).map(|(y, _)| *y).collect();
        if bad.is_empty() {
            return cur;
        }
        let bad: std::collections::HashSet<VertexSet> = bad.into_iter().collect();
        let r = cur.r();
        cur = cur.filter(|e| e.subsets_of_size(r - 1).all(|y| !bad.contains(&y)));
    }
}

/// No (r-1)-set has codegree strictly between 0 and `s`.
pub fn is_s_normal(h: &Hypergraph, s: usize) -> bool {
    h.shadow_codegrees().values().all(|&d| d >= s)
}

/// Completions of (r-1)-sets: `K ↦ {z : K ∪ {z} ∈ H}`.
pub struct ExchangeIndex<'a> {
    host: &'a Hypergraph,
    completions: HashMap<VertexSet, VertexSet>,
}

impl<'a> ExchangeIndex<'a> {
    pub fn new(host: &'a Hypergraph) -> Self {
        let mut completions: HashMap<VertexSet, VertexSet> = HashMap::new();
        for &e in host.edges() {
            for v in e.iter() {
                let k = e.without(v);
                let entry = completions.entry(k).or_insert(VertexSet::EMPTY);
                *entry = entry.with(v);
            }
        }
        ExchangeIndex { host, completions }
    }

    pub fn host(&self) -> &Hypergraph {
        self.host
    }

    /// `Q(Y, u) = {z ∉ Y : Y \ {u} ∪ {z} ∈ H}`.
    pub fn q(&self, y: VertexSet, u: usize) -> VertexSet {
        self.completions.get(&y.without(u)).map_or(VertexSet::EMPTY, |c| *c - y)
    }

    /// `Q'(Y, u)`: the `min(s, |Q|)` smallest elements of `Q(Y, u)`.
    pub fn q_prime(&self, y: VertexSet, u: usize, s: usize) -> VertexSet {
        self.q(y, u).iter().take(s).collect()
    }
}

pub fn q_set(h: &Hypergraph, y: VertexSet, u: usize) -> VertexSet {
    ExchangeIndex::new(h).q(y, u)
}

/// Members all contain `u`, lie in `H`, and meet pairwise exactly in `{u}`.
pub fn is_star(h: &Hypergraph, u: usize, p: &[VertexSet]) -> bool {
    let k = VertexSet::singleton(u);
    p.iter().all(|&e| e.contains(u) && h.contains_edge(e))
        && (0..p.len()).all(|i| (i + 1..p.len()).all(|j| p[i] & p[j] == k))
}

/// `(⋃ Q'(P, u)) ∩ (⋃ P) = ∅`.
pub fn is_separable(idx: &ExchangeIndex, u: usize, p: &[VertexSet], s: usize) -> bool {
    let union_p = p.iter().fold(VertexSet::EMPTY, |a, &e| a | e);
    p.iter().all(|&e| idx.q_prime(e, u, s).is_disjoint(union_p))
}

/// A separable substar of size at least `⌈|P| / (2s+1)⌉`: the largest
/// class of a smallest-last greedy colouring of the conflict graph
/// (`P_1 ~ P_2` when one meets the other's `Q'`).
pub fn separable_star(h: &Hypergraph, u: usize, p: &[VertexSet], s: usize) -> Result<Vec<VertexSet>> {
    if !is_star(h, u, p) {
        return Err(invalid(format!("the given members do not form a star of H with kernel {{{u}}}")));
    }
    let idx = ExchangeIndex::new(h);
    let m = p.len();
    let qp: Vec<VertexSet> = p.iter().map(|&e| idx.q_prime(e, u, s)).collect();
    let mut adj = vec![Vec::new(); m];
    for i in 0..m {
        for j in 0..m {
            if i != j && !p[j].is_disjoint(qp[i]) {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
    }
    for a in adj.iter_mut() {
        a.sort_unstable();
        a.dedup();
    }
    // smallest-last order
    let mut deg: Vec<usize> = adj.iter().map(|a| a.len()).collect();
    let mut removed = vec![false; m];
    let mut order = Vec::with_capacity(m);
    for _ in 0..m {
        let v = (0..m).filter(|&v| !removed[v]).min_by_key(|&v| (deg[v], v)).unwrap();
        removed[v] = true;
        order.push(v);
        for &w in &adj[v] {
            if !removed[w] {
                deg[w] -= 1;
            }
        }
    }
    let mut color = vec![usize::MAX; m];
    for &v in order.iter().rev() {
        let taken: Vec<usize> = adj[v].iter().map(|&w| color[w]).collect();
        color[v] = (0..).find(|c| !taken.contains(c)).unwrap();
    }
    let colors = color.iter().copied().max().map_or(0, |c| c + 1);
    let best = (0..colors)
        .max_by_key(|&c| (color.iter().filter(|&&x| x == c).count(), std::cmp::Reverse(c)))
        .unwrap_or(0);
    let out: Vec<VertexSet> = (0..m).filter(|&i| color[i] == best).map(|i| p[i]).collect();
    debug_assert!(is_separable(&idx, u, &out, s));
    Ok(out)
}

/// Outcome of [`discover_t`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TOutcome {
    /// Every member has `Q(P, u) = T`, the exchange property holds and `T⁺`
    /// is closed.
    Found { t: VertexSet, t_plus: VertexSet },
    /// A copy of `B_{s,1}(1, r-1)` found while checking.
    BushWitness(BushEmbedding),
    /// No bush was found yet a check failed; the host is not s-normal or
    /// the star violates a precondition.
    Inconsistent(String),
}

/// Maximum matching of members to distinct vertices of their `Q'` sets.
fn matching(sets: &[VertexSet]) -> Vec<Option<usize>> {
    let mut owner: HashMap<usize, usize> = HashMap::new();
    fn augment(i: usize, sets: &[VertexSet], owner: &mut HashMap<usize, usize>, seen: &mut VertexSet) -> bool {
        for z in sets[i].iter() {
            if seen.contains(z) {
                continue;
            }
            *seen = seen.with(z);
            let free = match owner.get(&z) {
                None => true,
                Some(&j) => augment(j, sets, owner, seen),
            };
            if free {
                owner.insert(z, i);
                return true;
            }
        }
        false
    }
    for i in 0..sets.len() {
        let mut seen = VertexSet::EMPTY;
        augment(i, sets, &mut owner, &mut seen);
    }
    let mut out = vec![None; sets.len()];
    for (z, i) in owner {
        out[i] = Some(z);
    }
    out
}

/// Bush with center `{u}`, middles `P_i \ {u}` and leaves `{z_i}` from `s`
/// matched members, if the matching is large enough.
fn bush_from_matching(
    h: &Hypergraph,
    idx: &ExchangeIndex,
    u: usize,
    members: &[VertexSet],
    s: usize,
) -> Option<BushEmbedding> {
    let qp: Vec<VertexSet> = members.iter().map(|&e| idx.q_prime(e, u, s)).collect();
    let m = matching(&qp);
    let pairs: Vec<(VertexSet, usize)> =
        members.iter().zip(&m).filter_map(|(&e, z)| z.map(|z| (e, z))).take(s).collect();
    if pairs.len() < s {
        return None;
    }
    let emb = BushEmbedding {
        center: VertexSet::singleton(u),
        middles: pairs.iter().map(|(e, _)| e.without(u)).collect(),
        leaves: pairs.iter().map(|&(_, z)| vec![VertexSet::singleton(z)]).collect(),
    };
    let p = BushParams::new(s, 1).ok()?;
    let spec = BlowupSpec::new(1, h.r() - 1).ok()?;
    emb.verify(h, p, spec).then_some(emb)
}

/// Determines `T(u)` from a separable star at `u`, checks that
/// `Y \ {u} ∪ {z}` is an edge for every edge `Y ∋ u` avoiding `T(u)` and
/// every `z ∈ T(u)`, and checks the closure `T⁺(z) = T⁺(u)` for `z ∈ T(u)`.
pub fn discover_t(h: &Hypergraph, u: usize, p: &[VertexSet], s: usize) -> Result<TOutcome> {
    discover_inner(h, &ExchangeIndex::new(h), u, p, s, true)
}

fn discover_inner(
    h: &Hypergraph,
    idx: &ExchangeIndex,
    u: usize,
    p: &[VertexSet],
    s: usize,
    closure: bool,
) -> Result<TOutcome> {
    let r = h.r();
    if s == 0 || r < 2 {
        return Err(invalid("need s ≥ 1 and r ≥ 2"));
    }
    if p.len() < r + 2 * s - 2 {
        return Err(invalid(format!("separable star has {} members, need at least r + 2s - 2 = {}", p.len(), r + 2 * s - 2)));
    }
    if !is_star(h, u, p) {
        return Err(invalid(format!("members do not form a star with kernel {{{u}}}")));
    }
    if !is_separable(idx, u, p, s) {
        return Err(invalid("star is not separable"));
    }
    if let Some(emb) = bush_from_matching(h, idx, u, p, s) {
        return Ok(TOutcome::BushWitness(emb));
    }
    let t = idx.q(p[0], u);
    if t.len() + 1 != s || p.iter().any(|&e| idx.q(e, u) != t) {
        return Ok(TOutcome::Inconsistent(format!(
            "Q(P, {u}) is not one common ({})-set across the star",
            s - 1
        )));
    }
    for &y in h.edges().iter().filter(|y| y.contains(u) && y.is_disjoint(t)) {
        let q_y = idx.q(y, u);
        if t.is_subset(q_y) {
            continue;
        }
        // Y together with s-1 members avoiding Y \ {u} ∪ Q'(Y, u) is separable
        let block = y.without(u) | idx.q_prime(y, u, s);
        let mut group = vec![y];
        group.extend(p.iter().copied().filter(|&e| e.without(u).is_disjoint(block)).take(s - 1));
        if let Some(emb) = bush_from_matching(h, idx, u, &group, s) {
            return Ok(TOutcome::BushWitness(emb));
        }
        return Ok(TOutcome::Inconsistent(format!(
            "exchange fails for {{{y}}}: Q = {{{q_y}}} misses part of T = {{{t}}}"
        )));
    }
    let t_plus = t.with(u);
    if closure {
        for z in t.iter() {
            let shifted: Vec<VertexSet> = p.iter().map(|&e| e.without(u).with(z)).collect();
            match discover_inner(h, idx, z, &shifted, s, false)? {
                TOutcome::Found { t_plus: tz, .. } if tz == t_plus => {}
                TOutcome::Found { t_plus: tz, .. } => {
                    return Ok(TOutcome::Inconsistent(format!("T⁺({z}) = {{{tz}}} differs from T⁺({u}) = {{{t_plus}}}")))
                }
                other => return Ok(other),
            }
        }
    }
    Ok(TOutcome::Found { t, t_plus })
}

/// `Q(Y, u)` for every edge and vertex, plus `T(u)` wherever a greedy star
/// at `u` yields a large enough separable substar.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct NeighborExchange {
    #[serde(with = "crate::set::as_entries")]
    pub q: BTreeMap<(VertexSet, usize), VertexSet>,
    pub t: BTreeMap<usize, VertexSet>,
    /// Bush copies found at vertices where the checks failed.
    pub witnesses: BTreeMap<usize, BushEmbedding>,
}

pub fn neighbor_exchange(h: &Hypergraph, s: usize) -> Result<NeighborExchange> {
    let idx = ExchangeIndex::new(h);
    let mut out = NeighborExchange::default();
    for &y in h.edges() {
        for u in y.iter() {
            out.q.insert((y, u), idx.q(y, u));
        }
    }
    for u in 1..=h.n() {
        let mut star: Vec<VertexSet> = Vec::new();
        let mut used = VertexSet::EMPTY;
        for &e in h.edges().iter().filter(|e| e.contains(u)) {
            let rest = e.without(u);
            if rest.is_disjoint(used) {
                used = used | rest;
                star.push(e);
            }
        }
        if star.len() < h.r() + 2 * s - 2 {
            continue;
        }
        let sep = separable_star(h, u, &star, s)?;
        if sep.len() < h.r() + 2 * s - 2 {
            continue;
        }
        match discover_inner(h, &idx, u, &sep, s, true)? {
            TOutcome::Found { t, .. } => {
                out.t.insert(u, t);
            }
            TOutcome::BushWitness(b) => {
                out.witnesses.insert(u, b);
            }
            TOutcome::Inconsistent(msg) => log::info!("T({u}) undetermined: {msg}"),
        }
    }
    Ok(out)
}
