use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::hypergraph::Hypergraph;
use crate::set::VertexSet;

/// A q-star: members `kernel ∪ petal`, petals pairwise disjoint.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sunflower {
    pub kernel: VertexSet,
    pub petals: Vec<VertexSet>,
}

impl Sunflower {
    pub fn q(&self) -> usize {
        self.petals.len()
    }

    pub fn members(&self) -> Vec<VertexSet> {
        self.petals.iter().map(|&p| self.kernel | p).collect()
    }

    /// Pairwise intersections of the members are exactly the kernel and the
    /// members are distinct.
    pub fn is_valid(&self) -> bool {
        let members = self.members();
        for i in 0..members.len() {
            if !self.petals[i].is_disjoint(self.kernel) {
                return false;
            }
            for j in i + 1..members.len() {
                if members[i] & members[j] != self.kernel || members[i] == members[j] {
                    return false;
                }
            }
        }
        true
    }

    pub fn contains_member(&self, e: VertexSet) -> bool {
        self.kernel.is_subset(e) && self.petals.contains(&(e - self.kernel))
    }
}

/// Search knobs for [`find_sunflower_with`].
#[derive(Clone, Copy, Debug, Default)]
pub struct SunflowerOptions {
    /// Stop after the greedy pass.
    pub greedy_only: bool,
    /// Backtracking node limit; `None` means unlimited (exact).
    pub node_budget: Option<u64>,
    /// A member that must belong to the sunflower.
    pub containing: Option<VertexSet>,
}

/// Exact search for a q-sunflower with kernel `kernel` among the edges of `f`.
pub fn find_sunflower(f: &Hypergraph, kernel: VertexSet, q: usize) -> Option<Sunflower> {
    find_sunflower_with(f.edges(), kernel, q, SunflowerOptions::default())
}

/// Sunflower search over an arbitrary family of equal-size sets.
///
/// The petals are a set packing in the link of the kernel; greedy is tried
/// first, then a bounded backtracking packing.
pub fn find_sunflower_with(
    family: &[VertexSet],
    kernel: VertexSet,
    q: usize,
    opts: SunflowerOptions,
) -> Option<Sunflower> {
    let mut forced = None;
    if let Some(m) = opts.containing {
        if !kernel.is_subset(m) || !family.contains(&m) {
            return None;
        }
        forced = Some(m - kernel);
    }
    if q == 0 {
        return Some(Sunflower { kernel, petals: Vec::new() });
    }
    let mut link: Vec<VertexSet> = family
        .iter()
        .filter(|e| kernel.is_subset(**e))
        .map(|&e| e - kernel)
        .collect();
    link.sort_unstable();
    link.dedup();

    let mut chosen: Vec<VertexSet> = Vec::with_capacity(q);
    let mut used = VertexSet::EMPTY;
    if let Some(p) = forced {
        chosen.push(p);
        used = p;
        link.retain(|&l| l != p && l.is_disjoint(p));
    }
    if link.len() + chosen.len() < q {
        return None;
    }
    // Empty petal means the kernel is itself a member; it can only be a 1-star.
    let need = q - chosen.len();
    if need == 0 {
        return Some(Sunflower { kernel, petals: chosen });
    }

    // greedy
    let mut g_used = used;
    let mut g_chosen = chosen.clone();
    for &l in &link {
        if l.is_disjoint(g_used) && !(l.is_empty() && q > 1) {
            g_chosen.push(l);
            g_used = g_used | l;
            if g_chosen.len() == q {
                return Some(Sunflower { kernel, petals: g_chosen });
            }
        }
    }
    if opts.greedy_only {
        return None;
    }

    if q > 1 {
        link.retain(|l| !l.is_empty());
    }
    let petal_size = link.first().map_or(0, |l| l.len()).max(1);
    let mut nodes = 0u64;
    let budget = opts.node_budget.unwrap_or(u64::MAX);
    if pack(&link, need, petal_size, &mut chosen, &mut nodes, budget) {
        Some(Sunflower { kernel, petals: chosen })
    } else {
        None
    }
}

fn pack(
    cands: &[VertexSet],
    need: usize,
    petal_size: usize,
    chosen: &mut Vec<VertexSet>,
    nodes: &mut u64,
    budget: u64,
) -> bool {
    if need == 0 {
        return true;
    }
    *nodes += 1;
    if *nodes > budget || cands.len() < need {
        return false;
    }
    let union = cands.iter().fold(VertexSet::EMPTY, |a, &c| a | c);
    if union.len() / petal_size < need {
        return false;
    }
    for (i, &c) in cands.iter().enumerate() {
        if cands.len() - i < need {
            break;
        }
        let rest: Vec<VertexSet> = cands[i + 1..].iter().copied().filter(|x| x.is_disjoint(c)).collect();
        chosen.push(c);
        if pack(&rest, need - 1, petal_size, chosen, nodes, budget) {
            return true;
        }
        chosen.pop();
        if *nodes > budget {
            return false;
        }
    }
    false
}

/// All b-sets that are kernels of q-sunflowers in `f`, sorted.
pub fn kernels(f: &Hypergraph, b: usize, q: usize) -> Result<Vec<VertexSet>> {
    if b == 0 || b >= f.r() {
        return Err(invalid(format!("kernel size {b} must lie in [1, {})", f.r())));
    }
    let mut cands: Vec<VertexSet> = f.edges().iter().flat_map(|e| e.subsets_of_size(b)).collect();
    cands.sort_unstable();
    cands.dedup();
    Ok(cands
        .into_iter()
        .filter(|&k| f.codegree(k).map_or(false, |d| d >= q))
        .filter(|&k| find_sunflower(f, k, q).is_some())
        .collect())
}

/// `I(E, F) = {E ∩ F' : F' ∈ F \ {E}}`, sorted and deduplicated.
pub fn intersection_structure(f: &Hypergraph, e: VertexSet) -> Result<Vec<VertexSet>> {
    if !f.contains_edge(e) {
        return Err(invalid(format!("{{{e}}} is not a member of the family")));
    }
    Ok(intersections_within(f.edges(), e))
}

pub(crate) fn intersections_within(family: &[VertexSet], e: VertexSet) -> Vec<VertexSet> {
    let mut out: Vec<VertexSet> = family.iter().filter(|&&x| x != e).map(|&x| x & e).collect();
    out.sort_unstable();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hg(n: usize, r: usize, lists: &[&[usize]]) -> Hypergraph {
        Hypergraph::from_lists(n, r, lists.iter().copied()).unwrap()
    }

    #[test]
    fn graph_star() {
        let f = hg(4, 2, &[&[1, 2], &[1, 3], &[1, 4]]);
        let sf = find_sunflower(&f, VertexSet::singleton(1), 3).unwrap();
        assert_eq!(sf.petals, vec![VertexSet::singleton(2), VertexSet::singleton(3), VertexSet::singleton(4)]);
        assert!(sf.is_valid());
    }

    #[test]
    fn complete_host_has_stars() {
        let f = Hypergraph::complete(7, 3).unwrap();
        let sf = find_sunflower(&f, VertexSet::singleton(1), 3).unwrap();
        assert!(sf.is_valid());
        assert_eq!(sf.q(), 3);
    }

    #[test]
    fn absent_when_members_overlap() {
        let f = hg(4, 3, &[&[1, 2, 3], &[1, 2, 4], &[1, 3, 4]]);
        assert!(find_sunflower(&f, VertexSet::singleton(1), 2).is_none());
    }

    #[test]
    fn backtracking_beats_greedy() {
        // greedy takes {2,3} first, blocking both {2,4} and {3,5}
        let f = hg(5, 3, &[&[1, 2, 3], &[1, 2, 4], &[1, 3, 5]]);
        let k = VertexSet::singleton(1);
        let greedy = SunflowerOptions { greedy_only: true, ..Default::default() };
        assert!(find_sunflower_with(f.edges(), k, 2, greedy).is_none());
        assert!(find_sunflower(&f, k, 2).is_some());
    }

    #[test]
    fn forced_member() {
        let f = hg(5, 3, &[&[1, 2, 3], &[1, 2, 4], &[1, 3, 5]]);
        let k = VertexSet::singleton(1);
        let opts = SunflowerOptions { containing: Some(VertexSet::from_slice(&[1, 2, 3])), ..Default::default() };
        assert!(find_sunflower_with(f.edges(), k, 2, opts).is_none());
        let opts = SunflowerOptions { containing: Some(VertexSet::from_slice(&[1, 2, 4])), ..Default::default() };
        let sf = find_sunflower_with(f.edges(), k, 2, opts).unwrap();
        assert!(sf.contains_member(VertexSet::from_slice(&[1, 2, 4])));
    }

    #[test]
    fn kernel_examples() {
        let k9 = Hypergraph::complete(9, 3).unwrap();
        assert_eq!(kernels(&k9, 1, 4).unwrap().len(), 9);
        let one = hg(3, 3, &[&[1, 2, 3]]);
        assert!(kernels(&one, 1, 2).unwrap().is_empty());
        let star = Hypergraph::complete(9, 3).unwrap().filter(|e| e.contains(1));
        let ks = kernels(&star, 2, 3).unwrap();
        assert_eq!(ks.len(), 8);
        assert!(ks.iter().all(|k| k.contains(1)));
    }

    #[test]
    fn intersection_examples() {
        let f = hg(5, 3, &[&[1, 2, 3], &[1, 4, 5]]);
        let e = VertexSet::from_slice(&[1, 2, 3]);
        assert_eq!(intersection_structure(&f, e).unwrap(), vec![VertexSet::singleton(1)]);
        let single = hg(3, 3, &[&[1, 2, 3]]);
        assert!(intersection_structure(&single, e).unwrap().is_empty());
        let f = hg(5, 3, &[&[1, 2, 3], &[1, 2, 4], &[3, 4, 5]]);
        let got = intersection_structure(&f, e).unwrap();
        assert_eq!(got.len(), 2);
        assert!(got.contains(&VertexSet::from_slice(&[1, 2])) && got.contains(&VertexSet::singleton(3)));
        assert!(intersection_structure(&f, VertexSet::from_slice(&[2, 3, 4])).is_err());
    }
}
