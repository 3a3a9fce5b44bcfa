use std::collections::BTreeSet;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::set::VertexSet;

/// A family of proper subsets of `[r]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PatternFamily {
    r: usize,
    members: BTreeSet<VertexSet>,
}

impl PatternFamily {
    pub fn new(r: usize, members: impl IntoIterator<Item = VertexSet>) -> Result<Self> {
        if r == 0 || r > 64 {
            return Err(invalid(format!("pattern ground size {r} out of range")));
        }
        let full = VertexSet::full(r);
        let members: BTreeSet<VertexSet> = members.into_iter().collect();
        if let Some(bad) = members.iter().find(|m| !m.is_subset(full) || **m == full) {
            return Err(invalid(format!("{{{bad}}} is not a proper subset of [{r}]")));
        }
        Ok(PatternFamily { r, members })
    }

    pub(crate) fn from_valid(r: usize, members: BTreeSet<VertexSet>) -> Self {
        PatternFamily { r, members }
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn members(&self) -> &BTreeSet<VertexSet> {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, s: VertexSet) -> bool {
        self.members.contains(&s)
    }

    /// Members as raw bitmasks (element `i` is bit `i-1`).
    pub fn bitmasks(&self) -> Vec<u64> {
        self.members.iter().map(|m| m.bits()).collect()
    }

    pub fn count_of_size(&self, k: usize) -> usize {
        self.members.iter().filter(|m| m.len() == k).count()
    }

    pub fn is_closed(&self) -> bool {
        let ms: Vec<VertexSet> = self.members.iter().copied().collect();
        ms.iter()
            .tuple_combinations()
            .all(|(&a, &b)| self.members.contains(&(a & b)))
    }

    /// Smallest intersection-closed family containing this one.
    pub fn closure(&self) -> PatternFamily {
        let mut set = self.members.clone();
        loop {
            let ms: Vec<VertexSet> = set.iter().copied().collect();
            let before = set.len();
            for (&a, &b) in ms.iter().tuple_combinations() {
                set.insert(a & b);
            }
            if set.len() == before {
                return PatternFamily { r: self.r, members: set };
            }
        }
    }

    /// Every m-subset of `[r]` lies inside some member.
    pub fn is_m_covering(&self, m: usize) -> bool {
        if m > self.r {
            return false;
        }
        VertexSet::full(self.r)
            .subsets_of_size(m)
            .all(|s| self.members.iter().any(|&x| s.is_subset(x)))
    }

    /// Image under `perm`, where `perm[i]` is the new name of `i` (index 0 unused).
    pub fn relabel(&self, perm: &[usize]) -> PatternFamily {
        PatternFamily { r: self.r, members: self.members.iter().map(|m| m.map(perm)).collect() }
    }

    pub fn is_superset_of(&self, other: &PatternFamily) -> bool {
        other.members.is_subset(&self.members)
    }
}

/// The family `J^(k)`: the sets `[r] \ {i}` for `i ≤ k`, every (r-2)-subset
/// containing `[k]`, and all intersections of these.
pub fn make_jk(r: usize, k: usize) -> Result<PatternFamily> {
    if r < 2 || r > 64 {
        return Err(invalid(format!("r = {r} out of range")));
    }
    if k > r {
        return Err(invalid(format!("k = {k} exceeds r = {r}")));
    }
    let full = VertexSet::full(r);
    let head = VertexSet::full(k.min(r));
    let mut gens: BTreeSet<VertexSet> = (1..=k).map(|i| full.without(i)).collect();
    gens.extend(full.subsets_of_size(r - 2).filter(|s| head.is_subset(*s)));
    Ok(PatternFamily::from_valid(r, gens).closure())
}

/// Which `J^(k)` a covering family contains, and under which relabelling.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoveringClass {
    pub k: usize,
    /// `relabel[i]` is the element of `[r]` playing the role of `i` in
    /// `J^(k)` (index 0 unused).
    pub relabel: Vec<usize>,
}

/// Classifies an intersection-closed (r-2)-covering family: `k` is its
/// number of (r-1)-sets, and a relabelling embedding `J^(k)` is found by
/// brute force over all permutations of `[r]`, lexicographically first.
pub fn classify_covering(j: &PatternFamily) -> Result<CoveringClass> {
    let r = j.r();
    if r < 2 {
        return Err(invalid("classification needs r ≥ 2"));
    }
    if r > 8 {
        return Err(invalid(format!("brute-force classification supports r ≤ 8, got {r}")));
    }
    if !j.is_closed() {
        return Err(invalid("family is not closed under intersection"));
    }
    if !j.is_m_covering(r - 2) {
        return Err(invalid(format!("family is not {}-covering", r - 2)));
    }
    let k = j.count_of_size(r - 1);
    let jk = make_jk(r, k)?;
    for perm in (1..=r).permutations(r) {
        let map: Vec<usize> = std::iter::once(0).chain(perm.iter().copied()).collect();
        if jk.members().iter().all(|m| j.contains(m.map(&map))) {
            return Ok(CoveringClass { k, relabel: map });
        }
    }
    Err(Error::Inconsistency(format!(
        "covering family with {k} sets of size r-1 contains no copy of J^({k})"
    )))
}

/// A disjoint pair of members of sizes `a` and `b`, lexicographically first.
pub fn disjoint_pair(j: &PatternFamily, a: usize, b: usize) -> Option<(VertexSet, VertexSet)> {
    let first: Vec<VertexSet> = j.members().iter().copied().filter(|m| m.len() == a).collect();
    let second: Vec<VertexSet> = j.members().iter().copied().filter(|m| m.len() == b).collect();
    first
        .iter()
        .cartesian_product(second.iter())
        .find(|(x, y)| x.is_disjoint(**y))
        .map(|(&x, &y)| (x, y))
}
