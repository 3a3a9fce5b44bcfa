use serde::{Deserialize, Serialize};

use crate::containment::BushEmbedding;
use crate::delta::{find_sunflower, find_sunflower_with, Sunflower, SunflowerOptions};
use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::set::VertexSet;
use crate::tree::{BlowupSpec, BushParams};

/// Disjoint `A_0, B_1..B_s` with every `A_0 ∪ B_i` an edge and every `B_i`
/// a `(b, q)`-kernel.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssemblyInput {
    pub a0: VertexSet,
    pub bs: Vec<VertexSet>,
    pub q: usize,
}

fn precondition(msg: impl Into<String>) -> Error {
    Error::PreconditionFailed(msg.into())
}

/// Checks every invariant of the input, returning the kernel sunflowers.
pub fn check_assembly_input(host: &Hypergraph, inp: &AssemblyInput) -> Result<Vec<Sunflower>> {
    let a = inp.a0.len();
    if a == 0 {
        return Err(precondition("A_0 is empty"));
    }
    let Some(b) = inp.bs.first().map(|x| x.len()) else {
        return Err(precondition("no B_i given"));
    };
    if b == 0 || inp.bs.iter().any(|x| x.len() != b) {
        return Err(precondition("the B_i must be non-empty and of equal size"));
    }
    if a + b != host.r() {
        return Err(precondition(format!("|A_0| + |B_i| = {} but the host is {}-uniform", a + b, host.r())));
    }
    let mut used = inp.a0;
    for (i, &bi) in inp.bs.iter().enumerate() {
        if !used.is_disjoint(bi) {
            return Err(precondition(format!("B_{} meets A_0 or an earlier B_j", i + 1)));
        }
        used = used | bi;
    }
    for (i, &bi) in inp.bs.iter().enumerate() {
        if !host.contains_edge(inp.a0 | bi) {
            return Err(precondition(format!("A_0 ∪ B_{} is not an edge", i + 1)));
        }
    }
    let mut stars = Vec::with_capacity(inp.bs.len());
    for (i, &bi) in inp.bs.iter().enumerate() {
        match find_sunflower(host, bi, inp.q) {
            Some(sf) => stars.push(sf),
            None => return Err(precondition(format!("B_{} is not a ({b}, {})-kernel", i + 1, inp.q))),
        }
    }
    Ok(stars)
}

/// Grows `D_0 = A_0 ∪ ⋃B_j` by `h` petals per kernel, avoiding everything
/// already used.
///
/// Petals come from the witnessing sunflower first; if too few of them
/// avoid `D`, an exact packing of the kernel's link outside `D` is tried.
pub fn assemble_bush(host: &Hypergraph, inp: &AssemblyInput, h: usize) -> Result<BushEmbedding> {
    let stars = check_assembly_input(host, inp)?;
    let s = inp.bs.len();
    let p = BushParams::new(s, h).map_err(|e| precondition(e.to_string()))?;
    let spec = BlowupSpec::new(inp.a0.len(), inp.bs[0].len())?;
    let mut d = inp.bs.iter().fold(inp.a0, |acc, &b| acc | b);
    let mut leaves = Vec::with_capacity(s);
    for (i, (&bi, sf)) in inp.bs.iter().zip(&stars).enumerate() {
        let mut picked: Vec<VertexSet> = sf.petals.iter().copied().filter(|pt| pt.is_disjoint(d)).take(h).collect();
        if picked.len() < h {
            let outside: Vec<VertexSet> = host
                .edges()
                .iter()
                .copied()
                .filter(|&e| bi.is_subset(e) && (e - bi).is_disjoint(d))
                .collect();
            match find_sunflower_with(&outside, bi, h, SunflowerOptions::default()) {
                Some(found) => picked = found.petals,
                None => {
                    return Err(Error::AssemblyFailed(format!(
                        "B_{} has fewer than {h} petals avoiding the {} used vertices",
                        i + 1,
                        d.len()
                    )))
                }
            }
        }
        for &pt in &picked {
            d = d | pt;
        }
        leaves.push(picked);
    }
    let emb = BushEmbedding { center: inp.a0, middles: inp.bs.clone(), leaves };
    emb.check(host, p, spec).map_err(Error::Inconsistency)?;
    Ok(emb)
}
