use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::delta::{verify_certificate, PartitionResult};
use crate::error::{invalid, Result};
use crate::set::VertexSet;

/// Which counting scheme applies to the bush parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CountingCase {
    /// `a, b ≥ 2`, `r ≥ 5`: α only.
    General,
    /// `r = 4`, `a = b = 2`: α plus β/3.
    TwoTwo,
    /// `(a, b) = (r-1, 1)`: α plus β.
    LastOne,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlphaBetaParams {
    pub a: usize,
    pub b: usize,
    pub s: usize,
}

impl AlphaBetaParams {
    pub fn r(&self) -> usize {
        self.a + self.b
    }

    pub fn case(&self) -> Result<CountingCase> {
        let (a, b, r) = (self.a, self.b, self.r());
        if self.s == 0 {
            return Err(invalid("s must be at least 1"));
        }
        if r == 4 && a == 2 && b == 2 {
            Ok(CountingCase::TwoTwo)
        } else if a >= 2 && b >= 2 && r >= 5 {
            Ok(CountingCase::General)
        } else if b == 1 && a >= 2 {
            Ok(CountingCase::LastOne)
        } else {
            Err(invalid(format!("no α/β counting scheme for (a, b) = ({a}, {b})")))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClassType {
    Alpha,
    Beta,
    Excluded,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassInfo {
    pub index: usize,
    pub size: usize,
    pub k: Option<usize>,
    pub verified: bool,
    pub class_type: ClassType,
}

/// Per-(r-1)-set α and β values with the per-set and aggregate checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlphaBetaReport {
    pub case: CountingCase,
    pub s: usize,
    pub classes: Vec<ClassInfo>,
    /// `Y ↦ (α(Y), β(Y))`, only sets with a non-zero entry.
    #[serde(with = "crate::set::as_entries")]
    pub values: BTreeMap<VertexSet, (usize, usize)>,
    pub max_alpha: usize,
    /// Sets where the per-set inequality fails.
    pub violations: Vec<VertexSet>,
    /// `|∂Ĥ|` over the included classes.
    pub shadow_size: usize,
    pub h_alpha: usize,
    pub h_beta: usize,
    /// `(s-1)|∂Ĥ|`.
    pub aggregate_lhs: f64,
    /// `Σ_Y` of the per-set quantity (α, α + β/3 or α + β).
    pub aggregate_sum: f64,
    /// `|Ĥ|`, `|Ĥ_α| + |Ĥ_β|` or `|Ĥ_α| + r|Ĥ_β|`.
    pub aggregate_rhs: f64,
    pub warnings: Vec<String>,
}

impl AlphaBetaReport {
    pub fn per_set_holds(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn aggregate_holds(&self) -> bool {
        self.aggregate_lhs + 1e-9 >= self.aggregate_sum
    }

    /// Whether every class passed certificate verification.
    pub fn all_verified(&self) -> bool {
        self.classes.iter().all(|c| c.verified)
    }

    /// CSV with columns `Y,alpha,beta`; `Y` is a space-separated vertex list.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["Y", "alpha", "beta"])?;
        for (y, (a, b)) in &self.values {
            w.write_record([y.to_string(), a.to_string(), b.to_string()])?;
        }
        let bytes = w.into_inner().map_err(|e| crate::Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// Tags every class of a partition and counts α(Y), β(Y).
///
/// α-type classes (`k ≥ r-1`) contribute `E \ {c(E)}` to α. β-type classes
/// are those with `k = 1` when `(a, b) = (2, 2)` (contributing the three
/// 3-sets `Y ∋ b(E)` inside `E`) and those with `k = 0` when `b = 1`
/// (contributing every (r-1)-subset of `E`). Classes that fail
/// verification or fit neither type are excluded with a warning.
pub fn alpha_beta_count(pr: &PartitionResult, params: AlphaBetaParams) -> Result<AlphaBetaReport> {
    let case = params.case()?;
    let r = params.r();
    let s = params.s;
    let mut classes = Vec::with_capacity(pr.classes.len());
    let mut warnings = Vec::new();
    let mut values: BTreeMap<VertexSet, (usize, usize)> = BTreeMap::new();
    let mut shadow: BTreeSet<VertexSet> = BTreeSet::new();
    let (mut h_alpha, mut h_beta) = (0usize, 0usize);

    for (idx, cert) in pr.classes.iter().enumerate() {
        let verified = verify_certificate(cert).passed();
        let k = cert.structure.as_ref().map(|c| c.k);
        let class_type = if cert.subfamily.r() != r {
            warnings.push(format!("class {}: uniformity differs from a + b", idx + 1));
            ClassType::Excluded
        } else if !verified {
            warnings.push(format!("class {}: certificate failed verification", idx + 1));
            ClassType::Excluded
        } else {
            match (k, case) {
                (None, _) => {
                    warnings.push(format!("class {}: J is not a covering family, unclassifiable", idx + 1));
                    ClassType::Excluded
                }
                (Some(k), _) if k + 1 >= r => ClassType::Alpha,
                (Some(1), CountingCase::TwoTwo) => ClassType::Beta,
                (Some(0), CountingCase::LastOne) => ClassType::Beta,
                (Some(k), _) => {
                    warnings.push(format!("class {}: k = {k} fits neither type", idx + 1));
                    ClassType::Excluded
                }
            }
        };
        classes.push(ClassInfo { index: idx + 1, size: cert.len(), k, verified, class_type });
        if class_type == ClassType::Excluded {
            continue;
        }
        for &e in cert.subfamily.edges() {
            shadow.extend(e.subsets_of_size(r - 1));
            match class_type {
                ClassType::Alpha => {
                    let c = cert.special_vertex(e).expect("α-type class has a special part");
                    values.entry(e.without(c)).or_default().0 += 1;
                    h_alpha += 1;
                }
                ClassType::Beta => {
                    h_beta += 1;
                    match case {
                        CountingCase::TwoTwo => {
                            let b = cert.special_vertex(e).expect("β-type class has a special part");
                            for y in e.subsets_of_size(r - 1).filter(|y| y.contains(b)) {
                                values.entry(y).or_default().1 += 1;
                            }
                        }
                        _ => {
                            for y in e.subsets_of_size(r - 1) {
                                values.entry(y).or_default().1 += 1;
                            }
                        }
                    }
                }
                ClassType::Excluded => unreachable!(),
            }
        }
    }
    for w in &warnings {
        log::warn!("{w}");
    }

    let bound = s.saturating_sub(1);
    let violations: Vec<VertexSet> = values
        .iter()
        .filter(|(_, &(a, b))| match case {
            CountingCase::General => a > bound,
            CountingCase::TwoTwo => 3 * a + b > 3 * bound,
            CountingCase::LastOne => a + b > bound,
        })
        .map(|(y, _)| *y)
        .collect();
    let max_alpha = values.values().map(|v| v.0).max().unwrap_or(0);
    let total_alpha: usize = values.values().map(|v| v.0).sum();
    let total_beta: usize = values.values().map(|v| v.1).sum();
    let (aggregate_sum, aggregate_rhs) = match case {
        CountingCase::General => (total_alpha as f64, (h_alpha + h_beta) as f64),
        CountingCase::TwoTwo => (total_alpha as f64 + total_beta as f64 / 3.0, (h_alpha + h_beta) as f64),
        CountingCase::LastOne => ((total_alpha + total_beta) as f64, (h_alpha + r * h_beta) as f64),
    };
    Ok(AlphaBetaReport {
        case,
        s,
        classes,
        values,
        max_alpha,
        violations,
        shadow_size: shadow.len(),
        h_alpha,
        h_beta,
        aggregate_lhs: (bound * shadow.len()) as f64,
        aggregate_sum,
        aggregate_rhs,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::delta::{extract_homogeneous, ExtractConfig, PatternFamily, StarWitness, Sunflower};
    use crate::hypergraph::{Hypergraph, Partition};

    fn vs(xs: &[usize]) -> VertexSet {
        VertexSet::from_slice(xs)
    }

    #[test]
    fn empty_partition() {
        let pr = PartitionResult { classes: vec![], residue: Hypergraph::empty(6, 3).unwrap(), threshold: 1.0 };
        let rep = alpha_beta_count(&pr, AlphaBetaParams { a: 2, b: 1, s: 2 }).unwrap();
        assert!(rep.values.is_empty());
        assert_eq!(rep.max_alpha, 0);
        assert!(rep.per_set_holds() && rep.aggregate_holds());
    }

    #[test]
    fn large_kernel_sunflower_is_excluded() {
        // J = {[r-1]} is not (r-2)-covering, so there is no c(E)
        let f = Hypergraph::from_lists(6, 3, (3..=6).map(|x| [1, 2, x])).unwrap();
        let p = Partition::new(vec![vs(&[1]), vs(&[2]), vs(&[3, 4, 5, 6])]).unwrap();
        let sf = Sunflower { kernel: vs(&[1, 2]), petals: (3..=6).map(VertexSet::singleton).collect() };
        let cert = crate::delta::ExtractionCertificate {
            witnesses: f.edges().iter().map(|&e| StarWitness { member: e, sunflower: sf.clone() }).collect(),
            subfamily: f.clone(),
            partition: p,
            j: PatternFamily::new(3, [vs(&[1, 2])]).unwrap(),
            q: 4,
            structure: None,
            special_part: None,
        };
        let pr = PartitionResult { classes: vec![cert], residue: Hypergraph::empty(6, 3).unwrap(), threshold: 0.0 };
        let rep = alpha_beta_count(&pr, AlphaBetaParams { a: 2, b: 1, s: 2 }).unwrap();
        assert_eq!(rep.classes[0].class_type, ClassType::Excluded);
        assert!(rep.classes[0].verified);
        assert!(rep.values.is_empty());
        assert_eq!(rep.warnings.len(), 1);
    }

    #[test]
    fn alpha_class_counts_each_edge_once() {
        let f = Hypergraph::complete(9, 3).unwrap();
        let cert = extract_homogeneous(&f, 2, &ExtractConfig::default()).unwrap();
        let n_edges = cert.len();
        let pr = PartitionResult { classes: vec![cert], residue: f.difference(&f), threshold: 0.0 };
        let rep = alpha_beta_count(&pr, AlphaBetaParams { a: 2, b: 1, s: 2 }).unwrap();
        assert_eq!(rep.h_alpha, n_edges);
        assert_eq!(rep.values.values().map(|v| v.0).sum::<usize>(), n_edges);
        assert_eq!(rep.aggregate_sum, rep.aggregate_rhs);
        let csv = rep.to_csv().unwrap();
        assert!(csv.starts_with("Y,alpha,beta\n"));
        assert_eq!(csv.lines().count(), rep.values.len() + 1);
    }

    #[test]
    fn params_cases() {
        assert_eq!(AlphaBetaParams { a: 3, b: 2, s: 2 }.case().unwrap(), CountingCase::General);
        assert_eq!(AlphaBetaParams { a: 2, b: 2, s: 2 }.case().unwrap(), CountingCase::TwoTwo);
        assert_eq!(AlphaBetaParams { a: 2, b: 1, s: 2 }.case().unwrap(), CountingCase::LastOne);
        assert!(AlphaBetaParams { a: 1, b: 2, s: 2 }.case().is_err());
    }
}
