//! Delta-system toolkit for hypergraph bushes.
//!
//! Constructions, exact containment search, sunflower and intersection
//! structure machinery, Kruskal-Katona shadow bounds and an exact Turán
//! number oracle for small instances.

pub mod bush;
pub mod canon;
pub mod constructions;
pub mod containment;
pub mod delta;
pub mod error;
pub mod hypergraph;
pub mod set;
pub mod shadow_bounds;
pub mod tree;
pub mod turan;

pub use canon::{canonical_form, is_isomorphic, CanonicalForm, CanonicalLabel};
pub use error::{Error, ParseError, Result};
pub use hypergraph::{read_hypergraph, write_hypergraph, Hypergraph, Partition};
pub use set::VertexSet;
