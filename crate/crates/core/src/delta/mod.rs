//! Sunflowers, intersection structures, pattern families and the certified
//! homogeneous-subfamily extraction.

mod extract;
mod pattern;
mod sunflower;

pub use extract::{
    extract_homogeneous, partition_procedure, special_part_for, verify_certificate, ExtractConfig,
    ExtractionCertificate, PartitionResult, StarWitness, VerificationReport,
};
pub use pattern::{classify_covering, disjoint_pair, make_jk, CoveringClass, PatternFamily};
pub use sunflower::{find_sunflower, find_sunflower_with, intersection_structure, kernels, Sunflower, SunflowerOptions};
