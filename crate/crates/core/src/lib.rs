//! Exact counting and verification of independent sets in odd discrete tori
//! Z_m^n.
//!
//! The crate counts independent sets exactly, enumerates the maximum ones
//! through an explicit labelling, evaluates the polymer cluster expansion
//! with exact rationals, and checks isoperimetric and lower-bound
//! inequalities on every subset or on seeded samples.

pub mod bounds;
pub mod caps;
pub mod count;
pub mod error;
pub mod graph;
pub mod isoperimetry;
pub mod maxset;
pub mod numeric;
pub mod polymer;
pub mod torus;
pub mod vertex_set;

pub use bounds::{
    bound_report, compare_table, defect_count_bound, fkg_bound, thm1_core, thm2_core_log2, Activity, BoundReport,
};
pub use caps::Caps;
pub use count::{
    count_brute, count_transfer, enumerate_independent, independence_polynomial,
    partition_function, CountProfile, Method,
};
pub use error::{Error, Result};
pub use graph::GenericGraph;
pub use isoperimetry::{
    conjecture_probe, corollary_check, counterexample_construct, directed_boundary, slice_bound_check,
    theorem3_check, verify_theorem_exhaustive, verify_theorem_sampled, IsoReport,
};
pub use maxset::{enumerate_maximum, intersection_profile, iota, iota_inverse, MaxSetLabel};
pub use polymer::{closed_form_l1, closed_form_l2, conjecture_value, l_r, ursell, z_polymer, Polymer, PolymerModel};
pub use numeric::{BigCount, ExactRational};
pub use torus::{ClassIndex, TorusGraph, VertexId};
pub use vertex_set::VertexSet;
