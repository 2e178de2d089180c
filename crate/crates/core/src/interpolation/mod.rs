//! Interpolation machinery: Vandermonde class sums, well-balanced pin maps,
//! the witness families and the distinguisher built on them.

pub mod balance;
pub mod catalog;
pub mod distinguish;
pub mod families;
pub mod vandermonde;

pub use balance::{bucket_structure, buckets, is_well_balanced, well_balanced_extension, BucketStructure, WellBalanced};
pub use catalog::{pli_instances, simple_instances, witness_catalog};
pub use distinguish::{distinguish, DistinguishConfig, Distinguisher, Outcome, Prepared, Source, Witness};
pub use families::{build_family_one, build_family_three, build_family_two};
pub use vandermonde::{vandermonde_class_sums, vandermonde_tuple_class_sums, ClassSums};
