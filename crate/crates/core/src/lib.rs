//! Exact machinery for counting constraint satisfaction problems: partition
//! functions of labeled and domain-weighted instances, isomorphism of
//! constraint function sets with concrete distinguishing instances, and the
//! Holant gadget calculus with permutation-group intertwiners.

pub mod config;
pub mod csp;
pub mod error;
pub mod holant;
pub mod interpolation;
pub mod intertwiners;
pub mod io;
pub mod linalg;
pub mod partition;
pub mod perm;
pub mod random;
pub mod scalar;
pub mod selftest;
pub mod structure;
pub mod tensor;

pub use csp::{CFSet, Constraint, LabeledInstance};
pub use error::{Error, Result};
pub use perm::Permutation;
pub use scalar::Scalar;
pub use tensor::{ConstraintFunction, FlatMatrix};
