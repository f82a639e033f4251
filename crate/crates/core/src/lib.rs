//! Finite permutation groups and the amalgam constructions built on them.

pub mod abstract_group;
pub mod error;
pub mod perm;
pub mod rank2;
pub mod rankk;
pub mod tree;
pub mod verdict;

pub use error::{Error, Result};
