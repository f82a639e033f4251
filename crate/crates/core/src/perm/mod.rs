//! Permutation-group machinery: arithmetic, stabilizer chains, orbits, block
//! kernels, normal closures, semiprimitivity and permutation isomorphism.

pub mod blocks;
pub mod catalog;
mod chain;
pub mod group;
pub mod iso;
pub mod parse;
pub mod permutation;
pub mod semiprimitive;

pub use blocks::{kernel_on_blocks, BlockAction, BlockPartition};
pub use group::PermGroup;
pub use iso::{perm_isomorphic, perm_isomorphic_with_cap};
pub use parse::{parse_group, parse_group_text};
pub use permutation::Permutation;
pub use semiprimitive::{
    build_section_epsilon, build_transversal_tau, find_witness, is_semiprimitive,
    SectionEpsilon, Semiprimitivity, TransversalTau, WitnessData,
};
