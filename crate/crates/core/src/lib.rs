//! Black-box computational group theory at desk scale.
//!
//! The crate works with groups given only by generators (permutations or
//! GF(2) matrices) and provides randomized element search, enumeration,
//! straight-line-program bookkeeping, exact character-table arithmetic,
//! class-fusion analysis and GF(2) module invariants.

pub mod blackbox;
pub mod chartab;
pub mod cyclo;
pub mod files;
pub mod fusion;
pub mod gf2;
pub mod perm;
pub mod search;
pub mod slp;
