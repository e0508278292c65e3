//! Length-changing pattern replacements `123 <-> beta` on permutations.
//!
//! Each of the eighteen rules partitions the permutations of all lengths
//! into equivalence classes. [`classify`] identifies a permutation's class
//! in closed form, [`explore`] finds classes by bounded exhaustive search,
//! and [`verify`] checks that the two agree.

pub mod classify;
pub mod error;
pub mod explore;
pub mod pattern;
pub mod perm;
pub mod rewrite;
pub mod verify;

pub use classify::{signature_of, ClassSignature};
pub use error::{Error, Result};
pub use perm::Permutation;
pub use rewrite::{BackwardMove, Category, Direction, ForwardMove, Rule, RuleSpec};
