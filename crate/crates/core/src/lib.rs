//! Finite, exact models of ultrafilter divisibility on the naturals.
//!
//! - [`arith`]: factorization, divisor closures, quotient sets, coprime
//!   products `A^(n)`.
//! - [`patterns`]: factorization patterns, the domination order, the sets
//!   `S_α` and witness certificates.
//! - [`filters`]: filters on `{1..N}` with both divisibility
//!   characterizations and the product formula.
//! - [`coloring`]: the dyadic pair coloring, the partitions `d_n`, progression
//!   checks and bounded thickness.
//! - [`constructions`]: eventually constant functions, the maps `g_n`, the
//!   `Y` set and a greedy thickness-preserving extender.

pub mod arith;
pub mod coloring;
pub mod constructions;
pub mod error;
pub mod filters;
pub mod nat;
pub mod patterns;

pub use error::{Error, Result};
pub use nat::{nat, Nat, NatSet};
