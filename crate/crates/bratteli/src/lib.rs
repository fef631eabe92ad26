//! Bratteli diagrams and combinatorial presentations of AF-algebras.
//!
//! The crate works with four kinds of objects:
//!
//! - [`BratteliDiagram`]: leveled multigraphs with positive-integer vertex
//!   labels `d_v` and nonnegative multiplicity matrices between consecutive
//!   levels, optionally closed off by a periodic tail. These encode towers of
//!   finite-dimensional C*-algebras and hence AF-algebras.
//! - [`DirectedGraph`], [`Ultragraph`], [`ZeroOneMatrix`]: the three
//!   presentation styles for graph algebras, ultragraph algebras, and
//!   Exel-Laca algebras, with the standard conversions between them.
//! - [`RealizedUltragraph`]: the ultragraph built from a diagram whose vertex
//!   `v` contributes `delta(v) - 1` fresh vertices, where
//!   `delta(v) = d_v - sum (d_src - 1)` over incoming edges. Simulating its
//!   finite-dimensional tower recovers the original diagram level by level,
//!   which is how constructions are verified here.
//! - [`AlgDescriptor`]: a bag of structural facts about an AF-algebra
//!   (unital, simple, which quotients exist, witness presentations) fed to a
//!   three-valued rule engine that decides membership in the graph /
//!   Exel-Laca / ultragraph / row-finite-no-sinks classes.
//!
//! All numbers that can grow under telescoping (dimensions, multiplicities,
//! path counts) are arbitrary-precision [`Nat`] values. Every operation is a
//! pure function of its inputs and deterministic; collections iterate in
//! canonical (declaration) order.

pub mod classify;
pub mod diagram;
pub mod dsl;
pub mod error;
pub mod gen;
pub mod graph;
pub mod hereditary;
pub mod matrix;
pub mod normalize;
pub mod numeric;
pub mod properties;
pub mod realize;
pub mod tower;
pub mod tri;
pub mod ultragraph;

pub use classify::{classify, combine_direct_sum, derive_descriptor, AlgDescriptor, ClassVerdict};
pub use diagram::{BratteliDiagram, Level, MultMatrix, PeriodicTail, ValidationReport};
pub use error::Error;
pub use graph::DirectedGraph;
pub use hereditary::HereditarySet;
pub use matrix::ZeroOneMatrix;
pub use realize::{build_ultragraph, compute_deltas, realize_row_finite, RealizedUltragraph};
pub use tower::{simulate_direct_limit, verify_roundtrip, FinDimShape, FinDimTower, InclusionMap};
pub use tri::Tri;
pub use ultragraph::{RangeSet, Ultragraph};

/// Arbitrary-precision nonnegative integer used for dimensions and
/// multiplicities. Telescoping multiplies matrices, so entries grow
/// exponentially with the number of collapsed levels.
pub type Nat = num_bigint::BigUint;

/// Shorthand for building a [`Nat`] from a machine integer.
pub fn nat(n: u64) -> Nat {
    Nat::from(n)
}

