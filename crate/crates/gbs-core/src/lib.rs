//! Decision procedures for generalized Baumslag-Solitar (GBS) groups.
//!
//! A GBS group is described by a *labeled graph*: a finite connected graph
//! with a nonzero integer on each directed edge end. This crate implements
//! the move calculus on labeled graphs (collapse, slide, induction, A-moves),
//! slide-space exploration and edge mobility, the finiteness criterion for
//! the set of reduced labeled graphs of a group, and the isomorphism
//! decision procedure for inputs whose graphs have first Betti number at
//! most one.
//!
//! All arithmetic is exact (`num-bigint` / `num-rational`); every operation
//! is a pure function over immutable graphs.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod betti1;
pub mod canon;
pub mod gen;
pub mod graph;
pub mod mobility;
pub mod modular;
pub mod moves;

pub use betti1::{isomorphic, IsoVerdict};
pub use canon::{canonical_code, canonical_form, CanonicalCode};
pub use graph::{Edge, EdgePath, ElementaryClass, GraphError, Label, LabeledGraph, Vertex};

/// Re-exports of the arithmetic types used throughout the public API.
pub mod num {
    pub use num_bigint::{BigInt, BigUint, Sign};
    pub use num_rational::BigRational;
    pub use num_traits::{One, Signed, Zero};
}

#[cfg(test)]
pub(crate) mod testfix;
