//! Combinatorial spin and spin^c calculus for Hantzsche-Wendt manifolds.
//!
//! A diagonal flat manifold is encoded by a matrix over the Klein four-group
//! `S = {0, 1, 2, 3}`. This crate implements the matrix predicates (free,
//! effective, distinguished, HW), the degree-two Stiefel-Whitney polynomial
//! and its cocycles, two independent decision procedures for spin^c
//! structures, the `C_2 wr S_n` action with canonical forms, exhaustive
//! enumeration of HW-matrices, and exhaustive checks of the supporting
//! combinatorial lemmas.

pub mod action;
pub mod cohomology;
pub mod enumeration;
pub mod error;
pub mod gf2;
pub mod salgebra;
pub mod smatrix;
pub mod structures;
pub mod subset;
pub mod verification;



pub use action::{are_equivalent, canonical_form, GroupElement};
pub use cohomology::{LinForm, QuadForm};
pub use error::{Error, Result};
pub use salgebra::{Bit, SElem};
pub use smatrix::{format_matrices, parse_matrices, Row, SMatrix};
pub use enumeration::{count_hw, enumerate_hw, HwCounts, Mode};

pub use structures::{analyze, Criterion, SpincReport};
pub use subset::Subset;
