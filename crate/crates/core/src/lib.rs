//! Canonical trees of C-sets.
//!
//! A C-set is represented through its canonical tree: leaves are the points,
//! inner nodes the balls, and a virtual root `-inf` sits below everything.
//! Two backends are provided: explicit finite trees and the ball tree of the
//! field of truncated Puiseux series over `Q`. On top of them the crate
//! decomposes locally constant tree-valued functions into cells with
//! antichain or chain images, factors such functions through branches and
//! cones, and decomposes subsets of the tree into 1-cells.

// Errors carry witnesses and nested tree errors; boxing them buys nothing here.
#![allow(clippy::result_large_err, clippy::type_complexity)]

pub mod decompose;
pub mod finite_model;
pub mod puiseux;
pub mod rational;
pub mod suite;
pub mod tree;
pub mod tsets;

pub use tree::{BranchingNumber, CTree, GoodTree, NodeId, NodeRef, Region, TreeError, Universe};
