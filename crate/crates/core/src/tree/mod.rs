//! Good trees and the order-theoretic constructions on them.
//!
//! A good tree is a meet semi-lattice in which every down-set is a chain and
//! every node has a leaf above it. Leaves are the points of the C-set; the
//! remaining nodes are the balls. Every tree carries a virtual root `-inf`
//! below all nodes, so `inf` is total.
//!
//! Two backends implement [`CTree`]: explicit finite trees ([`GoodTree`]) and
//! the ball tree of truncated Puiseux series ([`crate::puiseux::PuiseuxField`]).
//! Everything in [`ops`] and [`region`] is written once against the trait.

mod axioms;
mod dot;
mod good;
pub mod ops;
pub mod region;
mod universe;

pub use axioms::{check_c_axioms, check_c_axioms_sampled, Axiom, AxiomReport, AxiomResult};
pub use dot::to_dot;
pub use good::{GoodTree, GoodTreeJson, NodeJson};
pub use region::Region;
pub use universe::{NodeRef, Universe};

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

use crate::puiseux::PuiseuxError;

/// Opaque identifier of a node of a finite good tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Number of cones at a node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchingNumber {
    Finite(usize),
    /// The residue field is infinite, so every ball has infinitely many cones.
    Infinite,
}

impl BranchingNumber {
    /// `bn > n`
    pub fn exceeds(&self, n: usize) -> bool {
        match self {
            BranchingNumber::Finite(k) => *k > n,
            BranchingNumber::Infinite => true,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TreeError {
    #[error("nodes belong to different backends")]
    BackendMismatch,
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("{0} is not a leaf")]
    NotALeaf(String),
    #[error("{0} is a leaf")]
    LeafArgument(String),
    #[error("empty input")]
    EmptyInput,
    #[error("not an antichain: {0} and {1} are comparable")]
    NotAntichain(String, String),
    #[error("invalid region: {0}")]
    InvalidRegion(String),
    #[error("invalid tree: {0}")]
    InvalidTree(String),
    #[error("region is infinite; use region_contains")]
    InfiniteRegion,
    #[error(transparent)]
    Puiseux(#[from] PuiseuxError),
}

/// Order interface shared by both backends.
///
/// `Node` ranges over the leaves, the inner nodes and the virtual root.
pub trait CTree {
    type Node: Clone + PartialEq + fmt::Debug;

    fn neg_inf(&self) -> Self::Node;

    fn is_leaf(&self, a: &Self::Node) -> bool;

    fn is_neg_inf(&self, a: &Self::Node) -> bool;

    /// `a <= b`
    fn le(&self, a: &Self::Node, b: &Self::Node) -> Result<bool, TreeError>;

    /// Semantic equality (for balls: same radius and overlapping centers).
    fn same(&self, a: &Self::Node, b: &Self::Node) -> Result<bool, TreeError> {
        Ok(self.le(a, b)? && self.le(b, a)?)
    }

    fn lt(&self, a: &Self::Node, b: &Self::Node) -> Result<bool, TreeError> {
        Ok(self.le(a, b)? && !self.le(b, a)?)
    }

    fn comparable(&self, a: &Self::Node, b: &Self::Node) -> Result<bool, TreeError> {
        Ok(self.le(a, b)? || self.le(b, a)?)
    }

    fn inf(&self, a: &Self::Node, b: &Self::Node) -> Result<Self::Node, TreeError>;

    fn branching_number(&self, a: &Self::Node) -> Result<BranchingNumber, TreeError>;

    fn describe(&self, a: &Self::Node) -> String {
        format!("{a:?}")
    }
}
