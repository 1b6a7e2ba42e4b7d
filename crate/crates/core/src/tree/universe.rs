//! Backend-tagged nodes for callers that mix backends at runtime (the CLI and
//! JSON inputs). Statically typed code uses [`CTree`] directly.

use serde::{Deserialize, Serialize};

use super::ops;
use super::region::{self, Region};
use super::{BranchingNumber, CTree, GoodTree, NodeId, TreeError};
use crate::puiseux::{PNode, PuiseuxField};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "backend", content = "node", rename_all = "snake_case")]
pub enum NodeRef {
    Finite(NodeId),
    Puiseux(PNode),
}

/// A backend instance against which [`NodeRef`]s are interpreted.
#[derive(Clone, Copy, Debug)]
pub enum Universe<'a> {
    Finite(&'a GoodTree),
    Puiseux(&'a PuiseuxField),
}

fn finite(a: &NodeRef) -> Result<NodeId, TreeError> {
    match a {
        NodeRef::Finite(n) => Ok(*n),
        NodeRef::Puiseux(_) => Err(TreeError::BackendMismatch),
    }
}

fn puiseux(a: &NodeRef) -> Result<PNode, TreeError> {
    match a {
        NodeRef::Puiseux(n) => Ok(n.clone()),
        NodeRef::Finite(_) => Err(TreeError::BackendMismatch),
    }
}

fn region_as<N>(r: &Region<NodeRef>, f: impl Fn(&NodeRef) -> Result<N, TreeError>) -> Result<Region<N>, TreeError> {
    r.try_map(f)
}

impl Universe<'_> {
    pub fn inf(&self, a: &NodeRef, b: &NodeRef) -> Result<NodeRef, TreeError> {
        match self {
            Universe::Finite(t) => Ok(NodeRef::Finite(t.inf(&finite(a)?, &finite(b)?)?)),
            Universe::Puiseux(f) => Ok(NodeRef::Puiseux(f.inf(&puiseux(a)?, &puiseux(b)?)?)),
        }
    }

    pub fn c_relation(&self, x: &NodeRef, y: &NodeRef, z: &NodeRef) -> Result<bool, TreeError> {
        match self {
            Universe::Finite(t) => ops::c_relation(*t, &finite(x)?, &finite(y)?, &finite(z)?),
            Universe::Puiseux(f) => ops::c_relation(*f, &puiseux(x)?, &puiseux(y)?, &puiseux(z)?),
        }
    }

    pub fn branching_number(&self, a: &NodeRef) -> Result<BranchingNumber, TreeError> {
        match self {
            Universe::Finite(t) => t.branching_number(&finite(a)?),
            Universe::Puiseux(f) => f.branching_number(&puiseux(a)?),
        }
    }

    pub fn region_contains(&self, r: &Region<NodeRef>, x: &NodeRef) -> Result<bool, TreeError> {
        match self {
            Universe::Finite(t) => region::region_contains(*t, &region_as(r, finite)?, &finite(x)?),
            Universe::Puiseux(f) => region::region_contains(*f, &region_as(r, puiseux)?, &puiseux(x)?),
        }
    }

    /// Leaf set of a region; only finite regions can be enumerated.
    pub fn region_members(&self, r: &Region<NodeRef>) -> Result<Vec<NodeRef>, TreeError> {
        match self {
            Universe::Finite(t) => {
                Ok(t.region_members(&region_as(r, finite)?)?.into_iter().map(NodeRef::Finite).collect())
            }
            Universe::Puiseux(_) => Err(TreeError::InfiniteRegion),
        }
    }
}
