//! Decomposition of locally constant functions into cells whose images are
//! antichains or chains, and the factoring and normal-form results built on
//! it.
//!
//! The finite backend works on explicit [`LeafMap`]s and decides everything
//! exactly; the Puiseux backend reads a [`PiecewiseFn`] and certifies its
//! answers from the shape of the expressions.

pub mod expr;
pub mod finite;
pub mod puiseux;

pub use expr::{
    ConstValue, FiniteExpr, MonotoneSegment, Piece, PiecewiseFn, PiecewiseMonotoneMap, PuiseuxExpr, RationalInterval,
    ResidueMap, SegmentMap, Value,
};
pub use finite::{
    chain_cover, cover_by_cones, group_chains, incomparable_chain_partition, BranchFactoring, BranchPiece,
    ConeFactoring, ConeMap, LeafFn, LeafSet, MonotonicitySplit, TableEntry,
};
pub use puiseux::{
    Band, PuiseuxBranchFactoring, PuiseuxBranchPiece, PuiseuxConeFactor, PuiseuxConeFactoring, ResidueEntry,
    ResidueNormalForm, ValueGroupCell, ValueGroupNormalForm,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::finite_model::{CellTag, LeafMap, ModelError};
use crate::puiseux::PuiseuxError;
use crate::tree::{CTree, GoodTree, NodeId, TreeError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DecomposeError {
    #[error("function is not locally constant at {witness}")]
    NotLocallyConstant { witness: String },
    #[error("{0}")]
    OutsideDomain(String),
    #[error("image is not contained in a chain: {witness}")]
    ImageNotChain { witness: String },
    #[error("value {witness} is not a cone at the target node")]
    ImageNotInCones { witness: String },
    #[error("f(a) < a fails at {witness}")]
    NotDescending { witness: String },
    #[error("piece cannot be put in normal form: {0}")]
    NotReducible(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("expected a {0} function")]
    WrongBackend(&'static str),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Tree(#[from] TreeError),
}

impl From<PuiseuxError> for DecomposeError {
    fn from(e: PuiseuxError) -> Self {
        DecomposeError::Tree(TreeError::Puiseux(e))
    }
}

impl DecomposeError {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            DecomposeError::NotLocallyConstant { .. } => "NOT_LOCALLY_CONSTANT",
            DecomposeError::OutsideDomain(_) => "OUTSIDE_DOMAIN",
            DecomposeError::ImageNotChain { .. } => "IMAGE_NOT_CHAIN",
            DecomposeError::ImageNotInCones { .. } => "IMAGE_NOT_IN_CONES",
            DecomposeError::NotDescending { .. } => "NOT_DESCENDING",
            DecomposeError::NotReducible(_) => "NOT_REDUCIBLE",
            DecomposeError::InvalidInput(_) => "INVALID_INPUT",
            DecomposeError::WrongBackend(_) => "WRONG_BACKEND",
            DecomposeError::Model(ModelError::Tree(e)) | DecomposeError::Tree(e) => tree_code(e),
            DecomposeError::Model(_) => "MODEL_ERROR",
        }
    }

    pub fn witness(&self) -> Option<String> {
        match self {
            DecomposeError::NotLocallyConstant { witness }
            | DecomposeError::ImageNotChain { witness }
            | DecomposeError::ImageNotInCones { witness }
            | DecomposeError::NotDescending { witness } => Some(witness.clone()),
            _ => None,
        }
    }
}

fn tree_code(e: &TreeError) -> &'static str {
    match e {
        TreeError::NotAntichain(..) => "NOT_ANTICHAIN",
        TreeError::Puiseux(PuiseuxError::PrecisionExhausted(_) | PuiseuxError::InsufficientPrecision { .. }) => {
            "INSUFFICIENT_PRECISION"
        }
        TreeError::Puiseux(_) => "PUISEUX_ERROR",
        TreeError::InvalidRegion(_) => "INVALID_REGION",
        _ => "TREE_ERROR",
    }
}

/// The fiber `Lambda_g ∩ f^-1(f(alpha))` described at `g = g(alpha)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FiberShape<N> {
    /// The union of the cones of `witnesses` at `basis`.
    UnionOfCones { basis: N, witnesses: Vec<N> },
    /// `Lambda_basis` minus the cones of `removed`.
    LevelSet { basis: N, removed: Vec<N> },
}

impl<N> FiberShape<N> {
    pub fn basis(&self) -> &N {
        match self {
            FiberShape::UnionOfCones { basis, .. } | FiberShape::LevelSet { basis, .. } => basis,
        }
    }

    /// Grouping key: the type of the fiber with witnesses forgotten.
    pub fn key(&self) -> ShapeKey {
        match self {
            FiberShape::UnionOfCones { witnesses, .. } => ShapeKey::Cones(witnesses.len()),
            FiberShape::LevelSet { removed, .. } => ShapeKey::Level(removed.len()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeKey {
    Cones(usize),
    Level(usize),
}

/// A cell: a finite union of parts, with its image tag. `points` and `image`
/// are explicit on the finite backend only.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cell<P, N> {
    pub parts: Vec<P>,
    pub tag: CellTag,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<N>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub image: Option<Vec<N>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionResult<P, N> {
    pub cells: Vec<Cell<P, N>>,
    pub exceptional: Vec<N>,
    pub added_parameters: Vec<N>,
}

pub type FiniteDecomposition = DecompositionResult<crate::tree::Region<NodeId>, NodeId>;
pub type PuiseuxDecomposition = DecompositionResult<Band, crate::puiseux::PNode>;

/// Either backend's decomposition, tagged like [`PiecewiseFn`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "backend", rename_all = "snake_case")]
pub enum Decomposition {
    Finite(FiniteDecomposition),
    Puiseux(PuiseuxDecomposition),
}

/// `X_0, X_1, ...`: `X_0` is the set of maximal elements of `s`, `X_{i+1}`
/// the maximal elements of what remains.
pub fn antichain_strata<T: CTree>(tree: &T, s: &[T::Node]) -> Result<Vec<Vec<T::Node>>, TreeError> {
    let mut rest: Vec<T::Node> = Vec::new();
    for x in s {
        let mut dup = false;
        for y in &rest {
            if tree.same(x, y)? {
                dup = true;
                break;
            }
        }
        if !dup {
            rest.push(x.clone());
        }
    }
    let mut out = Vec::new();
    while !rest.is_empty() {
        let mut top = Vec::new();
        let mut below = Vec::new();
        for x in &rest {
            let mut maximal = true;
            for y in &rest {
                if tree.lt(x, y)? {
                    maximal = false;
                    break;
                }
            }
            if maximal {
                top.push(x.clone());
            } else {
                below.push(x.clone());
            }
        }
        out.push(top);
        rest = below;
    }
    Ok(out)
}

/// Strict version: errors at the first point with no nontrivial cone of
/// constancy.
pub fn decompose_locally_constant(tree: &GoodTree, f: &LeafMap) -> Result<FiniteDecomposition, DecomposeError> {
    LeafFn::new(tree, f).decompose()
}

/// Dispatches on the backend of `f`; finite functions need `tree`.
pub fn decompose_fn(
    tree: Option<&GoodTree>,
    field: &crate::puiseux::PuiseuxField,
    f: &PiecewiseFn,
) -> Result<Decomposition, DecomposeError> {
    match f {
        PiecewiseFn::Finite { .. } => {
            let tree = tree.ok_or_else(|| DecomposeError::InvalidInput("finite function needs a tree".into()))?;
            let map = f.to_leaf_map(tree)?;
            Ok(Decomposition::Finite(decompose_locally_constant(tree, &map)?))
        }
        PiecewiseFn::Puiseux { .. } => Ok(Decomposition::Puiseux(puiseux::decompose(field, f)?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite_model::fixture_a;

    const R: NodeId = NodeId(1);
    const U: NodeId = NodeId(2);
    const W: NodeId = NodeId(3);

    #[test]
    fn strata_examples() {
        let t = fixture_a();
        assert_eq!(antichain_strata(&t, &[U, W, R]).unwrap(), vec![vec![U, W], vec![R]]);
        assert_eq!(antichain_strata(&t, &[U, W]).unwrap(), vec![vec![U, W]]);
        assert_eq!(antichain_strata(&t, &[R, U]).unwrap(), vec![vec![U], vec![R]]);
        assert!(antichain_strata(&t, &[]).unwrap().is_empty());
    }

    #[test]
    fn error_codes() {
        let e = DecomposeError::NotLocallyConstant { witness: "4".into() };
        assert_eq!(e.code(), "NOT_LOCALLY_CONSTANT");
        assert_eq!(e.witness().as_deref(), Some("4"));
        let e: DecomposeError = PuiseuxError::PrecisionExhausted(crate::rational::q(3)).into();
        assert_eq!(e.code(), "INSUFFICIENT_PRECISION");
    }
}
