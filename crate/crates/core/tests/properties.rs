//! Property tests over randomly generated trees and maps. Each case draws a
//! seed and builds its inputs from it, so shrinking reports the seed.

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ctree::decompose::{antichain_strata, LeafFn};
use ctree::finite_model::{
    brute_force_locally_constant_partition, random_leaf_map, random_locally_constant_map, CellTag, LeafMap,
};
use ctree::puiseux::{sample, Valuation};
use ctree::rational::q;
use ctree::suite::random_tree;
use ctree::tsets::{decompose_t_subset, is_t_function, t_decompose};
use ctree::{GoodTree, NodeId};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn comparable(t: &GoodTree, a: NodeId, b: NodeId) -> bool {
    t.le_id(a, b).unwrap() || t.le_id(b, a).unwrap()
}

fn is_antichain(t: &GoodTree, s: &[NodeId]) -> bool {
    s.iter().enumerate().all(|(i, &a)| s[i + 1..].iter().all(|&b| !comparable(t, a, b)))
}

fn is_chain(t: &GoodTree, s: &[NodeId]) -> bool {
    s.iter().enumerate().all(|(i, &a)| s[i + 1..].iter().all(|&b| comparable(t, a, b)))
}

/// A random locally constant map. With `on_branch` the values lie on the
/// branch of one leaf, so the image is a chain.
fn locally_constant(seed: u64, leaves: std::ops::RangeInclusive<usize>, on_branch: bool) -> (GoodTree, LeafMap) {
    let mut r = rng(seed);
    let tree = random_tree(&mut r, leaves);
    let pool: Vec<NodeId> = if !on_branch {
        Vec::new()
    } else {
        let leaf = *tree.leaves().choose(&mut r).unwrap();
        tree.branch(leaf).unwrap().into_iter().filter(|&n| n != tree.root()).chain([leaf]).collect()
    };
    let f = random_locally_constant_map(&tree, &pool, &mut r);
    (tree, f)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn strata_partition_into_antichains(seed in any::<u64>(), p in 0.05f64..0.8) {
        let mut r = rng(seed);
        let tree = random_tree(&mut r, 2..=40);
        let s: Vec<NodeId> = tree.nodes().filter(|&n| n != tree.root() && r.gen_bool(p)).collect();
        let strata = antichain_strata(&tree, &s).unwrap();
        let mut seen = BTreeSet::new();
        for layer in &strata {
            prop_assert!(is_antichain(&tree, layer));
            for &x in layer {
                prop_assert!(seen.insert(x), "strata overlap at {x}");
            }
        }
        prop_assert_eq!(seen, s.iter().copied().collect::<BTreeSet<_>>());
        // every element of a later stratum lies below some element of the previous one
        for w in strata.windows(2) {
            for &x in &w[1] {
                prop_assert!(w[0].iter().any(|&y| x != y && tree.le_id(x, y).unwrap()));
            }
        }
    }

    #[test]
    fn decomposition_is_a_tagged_partition(seed in any::<u64>()) {
        let (tree, f) = locally_constant(seed, 2..=30, seed % 2 == 0);
        prop_assume!(!f.is_empty());
        let d = LeafFn::new(&tree, &f).decompose().unwrap();
        let mut covered = BTreeSet::new();
        for cell in &d.cells {
            let points = cell.points.clone().unwrap();
            let mut from_parts = BTreeSet::new();
            for r in &cell.parts {
                from_parts.extend(tree.region_members(r).unwrap());
            }
            prop_assert_eq!(&from_parts, &points.iter().copied().collect::<BTreeSet<_>>());
            for &x in &points {
                prop_assert!(covered.insert(x));
            }
            let image = f.image_of(&points);
            match cell.tag {
                CellTag::Antichain => prop_assert!(is_antichain(&tree, &image)),
                CellTag::Chain => prop_assert!(is_chain(&tree, &image)),
            }
        }
        prop_assert_eq!(covered, f.domain());
    }

    #[test]
    fn decomposition_never_beats_the_oracle(seed in any::<u64>()) {
        let (tree, f) = locally_constant(seed, 2..=8, seed % 2 == 0);
        prop_assume!(!f.is_empty());
        let d = LeafFn::new(&tree, &f).decompose().unwrap();
        let best = brute_force_locally_constant_partition(&tree, &f).unwrap();
        prop_assert!(best.parts.len() <= d.cells.len());
        for (part, tag) in &best.parts {
            let image = f.image_of(part);
            let ok = match tag {
                CellTag::Antichain => is_antichain(&tree, &image),
                CellTag::Chain => is_chain(&tree, &image),
            };
            prop_assert!(ok);
        }
    }

    #[test]
    fn constancy_basis_is_minimal(seed in any::<u64>()) {
        let mut r = rng(seed);
        let tree = random_tree(&mut r, 2..=30);
        let f = random_leaf_map(&tree, &mut r);
        let lf = LeafFn::new(&tree, &f);
        for x in f.domain() {
            let g = lf.constancy_basis(x).unwrap();
            let v = f.get(x).unwrap();
            let cone = tree.leaves_above(tree.child_toward(g, x).unwrap()).unwrap();
            prop_assert!(cone.iter().all(|&y| f.get(y) == Some(v)));
            // one step further down the cone is no longer constant
            if let Some(p) = tree.parent(g).unwrap() {
                let wider = tree.leaves_above(g).unwrap();
                prop_assert!(!wider.iter().all(|&y| f.get(y) == Some(v)), "leaf {x}: basis {g}, parent {p}");
            }
            prop_assert_eq!(lf.is_locally_constant_at(x).unwrap(), cone.len() >= 2);
        }
    }

    #[test]
    fn cone_factoring_reproduces_the_map(seed in any::<u64>()) {
        let mut r = rng(seed);
        let tree = random_tree(&mut r, 3..=30);
        let a = tree.root();
        let children = tree.children(a).unwrap();
        let f = LeafMap(
            tree.leaves()
                .into_iter()
                .map(|x| (x, *children.choose(&mut r).unwrap()))
                .collect(),
        );
        let lf = LeafFn::new(&tree, &f);
        let cf = lf.factor_through_cones(a).unwrap();
        let residual: BTreeSet<NodeId> = cf.residual.points.iter().copied().collect();
        for x in f.domain() {
            if !residual.contains(&x) {
                prop_assert_eq!(lf.eval_cone_factoring(&cf, x).unwrap(), f.get(x));
            }
        }
        prop_assert_eq!(cf.residual_image, f.image_of(&residual));
    }

    #[test]
    fn branch_factoring_reproduces_the_map(seed in any::<u64>()) {
        let (tree, f) = locally_constant(seed, 2..=30, true);
        prop_assume!(!f.is_empty());
        let lf = LeafFn::new(&tree, &f);
        let bf = lf.factor_through_branch(None).unwrap();
        let residual: BTreeSet<NodeId> = bf.residual.points.iter().copied().collect();
        let mut seen = residual.clone();
        for piece in &bf.pieces {
            for &x in &piece.domain.points {
                prop_assert!(seen.insert(x));
                prop_assert_eq!(lf.eval_branch_piece(piece, x).unwrap(), f.get(x));
            }
        }
        prop_assert_eq!(seen, f.domain());
    }

    #[test]
    fn series_valuation_rules(seed in any::<u64>(), k in 0usize..3) {
        let mut r = rng(seed);
        let prec = q([8, 16, 24][k]);
        let x = sample::random_series(&mut r, &prec);
        let y = sample::random_series(&mut r, &prec);
        let (Valuation::Finite(vx), Valuation::Finite(vy)) = (x.val(), y.val()) else {
            return Err(TestCaseError::fail("random series must be non-zero"));
        };
        prop_assert_eq!((&x * &y).val(), Valuation::Finite(&vx + &vy));
        let sum = (&x + &y).val();
        if vx != vy {
            prop_assert_eq!(sum, Valuation::Finite(vx.clone().min(vy.clone())));
        } else {
            prop_assert!(sum.bound() >= &vx);
        }
        prop_assert_eq!(&(&x + &y) - &y, x.truncate((&x + &y).precision()));
        prop_assert!((&x - &x).is_zero());
    }

    #[test]
    fn t_subset_cells_partition_the_set(seed in any::<u64>(), p in 0.0f64..1.0) {
        let mut r = rng(seed);
        let tree = random_tree(&mut r, 2..=40);
        let x: BTreeSet<NodeId> = tree.inner_nodes().into_iter().filter(|_| r.gen_bool(p)).collect();
        let cells = decompose_t_subset(&tree, &x).unwrap();
        let mut union = BTreeSet::new();
        for c in &cells {
            prop_assert!(c.check(&tree).is_ok(), "{:?}", c.check(&tree));
            for n in c.extension(&tree).unwrap() {
                prop_assert!(union.insert(n), "node {n} in two cells");
            }
        }
        prop_assert_eq!(union, x);
    }

    #[test]
    fn t_decompose_parts_are_t_functions(seed in any::<u64>()) {
        let (tree, f) = locally_constant(seed, 2..=12, seed % 2 == 0);
        prop_assume!(!f.is_empty());
        let parts = t_decompose(&tree, &f).unwrap();
        let mut union = BTreeSet::new();
        for part in &parts {
            prop_assert!(is_t_function(&tree, &f.restrict(part)).unwrap());
            for &x in part {
                prop_assert!(union.insert(x));
            }
        }
        prop_assert_eq!(union, f.domain());
    }
}
