//! Seeded end-to-end checks of every algorithm, shared by the acceptance
//! test and the `suite` command. Reports carry no timings, so the same
//! configuration always serializes to the same bytes.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Display;

use crate::decompose::puiseux::{
    evaluate, factor_through_branch, in_domain, inf_with_branch, residue_normal_form, value_group_normal_form, Band,
};
use crate::decompose::{
    antichain_strata, ConstValue, LeafFn, MonotoneSegment, Piece, PiecewiseFn, PiecewiseMonotoneMap, PuiseuxExpr,
    RationalInterval, ResidueMap, SegmentMap, Value,
};
use crate::finite_model::{
    brute_force_locally_constant_partition, fixture_a, generate_good_tree, random_leaf_map,
    random_locally_constant_map, CellTag, LeafMap, TreeGenParams,
};
use crate::puiseux::{sample, Ball, PNode, PuiseuxField, Series, Valuation};
use crate::rational::{q, qf, Q};
use crate::tree::ops::c_relation;
use crate::tree::region::region_contains;
use crate::tree::{check_c_axioms, check_c_axioms_sampled, CTree, GoodTree, NodeId, Region};
use crate::tsets::{decompose_t_subset, minimal_upper_antichain};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    /// The sizes of the acceptance criteria.
    Full,
    /// About a twentieth of the work, for smoke tests.
    Quick,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub seed: u64,
    pub scale: Scale,
}

impl SuiteConfig {
    pub fn new(seed: u64, scale: Scale) -> Self {
        SuiteConfig { seed, scale }
    }

    fn n(&self, full: usize) -> usize {
        match self.scale {
            Scale::Full => full,
            Scale::Quick => (full / 20).max(3),
        }
    }

    fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ salt)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    pub cases: usize,
    pub checks: u64,
    /// The first few failures.
    pub failures: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub stats: BTreeMap<String, i64>,
}

struct Tally {
    report: CriterionReport,
    failed: usize,
}

impl Tally {
    fn new(id: u8, name: &str) -> Self {
        Tally {
            report: CriterionReport {
                id,
                name: name.to_string(),
                passed: false,
                cases: 0,
                checks: 0,
                failures: Vec::new(),
                stats: BTreeMap::new(),
            },
            failed: 0,
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.report.checks += 1;
        if !ok {
            self.fail(what());
        }
    }

    fn fail(&mut self, msg: String) {
        self.failed += 1;
        if self.report.failures.len() < 5 {
            self.report.failures.push(msg);
        }
    }

    /// Unwraps or records the error as a failure.
    fn ok<T, E: Display>(&mut self, r: Result<T, E>, ctx: impl FnOnce() -> String) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.report.checks += 1;
                self.fail(format!("{}: {e}", ctx()));
                None
            }
        }
    }

    fn stat(&mut self, key: &str, v: i64) {
        *self.report.stats.entry(key.to_string()).or_insert(0) += v;
    }

    fn stat_max(&mut self, key: &str, v: i64) {
        let e = self.report.stats.entry(key.to_string()).or_insert(v);
        *e = (*e).max(v);
    }

    fn finish(mut self) -> CriterionReport {
        self.report.passed = self.failed == 0 && self.report.checks > 0;
        self.report
    }
}

/// A seeded random good tree with a leaf count in `leaves`. Real nodes stay
/// below `2 * max_leaves`.
pub fn random_tree<R: Rng>(rng: &mut R, leaves: std::ops::RangeInclusive<usize>) -> GoodTree {
    let n = rng.gen_range(leaves);
    let hi = rng.gen_range(2..=5usize);
    let mut depth = 1;
    while hi.pow(depth as u32) < n {
        depth += 1;
    }
    depth += rng.gen_range(0..=3);
    generate_good_tree(&TreeGenParams::new(depth, (2, hi), n, rng.gen())).expect("satisfiable parameters")
}

fn pairwise(tree: &GoodTree, set: &[NodeId], want_comparable: bool) -> bool {
    set.iter().enumerate().all(|(i, a)| {
        set[i + 1..].iter().all(|b| {
            let c = tree.le_id(*a, *b).unwrap_or(false) || tree.le_id(*b, *a).unwrap_or(false);
            c == want_comparable
        })
    })
}

pub fn axiom_suite(cfg: &SuiteConfig) -> CriterionReport {
    let mut t = Tally::new(1, "axiom suite");
    let mut rng = cfg.rng(1);
    for i in 0..cfg.n(1000) {
        let tree = if i % 2 == 0 { random_tree(&mut rng, 1..=12) } else { random_tree(&mut rng, 13..=100) };
        t.report.cases += 1;
        t.check(tree.len() <= 200, || format!("tree {i} has {} nodes", tree.len()));
        let exhaustive = tree.leaves().len() <= 12;
        let report = if exhaustive { check_c_axioms(&tree) } else { check_c_axioms_sampled(&tree, 4000, &mut rng) };
        let Some(report) = t.ok(report, || format!("tree {i}")) else {
            continue;
        };
        t.stat("exhaustive", i64::from(exhaustive));
        t.check(report.is_c_set(), || {
            let bad: Vec<_> = report.results.iter().filter(|r| !r.holds).map(|r| format!("{:?}", r.axiom)).collect();
            format!("tree {i} fails {bad:?}")
        });
    }
    t.finish()
}

pub fn identity_suite(cfg: &SuiteConfig) -> CriterionReport {
    let mut t = Tally::new(2, "cone and level-set identities");
    let mut rng = cfg.rng(2);
    let mut trees = vec![fixture_a()];
    trees.extend((0..cfg.n(200)).map(|_| random_tree(&mut rng, 1..=12)));
    for (i, tree) in trees.iter().enumerate() {
        t.report.cases += 1;
        let leaves = tree.leaves();
        for &a in &leaves {
            for &b in &leaves {
                let Some(m) = t.ok(tree.inf_id(a, b), || format!("tree {i}")) else {
                    continue;
                };
                let cone = Region::cone(m, a);
                let level = Region::level_set(m, vec![]);
                for &x in &leaves {
                    if a != b {
                        let lhs = region_contains(tree, &cone, &x);
                        let rhs = c_relation(tree, &b, &x, &a);
                        t.check(matches!((&lhs, &rhs), (Ok(l), Ok(r)) if l == r), || {
                            format!("tree {i}: cone identity at ({a}, {b}, {x}): {lhs:?} vs {rhs:?}")
                        });
                    }
                    let lhs = region_contains(tree, &level, &x);
                    let rhs = c_relation(tree, &x, &a, &b).map(|c| !c);
                    t.check(matches!((&lhs, &rhs), (Ok(l), Ok(r)) if l == r), || {
                        format!("tree {i}: level identity at ({a}, {b}, {x}): {lhs:?} vs {rhs:?}")
                    });
                }
            }
        }
    }
    t.finish()
}

pub fn strata_suite(cfg: &SuiteConfig) -> CriterionReport {
    let mut t = Tally::new(3, "antichain strata");
    let mut rng = cfg.rng(3);
    for i in 0..cfg.n(500) {
        let tree = random_tree(&mut rng, 2..=100);
        let p: f64 = rng.gen_range(0.05..0.7);
        let s: Vec<NodeId> = tree.nodes().filter(|&n| n != tree.root() && rng.gen_bool(p)).collect();
        t.report.cases += 1;
        let Some(strata) = t.ok(antichain_strata(&tree, &s), || format!("set {i}")) else {
            continue;
        };
        let mut seen = BTreeSet::new();
        let mut disjoint = true;
        for layer in &strata {
            t.check(pairwise(&tree, layer, false), || format!("set {i}: a stratum is not an antichain"));
            for x in layer {
                disjoint &= seen.insert(*x);
            }
        }
        t.check(disjoint, || format!("set {i}: strata overlap"));
        t.check(seen == s.iter().copied().collect(), || format!("set {i}: strata do not cover the input"));
        t.check(strata.len() <= tree.height(), || {
            format!("set {i}: {} strata, height {}", strata.len(), tree.height())
        });
        // X_0 is the set of maximal elements and the rest recurses
        if let Some(top) = strata.first() {
            let maximal: Vec<NodeId> = s
                .iter()
                .copied()
                .filter(|&x| !s.iter().any(|&y| x != y && tree.le_id(x, y).unwrap_or(false)))
                .collect();
            let mut top_sorted = top.clone();
            top_sorted.sort();
            t.check(top_sorted == maximal, || format!("set {i}: first stratum is not the maximal set"));
            let rest: Vec<NodeId> = s.iter().copied().filter(|x| !top.contains(x)).collect();
            let again = antichain_strata(&tree, &rest);
            t.check(again.as_ref().is_ok_and(|a| a[..] == strata[1..]), || {
                format!("set {i}: recursion fixpoint fails")
            });
        }
        t.stat_max("max_strata", strata.len() as i64);
    }
    t.finish()
}

pub fn decomposition_suite(cfg: &SuiteConfig) -> CriterionReport {
    let mut t = Tally::new(4, "locally constant decomposition");
    let mut rng = cfg.rng(4);
    for i in 0..cfg.n(200) {
        let tree = random_tree(&mut rng, 2..=8);
        let noisy = {
            // a uniform map cut down to its locally constant points
            let f = random_leaf_map(&tree, &mut rng);
            let keep =
                LeafFn::new(&tree, &f).exceptional_points().map(|e| f.domain().difference(&e).copied().collect());
            keep.map(|k| f.restrict(&k)).unwrap_or_default()
        };
        if !noisy.is_empty() && LeafFn::new(&tree, &noisy).exceptional_points().is_ok_and(|e| e.is_empty()) {
            t.report.cases += 1;
            t.stat("noisy_maps", 1);
            check_decomposition(&mut t, &tree, &noisy, &format!("tree {i} noisy map"));
        }
        for j in 0..2 {
            // half of the maps take values on one branch, so chains occur
            let pool: Vec<NodeId> = if j == 0 {
                Vec::new()
            } else {
                let leaf = *tree.leaves().choose(&mut rng).expect("leaves");
                let mut b = tree.branch(leaf).expect("leaf");
                b.retain(|&n| n != tree.root());
                b.push(leaf);
                b
            };
            let f = random_locally_constant_map(&tree, &pool, &mut rng);
            if f.is_empty() {
                continue;
            }
            t.report.cases += 1;
            check_decomposition(&mut t, &tree, &f, &format!("tree {i} map {j}"));
        }
    }
    t.finish()
}

fn check_decomposition(t: &mut Tally, tree: &GoodTree, f: &LeafMap, ctx: &str) {
    let lf = LeafFn::new(tree, f);
    let Some(d) = t.ok(lf.decompose(), || ctx.to_string()) else {
        return;
    };
    t.check(d.exceptional.is_empty(), || format!("{ctx}: exceptional points {:?}", d.exceptional));
    let mut covered = BTreeSet::new();
    let mut disjoint = true;
    for cell in &d.cells {
        let points: Vec<NodeId> = cell.points.clone().unwrap_or_default();
        for &x in &points {
            disjoint &= covered.insert(x);
        }
        let mut from_parts = BTreeSet::new();
        for r in &cell.parts {
            if let Ok(m) = tree.region_members(r) {
                from_parts.extend(m);
            }
        }
        t.check(from_parts == points.iter().copied().collect(), || format!("{ctx}: parts and points disagree"));
        let image = f.image_of(&points);
        t.check(cell.image.as_ref() == Some(&image), || format!("{ctx}: reported image is wrong"));
        let ok = match cell.tag {
            CellTag::Antichain => pairwise(tree, &image, false),
            CellTag::Chain => pairwise(tree, &image, true),
        };
        t.check(ok, || format!("{ctx}: image {image:?} is not a {:?}", cell.tag));
    }
    t.check(disjoint, || format!("{ctx}: cells overlap"));
    t.check(covered == f.domain(), || format!("{ctx}: cells do not cover the domain"));

    let Some(oracle) = t.ok(brute_force_locally_constant_partition(tree, f), || format!("{ctx}: oracle")) else {
        return;
    };
    let shapes: BTreeSet<_> = f.domain().into_iter().filter_map(|x| lf.fiber_shape(x).ok().map(|s| s.key())).collect();
    let (alg, best) = (d.cells.len() as i64, oracle.parts.len() as i64);
    t.check(best >= alg - shapes.len() as i64, || {
        format!("{ctx}: {alg} cells, optimum {best}, {} shapes", shapes.len())
    });
    t.check(best <= alg, || format!("{ctx}: optimum {best} beats a valid partition of {alg}?"));
    t.stat("cells", alg);
    t.stat("optimum", best);
    t.stat("optimal_cases", i64::from(alg == best));
    t.stat_max("max_excess", alg - best);
}

/// `f(x) = h(inf(x, Br(delta)))` with `h` into the branch of another leaf.
fn constructed_branch_map<R: Rng>(rng: &mut R, tree: &GoodTree) -> (LeafMap, Vec<NodeId>) {
    let leaves = tree.leaves();
    let delta = *leaves.choose(rng).expect("leaves");
    let gamma = *leaves.choose(rng).expect("leaves");
    let chain: Vec<NodeId> =
        tree.strictly_below(gamma).expect("leaf").into_iter().filter(|&n| n != tree.root()).collect();
    let table: BTreeMap<NodeId, NodeId> = tree
        .strictly_below(delta)
        .expect("leaf")
        .into_iter()
        .map(|b| (b, *chain.choose(rng).expect("a leaf of a tree with two leaves has a real node below")))
        .collect();
    let mut f = LeafMap::default();
    for &x in &leaves {
        let b = if x == delta { tree.parent(x).unwrap().unwrap() } else { tree.inf_id(x, delta).unwrap() };
        f.0.insert(x, table[&b]);
    }
    (f, chain)
}

fn vdiff_fn(beta: Series, post: PiecewiseMonotoneMap) -> PiecewiseFn {
    PiecewiseFn::Puiseux {
        pieces: vec![Piece { domain: Region::Whole, expr: PuiseuxExpr::Vdiff { beta, post, branch: None } }],
    }
}

/// Monotone segments cut at up to three points; the top segment is constant
/// so radii stay below the working precision.
fn random_post<R: Rng>(rng: &mut R) -> PiecewiseMonotoneMap {
    let mut cuts: BTreeSet<i64> = (0..rng.gen_range(0..=2)).map(|_| rng.gen_range(-2..=4)).collect();
    cuts.insert(rng.gen_range(1..=5));
    let cuts: Vec<Q> = cuts.into_iter().map(q).collect();
    let slopes = [q(1), q(2), qf(1, 2), q(-1), qf(-1, 2)];
    let mut segments = Vec::new();
    let mut lo: Option<Q> = None;
    for c in cuts.iter().chain(std::iter::once(&q(i64::MAX))) {
        let last = *c == q(i64::MAX);
        let interval = RationalInterval {
            lo: lo.clone(),
            lo_closed: lo.is_some(),
            hi: (!last).then(|| c.clone()),
            hi_closed: false,
        };
        let map = if last || rng.gen_bool(0.25) {
            SegmentMap::Const { value: q(rng.gen_range(-3..=3)) }
        } else {
            SegmentMap::Affine { u: slopes.choose(rng).unwrap().clone(), v: q(rng.gen_range(-2..=2)) }
        };
        segments.push(MonotoneSegment { interval, map });
        lo = Some(c.clone());
    }
    PiecewiseMonotoneMap { segments }
}

fn same_node(field: &PuiseuxField, a: &Value, b: &PNode) -> bool {
    matches!(a, Value::Node(n) if field.same(n, b).unwrap_or(false))
}

pub fn branch_factoring_suite(cfg: &SuiteConfig) -> CriterionReport {
    let mut t = Tally::new(5, "branch factoring");
    let mut rng = cfg.rng(5);
    for i in 0..cfg.n(100) {
        let tree = random_tree(&mut rng, 2..=40);
        let (f, chain) = constructed_branch_map(&mut rng, &tree);
        t.report.cases += 1;
        let lf = LeafFn::new(&tree, &f);
        let Some(bf) = t.ok(lf.factor_through_branch(Some(&chain)), || format!("finite {i}")) else {
            continue;
        };
        let mut covered: BTreeSet<NodeId> = bf.residual.points.iter().copied().collect();
        let mut disjoint = true;
        for p in &bf.pieces {
            for &x in &p.domain.points {
                disjoint &= covered.insert(x);
                let got = lf.eval_branch_piece(p, x);
                t.check(matches!(got, Ok(Some(v)) if Some(v) == f.get(x)), || {
                    format!("finite {i}: piece disagrees at {x}")
                });
            }
        }
        t.check(disjoint && covered == f.domain(), || format!("finite {i}: pieces and residual do not partition"));
        t.check(bf.residual_image == f.image_of(&bf.residual.points), || format!("finite {i}: residual image"));
        t.stat("finite_pieces", bf.pieces.len() as i64);
    }

    let field = PuiseuxField::default();
    for i in 0..cfg.n(20) {
        let beta = sample::random_series(&mut rng, &field.precision);
        let f = vdiff_fn(beta, random_post(&mut rng));
        t.report.cases += 1;
        let Some(bf) = t.ok(factor_through_branch(&field, &f), || format!("puiseux {i}")) else {
            continue;
        };
        t.check(bf.residual_image.len() <= bf.residual.len(), || format!("puiseux {i}: residual image is not finite"));
        let bands: Vec<(&Band, Option<usize>)> = bf
            .pieces
            .iter()
            .enumerate()
            .map(|(k, p)| (&p.domain, Some(k)))
            .chain(bf.residual.iter().map(|b| (b, None)))
            .collect();
        for j in 0..cfg.n(1000) {
            let (band, piece) = bands[j % bands.len()];
            let Some(x) = t.ok(band.sample(&mut rng, &field), || format!("puiseux {i}: sampling")).flatten() else {
                continue;
            };
            let Some(fx) = t.ok(evaluate(&field, &f, &x, false), || format!("puiseux {i}: f({x})")) else {
                continue;
            };
            match piece {
                Some(k) => {
                    let p = &bf.pieces[k];
                    let got = inf_with_branch(&x, &p.beta).and_then(|b| p.apply(&b));
                    t.check(matches!(&got, Ok(n) if same_node(&field, &fx, n)), || {
                        format!("puiseux {i}: piece {k} at {x}")
                    });
                }
                None => t.check(bf.residual_image.iter().any(|n| same_node(&field, &fx, n)), || {
                    format!("puiseux {i}: residual value {fx} not listed")
                }),
            }
        }
    }
    t.finish()
}

pub fn value_group_suite(cfg: &SuiteConfig) -> CriterionReport {
    let mut t = Tally::new(6, "value-group normal form");
    let mut rng = cfg.rng(6);
    let field = PuiseuxField::default();
    let prec = field.precision.clone();
    for i in 0..cfg.n(50) {
        let beta = sample::random_series(&mut rng, &prec);
        let f = vdiff_fn(beta.clone(), random_post(&mut rng));
        t.report.cases += 1;
        let Some(nf) = t.ok(value_group_normal_form(&field, &f), || format!("function {i}")) else {
            continue;
        };
        // {f = a} inside a cell is the sphere {v(x - beta) = a'}
        for _ in 0..cfg.n(1000) {
            let s = Q::from_integer(rng.gen_range(-12..=24).into()) / q(4);
            let x = sample::point_at_distance(&mut rng, &beta, &s, &prec);
            let Some(inside) = t.ok(in_domain(&field, &f, &x), || format!("function {i}")) else {
                continue;
            };
            if !inside {
                continue;
            }
            let Some(Value::Rational(a)) = t.ok(evaluate(&field, &f, &x, true), || format!("function {i}")) else {
                continue;
            };
            if nf.finite.contains(&a) {
                t.stat("in_finite_set", 1);
                continue;
            }
            let cells: Vec<_> = nf.cells.iter().filter(|c| c.domain.contains(&field, &x).unwrap_or(false)).collect();
            t.check(cells.len() == 1, || format!("function {i}: {x} lies in {} cells", cells.len()));
            for c in cells {
                let d = (&x - &c.beta).val();
                t.check(d == Valuation::Finite(c.fiber_radius(&a)), || format!("function {i}: fiber of {a} at {x}"));
            }
        }
        for (k, c) in nf.cells.iter().enumerate() {
            for _ in 0..cfg.n(1000) / nf.cells.len() {
                let s = c.domain.band.as_ref().expect("cells carry a band").sample(&mut rng);
                let a = &c.u * &s + &c.v;
                let r = c.fiber_radius(&a);
                let x = sample::point_at_distance(&mut rng, &c.beta, &r, &prec);
                if !c.domain.contains(&field, &x).unwrap_or(false) {
                    continue;
                }
                let fx = t.ok(evaluate(&field, &f, &x, true), || format!("function {i}"));
                t.check(fx == Some(Value::Rational(a.clone())), || {
                    format!("function {i}: cell {k}, f = {a} on the sphere {r}")
                });
            }
        }
    }
    t.finish()
}

fn random_residue_map<R: Rng>(rng: &mut R) -> ResidueMap {
    let nz = |rng: &mut R| q(if rng.gen_bool(0.5) { rng.gen_range(1..=4) } else { -rng.gen_range(1..=4) });
    match rng.gen_range(0..3) {
        0 => ResidueMap::identity(),
        1 => ResidueMap::affine(nz(rng), q(rng.gen_range(-3..=3))),
        _ => ResidueMap::Rational {
            num: vec![q(rng.gen_range(-3..=3)), nz(rng), q(rng.gen_range(-2..=2))],
            den: vec![q(1), q(0), q(1)],
        },
    }
}

pub fn residue_suite(cfg: &SuiteConfig) -> CriterionReport {
    let mut t = Tally::new(7, "residue normal form");
    let mut rng = cfg.rng(7);
    let field = PuiseuxField::default();
    let prec = field.precision.clone();
    for i in 0..cfg.n(50) {
        let alpha = sample::random_series(&mut rng, &prec);
        let t0 = Q::from_integer(rng.gen_range(-4..=8).into()) / q(2);
        let diff = &Series::monomial(sample::coefficient(&mut rng), t0.clone(), prec.clone())
            + &sample::terms_above(&mut rng, &t0, &prec, 2);
        let beta = &alpha - &diff;
        let ball = Ball::new(alpha.clone(), t0.clone()).expect("radius below precision");
        let removed = if rng.gen_bool(0.5) {
            let k = q(rng.gen_range(-3..=3));
            vec![PNode::Leaf(sample::point_in_cone(&mut rng, &ball, &k, &prec))]
        } else {
            vec![]
        };
        let mut pieces = vec![Piece {
            domain: Region::level_set(PNode::Ball(ball.clone()), removed),
            expr: PuiseuxExpr::Resaffine { alpha: alpha.clone(), beta, h: random_residue_map(&mut rng) },
        }];
        if rng.gen_bool(0.5) {
            let far = &alpha + &Series::monomial(q(1), &t0 - q(1), prec.clone());
            pieces.push(Piece {
                domain: Region::level_set(PNode::ball(far, t0.clone()).unwrap(), vec![]),
                expr: PuiseuxExpr::Const { value: ConstValue::Rational(q(rng.gen_range(-5..=5))) },
            });
        }
        let f = PiecewiseFn::Puiseux { pieces: pieces.clone() };
        t.report.cases += 1;
        let Some(nf) = t.ok(residue_normal_form(&field, &f), || format!("function {i}")) else {
            continue;
        };
        for j in 0..cfg.n(1000) {
            let piece = &pieces[j % pieces.len()];
            let Some(x) =
                t.ok(Band::whole_of(&piece.domain).sample(&mut rng, &field), || format!("function {i}")).flatten()
            else {
                continue;
            };
            let Some(Value::Rational(fx)) = t.ok(evaluate(&field, &f, &x, true), || format!("function {i}")) else {
                continue;
            };
            if matches!(piece.expr, PuiseuxExpr::Const { .. }) {
                t.check(nf.finite.contains(&fx), || format!("function {i}: constant {fx} missing from F"));
                continue;
            }
            let owners: Vec<_> =
                nf.entries.iter().filter(|e| e.ball().is_ok_and(|b| b.contains(&x).unwrap_or(false))).collect();
            t.check(!owners.is_empty(), || format!("function {i}: {x} is outside every ball"));
            for e in owners {
                t.check(e.eval(&x).ok() == Some(fx.clone()), || format!("function {i}: identity fails at {x}"));
                // g_i: the representative of the cone of x has the same value
                let rep = e.reduced(&x).map(|u| e.cone_representative(&u));
                t.check(rep.and_then(|y| e.eval(&y)).ok() == Some(fx.clone()), || {
                    format!("function {i}: cone representative at {x}")
                });
            }
        }
    }
    t.finish()
}

pub fn series_suite(cfg: &SuiteConfig) -> CriterionReport {
    let mut t = Tally::new(8, "Puiseux arithmetic");
    let mut rng = cfg.rng(8);
    for i in 0..cfg.n(10_000) {
        let prec = q([8, 16, 24][i % 3]);
        let x = sample::random_series(&mut rng, &prec);
        let y = sample::random_series(&mut rng, &prec);
        t.report.cases += 1;
        let (Valuation::Finite(vx), Valuation::Finite(vy)) = (x.val(), y.val()) else {
            t.fail(format!("pair {i}: random series should be non-zero"));
            continue;
        };
        t.check((&x * &y).val() == Valuation::Finite(&vx + &vy), || format!("pair {i}: v(xy) for {x} and {y}"));
        let m = (&vx).min(&vy).clone();
        let s = (&x + &y).val();
        if vx != vy {
            t.check(s == Valuation::Finite(m.clone()), || format!("pair {i}: v(x + y) = min fails"));
        } else {
            t.check(s.bound() >= &m, || format!("pair {i}: ultrametric inequality fails"));
        }
        match (&x * &y).div(&y) {
            Ok(z) => {
                t.check(z.precision() > &vx && z == x.truncate(z.precision()), || {
                    format!("pair {i}: (xy)/y = {z}, x = {x}")
                });
            }
            Err(e) => t.fail(format!("pair {i}: {e}")),
        }
        let x2 = x.clone();
        t.check((&x - &x2).is_zero(), || format!("pair {i}: x - x"));
    }
    t.finish()
}

pub fn t_subset_suite(cfg: &SuiteConfig) -> CriterionReport {
    let mut t = Tally::new(9, "decomposition of subsets of T");
    let mut rng = cfg.rng(9);
    for i in 0..cfg.n(1000) {
        let tree = random_tree(&mut rng, 2..=100);
        let p: f64 = rng.gen_range(0.0..1.0);
        let x: BTreeSet<NodeId> = tree.inner_nodes().into_iter().filter(|_| rng.gen_bool(p)).collect();
        t.report.cases += 1;
        if let Some(a) = t.ok(minimal_upper_antichain(&tree, &x), || format!("set {i}")) {
            t.check(pairwise(&tree, &a, false), || format!("set {i}: upper antichain is not an antichain"));
            t.check(x.iter().all(|&n| a.iter().any(|&b| n != b && tree.le_id(n, b).unwrap_or(false))), || {
                format!("set {i}: a node has nothing of the antichain above it")
            });
        }
        let Some(cells) = t.ok(decompose_t_subset(&tree, &x), || format!("set {i}")) else {
            continue;
        };
        let mut union = BTreeSet::new();
        let mut disjoint = true;
        for c in &cells {
            let check = c.check(&tree);
            t.check(check.is_ok(), || format!("set {i}: {}", check.unwrap_err()));
            if let Some(ext) = t.ok(c.extension(&tree), || format!("set {i}")) {
                for n in ext {
                    disjoint &= union.insert(n);
                }
            }
        }
        t.check(disjoint, || format!("set {i}: cells overlap"));
        t.check(union == x, || format!("set {i}: union of cells differs from X"));
        t.stat("cells", cells.len() as i64);
    }
    t.finish()
}

/// Criteria 1 to 9 in order.
pub fn run_all(cfg: &SuiteConfig) -> Vec<CriterionReport> {
    CRITERIA.iter().map(|(_, run)| run(cfg)).collect()
}

pub type CriterionFn = fn(&SuiteConfig) -> CriterionReport;

pub const CRITERIA: [(u8, CriterionFn); 9] = [
    (1, axiom_suite),
    (2, identity_suite),
    (3, strata_suite),
    (4, decomposition_suite),
    (5, branch_factoring_suite),
    (6, value_group_suite),
    (7, residue_suite),
    (8, series_suite),
    (9, t_subset_suite),
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_suite_passes_and_is_deterministic() {
        let cfg = SuiteConfig::new(11, Scale::Quick);
        let a = run_all(&cfg);
        for r in &a {
            assert!(r.passed, "{r:?}");
        }
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&run_all(&cfg)).unwrap());
    }
}
