use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{GoodTree, NodeId, TreeError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axiom {
    C1,
    C2,
    C3,
    C4,
    D,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomResult {
    pub axiom: Axiom,
    pub holds: bool,
    /// Leaf tuple falsifying the axiom.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<NodeId>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub exhaustive: bool,
    pub results: Vec<AxiomResult>,
}

impl AxiomReport {
    pub fn get(&self, axiom: Axiom) -> &AxiomResult {
        self.results.iter().find(|r| r.axiom == axiom).expect("every axiom is reported")
    }

    /// C1 through C4.
    pub fn is_c_set(&self) -> bool {
        self.results.iter().filter(|r| r.axiom != Axiom::D).all(|r| r.holds)
    }
}

/// Depth of `inf(x, y)` for every pair of leaves; the derived relation is
/// `C(x, y, z) <=> depth(inf(y, z)) > depth(inf(x, y))`.
struct LeafMetric {
    leaves: Vec<NodeId>,
    depth: Vec<usize>,
}

impl LeafMetric {
    fn new(tree: &GoodTree) -> Result<Self, TreeError> {
        let leaves = tree.leaves();
        let n = leaves.len();
        let mut depth = vec![0; n * n];
        for i in 0..n {
            for j in i..n {
                let d = tree.depth(tree.inf_id(leaves[i], leaves[j])?)?;
                depth[i * n + j] = d;
                depth[j * n + i] = d;
            }
        }
        Ok(LeafMetric { leaves, depth })
    }

    fn n(&self) -> usize {
        self.leaves.len()
    }

    fn c(&self, x: usize, y: usize, z: usize) -> bool {
        let n = self.n();
        self.depth[y * n + z] > self.depth[x * n + y]
    }

    fn ids(&self, idx: &[usize]) -> Vec<NodeId> {
        idx.iter().map(|&i| self.leaves[i]).collect()
    }
}

fn c1(m: &LeafMetric, x: usize, y: usize, z: usize) -> bool {
    !m.c(x, y, z) || m.c(x, z, y)
}

fn c2(m: &LeafMetric, x: usize, y: usize, z: usize) -> bool {
    !m.c(x, y, z) || !m.c(y, x, z)
}

fn c3(m: &LeafMetric, x: usize, y: usize, z: usize, w: usize) -> bool {
    !m.c(x, y, z) || m.c(w, y, z) || m.c(x, w, z)
}

fn c4(m: &LeafMetric, x: usize, y: usize) -> bool {
    x == y || m.c(x, y, y)
}

/// Density fails on every finite model; the search still returns a witness.
fn check_d(m: &LeafMetric) -> AxiomResult {
    let n = m.n();
    let fail = |witness: Option<Vec<NodeId>>, why: &str| AxiomResult {
        axiom: Axiom::D,
        holds: false,
        witness,
        note: Some(format!("fails (finite model): {why}")),
    };
    if n < 2 {
        return fail(None, "fewer than two points");
    }
    for x in 0..n {
        for y in 0..n {
            if x == y {
                continue;
            }
            if !(0..n).any(|z| z != y && m.c(x, y, z)) {
                return fail(Some(m.ids(&[x, y])), "no z closer to y than x is");
            }
        }
    }
    AxiomResult { axiom: Axiom::D, holds: true, witness: None, note: None }
}

fn result(axiom: Axiom, witness: Option<Vec<NodeId>>) -> AxiomResult {
    AxiomResult { axiom, holds: witness.is_none(), witness, note: None }
}

/// Exhaustive check of C1-C4 over all leaf triples and quadruples, plus D.
pub fn check_c_axioms(tree: &GoodTree) -> Result<AxiomReport, TreeError> {
    let m = LeafMetric::new(tree)?;
    let n = m.n();
    let (mut w1, mut w2, mut w3, mut w4) = (None, None, None, None);
    for x in 0..n {
        for y in 0..n {
            if w4.is_none() && !c4(&m, x, y) {
                w4 = Some(m.ids(&[x, y]));
            }
            for z in 0..n {
                if w1.is_none() && !c1(&m, x, y, z) {
                    w1 = Some(m.ids(&[x, y, z]));
                }
                if w2.is_none() && !c2(&m, x, y, z) {
                    w2 = Some(m.ids(&[x, y, z]));
                }
                if w3.is_none() && m.c(x, y, z) {
                    for w in 0..n {
                        if !c3(&m, x, y, z, w) {
                            w3 = Some(m.ids(&[x, y, z, w]));
                            break;
                        }
                    }
                }
            }
        }
    }
    Ok(AxiomReport {
        exhaustive: true,
        results: vec![
            result(Axiom::C1, w1),
            result(Axiom::C2, w2),
            result(Axiom::C3, w3),
            result(Axiom::C4, w4),
            check_d(&m),
        ],
    })
}

/// Randomized check for large trees: `samples` random tuples per axiom.
pub fn check_c_axioms_sampled<R: Rng>(tree: &GoodTree, samples: usize, rng: &mut R) -> Result<AxiomReport, TreeError> {
    let m = LeafMetric::new(tree)?;
    let n = m.n();
    let (mut w1, mut w2, mut w3, mut w4) = (None, None, None, None);
    for _ in 0..samples {
        let (x, y, z, w) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
        if w1.is_none() && !c1(&m, x, y, z) {
            w1 = Some(m.ids(&[x, y, z]));
        }
        if w2.is_none() && !c2(&m, x, y, z) {
            w2 = Some(m.ids(&[x, y, z]));
        }
        if w3.is_none() && !c3(&m, x, y, z, w) {
            w3 = Some(m.ids(&[x, y, z, w]));
        }
        if w4.is_none() && !c4(&m, x, y) {
            w4 = Some(m.ids(&[x, y]));
        }
    }
    Ok(AxiomReport {
        exhaustive: false,
        results: vec![
            result(Axiom::C1, w1),
            result(Axiom::C2, w2),
            result(Axiom::C3, w3),
            result(Axiom::C4, w4),
            check_d(&m),
        ],
    })
}
