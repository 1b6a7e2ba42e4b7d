use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use ctree::decompose::{self, puiseux, DecomposeError, LeafFn, PiecewiseFn};
use ctree::finite_model::{generate_good_tree, TreeGenParams};
use ctree::puiseux::{Ball, PuiseuxField};
use ctree::suite::{self, Scale, SuiteConfig};
use ctree::tree::{check_c_axioms, check_c_axioms_sampled, to_dot};
use ctree::{tsets, GoodTree, NodeId};
use rand::SeedableRng;

#[derive(Parser)]
#[command(name = "ctree", version, about = "Canonical trees of C-sets: decompositions, normal forms and checks")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Working precision of the Puiseux backend, as a rational.
    #[arg(long, global = true, default_value = "16")]
    precision: String,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
}

#[derive(Subcommand)]
enum Command {
    /// Check C1-C4 and density on the leaves of a tree.
    AxiomsCheck {
        #[arg(long)]
        tree: PathBuf,
        /// Sample this many tuples per axiom instead of checking all of them.
        #[arg(long)]
        sampled: Option<usize>,
    },
    /// Generate a seeded random good tree.
    GenTree {
        #[arg(long, default_value_t = 8)]
        leaves: usize,
        #[arg(long, default_value_t = 4)]
        max_depth: usize,
        /// Branching range as `min,max`.
        #[arg(long, default_value = "2,3")]
        branching: String,
    },
    /// Decompose a locally constant function into antichain and chain cells.
    DecomposeFn {
        #[arg(long)]
        tree: Option<PathBuf>,
        #[arg(long = "fn")]
        func: PathBuf,
    },
    /// Factor a function with chain image through branches.
    FactorBranch {
        #[arg(long)]
        tree: Option<PathBuf>,
        #[arg(long = "fn")]
        func: PathBuf,
        /// Finite backend: the chain holding the image, as comma separated ids.
        #[arg(long)]
        chain: Option<String>,
    },
    /// Factor a cone-valued function through cones at an antichain.
    FactorCones {
        #[arg(long)]
        tree: Option<PathBuf>,
        #[arg(long = "fn")]
        func: PathBuf,
        /// The node `a`: an id on the finite backend, a ball as JSON otherwise.
        #[arg(long)]
        at: String,
    },
    /// Value-group normal form of a Puiseux function.
    VgroupNf {
        #[arg(long = "fn")]
        func: PathBuf,
    },
    /// Residue normal form of a Puiseux function.
    ResidueNf {
        #[arg(long = "fn")]
        func: PathBuf,
    },
    /// Decompose a set of inner nodes into 1-cells.
    TDecompose {
        #[arg(long)]
        tree: PathBuf,
        /// `{"nodes":[int]}`
        #[arg(long)]
        nodes: PathBuf,
    },
    /// Antichain strata of a node set.
    Strata {
        #[arg(long)]
        tree: PathBuf,
        #[arg(long)]
        nodes: PathBuf,
    },
    /// Write a tree in DOT.
    ExportDot {
        #[arg(long)]
        tree: PathBuf,
    },
    /// Run the seeded acceptance suites.
    Suite {
        /// About a twentieth of the full sizes.
        #[arg(long)]
        quick: bool,
    },
}

#[derive(Deserialize)]
struct NodeSet {
    nodes: Vec<NodeId>,
}

#[derive(Serialize)]
struct ErrorJson {
    code: String,
    message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<String>,
}

enum Failure {
    /// Exit 1: unreadable or unparsable input.
    Malformed(String),
    /// Exit 2: a precondition of the algorithm fails.
    Rejected(ErrorJson),
}

impl From<DecomposeError> for Failure {
    fn from(e: DecomposeError) -> Self {
        Failure::Rejected(ErrorJson { code: e.code().to_string(), message: e.to_string(), witness: e.witness() })
    }
}

impl From<ctree::TreeError> for Failure {
    fn from(e: ctree::TreeError) -> Self {
        DecomposeError::from(e).into()
    }
}

enum Output {
    Json(String, String),
    Text(String, String),
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Malformed(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Malformed(format!("{}: {e}", path.display())))
}

fn read_tree(path: &Path) -> Result<GoodTree, Failure> {
    read_json(path)
}

fn json<T: Serialize>(v: &T, summary: String) -> Result<Output, Failure> {
    Ok(Output::Json(serde_json::to_string_pretty(v).expect("results serialize"), summary))
}

fn optional_tree(path: &Option<PathBuf>, f: &PiecewiseFn) -> Result<Option<GoodTree>, Failure> {
    match (path, f) {
        (Some(p), _) => Ok(Some(read_tree(p)?)),
        (None, PiecewiseFn::Finite { .. }) => Err(Failure::Malformed("a finite function needs --tree".into())),
        (None, PiecewiseFn::Puiseux { .. }) => Ok(None),
    }
}

fn parse_ids(s: &str) -> Result<Vec<NodeId>, Failure> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| p.trim().parse::<u32>().map(NodeId).map_err(|e| Failure::Malformed(format!("bad id {p:?}: {e}"))))
        .collect()
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    let g = &cli.global;
    let precision = ctree::rational::parse(&g.precision).map_err(Failure::Malformed)?;
    let field = PuiseuxField::new(precision);
    if g.format == Format::Dot && !matches!(cli.command, Command::GenTree { .. } | Command::ExportDot { .. }) {
        return Err(Failure::Malformed("DOT output is only available for trees".into()));
    }
    match &cli.command {
        Command::AxiomsCheck { tree, sampled } => {
            let t = read_tree(tree)?;
            let report = match sampled {
                Some(n) => check_c_axioms_sampled(&t, *n, &mut rand_chacha::ChaCha8Rng::seed_from_u64(g.seed))?,
                None => check_c_axioms(&t)?,
            };
            let s = report.results.iter().map(|r| format!("{:?} {}", r.axiom, if r.holds { "pass" } else { "fail" }));
            json(&report, s.collect::<Vec<_>>().join(", "))
        }
        Command::GenTree { leaves, max_depth, branching } => {
            let b = parse_ids(branching)?;
            let [lo, hi] = b[..] else { return Err(Failure::Malformed("--branching takes min,max".into())) };
            let p = TreeGenParams::new(*max_depth, (lo.0 as usize, hi.0 as usize), *leaves, g.seed);
            let t = generate_good_tree(&p).map_err(|e| {
                Failure::Rejected(ErrorJson { code: "UNSATISFIABLE".into(), message: e.to_string(), witness: None })
            })?;
            let summary = format!("tree with {} nodes and {} leaves", t.len() - 1, t.leaves().len());
            match g.format {
                Format::Dot => Ok(Output::Text(to_dot(&t), summary)),
                Format::Json => json(&t, summary),
            }
        }
        Command::ExportDot { tree } => Ok(Output::Text(to_dot(&read_tree(tree)?), "DOT written".into())),
        Command::DecomposeFn { tree, func } => {
            let f: PiecewiseFn = read_json(func)?;
            let t = optional_tree(tree, &f)?;
            let d = decompose::decompose_fn(t.as_ref(), &field, &f)?;
            let n = match &d {
                decompose::Decomposition::Finite(d) => d.cells.len(),
                decompose::Decomposition::Puiseux(d) => d.cells.len(),
            };
            json(&d, format!("{n} cells"))
        }
        Command::FactorBranch { tree, func, chain } => {
            let f: PiecewiseFn = read_json(func)?;
            match optional_tree(tree, &f)? {
                Some(t) => {
                    let map = f.to_leaf_map(&t)?;
                    let chain = chain.as_deref().map(parse_ids).transpose()?;
                    let bf = LeafFn::new(&t, &map).factor_through_branch(chain.as_deref())?;
                    json(&bf, format!("{} pieces, {} residual points", bf.pieces.len(), bf.residual.points.len()))
                }
                None => {
                    let bf = puiseux::factor_through_branch(&field, &f)?;
                    json(&bf, format!("{} pieces, {} residual bands", bf.pieces.len(), bf.residual.len()))
                }
            }
        }
        Command::FactorCones { tree, func, at } => {
            let f: PiecewiseFn = read_json(func)?;
            match optional_tree(tree, &f)? {
                Some(t) => {
                    let a = at.trim().parse::<u32>().map_err(|e| Failure::Malformed(format!("--at: {e}")))?;
                    let cf = LeafFn::new(&t, &f.to_leaf_map(&t)?).factor_through_cones(NodeId(a))?;
                    json(&cf, format!("{} bases", cf.bases.len()))
                }
                None => {
                    let a: Ball = serde_json::from_str(at).map_err(|e| Failure::Malformed(format!("--at: {e}")))?;
                    let cf = puiseux::factor_through_cones(&field, &f, &a)?;
                    json(&cf, format!("{} bases", cf.bases.len()))
                }
            }
        }
        Command::VgroupNf { func } => {
            let nf = puiseux::value_group_normal_form(&field, &read_json(func)?)?;
            json(&nf, format!("{} cells, {} exceptional values", nf.cells.len(), nf.finite.len()))
        }
        Command::ResidueNf { func } => {
            let nf = puiseux::residue_normal_form(&field, &read_json(func)?)?;
            json(&nf, format!("{} entries, {} exceptional values", nf.entries.len(), nf.finite.len()))
        }
        Command::TDecompose { tree, nodes } => {
            let t = read_tree(tree)?;
            let x: NodeSet = read_json(nodes)?;
            let cells = tsets::decompose_t_subset(&t, &x.nodes.into_iter().collect())?;
            json(&cells, format!("{} cells", cells.len()))
        }
        Command::Strata { tree, nodes } => {
            let t = read_tree(tree)?;
            let x: NodeSet = read_json(nodes)?;
            let s = decompose::antichain_strata(&t, &x.nodes)?;
            json(&s, format!("{} strata", s.len()))
        }
        Command::Suite { quick } => {
            let cfg = SuiteConfig::new(g.seed, if *quick { Scale::Quick } else { Scale::Full });
            let reports = suite::run_all(&cfg);
            let failed: Vec<String> = reports.iter().filter(|r| !r.passed).map(|r| r.id.to_string()).collect();
            let summary = reports
                .iter()
                .map(|r| format!("{} {}: {}", if r.passed { "PASS" } else { "FAIL" }, r.id, r.name))
                .collect::<Vec<_>>()
                .join("\n");
            if !failed.is_empty() {
                eprintln!("{summary}");
                return Err(Failure::Rejected(ErrorJson {
                    code: "SUITE_FAILED".into(),
                    message: serde_json::to_string(&reports).expect("reports serialize"),
                    witness: Some(failed.join(",")),
                }));
            }
            json(&reports, summary)
        }
    }
}

fn emit(cli: &Cli, out: Output) -> Result<(), String> {
    let (body, summary) = match out {
        Output::Json(v, s) => (v + "\n", s),
        Output::Text(t, s) => (t, s),
    };
    match &cli.global.out {
        Some(path) => {
            fs::write(path, body).map_err(|e| format!("{}: {e}", path.display()))?;
            println!("{summary}");
        }
        None => print!("{body}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => match emit(&cli, out) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("{e}");
                ExitCode::from(1)
            }
        },
        Err(Failure::Malformed(m)) => {
            let e = ErrorJson { code: "MALFORMED_INPUT".into(), message: m, witness: None };
            eprintln!("{}", serde_json::to_string(&e).expect("error serializes"));
            ExitCode::from(1)
        }
        Err(Failure::Rejected(e)) => {
            eprintln!("{}", serde_json::to_string(&e).expect("error serializes"));
            ExitCode::from(2)
        }
    }
}
