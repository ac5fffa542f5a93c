//! `mflow`: command line front end for mflow-core.
//!
//! Exit status is 0 on success, 1 on a domain error and 2 on an I/O or
//! parse error. The error name goes to stderr.

mod config;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{CommandFactory, FromArgMatches, Parser, Subcommand};
use mflow_core::branching::{
    cg_multiplicity, dominance_cone_member, fiber_chain_member, pieri_admissible, polygon_monoid_member,
    tree_polytope_count, PolygonMode,
};
use mflow_core::contraction::{contract_closed_form, contract_point_with};
use mflow_core::flow::integrate_flow;
use mflow_core::gt::{enumerate_gt, gt_pattern, validate_interlacing, weyl_dim};
use mflow_core::io;
use mflow_core::polygon::{bend_with, build_polygon};
use mflow_core::{Error, HermitianMatrix, HighestWeight, PolygonConfig, Result, TreeGraph};

use config::ConfigArgs;

#[derive(Debug, Parser)]
#[command(
    name = "mflow",
    version,
    about = "Contraction flows, Gel'fand-Tsetlin patterns and branching monoids"
)]
struct Cli {
    #[command(flatten)]
    config: ConfigArgs,
    /// Print the effective configuration and exit.
    #[arg(long, global = true)]
    show_config: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Gel'fand-Tsetlin pattern of a Hermitian matrix.
    GtPattern {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Integrate the contraction flow and write the trajectory as CSV.
    Flow {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Contract a matrix (closed form) or a cotangent point (normal form).
    Contract {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Count integer GT patterns with a given top row.
    GtCount {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        weight: Vec<i64>,
    },
    /// Branching monoid queries.
    Branch {
        #[command(subcommand)]
        query: BranchQuery,
    },
    /// Lattice points of a tree polytope.
    TreeCount {
        /// Newick string with leaves labeled 1..n.
        #[arg(long)]
        tree: String,
        #[arg(long, value_delimiter = ',', required = true)]
        r: Vec<u64>,
    },
    /// Build a polygon from a scenario and apply its bends.
    Polygon {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the invariant suite.
    Verify {
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
}

#[derive(Debug, Subcommand)]
enum BranchQuery {
    /// Multiplicity of the trivial summand in M_r1 ⊗ ... ⊗ M_rn.
    Cg {
        #[arg(long, value_delimiter = ',', required = true)]
        r: Vec<u64>,
    },
    /// Whether eta interlaces the weight.
    Pieri {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        eta: Vec<i64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        weight: Vec<i64>,
    },
    /// Membership in the polygon monoid.
    Polygon {
        #[arg(long, value_delimiter = ',', required = true)]
        r: Vec<u64>,
        /// Drop the parity condition.
        #[arg(long)]
        cone: bool,
    },
    /// Whether mu - weight is a non-negative sum of simple roots.
    Dominance {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        weight: Vec<i64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        mu: Vec<i64>,
    },
    /// Whether a chain of weights (JSON, shortest first) interlaces.
    Chain {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

/// Writes to `path` through a temporary file in the same directory, or to
/// stdout.
fn emit(path: Option<&Path>, contents: &[u8]) -> Result<()> {
    let io_err = |e: std::io::Error| Error::Io(e.to_string());
    match path {
        None => std::io::stdout().write_all(contents).map_err(io_err),
        Some(p) => {
            let dir = p
                .parent()
                .filter(|d| !d.as_os_str().is_empty())
                .unwrap_or(Path::new("."));
            let mut tmp =
                tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
            tmp.write_all(contents).map_err(io_err)?;
            tmp.persist(p)
                .map_err(|e| Error::Io(format!("{}: {}", p.display(), e.error)))?;
            Ok(())
        }
    }
}

fn verdict(b: bool) -> &'static str {
    if b {
        "MATCH"
    } else {
        "MISMATCH"
    }
}

fn run(cli: &Cli, command: &Command) -> Result<ExitCode> {
    let cfg = &cli.config;
    let tol = cfg.tolerances();
    match command {
        Command::GtPattern { input, out } => {
            let m = io::parse_matrix(&io::read_file(input)?)?;
            let a = HermitianMatrix::with_tol(m, tol.hermitian)?;
            let p = gt_pattern(&a);
            let violations = validate_interlacing(&p, tol.gt_abs(a.spectral_norm()));
            if let Some(v) = violations.first() {
                return Err(Error::InvariantViolation(format!(
                    "interlacing fails at ({}, {}) by {:e}",
                    v.i, v.j, v.deficit
                )));
            }
            emit(out.as_deref(), io::write_pattern(&p)?.as_bytes())?;
        }
        Command::Flow { input, out } => {
            let b = io::parse_matrix(&io::read_file(input)?)?;
            let traj = integrate_flow(&b, &cfg.flow())?;
            let mut buf = Vec::new();
            io::write_trajectory(&traj, &mut buf)?;
            emit(out.as_deref(), &buf)?;
        }
        Command::Contract { input, out } => {
            let text = io::read_file(input)?;
            let doc = if io::is_cotangent(&text) {
                io::write_contracted(&contract_point_with(&io::parse_cotangent(&text)?, &tol))?
            } else {
                io::write_matrix(&contract_closed_form(&io::parse_matrix(&text)?))?
            };
            emit(out.as_deref(), doc.as_bytes())?;
        }
        Command::GtCount { weight } => {
            let lambda = HighestWeight::new(weight.clone())?;
            let (count, dim) = (enumerate_gt(&lambda), weyl_dim(&lambda));
            println!("{count}");
            println!("weyl={dim} {}", verdict(count == dim));
        }
        Command::Branch { query } => match query {
            BranchQuery::Cg { r } => println!("{}", cg_multiplicity(r)),
            BranchQuery::Pieri { eta, weight } => {
                let ok = pieri_admissible(&HighestWeight::new(eta.clone())?, &HighestWeight::new(weight.clone())?)?;
                println!("{ok}");
            }
            BranchQuery::Polygon { r, cone } => {
                let mode = if *cone {
                    PolygonMode::Cone
                } else {
                    PolygonMode::Integral
                };
                println!("{}", polygon_monoid_member(r, mode));
            }
            BranchQuery::Dominance { weight, mu } => {
                println!("{}", dominance_cone_member(&HighestWeight::new(weight.clone())?, mu)?);
            }
            BranchQuery::Chain { input } => {
                let chain = io::parse_chain(&io::read_file(input)?)?;
                println!("{}", fiber_chain_member(&chain)?);
            }
        },
        Command::TreeCount { tree, r } => {
            let t = TreeGraph::from_newick(tree)?;
            let count = tree_polytope_count(&t, r)?;
            let cg = cg_multiplicity(r);
            println!("{count}");
            println!("cg={cg} {}", verdict(count == cg));
        }
        Command::Polygon { input, out } => {
            let s = io::parse_scenario(&io::read_file(input)?)?;
            let mut p = build_polygon(&s.r, &s.d, &s.angles)?;
            for step in &s.bends {
                p = bend_with(&p, &step.diagonal(), step.theta, &tol)?;
            }
            let p = PolygonConfig::with_tol(p.edges, true, &tol)?;
            emit(out.as_deref(), io::write_polygon(&p)?.as_bytes())?;
        }
        Command::Verify { trials } => {
            let reports = mflow_core::verify::run_all(cfg.seed, *trials, &tol)?;
            for r in &reports {
                println!("{r}");
            }
            if reports.iter().any(|r| !r.passed()) {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let matches = Cli::command().get_matches();
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    if cli.show_config {
        print!("{}", cli.config.describe(&matches));
        return ExitCode::SUCCESS;
    }
    let Some(command) = &cli.command else {
        let _ = Cli::command().print_help();
        return ExitCode::from(2);
    };
    match run(&cli, command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("mflow: {}: {e}", e.name());
            ExitCode::from(if e.is_input() { 2 } else { 1 })
        }
    }
}
