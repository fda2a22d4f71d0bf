//! Command-line front end for invmap: CFI files, WL and invertible-map refinement, and
//! the experiment harness.
//!
//! Exit codes: 0 equivalent (or success), 1 distinguished (or a failed experiment
//! expectation), 2 error.

pub mod experiments;
pub mod report;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use invmap_core::imrefine::{im_equivalent, im_orbit_check, im_refine_seeded};
use invmap_core::structures::{cfi_to_graph, CfiStructure, OrderedGraph, SimpleGraph, Structure, TwistVector};
use invmap_core::wl::{wl_equivalent, wl_refine};
use thiserror::Error;

pub use report::{ExperimentReport, REPORT_HEADER};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] invmap_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("report line {line}: {message}")]
    Report { line: usize, message: String },
    #[error("{0}")]
    Usage(String),
    #[error("expectation failed: {0}")]
    Assertion(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Assertion(_) => 1,
            _ => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "invmap", version, about = "Invariant maps over finite fields")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build, compare, twist and encode CFI structures.
    #[command(subcommand)]
    Cfi(CfiCommand),
    /// Weisfeiler-Leman refinement.
    #[command(subcommand)]
    Wl(RefineCommand),
    /// Invertible-map refinement.
    #[command(subcommand)]
    Im(RefineCommand),
    /// Desk-scale experiments.
    #[command(subcommand)]
    Experiment(ExperimentCommand),
}

#[derive(Debug, Subcommand)]
pub enum CfiCommand {
    /// Write `CFI[G; p; load]`.
    Build {
        #[arg(long, default_value = "K4")]
        graph: String,
        #[arg(long, default_value_t = 2)]
        p: u64,
        /// Nonzero loads as `v=x`, comma separated.
        #[arg(long, default_value = "")]
        load: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Isomorphism verdict from the load sums, with a brute-force witness when affordable.
    Iso { a: PathBuf, b: PathBuf },
    /// Apply a twist file.
    Twist {
        structure: PathBuf,
        twist: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Plain-graph encoding.
    GraphEncode {
        structure: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct RefineOpts {
    #[arg(short, default_value_t = 3)]
    pub k: usize,
    /// Primes, comma separated (invertible-map refinement only).
    #[arg(short = 'Q', default_value = "2")]
    pub primes: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum RefineCommand {
    /// Partition report for one structure (CFI or graph file).
    Run {
        input: PathBuf,
        #[command(flatten)]
        opts: RefineOpts,
        /// List the members of every class.
        #[arg(long)]
        verbose: bool,
        /// Also compare with the automorphism orbits (CFI input, invertible-map only).
        #[arg(long)]
        orbits: bool,
    },
    /// Equivalence verdict for two structures.
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[command(flatten)]
        opts: RefineOpts,
    },
}

#[derive(Debug, Args)]
pub struct ReportOpts {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the report here instead of standard output.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum ExperimentCommand {
    /// Basis families of a CFI pair over the matching and a coprime field.
    Separation {
        #[arg(long, default_value = "K4")]
        graph: String,
        #[arg(long, default_value_t = 2)]
        p: u64,
        #[arg(long, default_value_t = 3)]
        q: u64,
        #[arg(short, default_value_t = 3)]
        k: usize,
        #[command(flatten)]
        report: ReportOpts,
    },
    /// Minimal WL width recovering the orbits on pairs.
    Homogeneity {
        /// Catalog graphs, comma separated.
        #[arg(long, default_value = "K4,prism")]
        graph: String,
        #[arg(long, default_value_t = 2)]
        p: u64,
        #[arg(long, default_value_t = 6)]
        max_k: usize,
        #[command(flatten)]
        report: ReportOpts,
    },
    /// Semisimplicity of abelian group algebras against the order criterion.
    Maschke {
        #[arg(long, default_value_t = 27)]
        max_order: usize,
        #[arg(long, default_value = "2,3,5,7")]
        fields: String,
        #[command(flatten)]
        report: ReportOpts,
    },
    /// Similarity decisions against exhaustive search.
    Oracle {
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[command(flatten)]
        report: ReportOpts,
    },
    /// Block-diagonal projections of intertwiners.
    Blocks {
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[command(flatten)]
        report: ReportOpts,
    },
    /// Group-invariant linear systems.
    Cocyclic {
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[command(flatten)]
        report: ReportOpts,
    },
    /// Closure of the pair configurations of the catalog CFI instances.
    Closure {
        #[arg(long, default_value = "2,3")]
        p: String,
        #[arg(long, default_value = "2,3,5")]
        fields: String,
        #[command(flatten)]
        report: ReportOpts,
    },
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_or_print(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|source| CliError::Io {
            path: p.to_path_buf(),
            source,
        }),
        None => out.write_all(text.as_bytes()).map_err(|source| CliError::Io {
            path: "<stdout>".into(),
            source,
        }),
    }
}

pub fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>, CliError> {
    text.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| CliError::Usage(format!("bad {what} `{t}`"))))
        .collect()
}

fn parse_loads(text: &str, n: usize) -> Result<Vec<u32>, CliError> {
    let mut load = vec![0; n];
    for item in text.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let (v, x) = item
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("load `{item}` is not `v=x`")))?;
        let v: usize = v.parse().map_err(|_| CliError::Usage(format!("bad vertex `{v}`")))?;
        let x: u32 = x.parse().map_err(|_| CliError::Usage(format!("bad load value `{x}`")))?;
        if v >= n {
            return Err(CliError::Usage(format!("vertex {v} out of range")));
        }
        load[v] = x;
    }
    Ok(load)
}

fn read_cfi(path: &Path) -> Result<CfiStructure, CliError> {
    Ok(read(path)?.parse()?)
}

/// A CFI structure file (`cfi p=...`) or a graph file (`graph n m`).
pub fn read_structure(path: &Path) -> Result<Structure, CliError> {
    let text = read(path)?;
    let first = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'))
        .unwrap_or("");
    if first.starts_with("cfi") {
        Ok(text.parse::<CfiStructure>()?.to_structure())
    } else {
        Ok(Structure::from_graph(&text.parse::<SimpleGraph>()?))
    }
}

/// Runs a parsed command, writing its output; the returned code follows the exit-code contract.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    match cli.command {
        Command::Cfi(c) => run_cfi(c, out),
        Command::Wl(c) => run_refine(c, false, out),
        Command::Im(c) => run_refine(c, true, out),
        Command::Experiment(c) => run_experiment(c, out),
    }
}

fn run_cfi(cmd: CfiCommand, out: &mut dyn Write) -> Result<i32, CliError> {
    match cmd {
        CfiCommand::Build {
            graph,
            p,
            load,
            output,
        } => {
            let g = OrderedGraph::catalog(&graph)?;
            let load = parse_loads(&load, g.n())?;
            let s = CfiStructure::build(g, p, &load)?;
            write_or_print(output.as_deref(), &s.to_string(), out)?;
            Ok(0)
        }
        CfiCommand::Iso { a, b } => {
            let (a, b) = (read_cfi(&a)?, read_cfi(&b)?);
            if a.graph() != b.graph() || a.p() != b.p() {
                return Err(CliError::Usage("structures over different graphs or primes".into()));
            }
            let iso = a.iso_invariant() == b.iso_invariant();
            let mut text = format!(
                "isomorphic: {iso}\ninvariant-a: {}\ninvariant-b: {}\n",
                a.iso_invariant(),
                b.iso_invariant()
            );
            match a.brute_force_isomorphic(&b) {
                Ok(Some(w)) => text.push_str(&format!("witness:\n{}", w.to_text(a.graph(), a.p()))),
                Ok(None) => text.push_str("witness: none\n"),
                Err(invmap_core::Error::BudgetExceeded { required, budget, .. }) => {
                    text.push_str(&format!("witness: skipped (search needs {required}, budget {budget})\n"))
                }
                Err(e) => return Err(e.into()),
            }
            write_or_print(None, &text, out)?;
            Ok(if iso { 0 } else { 1 })
        }
        CfiCommand::Twist {
            structure,
            twist,
            output,
        } => {
            let s = read_cfi(&structure)?;
            let t = TwistVector::parse(&read(&twist)?, s.graph(), s.field())?;
            let twisted = s.apply_twist(&t)?;
            write_or_print(output.as_deref(), &twisted.to_string(), out)?;
            Ok(0)
        }
        CfiCommand::GraphEncode { structure, output } => {
            let s = read_cfi(&structure)?;
            write_or_print(output.as_deref(), &cfi_to_graph(&s).to_string(), out)?;
            Ok(0)
        }
    }
}

fn run_refine(cmd: RefineCommand, im: bool, out: &mut dyn Write) -> Result<i32, CliError> {
    match cmd {
        RefineCommand::Run {
            input,
            opts,
            verbose,
            orbits,
        } => {
            let s = read_structure(&input)?;
            let mut text = if im {
                let primes = parse_list(&opts.primes, "prime")?;
                im_refine_seeded(&s, opts.k, &primes, opts.seed)?.report(verbose)
            } else {
                wl_refine(&s, opts.k)?.report(verbose)
            };
            if orbits {
                if !im {
                    return Err(CliError::Usage("--orbits applies to invertible-map refinement".into()));
                }
                let primes = parse_list(&opts.primes, "prime")?;
                text.push_str(&im_orbit_check(&read_cfi(&input)?, opts.k, &primes)?.report());
            }
            write_or_print(None, &text, out)?;
            Ok(0)
        }
        RefineCommand::Compare { a, b, opts } => {
            let (a, b) = (read_structure(&a)?, read_structure(&b)?);
            let eq = if im {
                let primes = parse_list(&opts.primes, "prime")?;
                im_equivalent(&a, &b, opts.k, &primes)?
            } else {
                wl_equivalent(&a, &b, opts.k)?
            };
            let label = if im { "im-equivalent" } else { "wl-equivalent" };
            write_or_print(None, &format!("{label}: {eq}\n"), out)?;
            Ok(if eq { 0 } else { 1 })
        }
    }
}

fn emit(
    r: ExperimentReport,
    opts: &ReportOpts,
    check: fn(&ExperimentReport) -> Result<(), CliError>,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    write_or_print(opts.output.as_deref(), &r.to_string(), out)?;
    check(&r)?;
    Ok(0)
}

fn run_experiment(cmd: ExperimentCommand, out: &mut dyn Write) -> Result<i32, CliError> {
    use experiments::*;
    match cmd {
        ExperimentCommand::Separation { graph, p, q, k, report } => {
            emit(separation(&graph, p, q, k, report.seed)?, &report, check_separation, out)
        }
        ExperimentCommand::Homogeneity {
            graph,
            p,
            max_k,
            report,
        } => {
            let instances: Vec<(String, u64)> = parse_list::<String>(&graph, "graph")?
                .into_iter()
                .map(|g| (g, p))
                .collect();
            emit(homogeneity(&instances, max_k)?, &report, check_homogeneity, out)
        }
        ExperimentCommand::Maschke {
            max_order,
            fields,
            report,
        } => emit(maschke(max_order, &parse_list(&fields, "prime")?)?, &report, check_maschke, out),
        ExperimentCommand::Oracle { trials, report } => {
            emit(oracle(trials, report.seed)?, &report, check_oracle, out)
        }
        ExperimentCommand::Blocks { trials, report } => {
            emit(block_projection(trials, report.seed)?, &report, check_blocks, out)
        }
        ExperimentCommand::Cocyclic { trials, report } => emit(
            invariant_systems(trials, report.seed)?,
            &report,
            check_invariant_systems,
            out,
        ),
        ExperimentCommand::Closure { p, fields, report } => emit(
            closure(&parse_list(&p, "prime")?, &parse_list(&fields, "prime")?)?,
            &report,
            check_closure,
            out,
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loads_parse() {
        assert_eq!(parse_loads("0=1, 3=2", 4).unwrap(), vec![1, 0, 0, 2]);
        assert!(parse_loads("4=1", 4).is_err());
        assert!(parse_loads("x", 4).is_err());
    }

    #[test]
    fn prime_lists() {
        assert_eq!(parse_list::<u64>("2,3", "prime").unwrap(), vec![2, 3]);
        assert!(parse_list::<u64>("", "prime").unwrap().is_empty());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
