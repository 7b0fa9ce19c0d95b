//! `gbs`: command-line access to the gbs-core algorithms.
//!
//! Exit codes: 0 success or positive verdict, 1 negative verdict, 2 unknown
//! within budget, 64 usage, 65 unreadable or invalid input, 70 internal
//! invariant breach.

mod commands;
mod input;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub const EXIT_OK: u8 = 0;
pub const EXIT_NO: u8 = 1;
pub const EXIT_UNKNOWN: u8 = 2;
pub const EXIT_USAGE: u8 = 64;
pub const EXIT_PARSE: u8 = 65;
pub const EXIT_INTERNAL: u8 = 70;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError { code: EXIT_USAGE, message: message.into() }
    }

    pub fn parse(message: impl Into<String>) -> Self {
        CliError { code: EXIT_PARSE, message: message.into() }
    }

    /// Invariant breaches are internal; every other library error blames the input.
    pub fn from_core(e: &gbs_core::Error) -> Self {
        let code = match e {
            gbs_core::Error::InvariantViolation(_) => EXIT_INTERNAL,
            _ => EXIT_PARSE,
        };
        CliError { code, message: e.to_string() }
    }
}

impl From<gbs_core::Error> for CliError {
    fn from(e: gbs_core::Error) -> Self {
        CliError::from_core(&e)
    }
}

/// Text written to the output and the exit code it carries.
pub struct Output {
    pub body: String,
    pub code: u8,
}

impl Output {
    pub fn new(body: impl Into<String>, code: u8) -> Self {
        Output { body: body.into(), code }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Dot,
    Text,
}

#[derive(Parser, Debug)]
#[command(name = "gbs", version, about = "Exact computations with generalized Baumslag-Solitar groups")]
pub struct Cli {
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the output to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads; 1 runs sequentially.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Budget {
    /// Search depth in edges.
    #[arg(long, default_value_t = 8)]
    pub depth: usize,
    /// Cap on explored states or vertices.
    #[arg(long, default_value_t = 10_000)]
    pub budget: usize,
}

#[derive(Args, Debug, Clone)]
pub struct SiteLabel {
    /// Graph-of-groups vertex; optional when there is only one.
    #[arg(long)]
    pub site: Option<String>,
    /// Lattice: `zero`, `full`, or a JSON matrix of d rows whose columns generate it.
    #[arg(long)]
    pub label: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Report structural problems of a graph of groups.
    ValidateGog { gog: PathBuf },
    /// Collapse edges with a unimodular label and print the reduced graph.
    Reduce { gog: PathBuf },
    /// Decide amenability of the fundamental group.
    Amenable { gog: PathBuf },
    /// Decide whether the modular homomorphism lands in GL_d(Z).
    Unimodular { gog: PathBuf },
    /// Modular images of the free generators at a site.
    Modular {
        gog: PathBuf,
        #[arg(long)]
        site: Option<String>,
        /// Comma-separated edge ids of a spanning tree; overrides the recorded tree.
        #[arg(long)]
        tree: Option<String>,
    },
    /// The phenotype invariant δ of a lattice.
    Delta {
        gog: PathBuf,
        #[command(flatten)]
        at: SiteLabel,
    },
    /// Primes dividing the determinant of some edge label.
    PrimeSet { gog: PathBuf },
    /// Check an H-graph against the transfer equation and multiplicity bounds.
    ValidateHgraph { hgraph: PathBuf },
    /// Saturate an H-graph deterministically up to a depth.
    Saturate {
        hgraph: PathBuf,
        #[command(flatten)]
        budget: Budget,
    },
    /// Semi-decide membership of the represented subgroup in the perfect kernel.
    KernelCheck {
        hgraph: PathBuf,
        #[command(flatten)]
        budget: Budget,
    },
    /// Decide equivalence of two labels at a site.
    Equiv {
        gog: PathBuf,
        #[arg(long)]
        site: Option<String>,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[command(flatten)]
        budget: Budget,
    },
    /// Whether the modular orbit of a rank-deficient label is infinite.
    ClassifyLabel {
        gog: PathBuf,
        #[command(flatten)]
        at: SiteLabel,
        #[command(flatten)]
        budget: Budget,
    },
    /// Rank, δ, prime set and modular span orbit of a label.
    Phenotype {
        gog: PathBuf,
        #[command(flatten)]
        at: SiteLabel,
        #[command(flatten)]
        budget: Budget,
    },
    /// A connected H-graph with one cycle and two deficient vertices through a label.
    CycleWitness {
        gog: PathBuf,
        #[command(flatten)]
        at: SiteLabel,
    },
    /// Connect pointed H-graphs over the same site into one H-graph.
    Merge {
        #[arg(required = true, num_args = 1..)]
        hgraphs: Vec<PathBuf>,
        /// Base vertex id for inputs without one.
        #[arg(long)]
        base: Option<String>,
        #[command(flatten)]
        budget: Budget,
    },
    /// The semidirect case Z^d x| F_r.
    #[command(subcommand)]
    Semidirect(SemiCommand),
    /// Graphviz rendering of an H-graph.
    ExportDot {
        hgraph: PathBuf,
        #[arg(long)]
        base: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
pub enum SemiCommand {
    /// Stallings core of the subgroup generated by words such as "a1 a2 A1".
    Fold {
        rose: PathBuf,
        #[arg(long = "word")]
        words: Vec<String>,
    },
    /// Orbit of a lattice under the action of F_r.
    Orbit {
        rose: PathBuf,
        #[arg(long)]
        label: String,
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
    },
    /// Stabilizer of a lattice in F_r.
    Stab {
        rose: PathBuf,
        #[arg(long)]
        label: String,
        /// Word length searched for rank-deficient lattices.
        #[arg(long, default_value_t = 6)]
        depth: usize,
    },
    /// Perfect-kernel membership of a subgroup given as lattice, core words and lifts.
    Kernel { rose: PathBuf, subgroup: PathBuf },
    /// Closedness and open part of the piece of a lattice.
    Classify {
        rose: PathBuf,
        #[arg(long)]
        label: String,
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
        #[arg(long, default_value_t = 6)]
        depth: usize,
    },
    /// H-graph of a subgroup: its core labelled by the lattice orbit.
    Hgraph { rose: PathBuf, subgroup: PathBuf },
}

fn emit(out: &Output, path: Option<&PathBuf>) -> Result<(), CliError> {
    let mut body = out.body.clone();
    if !body.ends_with('\n') {
        body.push('\n');
    }
    match path {
        Some(p) => std::fs::write(p, body).map_err(|e| CliError::usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(body.as_bytes()).and_then(|_| stdout.flush()).map_err(|e| CliError::usage(e.to_string()))
        }
    }
}

/// Help and version requests succeed; every other parse failure is a usage error.
fn clap_exit_code(e: &clap::Error) -> u8 {
    if e.use_stderr() {
        EXIT_USAGE
    } else {
        EXIT_OK
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(clap_exit_code(&e));
        }
    };
    if let Some(j) = cli.jobs {
        gbs_core::exec::set_jobs(j);
    }
    let result = commands::run(&cli).and_then(|out| emit(&out, cli.out.as_ref()).map(|_| out.code));
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
