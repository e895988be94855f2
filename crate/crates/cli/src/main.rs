mod build;
mod check;
mod corpus;
mod eval;
mod report;
mod source;

use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

const GEN_HELP: &str = "Generator spec: boolean:N, chain:N, co-chain:N, co-points:paper5, \
co-points:PATH, subsemi:PATH, enum:N or enum:N:I";

#[derive(Parser)]
#[command(name = "latkit", version, about = "Finite lattice analysis and embedding constructions")]
struct Cli {
    /// Include wall-clock timings in the report.
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone)]
pub struct LatticeSource {
    /// Lattice JSON file ({"elements": [...], "covers": [[lower, upper], ...]}).
    #[arg(long, conflicts_with = "gen")]
    file: Option<String>,
    #[arg(long, help = GEN_HELP)]
    gen: Option<String>,
}

impl LatticeSource {
    fn file(&self) -> Option<&str> {
        self.file.as_deref()
    }

    fn gen(&self) -> Option<&str> {
        self.gen.as_deref()
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run structural analyzers.
    Check {
        #[command(flatten)]
        source: LatticeSource,
        /// Comma-separated: atomistic, biatomic, jsd, lower-bounded, problems.
        #[arg(long, value_delimiter = ',', default_value = "atomistic,biatomic,jsd,lower-bounded")]
        props: Vec<String>,
    },
    /// Apply a construction and write the resulting lattice.
    Build {
        #[command(flatten)]
        source: LatticeSource,
        #[arg(long, value_enum)]
        op: build::Op,
        /// Apex label for one-atom.
        #[arg(long)]
        apex: Option<String>,
        /// Comma-separated labels of the meet-closed set M for one-atom;
        /// commas inside braces or brackets belong to the label.
        #[arg(long)]
        subsemilattice: Option<String>,
        /// Element label for atom-restriction.
        #[arg(long)]
        element: Option<String>,
        /// Write the result lattice JSON here instead of into the report.
        #[arg(long)]
        out: Option<String>,
        /// Write the biatomization trace (JSON lines) here.
        #[arg(long)]
        trace: Option<String>,
    },
    /// Evaluate a quasi-identity; exit 0 if it holds, 1 if it fails.
    Eval {
        #[command(flatten)]
        source: LatticeSource,
        /// builtin:theta, builtin:sd, file:PATH or the sentence itself.
        #[arg(long)]
        qid: String,
    },
    /// Stream a family of lattices through a property suite.
    Corpus {
        /// Largest lattice size to enumerate (at most 7).
        #[arg(long, default_value_t = 5)]
        max: usize,
        #[arg(long, value_enum)]
        suite: corpus::Suite,
        /// Seed for randomized parts of a suite.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of random samples for randomized suites.
        #[arg(long, default_value_t = 12)]
        samples: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = cli.timings.then(Instant::now);
    let (report, code) = match cli.command {
        Command::Check { source, props } => check::run(&source, &props),
        Command::Build {
            source,
            op,
            apex,
            subsemilattice,
            element,
            out,
            trace,
        } => build::run(
            &source,
            build::Params {
                op,
                apex,
                subsemilattice,
                element,
                out,
                trace,
            },
        ),
        Command::Eval { source, qid } => eval::run(&source, &qid),
        Command::Corpus {
            max,
            suite,
            seed,
            samples,
        } => corpus::run(max, suite, seed, samples),
    };
    report.print(started);
    ExitCode::from(code)
}

/// Input names for the report.
fn input_names(source: &LatticeSource) -> Vec<String> {
    match (source.file(), source.gen()) {
        (Some(f), _) => vec![format!("file:{f}")],
        (None, Some(g)) => vec![format!("gen:{g}")],
        _ => vec![],
    }
}
