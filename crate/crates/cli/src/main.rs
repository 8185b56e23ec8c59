use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use dpa_core::catalog::Catalog;
use dpa_core::poly::FKind;
use dpa_core::Error;

mod commands;
mod input;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FArg {
    #[value(name = "sl-log")]
    Log,
    #[value(name = "sl-squared")]
    Squared,
    #[value(name = "sl-margin")]
    Margin,
}

impl From<FArg> for FKind {
    fn from(f: FArg) -> FKind {
        match f {
            FArg::Log => FKind::Log,
            FArg::Squared => FKind::Squared,
            FArg::Margin => FKind::Margin,
        }
    }
}

/// Decompile, compile and compare direct preference alignment losses.
#[derive(Debug, Parser)]
#[command(name = "dpa", version)]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write output to a file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Catalog file replacing the bundled one.
    #[arg(long, global = true)]
    pub catalog: Option<PathBuf>,
    /// Seed for randomized commands.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Translate a loss equation (or catalog name) into a preference structure.
    Decompile {
        /// Equation such as "p(theta,yw)/p(theta,yl)", or a catalog name.
        #[arg(long)]
        loss: String,
        /// Also print the reference-form structure.
        #[arg(long)]
        reference: bool,
        /// Fuzzy target: P := Sem(bottom) -> Sem(top), PC = true, PA = false.
        #[arg(long)]
        fuzzy: bool,
        /// Minimize P on the fuzzy path.
        #[arg(long, requires = "fuzzy")]
        simplify: bool,
    },
    /// Turn a structure (file or catalog name) into a loss equation.
    Compile {
        #[arg(long)]
        structure: String,
        #[arg(long = "f", value_enum)]
        f_kind: Option<FArg>,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        /// Print the -log R-product form of P instead.
        #[arg(long)]
        fuzzy: bool,
        #[arg(long, requires = "fuzzy")]
        simplify: bool,
    },
    /// Evaluate the semantic loss of a structure.
    Eval {
        #[arg(long)]
        structure: String,
        /// JSON object keyed by atom tokens, or a path to one.
        #[arg(long)]
        weights: String,
        #[arg(long = "f", value_enum)]
        f_kind: Option<FArg>,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        /// Margin for entries with manual reference atoms.
        #[arg(long)]
        gamma: Option<f64>,
        /// Gate copied winner atoms for entries that support it.
        #[arg(long)]
        max_gate: bool,
        /// Evaluate the R-product fuzzy loss of P.
        #[arg(long)]
        fuzzy: bool,
        #[arg(long, requires = "fuzzy")]
        simplify: bool,
    },
    /// Preference entailment between two structures.
    Entail { a: String, b: String },
    /// Enumerate structures between two bounds.
    Lattice {
        #[arg(long)]
        lower: String,
        #[arg(long)]
        upper: String,
        /// Emit DOT (same as --format dot).
        #[arg(long)]
        dot: bool,
        /// Keep trivial structures.
        #[arg(long)]
        all: bool,
        /// Replace every node by its reference form.
        #[arg(long)]
        reference: bool,
    },
    /// Inspect the catalog.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Number of preference structures over n atoms.
    Count { n: u32 },
    /// Re-verify catalog invariants and numeric round trips on random weights.
    Selfcheck {
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum CatalogAction {
    List,
    Show { name: String },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NonDisjoint { .. } | Error::ContradictoryTerm(..) | Error::NonIntegerExponent(_) => 3,
        Error::TrivialStructure(_) | Error::ZeroCount(_) => 4,
        _ => 2,
    }
}

fn load_catalog(cli: &Cli) -> Result<Catalog, Error> {
    match &cli.catalog {
        Some(path) => Catalog::from_path(path),
        None => Catalog::builtin(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = load_catalog(&cli).and_then(|catalog| commands::run(&cli, &catalog));
    let text = match result {
        Ok(text) => text,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::SUCCESS
}
