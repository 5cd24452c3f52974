use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod paper;
mod report;

use report::Outcome;

#[derive(Parser)]
#[command(name = "pcg", version, about = "Finite p-groups from power-commutator presentations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a presentation and check the shape of its relations.
    Validate(Common),
    /// Collect every overlap both ways and list the disagreements.
    Consistency(Common),
    /// Order, exponent, class, rank and derived length.
    Info(Common),
    /// Central series, Frattini subgroup and the Omega and Agemo subgroups.
    Series(Common),
    /// Power properties: p-abelian, semi-p^i-abelian, strongly, inner, regular.
    Props {
        #[command(flatten)]
        common: Common,
        /// p-abelian, semi:i=K, semi-def:i=K, strongly, inner:i=K, regular, power-structure.
        #[arg(long = "property", value_delimiter = ',')]
        properties: Vec<String>,
        /// Exit 1 unless every requested verdict has this value.
        #[arg(long)]
        expect: Option<bool>,
    },
    /// Run registered claims (all, or those selected by id or id prefix).
    Identities {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',')]
        claims: Vec<String>,
    },
    /// The fixed claim script on the example group plus catalog-wide checks.
    VerifyPaper(Common),
    /// Compare the collector with a multiplication table.
    OracleCheck(Common),
    /// List catalog entries and their documented facts.
    ListCatalog(Common),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exhaustive,
    Sampled,
}

#[derive(Args, Clone)]
pub struct Common {
    /// Presentation file in .pcp format.
    #[arg(long, conflicts_with = "catalog")]
    pub input: Option<PathBuf>,
    /// Catalog entry, NAME or NAME:k=v,...
    #[arg(long)]
    pub catalog: Option<String>,
    #[arg(long, value_enum, default_value_t = ModeArg::Exhaustive)]
    pub mode: ModeArg,
    /// Tuples drawn by sampled checks, and by exhaustive checks over budget.
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    pub tasks: Option<usize>,
    /// Write the run report as JSON.
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Classified witnesses kept per case.
    #[arg(long, default_value_t = 100)]
    pub witness_budget: usize,
    /// Largest tuple count an exhaustive claim check will scan before sampling.
    #[arg(long, default_value_t = 1 << 29)]
    pub exhaustive_budget: u64,
    /// Largest number of elements enumerated one by one.
    #[arg(long)]
    pub cap: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let common = match &cli.command {
        Command::Props { common, .. } | Command::Identities { common, .. } => common,
        Command::Validate(c)
        | Command::Consistency(c)
        | Command::Info(c)
        | Command::Series(c)
        | Command::VerifyPaper(c)
        | Command::OracleCheck(c)
        | Command::ListCatalog(c) => c,
    };
    if let Some(t) = common.tasks {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build_global() {
            eprintln!("pcg: {e}");
            return ExitCode::from(2);
        }
    }
    let outcome: Outcome = match &cli.command {
        Command::Validate(c) => commands::validate(c),
        Command::Consistency(c) => commands::consistency(c),
        Command::Info(c) => commands::info(c),
        Command::Series(c) => commands::series(c),
        Command::Props { common, properties, expect } => commands::props(common, properties, *expect),
        Command::Identities { common, claims } => commands::identities(common, claims),
        Command::VerifyPaper(c) => paper::verify_paper(c),
        Command::OracleCheck(c) => commands::oracle_check(c),
        Command::ListCatalog(c) => commands::list_catalog(c),
    };
    outcome.finish(common.json.as_deref())
}
