use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hhbv_cli::{run, Format, RunConfig};

#[derive(Parser)]
#[command(name = "hhbv", version, about = "Hochschild cohomology, inner products and BV operators over GF(2)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(clap::Args)]
struct Opts {
    /// Builtin algebra name, or file:<path>
    #[arg(long, global = true)]
    algebra: Option<String>,
    /// Catalog inner product (or string-topology for bv-table)
    #[arg(long, global = true)]
    hip: Option<String>,
    /// Arity bound for cochains and p, q bound for inner products
    #[arg(long, global = true)]
    bound: Option<usize>,
    #[arg(long, global = true, default_value_t = 8)]
    k_max: usize,
    #[arg(long, global = true, allow_hyphen_values = true)]
    degree_min: Option<i32>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    degree_max: Option<i32>,
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,
    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Record wall-clock time in the report
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Check the dg-algebra axioms
    CheckDga,
    /// Check DF = 0 for a catalog inner product
    VerifyHip,
    /// Check the vertex, edge and triangle boundary identities
    LocalIdentities,
    /// Hochschild cohomology bases with regular and dual coefficients
    HhBasis,
    /// Product and Δ tables on HH of the sphere
    BvTable,
    /// Isomorphism searches against the string topology table
    CompareBv,
    /// The inner product that is not a duality structure
    Counterexample,
    /// Every command with default settings
    ReportAll,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::CheckDga => "check-dga",
            Command::VerifyHip => "verify-hip",
            Command::LocalIdentities => "local-identities",
            Command::HhBasis => "hh-basis",
            Command::BvTable => "bv-table",
            Command::CompareBv => "compare-bv",
            Command::Counterexample => "counterexample",
            Command::ReportAll => "report-all",
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let o = cli.opts;
    let cfg = RunConfig {
        command: cli.command.name().to_string(),
        algebra: o.algebra,
        hip: o.hip,
        bound: o.bound,
        k_max: o.k_max,
        degree_min: o.degree_min,
        degree_max: o.degree_max,
        format: match o.format {
            FormatArg::Text => Format::Text,
            FormatArg::Json => Format::Json,
        },
        out: o.out,
        timing: o.timing,
    };
    let report = match run(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let text = report.render(cfg.format);
    match &cfg.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("error: writing {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    if report.all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
