use clap::{Args, Parser, Subcommand};
use qclab::commands;
use qclab::config::CommonOpts;

/// Batch experiment harness: hard convex instance families, their local
/// oracles, string-guessing reductions and information audits.
#[derive(Parser)]
#[command(name = "lab", version, about, max_term_width = 100)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct OptimizeArgs {
    #[command(flatten)]
    common: CommonOpts,
    /// Query budget for subgradient descent and random search
    #[arg(long)]
    budget: Option<usize>,
}

#[derive(Args)]
struct AuditArgs {
    #[command(flatten)]
    common: CommonOpts,
    /// Queries per audited trajectory
    #[arg(long)]
    steps: Option<usize>,
    /// Slack constant for the perturbed constructions
    #[arg(long)]
    k_const: Option<f64>,
}

#[derive(Args)]
struct EmulationArgs {
    #[command(flatten)]
    common: CommonOpts,
    /// Also sweep the exhaustive small grid (box family)
    #[arg(long)]
    exhaustive: bool,
}

#[derive(Args)]
struct ScalingArgs {
    #[command(flatten)]
    common: CommonOpts,
    /// Comma-separated dimensions, e.g. 1,2,4,8
    #[arg(long)]
    grid_n: Option<String>,
    /// Comma-separated accuracies, e.g. 2^-6,2^-9,2^-12
    #[arg(long)]
    grid_eps: Option<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// String-guessing strategy statistics against the expectation bound
    Sgp(CommonOpts),
    /// Run optimizers over uniform random instances and compare query
    /// counts with the information floor
    Optimize(OptimizeArgs),
    /// Information ledgers (sgp) and unpredictability audits (perturbed)
    Audit(AuditArgs),
    /// Packing verification: exhaustive for the box, sampled round-trip
    /// identification for the Lp ball
    Packing(CommonOpts),
    /// Emulated-vs-reference oracle equivalence suites
    #[command(name = "emulation-check")]
    EmulationCheck(EmulationArgs),
    /// Query-count scaling grids in both accuracy regimes
    Scaling(ScalingArgs),
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Sgp(opts) => commands::sgp::run(&opts),
        Cmd::Optimize(args) => commands::optimize::run(&args.common, args.budget),
        Cmd::Audit(args) => commands::audit::run(&args.common, args.steps, args.k_const),
        Cmd::Packing(opts) => commands::packing::run(&opts),
        Cmd::EmulationCheck(args) => commands::emulation::run(&args.common, args.exhaustive),
        Cmd::Scaling(args) => {
            commands::scaling::run(&args.common, args.grid_n.as_deref(), args.grid_eps.as_deref())
        }
    };
    match result {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(qclab::EXIT_USAGE);
        }
    }
}
