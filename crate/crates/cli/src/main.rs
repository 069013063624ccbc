//! `ramsey`: command-line front end for the structural Ramsey workbench.

mod commands;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use ramsey_core::formats::{inputs_digest, RunReport};

use commands::{Ctx, Failure};

#[derive(Parser, Debug)]
#[command(name = "ramsey", version, about = "Finite structural Ramsey workbench")]
struct Cli {
    /// Write a JSON run report to this path.
    #[arg(long, global = true, value_name = "PATH")]
    report: Option<PathBuf>,
    /// Worker threads for parallel searches.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    /// Seed for randomized colorings.
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide C → (B)^A_{k,ℓ}.
    ArrowCheck(commands::ArrowCheck),
    /// Least ℓ ≤ ℓ_max for which some class member C satisfies C → (B)^A_{k,ℓ}.
    DegreeSearch(commands::DegreeSearch),
    /// List the Devlin embedding types of n-sets.
    DevlinEnumerate(commands::DevlinEnumerate),
    /// Devlin type of a tree set.
    DevlinColor(commands::DevlinColor),
    /// Prune a meet-closed tree set to a perfect subtree.
    TreePrune(commands::TreePrune),
    /// Build the skew tree W₀ and check its properties.
    W0(commands::W0),
    /// Łoś evaluation of a formula over a sequence.
    UltraEval(commands::UltraEval),
    /// Internal color of a copy under per-coordinate colorings.
    UltraColor(commands::UltraColor),
    /// Per-coordinate shadow of the ultraproduct transfer argument.
    TransferShadow(commands::TransferShadow),
    /// Build a cofinal chain and write it as a sequence file.
    ChainBuild(commands::ChainBuild),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::ArrowCheck(_) => "arrow-check",
            Command::DegreeSearch(_) => "degree-search",
            Command::DevlinEnumerate(_) => "devlin-enumerate",
            Command::DevlinColor(_) => "devlin-color",
            Command::TreePrune(_) => "tree-prune",
            Command::W0(_) => "w0",
            Command::UltraEval(_) => "ultra-eval",
            Command::UltraColor(_) => "ultra-color",
            Command::TransferShadow(_) => "transfer-shadow",
            Command::ChainBuild(_) => "chain-build",
        }
    }

    fn run(&self, ctx: &mut Ctx) -> Result<commands::Outcome, Failure> {
        match self {
            Command::ArrowCheck(c) => c.run(ctx),
            Command::DegreeSearch(c) => c.run(ctx),
            Command::DevlinEnumerate(c) => c.run(ctx),
            Command::DevlinColor(c) => c.run(ctx),
            Command::TreePrune(c) => c.run(ctx),
            Command::W0(c) => c.run(ctx),
            Command::UltraEval(c) => c.run(ctx),
            Command::UltraColor(c) => c.run(ctx),
            Command::TransferShadow(c) => c.run(ctx),
            Command::ChainBuild(c) => c.run(ctx),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let args: Vec<String> = std::env::args().skip(1).collect();
    let mut ctx = Ctx::new(cli.threads.unwrap_or(1), cli.seed.unwrap_or(0), &args, &cli.report);
    let (code, result) = match cli.command.run(&mut ctx) {
        Ok(outcome) => {
            print!("{}", outcome.text);
            (outcome.exit, outcome.result)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            (f.exit, serde_json::json!({ "error": f.message }))
        }
    };
    if let Some(path) = &cli.report {
        let report = RunReport {
            subcommand: cli.command.name().to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            inputs_digest: inputs_digest(ctx.digest_parts().iter().map(Vec::as_slice)),
            result,
            exit_code: code,
            elapsed_ms: start.elapsed().as_millis() as u64,
        };
        if let Err(e) = fs::write(path, report.to_json() + "\n") {
            eprintln!("error: cannot write report {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    ExitCode::from(code as u8)
}
