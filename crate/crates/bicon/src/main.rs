use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::bail;
use clap::{Args, Parser, Subcommand};

use bicon::cli::{
    self, cmd_check, cmd_gadget, cmd_run, CheckConfig, GadgetConfig, InputSpec, Mode, RunConfig,
};

#[derive(Parser)]
#[command(name = "bicon", about = "Distributed edge-biconnectivity on a synchronous simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct InputArgs {
    /// Edge-list file (two ids per line, `#` comments).
    #[arg(long, conflicts_with = "gen")]
    input: Option<PathBuf>,
    /// Generator spec KIND:PARAMS (path:N, cycle:N, tree:N, barbell:K, random:N,P).
    #[arg(long)]
    gen: Option<String>,
    /// Seed for generators and derived choices.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl InputArgs {
    fn to_spec(&self) -> anyhow::Result<InputSpec> {
        match (&self.input, &self.gen) {
            (Some(path), None) => Ok(InputSpec::File(path.clone())),
            (None, Some(spec)) => Ok(InputSpec::Gen(cli::parse_gen_spec(spec)?)),
            _ => bail!("exactly one of --input or --gen is required"),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run one protocol on one graph and print a metrics summary.
    Run {
        #[command(flatten)]
        input: InputArgs,
        /// Initiator node id, or `all` (forced in local and doubling modes).
        #[arg(long)]
        initiator: Option<String>,
        #[arg(long, value_enum, default_value_t = Mode::Congest)]
        mode: Mode,
        #[arg(long)]
        max_rounds: Option<u64>,
        /// Write the result JSON here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write a JSONL message trace here.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Write a DOT rendering here.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Run the protocol and both oracles over exhaustive and random corpora.
    Check {
        /// Exhaustive sweep over all connected graphs up to this size (0 = skip).
        #[arg(long, default_value_t = 7)]
        exhaustive_n: usize,
        #[arg(long, default_value_t = 500)]
        random_count: usize,
        #[arg(long, default_value_t = 60)]
        random_max_n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Write the JSON report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check message coverage on G, then reclassify after attaching the gadget.
    Gadget {
        #[command(flatten)]
        input: InputArgs,
        /// Edge to subdivide, as U,V.
        #[arg(long)]
        edge: String,
        #[arg(long, default_value_t = 0)]
        initiator: usize,
    },
}

fn main() -> ExitCode {
    match run() {
        Ok(ok) => {
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn run() -> anyhow::Result<bool> {
    match Cli::parse().command {
        Command::Run { input, initiator, mode, max_rounds, out, trace, dot } => {
            let config = RunConfig {
                input: input.to_spec()?,
                seed: input.seed,
                initiator: initiator.as_deref().map(cli::parse_initiator).transpose()?,
                mode,
                max_rounds,
                out,
                trace,
                dot,
            };
            let summary = cmd_run(&config)?;
            print!("{summary}");
            Ok(true)
        }
        Command::Check { exhaustive_n, random_count, random_max_n, seed, out } => {
            let config = CheckConfig {
                exhaustive_max_n: exhaustive_n,
                random_count,
                random_max_n,
                base_seed: seed,
                ..CheckConfig::default()
            };
            let report = cmd_check(&config)?;
            let json = report.to_json();
            match out {
                Some(path) => std::fs::write(&path, &json)?,
                None => print!("{json}"),
            }
            if !report.ok {
                eprintln!("check failed: mismatches found");
            }
            Ok(report.ok)
        }
        Command::Gadget { input, edge, initiator } => {
            let (u, v) = edge
                .split_once(',')
                .ok_or_else(|| anyhow::anyhow!("--edge takes U,V"))?;
            let config = GadgetConfig {
                input: input.to_spec()?,
                seed: input.seed,
                edge: (u.trim().parse()?, v.trim().parse()?),
                initiator,
            };
            let report = cmd_gadget(&config)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(report.ok)
        }
    }
}
