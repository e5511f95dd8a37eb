use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use kplab_cli::{run, write_outputs, CliError, ExperimentConfig, Expectation};

/// Runs one experiment described by a TOML configuration.
///
/// Exit status: 0 on success, 1 when the experiment could not run,
/// 2 when the verdict contradicts the declared expectation.
#[derive(Parser)]
#[command(name = "kplab", version)]
struct Args {
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides `output` in the configuration).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Base seed; the seed list becomes `seed, seed + 1, ...`.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    expect: Option<Expectation>,
}

fn fail(e: &CliError) -> ExitCode {
    match e.violations() {
        Some(v) => {
            let list = serde_json::json!({ "violations": v });
            eprintln!("{list}");
        }
        None => eprintln!("error: {e}"),
    }
    ExitCode::from(1)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let mut config = match ExperimentConfig::load(&args.config) {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    if let Some(e) = args.expect {
        config.expectation = Some(e);
    }
    if let Some(seed) = args.seed {
        config = config.resolve();
        config.reseed(seed);
    }
    let out = args
        .out
        .or_else(|| config.output.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    let env = match run(config, args.workers) {
        Ok(env) => env,
        Err(e) => return fail(&e),
    };
    if let Err(e) = write_outputs(&env, &out) {
        return fail(&e);
    }
    println!("{}", serde_json::to_string_pretty(&env.summary).unwrap_or_default());
    if let (Some(v), Some(met)) = (env.verdict, env.expectation_met) {
        eprintln!("verdict {}: expectation {}", v.name(), if met { "met" } else { "not met" });
    }
    ExitCode::from(env.exit_code() as u8)
}
