use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use fedsched::harness::{self, OutputFormat, PolicyKind};
use fedsched::objective::Measure;
use fedsched::scenario::ScenarioConfig;
use fedsched::Error;

#[derive(Parser)]
#[command(name = "fedsched", version, about = "Energy-aware client scheduling simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write per-round results.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Run a single policy: sdes, de, random or window-n.
        #[arg(long)]
        policy: Option<PolicyKind>,
        /// staleness, loss or sl.
        #[arg(long)]
        measure: Option<Measure>,
        #[arg(long)]
        window: Option<usize>,
        #[arg(long)]
        zeta: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long)]
        rounds: Option<usize>,
        #[arg(long, default_value = "results")]
        out: PathBuf,
        /// csv or json.
        #[arg(long, default_value = "csv")]
        format: OutputFormat,
    },
    /// Check the schedulers against brute-force search on a small instance.
    Oracle {
        #[arg(long)]
        config: PathBuf,
    },
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Run { config, seed, policy, measure, window, zeta, beta, rounds, out, format } => {
            let mut cfg = ScenarioConfig::from_json_file(&config)?;
            if let Some(v) = seed {
                cfg.seed = v;
            }
            if let Some(p) = policy {
                cfg.policies = vec![p];
            }
            if let Some(m) = measure {
                cfg.measure = m;
            }
            if let Some(w) = window {
                cfg.window_len = w;
            }
            if let Some(z) = zeta {
                cfg.zeta = z;
            }
            if let Some(b) = beta {
                cfg.beta = b;
            }
            if let Some(t) = rounds {
                cfg.rounds = t;
            }
            cfg.validate()?;
            let result = harness::run_experiment(&cfg)?;
            for s in &result.summary {
                println!(
                    "{:<12} measure={:<9} total_energy_j={:.6e} final_loss={}",
                    s.policy,
                    s.measure,
                    s.total_energy_j,
                    s.final_loss.map_or("-".to_string(), |l| format!("{l:.6}")),
                );
            }
            for path in harness::write_results(&result, &out, format)? {
                println!("wrote {}", path.display());
            }
            Ok(())
        }
        Command::Oracle { config } => {
            let cfg = ScenarioConfig::from_json_file(&config)?;
            let checks = harness::run_oracle_suite(&cfg)?;
            let failed = checks.iter().filter(|c| !c.passed).count();
            for c in &checks {
                println!("[{}] {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            if failed > 0 {
                return Err(Error::Contract(format!("{failed} of {} oracle checks failed", checks.len())));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_config() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
