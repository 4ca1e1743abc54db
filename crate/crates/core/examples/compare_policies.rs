//! Runs the default experiment (K=100, N=25, zeta=5, beta=0.7, 100 rounds) for the random
//! benchmark, full-window SDES and W=N SDES, then prints energy and loss per policy.
//!
//! ```bash
//! cargo run --release --example compare_policies -- [seed]
//! ```

use std::time::Instant;

use fedsched::harness::run_experiment;
use fedsched::scenario::ScenarioConfig;

fn main() -> fedsched::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let config = ScenarioConfig { seed, ..Default::default() };
    let started = Instant::now();
    let result = run_experiment(&config)?;
    println!("seed {seed}: {} rounds in {:.1?}", config.rounds, started.elapsed());
    println!("{:<12} {:>16} {:>12} {:>16}", "policy", "total energy J", "final loss", "mean objective");
    for s in &result.summary {
        println!(
            "{:<12} {:>16.4e} {:>12.5} {:>16.4e}",
            s.policy,
            s.total_energy_j,
            s.final_loss.unwrap_or(f64::NAN),
            s.mean_objective.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
