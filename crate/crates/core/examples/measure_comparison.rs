//! Runs SDES with each convergence measure (staleness, loss, staleness x loss) on the same
//! scenario and reports energy, final loss and how evenly UEs were scheduled.
//!
//! ```bash
//! cargo run --release --example measure_comparison -- [rounds]
//! ```

use fedsched::harness::{run_experiment, PolicyKind};
use fedsched::objective::Measure;
use fedsched::scenario::ScenarioConfig;

fn main() -> fedsched::Result<()> {
    let rounds = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(50);
    println!("{:<10} {:>14} {:>11} {:>16}", "measure", "energy J", "final loss", "UEs ever picked");
    for measure in Measure::ALL {
        let config = ScenarioConfig { measure, rounds, policies: vec![PolicyKind::Sdes], ..Default::default() };
        let result = run_experiment(&config)?;
        let mut picked = vec![false; config.num_ues];
        for r in &result.records {
            for &k in &r.selected_ids {
                picked[k] = true;
            }
        }
        let s = &result.summary[0];
        println!(
            "{:<10} {:>14.4e} {:>11.5} {:>16}",
            measure,
            s.total_energy_j,
            s.final_loss.unwrap_or(f64::NAN),
            picked.iter().filter(|&&p| p).count()
        );
    }
    Ok(())
}
