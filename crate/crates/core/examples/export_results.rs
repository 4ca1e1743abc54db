//! Loads a JSON scenario, runs every configured policy and writes the per-round metrics as
//! CSV (plus a summary sidecar) or as a single JSON document.
//!
//! ```bash
//! cargo run --release --example export_results -- crates/core/configs/small.json out csv
//! ```

use fedsched::harness::{run_experiment, write_results, OutputFormat};
use fedsched::scenario::ScenarioConfig;

fn main() -> fedsched::Result<()> {
    let mut args = std::env::args().skip(1);
    let config_path = args.next().unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/configs/small.json").into());
    let out = args.next().unwrap_or_else(|| "results".into());
    let format: OutputFormat = args.next().as_deref().unwrap_or("csv").parse()?;

    let config = ScenarioConfig::from_json_file(&config_path)?;
    let result = run_experiment(&config)?;
    for s in &result.summary {
        println!(
            "{:<12} energy {:.4e} J, final loss {:.5}",
            s.policy,
            s.total_energy_j,
            s.final_loss.unwrap_or(f64::NAN)
        );
    }
    for path in write_results(&result, &out, format)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}
