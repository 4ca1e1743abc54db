//! Synthesizes the non-IID per-UE datasets, writes them in the binary dataset format,
//! reads them back and prints sizes and label histograms of the first few UEs.
//!
//! ```bash
//! cargo run --example dataset_dump -- [path]
//! ```

use fedsched::flsim::io::{read_datasets, write_datasets};
use fedsched::flsim::synthesize_datasets;
use fedsched::scenario::{Scenario, ScenarioConfig};

fn main() -> fedsched::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "datasets.fsds".into());
    let scenario = Scenario::new(ScenarioConfig::default())?;
    let classes = scenario.config.data_params.classes;
    let datasets = synthesize_datasets(&scenario.config, &scenario.profiles)?;
    write_datasets(&path, &datasets, classes)?;
    let (back, classes_back) = read_datasets(&path)?;
    assert_eq!(back, datasets);
    assert_eq!(classes_back, classes);

    let total: usize = back.iter().map(|d| d.len()).sum();
    println!("wrote {} UEs, {total} samples to {path}", back.len());
    for (k, d) in back.iter().enumerate().take(8) {
        println!("UE {k:>3}: {:>6} samples, labels {:?}", d.len(), d.histogram(classes));
    }
    Ok(())
}
