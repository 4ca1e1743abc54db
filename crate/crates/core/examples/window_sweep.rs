//! Sweeps the window length W for one scheduling decision of the default scenario and
//! prints objective, energy and evaluation count per W. An optional second argument forces
//! the generation count of every window.
//!
//! ```bash
//! cargo run --release --example window_sweep -- [seed] [generations]
//! ```

use std::time::Instant;

use fedsched::de::{sdes_schedule, DeParams};
use fedsched::harness::{PolicyKind, Simulation};
use fedsched::scenario::ScenarioConfig;

fn main() -> fedsched::Result<()> {
    let mut args = std::env::args().skip(1);
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(0);
    let generations = args.next().and_then(|s| s.parse().ok());
    let config = ScenarioConfig { seed, ..Default::default() };
    let sim = Simulation::new(config)?;
    let state = sim.start();
    let breakdown = sim.energy(0)?;
    let ctx = sim.eval_context(&state, &breakdown)?;
    let n = sim.config().num_subchannels;
    let params = DeParams { generations, ..sim.config().de_params.clone() };

    println!("{:>4} {:>8} {:>16} {:>14} {:>12} {:>10}", "W", "windows", "objective", "energy J", "evaluations", "time");
    for w in [25, 30, 40, 50, 75, 100] {
        let started = Instant::now();
        let out = sdes_schedule(&ctx, n, w, &params, &sim.sched_stream(PolicyKind::Sdes, 0))?;
        println!(
            "{w:>4} {:>8} {:>16.6e} {:>14.6e} {:>12} {:>10.1?}",
            out.windows,
            out.evaluation.objective,
            out.evaluation.energy,
            out.evaluations,
            started.elapsed()
        );
    }
    Ok(())
}
