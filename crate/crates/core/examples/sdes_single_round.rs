//! One scheduling decision: prices every UE for round 0, runs SDES and compares it with a
//! random draw and the all-window best of W=N.
//!
//! ```bash
//! cargo run --release --example sdes_single_round -- [window_len]
//! ```

use fedsched::de::{random_schedule, sdes_schedule, sort_by_energy};
use fedsched::harness::{PolicyKind, Simulation};
use fedsched::scenario::ScenarioConfig;

fn main() -> fedsched::Result<()> {
    let w = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(50);
    let sim = Simulation::new(ScenarioConfig { window_len: w, ..Default::default() })?;
    let c = sim.config();
    let state = sim.start();
    let breakdown = sim.energy(0)?;
    let ctx = sim.eval_context(&state, &breakdown)?;

    let order = sort_by_energy(&breakdown.per_ue_total_j);
    println!(
        "cheapest UE {} at {:.3e} J, dearest UE {} at {:.3e} J",
        order[0],
        breakdown.per_ue_total_j[order[0]],
        order[c.num_ues - 1],
        breakdown.per_ue_total_j[order[c.num_ues - 1]]
    );

    let sdes = sdes_schedule(&ctx, c.num_subchannels, w, &c.de_params, &sim.sched_stream(PolicyKind::Sdes, 0))?;
    println!(
        "\nSDES W={w}: {} windows, {} evaluations, winner at offset {}",
        sdes.windows, sdes.evaluations, sdes.window_offset
    );
    println!(
        "  objective {:.6e}, energy {:.4e} J, cr {:.3}",
        sdes.evaluation.objective, sdes.evaluation.energy, sdes.evaluation.cr
    );
    println!("  selected {:?}", sdes.mask.selected_ids());

    let random = random_schedule(c.num_ues, c.num_subchannels, &mut sim.sched_stream(PolicyKind::Random, 0).window(0));
    let e = ctx.evaluate_mask(&random)?;
    println!("\nrandom: objective {:.6e}, energy {:.4e} J, cr {:.3}", e.objective, e.energy, e.cr);
    Ok(())
}
