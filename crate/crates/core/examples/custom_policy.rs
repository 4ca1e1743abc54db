//! Drives the simulator with a hand-written policy: always the N cheapest UEs of the round.
//! Any function from the round's `EvalContext` to a `ScheduleMask` can be plugged in the same way.
//!
//! ```bash
//! cargo run --release --example custom_policy
//! ```

use fedsched::de::sort_by_energy;
use fedsched::harness::Simulation;
use fedsched::objective::ScheduleMask;
use fedsched::scenario::ScenarioConfig;

fn main() -> fedsched::Result<()> {
    let sim = Simulation::new(ScenarioConfig { rounds: 30, ..Default::default() })?;
    let c = sim.config().clone();
    let mut state = sim.start();
    let datasets = &sim.datasets;
    for round in 0..c.rounds {
        let breakdown = sim.energy(round)?;
        let cheapest = sort_by_energy(&breakdown.per_ue_total_j);
        let mask = ScheduleMask::from_ids(c.num_ues, cheapest[..c.num_subchannels].iter().copied())?;
        let energy = sim.run_round_with_mask(&mut state, &mask, round)?;
        if round % 5 == 4 {
            let loss = fedsched::flsim::global_loss(&state.model, datasets)?;
            println!(
                "round {round:>3}: energy {energy:.4e} J, cumulative {:.4e} J, loss {loss:.5}",
                state.cumulative_energy_j
            );
        }
    }
    let never = state.scheduler.staleness().iter().filter(|&&t| t as usize > c.rounds).count();
    println!("{never} of {} UEs were never scheduled", c.num_ues);
    Ok(())
}
