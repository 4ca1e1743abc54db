//! Per-UE energy terms: achievable rate, the transmit energy needed to meet the rate
//! threshold at several distances, and the local-computation energy.
//!
//! ```bash
//! cargo run --example energy_model
//! ```

use fedsched::energy::{compute_energy, data_rate, required_power, transmit_energy, RateLogBase};
use fedsched::scenario::{channel_gain, path_loss_db, ScenarioConfig, UeProfile};

fn main() -> fedsched::Result<()> {
    let c = ScenarioConfig::default();
    let bw = c.subchannel_bandwidth_hz();
    println!(
        "subchannel bandwidth {bw} Hz, threshold {} bit/s, model {} bits",
        c.rate_threshold_bps, c.model_size_bits
    );

    println!("\n{:>8} {:>10} {:>12} {:>14} {:>14}", "d [m]", "L [dB]", "P* [W]", "rate [bit/s]", "E_TP [J]");
    for d in [1.0, 5.0, 10.0, 25.0, 50.0] {
        let gain = channel_gain(d, 1.0);
        let p = required_power(c.rate_threshold_bps, gain, bw, c.noise_w, RateLogBase::Natural)?;
        let rate = data_rate(p, gain, bw, c.noise_w)?;
        let e = transmit_energy(c.model_size_bits, c.rate_threshold_bps, gain, bw, c.noise_w)?;
        println!("{d:>8} {:>10.2} {p:>12.4e} {rate:>14.1} {e:>14.4e}", path_loss_db(d));
    }

    let ue = UeProfile {
        id: 0,
        data_size_bits: 1_000_000,
        cycles_per_bit: 20.0,
        cpu_freq_hz: 2e9,
        capacitance: 2e-28,
        distance_m: 10.0,
    };
    println!("\nE_CP for 1e6 bits at 2 GHz: {:.4e} J per epoch", compute_energy(&ue));
    Ok(())
}
