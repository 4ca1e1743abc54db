//! Uplink transmit energy, local computation energy and per-round totals.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objective::ScheduleMask;
use crate::scenario::{ChannelRealization, UeProfile};

/// Largest exponent accepted by [`transmit_energy`] before reporting overflow.
pub const MAX_EXPONENT: f64 = 700.0;

/// Logarithm base used in the Shannon-type rate expression.
///
/// The default is the natural log; `two` gives the conventional bits-per-second capacity.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RateLogBase {
    #[default]
    Natural,
    Two,
}

impl RateLogBase {
    fn ln_base(self) -> f64 {
        match self {
            RateLogBase::Natural => 1.0,
            RateLogBase::Two => std::f64::consts::LN_2,
        }
    }
}

fn require_positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be finite and > 0, got {value}")))
    }
}

/// Achievable rate `B_n * ln(1 + gain * P / N0)`.
pub fn data_rate(power_w: f64, gain: f64, bandwidth_hz: f64, noise_w: f64) -> Result<f64> {
    data_rate_with_base(power_w, gain, bandwidth_hz, noise_w, RateLogBase::Natural)
}

pub fn data_rate_with_base(power_w: f64, gain: f64, bandwidth_hz: f64, noise_w: f64, base: RateLogBase) -> Result<f64> {
    require_positive("power_w", power_w)?;
    require_positive("gain", gain)?;
    require_positive("bandwidth_hz", bandwidth_hz)?;
    require_positive("noise_w", noise_w)?;
    Ok(bandwidth_hz * (gain * power_w / noise_w).ln_1p() / base.ln_base())
}

/// Transmit power that makes the achievable rate exactly `rate_threshold_bps`.
pub fn required_power(
    rate_threshold_bps: f64,
    gain: f64,
    bandwidth_hz: f64,
    noise_w: f64,
    base: RateLogBase,
) -> Result<f64> {
    require_positive("rate_threshold_bps", rate_threshold_bps)?;
    require_positive("gain", gain)?;
    require_positive("bandwidth_hz", bandwidth_hz)?;
    require_positive("noise_w", noise_w)?;
    let exponent = rate_threshold_bps / bandwidth_hz * base.ln_base();
    if exponent > MAX_EXPONENT {
        return Err(Error::Overflow { ratio: exponent, limit: MAX_EXPONENT });
    }
    Ok(noise_w / gain * exponent.exp_m1())
}

/// Energy to upload `model_size_bits` at exactly the threshold rate:
/// `(J / R) * (N0 / h^2) * (e^{R / B_n} - 1)`.
pub fn transmit_energy(
    model_size_bits: f64,
    rate_threshold_bps: f64,
    gain: f64,
    bandwidth_hz: f64,
    noise_w: f64,
) -> Result<f64> {
    transmit_energy_with_base(model_size_bits, rate_threshold_bps, gain, bandwidth_hz, noise_w, RateLogBase::Natural)
}

pub fn transmit_energy_with_base(
    model_size_bits: f64,
    rate_threshold_bps: f64,
    gain: f64,
    bandwidth_hz: f64,
    noise_w: f64,
    base: RateLogBase,
) -> Result<f64> {
    require_positive("model_size_bits", model_size_bits)?;
    let power = required_power(rate_threshold_bps, gain, bandwidth_hz, noise_w, base)?;
    Ok(model_size_bits / rate_threshold_bps * power)
}

/// Energy of one local epoch: `(alpha / 2) * c * D * f^2`.
pub fn compute_energy(profile: &UeProfile) -> f64 {
    profile.capacitance / 2.0 * profile.cycles_per_bit * profile.data_size_bits as f64 * profile.cpu_freq_hz.powi(2)
}

/// Per-UE energy terms for one round.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyBreakdown {
    pub transmit_j: Vec<f64>,
    pub compute_j: Vec<f64>,
    /// `transmit_j[k] + kappa * compute_j[k]`
    pub per_ue_total_j: Vec<f64>,
    pub kappa: usize,
}

impl EnergyBreakdown {
    pub fn from_parts(transmit_j: Vec<f64>, compute_j: Vec<f64>, kappa: usize) -> Result<Self> {
        if transmit_j.len() != compute_j.len() {
            return Err(Error::Contract(format!(
                "transmit ({}) and compute ({}) lengths differ",
                transmit_j.len(),
                compute_j.len()
            )));
        }
        let per_ue_total_j = transmit_j.iter().zip(&compute_j).map(|(tp, cp)| tp + kappa as f64 * cp).collect();
        Ok(Self { transmit_j, compute_j, per_ue_total_j, kappa })
    }

    /// Evaluates every UE's energy under this round's channel.
    pub fn for_round(
        profiles: &[UeProfile],
        channels: &ChannelRealization,
        model_size_bits: f64,
        kappa: usize,
        base: RateLogBase,
    ) -> Result<Self> {
        if profiles.len() != channels.gains.len() {
            return Err(Error::Contract(format!(
                "{} profiles but {} channel gains",
                profiles.len(),
                channels.gains.len()
            )));
        }
        let transmit = channels
            .gains
            .iter()
            .map(|&gain| {
                transmit_energy_with_base(
                    model_size_bits,
                    channels.rate_threshold_bps,
                    gain,
                    channels.subchannel_bandwidth_hz,
                    channels.noise_w,
                    base,
                )
            })
            .collect::<Result<Vec<_>>>()?;
        let compute = profiles.iter().map(compute_energy).collect();
        Self::from_parts(transmit, compute, kappa)
    }

    pub fn len(&self) -> usize {
        self.per_ue_total_j.len()
    }

    pub fn is_empty(&self) -> bool {
        self.per_ue_total_j.is_empty()
    }
}

/// Total energy of the scheduled UEs, summed in ascending id order.
pub fn round_energy(mask: &ScheduleMask, breakdown: &EnergyBreakdown) -> Result<f64> {
    if mask.len() != breakdown.len() {
        return Err(Error::Contract(format!("mask length {} does not match {} UEs", mask.len(), breakdown.len())));
    }
    Ok(mask.selected().map(|k| breakdown.per_ue_total_j[k]).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn profile(d: u64, f: f64) -> UeProfile {
        UeProfile {
            id: 0,
            data_size_bits: d,
            cycles_per_bit: 20.0,
            cpu_freq_hz: f,
            capacitance: 2e-28,
            distance_m: 10.0,
        }
    }

    #[test]
    fn rate_at_e_minus_one_is_bandwidth() {
        let noise = 1e-8;
        let power = (std::f64::consts::E - 1.0) * noise;
        assert_relative_eq!(data_rate(power, 1.0, 1.0, noise).unwrap(), 1.0, max_relative = 1e-15);
        assert_relative_eq!(data_rate(1e-8, 1.0, 4e5, 1e-8).unwrap(), 277_258.872_223_978_1, max_relative = 1e-14);
    }

    #[test]
    fn zero_power_is_a_domain_error() {
        assert!(matches!(data_rate(0.0, 1.0, 1.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(transmit_energy(1.0, 1.0, -1.0, 1.0, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn transmit_energy_reference_point() {
        let e = transmit_energy(692_800.0, 5e5, 1.0, 4e5, 1e-8).unwrap();
        assert_relative_eq!(e, 3.450_619_201_859_127_4e-8, max_relative = 1e-13);
    }

    #[test]
    fn transmit_energy_small_exponent_limit() {
        let (j, n0, h2, b) = (692_800.0, 1e-8, 1e-10, 1e6);
        let r = 1e-9 * b;
        let e = transmit_energy(j, r, h2, b, n0).unwrap();
        let first_order = j / r * (n0 / h2) * (r / b);
        assert_relative_eq!(e, first_order, max_relative = 1e-6);
    }

    #[test]
    fn transmit_energy_halves_with_double_gain() {
        let a = transmit_energy(692_800.0, 5e5, 3e-12, 4e5, 1e-8).unwrap();
        let b = transmit_energy(692_800.0, 5e5, 6e-12, 4e5, 1e-8).unwrap();
        assert_relative_eq!(a, 2.0 * b, max_relative = 1e-15);
    }

    #[test]
    fn overflow_is_reported() {
        assert!(matches!(transmit_energy(1.0, 701.0, 1.0, 1.0, 1.0), Err(Error::Overflow { .. })));
        assert!(transmit_energy(1.0, 700.0, 1.0, 1.0, 1.0).unwrap().is_finite());
    }

    #[test]
    fn log2_base_inverts_consistently() {
        let p = required_power(5e5, 2e-12, 4e5, 1e-8, RateLogBase::Two).unwrap();
        let r = data_rate_with_base(p, 2e-12, 4e5, 1e-8, RateLogBase::Two).unwrap();
        assert_relative_eq!(r, 5e5, max_relative = 1e-12);
    }

    #[test]
    fn compute_energy_scaling() {
        assert_relative_eq!(compute_energy(&profile(1_000_000, 2e9)), 8.0e-3, max_relative = 1e-14);
        assert_eq!(compute_energy(&profile(2_000_000, 2e9)), 2.0 * compute_energy(&profile(1_000_000, 2e9)));
        assert_eq!(compute_energy(&profile(1_000_000, 4e9)), 4.0 * compute_energy(&profile(1_000_000, 2e9)));
    }

    #[test]
    fn round_energy_sums_selected() {
        let b = EnergyBreakdown::from_parts(vec![1.0, 2.0, 3.0, 4.0, 5.0], vec![0.0; 5], 3).unwrap();
        let mask = |bits: [u8; 5]| ScheduleMask::new(bits.iter().map(|&x| x == 1).collect());
        assert_eq!(round_energy(&mask([0; 5]), &b).unwrap(), 0.0);
        assert_eq!(round_energy(&mask([0, 0, 0, 1, 0]), &b).unwrap(), 4.0);
        assert_eq!(round_energy(&mask([1, 0, 1, 0, 1]), &b).unwrap(), 9.0);
        assert!(matches!(round_energy(&ScheduleMask::new(vec![true; 4]), &b), Err(Error::Contract(_))));
    }

    #[test]
    fn total_includes_kappa_epochs() {
        let b = EnergyBreakdown::from_parts(vec![1.0, 2.0], vec![0.5, 0.25], 4).unwrap();
        assert_eq!(b.per_ue_total_j, vec![3.0, 3.0]);
    }
}
