//! Experiment configuration, UE population synthesis and per-round channel draws.

use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::de::DeParams;
use crate::energy::RateLogBase;
use crate::error::{Error, Result};
use crate::harness::PolicyKind;
use crate::objective::Measure;
use crate::rng::{label, substream, StreamRng};

/// Bits in one decimal kilobyte.
pub const KB_BITS: f64 = 8_000.0;
/// Bits in one decimal megabyte.
pub const MB_BITS: f64 = 8_000_000.0;

/// Synthetic-data settings for the surrogate learning task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataParams {
    pub feature_dim: usize,
    pub classes: usize,
    /// Exponent `s` of the `1/i^s` weights used to split the aggregate data volume.
    pub zipf_exponent: f64,
    /// Dirichlet concentration of each UE's label mix; small values are strongly non-IID.
    pub non_iid_alpha: f64,
    /// Fixed mapping between data volume in bits and sample count.
    pub bits_per_sample: u64,
    /// Norm of every class-mean vector.
    pub class_separation: f64,
}

impl Default for DataParams {
    fn default() -> Self {
        Self {
            feature_dim: 16,
            classes: 10,
            zipf_exponent: 1.0,
            non_iid_alpha: 0.5,
            // one 28x28 greyscale image
            bits_per_sample: 784 * 8,
            class_separation: 2.5,
        }
    }
}

/// Static hardware and placement parameters shared by every UE.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UeParams {
    /// Total data volume across all UEs, in bits.
    pub aggregate_data_bits: u64,
    pub cycles_per_bit: f64,
    pub cpu_freq_hz: f64,
    pub capacitance: f64,
    pub distance_min_m: f64,
    pub distance_max_m: f64,
}

impl Default for UeParams {
    fn default() -> Self {
        Self {
            aggregate_data_bits: (47.04 * MB_BITS).round() as u64,
            cycles_per_bit: 20.0,
            cpu_freq_hz: 2e9,
            capacitance: 2e-28,
            distance_min_m: 5.0,
            distance_max_m: 50.0,
        }
    }
}

/// Full experiment configuration. JSON field names are exactly the serde names below;
/// unknown fields are rejected and omitted fields take the defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(rename = "K")]
    pub num_ues: usize,
    #[serde(rename = "N")]
    pub num_subchannels: usize,
    #[serde(rename = "T_rounds")]
    pub rounds: usize,
    pub total_bandwidth_hz: f64,
    pub noise_w: f64,
    pub rate_threshold_bps: f64,
    pub model_size_bits: f64,
    pub zeta: f64,
    pub beta: f64,
    pub kappa: usize,
    pub measure: Measure,
    pub window_len: usize,
    pub de_params: DeParams,
    pub seed: u64,
    pub data_params: DataParams,
    pub ue_params: UeParams,
    pub learning_rate: f64,
    pub rate_log_base: RateLogBase,
    pub policies: Vec<PolicyKind>,
    /// When false the `wall_time_ms` column is written as zero so outputs are byte-reproducible.
    pub record_wall_time: bool,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            num_ues: 100,
            num_subchannels: 25,
            rounds: 100,
            total_bandwidth_hz: 10e6,
            noise_w: 1e-8,
            rate_threshold_bps: 500e3,
            model_size_bits: 86.6 * KB_BITS,
            zeta: 5.0,
            beta: 0.7,
            kappa: 2,
            measure: Measure::Sl,
            window_len: 100,
            de_params: DeParams::default(),
            seed: 0,
            data_params: DataParams::default(),
            ue_params: UeParams::default(),
            learning_rate: 0.1,
            rate_log_base: RateLogBase::Natural,
            policies: vec![PolicyKind::Random, PolicyKind::Sdes, PolicyKind::WindowN],
            record_wall_time: false,
        }
    }
}

fn positive(field: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::config(field, format!("must be finite and > 0, got {value}")))
    }
}

impl ScenarioConfig {
    /// Reads a JSON configuration file and validates it.
    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let config: Self = serde_json::from_str(&text)
            .map_err(|e| Error::Config { field: "<file>", reason: format!("{}: {e}", path.display()) })?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.num_ues;
        let n = self.num_subchannels;
        if k == 0 {
            return Err(Error::config("K", "must be at least 1"));
        }
        if n == 0 || n > k {
            return Err(Error::config("N", format!("must satisfy 1 <= N <= K={k}, got {n}")));
        }
        if self.window_len < n || self.window_len > k {
            return Err(Error::config(
                "window_len",
                format!("must satisfy N={n} <= W <= K={k}, got {}", self.window_len),
            ));
        }
        positive("total_bandwidth_hz", self.total_bandwidth_hz)?;
        positive("noise_w", self.noise_w)?;
        positive("rate_threshold_bps", self.rate_threshold_bps)?;
        positive("model_size_bits", self.model_size_bits)?;
        if !(self.zeta.is_finite() && self.zeta >= 0.0) {
            return Err(Error::config("zeta", format!("must be finite and >= 0, got {}", self.zeta)));
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(Error::config("beta", format!("must lie in (0, 1), got {}", self.beta)));
        }
        if self.kappa == 0 {
            return Err(Error::config("kappa", "must be at least 1"));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate >= 0.0) {
            return Err(Error::config("learning_rate", "must be finite and >= 0"));
        }
        self.de_params.validate()?;

        let d = &self.data_params;
        if d.feature_dim == 0 {
            return Err(Error::config("data_params.feature_dim", "must be at least 1"));
        }
        if d.classes < 2 {
            return Err(Error::config("data_params.classes", "must be at least 2"));
        }
        if !(d.zipf_exponent.is_finite() && d.zipf_exponent >= 0.0) {
            return Err(Error::config("data_params.zipf_exponent", "must be finite and >= 0"));
        }
        positive("data_params.non_iid_alpha", d.non_iid_alpha)?;
        if d.bits_per_sample == 0 {
            return Err(Error::config("data_params.bits_per_sample", "must be at least 1"));
        }
        if !(d.class_separation.is_finite() && d.class_separation >= 0.0) {
            return Err(Error::config("data_params.class_separation", "must be finite and >= 0"));
        }

        let u = &self.ue_params;
        if u.aggregate_data_bits < k as u64 {
            return Err(Error::config(
                "ue_params.aggregate_data_bits",
                format!("must give every one of the {k} UEs at least one bit"),
            ));
        }
        positive("ue_params.cycles_per_bit", u.cycles_per_bit)?;
        positive("ue_params.cpu_freq_hz", u.cpu_freq_hz)?;
        positive("ue_params.capacitance", u.capacitance)?;
        positive("ue_params.distance_min_m", u.distance_min_m)?;
        positive("ue_params.distance_max_m", u.distance_max_m)?;
        if u.distance_max_m < u.distance_min_m {
            return Err(Error::config("ue_params.distance_max_m", "must be >= distance_min_m"));
        }
        Ok(())
    }

    /// Equal share of the total band for each subchannel.
    pub fn subchannel_bandwidth_hz(&self) -> f64 {
        self.total_bandwidth_hz / self.num_subchannels as f64
    }
}

/// Static per-UE parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UeProfile {
    pub id: usize,
    pub data_size_bits: u64,
    pub cycles_per_bit: f64,
    pub cpu_freq_hz: f64,
    pub capacitance: f64,
    pub distance_m: f64,
}

/// One round's channel state. Every UE sees a single gain because all subchannels are identical.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub gains: Vec<f64>,
    pub subchannel_bandwidth_hz: f64,
    pub noise_w: f64,
    pub rate_threshold_bps: f64,
}

/// Splits `aggregate` bits over `k` shares with weights `1/i^s`, largest first.
///
/// Shares are rounded to the nearest bit and the rounding residue goes to the largest share,
/// so the result always sums to `aggregate`.
pub fn zipf_shares(k: usize, exponent: f64, aggregate: u64) -> Result<Vec<u64>> {
    let weights: Vec<f64> = (1..=k).map(|i| (i as f64).powf(-exponent)).collect();
    let total: f64 = weights.iter().sum();
    let mut shares: Vec<u64> = weights.iter().map(|w| (aggregate as f64 * (w / total)).round() as u64).collect();
    let assigned: u64 = shares.iter().sum();
    if assigned > aggregate {
        let excess = assigned - aggregate;
        if shares[0] <= excess {
            return Err(Error::config("ue_params.aggregate_data_bits", "too small to split"));
        }
        shares[0] -= excess;
    } else {
        shares[0] += aggregate - assigned;
    }
    if let Some(pos) = shares.iter().position(|&s| s == 0) {
        return Err(Error::config(
            "ue_params.aggregate_data_bits",
            format!("share {pos} rounds to zero bits; increase the aggregate or lower zipf_exponent"),
        ));
    }
    Ok(shares)
}

/// Builds the K UE profiles. Distances are drawn first in ascending id order, then the Zipf
/// shares are dealt to UEs by a uniform shuffle.
pub fn generate_population(config: &ScenarioConfig, rng: &mut StreamRng) -> Result<Vec<UeProfile>> {
    config.validate()?;
    let u = &config.ue_params;
    let k = config.num_ues;
    let distances: Vec<f64> = (0..k)
        .map(|_| {
            if u.distance_max_m > u.distance_min_m {
                rng.random_range(u.distance_min_m..=u.distance_max_m)
            } else {
                u.distance_min_m
            }
        })
        .collect();
    let mut sizes = zipf_shares(k, config.data_params.zipf_exponent, u.aggregate_data_bits)?;
    sizes.shuffle(rng);
    Ok(distances
        .into_iter()
        .zip(sizes)
        .enumerate()
        .map(|(id, (distance_m, data_size_bits))| UeProfile {
            id,
            data_size_bits,
            cycles_per_bit: u.cycles_per_bit,
            cpu_freq_hz: u.cpu_freq_hz,
            capacitance: u.capacitance,
            distance_m,
        })
        .collect())
}

/// Path loss in dB at `distance_m` meters.
pub fn path_loss_db(distance_m: f64) -> f64 {
    99.3 + 20.0 * distance_m.log10()
}

/// Linear power gain for a given distance and small-scale power fade.
pub fn channel_gain(distance_m: f64, fade: f64) -> f64 {
    fade * 10f64.powf(-path_loss_db(distance_m) / 10.0)
}

/// Draws one Rayleigh power fade (exponential, mean 1), bounded away from zero.
pub fn rayleigh_power_fade(rng: &mut StreamRng) -> f64 {
    let fade: f64 = Exp1.sample(rng);
    fade.max(f64::MIN_POSITIVE)
}

/// Draws the channel gains for one round, one fade per UE in ascending id order.
pub fn draw_channels(
    config: &ScenarioConfig,
    profiles: &[UeProfile],
    _round: usize,
    rng: &mut StreamRng,
) -> Result<ChannelRealization> {
    if profiles.is_empty() {
        return Err(Error::Contract("draw_channels needs at least one UE".into()));
    }
    let gains = profiles.iter().map(|p| channel_gain(p.distance_m, rayleigh_power_fade(rng))).collect();
    Ok(ChannelRealization {
        gains,
        subchannel_bandwidth_hz: config.subchannel_bandwidth_hz(),
        noise_w: config.noise_w,
        rate_threshold_bps: config.rate_threshold_bps,
    })
}

/// A synthesized population plus the seed it came from.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub profiles: Vec<UeProfile>,
}

impl Scenario {
    pub fn new(config: ScenarioConfig) -> Result<Self> {
        let mut rng = substream(config.seed, label::POPULATION, &[]);
        let profiles = generate_population(&config, &mut rng)?;
        Ok(Self { config, profiles })
    }

    /// Channel draw for `round` on the scenario's dedicated per-round substream.
    pub fn channels(&self, round: usize) -> Result<ChannelRealization> {
        let mut rng = substream(self.config.seed, label::CHANNELS, &[round as u64]);
        draw_channels(&self.config, &self.profiles, round, &mut rng)
    }

    pub fn data_sizes_bits(&self) -> Vec<u64> {
        self.profiles.iter().map(|p| p.data_size_bits).collect()
    }
}
