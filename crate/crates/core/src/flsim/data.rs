use rand::distr::weighted::WeightedIndex;
use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::error::{Error, Result};
use crate::rng::{label, substream, StreamRng};
use crate::scenario::{ScenarioConfig, UeProfile};

/// One UE's samples, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct UeDataset {
    pub dim: usize,
    pub features: Vec<f64>,
    pub labels: Vec<u32>,
}

impl UeDataset {
    pub fn new(dim: usize, features: Vec<f64>, labels: Vec<u32>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::Contract("a UE dataset needs at least one sample".into()));
        }
        if features.len() != dim * labels.len() {
            return Err(Error::Contract(format!(
                "{} feature values for {} samples of dimension {dim}",
                features.len(),
                labels.len()
            )));
        }
        Ok(Self { dim, features, labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn samples(&self) -> impl Iterator<Item = (&[f64], &u32)> {
        self.features.chunks_exact(self.dim.max(1)).take(self.len()).zip(&self.labels)
    }

    /// Per-class sample counts.
    pub fn histogram(&self, classes: usize) -> Vec<usize> {
        let mut h = vec![0; classes];
        for &y in &self.labels {
            h[y as usize] += 1;
        }
        h
    }
}

/// Class-mean vectors of norm `separation`, with directions drawn uniformly on the sphere.
pub fn class_means(seed: u64, classes: usize, dim: usize, separation: f64) -> Vec<Vec<f64>> {
    let mut rng = substream(seed, label::CLASS_MEANS, &[]);
    (0..classes)
        .map(|_| {
            let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
            v.into_iter().map(|x| x * separation / norm).collect()
        })
        .collect()
}

/// Symmetric Dirichlet draw over `classes` labels.
pub fn label_mix(classes: usize, alpha: f64, rng: &mut StreamRng) -> Vec<f64> {
    let gamma = Gamma::new(alpha, 1.0).expect("alpha validated positive");
    let draws: Vec<f64> = (0..classes).map(|_| gamma.sample(rng)).collect();
    let total: f64 = draws.iter().sum();
    if total > 0.0 && total.is_finite() {
        draws.into_iter().map(|g| g / total).collect()
    } else {
        // every gamma draw underflowed: all mass on one class
        let mut mix = vec![0.0; classes];
        mix[rng.random_range(0..classes)] = 1.0;
        mix
    }
}

/// Gaussian-cluster classification data, one dataset per UE. Sample counts follow the UE's
/// data volume through `bits_per_sample`; label mixes come from a Dirichlet draw per UE.
pub fn synthesize_datasets(config: &ScenarioConfig, profiles: &[UeProfile]) -> Result<Vec<UeDataset>> {
    let p = &config.data_params;
    let means = class_means(config.seed, p.classes, p.feature_dim, p.class_separation);
    profiles
        .iter()
        .map(|profile| {
            let mut rng = substream(config.seed, label::DATA, &[profile.id as u64]);
            let mix = label_mix(p.classes, p.non_iid_alpha, &mut rng);
            let picker =
                WeightedIndex::new(&mix).map_err(|e| Error::Contract(format!("UE {} label mix: {e}", profile.id)))?;
            let count = sample_count(profile.data_size_bits, p.bits_per_sample);
            let mut features = Vec::with_capacity(count * p.feature_dim);
            let mut labels = Vec::with_capacity(count);
            for _ in 0..count {
                let y = picker.sample(&mut rng);
                labels.push(y as u32);
                for mu in &means[y] {
                    let noise: f64 = rng.sample(StandardNormal);
                    features.push(mu + noise);
                }
            }
            UeDataset::new(p.feature_dim, features, labels)
        })
        .collect()
}

/// Samples held by a UE with `bits` of data, at least one.
pub fn sample_count(bits: u64, bits_per_sample: u64) -> usize {
    ((bits as f64 / bits_per_sample as f64).round() as usize).max(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::Scenario;

    #[test]
    fn counts_follow_data_volume() {
        let scenario =
            Scenario::new(ScenarioConfig { num_ues: 20, num_subchannels: 5, window_len: 20, ..Default::default() })
                .unwrap();
        let data = synthesize_datasets(&scenario.config, &scenario.profiles).unwrap();
        let bps = scenario.config.data_params.bits_per_sample as f64;
        for (d, p) in data.iter().zip(&scenario.profiles) {
            assert!((d.len() as f64 - p.data_size_bits as f64 / bps).abs() <= 0.5 + 1e-9);
            assert!(d.labels.iter().all(|&y| y < 10));
        }
    }

    #[test]
    fn means_have_requested_norm() {
        for m in class_means(4, 10, 16, 2.5) {
            let norm = m.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!((norm - 2.5).abs() < 1e-12);
        }
    }

    #[test]
    fn tiny_alpha_still_yields_a_distribution() {
        let mut rng = substream(1, "mix", &[]);
        for _ in 0..100 {
            let mix = label_mix(10, 1e-3, &mut rng);
            assert!((mix.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }
}
