//! Differential evolution over fixed-cardinality binary chromosomes and the sliding-window
//! scheduler built on it.
//!
//! UEs are sorted by this round's energy, a window of `W` consecutive UEs slides over the
//! sorted order, each window evolves one candidate schedule independently, and the best
//! candidate across windows wins.

mod baseline;
mod engine;
mod operators;
mod sdes;
mod window;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use baseline::random_schedule;
pub use engine::{best_index, Evolution};
pub use operators::{
    apply_span, binarize_repair, crossover_exponential, crossover_span, de_select, init_population, mutate,
    repair_cardinality, rws_select3,
};
pub use sdes::{de_schedule, evolve_window, sdes_schedule, SchedStream, SdesOutcome, WindowOutcome};
pub use window::{binomial_capped, build_windows, generation_budget, sort_by_energy, Window};

/// Differential evolution settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DeParams {
    /// Population size `M`.
    pub population_m: usize,
    /// Differential weight `F`.
    pub f_weight: f64,
    /// Exponential-crossover continuation probability.
    pub crossover_rate: f64,
    /// Generation cap `G_DE`.
    pub g_de: usize,
    /// Forces the generation count instead of the combinatorial budget.
    pub generations: Option<usize>,
    /// Use the stop-when-below-rate crossover loop instead of the standard one.
    pub literal_crossover: bool,
}

impl Default for DeParams {
    fn default() -> Self {
        Self {
            population_m: 40,
            f_weight: 0.5,
            crossover_rate: 0.9,
            g_de: 100,
            generations: None,
            literal_crossover: false,
        }
    }
}

impl DeParams {
    pub fn validate(&self) -> Result<()> {
        if self.population_m < 4 {
            return Err(Error::config("de_params.population_m", "must be at least 4"));
        }
        if !(self.f_weight.is_finite() && self.f_weight > 0.0) {
            return Err(Error::config("de_params.f_weight", "must be finite and > 0"));
        }
        if !(0.0..=1.0).contains(&self.crossover_rate) {
            return Err(Error::config("de_params.crossover_rate", "must lie in [0, 1]"));
        }
        if self.g_de == 0 {
            return Err(Error::config("de_params.g_de", "must be at least 1"));
        }
        Ok(())
    }
}

/// A chromosome over one window, with its cached objective terms and current fitness.
#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub genes: Vec<u8>,
    pub objective: f64,
    pub energy: f64,
    pub fitness: f64,
}

impl Individual {
    pub fn ones(&self) -> usize {
        self.genes.iter().filter(|&&g| g == 1).count()
    }
}
