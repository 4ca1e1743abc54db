//! Scheduler-side state and the scalar objective minimized by the schedulers.
//!
//! The objective of a mask `S` is `-cr(S) + zeta * E(S)` where
//! `cr(S) = (sum_k D_k V_k S_k)^(1-beta) / (1-beta)` and `V_k` is one of the staleness,
//! the stale loss, or their product.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::energy::EnergyBreakdown;
use crate::error::{Error, Result};

/// Per-UE convergence measure fed into the CR function.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    /// Rounds since the UE last uploaded.
    Staleness,
    /// Loss the UE reported at its last upload.
    Loss,
    /// Staleness times loss.
    #[default]
    Sl,
}

impl Measure {
    pub const ALL: [Measure; 3] = [Measure::Staleness, Measure::Loss, Measure::Sl];

    pub fn as_str(self) -> &'static str {
        match self {
            Measure::Staleness => "staleness",
            Measure::Loss => "loss",
            Measure::Sl => "sl",
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl std::str::FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "staleness" => Ok(Measure::Staleness),
            "loss" => Ok(Measure::Loss),
            "sl" => Ok(Measure::Sl),
            other => Err(Error::config("measure", format!("unknown measure `{other}`"))),
        }
    }
}

/// Binary selection vector over all K UEs.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ScheduleMask {
    bits: Vec<bool>,
}

impl ScheduleMask {
    pub fn new(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    /// Builds a mask and checks that exactly `n` UEs are selected.
    pub fn with_cardinality(bits: Vec<bool>, n: usize) -> Result<Self> {
        let mask = Self::new(bits);
        mask.check_cardinality(n)?;
        Ok(mask)
    }

    pub fn from_ids(k: usize, ids: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut bits = vec![false; k];
        for id in ids {
            match bits.get_mut(id) {
                Some(b) if !*b => *b = true,
                Some(_) => return Err(Error::Contract(format!("UE {id} listed twice"))),
                None => return Err(Error::Contract(format!("UE {id} out of range for K={k}"))),
            }
        }
        Ok(Self { bits })
    }

    pub fn check_cardinality(&self, n: usize) -> Result<()> {
        let ones = self.count();
        if ones == n {
            Ok(())
        } else {
            Err(Error::Contract(format!("mask selects {ones} UEs, expected exactly {n}")))
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_selected(&self, k: usize) -> bool {
        self.bits[k]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Selected UE ids in ascending order.
    pub fn selected(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().filter(|(_, &b)| b).map(|(k, _)| k)
    }

    pub fn selected_ids(&self) -> Vec<usize> {
        self.selected().collect()
    }
}

/// What the access point knows about each UE: staleness `T_k`, last reported loss `L_k`
/// and `C_k = T_k * L_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchedulerState {
    staleness: Vec<u64>,
    last_loss: Vec<f64>,
    sl: Vec<f64>,
}

impl SchedulerState {
    /// Initial state after the cost-free round-0 broadcast: every UE has staleness 1 and
    /// has reported the loss of the initial global model.
    pub fn bootstrap(initial_losses: Vec<f64>) -> Result<Self> {
        check_losses(initial_losses.iter().copied().enumerate())?;
        Ok(Self::from_parts(vec![1; initial_losses.len()], initial_losses))
    }

    fn from_parts(staleness: Vec<u64>, last_loss: Vec<f64>) -> Self {
        let sl = staleness.iter().zip(&last_loss).map(|(&t, &l)| t as f64 * l).collect();
        Self { staleness, last_loss, sl }
    }

    /// Advances one round: `T_k <- (T_k + 1)(1 - S_k)` and the scheduled UEs' losses replace
    /// their stale values. `reported` must contain exactly the UEs selected by `prev_mask`.
    pub fn update(&self, prev_mask: &ScheduleMask, reported: &BTreeMap<usize, f64>) -> Result<Self> {
        if prev_mask.len() != self.len() {
            return Err(Error::Contract(format!("mask length {} does not match {} UEs", prev_mask.len(), self.len())));
        }
        for k in prev_mask.selected() {
            if !reported.contains_key(&k) {
                return Err(Error::Contract(format!("missing loss report from scheduled UE {k}")));
            }
        }
        for &k in reported.keys() {
            if k >= self.len() || !prev_mask.is_selected(k) {
                return Err(Error::Contract(format!("loss report from unscheduled UE {k}")));
            }
        }
        check_losses(reported.iter().map(|(&k, &l)| (k, l)))?;

        let staleness = self.staleness.iter().zip(prev_mask.bits()).map(|(&t, &s)| if s { 0 } else { t + 1 }).collect();
        let mut last_loss = self.last_loss.clone();
        for (&k, &loss) in reported {
            last_loss[k] = loss;
        }
        Ok(Self::from_parts(staleness, last_loss))
    }

    pub fn len(&self) -> usize {
        self.staleness.len()
    }

    pub fn is_empty(&self) -> bool {
        self.staleness.is_empty()
    }

    pub fn staleness(&self) -> &[u64] {
        &self.staleness
    }

    pub fn last_loss(&self) -> &[f64] {
        &self.last_loss
    }

    pub fn sl(&self) -> &[f64] {
        &self.sl
    }

    /// `V_k` for every UE under the chosen measure.
    pub fn measure_values(&self, measure: Measure) -> Vec<f64> {
        match measure {
            Measure::Staleness => self.staleness.iter().map(|&t| t as f64).collect(),
            Measure::Loss => self.last_loss.clone(),
            Measure::Sl => self.sl.clone(),
        }
    }
}

fn check_losses(losses: impl Iterator<Item = (usize, f64)>) -> Result<()> {
    for (k, loss) in losses {
        if !(loss.is_finite() && loss >= 0.0) {
            return Err(Error::Contract(format!("UE {k} reported invalid loss {loss}")));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveParams {
    pub beta: f64,
    pub zeta: f64,
    pub measure: Measure,
}

impl ObjectiveParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(Error::config("beta", format!("must lie in (0, 1), got {}", self.beta)));
        }
        if !(self.zeta.is_finite() && self.zeta >= 0.0) {
            return Err(Error::config("zeta", format!("must be finite and >= 0, got {}", self.zeta)));
        }
        Ok(())
    }
}

/// `mass^(1-beta) / (1-beta)`, with zero mass mapping to zero.
pub fn cr_from_mass(mass: f64, beta: f64) -> f64 {
    if mass == 0.0 {
        0.0
    } else {
        mass.powf(1.0 - beta) / (1.0 - beta)
    }
}

/// Objective terms of one candidate mask.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub objective: f64,
    pub cr: f64,
    pub energy: f64,
}

/// Immutable per-round snapshot the schedulers evaluate masks against: per-UE energy and
/// per-UE weighted measure `D_k * V_k`. It never sees the global model or live losses.
#[derive(Debug, Clone)]
pub struct EvalContext {
    energy: Vec<f64>,
    weighted_measure: Vec<f64>,
    zeta: f64,
    beta: f64,
}

impl EvalContext {
    pub fn new(
        state: &SchedulerState,
        breakdown: &EnergyBreakdown,
        data_sizes_bits: &[u64],
        params: &ObjectiveParams,
    ) -> Result<Self> {
        params.validate()?;
        let k = state.len();
        if breakdown.len() != k || data_sizes_bits.len() != k {
            return Err(Error::Contract(format!(
                "state has {k} UEs, energies {}, data sizes {}",
                breakdown.len(),
                data_sizes_bits.len()
            )));
        }
        let weighted_measure =
            state.measure_values(params.measure).into_iter().zip(data_sizes_bits).map(|(v, &d)| d as f64 * v).collect();
        Self::from_raw(breakdown.per_ue_total_j.clone(), weighted_measure, params.zeta, params.beta)
    }

    /// Builds a context directly from per-UE energies and `D_k * V_k` values.
    pub fn from_raw(energy: Vec<f64>, weighted_measure: Vec<f64>, zeta: f64, beta: f64) -> Result<Self> {
        if energy.len() != weighted_measure.len() {
            return Err(Error::Contract("energy and measure lengths differ".into()));
        }
        if let Some(k) = energy.iter().position(|e| !(e.is_finite() && *e >= 0.0)) {
            return Err(Error::Contract(format!("UE {k} has invalid energy {}", energy[k])));
        }
        if let Some(k) = weighted_measure.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::Contract(format!("UE {k} has invalid weighted measure {}", weighted_measure[k])));
        }
        Ok(Self { energy, weighted_measure, zeta, beta })
    }

    pub fn num_ues(&self) -> usize {
        self.energy.len()
    }

    pub fn energy(&self) -> &[f64] {
        &self.energy
    }

    pub fn weighted_measure(&self) -> &[f64] {
        &self.weighted_measure
    }

    /// Evaluates the selection given by `ids`, summing in iteration order.
    pub fn evaluate_ids(&self, ids: impl IntoIterator<Item = usize>) -> Evaluation {
        let (mut mass, mut energy) = (0.0, 0.0);
        for k in ids {
            mass += self.weighted_measure[k];
            energy += self.energy[k];
        }
        let cr = cr_from_mass(mass, self.beta);
        Evaluation { objective: -cr + self.zeta * energy, cr, energy }
    }

    /// Canonical evaluation of a full mask (ascending id order).
    pub fn evaluate_mask(&self, mask: &ScheduleMask) -> Result<Evaluation> {
        if mask.len() != self.num_ues() {
            return Err(Error::Contract(format!("mask length {} does not match {} UEs", mask.len(), self.num_ues())));
        }
        Ok(self.evaluate_ids(mask.selected()))
    }
}

/// CR value of `mask` under the chosen measure.
pub fn cr_value(
    mask: &ScheduleMask,
    state: &SchedulerState,
    data_sizes_bits: &[u64],
    params: &ObjectiveParams,
) -> Result<f64> {
    if mask.len() != state.len() || data_sizes_bits.len() != state.len() {
        return Err(Error::Contract("mask, state and data sizes must have equal length".into()));
    }
    let values = state.measure_values(params.measure);
    let mass: f64 = mask.selected().map(|k| data_sizes_bits[k] as f64 * values[k]).sum();
    if mass < 0.0 || !mass.is_finite() {
        return Err(Error::Contract(format!("selected measure mass {mass} is not a finite non-negative value")));
    }
    Ok(cr_from_mass(mass, params.beta))
}

/// `-cr(mask) + zeta * E(mask)`; lower is better.
pub fn objective_value(
    mask: &ScheduleMask,
    state: &SchedulerState,
    breakdown: &EnergyBreakdown,
    data_sizes_bits: &[u64],
    params: &ObjectiveParams,
) -> Result<f64> {
    let ctx = EvalContext::new(state, breakdown, data_sizes_bits, params)?;
    Ok(ctx.evaluate_mask(mask)?.objective)
}

/// Affine map from reversed objective `O = -objective` to roulette fitness `Q`.
///
/// With `O_avg > 0` this is `Q = a1 * O + b1`, `a1 = O_avg / (O_avg - O_min)`,
/// `b1 = -O_min * a1`, so the worst member gets 0 and the mean is preserved. When
/// `O_avg <= 0` the values are first translated so that `O_min = 0` (which makes the same
/// formula reduce to `Q = O - O_min`). A population with no spread maps to `Q = 1`; trials
/// scored against it still compare by `O`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearScaling {
    slope: f64,
    o_min: f64,
    base: f64,
}

impl LinearScaling {
    /// Fits the scaling to a generation's objective values.
    pub fn fit(objectives: &[f64]) -> Self {
        assert!(!objectives.is_empty(), "cannot scale an empty population");
        let m = objectives.len() as f64;
        let o_min = objectives.iter().map(|v| -v).fold(f64::INFINITY, f64::min);
        let o_avg = objectives.iter().map(|v| -v).sum::<f64>() / m;
        let spread = o_avg - o_min;
        let all_equal = objectives.iter().all(|&v| v == objectives[0]);
        if all_equal || spread <= 0.0 {
            Self { slope: 1.0, o_min, base: 1.0 }
        } else if o_avg > 0.0 {
            Self { slope: o_avg / spread, o_min, base: 0.0 }
        } else {
            Self { slope: 1.0, o_min, base: 0.0 }
        }
    }

    /// Fitness of a candidate with the given objective value.
    pub fn fitness(&self, objective: f64) -> f64 {
        self.slope * (-objective - self.o_min) + self.base
    }

    /// Multiplicative coefficient `a1`.
    pub fn alpha1(&self) -> f64 {
        self.slope
    }

    /// Additive coefficient `b1` of `Q = a1 * O + b1`.
    pub fn beta1(&self) -> f64 {
        self.base - self.slope * self.o_min
    }

    pub fn is_degenerate(&self) -> bool {
        self.base != 0.0
    }
}

/// Roulette fitness of every member of a population, given their objective values.
pub fn fitness_scale(objectives: &[f64]) -> Vec<f64> {
    let scaling = LinearScaling::fit(objectives);
    objectives.iter().map(|&v| scaling.fitness(v)).collect()
}
