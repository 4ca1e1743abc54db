//! Experiment driver: runs the round loop for each scheduling policy over one shared
//! scenario and records per-round metrics.

mod oracle;
mod output;

use std::collections::BTreeMap;
use std::fmt;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::de::{de_schedule, random_schedule, sdes_schedule, SchedStream};
use crate::energy::{round_energy, EnergyBreakdown};
use crate::error::{Error, Result};
use crate::flsim::{self, GlobalModel, UeDataset};
use crate::objective::{EvalContext, ObjectiveParams, ScheduleMask, SchedulerState};
use crate::scenario::{Scenario, ScenarioConfig};

pub use oracle::{run_oracle_suite, OracleCheck};
pub use output::{write_results, OutputFormat, CSV_COLUMNS};

/// Environment variable capping worker threads; `0` or unset means one per core.
pub const THREADS_ENV: &str = "FEDSCHED_THREADS";

/// Scheduling policies the harness can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PolicyKind {
    /// Uniform random N-subset (FedAvg benchmark).
    #[serde(rename = "random")]
    Random,
    /// Sliding-window DE with the configured window length.
    #[serde(rename = "sdes")]
    Sdes,
    /// Plain DE over all K UEs.
    #[serde(rename = "de")]
    De,
    /// Sliding windows of length N: best contiguous block of the energy order.
    #[serde(rename = "window-n")]
    WindowN,
}

impl PolicyKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PolicyKind::Random => "random",
            PolicyKind::Sdes => "sdes",
            PolicyKind::De => "de",
            PolicyKind::WindowN => "window-n",
        }
    }

    /// Name written to results, including the window length for `sdes`.
    pub fn label(self, config: &ScenarioConfig) -> String {
        match self {
            PolicyKind::Sdes => format!("sdes-w{}", config.window_len),
            other => other.as_str().to_string(),
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl std::str::FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(PolicyKind::Random),
            "sdes" => Ok(PolicyKind::Sdes),
            "de" => Ok(PolicyKind::De),
            "window-n" => Ok(PolicyKind::WindowN),
            other => Err(Error::config("policy", format!("unknown policy `{other}`"))),
        }
    }
}

/// Metrics of one communication round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: usize,
    pub policy: String,
    pub measure: String,
    pub instantaneous_energy_j: f64,
    pub cumulative_energy_j: f64,
    pub global_loss: f64,
    pub objective_value: f64,
    pub cr_value: f64,
    pub selected_ids: Vec<usize>,
    pub wall_time_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicySummary {
    pub policy: String,
    pub measure: String,
    pub final_loss: Option<f64>,
    pub total_energy_j: f64,
    pub mean_objective: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub config: ScenarioConfig,
    pub records: Vec<RoundRecord>,
    pub summary: Vec<PolicySummary>,
}

impl ExperimentResult {
    /// Records of one policy, in round order.
    pub fn policy_records<'a>(&'a self, policy: &'a str) -> impl Iterator<Item = &'a RoundRecord> + 'a {
        self.records.iter().filter(move |r| r.policy == policy)
    }
}

/// Everything shared by all policies of one experiment: population, datasets and the
/// bootstrapped scheduler state.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub scenario: Scenario,
    pub datasets: Vec<UeDataset>,
    sample_counts: Vec<f64>,
    data_bits: Vec<u64>,
    initial_state: SchedulerState,
}

impl Simulation {
    pub fn new(config: ScenarioConfig) -> Result<Self> {
        config.validate()?;
        let scenario = Scenario::new(config)?;
        let datasets = flsim::synthesize_datasets(&scenario.config, &scenario.profiles)?;
        let model = Self::initial_model(&scenario.config);
        // round-0 broadcast: every UE evaluates the initial model once, free of charge
        let losses = datasets.par_iter().map(|d| flsim::local_loss(&model, d)).collect::<Result<Vec<_>>>()?;
        let initial_state = SchedulerState::bootstrap(losses)?;
        Ok(Self {
            sample_counts: datasets.iter().map(|d| d.len() as f64).collect(),
            data_bits: scenario.data_sizes_bits(),
            scenario,
            datasets,
            initial_state,
        })
    }

    fn initial_model(config: &ScenarioConfig) -> GlobalModel {
        GlobalModel::zeros(config.data_params.classes, config.data_params.feature_dim)
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.scenario.config
    }

    pub fn initial_state(&self) -> &SchedulerState {
        &self.initial_state
    }

    pub fn data_sizes_bits(&self) -> &[u64] {
        &self.data_bits
    }

    pub fn objective_params(&self) -> ObjectiveParams {
        let c = self.config();
        ObjectiveParams { beta: c.beta, zeta: c.zeta, measure: c.measure }
    }

    pub fn start(&self) -> SimState {
        SimState {
            model: Self::initial_model(self.config()),
            scheduler: self.initial_state.clone(),
            cumulative_energy_j: 0.0,
        }
    }

    /// This round's per-UE energies.
    pub fn energy(&self, round: usize) -> Result<EnergyBreakdown> {
        let c = self.config();
        let channels = self.scenario.channels(round)?;
        EnergyBreakdown::for_round(&self.scenario.profiles, &channels, c.model_size_bits, c.kappa, c.rate_log_base)
    }

    /// The scheduler's view of the round: energies and stale per-UE measures only.
    pub fn eval_context(&self, state: &SimState, breakdown: &EnergyBreakdown) -> Result<EvalContext> {
        EvalContext::new(&state.scheduler, breakdown, &self.data_bits, &self.objective_params())
    }

    /// Substreams for `policy`'s scheduling randomness in `round`.
    pub fn sched_stream(&self, policy: PolicyKind, round: usize) -> SchedStream {
        let c = self.config();
        SchedStream::new(c.seed, format!("sched/{}/{}", policy.label(c), c.measure), round)
    }

    /// Runs the policy's scheduling decision.
    pub fn schedule(&self, policy: PolicyKind, ctx: &EvalContext, round: usize) -> Result<ScheduleMask> {
        let c = self.config();
        let n = c.num_subchannels;
        let streams = self.sched_stream(policy, round);
        let mask = match policy {
            PolicyKind::Random => random_schedule(c.num_ues, n, &mut streams.window(0)),
            PolicyKind::Sdes => sdes_schedule(ctx, n, c.window_len, &c.de_params, &streams)?.mask,
            PolicyKind::WindowN => sdes_schedule(ctx, n, n, &c.de_params, &streams)?.mask,
            PolicyKind::De => {
                let order: Vec<usize> = (0..c.num_ues).collect();
                de_schedule(ctx, n, &order, &c.de_params, streams.window(0))?.mask
            }
        };
        mask.check_cardinality(n)?;
        Ok(mask)
    }

    /// Draw channels, price every UE, schedule, train the scheduled UEs, aggregate, update
    /// the scheduler state and record metrics.
    pub fn run_round(&self, state: &mut SimState, policy: PolicyKind, round: usize) -> Result<RoundRecord> {
        self.round_inner(state, policy, round).map_err(|e| Error::Round { round, source: Box::new(e) })
    }

    fn round_inner(&self, state: &mut SimState, policy: PolicyKind, round: usize) -> Result<RoundRecord> {
        let started = Instant::now();
        let c = self.config();
        let breakdown = self.energy(round)?;
        let ctx = self.eval_context(state, &breakdown)?;
        let mask = self.schedule(policy, &ctx, round)?;
        let evaluation = ctx.evaluate_mask(&mask)?;
        let energy = self.advance(state, &mask, &breakdown)?;
        let global_loss = flsim::global_loss(&state.model, &self.datasets)?;

        Ok(RoundRecord {
            round,
            policy: policy.label(c),
            measure: c.measure.to_string(),
            instantaneous_energy_j: energy,
            cumulative_energy_j: state.cumulative_energy_j,
            global_loss,
            objective_value: evaluation.objective,
            cr_value: evaluation.cr,
            selected_ids: mask.selected_ids(),
            wall_time_ms: if c.record_wall_time { started.elapsed().as_secs_f64() * 1e3 } else { 0.0 },
        })
    }

    /// Runs a round with an externally chosen mask; returns the round's energy.
    pub fn run_round_with_mask(&self, state: &mut SimState, mask: &ScheduleMask, round: usize) -> Result<f64> {
        mask.check_cardinality(self.config().num_subchannels)?;
        let breakdown = self.energy(round)?;
        self.advance(state, mask, &breakdown)
    }

    /// Local training of the scheduled UEs, aggregation and scheduler-state update.
    fn advance(&self, state: &mut SimState, mask: &ScheduleMask, breakdown: &EnergyBreakdown) -> Result<f64> {
        let c = self.config();
        let energy = round_energy(mask, breakdown)?;
        let selected = mask.selected_ids();
        let trained = selected
            .par_iter()
            .map(|&k| {
                flsim::local_train(&state.model, &self.datasets[k], c.learning_rate, c.kappa).map(|(w, l)| (k, w, l))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut reports = BTreeMap::new();
        let mut updates = Vec::with_capacity(trained.len());
        for (k, w, loss) in trained {
            reports.insert(k, loss);
            updates.push((k, w));
        }
        state.model = flsim::aggregate(&state.model, &updates, &self.sample_counts)?;
        state.scheduler = state.scheduler.update(mask, &reports)?;
        state.cumulative_energy_j += energy;
        Ok(energy)
    }

    /// All rounds of one policy from the shared starting point.
    pub fn run_policy(&self, policy: PolicyKind) -> Result<Vec<RoundRecord>> {
        let mut state = self.start();
        (0..self.config().rounds).map(|t| self.run_round(&mut state, policy, t)).collect()
    }
}

/// Mutable per-policy simulation state.
#[derive(Debug, Clone)]
pub struct SimState {
    pub model: GlobalModel,
    pub scheduler: SchedulerState,
    pub cumulative_energy_j: f64,
}

/// Thread count from [`THREADS_ENV`]; `0` means automatic.
pub fn threads_from_env() -> Result<usize> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| Error::config("FEDSCHED_THREADS", format!("not a thread count: `{v}`"))),
        Err(_) => Ok(0),
    }
}

/// Runs every configured policy, using the thread cap from the environment.
pub fn run_experiment(config: &ScenarioConfig) -> Result<ExperimentResult> {
    run_experiment_with_threads(config, threads_from_env()?)
}

/// Runs every configured policy on a dedicated pool of `threads` workers (0 = one per core).
/// Output does not depend on the thread count.
pub fn run_experiment_with_threads(config: &ScenarioConfig, threads: usize) -> Result<ExperimentResult> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Contract(format!("cannot build thread pool: {e}")))?;
    pool.install(|| {
        let sim = Simulation::new(config.clone())?;
        let per_policy = config.policies.par_iter().map(|&p| sim.run_policy(p)).collect::<Result<Vec<_>>>()?;
        let summary = config
            .policies
            .iter()
            .zip(&per_policy)
            .map(|(&p, records)| summarize(p.label(config), config.measure.to_string(), records))
            .collect();
        Ok(ExperimentResult { config: config.clone(), records: per_policy.into_iter().flatten().collect(), summary })
    })
}

fn summarize(policy: String, measure: String, records: &[RoundRecord]) -> PolicySummary {
    let mean_objective =
        (!records.is_empty()).then(|| records.iter().map(|r| r.objective_value).sum::<f64>() / records.len() as f64);
    PolicySummary {
        policy,
        measure,
        final_loss: records.last().map(|r| r.global_loss),
        total_energy_j: records.last().map_or(0.0, |r| r.cumulative_energy_j),
        mean_objective,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn tiny(k: usize, n: usize, rounds: usize) -> ScenarioConfig {
        let mut c =
            ScenarioConfig { num_ues: k, num_subchannels: n, window_len: k, rounds, seed: 42, ..Default::default() };
        c.ue_params.aggregate_data_bits = k as u64 * 40 * c.data_params.bits_per_sample;
        c
    }

    #[test]
    fn forced_full_selection_trains_everyone() {
        let mut c = tiny(2, 2, 3);
        c.policies = vec![PolicyKind::Random];
        let result = run_experiment_with_threads(&c, 1).unwrap();
        assert_eq!(result.records.len(), 3);
        assert!(result.records.iter().all(|r| r.selected_ids == vec![0, 1]));
    }

    #[test]
    fn zero_rounds_is_empty() {
        let result = run_experiment_with_threads(&tiny(4, 2, 0), 1).unwrap();
        assert!(result.records.is_empty());
        assert_eq!(result.summary.len(), 3);
        assert_eq!(result.summary[0].final_loss, None);
    }

    #[test]
    fn cumulative_energy_is_monotone() {
        let result = run_experiment_with_threads(&tiny(8, 3, 5), 2).unwrap();
        for policy in ["random", "sdes-w8", "window-n"] {
            let recs: Vec<_> = result.policy_records(policy).collect();
            assert_eq!(recs.len(), 5);
            for pair in recs.windows(2) {
                assert!(pair[1].cumulative_energy_j >= pair[0].cumulative_energy_j);
            }
            assert!(recs.iter().all(|r| r.selected_ids.len() == 3));
        }
    }

    #[test]
    fn policies_share_channels() {
        let sim = Simulation::new(tiny(6, 2, 2)).unwrap();
        let e = sim.energy(1).unwrap();
        assert_eq!(e, sim.energy(1).unwrap());
        assert_ne!(sim.sched_stream(PolicyKind::Random, 1), sim.sched_stream(PolicyKind::Sdes, 1));
    }

    #[test]
    fn scheduling_never_touches_global_loss() {
        let sim = Simulation::new(tiny(10, 3, 1)).unwrap();
        let state = sim.start();
        let ctx = sim.eval_context(&state, &sim.energy(0).unwrap()).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        pool.install(|| {
            let before = flsim::global_loss_evaluations();
            for p in [PolicyKind::Random, PolicyKind::Sdes, PolicyKind::De, PolicyKind::WindowN] {
                sim.schedule(p, &ctx, 0).unwrap();
            }
            assert_eq!(flsim::global_loss_evaluations(), before);
        });
    }

    #[test]
    fn policy_names_parse() {
        for p in [PolicyKind::Random, PolicyKind::Sdes, PolicyKind::De, PolicyKind::WindowN] {
            assert_eq!(p.as_str().parse::<PolicyKind>().unwrap(), p);
            assert_eq!(serde_json::to_string(&p).unwrap(), format!("\"{p}\""));
        }
        assert!("fedprox".parse::<PolicyKind>().is_err());
    }
}
