//! Brute-force checks of the schedulers on a small configured instance.

use super::Simulation;
use crate::de::{binomial_capped, build_windows, sdes_schedule, sort_by_energy};
use crate::energy::{data_rate_with_base, required_power};
use crate::error::{Error, Result};
use crate::objective::{fitness_scale, EvalContext, ScheduleMask};
use crate::rng::substream;
use crate::scenario::ScenarioConfig;

/// Largest number of masks the exhaustive search will enumerate.
pub const MAX_ENUMERATION: u128 = 5_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> OracleCheck {
    OracleCheck { name: name.into(), passed, detail: detail.into() }
}

/// Visits every `n`-subset of `0..k` in lexicographic order.
fn for_each_subset(k: usize, n: usize, mut visit: impl FnMut(&[usize])) {
    let mut idx: Vec<usize> = (0..n).collect();
    loop {
        visit(&idx);
        let Some(i) = (0..n).rev().find(|&i| idx[i] != i + k - n) else { return };
        idx[i] += 1;
        for j in i + 1..n {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn exhaustive_best(ctx: &EvalContext, n: usize) -> (f64, Vec<usize>) {
    let mut best = (f64::INFINITY, Vec::new());
    for_each_subset(ctx.num_ues(), n, |ids| {
        let v = ctx.evaluate_ids(ids.iter().copied()).objective;
        if v < best.0 {
            best = (v, ids.to_vec());
        }
    });
    best
}

/// Runs the brute-force suite on the first `min(T, 3)` rounds of the configured scenario,
/// scheduling uniformly at random between rounds so the scheduler state evolves.
pub fn run_oracle_suite(config: &ScenarioConfig) -> Result<Vec<OracleCheck>> {
    config.validate()?;
    let (k, n) = (config.num_ues, config.num_subchannels);
    if binomial_capped(k, n, MAX_ENUMERATION) > MAX_ENUMERATION {
        return Err(Error::config("K", format!("C({k}, {n}) exceeds {MAX_ENUMERATION} masks")));
    }
    let sim = Simulation::new(config.clone())?;
    let mut state = sim.start();
    let mut checks = Vec::new();
    let de = &config.de_params;

    for round in 0..config.rounds.clamp(1, 3) {
        let breakdown = sim.energy(round)?;
        let ctx = sim.eval_context(&state, &breakdown)?;
        let streams = sim.sched_stream(crate::harness::PolicyKind::Sdes, round);

        let order = sort_by_energy(ctx.energy());
        let windowed = build_windows(&order, n)?
            .into_iter()
            .map(|w| ctx.evaluate_mask(&ScheduleMask::from_ids(k, w.member_ids)?).map(|e| e.objective))
            .collect::<Result<Vec<_>>>()?;
        let window_best = windowed.iter().copied().fold(f64::INFINITY, f64::min);
        let got = sdes_schedule(&ctx, n, n, de, &streams)?;
        checks.push(check(
            format!("round {round}: W=N equals best contiguous window"),
            got.evaluation.objective == window_best,
            format!("sdes {} vs brute force {}", got.evaluation.objective, window_best),
        ));

        let (optimum, ids) = exhaustive_best(&ctx, n);
        let full = sdes_schedule(&ctx, n, k, de, &streams)?;
        let gap = (full.evaluation.objective - optimum).abs() / optimum.abs().max(1e-300);
        checks.push(check(
            format!("round {round}: W=K reaches exhaustive optimum"),
            gap <= 1e-12,
            format!("sdes {} vs optimum {} at {:?}", full.evaluation.objective, optimum, ids),
        ));

        let budget = crate::de::generation_budget(k, n, de.population_m, de.g_de);
        let generations = de.generations.unwrap_or(budget);
        checks.push(check(
            format!("round {round}: evaluation budget"),
            full.evaluations <= de.population_m * generations + de.population_m,
            format!("{} evaluations for {generations} generations", full.evaluations),
        ));

        let mut rng = substream(config.seed, "oracle/fitness", &[round as u64]);
        let objectives: Vec<f64> = (0..de.population_m)
            .map(|_| {
                let ids: Vec<usize> = rand::seq::index::sample(&mut rng, k, n).into_vec();
                ctx.evaluate_ids(ids).objective
            })
            .collect();
        let q = fitness_scale(&objectives);
        let q_min = q.iter().copied().fold(f64::INFINITY, f64::min);
        let all_equal = objectives.iter().all(|&o| o == objectives[0]);
        checks.push(check(
            format!("round {round}: fitness minimum is zero"),
            all_equal || q_min.abs() <= 1e-12,
            format!("min Q = {q_min}"),
        ));

        let c = sim.config();
        let mut worst = 0.0f64;
        for &gain in &sim.scenario.channels(round)?.gains {
            let bw = c.subchannel_bandwidth_hz();
            let p = required_power(c.rate_threshold_bps, gain, bw, c.noise_w, c.rate_log_base)?;
            let r = data_rate_with_base(p, gain, bw, c.noise_w, c.rate_log_base)?;
            worst = worst.max((r - c.rate_threshold_bps).abs() / c.rate_threshold_bps);
        }
        checks.push(check(
            format!("round {round}: rate inversion"),
            worst <= 1e-9,
            format!("max relative error {worst:e}"),
        ));

        let mask = crate::de::random_schedule(k, n, &mut substream(config.seed, "oracle/advance", &[round as u64]));
        sim.run_round_with_mask(&mut state, &mask, round)?;
    }
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subsets_are_enumerated_once() {
        let mut seen = Vec::new();
        for_each_subset(5, 2, |ids| seen.push(ids.to_vec()));
        assert_eq!(seen.len(), 10);
        assert_eq!(seen.first().unwrap(), &vec![0, 1]);
        assert_eq!(seen.last().unwrap(), &vec![3, 4]);
        let mut all = 0;
        for_each_subset(4, 4, |_| all += 1);
        assert_eq!(all, 1);
    }

    #[test]
    fn refuses_huge_instances() {
        assert!(run_oracle_suite(&ScenarioConfig::default()).unwrap_err().is_config());
    }
}
