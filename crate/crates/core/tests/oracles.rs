//! Scheduler and simulator results checked against brute force and closed forms.

use fedsched::de::{build_windows, evolve_window, sdes_schedule, DeParams, SchedStream};
use fedsched::flsim::label_mix;
use fedsched::harness::{run_experiment, run_oracle_suite, write_results, OutputFormat, PolicyKind, Simulation};
use fedsched::objective::{EvalContext, Measure, ScheduleMask};
use fedsched::rng::substream;
use fedsched::scenario::{ScenarioConfig, UeParams};
use rand::Rng;

fn subsets(k: usize, n: usize) -> Vec<Vec<usize>> {
    (0u32..1 << k)
        .filter(|b| b.count_ones() as usize == n)
        .map(|b| (0..k).filter(|i| b >> i & 1 == 1).collect())
        .collect()
}

/// Lowest objective among the candidate id sets, each summed in ascending id order.
fn best_of(ctx: &EvalContext, candidates: impl IntoIterator<Item = Vec<usize>>) -> f64 {
    candidates
        .into_iter()
        .map(|mut ids| {
            ids.sort_unstable();
            ctx.evaluate_ids(ids).objective
        })
        .fold(f64::INFINITY, f64::min)
}

fn sorted_by_energy(ctx: &EvalContext) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..ctx.num_ues()).collect();
    idx.sort_by(|&a, &b| ctx.energy()[a].total_cmp(&ctx.energy()[b]).then(a.cmp(&b)));
    idx
}

#[test]
fn long_budget_matches_enumeration_of_every_window_subset() {
    // K=6, W=4, N=2: 3 windows of C(4,2)=6 subsets each
    let ctx = EvalContext::from_raw(vec![3.0, 1.0, 6.0, 2.0, 5.0, 4.0], vec![9e3, 1e2, 5e4, 2e3, 7e3, 4e4], 0.2, 0.7)
        .unwrap();
    let order = sorted_by_energy(&ctx);
    let windows = build_windows(&order, 4).unwrap();
    let params = DeParams { generations: Some(200), ..Default::default() };
    let mut overall = f64::INFINITY;
    for seed in 0..20 {
        let streams = SchedStream::new(seed, "enum", 0);
        for w in &windows {
            let expected =
                best_of(&ctx, subsets(4, 2).into_iter().map(|p| p.iter().map(|&i| w.member_ids[i]).collect()));
            overall = overall.min(expected);
            let out = evolve_window(w, &ctx, 2, &params, streams.window(w.offset)).unwrap();
            assert_eq!(ctx.evaluate_mask(&out.mask).unwrap().objective, expected, "seed {seed}, window {}", w.offset);
        }
        let out = sdes_schedule(&ctx, 2, 4, &params, &streams).unwrap();
        assert_eq!(out.evaluation.objective, overall, "seed {seed}");
    }
}

#[test]
fn sdes_never_worse_than_best_contiguous_window() {
    for seed in 0..30u64 {
        let mut rng = substream(seed, "ctx", &[]);
        let energy: Vec<f64> = (0..10).map(|_| rng.random_range(1.0..50.0)).collect();
        let measure: Vec<f64> = (0..10).map(|_| rng.random_range(0.0..1e5)).collect();
        let ctx = EvalContext::from_raw(energy, measure, 0.5, 0.7).unwrap();
        let order = sorted_by_energy(&ctx);
        let contiguous = best_of(&ctx, (0..=7).map(|off| order[off..off + 3].to_vec()));
        let params = DeParams { generations: Some(60), ..Default::default() };
        let out = sdes_schedule(&ctx, 3, 6, &params, &SchedStream::new(seed, "w6", 0)).unwrap();
        assert!(out.evaluation.objective <= contiguous, "seed {seed}");
    }
}

#[test]
fn zero_energy_weight_maximises_cr() {
    let config = ScenarioConfig {
        num_ues: 6,
        num_subchannels: 2,
        window_len: 6,
        rounds: 1,
        zeta: 0.0,
        measure: Measure::Sl,
        ue_params: UeParams { aggregate_data_bits: 6_000_000, ..Default::default() },
        ..Default::default()
    };
    let sim = Simulation::new(config).unwrap();
    let state = sim.start();
    let breakdown = sim.energy(0).unwrap();
    let ctx = sim.eval_context(&state, &breakdown).unwrap();
    let best_cr = subsets(6, 2).into_iter().map(|ids| ctx.evaluate_ids(ids).cr).fold(f64::NEG_INFINITY, f64::max);
    let mut state = sim.start();
    let record = sim.run_round(&mut state, PolicyKind::Sdes, 0).unwrap();
    assert_eq!(record.cr_value, best_cr);
    assert_eq!(record.objective_value, -best_cr);
}

#[test]
fn dirichlet_concentration_extremes() {
    let mut rng = substream(5, "dirichlet", &[]);
    // near-uniform mixes for huge alpha
    for _ in 0..200 {
        let mix = label_mix(10, 1e4, &mut rng);
        assert!((mix.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(mix.iter().all(|p| (p - 0.1).abs() <= 0.005), "{mix:?}");
    }
    // small alpha concentrates mass: the two largest shares carry most of it on average
    let trials = 2000;
    let top2: f64 = (0..trials)
        .map(|_| {
            let mut mix = label_mix(10, 0.1, &mut rng);
            mix.sort_by(|a, b| b.total_cmp(a));
            mix[0] + mix[1]
        })
        .sum::<f64>()
        / trials as f64;
    assert!(top2 >= 0.6, "mean top-2 mass {top2}");
}

#[test]
fn full_participation_never_increases_global_loss() {
    let config = ScenarioConfig {
        num_ues: 8,
        num_subchannels: 8,
        window_len: 8,
        rounds: 15,
        ue_params: UeParams { aggregate_data_bits: 8_000_000, ..Default::default() },
        policies: vec![PolicyKind::Random],
        ..Default::default()
    };
    let result = run_experiment(&config).unwrap();
    let losses: Vec<f64> = result.records.iter().map(|r| r.global_loss).collect();
    for pair in losses.windows(2) {
        assert!(pair[1] <= pair[0] + 1e-12, "{losses:?}");
    }
    assert!(losses.last().unwrap() < &10f64.ln());
}

#[test]
fn mask_cardinality_is_checked_for_external_schedules() {
    let config = ScenarioConfig {
        num_ues: 5,
        num_subchannels: 2,
        window_len: 5,
        rounds: 1,
        ue_params: UeParams { aggregate_data_bits: 1_000_000, ..Default::default() },
        ..Default::default()
    };
    let sim = Simulation::new(config).unwrap();
    let mut state = sim.start();
    let wrong = ScheduleMask::from_ids(5, [0, 1, 2]).unwrap();
    assert!(sim.run_round_with_mask(&mut state, &wrong, 0).is_err());
    let right = ScheduleMask::from_ids(5, [0, 4]).unwrap();
    let energy = sim.run_round_with_mask(&mut state, &right, 0).unwrap();
    assert_eq!(state.cumulative_energy_j, energy);
    assert_eq!(state.scheduler.staleness(), &[0, 2, 2, 2, 0]);
}

#[test]
fn csv_has_one_row_per_round_and_policy() {
    let config = ScenarioConfig::from_json_file(concat!(env!("CARGO_MANIFEST_DIR"), "/configs/small.json")).unwrap();
    let result = run_experiment(&config).unwrap();
    let dir = tempfile::tempdir().unwrap();
    write_results(&result, dir.path(), OutputFormat::Csv).unwrap();
    let text = std::fs::read_to_string(dir.path().join("rounds.csv")).unwrap();
    assert_eq!(text.lines().count(), 1 + config.rounds * config.policies.len());
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    for row in reader.records() {
        let row = row.unwrap();
        assert_eq!(row[8].split(';').count(), config.num_subchannels);
    }
}

#[test]
fn oracle_suite_passes_on_small_config() {
    let config = ScenarioConfig::from_json_file(concat!(env!("CARGO_MANIFEST_DIR"), "/configs/small.json")).unwrap();
    let checks = run_oracle_suite(&config).unwrap();
    assert!(!checks.is_empty());
    for c in checks {
        assert!(c.passed, "{}: {}", c.name, c.detail);
    }
}
