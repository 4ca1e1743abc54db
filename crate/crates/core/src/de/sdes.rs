use rayon::prelude::*;

use super::engine::Evolution;
use super::window::{build_windows, generation_budget, sort_by_energy, Window};
use super::{DeParams, Individual};
use crate::error::{Error, Result};
use crate::objective::{EvalContext, Evaluation, ScheduleMask};
use crate::rng::{substream, StreamRng};

/// Keys the random streams of one scheduling decision; each window gets its own stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchedStream {
    pub seed: u64,
    pub label: String,
    pub round: u64,
}

impl SchedStream {
    pub fn new(seed: u64, label: impl Into<String>, round: usize) -> Self {
        Self { seed, label: label.into(), round: round as u64 }
    }

    /// Stream for the window at `offset`.
    pub fn window(&self, offset: usize) -> StreamRng {
        substream(self.seed, &self.label, &[self.round, offset as u64])
    }
}

/// Result of evolving one window.
#[derive(Debug, Clone)]
pub struct WindowOutcome {
    pub offset: usize,
    pub best: Individual,
    pub mask: ScheduleMask,
    pub evaluations: usize,
    pub generations: usize,
}

/// Final decision of a scheduler run.
#[derive(Debug, Clone)]
pub struct SdesOutcome {
    pub mask: ScheduleMask,
    pub evaluation: Evaluation,
    pub window_offset: usize,
    pub windows: usize,
    pub evaluations: usize,
}

fn expand(members: &[usize], genes: &[u8], k: usize) -> ScheduleMask {
    let mut bits = vec![false; k];
    for (&id, &g) in members.iter().zip(genes) {
        bits[id] = g == 1;
    }
    ScheduleMask::new(bits)
}

fn check(ctx: &EvalContext, n: usize, params: &DeParams) -> Result<()> {
    params.validate()?;
    if n == 0 || n > ctx.num_ues() {
        return Err(Error::config("N", format!("must satisfy 1 <= N <= K={}, got {n}", ctx.num_ues())));
    }
    Ok(())
}

/// Generations spent on a chromosome of `dim` genes with `n` ones.
pub(crate) fn window_generations(dim: usize, n: usize, params: &DeParams) -> usize {
    params.generations.unwrap_or_else(|| generation_budget(dim, n, params.population_m, params.g_de))
}

/// Evolves one window and maps its best chromosome back to a K-length mask.
pub fn evolve_window(
    window: &Window,
    ctx: &EvalContext,
    n: usize,
    params: &DeParams,
    rng: StreamRng,
) -> Result<WindowOutcome> {
    check(ctx, n, params)?;
    if window.len() < n {
        return Err(Error::config("window_len", format!("window of {} cannot hold N={n}", window.len())));
    }
    let members = &window.member_ids;
    let objective =
        |genes: &[u8]| ctx.evaluate_ids(members.iter().zip(genes).filter(|(_, &g)| g == 1).map(|(&id, _)| id));
    let generations = window_generations(members.len(), n, params);
    let mut evo = Evolution::new(members.len(), n, params, objective, rng);
    evo.run(generations);
    let (best, evaluations) = evo.into_best();
    let mask = expand(members, &best.genes, ctx.num_ues());
    Ok(WindowOutcome { offset: window.offset, best, mask, evaluations, generations })
}

/// Sliding-window DE scheduler.
///
/// Windows are evolved in parallel on the current rayon pool, each on its own stream, and
/// the winner is the candidate with the lowest objective (then lowest energy, then lowest
/// window offset) under the canonical full-mask evaluation.
pub fn sdes_schedule(
    ctx: &EvalContext,
    n: usize,
    window_len: usize,
    params: &DeParams,
    streams: &SchedStream,
) -> Result<SdesOutcome> {
    check(ctx, n, params)?;
    if window_len < n || window_len > ctx.num_ues() {
        return Err(Error::config(
            "window_len",
            format!("must satisfy N={n} <= W <= K={}, got {window_len}", ctx.num_ues()),
        ));
    }
    let order = sort_by_energy(ctx.energy());
    let windows = build_windows(&order, window_len)?;
    let outcomes = windows
        .par_iter()
        .map(|w| {
            let outcome = evolve_window(w, ctx, n, params, streams.window(w.offset))?;
            let evaluation = ctx.evaluate_mask(&outcome.mask)?;
            Ok((outcome, evaluation))
        })
        .collect::<Result<Vec<_>>>()?;

    let evaluations = outcomes.iter().map(|(o, _)| o.evaluations).sum();
    let (best, evaluation) = outcomes
        .into_iter()
        .reduce(|a, b| {
            let better = b.1.objective < a.1.objective || (b.1.objective == a.1.objective && b.1.energy < a.1.energy);
            if better {
                b
            } else {
                a
            }
        })
        .expect("at least one window");
    Ok(SdesOutcome { mask: best.mask, evaluation, window_offset: best.offset, windows: windows.len(), evaluations })
}

/// Plain single-population DE over the full problem, with chromosome positions laid out in
/// `order` (a permutation of all UE ids).
pub fn de_schedule(
    ctx: &EvalContext,
    n: usize,
    order: &[usize],
    params: &DeParams,
    rng: StreamRng,
) -> Result<SdesOutcome> {
    check(ctx, n, params)?;
    let k = ctx.num_ues();
    let mut seen = vec![false; k];
    if order.len() != k || order.iter().any(|&id| id >= k || std::mem::replace(&mut seen[id], true)) {
        return Err(Error::Contract("chromosome order must be a permutation of all UEs".into()));
    }
    let objective =
        |genes: &[u8]| ctx.evaluate_ids(order.iter().zip(genes).filter(|(_, &g)| g == 1).map(|(&id, _)| id));
    let mut evo = Evolution::new(k, n, params, objective, rng);
    evo.run(window_generations(k, n, params));
    let (best, evaluations) = evo.into_best();
    let mask = expand(order, &best.genes, k);
    let evaluation = ctx.evaluate_mask(&mask)?;
    Ok(SdesOutcome { mask, evaluation, window_offset: 0, windows: 1, evaluations })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(energy: Vec<f64>, measure: Vec<f64>, zeta: f64) -> EvalContext {
        EvalContext::from_raw(energy, measure, zeta, 0.7).unwrap()
    }

    #[test]
    fn window_equal_to_n_selects_its_members() {
        let c = ctx(vec![5.0, 1.0, 4.0, 2.0, 3.0, 6.0], vec![1.0; 6], 1.0);
        let window = Window { offset: 2, member_ids: vec![4, 2, 0] };
        let out = evolve_window(&window, &c, 3, &DeParams::default(), substream(1, "w", &[])).unwrap();
        assert_eq!(out.mask.selected_ids(), vec![0, 2, 4]);
        assert_eq!(out.generations, 1);
    }

    #[test]
    fn evaluations_within_budget() {
        let c = ctx((0..12).map(f64::from).collect(), vec![2.0; 12], 0.5);
        let params = DeParams::default();
        let window = Window { offset: 0, member_ids: (0..12).collect() };
        let out = evolve_window(&window, &c, 4, &params, substream(1, "w", &[])).unwrap();
        // C(12,4) = 495 -> ceil(495/40) = 13 generations
        assert_eq!(out.generations, 13);
        assert!(out.evaluations <= params.population_m * out.generations + params.population_m);
    }

    #[test]
    fn repeatable_for_same_stream() {
        let c = ctx((0..10).map(|i| f64::from(i * i % 7)).collect(), (0..10).map(f64::from).collect(), 2.0);
        let s = SchedStream::new(3, "sdes", 5);
        let a = sdes_schedule(&c, 3, 6, &DeParams::default(), &s).unwrap();
        let b = sdes_schedule(&c, 3, 6, &DeParams::default(), &s).unwrap();
        assert_eq!(a.mask, b.mask);
        assert_eq!(a.windows, 5);
        assert_eq!(a.evaluation.objective.to_bits(), b.evaluation.objective.to_bits());
    }

    #[test]
    fn rejects_bad_window() {
        let c = ctx(vec![1.0; 5], vec![1.0; 5], 1.0);
        let s = SchedStream::new(0, "x", 0);
        assert!(sdes_schedule(&c, 3, 2, &DeParams::default(), &s).is_err());
        assert!(sdes_schedule(&c, 3, 6, &DeParams::default(), &s).is_err());
        assert!(de_schedule(&c, 3, &[0, 1, 2, 3, 3], &DeParams::default(), s.window(0)).is_err());
    }
}
