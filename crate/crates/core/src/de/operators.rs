use rand::seq::index;
use rand::Rng;

use super::Individual;
use crate::rng::StreamRng;

/// Uniform random chromosome of length `w` with exactly `n` ones.
pub fn random_genes(w: usize, n: usize, rng: &mut StreamRng) -> Vec<u8> {
    let mut genes = vec![0u8; w];
    for j in index::sample(rng, w, n) {
        genes[j] = 1;
    }
    genes
}

/// `m` random chromosomes, each with exactly `n` ones.
pub fn init_population(w: usize, n: usize, m: usize, rng: &mut StreamRng) -> Vec<Vec<u8>> {
    assert!(n <= w, "cannot place {n} ones in {w} genes");
    (0..m).map(|_| random_genes(w, n, rng)).collect()
}

/// Picks three distinct donors by roulette wheel, never returning `target`.
///
/// Redrawing until the picks differ is the same distribution as drawing each pick from the
/// wheel restricted to the not-yet-used members, which is what this does; it also terminates
/// when most of the mass sits on a single member. If the remaining mass is zero the pick is
/// uniform over the remaining members.
pub fn rws_select3(fitness: &[f64], target: Option<usize>, rng: &mut StreamRng) -> [usize; 3] {
    let needed = 3 + usize::from(target.is_some());
    assert!(fitness.len() >= needed, "roulette needs at least {needed} members");
    let mut available: Vec<usize> = (0..fitness.len()).filter(|&i| Some(i) != target).collect();
    let mut picks = [0usize; 3];
    for pick in &mut picks {
        let total: f64 = available.iter().map(|&i| fitness[i].max(0.0)).sum();
        let slot = if total > 0.0 && total.is_finite() {
            let mut ball = rng.random::<f64>() * total;
            let mut chosen = None;
            for (slot, &i) in available.iter().enumerate() {
                let w = fitness[i].max(0.0);
                if w > 0.0 {
                    chosen = Some(slot);
                    if ball < w {
                        break;
                    }
                    ball -= w;
                }
            }
            chosen.expect("positive total implies a positive weight")
        } else {
            rng.random_range(0..available.len())
        };
        *pick = available.remove(slot);
    }
    picks
}

/// `x1 + F * (x2 - x3)`, componentwise.
pub fn mutate(x1: &[u8], x2: &[u8], x3: &[u8], f_weight: f64) -> Vec<f64> {
    assert!(x1.len() == x2.len() && x2.len() == x3.len());
    x1.iter().zip(x2).zip(x3).map(|((&a, &b), &c)| f64::from(a) + f_weight * (f64::from(b) - f64::from(c))).collect()
}

/// Flips uniformly chosen genes until exactly `n` are set.
pub fn repair_cardinality(genes: &mut [u8], n: usize, rng: &mut StreamRng) {
    assert!(n <= genes.len());
    let mut ones: Vec<usize> = (0..genes.len()).filter(|&j| genes[j] == 1).collect();
    if ones.len() > n {
        while ones.len() > n {
            let j = ones.swap_remove(rng.random_range(0..ones.len()));
            genes[j] = 0;
        }
    } else if ones.len() < n {
        let mut zeros: Vec<usize> = (0..genes.len()).filter(|&j| genes[j] == 0).collect();
        for _ in ones.len()..n {
            let j = zeros.swap_remove(rng.random_range(0..zeros.len()));
            genes[j] = 1;
        }
    }
}

/// Thresholds at 0.5 and repairs to exactly `n` ones.
pub fn binarize_repair(v: &[f64], n: usize, rng: &mut StreamRng) -> Vec<u8> {
    let mut genes: Vec<u8> = v.iter().map(|&x| u8::from(x >= 0.5)).collect();
    repair_cardinality(&mut genes, n, rng);
    genes
}

/// Draws the start and length of an exponential-crossover run over `w` genes.
///
/// Standard semantics keep copying while `rand < rate`. The literal variant stops at the
/// first draw below `rate` once at least two genes were copied.
pub fn crossover_span(w: usize, rate: f64, literal: bool, rng: &mut StreamRng) -> (usize, usize) {
    assert!(w > 0);
    let start = rng.random_range(0..w);
    let mut copies = 1;
    if literal {
        // repeat { copy; L += 1 } until rand < rate and L < w, with L starting at 1
        while copies < w {
            let stop = rng.random::<f64>() < rate && copies + 1 < w;
            if stop {
                break;
            }
            copies += 1;
        }
    } else {
        while copies < w && rng.random::<f64>() < rate {
            copies += 1;
        }
    }
    (start, copies)
}

/// Copies `len` mutant genes into a copy of `target`, starting at `start` and wrapping.
pub fn apply_span(target: &[u8], mutant: &[u8], start: usize, len: usize) -> Vec<u8> {
    assert_eq!(target.len(), mutant.len());
    let w = target.len();
    let mut trial = target.to_vec();
    for step in 0..len.min(w) {
        let j = (start + step) % w;
        trial[j] = mutant[j];
    }
    trial
}

/// Exponential crossover followed by cardinality repair.
pub fn crossover_exponential(
    target: &[u8],
    mutant: &[u8],
    rate: f64,
    n: usize,
    literal: bool,
    rng: &mut StreamRng,
) -> Vec<u8> {
    let (start, len) = crossover_span(target.len(), rate, literal, rng);
    let mut trial = apply_span(target, mutant, start, len);
    repair_cardinality(&mut trial, n, rng);
    trial
}

/// True when the trial replaces the target: `Q(trial) >= Q(target)`. An exact fitness tie
/// between different objectives (possible only through rounding) keeps the lower objective.
pub fn de_select(target: &Individual, trial: &Individual) -> bool {
    if trial.fitness == target.fitness {
        trial.objective <= target.objective
    } else {
        trial.fitness > target.fitness
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;

    fn rng() -> StreamRng {
        substream(5, "ops", &[])
    }

    fn ind(fitness: f64, objective: f64) -> Individual {
        Individual { genes: vec![], objective, energy: 0.0, fitness }
    }

    #[test]
    fn population_is_feasible() {
        let pop = init_population(7, 3, 50, &mut rng());
        assert_eq!(pop.len(), 50);
        assert!(pop.iter().all(|g| g.len() == 7 && g.iter().map(|&x| x as usize).sum::<usize>() == 3));
        assert!(init_population(4, 4, 5, &mut rng()).iter().all(|g| g == &vec![1; 4]));
    }

    #[test]
    fn positions_are_uniform() {
        let mut r = rng();
        let mut counts = [0usize; 4];
        for genes in init_population(4, 2, 1000, &mut r) {
            for (c, g) in counts.iter_mut().zip(genes) {
                *c += g as usize;
            }
        }
        for c in counts {
            assert!((c as f64 / 1000.0 - 0.5).abs() <= 0.05, "{counts:?}");
        }
    }

    #[test]
    fn roulette_first_pick_frequencies() {
        let mut r = rng();
        let fitness = [0.0, 4.0, 8.0, 1.0];
        let mut counts = [0usize; 4];
        let draws = 100_000;
        for _ in 0..draws {
            counts[rws_select3(&fitness, None, &mut r)[0]] += 1;
        }
        let expected = [0.0, 4.0 / 13.0, 8.0 / 13.0, 1.0 / 13.0];
        for (c, e) in counts.iter().zip(expected) {
            assert!((*c as f64 / draws as f64 - e).abs() <= 0.02, "{counts:?}");
        }
        assert_eq!(counts[0], 0);
    }

    #[test]
    fn roulette_uniform_when_flat() {
        let mut r = rng();
        let mut counts = [0usize; 5];
        let draws = 100_000;
        for _ in 0..draws {
            counts[rws_select3(&[1.0; 5], None, &mut r)[0]] += 1;
        }
        assert!(counts.iter().all(|&c| (c as f64 / draws as f64 - 0.2).abs() <= 0.02), "{counts:?}");
        for _ in 0..1000 {
            counts[rws_select3(&[0.0; 5], None, &mut r)[0]] += 1;
        }
    }

    #[test]
    fn roulette_picks_are_distinct_and_avoid_target() {
        let mut r = rng();
        for t in 0..4 {
            for _ in 0..500 {
                let [a, b, c] = rws_select3(&[0.0, 4.0, 8.0, 1.0], Some(t), &mut r);
                assert!(a != b && b != c && a != c);
                assert!(![a, b, c].contains(&t));
            }
        }
    }

    #[test]
    fn mutation_arithmetic() {
        assert_eq!(mutate(&[1, 0], &[1, 1], &[0, 0], 0.5), vec![1.5, 0.5]);
        assert_eq!(mutate(&[1, 0, 1], &[0, 1, 1], &[0, 1, 1], 0.5), vec![1.0, 0.0, 1.0]);
        assert_eq!(mutate(&[1, 0, 1], &[0, 1, 1], &[1, 0, 0], 0.0), vec![1.0, 0.0, 1.0]);
    }

    #[test]
    fn binarize_fixed_point_and_repair() {
        let mut r = rng();
        assert_eq!(binarize_repair(&[1.0, 0.0, 1.0, 0.0], 2, &mut r), vec![1, 0, 1, 0]);
        let mut seen = std::collections::BTreeSet::new();
        for _ in 0..200 {
            let g = binarize_repair(&[1.5, 0.5, -0.5, 0.2], 1, &mut r);
            assert!(g == vec![1, 0, 0, 0] || g == vec![0, 1, 0, 0], "{g:?}");
            seen.insert(g);
        }
        assert_eq!(seen.len(), 2);
        assert_eq!(binarize_repair(&[0.0; 6], 3, &mut r).iter().filter(|&&g| g == 1).count(), 3);
    }

    #[test]
    fn crossover_extremes() {
        let mut r = rng();
        for _ in 0..100 {
            assert_eq!(crossover_span(6, 0.0, false, &mut r).1, 1);
            assert_eq!(crossover_span(6, 1.0, false, &mut r).1, 6);
        }
        let target = [0, 0, 1, 1, 0, 1];
        let mutant = [1, 1, 0, 0, 1, 0];
        assert_eq!(crossover_exponential(&target, &mutant, 1.0, 3, false, &mut r), mutant.to_vec());
    }

    #[test]
    fn crossover_wraps_from_start() {
        let target = [0u8; 5];
        let mutant = [1u8; 5];
        assert_eq!(apply_span(&target, &mutant, 3, 2), vec![0, 0, 0, 1, 1]);
        assert_eq!(apply_span(&target, &mutant, 4, 3), vec![1, 1, 0, 0, 1]);
    }

    #[test]
    fn literal_crossover_copies_more_at_low_rate() {
        let mut r = rng();
        let mean = |literal, rate, r: &mut StreamRng| {
            (0..2000).map(|_| crossover_span(10, rate, literal, r).1 as f64).sum::<f64>() / 2000.0
        };
        assert!(mean(true, 0.1, &mut r) > mean(true, 0.9, &mut r));
        assert!(mean(false, 0.1, &mut r) < mean(false, 0.9, &mut r));
    }

    #[test]
    fn selection_prefers_trial_on_ties() {
        assert!(de_select(&ind(3.0, -3.0), &ind(5.0, -5.0)));
        assert!(de_select(&ind(3.0, -3.0), &ind(3.0, -3.0)));
        assert!(!de_select(&ind(3.0, -3.0), &ind(1.0, -1.0)));
    }
}
