use super::operators::{binarize_repair, crossover_exponential, init_population, mutate, rws_select3};
use super::{de_select, DeParams, Individual};
use crate::objective::{Evaluation, LinearScaling};
use crate::rng::StreamRng;

/// Index of the best member: lowest objective, then lowest energy, then lowest index.
pub fn best_index(population: &[Individual]) -> usize {
    let mut best = 0;
    for (i, ind) in population.iter().enumerate().skip(1) {
        let cur = &population[best];
        let better = ind.objective < cur.objective || (ind.objective == cur.objective && ind.energy < cur.energy);
        if better {
            best = i;
        }
    }
    best
}

/// Differential evolution over length-`dim` chromosomes with exactly `n` ones.
///
/// Each generation rescales the population's fitness, then every member produces one trial
/// (roulette donors, mutation, binarization, exponential crossover, repair) and the better of
/// trial and parent enters the next generation.
pub struct Evolution<'p, F> {
    objective: F,
    params: &'p DeParams,
    n: usize,
    population: Vec<Individual>,
    rng: StreamRng,
    generation: usize,
    evaluations: usize,
}

impl<'p, F> Evolution<'p, F>
where
    F: Fn(&[u8]) -> Evaluation,
{
    pub fn new(dim: usize, n: usize, params: &'p DeParams, objective: F, mut rng: StreamRng) -> Self {
        let genes = init_population(dim, n, params.population_m, &mut rng);
        let mut evo = Self {
            objective,
            params,
            n,
            population: Vec::with_capacity(genes.len()),
            rng,
            generation: 0,
            evaluations: 0,
        };
        evo.population = genes.into_iter().map(|g| evo.evaluate(g)).collect();
        evo.rescale();
        evo
    }

    fn evaluate(&mut self, genes: Vec<u8>) -> Individual {
        self.evaluations += 1;
        let eval = (self.objective)(&genes);
        Individual { genes, objective: eval.objective, energy: eval.energy, fitness: 0.0 }
    }

    fn rescale(&mut self) -> LinearScaling {
        let objectives: Vec<f64> = self.population.iter().map(|i| i.objective).collect();
        let scaling = LinearScaling::fit(&objectives);
        for ind in &mut self.population {
            ind.fitness = scaling.fitness(ind.objective);
        }
        scaling
    }

    /// Runs one generation.
    pub fn step(&mut self) {
        let scaling = self.rescale();
        let fitness: Vec<f64> = self.population.iter().map(|i| i.fitness).collect();
        let mut next = Vec::with_capacity(self.population.len());
        for i in 0..self.population.len() {
            let [r1, r2, r3] = rws_select3(&fitness, Some(i), &mut self.rng);
            let v = mutate(
                &self.population[r1].genes,
                &self.population[r2].genes,
                &self.population[r3].genes,
                self.params.f_weight,
            );
            let mutant = binarize_repair(&v, self.n, &mut self.rng);
            let trial_genes = crossover_exponential(
                &self.population[i].genes,
                &mutant,
                self.params.crossover_rate,
                self.n,
                self.params.literal_crossover,
                &mut self.rng,
            );
            let mut trial = self.evaluate(trial_genes);
            trial.fitness = scaling.fitness(trial.objective);
            let target = &self.population[i];
            next.push(if de_select(target, &trial) { trial } else { target.clone() });
        }
        self.population = next;
        self.generation += 1;
        self.rescale();
    }

    pub fn run(&mut self, generations: usize) {
        for _ in 0..generations {
            self.step();
        }
    }

    pub fn population(&self) -> &[Individual] {
        &self.population
    }

    pub fn best(&self) -> &Individual {
        &self.population[best_index(&self.population)]
    }

    pub fn generation(&self) -> usize {
        self.generation
    }

    /// Objective evaluations so far, including the initial population.
    pub fn evaluations(&self) -> usize {
        self.evaluations
    }

    pub fn into_best(self) -> (Individual, usize) {
        let i = best_index(&self.population);
        let evaluations = self.evaluations;
        (self.population.into_iter().nth(i).expect("non-empty population"), evaluations)
    }
}
