//! Generational evolutionary algorithm with elitism, uniform crossover,
//! and swap mutation.
//!
//! Elites carry their cached fitness into the next generation and are never
//! re-evaluated, so only fresh offspring consume evaluation budget.

use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rand_chacha::rand_core::SeedableRng;

use crate::design::{Design, GridShape};
use crate::opt::{random_design, Optimizer};
use crate::seed::{stream_rng, STREAM_ALGO};

#[derive(Debug, Clone, PartialEq)]
pub struct EaConfig {
    pub population: usize,
    /// Number of top individuals eligible as parents.
    pub parents_mating: usize,
    /// Number of best individuals copied unchanged (with cached fitness).
    pub keep_parents: usize,
    /// Fraction of genes mutated per offspring; each selected gene swaps
    /// values with a uniformly chosen partner gene.
    pub gene_mutation_rate: f64,
}

impl Default for EaConfig {
    fn default() -> Self {
        Self {
            population: 92,
            parents_mating: 8,
            keep_parents: 2,
            gene_mutation_rate: 0.34,
        }
    }
}

impl EaConfig {
    fn validate(&self) {
        assert!(
            self.population >= self.parents_mating && self.parents_mating >= self.keep_parents,
            "population >= parents_mating >= keep_parents required"
        );
        assert!(self.parents_mating >= 1, "need at least one parent");
        assert!(
            (0.0..=1.0).contains(&self.gene_mutation_rate),
            "gene_mutation_rate must be a fraction"
        );
    }
}

/// Breeds the next generation from a fully evaluated population.
///
/// Returns individuals paired with `Some(fitness)` for carried-over elites
/// and `None` for offspring that still need evaluation. Parent pairs are
/// drawn uniformly (with replacement) from the top `parents_mating`
/// individuals.
pub fn ea_generation(
    evaluated: &[(Design, f64)],
    cfg: &EaConfig,
    rng: &mut ChaCha12Rng,
) -> Vec<(Design, Option<f64>)> {
    assert_eq!(evaluated.len(), cfg.population, "population size mismatch");
    let mut order: Vec<usize> = (0..evaluated.len()).collect();
    // descending fitness; stable, so earlier individuals win exact ties
    order.sort_by(|&a, &b| evaluated[b].1.partial_cmp(&evaluated[a].1).unwrap());

    let mut next: Vec<(Design, Option<f64>)> = Vec::with_capacity(cfg.population);
    for &i in order.iter().take(cfg.keep_parents) {
        next.push((evaluated[i].0.clone(), Some(evaluated[i].1)));
    }
    let parents: Vec<&Design> = order
        .iter()
        .take(cfg.parents_mating)
        .map(|&i| &evaluated[i].0)
        .collect();

    let n = evaluated[0].0.bits().len();
    let mutated_genes = (cfg.gene_mutation_rate * n as f64).round() as usize;
    while next.len() < cfg.population {
        let pa = parents[rng.random_range(0..parents.len())];
        let pb = parents[rng.random_range(0..parents.len())];
        let mut bits: Vec<u8> = (0..n)
            .map(|i| {
                if rng.random_range(0..2) == 0 {
                    pa.bits()[i]
                } else {
                    pb.bits()[i]
                }
            })
            .collect();
        // swap mutation: each selected gene exchanges values with a
        // uniformly chosen partner (a permutation, so the ones-count of the
        // offspring is preserved)
        for g in sample(rng, n, mutated_genes) {
            let partner = rng.random_range(0..n);
            bits.swap(g, partner);
        }
        next.push((Design::new(bits, evaluated[0].0.shape()).unwrap(), None));
    }
    next
}

pub struct EvolutionaryAlgorithm {
    config: EaConfig,
    shape: GridShape,
    rng: ChaCha12Rng,
    population: Vec<(Design, Option<f64>)>,
    /// Index into `population` of the individual awaiting its payoff.
    pending: Option<usize>,
    generations: usize,
}

impl EvolutionaryAlgorithm {
    pub fn new(config: EaConfig, shape: GridShape) -> Self {
        config.validate();
        Self {
            config,
            shape,
            rng: ChaCha12Rng::seed_from_u64(0),
            population: Vec::new(),
            pending: None,
            generations: 0,
        }
    }

    /// Completed generation count (0 while the initial population is being
    /// evaluated).
    pub fn generations(&self) -> usize {
        self.generations
    }

    /// Highest cached fitness in the current population, if any.
    pub fn best_fitness(&self) -> Option<f64> {
        self.population
            .iter()
            .filter_map(|(_, f)| *f)
            .fold(None, |acc, f| Some(acc.map_or(f, |a: f64| a.max(f))))
    }

    fn next_unevaluated(&self) -> Option<usize> {
        self.population.iter().position(|(_, f)| f.is_none())
    }
}

impl Optimizer for EvolutionaryAlgorithm {
    fn name(&self) -> &'static str {
        "ea"
    }

    fn reset(&mut self, seed: u64, _total_evaluations: usize) {
        self.rng = stream_rng(seed, STREAM_ALGO);
        self.population = (0..self.config.population)
            .map(|_| (random_design(self.shape, &mut self.rng), None))
            .collect();
        self.pending = None;
        self.generations = 0;
    }

    fn propose(&mut self, _step: usize) -> Design {
        if self.next_unevaluated().is_none() {
            let evaluated: Vec<(Design, f64)> = self
                .population
                .iter()
                .map(|(d, f)| (d.clone(), f.expect("generation fully evaluated")))
                .collect();
            self.population = ea_generation(&evaluated, &self.config, &mut self.rng);
            self.generations += 1;
        }
        let idx = self
            .next_unevaluated()
            .expect("fresh generation has offspring to evaluate");
        self.pending = Some(idx);
        self.population[idx].0.clone()
    }

    fn observe(&mut self, _design: &Design, payoff: f64, _grad: Option<&[f64]>) {
        let idx = self.pending.take().expect("observe follows propose");
        self.population[idx].1 = Some(payoff);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shape4() -> GridShape {
        GridShape::new(4, 1, 1).unwrap()
    }

    fn design(bits: &[u8]) -> Design {
        let shape = GridShape::new(bits.len(), 1, 1).unwrap();
        Design::new(bits.to_vec(), shape).unwrap()
    }

    #[test]
    fn identical_parents_without_mutation_breed_identical_offspring() {
        let d = design(&[1, 0, 1, 1]);
        let pop: Vec<(Design, f64)> = (0..4).map(|i| (d.clone(), 1.0 - i as f64 * 0.1)).collect();
        let cfg = EaConfig {
            population: 4,
            parents_mating: 2,
            keep_parents: 1,
            gene_mutation_rate: 0.0,
        };
        let mut rng = ChaCha12Rng::seed_from_u64(0);
        let next = ea_generation(&pop, &cfg, &mut rng);
        for (child, _) in &next {
            assert_eq!(child.bits(), d.bits());
        }
    }

    #[test]
    fn elites_carry_over_unchanged_with_cached_fitness() {
        let best = design(&[1, 1, 1, 1]);
        let second = design(&[1, 1, 1, 0]);
        let pop = vec![
            (design(&[0, 0, 0, 0]), 0.1),
            (best.clone(), 0.9),
            (design(&[0, 1, 0, 0]), 0.2),
            (second.clone(), 0.8),
        ];
        let cfg = EaConfig {
            population: 4,
            parents_mating: 3,
            keep_parents: 2,
            gene_mutation_rate: 0.34,
        };
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        let next = ea_generation(&pop, &cfg, &mut rng);
        assert_eq!(next[0].0.bits(), best.bits());
        assert_eq!(next[0].1, Some(0.9));
        assert_eq!(next[1].0.bits(), second.bits());
        assert_eq!(next[1].1, Some(0.8));
        assert!(next[2].1.is_none());
        assert!(next[3].1.is_none());
    }

    #[test]
    fn swap_mutation_preserves_ones_count() {
        // parents share the same ones-count, so uniform crossover may change
        // it, but with identical parents any count change must come from
        // mutation — which never changes it
        let d = design(&[1, 1, 0, 0, 1, 0, 1, 0]);
        let pop: Vec<(Design, f64)> = (0..6).map(|i| (d.clone(), i as f64)).collect();
        let cfg = EaConfig {
            population: 6,
            parents_mating: 3,
            keep_parents: 0,
            gene_mutation_rate: 1.0,
        };
        for seed in 0..20 {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let next = ea_generation(&pop, &cfg, &mut rng);
            for (child, _) in &next {
                assert_eq!(child.count_ones(), d.count_ones());
            }
        }
    }

    #[test]
    fn defaults_match_documented_table() {
        let cfg = EaConfig::default();
        assert_eq!(cfg.population, 92);
        assert_eq!(cfg.parents_mating, 8);
        assert_eq!(cfg.keep_parents, 2);
        assert_eq!(cfg.gene_mutation_rate, 0.34);
    }

    #[test]
    fn max_fitness_is_non_decreasing_across_generations() {
        // fitness = fraction of ones; elitism must keep the best ever seen
        let shape = shape4();
        let cfg = EaConfig {
            population: 8,
            parents_mating: 4,
            keep_parents: 2,
            gene_mutation_rate: 0.34,
        };
        let mut ea = EvolutionaryAlgorithm::new(cfg, shape);
        ea.reset(5, 400);
        let mut best_per_gen: Vec<f64> = Vec::new();
        for step in 0..400 {
            let d = ea.propose(step);
            let r = d.count_ones() as f64 / 4.0;
            ea.observe(&d, r, None);
            if ea.next_unevaluated().is_none() {
                best_per_gen.push(ea.best_fitness().unwrap());
            }
        }
        assert!(best_per_gen.len() > 3, "should complete several generations");
        for w in best_per_gen.windows(2) {
            assert!(w[1] >= w[0], "elitism lost the best design: {w:?}");
        }
        assert_eq!(*best_per_gen.last().unwrap(), 1.0);
    }

    #[test]
    fn only_offspring_consume_evaluations() {
        let shape = shape4();
        let cfg = EaConfig {
            population: 6,
            parents_mating: 3,
            keep_parents: 2,
            gene_mutation_rate: 0.2,
        };
        let mut ea = EvolutionaryAlgorithm::new(cfg.clone(), shape);
        ea.reset(2, 100);
        // first generation: all 6 evaluated; afterwards 4 per generation
        for step in 0..6 {
            let d = ea.propose(step);
            ea.observe(&d, d.count_ones() as f64, None);
        }
        assert_eq!(ea.generations(), 0);
        for step in 6..10 {
            let d = ea.propose(step);
            ea.observe(&d, d.count_ones() as f64, None);
        }
        assert_eq!(ea.generations(), 1);
        let d = ea.propose(10);
        ea.observe(&d, 0.0, None);
        assert_eq!(ea.generations(), 2, "exactly 4 offspring per generation");
    }

    #[test]
    #[should_panic(expected = "population >= parents_mating")]
    fn invalid_config_is_rejected() {
        let cfg = EaConfig {
            population: 4,
            parents_mating: 8,
            keep_parents: 2,
            gene_mutation_rate: 0.34,
        };
        EvolutionaryAlgorithm::new(cfg, shape4());
    }
}
