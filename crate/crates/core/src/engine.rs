//! Single-island steady-state GA.
//!
//! Each generation creates `G = ceil(selection_rate * M)` offspring from
//! linear-rank-selected parents, by two-point crossover (first child kept)
//! or single-bit-flip mutation in proportion to the operator priorities,
//! and the offspring overwrite the `G` worst members.

use std::cmp::Ordering;

use log::warn;
use rand::Rng;

use crate::bitgenome::Genotype;
use crate::problems::Problem;
use crate::{Error, Result};

/// Fresh-evaluation counter of one island.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct EvalCounter(u64);

impl EvalCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self) -> u64 {
        self.0
    }

    fn bump(&mut self) {
        self.0 += 1;
    }
}

/// A genotype together with its fitness, computed once at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    genotype: Genotype,
    fitness: f64,
}

impl Individual {
    pub fn evaluate(
        genotype: Genotype,
        problem: &dyn Problem,
        counter: &mut EvalCounter,
    ) -> Result<Self> {
        let fitness = problem.evaluate(&genotype)?;
        counter.bump();
        Ok(Individual { genotype, fitness })
    }

    /// Wrap an already-known fitness. Used for fixtures and migrants whose
    /// fitness was computed on the sending island.
    pub fn with_fitness(genotype: Genotype, fitness: f64) -> Self {
        Individual { genotype, fitness }
    }

    pub fn genotype(&self) -> &Genotype {
        &self.genotype
    }

    pub fn fitness(&self) -> f64 {
        self.fitness
    }
}

/// Descending fitness; equal fitness keeps index order.
fn by_fitness_desc(a: &(usize, f64), b: &(usize, f64)) -> Ordering {
    b.1.total_cmp(&a.1).then(a.0.cmp(&b.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    members: Vec<Individual>,
}

impl Population {
    pub fn new(members: Vec<Individual>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::invalid("population must not be empty"));
        }
        let len = members[0].genotype.len();
        if members.iter().any(|m| m.genotype.len() != len) {
            return Err(Error::invalid(
                "population members must share one genotype length",
            ));
        }
        Ok(Population { members })
    }

    /// `size` uniform random genotypes, each evaluated once.
    pub fn random<R: Rng + ?Sized>(
        size: usize,
        problem: &dyn Problem,
        rng: &mut R,
        counter: &mut EvalCounter,
    ) -> Result<Self> {
        let members = (0..size)
            .map(|_| {
                let g = Genotype::random(problem.chromosome_length(), rng)?;
                Individual::evaluate(g, problem, counter)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(members)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[Individual] {
        &self.members
    }

    pub fn get(&self, idx: usize) -> &Individual {
        &self.members[idx]
    }

    pub fn genotype_len(&self) -> usize {
        self.members[0].genotype.len()
    }

    /// Member indices from best to worst, ties by lower index first.
    pub fn ranking(&self) -> Vec<usize> {
        let mut keyed: Vec<(usize, f64)> =
            self.members.iter().map(|m| m.fitness).enumerate().collect();
        keyed.sort_by(by_fitness_desc);
        keyed.into_iter().map(|(i, _)| i).collect()
    }

    /// Index of the highest-fitness member, lowest index on ties.
    pub fn best_index(&self) -> usize {
        let mut best = 0;
        for (i, m) in self.members.iter().enumerate().skip(1) {
            if m.fitness > self.members[best].fitness {
                best = i;
            }
        }
        best
    }

    pub fn best(&self) -> &Individual {
        &self.members[self.best_index()]
    }

    /// Index of the lowest-fitness member, highest index on ties.
    pub fn worst_index(&self) -> usize {
        let mut worst = 0;
        for (i, m) in self.members.iter().enumerate().skip(1) {
            if m.fitness <= self.members[worst].fitness {
                worst = i;
            }
        }
        worst
    }

    pub fn mean_fitness(&self) -> f64 {
        self.members.iter().map(|m| m.fitness).sum::<f64>() / self.members.len() as f64
    }

    pub fn fitnesses(&self) -> Vec<f64> {
        self.members.iter().map(|m| m.fitness).collect()
    }

    pub fn replace(&mut self, idx: usize, ind: Individual) -> Result<Individual> {
        if ind.genotype.len() != self.genotype_len() {
            return Err(Error::invalid(format!(
                "replacement length {} does not match population length {}",
                ind.genotype.len(),
                self.genotype_len()
            )));
        }
        Ok(std::mem::replace(&mut self.members[idx], ind))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaParams {
    pub population_size: usize,
    /// Fraction of the population replaced by offspring each generation.
    pub selection_rate: f64,
    pub mutation_priority: f64,
    pub crossover_priority: f64,
    pub generations_to_migration: usize,
    pub max_evaluations: u64,
}

impl GaParams {
    pub fn validate(&self) -> Result<()> {
        if self.population_size == 0 {
            return Err(Error::config("population_size", "must be at least 1"));
        }
        if !(self.selection_rate > 0.0 && self.selection_rate <= 1.0) {
            return Err(Error::config("selection_rate", "must lie in (0, 1]"));
        }
        if self.selection_rate == 1.0 {
            warn!("selection_rate = 1 replaces the whole population; the best member is not preserved");
        }
        for (name, v) in [
            ("mutation_priority", self.mutation_priority),
            ("crossover_priority", self.crossover_priority),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::config(name, "must be a non-negative number"));
            }
        }
        if self.mutation_priority + self.crossover_priority <= 0.0 {
            return Err(Error::config(
                "crossover_priority",
                "mutation and crossover priorities must not both be zero",
            ));
        }
        if self.generations_to_migration == 0 {
            return Err(Error::config(
                "generations_to_migration",
                "must be at least 1",
            ));
        }
        if self.max_evaluations == 0 {
            return Err(Error::config("max_evaluations", "must be at least 1"));
        }
        Ok(())
    }

    /// Offspring per generation, `ceil(selection_rate * population_size)`.
    pub fn offspring_per_generation(&self) -> usize {
        // 1e-9 absorbs representation error such as 0.3 * 10 = 3.0000000000000004
        let g = (self.selection_rate * self.population_size as f64 - 1e-9).ceil() as usize;
        g.clamp(1, self.population_size)
    }

    pub fn crossover_probability(&self) -> f64 {
        self.crossover_priority / (self.mutation_priority + self.crossover_priority)
    }
}

/// Index into `ranking` with linear-rank weights M, M-1, ..., 1.
fn rank_position<R: Rng + ?Sized>(m: usize, rng: &mut R) -> usize {
    let total = m * (m + 1) / 2;
    let mut r = rng.gen_range(0..total);
    for pos in 0..m {
        let w = m - pos;
        if r < w {
            return pos;
        }
        r -= w;
    }
    unreachable!("rank weights sum to total")
}

/// Linear-rank parent selection: the i-th best of M is chosen with
/// probability 2(M - i + 1) / (M (M + 1)).
pub fn rank_select_parent<'a, R: Rng + ?Sized>(pop: &'a Population, rng: &mut R) -> &'a Individual {
    let ranking = pop.ranking();
    &pop.members[ranking[rank_position(ranking.len(), rng)]]
}

/// Swap positions `[start, end)` between copies of `a` and `b`.
pub fn two_point_crossover_at(
    a: &Genotype,
    b: &Genotype,
    start: usize,
    end: usize,
) -> Result<(Genotype, Genotype)> {
    let (mut x, mut y) = (a.clone(), b.clone());
    Genotype::swap_segment(&mut x, &mut y, start, end)?;
    Ok((x, y))
}

/// Two-point crossover with cut pair `0 <= i < j <= L` drawn uniformly.
pub fn two_point_crossover<R: Rng + ?Sized>(
    a: &Genotype,
    b: &Genotype,
    rng: &mut R,
) -> Result<(Genotype, Genotype)> {
    if a.len() != b.len() {
        return Err(Error::invalid(format!(
            "crossover length mismatch: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    let len = a.len();
    if len < 2 {
        return Err(Error::invalid("two-point crossover needs length >= 2"));
    }
    let i = rng.gen_range(0..=len);
    let mut j = rng.gen_range(0..len);
    if j >= i {
        j += 1;
    }
    let (start, end) = if i < j { (i, j) } else { (j, i) };
    two_point_crossover_at(a, b, start, end)
}

/// Copy of `x` with exactly one uniformly chosen position flipped.
pub fn bitflip_mutation<R: Rng + ?Sized>(x: &Genotype, rng: &mut R) -> Genotype {
    let mut out = x.clone();
    out.flip(rng.gen_range(0..x.len()));
    out
}

/// Per-generation summary line of the optional run trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenerationRecord {
    pub generation: u64,
    pub offspring: usize,
    pub best_fitness: f64,
    pub mean_fitness: f64,
    pub evaluations: u64,
}

/// One steady-state generation in place. Returns the number of offspring
/// created (and evaluated).
pub fn generation_step<R: Rng + ?Sized>(
    pop: &mut Population,
    params: &GaParams,
    problem: &dyn Problem,
    rng: &mut R,
    counter: &mut EvalCounter,
) -> Result<usize> {
    let m = pop.len();
    let g = params.offspring_per_generation().min(m);
    let p_cross = params.crossover_probability();
    let ranking = pop.ranking();
    let pick = |rng: &mut R| &pop.members[ranking[rank_position(m, rng)]];

    let mut offspring = Vec::with_capacity(g);
    for _ in 0..g {
        let child = if rng.gen::<f64>() < p_cross {
            let a = pick(rng).genotype.clone();
            let b = pick(rng).genotype.clone();
            two_point_crossover(&a, &b, rng)?.0
        } else {
            let parent = pick(rng).genotype.clone();
            bitflip_mutation(&parent, rng)
        };
        offspring.push(Individual::evaluate(child, problem, counter)?);
    }

    let mut doomed: Vec<usize> = ranking[m - g..].to_vec();
    doomed.sort_unstable();
    for (slot, child) in doomed.into_iter().zip(offspring) {
        pop.members[slot] = child;
    }
    Ok(g)
}
