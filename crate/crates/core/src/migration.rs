//! Migrant selection and incorporation.
//!
//! The multikulti policies pick, from a candidate pool of the sending
//! island, the member farthest in Hamming distance from a representative
//! of the receiving island. The representative is either the receiver's
//! best individual or its consensus sequence; the pool is either the whole
//! population or its fitter half.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::bitgenome::{consensus, hamming_distance, Genotype};
use crate::engine::{Individual, Population};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RepresentativeKind {
    BestIndividual,
    ConsensusSequence,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PoolKind {
    Full,
    EliteHalf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PolicyKind {
    Best,
    Random,
    Mk,
    MkCons,
    MkElite,
    MkEliteCons,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 6] = [
        PolicyKind::Best,
        PolicyKind::Random,
        PolicyKind::Mk,
        PolicyKind::MkCons,
        PolicyKind::MkElite,
        PolicyKind::MkEliteCons,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PolicyKind::Best => "best",
            PolicyKind::Random => "random",
            PolicyKind::Mk => "mk",
            PolicyKind::MkCons => "mk-cons",
            PolicyKind::MkElite => "mke",
            PolicyKind::MkEliteCons => "mke-cons",
        }
    }

    pub fn needs_representative(self) -> bool {
        self.representative_kind().is_some()
    }

    pub fn representative_kind(self) -> Option<RepresentativeKind> {
        match self {
            PolicyKind::Mk | PolicyKind::MkElite => Some(RepresentativeKind::BestIndividual),
            PolicyKind::MkCons | PolicyKind::MkEliteCons => {
                Some(RepresentativeKind::ConsensusSequence)
            }
            PolicyKind::Best | PolicyKind::Random => None,
        }
    }

    pub fn pool(self) -> PoolKind {
        match self {
            PolicyKind::MkElite | PolicyKind::MkEliteCons => PoolKind::EliteHalf,
            _ => PoolKind::Full,
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PolicyKind::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                Error::invalid(format!(
                    "unknown policy {s:?} (expected one of best, random, mk, mk-cons, mke, mke-cons)"
                ))
            })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Representative {
    pub kind: RepresentativeKind,
    pub genotype: Genotype,
}

pub fn representative(pop: &Population, kind: RepresentativeKind) -> Result<Representative> {
    if pop.is_empty() {
        return Err(Error::invalid("representative of an empty population"));
    }
    let genotype = match kind {
        RepresentativeKind::BestIndividual => pop.best().genotype().clone(),
        RepresentativeKind::ConsensusSequence => {
            consensus(pop.members().iter().map(|m| m.genotype()))?
        }
    };
    Ok(Representative { kind, genotype })
}

/// Full: every member in index order. EliteHalf: the `ceil(M/2)` fittest,
/// best first.
pub fn candidate_pool(pop: &Population, pool: PoolKind) -> Vec<&Individual> {
    match pool {
        PoolKind::Full => pop.members().iter().collect(),
        PoolKind::EliteHalf => {
            let keep = pop.len().div_ceil(2);
            pop.ranking()
                .into_iter()
                .take(keep)
                .map(|i| pop.get(i))
                .collect()
        }
    }
}

/// Pick the individual to send. Returns a copy; `pop` is untouched.
pub fn select_migrant<R: Rng + ?Sized>(
    policy: PolicyKind,
    pop: &Population,
    rep: Option<&Representative>,
    rng: &mut R,
) -> Result<Individual> {
    if pop.is_empty() {
        return Err(Error::invalid(
            "cannot select a migrant from an empty population",
        ));
    }
    match policy {
        PolicyKind::Best => Ok(pop.best().clone()),
        PolicyKind::Random => Ok(pop.get(rng.gen_range(0..pop.len())).clone()),
        _ => {
            let want = policy
                .representative_kind()
                .expect("multikulti policies carry a representative kind");
            let rep = rep.ok_or_else(|| {
                Error::ContractViolation(format!("policy {policy} needs a representative"))
            })?;
            if rep.kind != want {
                return Err(Error::ContractViolation(format!(
                    "policy {policy} expects a {want:?} representative, got {:?}",
                    rep.kind
                )));
            }
            let mut chosen: Option<(&Individual, usize)> = None;
            for cand in candidate_pool(pop, policy.pool()) {
                let d = hamming_distance(cand.genotype(), &rep.genotype)?;
                if chosen.is_none_or(|(_, best)| d > best) {
                    chosen = Some((cand, d));
                }
            }
            Ok(chosen.expect("candidate pool is non-empty").0.clone())
        }
    }
}

/// Overwrite the receiver's worst member (highest index on ties) with `migrant`.
pub fn incorporate_migrant(pop: &mut Population, migrant: Individual) -> Result<()> {
    let worst = pop.worst_index();
    pop.replace(worst, migrant)?;
    Ok(())
}
