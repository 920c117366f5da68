//! Benchmark fitness functions: MMDP and P-Peaks.

use std::fmt;
use std::io::{BufRead, Write};

use rand::Rng;

use crate::bitgenome::{hamming_distance, Genotype};
use crate::{Error, Result};

/// Common evaluation contract so the GA engine is problem-agnostic.
pub trait Problem: Send + Sync {
    fn chromosome_length(&self) -> usize;

    fn optimum(&self) -> f64;

    fn evaluate(&self, x: &Genotype) -> Result<f64>;

    fn check_length(&self, x: &Genotype) -> Result<()> {
        if x.len() != self.chromosome_length() {
            return Err(Error::invalid(format!(
                "genotype length {} does not match problem length {}",
                x.len(),
                self.chromosome_length()
            )));
        }
        Ok(())
    }
}

pub const MMDP_BLOCK: usize = 6;

const MMDP_TABLE: [f64; 7] = [1.0, 0.0, 0.360384, 0.640576, 0.360384, 0.0, 1.0];

/// Bipolar deceptive subfunction of a 6-bit block, indexed by its unitation.
pub fn mmdp_subfitness(unitation: usize) -> Result<f64> {
    MMDP_TABLE
        .get(unitation)
        .copied()
        .ok_or_else(|| Error::invalid(format!("unitation {unitation} outside 0..=6")))
}

/// Massively multimodal deceptive problem over `k` consecutive 6-bit blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MmdpProblem {
    k: usize,
}

impl MmdpProblem {
    pub fn new(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("MMDP needs at least one subproblem"));
        }
        Ok(MmdpProblem { k })
    }

    pub fn subproblems(&self) -> usize {
        self.k
    }
}

impl Problem for MmdpProblem {
    fn chromosome_length(&self) -> usize {
        MMDP_BLOCK * self.k
    }

    fn optimum(&self) -> f64 {
        self.k as f64
    }

    fn evaluate(&self, x: &Genotype) -> Result<f64> {
        self.check_length(x)?;
        (0..self.k)
            .map(|b| mmdp_subfitness(x.count_ones_in(b * MMDP_BLOCK, (b + 1) * MMDP_BLOCK)))
            .sum()
    }
}

/// P-Peaks instance: fitness is the normalized similarity to the nearest peak.
#[derive(Clone, PartialEq, Eq)]
pub struct PPeaksProblem {
    peaks: Vec<Genotype>,
    bits: usize,
}

impl PPeaksProblem {
    /// Draw `peak_count` independent uniform peaks of `bits` bits from `rng`.
    pub fn generate<R: Rng + ?Sized>(peak_count: usize, bits: usize, rng: &mut R) -> Result<Self> {
        if peak_count == 0 || bits == 0 {
            return Err(Error::invalid(format!(
                "P-Peaks needs P >= 1 and N >= 1, got P={peak_count} N={bits}"
            )));
        }
        let peaks = (0..peak_count)
            .map(|_| Genotype::random(bits, rng))
            .collect::<Result<Vec<_>>>()?;
        Ok(PPeaksProblem { peaks, bits })
    }

    pub fn from_peaks(peaks: Vec<Genotype>) -> Result<Self> {
        let bits = peaks
            .first()
            .ok_or_else(|| Error::invalid("P-Peaks needs at least one peak"))?
            .len();
        if peaks.iter().any(|p| p.len() != bits) {
            return Err(Error::invalid("P-Peaks peaks must share one length"));
        }
        Ok(PPeaksProblem { peaks, bits })
    }

    pub fn peaks(&self) -> &[Genotype] {
        &self.peaks
    }

    pub fn peak_count(&self) -> usize {
        self.peaks.len()
    }

    /// Hamming distance from `x` to its nearest peak.
    pub fn nearest_distance(&self, x: &Genotype) -> Result<usize> {
        self.check_length(x)?;
        let mut best = usize::MAX;
        for p in &self.peaks {
            best = best.min(hamming_distance(x, p)?);
        }
        Ok(best)
    }

    /// Text dump: a `P N` header line, then one bit string per peak.
    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{} {}", self.peaks.len(), self.bits)?;
        for p in &self.peaks {
            writeln!(out, "{p}")?;
        }
        Ok(())
    }

    pub fn read_from<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines().enumerate();
        let (_, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            reason: "missing `P N` header".into(),
        })?;
        let header = header?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let parse = |s: &str| {
            s.parse::<usize>().map_err(|e| Error::Parse {
                line: 1,
                reason: format!("bad header field {s:?}: {e}"),
            })
        };
        let (count, bits) = match fields.as_slice() {
            [p, n] => (parse(p)?, parse(n)?),
            _ => {
                return Err(Error::Parse {
                    line: 1,
                    reason: format!("expected `P N`, got {header:?}"),
                })
            }
        };
        let mut peaks = Vec::with_capacity(count);
        for (idx, line) in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let g: Genotype = line.parse().map_err(|e: Error| Error::Parse {
                line: idx + 1,
                reason: e.to_string(),
            })?;
            if g.len() != bits {
                return Err(Error::Parse {
                    line: idx + 1,
                    reason: format!("peak has {} bits, header says {bits}", g.len()),
                });
            }
            peaks.push(g);
        }
        if peaks.len() != count || count == 0 {
            return Err(Error::Parse {
                line: 1,
                reason: format!("header declares {count} peaks, found {}", peaks.len()),
            });
        }
        Self::from_peaks(peaks)
    }
}

impl fmt::Debug for PPeaksProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PPeaksProblem")
            .field("peaks", &self.peaks.len())
            .field("bits", &self.bits)
            .finish()
    }
}

impl Problem for PPeaksProblem {
    fn chromosome_length(&self) -> usize {
        self.bits
    }

    fn optimum(&self) -> f64 {
        1.0
    }

    fn evaluate(&self, x: &Genotype) -> Result<f64> {
        let d = self.nearest_distance(x)?;
        Ok((self.bits - d) as f64 / self.bits as f64)
    }
}
