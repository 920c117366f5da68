//! Fixed-length bit-string genotypes.
//!
//! Alleles are packed 64 per word; position `i` lives in word `i / 64`,
//! bit `i % 64`. Bits past `len` in the last word are always zero, so
//! word-wise equality and popcounts are exact.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::{Error, Result};

const WORD: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Genotype {
    words: Vec<u64>,
    len: usize,
}

fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

fn tail_mask(len: usize) -> u64 {
    match len % WORD {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

impl Genotype {
    /// All-zero genotype of `len` alleles.
    pub fn zeros(len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::invalid("genotype length must be at least 1"));
        }
        Ok(Genotype {
            words: vec![0; words_for(len)],
            len,
        })
    }

    pub fn ones(len: usize) -> Result<Self> {
        let mut g = Self::zeros(len)?;
        g.words.iter_mut().for_each(|w| *w = u64::MAX);
        g.clear_tail();
        Ok(g)
    }

    /// Uniform random genotype; each allele is an independent fair coin drawn from `rng`.
    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Result<Self> {
        let mut g = Self::zeros(len)?;
        for w in g.words.iter_mut() {
            *w = rng.gen::<u64>();
        }
        g.clear_tail();
        Ok(g)
    }

    pub fn from_bools(bits: &[bool]) -> Result<Self> {
        let mut g = Self::zeros(bits.len())?;
        for (i, &b) in bits.iter().enumerate() {
            g.set(i, b);
        }
        Ok(g)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    /// Always false: a genotype holds at least one allele.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn get(&self, pos: usize) -> bool {
        assert!(pos < self.len, "position {pos} out of range {}", self.len);
        (self.words[pos / WORD] >> (pos % WORD)) & 1 == 1
    }

    pub fn set(&mut self, pos: usize, value: bool) {
        assert!(pos < self.len, "position {pos} out of range {}", self.len);
        let bit = 1u64 << (pos % WORD);
        if value {
            self.words[pos / WORD] |= bit;
        } else {
            self.words[pos / WORD] &= !bit;
        }
    }

    pub fn flip(&mut self, pos: usize) {
        assert!(pos < self.len, "position {pos} out of range {}", self.len);
        self.words[pos / WORD] ^= 1u64 << (pos % WORD);
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Number of ones in positions `[start, end)`.
    pub fn count_ones_in(&self, start: usize, end: usize) -> usize {
        assert!(start <= end && end <= self.len);
        (start..end).filter(|&i| self.get(i)).count()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn to_bools(&self) -> Vec<bool> {
        self.iter().collect()
    }

    /// Exchange the alleles of positions `[start, end)` between `a` and `b`.
    pub fn swap_segment(
        a: &mut Genotype,
        b: &mut Genotype,
        start: usize,
        end: usize,
    ) -> Result<()> {
        check_same_len(a, b)?;
        if start > end || end > a.len {
            return Err(Error::invalid(format!(
                "segment [{start}, {end}) outside genotype of length {}",
                a.len
            )));
        }
        for (wi, (wa, wb)) in a.words.iter_mut().zip(b.words.iter_mut()).enumerate() {
            let mask = segment_mask(wi, start, end);
            let diff = (*wa ^ *wb) & mask;
            *wa ^= diff;
            *wb ^= diff;
        }
        Ok(())
    }

    fn clear_tail(&mut self) {
        let mask = tail_mask(self.len);
        if let Some(last) = self.words.last_mut() {
            *last &= mask;
        }
    }
}

/// Mask of the bits of word `wi` that fall inside `[start, end)`.
fn segment_mask(wi: usize, start: usize, end: usize) -> u64 {
    let lo = wi * WORD;
    let hi = lo + WORD;
    let s = start.clamp(lo, hi) - lo;
    let e = end.clamp(lo, hi) - lo;
    if s >= e {
        return 0;
    }
    let upper = if e == WORD { u64::MAX } else { (1u64 << e) - 1 };
    let lower = (1u64 << s) - 1;
    upper & !lower
}

fn check_same_len(a: &Genotype, b: &Genotype) -> Result<()> {
    if a.len != b.len {
        return Err(Error::invalid(format!(
            "genotype length mismatch: {} vs {}",
            a.len, b.len
        )));
    }
    Ok(())
}

/// Number of positions at which `a` and `b` differ.
pub fn hamming_distance(a: &Genotype, b: &Genotype) -> Result<usize> {
    check_same_len(a, b)?;
    Ok(a.words
        .iter()
        .zip(&b.words)
        .map(|(x, y)| (x ^ y).count_ones() as usize)
        .sum())
}

/// Majority allele per position. An exact tie resolves to allele 1.
pub fn consensus<'a, I>(pop: I) -> Result<Genotype>
where
    I: IntoIterator<Item = &'a Genotype>,
{
    let mut iter = pop.into_iter();
    let first = iter
        .next()
        .ok_or_else(|| Error::invalid("consensus of an empty population"))?;
    let len = first.len;
    let mut ones = vec![0usize; len];
    let mut members = 0usize;
    for g in std::iter::once(first).chain(iter) {
        check_same_len(first, g)?;
        members += 1;
        for (i, count) in ones.iter_mut().enumerate() {
            if g.get(i) {
                *count += 1;
            }
        }
    }
    let mut out = Genotype::zeros(len)?;
    for (i, &count) in ones.iter().enumerate() {
        // ones >= zeros  <=>  2 * ones >= members
        if 2 * count >= members {
            out.set(i, true);
        }
    }
    Ok(out)
}

impl fmt::Display for Genotype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.iter().map(|b| if b { '1' } else { '0' }).collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for Genotype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Genotype({self})")
    }
}

impl FromStr for Genotype {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::invalid(format!(
                    "invalid allele character {other:?}"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Genotype::from_bools(&bits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn g(s: &str) -> Genotype {
        s.parse().unwrap()
    }

    #[test]
    fn random_is_deterministic_per_seed() {
        let a = Genotype::random(64, &mut ChaCha8Rng::seed_from_u64(7)).unwrap();
        let b = Genotype::random(64, &mut ChaCha8Rng::seed_from_u64(7)).unwrap();
        assert_eq!(a, b);
        let c = Genotype::random(120, &mut ChaCha8Rng::seed_from_u64(7)).unwrap();
        assert_eq!(c.len(), 120);
        assert!(c.count_ones() <= 120);
    }

    #[test]
    fn zero_length_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            Genotype::random(0, &mut rng),
            Err(Error::InvalidArgument(_))
        ));
        assert!("".parse::<Genotype>().is_err());
    }

    #[test]
    fn random_alleles_are_balanced_per_position() {
        let mut rng = ChaCha8Rng::seed_from_u64(12345);
        let draws = 10_000;
        let mut ones = [0usize; 64];
        for _ in 0..draws {
            let x = Genotype::random(64, &mut rng).unwrap();
            for (i, c) in ones.iter_mut().enumerate() {
                *c += x.get(i) as usize;
            }
        }
        for (i, &c) in ones.iter().enumerate() {
            let mean = c as f64 / draws as f64;
            assert!((0.45..=0.55).contains(&mean), "position {i}: {mean}");
        }
    }

    #[test]
    fn hamming_examples() {
        let x = g("0110101");
        assert_eq!(hamming_distance(&x, &x).unwrap(), 0);
        assert_eq!(hamming_distance(&g("0000"), &g("1111")).unwrap(), 4);
        assert_eq!(hamming_distance(&g("010011"), &g("000111")).unwrap(), 2);
        assert!(hamming_distance(&g("01"), &g("011")).is_err());
    }

    #[test]
    fn consensus_examples() {
        let pop = [g("010"), g("011"), g("110")];
        assert_eq!(consensus(&pop).unwrap(), g("010"));
        assert_eq!(consensus([&g("1011")]).unwrap(), g("1011"));
        // 2 vs 2 split at every position resolves to 1
        let tie = [g("0101"), g("1010"), g("0011"), g("1100")];
        assert_eq!(consensus(&tie).unwrap(), g("1111"));
    }

    #[test]
    fn consensus_errors() {
        let empty: [Genotype; 0] = [];
        assert!(consensus(&empty).is_err());
        assert!(consensus(&[g("01"), g("011")]).is_err());
    }

    #[test]
    fn string_round_trip_keeps_position_order() {
        let x = g("1000000000000000000000000000000000000000000000000000000000000000011");
        assert!(x.get(0));
        assert!(!x.get(1));
        assert!(x.get(x.len() - 1));
        assert_eq!(x.to_string().parse::<Genotype>().unwrap(), x);
        assert!("01x".parse::<Genotype>().is_err());
    }

    #[test]
    fn swap_segment_across_word_boundary() {
        let mut a = Genotype::zeros(130).unwrap();
        let mut b = Genotype::ones(130).unwrap();
        Genotype::swap_segment(&mut a, &mut b, 60, 129).unwrap();
        for i in 0..130 {
            assert_eq!(a.get(i), (60..129).contains(&i), "a[{i}]");
            assert_eq!(b.get(i), !(60..129).contains(&i), "b[{i}]");
        }
        assert!(Genotype::swap_segment(&mut a, &mut b, 3, 131).is_err());
    }

    fn genotype_strategy(len: usize) -> impl Strategy<Value = Genotype> {
        prop::collection::vec(any::<bool>(), len).prop_map(|v| Genotype::from_bools(&v).unwrap())
    }

    fn triple() -> impl Strategy<Value = (Genotype, Genotype, Genotype)> {
        (1usize..200).prop_flat_map(|len| {
            (
                genotype_strategy(len),
                genotype_strategy(len),
                genotype_strategy(len),
            )
        })
    }

    proptest! {
        #[test]
        fn hamming_is_a_metric((a, b, c) in triple()) {
            let ab = hamming_distance(&a, &b).unwrap();
            prop_assert_eq!(ab, hamming_distance(&b, &a).unwrap());
            prop_assert!(ab <= a.len());
            let ac = hamming_distance(&a, &c).unwrap();
            let cb = hamming_distance(&c, &b).unwrap();
            prop_assert!(ab <= ac + cb);
        }

        #[test]
        fn display_parse_round_trip(x in (1usize..300).prop_flat_map(genotype_strategy)) {
            prop_assert_eq!(x.to_string().parse::<Genotype>().unwrap(), x);
        }

        #[test]
        fn consensus_ignores_member_order(
            pop in (1usize..40, 1usize..10).prop_flat_map(|(len, m)| {
                prop::collection::vec(genotype_strategy(len), m)
            }),
            seed in any::<u64>(),
        ) {
            use rand::seq::SliceRandom;
            let mut shuffled = pop.clone();
            shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
            prop_assert_eq!(consensus(&pop).unwrap(), consensus(&shuffled).unwrap());
        }

        #[test]
        fn consensus_of_clones_is_the_member(
            x in (1usize..100).prop_flat_map(genotype_strategy),
            m in 1usize..9,
        ) {
            let pop = vec![x.clone(); m];
            prop_assert_eq!(consensus(&pop).unwrap(), x);
        }
    }
}
