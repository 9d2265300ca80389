//! Boolean functions on `n` voter bits, stored as packed truth tables.
//!
//! Voter `i` (1-based) is bit `i - 1` of the input index, so voter 1 is the
//! least significant bit. Bit `x` of the table is `f(x)`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::rational::Rational;

pub const MAX_ARITY: u32 = 24;

/// Positions `x < 64` whose bit `b` is clear, for `b < 6`.
const LOW_HALF: [u64; 6] = [
    0x5555_5555_5555_5555,
    0x3333_3333_3333_3333,
    0x0f0f_0f0f_0f0f_0f0f,
    0x00ff_00ff_00ff_00ff,
    0x0000_ffff_0000_ffff,
    0x0000_0000_ffff_ffff,
];

/// A set of voters, as a bit mask (voter `i` is bit `i - 1`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Coalition(u32);

impl Coalition {
    pub const EMPTY: Coalition = Coalition(0);

    /// Validates that `mask` only names voters `1..=arity`.
    pub fn new(mask: u32, arity: u32) -> Result<Self> {
        if arity < 32 && mask >> arity != 0 {
            return Err(Error::CoalitionOutOfRange { mask, arity });
        }
        Ok(Coalition(mask))
    }

    pub fn full(arity: u32) -> Self {
        Coalition(low_mask(arity))
    }

    /// Builds a coalition from 1-based voter numbers.
    pub fn from_voters(voters: &[u32]) -> Self {
        Coalition(voters.iter().fold(0, |m, &v| m | 1 << (v - 1)))
    }

    pub fn mask(self) -> u32 {
        self.0
    }

    pub fn len(self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, voter: u32) -> bool {
        (1..=32).contains(&voter) && self.0 >> (voter - 1) & 1 == 1
    }

    /// 1-based members in increasing order.
    pub fn voters(self) -> impl Iterator<Item = u32> {
        let mask = self.0;
        (0..32).filter(move |b| mask >> b & 1 == 1).map(|b| b + 1)
    }

    pub fn complement(self, arity: u32) -> Self {
        Coalition(!self.0 & low_mask(arity))
    }

    /// Packs the bits of `x` at the coalition's positions into the low bits.
    pub fn extract(self, x: u32) -> u32 {
        let mut out = 0;
        let mut k = 0;
        let mut m = self.0;
        while m != 0 {
            let b = m.trailing_zeros();
            out |= (x >> b & 1) << k;
            k += 1;
            m &= m - 1;
        }
        out
    }
}

impl fmt::Display for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, v) in self.voters().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

fn low_mask(arity: u32) -> u32 {
    if arity >= 32 {
        u32::MAX
    } else {
        (1u32 << arity) - 1
    }
}

/// Named families of issue-aggregating functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// 1 iff every member voted 1; the empty coalition gives constant 1.
    Oligarchy(Coalition),
    /// Parity of the members' bits (the character chi_S with 1 mapped to -1).
    Linear(Coalition),
    /// Copies one voter (1-based).
    Dictator(u32),
    Constant(bool),
    /// Majority over the coalition; `None` means all voters.
    Majority(Option<Coalition>),
}

/// Family membership found by [`BoolFn::classify`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FamilyTags {
    pub oligarchy: Option<Coalition>,
    pub linear: Option<Coalition>,
    pub constant: Option<bool>,
    pub dictator: Option<u32>,
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BoolFn {
    arity: u32,
    words: Vec<u64>,
}

impl BoolFn {
    fn check_arity(arity: u32) -> Result<()> {
        if arity == 0 || arity > MAX_ARITY {
            return Err(Error::ArityOutOfRange(arity));
        }
        Ok(())
    }

    fn word_count(arity: u32) -> usize {
        if arity <= 6 {
            1
        } else {
            1 << (arity - 6)
        }
    }

    /// Mask of the valid bits in the single word of a small table.
    fn tail_mask(arity: u32) -> u64 {
        if arity >= 6 {
            u64::MAX
        } else {
            (1u64 << (1u32 << arity)) - 1
        }
    }

    pub fn from_fn(arity: u32, f: impl Fn(u32) -> bool) -> Result<Self> {
        Self::check_arity(arity)?;
        let mut words = vec![0u64; Self::word_count(arity)];
        for x in 0..(1u32 << arity) {
            if f(x) {
                words[(x >> 6) as usize] |= 1 << (x & 63);
            }
        }
        Ok(BoolFn { arity, words })
    }

    /// Small tables (`arity <= 6`) from the integer `Σ f(x) 2^x`.
    pub fn from_bits(arity: u32, bits: u64) -> Result<Self> {
        Self::check_arity(arity)?;
        if arity > 6 {
            return Err(Error::InvalidParameter(format!(
                "from_bits needs arity <= 6, got {arity}"
            )));
        }
        if bits & !Self::tail_mask(arity) != 0 {
            return Err(Error::Parse(format!(
                "table {bits:#x} too long for arity {arity}"
            )));
        }
        Ok(BoolFn { arity, words: vec![bits] })
    }

    pub fn from_words(arity: u32, words: Vec<u64>) -> Result<Self> {
        Self::check_arity(arity)?;
        if words.len() != Self::word_count(arity) || words[0] & !Self::tail_mask(arity) != 0 {
            return Err(Error::Parse("truth table length mismatch".into()));
        }
        Ok(BoolFn { arity, words })
    }

    pub fn constant(arity: u32, value: bool) -> Result<Self> {
        Self::check_arity(arity)?;
        let fill = if value { u64::MAX } else { 0 };
        let mut words = vec![fill; Self::word_count(arity)];
        words[0] &= Self::tail_mask(arity);
        Ok(BoolFn { arity, words })
    }

    pub fn dictator(voter: u32, arity: u32) -> Result<Self> {
        Self::check_arity(arity)?;
        if voter == 0 || voter > arity {
            return Err(Error::VoterOutOfRange { voter, arity });
        }
        Self::from_fn(arity, |x| x >> (voter - 1) & 1 == 1)
    }

    pub fn oligarchy(s: Coalition, arity: u32) -> Result<Self> {
        let s = Coalition::new(s.mask(), arity)?;
        Self::from_fn(arity, |x| x & s.mask() == s.mask())
    }

    pub fn linear(s: Coalition, arity: u32) -> Result<Self> {
        let s = Coalition::new(s.mask(), arity)?;
        Self::from_fn(arity, |x| (x & s.mask()).count_ones() % 2 == 1)
    }

    pub fn majority(support: Coalition, arity: u32) -> Result<Self> {
        let s = Coalition::new(support.mask(), arity)?;
        if s.len() % 2 == 0 {
            return Err(Error::EvenMajority(s.len()));
        }
        let half = s.len() / 2;
        Self::from_fn(arity, |x| (x & s.mask()).count_ones() > half)
    }

    pub fn family(kind: Family, arity: u32) -> Result<Self> {
        match kind {
            Family::Oligarchy(s) => Self::oligarchy(s, arity),
            Family::Linear(s) => Self::linear(s, arity),
            Family::Dictator(i) => Self::dictator(i, arity),
            Family::Constant(v) => Self::constant(arity, v),
            Family::Majority(s) => {
                Self::check_arity(arity)?;
                Self::majority(s.unwrap_or(Coalition::full(arity)), arity)
            }
        }
    }

    pub fn arity(&self) -> u32 {
        self.arity
    }

    /// Number of inputs, `2^n`.
    pub fn size(&self) -> u64 {
        1u64 << self.arity
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Low word of the table; the whole table when `arity <= 6`.
    pub fn low_bits(&self) -> u64 {
        self.words[0]
    }

    /// Checked evaluation.
    pub fn evaluate(&self, x: u64) -> Result<bool> {
        if x >= self.size() {
            return Err(Error::InputOutOfRange { input: x, arity: self.arity });
        }
        Ok(self.get(x as u32))
    }

    /// Unchecked in release builds; `x` must be below `2^arity`.
    #[inline]
    pub fn get(&self, x: u32) -> bool {
        debug_assert!((x as u64) < self.size());
        self.words[(x >> 6) as usize] >> (x & 63) & 1 == 1
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn is_constant(&self) -> Option<bool> {
        match self.count_ones() {
            0 => Some(false),
            c if c == self.size() => Some(true),
            _ => None,
        }
    }

    pub fn negate(&self) -> BoolFn {
        let mut words: Vec<u64> = self.words.iter().map(|w| !w).collect();
        words[0] &= Self::tail_mask(self.arity);
        BoolFn { arity: self.arity, words }
    }

    /// Flips the output at one input.
    pub fn with_flipped(&self, x: u32) -> BoolFn {
        let mut out = self.clone();
        out.words[(x >> 6) as usize] ^= 1 << (x & 63);
        out
    }

    fn same_arity(&self, other: &BoolFn) -> Result<()> {
        if self.arity != other.arity {
            return Err(Error::ArityMismatch { left: self.arity, right: other.arity });
        }
        Ok(())
    }

    fn check_voter(&self, voter: u32) -> Result<u32> {
        if voter == 0 || voter > self.arity {
            return Err(Error::VoterOutOfRange { voter, arity: self.arity });
        }
        Ok(voter - 1)
    }

    /// Number of inputs where `self` and `other` differ.
    pub fn disagreements(&self, other: &BoolFn) -> Result<u64> {
        self.same_arity(other)?;
        Ok(self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as u64)
            .sum())
    }

    /// `d(f, g) = Pr[f(x) != g(x)]` under the uniform distribution.
    pub fn distance(&self, other: &BoolFn) -> Result<Rational> {
        Ok(Rational::dyadic(self.disagreements(other)?, self.arity))
    }

    /// Disagreement counts grouped by the Hamming weight of the input.
    fn disagreements_by_weight(&self, other: &BoolFn) -> Result<Vec<u64>> {
        self.same_arity(other)?;
        let mut by_weight = vec![0u64; self.arity as usize + 1];
        for x in 0..(1u32 << self.arity) {
            if self.get(x) != other.get(x) {
                by_weight[x.count_ones() as usize] += 1;
            }
        }
        Ok(by_weight)
    }

    /// Distance when every bit is an independent Bernoulli(`p`).
    pub fn distance_biased(&self, other: &BoolFn, p: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!("bias {p} outside [0,1]")));
        }
        let n = self.arity as i32;
        Ok(self
            .disagreements_by_weight(other)?
            .iter()
            .enumerate()
            .map(|(w, &c)| c as f64 * p.powi(w as i32) * (1.0 - p).powi(n - w as i32))
            .sum())
    }

    /// Exact biased distance for a rational bias.
    pub fn distance_biased_exact(&self, other: &BoolFn, p: &Rational) -> Result<Rational> {
        if *p < Rational::zero() || *p > Rational::one() {
            return Err(Error::InvalidParameter(format!("bias {p} outside [0,1]")));
        }
        let q = &Rational::one() - p;
        let n = self.arity as i32;
        Ok(self
            .disagreements_by_weight(other)?
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(w, &c)| {
                Rational::ratio(c, 1) * p.pow(w as i32) * q.pow(n - w as i32)
            })
            .sum())
    }

    /// Inputs with bit `b` clear where flipping bit `b` changes the output.
    fn pivotal_pairs(&self, b: u32) -> u64 {
        if b < 6 {
            let mask = LOW_HALF[b as usize] & Self::tail_mask(self.arity);
            self.words
                .iter()
                .map(|w| ((w ^ (w >> (1u32 << b))) & mask).count_ones() as u64)
                .sum()
        } else {
            let stride = 1usize << (b - 6);
            (0..self.words.len())
                .filter(|k| k & stride == 0)
                .map(|k| (self.words[k] ^ self.words[k + stride]).count_ones() as u64)
                .sum()
        }
    }

    /// Ones among inputs with bit `b` clear.
    fn ones_with_bit_clear(&self, b: u32) -> u64 {
        if b < 6 {
            let mask = LOW_HALF[b as usize] & Self::tail_mask(self.arity);
            self.words.iter().map(|w| (w & mask).count_ones() as u64).sum()
        } else {
            let stride = 1usize << (b - 6);
            (0..self.words.len())
                .filter(|k| k & stride == 0)
                .map(|k| self.words[k].count_ones() as u64)
                .sum()
        }
    }

    /// Banzhaf influence `Pr[f(x) != f(x ^ e_i)]`.
    pub fn influence(&self, voter: u32) -> Result<Rational> {
        let b = self.check_voter(voter)?;
        Ok(Rational::dyadic(self.pivotal_pairs(b), self.arity - 1))
    }

    /// Influences of all voters, in voter order.
    pub fn influences(&self) -> Vec<Rational> {
        (0..self.arity)
            .map(|b| Rational::dyadic(self.pivotal_pairs(b), self.arity - 1))
            .collect()
    }

    pub fn total_influence(&self) -> Rational {
        let pairs: u64 = (0..self.arity).map(|b| self.pivotal_pairs(b)).sum();
        Rational::dyadic(pairs, self.arity - 1)
    }

    /// Zero-ignorability `Pr[f(x) = 1 | x_i = 0]`.
    pub fn ignorability(&self, voter: u32) -> Result<Rational> {
        let b = self.check_voter(voter)?;
        Ok(Rational::dyadic(self.ones_with_bit_clear(b), self.arity - 1))
    }

    pub fn expectation(&self) -> Rational {
        Rational::dyadic(self.count_ones(), self.arity)
    }

    /// `f(0..0) = 0` and `f(1..1) = 1`.
    pub fn is_pareto(&self) -> bool {
        !self.get(0) && self.get((self.size() - 1) as u32)
    }

    /// Majority of `f` over the completions of the junta bits, ties to 1.
    pub fn junta_projection(&self, junta: Coalition) -> Result<BoolFn> {
        let junta = Coalition::new(junta.mask(), self.arity)?;
        let free = self.arity - junta.len();
        let mut ones = vec![0u64; 1 << junta.len()];
        for x in 0..(1u32 << self.arity) {
            if self.get(x) {
                ones[junta.extract(x) as usize] += 1;
            }
        }
        let completions = 1u64 << free;
        BoolFn::from_fn(self.arity, |x| 2 * ones[junta.extract(x) as usize] >= completions)
    }

    /// True if no voter outside `junta` has positive influence.
    pub fn depends_only_on(&self, junta: Coalition) -> bool {
        (0..self.arity).all(|b| junta.mask() >> b & 1 == 1 || self.pivotal_pairs(b) == 0)
    }

    /// Voters with positive influence.
    pub fn relevant_voters(&self) -> Coalition {
        Coalition(
            (0..self.arity)
                .filter(|&b| self.pivotal_pairs(b) > 0)
                .fold(0, |m, b| m | 1 << b),
        )
    }

    /// Exhaustive comparison against every oligarchy and every parity.
    pub fn classify(&self) -> FamilyTags {
        let n = self.arity;
        let mut tags = FamilyTags { constant: self.is_constant(), ..Default::default() };
        for mask in 0..(1u32 << n) {
            let s = Coalition(mask);
            if tags.oligarchy.is_none()
                && BoolFn::oligarchy(s, n).map(|g| &g == self).unwrap_or(false)
            {
                tags.oligarchy = Some(s);
            }
            if tags.linear.is_none() && BoolFn::linear(s, n).map(|g| &g == self).unwrap_or(false) {
                tags.linear = Some(s);
            }
        }
        tags.dictator = tags.oligarchy.filter(|s| s.len() == 1).and_then(|s| s.voters().next());
        tags
    }

    /// Hex digits of the table, most significant nibble first.
    pub fn table_hex(&self) -> String {
        let nibbles = ((self.size() as usize) / 4).max(1);
        let mut out = String::with_capacity(nibbles);
        for k in (0..nibbles).rev() {
            let word = self.words[k / 16];
            let nib = (word >> ((k % 16) * 4)) & 0xf;
            out.push(char::from_digit(nib as u32, 16).unwrap());
        }
        out
    }

    pub fn from_table_hex(arity: u32, hex: &str) -> Result<Self> {
        Self::check_arity(arity)?;
        let nibbles = ((1usize << arity) / 4).max(1);
        if hex.len() != nibbles {
            return Err(Error::Parse(format!(
                "table for arity {arity} needs {nibbles} hex digits, got {}",
                hex.len()
            )));
        }
        let mut words = vec![0u64; Self::word_count(arity)];
        for (pos, ch) in hex.chars().enumerate() {
            let nib = ch
                .to_digit(16)
                .ok_or_else(|| Error::Parse(format!("bad hex digit {ch:?}")))? as u64;
            let k = nibbles - 1 - pos;
            words[k / 16] |= nib << ((k % 16) * 4);
        }
        if words[0] & !Self::tail_mask(arity) != 0 {
            return Err(Error::Parse(format!("table too long for arity {arity}")));
        }
        Ok(BoolFn { arity, words })
    }
}

impl fmt::Display for BoolFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={}:{}", self.arity, self.table_hex())
    }
}

impl fmt::Debug for BoolFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for BoolFn {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let rest = s
            .trim()
            .strip_prefix("n=")
            .ok_or_else(|| Error::Parse(format!("truth table {s:?} must start with n=")))?;
        let (n, hex) = rest
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("truth table {s:?} missing ':'")))?;
        let n: u32 = n.parse().map_err(|_| Error::Parse(format!("bad arity in {s:?}")))?;
        BoolFn::from_table_hex(n, hex)
    }
}

/// All `2^(2^n)` functions of arity `n <= 5`, in table order.
pub fn all_functions(arity: u32) -> Result<impl Iterator<Item = BoolFn>> {
    if arity == 0 || arity > 5 {
        return Err(Error::InvalidParameter(format!(
            "exhaustive function enumeration needs 1 <= n <= 5, got {arity}"
        )));
    }
    let count = 1u64 << (1u32 << arity);
    Ok((0..count).map(move |bits| BoolFn { arity, words: vec![bits] }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn maj3() -> BoolFn {
        BoolFn::majority(Coalition::full(3), 3).unwrap()
    }

    fn r(n: u64, d: u64) -> Rational {
        Rational::ratio(n, d)
    }

    #[test]
    fn evaluate_examples() {
        let olig = BoolFn::oligarchy(Coalition::from_voters(&[1, 2]), 2).unwrap();
        assert!(olig.evaluate(0b11).unwrap());
        assert!(!olig.evaluate(0b01).unwrap());
        let lin = BoolFn::linear(Coalition::from_voters(&[1, 2]), 2).unwrap();
        assert!(!lin.evaluate(0b11).unwrap());
        assert!(olig.evaluate(4).is_err());
    }

    #[test]
    fn distance_examples() {
        let f = maj3();
        assert_eq!(f.distance(&f).unwrap(), Rational::zero());
        let c0 = BoolFn::constant(3, false).unwrap();
        let c1 = BoolFn::constant(3, true).unwrap();
        assert_eq!(c0.distance(&c1).unwrap(), Rational::one());
        let d1 = BoolFn::dictator(1, 3).unwrap();
        assert_eq!(f.distance(&d1).unwrap(), r(1, 4));
        assert!(f.distance(&BoolFn::constant(2, false).unwrap()).is_err());
    }

    #[test]
    fn biased_distance_examples() {
        let f = maj3();
        let d1 = BoolFn::dictator(1, 3).unwrap();
        let u = f.distance_biased(&d1, 0.5).unwrap();
        assert!((u - 0.25).abs() < 1e-15);
        let z = BoolFn::constant(3, false).unwrap();
        assert!((d1.distance_biased(&z, 0.3).unwrap() - 0.3).abs() < 1e-15);
        let and2 = BoolFn::oligarchy(Coalition::full(2), 2).unwrap();
        let z2 = BoolFn::constant(2, false).unwrap();
        assert_eq!(and2.distance_biased_exact(&z2, &r(1, 4)).unwrap(), r(1, 16));
        assert!((and2.distance_biased(&z2, 0.25).unwrap() - 1.0 / 16.0).abs() < 1e-15);
        assert!(and2.distance_biased(&z2, 1.5).is_err());
    }

    #[test]
    fn influence_examples() {
        let d1 = BoolFn::dictator(1, 3).unwrap();
        assert_eq!(d1.influence(1).unwrap(), Rational::one());
        assert_eq!(d1.influence(2).unwrap(), Rational::zero());
        assert_eq!(maj3().influence(1).unwrap(), r(1, 2));
        assert!(d1.influence(4).is_err());
        assert!(d1.influence(0).is_err());
    }

    #[test]
    fn ignorability_examples() {
        let olig = BoolFn::oligarchy(Coalition::from_voters(&[1, 2]), 2).unwrap();
        assert_eq!(olig.ignorability(1).unwrap(), Rational::zero());
        let c1 = BoolFn::constant(2, true).unwrap();
        assert_eq!(c1.ignorability(1).unwrap(), Rational::one());
        let or2 = BoolFn::from_fn(2, |x| x != 0).unwrap();
        assert_eq!(or2.ignorability(1).unwrap(), r(1, 2));
        assert_eq!(maj3().ignorability(1).unwrap(), r(1, 4));
    }

    #[test]
    fn wide_tables_use_word_strides() {
        // voter 8 of an 8-voter dictator lives in the word-stride path
        let d8 = BoolFn::dictator(8, 8).unwrap();
        assert_eq!(d8.influence(8).unwrap(), Rational::one());
        assert_eq!(d8.influence(1).unwrap(), Rational::zero());
        assert_eq!(d8.ignorability(8).unwrap(), Rational::zero());
        assert_eq!(d8.ignorability(3).unwrap(), r(1, 2));
        let m = BoolFn::majority(Coalition::full(7), 7).unwrap();
        // C(6,3) / 2^6 = 20/64
        assert_eq!(m.influence(7).unwrap(), r(20, 64));
    }

    #[test]
    fn junta_examples() {
        let f = maj3();
        assert_eq!(f.junta_projection(Coalition::full(3)).unwrap(), f);
        assert_eq!(
            f.junta_projection(Coalition::from_voters(&[1])).unwrap(),
            BoolFn::dictator(1, 3).unwrap()
        );
        let c1 = BoolFn::constant(3, true).unwrap();
        assert_eq!(c1.junta_projection(Coalition::EMPTY).unwrap(), c1);
        // tie: x1 xor x2 projected on {1} has exactly half ones at each x1
        let x = BoolFn::linear(Coalition::full(2), 2).unwrap();
        assert_eq!(
            x.junta_projection(Coalition::from_voters(&[1])).unwrap(),
            BoolFn::constant(2, true).unwrap()
        );
    }

    #[test]
    fn family_examples() {
        let c1 = BoolFn::constant(3, true).unwrap();
        assert_eq!(BoolFn::oligarchy(Coalition::EMPTY, 3).unwrap(), c1);
        // parity over nobody is the +1-valued character, i.e. logical 0
        assert_eq!(
            BoolFn::linear(Coalition::EMPTY, 3).unwrap(),
            BoolFn::constant(3, false).unwrap()
        );
        let tags = BoolFn::dictator(1, 3).unwrap().classify();
        assert_eq!(tags.oligarchy, Some(Coalition::from_voters(&[1])));
        assert_eq!(tags.linear, Some(Coalition::from_voters(&[1])));
        assert_eq!(tags.dictator, Some(1));
        assert!(BoolFn::majority(Coalition::full(2), 2).is_err());
        assert!(BoolFn::family(Family::Majority(None), 4).is_err());
        assert_eq!(BoolFn::family(Family::Majority(None), 3).unwrap(), maj3());
        assert!(maj3().classify().oligarchy.is_none());
    }

    #[test]
    fn pareto_and_expectation() {
        assert!(maj3().is_pareto());
        assert!(!BoolFn::constant(3, true).unwrap().is_pareto());
        let and2 = BoolFn::oligarchy(Coalition::full(2), 2).unwrap();
        assert_eq!(and2.expectation(), r(1, 4));
    }

    #[test]
    fn hex_format() {
        assert_eq!(maj3().to_string(), "n=3:e8");
        assert_eq!(BoolFn::dictator(1, 1).unwrap().to_string(), "n=1:2");
        let big = BoolFn::dictator(7, 7).unwrap();
        let s = big.to_string();
        assert_eq!(s, format!("n=7:{}{}", "f".repeat(16), "0".repeat(16)));
        assert_eq!(s.parse::<BoolFn>().unwrap(), big);
        assert!("n=2:1f".parse::<BoolFn>().is_err());
        assert!("n=1:4".parse::<BoolFn>().is_err());
        assert!("3:e8".parse::<BoolFn>().is_err());
    }

    #[test]
    fn coalition_bounds() {
        assert!(Coalition::new(0b100, 2).is_err());
        assert!(BoolFn::oligarchy(Coalition::from_voters(&[3]), 2).is_err());
        assert_eq!(Coalition::from_voters(&[1, 3]).extract(0b101), 0b11);
        assert_eq!(Coalition::from_voters(&[2, 3]).to_string(), "{2,3}");
        assert!(BoolFn::constant(25, true).is_err());
        assert!(BoolFn::constant(0, true).is_err());
    }
}
