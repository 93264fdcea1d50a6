//! Binary words and eventually periodic sequences in `{0,1}^N`.
//!
//! Sequences are syntactic: two sequences are equal exactly when they agree
//! digit by digit. No identification such as `10^inf == 01^inf` is applied
//! here; coincidences of values under a coding map belong to [`crate::ifs`].

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::Rational;

/// A finite word over `{0,1}`. The empty word is `ε`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if let Some(b) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::InvalidInput(format!("digit {b} is not binary")));
        }
        Ok(Word(bits))
    }

    /// `d^n`.
    pub fn repeat(digit: u8, n: usize) -> Self {
        debug_assert!(digit <= 1);
        Word(vec![digit; n])
    }

    /// The word of length `len` spelling `value` in binary, most significant first.
    pub fn from_int(value: u64, len: usize) -> Self {
        debug_assert!(len >= 64 || value < (1u64 << len));
        Word(
            (0..len)
                .map(|i| ((value >> (len - 1 - i)) & 1) as u8)
                .collect(),
        )
    }

    /// Binary value of the word, most significant digit first.
    pub fn to_int(&self) -> u64 {
        assert!(self.0.len() < 64, "word too long for an integer index");
        self.0.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64)
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, digit: u8) {
        debug_assert!(digit <= 1);
        self.0.push(digit);
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn with(&self, digit: u8) -> Word {
        let mut w = self.clone();
        w.push(digit);
        w
    }

    pub fn prefix(&self, n: usize) -> Word {
        Word(self.0[..n.min(self.0.len())].to_vec())
    }

    /// `w v^inf`.
    pub fn then_periodic(&self, period: &Word) -> EpSequence {
        EpSequence::new(self.clone(), period.clone()).expect("caller supplies a nonempty period")
    }

    /// `w 0^inf`.
    pub fn then_zeros(&self) -> EpSequence {
        self.then_periodic(&Word::repeat(0, 1))
    }

    /// `w 1^inf`.
    pub fn then_ones(&self) -> EpSequence {
        self.then_periodic(&Word::repeat(1, 1))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "e" || s == "ε" {
            return Ok(Word::empty());
        }
        s.chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::Parse {
                    input: s.to_string(),
                    reason: format!("unexpected character `{c}` in a binary word"),
                }),
            })
            .collect::<Result<Vec<u8>>>()
            .map(Word)
    }
}

/// Position of `ω` in the length-then-lexicographic enumeration of `{0,1}^*`,
/// counting from 1 at the empty word: `N(ω) = 2^q + Σ ω_n 2^(q-n)`.
pub fn n_index(word: &Word) -> u64 {
    (1u64 << word.len()) + word.to_int()
}

/// Inverse of [`n_index`].
pub fn word_at_index(n: u64) -> Word {
    assert!(n >= 1, "enumeration starts at 1");
    let q = 63 - n.leading_zeros() as usize;
    Word::from_int(n - (1u64 << q), q)
}

/// An eventually periodic binary sequence `preperiod · period^inf`.
///
/// Periods are not forced to be minimal; every operation is invariant
/// under unrolling the period. Equality, ordering and hashing are those of
/// the represented infinite sequence.
#[derive(Clone, Debug)]
pub struct EpSequence {
    preperiod: Word,
    period: Word,
}

impl EpSequence {
    pub fn new(preperiod: Word, period: Word) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::InvalidInput("period must be nonempty".into()));
        }
        Ok(EpSequence { preperiod, period })
    }

    pub fn zeros() -> Self {
        Word::empty().then_zeros()
    }

    pub fn ones() -> Self {
        Word::empty().then_ones()
    }

    pub fn preperiod(&self) -> &Word {
        &self.preperiod
    }

    pub fn period(&self) -> &Word {
        &self.period
    }

    /// The `n`-th digit, 1-based.
    pub fn digit(&self, n: usize) -> u8 {
        assert!(n >= 1, "digits are indexed from 1");
        let i = n - 1;
        let u = self.preperiod.len();
        if i < u {
            self.preperiod.0[i]
        } else {
            self.period.0[(i - u) % self.period.len()]
        }
    }

    /// First `n` digits.
    pub fn prefix(&self, n: usize) -> Word {
        Word((1..=n).map(|k| self.digit(k)).collect())
    }

    pub fn digits(&self) -> impl Iterator<Item = u8> + '_ {
        (1..).map(move |n| self.digit(n))
    }

    /// `w · self`.
    pub fn prepend(&self, w: &Word) -> EpSequence {
        EpSequence {
            preperiod: w.concat(&self.preperiod),
            period: self.period.clone(),
        }
    }

    /// Shortest preperiod and primitive period describing the same sequence.
    pub fn normalized(&self) -> EpSequence {
        let p = self.period.0.as_slice();
        let mut per_len = p.len();
        for d in 1..=p.len() {
            if p.len().is_multiple_of(d) && (d..p.len()).all(|i| p[i] == p[i - d]) {
                per_len = d;
                break;
            }
        }
        let mut pre = self.preperiod.0.clone();
        let mut per: Vec<u8> = p[..per_len].to_vec();
        // Roll the period backwards while the last preperiod digit matches.
        while let Some(&last) = pre.last() {
            if last == per[per_len - 1] {
                pre.pop();
                per.rotate_right(1);
            } else {
                break;
            }
        }
        EpSequence {
            preperiod: Word(pre),
            period: Word(per),
        }
    }

    /// `true` if the sequence ends in `1^inf`.
    pub fn ends_in_ones(&self) -> bool {
        self.period.0.iter().all(|&b| b == 1)
    }

    /// `true` if the sequence ends in `0^inf`.
    pub fn ends_in_zeros(&self) -> bool {
        self.period.0.iter().all(|&b| b == 0)
    }

    /// Enough digits to decide any comparison against `other`.
    fn horizon(&self, other: &EpSequence) -> usize {
        self.preperiod.len().max(other.preperiod.len()) + self.period.len().lcm(&other.period.len())
    }

    /// Index of the first digit where the two sequences differ.
    pub fn first_difference(&self, other: &EpSequence) -> Option<usize> {
        (1..=self.horizon(other)).find(|&n| self.digit(n) != other.digit(n))
    }

    /// Value of the sequence as a base-2 expansion, `Σ s_n 2^-n`.
    pub fn binary_value(&self) -> Rational {
        let half = Rational::new(1.into(), 2.into());
        let mut pre = Rational::zero();
        let mut scale = Rational::one();
        for &b in &self.preperiod.0 {
            scale = &scale * &half;
            if b == 1 {
                pre += &scale;
            }
        }
        let mut per = Rational::zero();
        let mut pscale = Rational::one();
        for &b in &self.period.0 {
            pscale = &pscale * &half;
            if b == 1 {
                per += &pscale;
            }
        }
        pre + scale * per / (Rational::one() - pscale)
    }
}

/// Lexicographic order of two eventually periodic sequences.
pub fn lex_compare(a: &EpSequence, b: &EpSequence) -> Ordering {
    match a.first_difference(b) {
        None => Ordering::Equal,
        Some(n) => a.digit(n).cmp(&b.digit(n)),
    }
}

/// The sequence metric `2^-inf{n : a_n != b_n}`, zero on equal sequences.
pub fn rho_distance(a: &EpSequence, b: &EpSequence) -> Rational {
    match a.first_difference(b) {
        None => Rational::zero(),
        Some(n) => Rational::new(1.into(), num_bigint::BigInt::one() << n),
    }
}

/// The first `count` indices `n >= 2` with `s_n = 0`, ascending.
///
/// Index 1 is skipped on purpose: every construction built on these
/// indices needs a digit `1` at position `n_k` to stay below `01^inf`.
pub fn zero_indices(s: &EpSequence, count: usize) -> Result<Vec<usize>> {
    if s.ends_in_ones() {
        // Only finitely many zeros, all inside the preperiod.
        let found: Vec<usize> = (2..=s.preperiod().len())
            .filter(|&n| s.digit(n) == 0)
            .take(count)
            .collect();
        return if found.len() == count {
            Ok(found)
        } else {
            Err(Error::PeriodAllOnes)
        };
    }
    Ok((2..).filter(|&n| s.digit(n) == 0).take(count).collect())
}

/// The `k`-th zero index (1-based), see [`zero_indices`].
pub fn kth_zero_index(s: &EpSequence, k: usize) -> Result<usize> {
    assert!(k >= 1, "pieces are indexed from 1");
    Ok(zero_indices(s, k)?[k - 1])
}

/// Whether `0^k` occurs among the first `horizon` digits.
pub fn has_zero_run(s: &EpSequence, k: usize, horizon: usize) -> bool {
    assert!(k >= 1 && horizon >= k, "need 1 <= k <= horizon");
    let mut run = 0;
    for n in 1..=horizon {
        if s.digit(n) == 0 {
            run += 1;
            if run >= k {
                return true;
            }
        } else {
            run = 0;
        }
    }
    false
}

impl PartialEq for EpSequence {
    fn eq(&self, other: &Self) -> bool {
        self.first_difference(other).is_none()
    }
}

impl Eq for EpSequence {}

impl PartialOrd for EpSequence {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for EpSequence {
    fn cmp(&self, other: &Self) -> Ordering {
        lex_compare(self, other)
    }
}

impl Hash for EpSequence {
    fn hash<H: Hasher>(&self, state: &mut H) {
        let n = self.normalized();
        n.preperiod.hash(state);
        n.period.hash(state);
    }
}

impl fmt::Display for EpSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.preperiod, self.period)
    }
}

/// Parses `PRE(PER)`, e.g. `01(0)`, `(01)`, `0(1)`. A trailing `^inf` is
/// also accepted: `010^inf` repeats the last digit, `0(01)^inf` the group.
impl FromStr for EpSequence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let raw = s;
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let err = |reason: &str| Error::Parse {
            input: raw.to_string(),
            reason: reason.to_string(),
        };
        let body = s
            .strip_suffix("^inf")
            .or_else(|| s.strip_suffix("^∞"))
            .map(str::to_string);
        let (pre, per) = match body {
            Some(b) if b.ends_with(')') => {
                let open = b.rfind('(').ok_or_else(|| err("unbalanced parentheses"))?;
                (b[..open].to_string(), b[open + 1..b.len() - 1].to_string())
            }
            Some(b) => {
                if b.is_empty() {
                    return Err(err("nothing to repeat before ^inf"));
                }
                let (p, q) = b.split_at(b.len() - 1);
                (p.to_string(), q.to_string())
            }
            None => {
                let open = s.find('(').ok_or_else(|| err("expected PRE(PER)"))?;
                if !s.ends_with(')') || s[open + 1..].contains('(') {
                    return Err(err("expected PRE(PER)"));
                }
                (s[..open].to_string(), s[open + 1..s.len() - 1].to_string())
            }
        };
        let pre: Word = if pre.is_empty() {
            Word::empty()
        } else {
            pre.parse()?
        };
        let per: Word = per.parse()?;
        EpSequence::new(pre, per).map_err(|_| err("period must be nonempty"))
    }
}

impl Serialize for EpSequence {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for EpSequence {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A lexicographic interval `[low, high]` of sequences.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SequenceInterval {
    low: EpSequence,
    high: EpSequence,
}

impl SequenceInterval {
    pub fn new(low: EpSequence, high: EpSequence) -> Result<Self> {
        if low > high {
            return Err(Error::InvalidInput(format!("{low} is above {high}")));
        }
        Ok(SequenceInterval { low, high })
    }

    pub fn low(&self) -> &EpSequence {
        &self.low
    }

    pub fn high(&self) -> &EpSequence {
        &self.high
    }

    pub fn contains(&self, s: &EpSequence) -> bool {
        &self.low <= s && s <= &self.high
    }
}
