//! Arbitrary-width bitmasks.
//!
//! Program supports are masks over n qubits. n stays below 64 for most of
//! the crate, but code-protected programs (n * r bits) and routed grids
//! (up to 144 cells) overflow a single word, so masks are little-endian
//! `u64` word vectors with trailing zero words trimmed. The trimmed form
//! is canonical: equality, hashing and ordering are plain derived/word
//! comparisons.

use crate::error::{Error, Result};
use std::cmp::Ordering;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Mask {
    /// Little-endian words, no trailing zeros. Empty means the zero mask.
    words: Vec<u64>,
}

impl Mask {
    pub fn zero() -> Self {
        Mask { words: Vec::new() }
    }

    pub fn from_u64(w: u64) -> Self {
        if w == 0 {
            Mask::zero()
        } else {
            Mask { words: vec![w] }
        }
    }

    pub fn single(bit: usize) -> Self {
        let mut m = Mask::zero();
        m.set(bit);
        m
    }

    pub fn pair(a: usize, b: usize) -> Self {
        assert_ne!(a, b, "pair of equal bits");
        let mut m = Mask::zero();
        m.set(a);
        m.set(b);
        m
    }

    pub fn from_bits<I: IntoIterator<Item = usize>>(bits: I) -> Self {
        let mut m = Mask::zero();
        for b in bits {
            m.set(b);
        }
        m
    }

    pub fn set(&mut self, bit: usize) {
        let w = bit / 64;
        if w >= self.words.len() {
            self.words.resize(w + 1, 0);
        }
        self.words[w] |= 1u64 << (bit % 64);
    }

    pub fn bit(&self, bit: usize) -> bool {
        let w = bit / 64;
        w < self.words.len() && self.words[w] >> (bit % 64) & 1 == 1
    }

    pub fn is_zero(&self) -> bool {
        self.words.is_empty()
    }

    pub fn weight(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    /// Index of the highest set bit, if any.
    pub fn highest_bit(&self) -> Option<usize> {
        let w = self.words.last()?;
        Some((self.words.len() - 1) * 64 + (63 - w.leading_zeros() as usize))
    }

    /// Set bit indices, ascending.
    pub fn bits(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    None
                } else {
                    let b = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    Some(i * 64 + b)
                }
            })
        })
    }

    /// True when every set bit of `self` is set in `x` (an n <= 64 word).
    #[inline]
    pub fn subset_of_u64(&self, x: u64) -> bool {
        match self.words.len() {
            0 => true,
            1 => self.words[0] & x == self.words[0],
            _ => false,
        }
    }

    pub fn subset_of(&self, other: &Mask) -> bool {
        if self.words.len() > other.words.len() {
            return false;
        }
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & b == *a)
    }

    pub fn xor(&self, other: &Mask) -> Mask {
        let n = self.words.len().max(other.words.len());
        let mut words: Vec<u64> = (0..n)
            .map(|i| {
                self.words.get(i).copied().unwrap_or(0) ^ other.words.get(i).copied().unwrap_or(0)
            })
            .collect();
        while words.last() == Some(&0) {
            words.pop();
        }
        Mask { words }
    }

    /// The single word of a mask known to fit in 64 bits.
    pub fn as_u64(&self) -> Option<u64> {
        match self.words.len() {
            0 => Some(0),
            1 => Some(self.words[0]),
            _ => None,
        }
    }

    /// Lowercase hex, no leading zeros ("0" for the zero mask).
    pub fn to_hex(&self) -> String {
        match self.words.len() {
            0 => "0".to_string(),
            _ => {
                let mut s = format!("{:x}", self.words.last().unwrap());
                for w in self.words.iter().rev().skip(1) {
                    s.push_str(&format!("{w:016x}"));
                }
                s
            }
        }
    }

    pub fn from_hex(s: &str) -> Result<Self> {
        if s.is_empty() || !s.bytes().all(|b| b.is_ascii_hexdigit()) {
            return Err(Error::Parse(format!("bad hex mask {s:?}")));
        }
        let digits: Vec<u8> = s.bytes().rev().map(hex_val).collect();
        let mut words = vec![0u64; digits.len().div_ceil(16)];
        for (i, d) in digits.iter().enumerate() {
            words[i / 16] |= (*d as u64) << (4 * (i % 16));
        }
        while words.last() == Some(&0) {
            words.pop();
        }
        Ok(Mask { words })
    }
}

fn hex_val(b: u8) -> u8 {
    match b {
        b'0'..=b'9' => b - b'0',
        b'a'..=b'f' => b - b'a' + 10,
        b'A'..=b'F' => b - b'A' + 10,
        _ => unreachable!(),
    }
}

/// n-character binary string for x, most significant bit first: the
/// leftmost character is qubit n-1.
pub fn bitstring(x: u64, n: usize) -> String {
    debug_assert!(n >= 1 && n <= 64);
    (0..n)
        .rev()
        .map(|b| if x >> b & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Parse a binary string written most significant bit first; returns the
/// value and its bit width.
pub fn parse_bitstring(s: &str) -> Result<(u64, usize)> {
    if s.is_empty() || s.len() > 64 {
        return Err(Error::Parse(format!(
            "bitstring {s:?} must have 1 to 64 characters"
        )));
    }
    let mut x = 0u64;
    for c in s.chars() {
        x = x << 1
            | match c {
                '0' => 0,
                '1' => 1,
                _ => return Err(Error::Parse(format!("bad bitstring character {c:?}"))),
            };
    }
    Ok((x, s.len()))
}

impl Ord for Mask {
    fn cmp(&self, other: &Self) -> Ordering {
        self.words
            .len()
            .cmp(&other.words.len())
            .then_with(|| self.words.iter().rev().cmp(other.words.iter().rev()))
    }
}

impl PartialOrd for Mask {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Mask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}
