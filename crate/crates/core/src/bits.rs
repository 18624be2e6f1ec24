//! Finite binary strings.

use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// A finite bit string. The empty string plays the role of λ.
///
/// Ordering is lexicographic with a proper prefix sorting first, which is
/// also the order [`BitString::all_of_len`] enumerates in.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BitString {
    bits: Vec<bool>,
}

impl BitString {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_bits(bits: impl IntoIterator<Item = bool>) -> Self {
        Self {
            bits: bits.into_iter().collect(),
        }
    }

    /// The `len`-bit big-endian rendering of `value` (first bit is most significant).
    pub fn from_index(value: u64, len: usize) -> Self {
        debug_assert!(len <= 64);
        Self::from_bits((0..len).map(|i| (value >> (len - 1 - i)) & 1 == 1))
    }

    /// Inverse of [`BitString::from_index`].
    pub fn to_index(&self) -> u64 {
        self.bits.iter().fold(0, |acc, &b| (acc << 1) | b as u64)
    }

    pub fn repeat(bit: bool, len: usize) -> Self {
        Self {
            bits: vec![bit; len],
        }
    }

    /// All strings of length `len` in lexicographic order.
    pub fn all_of_len(len: usize) -> impl Iterator<Item = BitString> {
        assert!(len < 64, "enumeration length {len} too large");
        (0..1u64 << len).map(move |v| BitString::from_index(v, len))
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn push(&mut self, bit: bool) {
        self.bits.push(bit);
    }

    pub fn pushed(&self, bit: bool) -> Self {
        let mut s = self.clone();
        s.push(bit);
        s
    }

    /// `self ⊗ other`.
    pub fn concat(&self, other: &BitString) -> Self {
        let mut bits = Vec::with_capacity(self.len() + other.len());
        bits.extend_from_slice(&self.bits);
        bits.extend_from_slice(&other.bits);
        Self { bits }
    }

    pub fn complement(&self) -> Self {
        Self::from_bits(self.bits.iter().map(|b| !b))
    }

    pub fn is_prefix_of(&self, other: &BitString) -> bool {
        other.bits.starts_with(&self.bits)
    }

    pub fn slice(&self, range: std::ops::Range<usize>) -> Self {
        Self::from_bits(self.bits[range].iter().copied())
    }

    pub fn last(&self) -> Option<bool> {
        self.bits.last().copied()
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .enumerate()
            .map(|(i, c)| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse {
                    line: 0,
                    column: i + 1,
                    message: format!("'{other}' is not a bit in \"{s}\""),
                }),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(|bits| Self { bits })
    }
}

impl From<&[bool]> for BitString {
    fn from(bits: &[bool]) -> Self {
        Self::from_bits(bits.iter().copied())
    }
}
