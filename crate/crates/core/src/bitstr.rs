//! Immutable binary strings indexing hard instances.
//!
//! Bits are indexed from 1. The empty string is a prefix of everything and
//! serializes as the empty text. All operations return fresh values so
//! transcripts and posteriors can hold historical strings safely.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::{Error, Result};

/// Maximum supported length.
pub const MAX_LEN: usize = 1 << 16;

/// Finite binary string; the identity of a hidden instance.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BitString {
    bits: Vec<bool>,
}

/// How two strings relate under the prefix order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    /// First is a proper prefix of the second.
    PrefixOfSecond,
    /// Second is a proper prefix of the first.
    PrefixOfFirst,
    Equal,
    /// Neither is a prefix of the other.
    Parallel,
}

impl BitString {
    /// The empty string.
    pub fn empty() -> Self {
        BitString { bits: Vec::new() }
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        debug_assert!(bits.len() <= MAX_LEN);
        BitString { bits: bits.to_vec() }
    }

    /// String of `len` bits taken from the low bits of `value`, bit 1 being
    /// the lowest. Handy for exhaustive enumeration.
    pub fn from_index(value: u64, len: usize) -> Self {
        let bits = (0..len).map(|i| (value >> i) & 1 == 1).collect();
        BitString { bits }
    }

    pub fn random<R: rand::Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let bits = (0..len).map(|_| rng.random::<bool>()).collect();
        BitString { bits }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// The `i`-th bit, 1-indexed.
    pub fn bit(&self, i: usize) -> Result<bool> {
        if i == 0 || i > self.len() {
            return Err(Error::BitIndex { index: i, len: self.len() });
        }
        Ok(self.bits[i - 1])
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Flips the `i`-th bit and deletes all bits following it.
    pub fn flip_cut(&self, i: usize) -> Result<BitString> {
        if i == 0 || i > self.len() {
            return Err(Error::BitIndex { index: i, len: self.len() });
        }
        let mut bits: Vec<bool> = self.bits[..i].to_vec();
        bits[i - 1] = !bits[i - 1];
        Ok(BitString { bits })
    }

    /// The prefix consisting of the first `l` bits.
    pub fn prefix(&self, l: usize) -> Result<BitString> {
        if l > self.len() {
            return Err(Error::PrefixLen { want: l, len: self.len() });
        }
        Ok(BitString { bits: self.bits[..l].to_vec() })
    }

    pub fn append(&self, bit: bool) -> BitString {
        let mut bits = self.bits.clone();
        bits.push(bit);
        BitString { bits }
    }

    pub fn concat(&self, other: &BitString) -> BitString {
        let mut bits = self.bits.clone();
        bits.extend_from_slice(&other.bits);
        BitString { bits }
    }

    pub fn is_prefix_of(&self, other: &BitString) -> bool {
        self.len() <= other.len() && other.bits[..self.len()] == self.bits[..]
    }

    /// Classification under the prefix order.
    pub fn relate(&self, other: &BitString) -> Relation {
        let a = self.is_prefix_of(other);
        let b = other.is_prefix_of(self);
        match (a, b) {
            (true, true) => Relation::Equal,
            (true, false) => Relation::PrefixOfSecond,
            (false, true) => Relation::PrefixOfFirst,
            (false, false) => Relation::Parallel,
        }
    }

    /// 1-based position of the first bit where `self` and `other` differ,
    /// scanning the overlap; `None` when one is a prefix of the other.
    pub fn first_mismatch(&self, other: &BitString) -> Option<usize> {
        self.bits
            .iter()
            .zip(other.bits.iter())
            .position(|(a, b)| a != b)
            .map(|p| p + 1)
    }

    /// All `2^len` strings of the given length, in index order.
    pub fn enumerate(len: usize) -> impl Iterator<Item = BitString> {
        assert!(len < 63, "enumeration is for small lengths");
        (0..1u64 << len).map(move |v| BitString::from_index(v, len))
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

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("\"\"");
        }
        write!(f, "\"{self}\"")
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut bits = Vec::with_capacity(s.len());
        for c in s.chars() {
            match c {
                '0' => bits.push(false),
                '1' => bits.push(true),
                _ => return Err(Error::MalformedQuery("bit strings use only '0' and '1'")),
            }
        }
        if bits.len() > MAX_LEN {
            return Err(Error::MalformedQuery("bit string too long"));
        }
        Ok(BitString { bits })
    }
}

impl From<&str> for BitString {
    fn from(s: &str) -> Self {
        s.parse().expect("literal bit string")
    }
}

pub fn to_text(s: &BitString) -> String {
    use alloc::string::ToString;
    s.to_string()
}
