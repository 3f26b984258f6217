use std::fmt;

use crate::error::{Error, Result};

/// A finite binary string, the index data of a cylinder set.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bits(Vec<bool>);

impl Bits {
    pub fn new(bits: Vec<bool>) -> Self {
        Bits(bits)
    }

    pub fn empty() -> Self {
        Bits(Vec::new())
    }

    /// `count` copies of `bit` followed by its negation, e.g. `ones_then_zero(2) = 110`.
    pub fn run_then_flip(bit: bool, count: usize) -> Self {
        let mut v = vec![bit; count];
        v.push(!bit);
        Bits(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bit(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }

    pub fn is_prefix_of(&self, other: &Bits) -> bool {
        other.0.len() >= self.0.len() && other.0[..self.0.len()] == self.0[..]
    }

    pub fn concat(&self, tail: &Bits) -> Bits {
        let mut v = self.0.clone();
        v.extend_from_slice(&tail.0);
        Bits(v)
    }

    pub fn prefix(&self, len: usize) -> Bits {
        Bits(self.0[..len].to_vec())
    }

    /// Lexicographic successor within fixed length; `None` on all-ones.
    /// Used by the length-lex basis enumeration.
    pub fn parse(s: &str) -> Result<Bits> {
        let mut v = Vec::with_capacity(s.len());
        for c in s.chars() {
            match c {
                '0' => v.push(false),
                '1' => v.push(true),
                _ => return Err(Error::Parse(format!("invalid bit character {c:?}"))),
            }
        }
        Ok(Bits(v))
    }

    /// The `rank`-th string of length `len` in lexicographic order
    /// (rank 0 is all zeros).
    pub fn from_rank(len: usize, rank: u64) -> Bits {
        let mut v = Vec::with_capacity(len);
        for i in (0..len).rev() {
            v.push((rank >> i) & 1 == 1);
        }
        Bits(v)
    }

    /// Lexicographic rank within strings of the same length.
    pub fn rank(&self) -> u64 {
        self.0.iter().fold(0, |acc, &b| (acc << 1) | u64::from(b))
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            write!(f, "{}", if b { '1' } else { '0' })?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prefix_and_rank_roundtrip() {
        let w = Bits::parse("0110").unwrap();
        assert!(Bits::parse("01").unwrap().is_prefix_of(&w));
        assert!(!Bits::parse("011000").unwrap().is_prefix_of(&w));
        assert_eq!(Bits::from_rank(4, w.rank()), w);
        assert_eq!(w.to_string(), "0110");
    }

    #[test]
    fn run_then_flip_builds_branch_prefixes() {
        assert_eq!(Bits::run_then_flip(true, 2).to_string(), "110");
        assert_eq!(Bits::run_then_flip(false, 0).to_string(), "1");
    }
}
