use std::fmt;

use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::eventually::EpSeq;
use crate::level::Level;

/// An eventually periodic element of the Cantor space `{0,1}^N`, stored in
/// the canonical form of [`EpSeq`]. Equality of canonical forms is equality
/// of the underlying infinite sequences.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CantorPoint(EpSeq<bool>);

impl CantorPoint {
    pub fn new(preperiod: Bits, period: Bits) -> Self {
        assert!(!period.is_empty(), "period must be nonempty");
        CantorPoint(EpSeq::new(
            preperiod.as_slice().to_vec(),
            period.as_slice().to_vec(),
        ))
    }

    /// The constant sequence `b b b ...`.
    pub fn constant(b: bool) -> Self {
        CantorPoint(EpSeq::constant(b))
    }

    pub fn preperiod(&self) -> Bits {
        Bits::new(self.0.pre().to_vec())
    }

    pub fn period(&self) -> Bits {
        Bits::new(self.0.per().to_vec())
    }

    pub fn bit(&self, i: usize) -> bool {
        *self.0.get(i)
    }

    pub fn starts_with(&self, w: &Bits) -> bool {
        (0..w.len()).all(|i| self.bit(i) == w.bit(i))
    }

    /// Left shift: drops the first `k` bits.
    pub fn shift(&self, k: usize) -> Self {
        CantorPoint(self.0.shifted(k))
    }

    pub fn prepend(&self, w: &Bits) -> Self {
        CantorPoint(self.0.prepended(w.as_slice()))
    }

    /// Index of the first disagreeing bit, `None` iff the points are equal.
    pub fn first_disagreement(&self, other: &Self) -> Option<usize> {
        self.0.first_disagreement(&other.0)
    }

    /// Exact standard Cantor distance `2^-N`, `N = min{n : x_n != y_n}`.
    pub fn distance_level(&self, other: &Self) -> Level {
        match self.first_disagreement(other) {
            Some(n) => Level::Finite(n as u32),
            None => Level::Infinite,
        }
    }

    /// Flips bit `i`, keeping the result eventually periodic.
    pub fn flip_bit(&self, i: usize) -> Self {
        let keep = i + 1;
        let mut pre: Vec<bool> = (0..keep).map(|j| self.bit(j)).collect();
        pre[i] = !pre[i];
        CantorPoint(self.0.shifted(keep).prepended(&pre))
    }

    /// First `len` bits.
    pub fn prefix(&self, len: usize) -> Bits {
        Bits::new((0..len).map(|i| self.bit(i)).collect())
    }
}

impl fmt::Display for CantorPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})*", self.preperiod(), self.period())
    }
}

/// A point of one of the base spaces: a natural number, a Cantor point, or
/// the added point of a one-point compactification.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Point {
    Nat(u64),
    Cantor(CantorPoint),
    Infinity,
}

impl Point {
    pub fn nat(n: u64) -> Self {
        Point::Nat(n)
    }

    pub fn cantor(pre: &str, per: &str) -> Self {
        Point::Cantor(CantorPoint::new(
            Bits::parse(pre).expect("valid bits"),
            Bits::parse(per).expect("valid bits"),
        ))
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, Point::Infinity)
    }

    pub fn as_cantor(&self) -> Option<&CantorPoint> {
        match self {
            Point::Cantor(c) => Some(c),
            _ => None,
        }
    }

    pub fn as_nat(&self) -> Option<u64> {
        match self {
            Point::Nat(n) => Some(*n),
            _ => None,
        }
    }

    /// Word-literal grammar: `<preperiod>(<period>)*`, `Nat:<n>`, `inf`.
    pub fn parse(s: &str) -> Result<Point> {
        let s = s.trim();
        if s == "inf" {
            return Ok(Point::Infinity);
        }
        if let Some(n) = s.strip_prefix("Nat:") {
            let n: u64 = n
                .parse()
                .map_err(|_| Error::Parse(format!("invalid natural number {n:?}")))?;
            return Ok(Point::Nat(n));
        }
        let open = s
            .find('(')
            .ok_or_else(|| Error::Parse(format!("invalid point literal {s:?}")))?;
        let rest = &s[open + 1..];
        let close = rest
            .find(')')
            .ok_or_else(|| Error::Parse(format!("missing ')' in {s:?}")))?;
        if &rest[close + 1..] != "*" {
            return Err(Error::Parse(format!("expected trailing '*' in {s:?}")));
        }
        let pre = Bits::parse(&s[..open])?;
        let per = Bits::parse(&rest[..close])?;
        if per.is_empty() {
            return Err(Error::Parse(format!("empty period in {s:?}")));
        }
        Ok(Point::Cantor(CantorPoint::new(pre, per)))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Nat(n) => write!(f, "Nat:{n}"),
            Point::Cantor(c) => write!(f, "{c}"),
            Point::Infinity => write!(f, "inf"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cp(pre: &str, per: &str) -> CantorPoint {
        CantorPoint::new(Bits::parse(pre).unwrap(), Bits::parse(per).unwrap())
    }

    #[test]
    fn canonical_equality_identifies_presentations() {
        // 01(10)* and 0(11 0... ) -- 01 101010... vs 011(01)* = 011 0101...
        assert_eq!(cp("0", "10"), cp("01", "01"));
        assert_eq!(cp("", "0"), cp("000", "00"));
        assert_ne!(cp("", "01"), cp("", "10"));
    }

    #[test]
    fn distance_is_first_disagreement() {
        assert_eq!(cp("1", "0").distance_level(&cp("0", "0")), Level::Finite(0));
        assert_eq!(cp("01", "1").distance_level(&cp("00", "1")), Level::Finite(1));
        assert_eq!(cp("0", "0").distance_level(&cp("0", "0")), Level::Infinite);
    }

    #[test]
    fn shift_prepend_flip() {
        let x = cp("110", "01");
        assert_eq!(x.shift(3), cp("", "01"));
        assert_eq!(x.shift(4), cp("", "10"));
        assert_eq!(x.shift(3).prepend(&Bits::parse("110").unwrap()), x);
        let y = x.flip_bit(1);
        assert_eq!(y.bit(0), true);
        assert_eq!(y.bit(1), false);
        assert_eq!(y.bit(2), x.bit(2));
        assert_eq!(x.distance_level(&y), Level::Finite(1));
    }

    #[test]
    fn literal_roundtrip() {
        for s in ["01(10)*", "(0)*", "Nat:17", "inf"] {
            let p = Point::parse(s).unwrap();
            assert_eq!(Point::parse(&p.to_string()).unwrap(), p);
        }
        assert!(Point::parse("()*").is_err());
        assert!(Point::parse("01x(1)*").is_err());
    }
}
