use std::collections::BTreeSet;
use std::fmt;

use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::point::Point;

/// A clopen subset of a base space in canonical form.
///
/// * `CylinderUnion` denotes a finite union of cylinders `Z(w_i)` of the
///   Cantor space; in canonical form no `w_i` is a prefix of another and no
///   two entries are siblings (`w0`/`w1` pairs are merged into `w`), so set
///   equality is structural equality. Over a punctured space the union is
///   read intersected with the space.
/// * `FiniteNatSet` is a finite (hence compact open) subset of discrete `N`.
/// * `NatTail` is the upward closed set `{n, n+1, ...}`. Tails are the balls
///   of the metric chosen on `N` and its compactification; they are clopen
///   but not compact, so they never occur as basis elements or `K` sets.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ClopenSet {
    CylinderUnion(Vec<Bits>),
    FiniteNatSet(BTreeSet<u64>),
    NatTail(u64),
}

impl ClopenSet {
    pub fn cylinder(w: Bits) -> Self {
        ClopenSet::CylinderUnion(vec![w])
    }

    pub fn cylinder_union(words: Vec<Bits>) -> Self {
        let mut words = words;
        canonicalize_union(&mut words);
        ClopenSet::CylinderUnion(words)
    }

    pub fn nat_set<I: IntoIterator<Item = u64>>(items: I) -> Self {
        ClopenSet::FiniteNatSet(items.into_iter().collect())
    }

    pub fn empty_cylinders() -> Self {
        ClopenSet::CylinderUnion(Vec::new())
    }

    pub fn empty_nat() -> Self {
        ClopenSet::FiniteNatSet(BTreeSet::new())
    }

    pub fn is_empty(&self) -> bool {
        match self {
            ClopenSet::CylinderUnion(ws) => ws.is_empty(),
            ClopenSet::FiniteNatSet(s) => s.is_empty(),
            ClopenSet::NatTail(_) => false,
        }
    }

    /// Exact membership. The added compactification point lies in no clopen
    /// subset of the base space, so `Infinity` is never a member.
    pub fn contains(&self, x: &Point) -> bool {
        match (self, x) {
            (ClopenSet::CylinderUnion(ws), Point::Cantor(c)) => {
                ws.iter().any(|w| c.starts_with(w))
            }
            (ClopenSet::FiniteNatSet(s), Point::Nat(n)) => s.contains(n),
            (ClopenSet::NatTail(t), Point::Nat(n)) => n >= t,
            _ => false,
        }
    }

    /// Canonical intersection. Intersections of cylinders are cylinders or
    /// empty, so the result stays in canonical form.
    pub fn intersect(&self, other: &ClopenSet) -> Result<ClopenSet> {
        match (self, other) {
            (ClopenSet::CylinderUnion(a), ClopenSet::CylinderUnion(b)) => {
                let mut out = Vec::new();
                for v in a {
                    for w in b {
                        if v.is_prefix_of(w) {
                            out.push(w.clone());
                        } else if w.is_prefix_of(v) {
                            out.push(v.clone());
                        }
                    }
                }
                Ok(ClopenSet::cylinder_union(out))
            }
            (ClopenSet::FiniteNatSet(a), ClopenSet::FiniteNatSet(b)) => {
                Ok(ClopenSet::FiniteNatSet(a.intersection(b).copied().collect()))
            }
            (ClopenSet::FiniteNatSet(a), ClopenSet::NatTail(t))
            | (ClopenSet::NatTail(t), ClopenSet::FiniteNatSet(a)) => Ok(ClopenSet::FiniteNatSet(
                a.iter().copied().filter(|n| n >= t).collect(),
            )),
            (ClopenSet::NatTail(a), ClopenSet::NatTail(b)) => {
                Ok(ClopenSet::NatTail(*a.max(b)))
            }
            _ => Err(Error::Parse(
                "cannot intersect clopen sets over different base spaces".into(),
            )),
        }
    }

    pub fn is_subset_of(&self, other: &ClopenSet) -> Result<bool> {
        Ok(&self.intersect(other)? == self)
    }

    pub fn is_disjoint_from(&self, other: &ClopenSet) -> Result<bool> {
        Ok(self.intersect(other)?.is_empty())
    }

    /// Literal grammar: `Z(bits)+Z(bits)`, `{n1,n2,...}`, `{n..}`, `empty`.
    pub fn parse(s: &str) -> Result<ClopenSet> {
        let s = s.trim();
        if s == "empty" {
            return Ok(ClopenSet::empty_cylinders());
        }
        if let Some(body) = s.strip_prefix('{').and_then(|t| t.strip_suffix('}')) {
            let body = body.trim();
            if body.is_empty() {
                return Ok(ClopenSet::empty_nat());
            }
            if let Some(start) = body.strip_suffix("..") {
                let n: u64 = start
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("invalid tail literal {s:?}")))?;
                return Ok(ClopenSet::NatTail(n));
            }
            let mut items = BTreeSet::new();
            for part in body.split(',') {
                let n: u64 = part
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("invalid number {part:?}")))?;
                items.insert(n);
            }
            return Ok(ClopenSet::FiniteNatSet(items));
        }
        let mut words = Vec::new();
        for part in s.split('+') {
            let part = part.trim();
            let body = part
                .strip_prefix("Z(")
                .and_then(|t| t.strip_suffix(')'))
                .ok_or_else(|| Error::Parse(format!("invalid clopen literal {part:?}")))?;
            words.push(Bits::parse(body)?);
        }
        Ok(ClopenSet::cylinder_union(words))
    }
}

/// Sort length-lex, absorb extensions into their prefixes, then repeatedly
/// merge sibling pairs `w0, w1 -> w`.
fn canonicalize_union(words: &mut Vec<Bits>) {
    loop {
        words.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
        words.dedup();
        let mut absorbed: Vec<Bits> = Vec::new();
        for w in words.iter() {
            if !absorbed.iter().any(|p| p.is_prefix_of(w)) {
                absorbed.push(w.clone());
            }
        }
        let mut merged = false;
        let mut out: Vec<Bits> = Vec::new();
        let mut skip = vec![false; absorbed.len()];
        for i in 0..absorbed.len() {
            if skip[i] {
                continue;
            }
            let w = &absorbed[i];
            let sibling = (!w.is_empty()).then(|| {
                let mut s = w.as_slice().to_vec();
                let last = s.len() - 1;
                s[last] = !s[last];
                Bits::new(s)
            });
            let mut joined = false;
            if let Some(sib) = sibling {
                if let Some(j) = absorbed.iter().position(|x| *x == sib) {
                    if !skip[j] {
                        skip[j] = true;
                        out.push(w.prefix(w.len() - 1));
                        joined = true;
                        merged = true;
                    }
                }
            }
            if !joined {
                out.push(w.clone());
            }
        }
        *words = out;
        if !merged {
            words.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
            return;
        }
    }
}

impl fmt::Display for ClopenSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClopenSet::CylinderUnion(ws) => {
                if ws.is_empty() {
                    return write!(f, "empty");
                }
                let parts: Vec<String> = ws.iter().map(|w| format!("Z({w})")).collect();
                write!(f, "{}", parts.join("+"))
            }
            ClopenSet::FiniteNatSet(s) => {
                let parts: Vec<String> = s.iter().map(|n| n.to_string()).collect();
                write!(f, "{{{}}}", parts.join(","))
            }
            ClopenSet::NatTail(n) => write!(f, "{{{n}..}}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(s: &str) -> ClopenSet {
        ClopenSet::cylinder(Bits::parse(s).unwrap())
    }

    #[test]
    fn nested_and_disjoint_cylinder_intersections() {
        assert_eq!(z("0").intersect(&z("01")).unwrap(), z("01"));
        assert!(z("0").intersect(&z("1")).unwrap().is_empty());
        let a = ClopenSet::nat_set([2, 5]);
        let b = ClopenSet::nat_set([5, 7]);
        assert_eq!(a.intersect(&b).unwrap(), ClopenSet::nat_set([5]));
    }

    #[test]
    fn union_canonicalization_merges_siblings() {
        let u = ClopenSet::cylinder_union(vec![
            Bits::parse("00").unwrap(),
            Bits::parse("01").unwrap(),
        ]);
        assert_eq!(u, z("0"));
        let v = ClopenSet::cylinder_union(vec![
            Bits::parse("0").unwrap(),
            Bits::parse("011").unwrap(),
        ]);
        assert_eq!(v, z("0"));
        let w = ClopenSet::cylinder_union(vec![
            Bits::parse("10").unwrap(),
            Bits::parse("11").unwrap(),
            Bits::parse("0").unwrap(),
        ]);
        assert_eq!(w, z(""));
    }

    #[test]
    fn membership_and_tails() {
        let x = Point::cantor("01", "0");
        assert!(z("0").contains(&x));
        assert!(!z("10").contains(&Point::cantor("1", "1")));
        assert!(ClopenSet::nat_set([2, 5]).contains(&Point::Nat(5)));
        assert!(ClopenSet::NatTail(3).contains(&Point::Nat(7)));
        assert!(!ClopenSet::NatTail(3).contains(&Point::Nat(2)));
        assert!(!z("").contains(&Point::Infinity));
    }

    #[test]
    fn literal_roundtrip() {
        for s in ["Z(01)+Z(10)", "{2,5}", "{4..}", "empty", "{}"] {
            let c = ClopenSet::parse(s).unwrap();
            assert_eq!(ClopenSet::parse(&c.to_string()).unwrap(), c);
        }
    }
}
