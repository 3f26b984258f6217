use std::fmt;

use crate::clopen::ClopenSet;
use crate::error::{Error, Result};
use crate::eventually::EpSeq;
use crate::invlim::BackwardPathGen;
use crate::level::Level;
use crate::point::Point;
use crate::space::BaseSpace;

/// Length of a word: `0`, a finite `n >= 1`, or `omega`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WordLen {
    Finite(usize),
    Infinite,
}

impl WordLen {
    pub fn at_least(self, k: usize) -> bool {
        match self {
            WordLen::Finite(n) => n >= k,
            WordLen::Infinite => true,
        }
    }
}

/// A finitely generated infinite word: either an eventually periodic
/// coordinate listing or a backward-path generator over a bundled system.
/// Both produce any coordinate in finite time and carry no internal cursor.
#[derive(Debug, Clone)]
pub enum InfiniteWord {
    Periodic(EpSeq<Point>),
    Path(BackwardPathGen),
}

impl InfiniteWord {
    /// 1-based coordinate access.
    pub fn coord(&self, i: usize) -> Point {
        match self {
            InfiniteWord::Periodic(eps) => eps.get(i - 1).clone(),
            InfiniteWord::Path(gen) => gen.coordinate(i),
        }
    }
}

/// An element of the compactified word space over a base space: the zero
/// word, a finite word of positive length, or a finitely generated infinite
/// word. Finite words contain no `Infinity` coordinates.
///
/// Equality is canonical: backward-path generators whose coordinate stream
/// is detectably eventually periodic are normalized to the periodic kind
/// before structural comparison, so two descriptions of the same word
/// compare equal.
#[derive(Debug, Clone)]
pub enum W0Word {
    Zero,
    Finite(Vec<Point>),
    Infinite(InfiniteWord),
}

impl W0Word {
    pub fn finite(coords: Vec<Point>) -> Self {
        assert!(!coords.is_empty(), "finite words have positive length");
        assert!(
            coords.iter().all(|p| !p.is_infinity()),
            "finite words contain no infinity coordinates"
        );
        W0Word::Finite(coords)
    }

    pub fn periodic(pre: Vec<Point>, per: Vec<Point>) -> Self {
        assert!(
            pre.iter().chain(per.iter()).all(|p| !p.is_infinity()),
            "infinite words contain no infinity coordinates"
        );
        W0Word::Infinite(InfiniteWord::Periodic(EpSeq::new(pre, per)))
    }

    pub fn backward_path(gen: BackwardPathGen) -> Self {
        W0Word::Infinite(InfiniteWord::Path(gen))
    }

    pub fn len(&self) -> WordLen {
        match self {
            W0Word::Zero => WordLen::Finite(0),
            W0Word::Finite(v) => WordLen::Finite(v.len()),
            W0Word::Infinite(_) => WordLen::Infinite,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, W0Word::Zero)
    }

    /// 1-based coordinate, `None` past the end of a finite word.
    pub fn coord(&self, i: usize) -> Option<Point> {
        assert!(i >= 1, "coordinates are 1-based");
        match self {
            W0Word::Zero => None,
            W0Word::Finite(v) => v.get(i - 1).cloned(),
            W0Word::Infinite(w) => Some(w.coord(i)),
        }
    }

    /// Canonical form: path generators with eventually periodic coordinates
    /// become periodic listings.
    pub fn normalize(&self) -> W0Word {
        match self {
            W0Word::Infinite(InfiniteWord::Path(gen)) => match gen.detect_periodic() {
                Some(eps) => W0Word::Infinite(InfiniteWord::Periodic(eps)),
                None => self.clone(),
            },
            _ => self.clone(),
        }
    }

    /// The tail map: drops the first coordinate. This is the shift of the
    /// full word space (and of the OTW shift realized over the alphabet `N`).
    pub fn tail(&self) -> Result<W0Word> {
        match self {
            W0Word::Zero => Err(Error::ZeroWordNotInDomain),
            W0Word::Finite(v) if v.len() == 1 => Ok(W0Word::Zero),
            W0Word::Finite(v) => Ok(W0Word::Finite(v[1..].to_vec())),
            W0Word::Infinite(InfiniteWord::Periodic(eps)) => {
                Ok(W0Word::Infinite(InfiniteWord::Periodic(eps.shifted(1))))
            }
            W0Word::Infinite(InfiniteWord::Path(gen)) => {
                Ok(W0Word::Infinite(InfiniteWord::Path(gen.advance()?)))
            }
        }
    }

    /// Word literal: `Zero`, `[p1; p2]`, or `[p1](q1; q2)*` for eventually
    /// periodic infinite words (backward-path words print as shift-point
    /// literals and parse only with a system in scope).
    pub fn parse(s: &str) -> Result<W0Word> {
        let s = s.trim();
        if s == "Zero" {
            return Ok(W0Word::Zero);
        }
        let parse_points = |body: &str| -> Result<Vec<Point>> {
            let body = body.trim();
            if body.is_empty() {
                return Ok(Vec::new());
            }
            body.split(';').map(Point::parse).collect()
        };
        if let Some(rest) = s.strip_suffix(")*") {
            // point literals contain parens, so match the word-level group
            // by walking back with a depth counter
            let mut depth = 1usize;
            let mut open = None;
            for (i, c) in rest.char_indices().rev() {
                match c {
                    ')' => depth += 1,
                    '(' => {
                        depth -= 1;
                        if depth == 0 {
                            open = Some(i);
                            break;
                        }
                    }
                    _ => {}
                }
            }
            let open = open.ok_or_else(|| Error::Parse(format!("invalid word literal {s:?}")))?;
            let per = parse_points(&rest[open + 1..])?;
            if per.is_empty() {
                return Err(Error::Parse(format!("empty period in {s:?}")));
            }
            let head = rest[..open].trim();
            let pre = if head.is_empty() {
                Vec::new()
            } else {
                let body = head
                    .strip_prefix('[')
                    .and_then(|t| t.strip_suffix(']'))
                    .ok_or_else(|| Error::Parse(format!("invalid word literal {s:?}")))?;
                parse_points(body)?
            };
            if pre.iter().chain(per.iter()).any(Point::is_infinity) {
                return Err(Error::Parse("infinite words cannot contain inf".into()));
            }
            return Ok(W0Word::periodic(pre, per));
        }
        let body = s
            .strip_prefix('[')
            .and_then(|t| t.strip_suffix(']'))
            .ok_or_else(|| Error::Parse(format!("invalid word literal {s:?}")))?;
        let coords = parse_points(body)?;
        if coords.is_empty() {
            return Ok(W0Word::Zero);
        }
        if coords.iter().any(Point::is_infinity) {
            return Err(Error::Parse("finite words cannot contain inf".into()));
        }
        Ok(W0Word::Finite(coords))
    }
}

impl PartialEq for W0Word {
    fn eq(&self, other: &Self) -> bool {
        match (self.normalize(), other.normalize()) {
            (W0Word::Zero, W0Word::Zero) => true,
            (W0Word::Finite(a), W0Word::Finite(b)) => a == b,
            (
                W0Word::Infinite(InfiniteWord::Periodic(a)),
                W0Word::Infinite(InfiniteWord::Periodic(b)),
            ) => a == b,
            (
                W0Word::Infinite(InfiniteWord::Path(a)),
                W0Word::Infinite(InfiniteWord::Path(b)),
            ) => a.same_path(&b),
            _ => false,
        }
    }
}

impl Eq for W0Word {}

impl fmt::Display for W0Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join =
            |v: &[Point]| v.iter().map(|p| p.to_string()).collect::<Vec<_>>().join("; ");
        match self {
            W0Word::Zero => write!(f, "Zero"),
            W0Word::Finite(v) => write!(f, "[{}]", join(v)),
            W0Word::Infinite(InfiniteWord::Periodic(eps)) => {
                if eps.pre().is_empty() {
                    write!(f, "({})*", join(eps.per()))
                } else {
                    write!(f, "[{}]({})*", join(eps.pre()), join(eps.per()))
                }
            }
            W0Word::Infinite(InfiniteWord::Path(gen)) => write!(f, "{gen}"),
        }
    }
}

/// A finitely described element of the ambient compactified product: the
/// inputs the normalization map accepts.
#[derive(Debug, Clone)]
pub enum ProductSeq {
    /// listed entries (possibly `inf`), continued by an infinite tail of `inf`
    Padded(Vec<Point>),
    /// eventually periodic entries, possibly containing `inf`
    Periodic(EpSeq<Point>),
    /// an everywhere-finite backward-path generator
    Path(BackwardPathGen),
}

/// The normalization map from the ambient product onto the word space: cut
/// at the first `inf` entry (everything after it is irrelevant), or keep an
/// all-finite sequence whole. The first `inf` position is decidable for
/// every accepted description.
pub fn q_normalize(seq: &ProductSeq) -> W0Word {
    let cut = |entries: &[Point]| -> W0Word {
        match entries.iter().position(Point::is_infinity) {
            Some(0) => W0Word::Zero,
            Some(n) => W0Word::Finite(entries[..n].to_vec()),
            None if entries.is_empty() => W0Word::Zero,
            None => W0Word::Finite(entries.to_vec()),
        }
    };
    match seq {
        ProductSeq::Padded(v) => cut(v),
        ProductSeq::Periodic(eps) => {
            if eps.pre().iter().any(Point::is_infinity) {
                return cut(eps.pre());
            }
            if let Some(q) = eps.per().iter().position(Point::is_infinity) {
                let mut entries = eps.pre().to_vec();
                entries.extend_from_slice(&eps.per()[..q]);
                return match entries.len() {
                    0 => W0Word::Zero,
                    _ => W0Word::Finite(entries),
                };
            }
            W0Word::Infinite(InfiniteWord::Periodic(eps.clone()))
        }
        ProductSeq::Path(gen) => W0Word::Infinite(InfiniteWord::Path(gen.clone())),
    }
}

/// A generalized cylinder: `Z[B_1 x ... x B_k, K]` fixes the first `k`
/// coordinates inside basis sets and requires the `(k+1)`-st, when present,
/// to avoid the compact open `K`; `C[K]` holds the zero word and all words
/// whose first coordinate avoids `K`. `C[K]` and `Z[[K], empty]` are
/// distinct objects.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GeneralizedCylinder {
    Z { prefix: Vec<ClopenSet>, avoid: ClopenSet },
    C { avoid: ClopenSet },
}

impl GeneralizedCylinder {
    pub fn z(prefix: Vec<ClopenSet>, avoid: ClopenSet) -> Self {
        assert!(!prefix.is_empty(), "Z cylinders fix at least one coordinate");
        GeneralizedCylinder::Z { prefix, avoid }
    }

    pub fn c(avoid: ClopenSet) -> Self {
        GeneralizedCylinder::C { avoid }
    }

    /// `Z[p_j, empty]` for an enumerated tuple.
    pub fn z_tuple(space: &BaseSpace, tuple: &BasisTuple) -> Self {
        let empty = match space {
            BaseSpace::NatDiscrete => ClopenSet::empty_nat(),
            _ => ClopenSet::empty_cylinders(),
        };
        GeneralizedCylinder::Z { prefix: tuple.elements(space), avoid: empty }
    }
}

/// Exact membership of a word in a generalized cylinder. A word of length
/// exactly `k` vacuously satisfies the avoidance clause: its `(k+1)`-st
/// ambient entry is the added point, which lies in no compact subset of the
/// base space.
pub fn cyl_member(space: &BaseSpace, c: &GeneralizedCylinder, x: &W0Word) -> bool {
    match c {
        GeneralizedCylinder::C { avoid } => match x.coord(1) {
            None => true,
            Some(x1) => !space.clopen_member(avoid, &x1),
        },
        GeneralizedCylinder::Z { prefix, avoid } => {
            let k = prefix.len();
            if !x.len().at_least(k) {
                return false;
            }
            for (i, b) in prefix.iter().enumerate() {
                let xi = x.coord(i + 1).expect("length checked");
                if !space.clopen_member(b, &xi) {
                    return false;
                }
            }
            match x.coord(k + 1) {
                None => true,
                Some(next) => !space.clopen_member(avoid, &next),
            }
        }
    }
}

/// Diagonal pairing on positive integers: enumerates `N+ x N+` by
/// anti-diagonals, within a diagonal by first component. `pair(1,1) = 1`,
/// `pair(1,2) = 2`, `pair(2,1) = 3`, `pair(1,3) = 4`, ...
pub fn pair(a: u64, b: u64) -> u64 {
    let d = a + b - 2;
    d * (d + 1) / 2 + a
}

pub fn unpair(m: u64) -> (u64, u64) {
    let z = m - 1;
    let mut d = 0u64;
    while (d + 1) * (d + 2) / 2 <= z {
        d += 1;
    }
    let r = z - d * (d + 1) / 2;
    (r + 1, d - r + 1)
}

/// A tuple of basis indices together with its position in the frozen
/// enumeration of all finite tuples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisTuple {
    entries: Vec<u64>,
    enum_index: u64,
}

impl BasisTuple {
    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn enum_index(&self) -> u64 {
        self.enum_index
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn elements(&self, space: &BaseSpace) -> Vec<ClopenSet> {
        self.entries.iter().map(|&i| space.enumerate_basis(i)).collect()
    }
}

impl fmt::Display for BasisTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(|i| i.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

fn unrank_tuple(len: u64, m: u64) -> Vec<u64> {
    if len == 1 {
        vec![m]
    } else {
        let (head, rest) = unpair(m);
        let mut v = vec![head];
        v.extend(unrank_tuple(len - 1, rest));
        v
    }
}

/// The `j`-th tuple (`j >= 1`) of the frozen enumeration of all nonempty
/// tuples of basis indices: `unpair(j) = (length, rank)` picks the tuple
/// length by the diagonal order, and the rank is unnested with the same
/// unpairing. Deterministic and total; the word-space metric depends on it.
pub fn enumerate_tuples(_space: &BaseSpace, j: u64) -> BasisTuple {
    assert!(j >= 1, "tuple indices start at 1");
    let (len, m) = unpair(j);
    BasisTuple { entries: unrank_tuple(len, m), enum_index: j }
}

/// Coordinate cache for repeated membership scans over one word.
struct CoordCache<'a> {
    word: &'a W0Word,
    coords: Vec<Option<Point>>,
}

impl<'a> CoordCache<'a> {
    fn new(word: &'a W0Word) -> Self {
        CoordCache { word, coords: Vec::new() }
    }

    fn coord(&mut self, i: usize) -> &Option<Point> {
        while self.coords.len() < i {
            let next = self.word.coord(self.coords.len() + 1);
            self.coords.push(next);
        }
        &self.coords[i - 1]
    }

    fn member_z_empty(&mut self, space: &BaseSpace, sets: &[ClopenSet]) -> bool {
        if !self.word.len().at_least(sets.len()) {
            return false;
        }
        for (i, b) in sets.iter().enumerate() {
            let xi = self.coord(i + 1).clone().expect("length checked");
            if !space.clopen_member(b, &xi) {
                return false;
            }
        }
        true
    }
}

/// Lazily grown cache of basis elements of one space.
struct BasisCache<'a> {
    space: &'a BaseSpace,
    sets: Vec<ClopenSet>,
}

impl<'a> BasisCache<'a> {
    fn new(space: &'a BaseSpace) -> Self {
        BasisCache { space, sets: Vec::new() }
    }

    fn tuple_sets(&mut self, tuple: &BasisTuple) -> Vec<ClopenSet> {
        for &e in tuple.entries() {
            while (self.sets.len() as u64) < e {
                self.sets.push(self.space.enumerate_basis(self.sets.len() as u64 + 1));
            }
        }
        tuple.entries().iter().map(|&e| self.sets[e as usize - 1].clone()).collect()
    }
}

/// The encoding bits of a word against the first `m` enumerated tuples:
/// bit `j` is 1 iff the word lies in `Z[p_j, empty]`.
pub fn alpha_bits(space: &BaseSpace, x: &W0Word, m: u64) -> Vec<bool> {
    let mut cache = CoordCache::new(x);
    let mut basis = BasisCache::new(space);
    let mut out = Vec::with_capacity(m as usize);
    for j in 1..=m {
        let tuple = enumerate_tuples(space, j);
        let sets = basis.tuple_sets(&tuple);
        out.push(cache.member_z_empty(space, &sets));
    }
    out
}

/// Outcome of a bounded word-distance scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum W0Distance {
    Resolved(Level),
    /// The words differ but no separating tuple was found within the bound.
    /// A separating index exists at some finite position; the caller picks
    /// the search budget.
    Indistinguishable { bound: u64 },
}

impl W0Distance {
    pub fn level(self) -> Option<Level> {
        match self {
            W0Distance::Resolved(l) => Some(l),
            W0Distance::Indistinguishable { .. } => None,
        }
    }

    /// True iff the encoded distance is known to be `< 2^-l`: resolved at a
    /// deeper level, equal words, or no separation within a bound `>= l`.
    pub fn below(self, l: u64) -> bool {
        match self {
            W0Distance::Resolved(Level::Infinite) => true,
            W0Distance::Resolved(Level::Finite(j)) => u64::from(j) > l,
            W0Distance::Indistinguishable { bound } => bound >= l,
        }
    }
}

impl fmt::Display for W0Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            W0Distance::Resolved(l) => write!(f, "{l}"),
            W0Distance::Indistinguishable { bound } => write!(f, "indistinguishable@{bound}"),
        }
    }
}

/// The word-space ultrametric: `2^-i` for the smallest index `i` at which
/// exactly one of the words lies in `Z[p_i, empty]`, `0` for canonically
/// equal words, and an explicit `Indistinguishable` outcome when distinct
/// words admit no separating tuple within the search bound.
pub fn w0_distance(space: &BaseSpace, x: &W0Word, y: &W0Word, search_bound: u64) -> W0Distance {
    if x == y {
        return W0Distance::Resolved(Level::Infinite);
    }
    let mut cx = CoordCache::new(x);
    let mut cy = CoordCache::new(y);
    let mut basis = BasisCache::new(space);
    for j in 1..=search_bound {
        let tuple = enumerate_tuples(space, j);
        let sets = basis.tuple_sets(&tuple);
        if cx.member_z_empty(space, &sets) != cy.member_z_empty(space, &sets) {
            return W0Distance::Resolved(Level::Finite(j as u32));
        }
    }
    W0Distance::Indistinguishable { bound: search_bound }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(pre: &str, per: &str) -> Point {
        Point::cantor(pre, per)
    }

    #[test]
    fn pairing_is_a_bijection_prefix() {
        let got: Vec<(u64, u64)> = (1..=7).map(unpair).collect();
        assert_eq!(got, [(1, 1), (1, 2), (2, 1), (1, 3), (2, 2), (3, 1), (1, 4)]);
        for m in 1..=500 {
            let (a, b) = unpair(m);
            assert_eq!(pair(a, b), m);
        }
    }

    #[test]
    fn tuple_enumeration_hand_run() {
        let s = BaseSpace::CantorFull;
        let got: Vec<String> = (1..=10).map(|j| enumerate_tuples(&s, j).to_string()).collect();
        assert_eq!(
            got,
            ["(1)", "(2)", "(1,1)", "(3)", "(1,2)", "(1,1,1)", "(4)", "(2,1)", "(1,1,2)", "(1,1,1,1)"]
        );
    }

    #[test]
    fn tuple_enumeration_is_injective() {
        use std::collections::HashSet;
        let s = BaseSpace::CantorFull;
        let mut seen = HashSet::new();
        for j in 1..=10_000u64 {
            let t = enumerate_tuples(&s, j);
            assert!(seen.insert(t.entries().to_vec()), "duplicate at {j}");
        }
    }

    #[test]
    fn q_normalize_branches() {
        // infinity at the first entry
        let z = q_normalize(&ProductSeq::Padded(vec![Point::Infinity, Point::Nat(1)]));
        assert_eq!(z, W0Word::Zero);
        // infinity after one finite entry, later garbage ignored
        let w = q_normalize(&ProductSeq::Padded(vec![
            Point::Nat(3),
            Point::Infinity,
            Point::Nat(9),
        ]));
        assert_eq!(w, W0Word::finite(vec![Point::Nat(3)]));
        // all-finite generator passes through
        let gen = EpSeq::new(vec![pt("0", "0")], vec![pt("1", "0")]);
        let w = q_normalize(&ProductSeq::Periodic(gen.clone()));
        assert_eq!(w, W0Word::Infinite(InfiniteWord::Periodic(gen)));
        // infinity inside the period cuts the word
        let gen = EpSeq::new(vec![Point::Nat(1)], vec![Point::Nat(2), Point::Infinity]);
        assert_eq!(
            q_normalize(&ProductSeq::Periodic(gen)),
            W0Word::finite(vec![Point::Nat(1), Point::Nat(2)])
        );
    }

    #[test]
    fn cylinder_membership_clauses() {
        let space = BaseSpace::CantorFull;
        let z0 = ClopenSet::parse("Z(0)").unwrap();
        let z1 = ClopenSet::parse("Z(1)").unwrap();
        // Z([Z(0)], empty) contains [01 0*]
        let c = GeneralizedCylinder::z(vec![z0.clone()], ClopenSet::empty_cylinders());
        assert!(cyl_member(&space, &c, &W0Word::finite(vec![pt("01", "0")])));
        // C[Z(0)] contains Zero
        let c = GeneralizedCylinder::c(z0.clone());
        assert!(cyl_member(&space, &c, &W0Word::Zero));
        assert!(!cyl_member(&space, &c, &W0Word::finite(vec![pt("0", "0")])));
        // Z([Z(0)], K=Z(1)) rejects a word whose second coordinate hits K
        let c = GeneralizedCylinder::z(vec![z0.clone()], z1.clone());
        assert!(!cyl_member(
            &space,
            &c,
            &W0Word::finite(vec![pt("0", "0"), pt("1", "0")])
        ));
        // but a length-1 word vacuously satisfies the avoidance clause
        assert!(cyl_member(&space, &c, &W0Word::finite(vec![pt("0", "0")])));
        // C[K] complements Z[[K], empty] on every word when K is a basis element
        let zk = GeneralizedCylinder::z(vec![z0.clone()], ClopenSet::empty_cylinders());
        let ck = GeneralizedCylinder::c(z0);
        for w in [
            W0Word::Zero,
            W0Word::finite(vec![pt("0", "0")]),
            W0Word::finite(vec![pt("1", "0")]),
        ] {
            assert_ne!(cyl_member(&space, &zk, &w), cyl_member(&space, &ck, &w));
        }
    }

    #[test]
    fn alpha_bits_of_zero_vanish() {
        let space = BaseSpace::CantorFull;
        assert!(alpha_bits(&space, &W0Word::Zero, 64).iter().all(|b| !b));
    }

    #[test]
    fn w0_distance_resolves_or_reports() {
        let space = BaseSpace::cantor_minus("", "1");
        let x = W0Word::finite(vec![pt("0", "0")]);
        assert_eq!(
            w0_distance(&space, &x, &x.clone(), 100),
            W0Distance::Resolved(Level::Infinite)
        );
        // Zero vs [0 0*]: first separating tuple is (B1) = Z(0) at index 1
        let d = w0_distance(&space, &W0Word::Zero, &x, 100);
        assert_eq!(d, W0Distance::Resolved(Level::Finite(1)));
        // [0 0*] vs [0 0*; 0 0*]: tuple (1,1) at index 3 separates by length
        let y = W0Word::finite(vec![pt("0", "0"), pt("0", "0")]);
        assert_eq!(
            w0_distance(&space, &x, &y, 100),
            W0Distance::Resolved(Level::Finite(3))
        );
    }

    #[test]
    fn word_literals_roundtrip() {
        for s in ["Zero", "[Nat:0; Nat:2]", "(Nat:1)*", "[0(1)*](01(0)*; 1(0)*)*"] {
            let w = W0Word::parse(s).unwrap();
            assert_eq!(W0Word::parse(&w.to_string()).unwrap(), w);
        }
    }
}
