use std::fmt;

use crate::bits::Bits;
use crate::clopen::ClopenSet;
use crate::error::{Error, Result};
use crate::level::Level;
use crate::point::{CantorPoint, Point};

/// One of the base spaces the bundled systems live on, together with its
/// fixed ultrametric and its fixed countable basis of compact open sets.
///
/// Metrics (all exact dyadic):
/// * `CantorFull` and `CantorMinusPoint`: `d(x,y) = 2^-N` with
///   `N = min{n >= 0 : x_n != y_n}`. For a punctured space the added point of
///   the one-point compactification is identified with the removed point, so
///   `d(x, inf) = d(x, excluded)`.
/// * `NatDiscrete`: `d(m,n) = 2^-min(m,n)` for `m != n` and
///   `d(m, inf) = 2^-m`, a compatible ultrametric on `N u {inf}`.
///
/// Basis enumerations (frozen; the word-space metric depends on them):
/// * Cantor spaces: nonempty finite bit strings in length-lex order, keeping
///   `w` iff the cylinder `Z(w)` avoids the excluded point.
/// * `N`: nonempty finite subsets in colex order, i.e. basis element `i` is
///   the set of positions of one-bits of `i` (so `1 -> {0}`, `2 -> {1}`,
///   `3 -> {0,1}`, `4 -> {2}`, ...).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BaseSpace {
    NatDiscrete,
    CantorFull,
    CantorMinusPoint(CantorPoint),
}

impl BaseSpace {
    pub fn cantor_minus(pre: &str, per: &str) -> Self {
        match Point::cantor(pre, per) {
            Point::Cantor(c) => BaseSpace::CantorMinusPoint(c),
            _ => unreachable!(),
        }
    }

    pub fn excluded(&self) -> Option<&CantorPoint> {
        match self {
            BaseSpace::CantorMinusPoint(p) => Some(p),
            _ => None,
        }
    }

    /// Membership of an ordinary point in the space itself (the added
    /// compactification point is not a member).
    pub fn contains(&self, x: &Point) -> bool {
        match (self, x) {
            (BaseSpace::NatDiscrete, Point::Nat(_)) => true,
            (BaseSpace::CantorFull, Point::Cantor(_)) => true,
            (BaseSpace::CantorMinusPoint(p), Point::Cantor(c)) => c != p,
            _ => false,
        }
    }

    /// Whether the space is noncompact, i.e. has a meaningful one-point
    /// compactification in which `Point::Infinity` is a valid argument.
    pub fn has_infinity(&self) -> bool {
        !matches!(self, BaseSpace::CantorFull)
    }

    fn check_point(&self, x: &Point) -> Result<()> {
        match x {
            Point::Infinity if self.has_infinity() => Ok(()),
            _ if self.contains(x) => Ok(()),
            _ => Err(Error::PointNotInSpace(format!("{x} in {self}"))),
        }
    }

    /// Exact distance level between two points of the space or of its
    /// one-point compactification.
    pub fn point_distance(&self, x: &Point, y: &Point) -> Result<Level> {
        self.check_point(x)?;
        self.check_point(y)?;
        match self {
            BaseSpace::NatDiscrete => {
                let lv = |p: &Point| p.as_nat();
                Ok(match (lv(x), lv(y)) {
                    (Some(a), Some(b)) if a == b => Level::Infinite,
                    (Some(a), Some(b)) => Level::Finite(a.min(b) as u32),
                    (Some(a), None) | (None, Some(a)) => Level::Finite(a as u32),
                    (None, None) => Level::Infinite,
                })
            }
            BaseSpace::CantorFull => {
                let (a, b) = (x.as_cantor().unwrap(), y.as_cantor().unwrap());
                Ok(a.distance_level(b))
            }
            BaseSpace::CantorMinusPoint(p) => {
                let rep = |q: &Point| match q {
                    Point::Cantor(c) => c.clone(),
                    Point::Infinity => p.clone(),
                    _ => unreachable!("checked above"),
                };
                Ok(rep(x).distance_level(&rep(y)))
            }
        }
    }

    /// Exact membership of a point in a clopen set over this space.
    pub fn clopen_member(&self, set: &ClopenSet, x: &Point) -> bool {
        set.contains(x)
    }

    /// Canonical intersection, delegating to [`ClopenSet::intersect`].
    pub fn clopen_intersect(&self, a: &ClopenSet, b: &ClopenSet) -> Result<ClopenSet> {
        a.intersect(b)
    }

    /// The `i`-th basis element (`i >= 1`) under the frozen enumeration.
    pub fn enumerate_basis(&self, i: u64) -> ClopenSet {
        assert!(i >= 1, "basis indices start at 1");
        match self {
            BaseSpace::NatDiscrete => {
                // colex order = positions of one-bits of i
                let mut items = Vec::new();
                let mut k = i;
                let mut pos = 0u64;
                while k > 0 {
                    if k & 1 == 1 {
                        items.push(pos);
                    }
                    k >>= 1;
                    pos += 1;
                }
                ClopenSet::nat_set(items)
            }
            BaseSpace::CantorFull | BaseSpace::CantorMinusPoint(_) => {
                ClopenSet::cylinder(self.nth_kept_string(i))
            }
        }
    }

    /// The `i`-th (1-based) nonempty bit string in length-lex order whose
    /// cylinder avoids the excluded point. Per length at most one string is
    /// excluded (the prefix of the excluded point), so the count per length
    /// is `2^len` or `2^len - 1` and the search is arithmetic.
    fn nth_kept_string(&self, i: u64) -> Bits {
        let excluded = self.excluded();
        let mut remaining = i;
        let mut len = 1usize;
        loop {
            let total = 1u64 << len;
            let kept = if excluded.is_some() { total - 1 } else { total };
            if remaining <= kept {
                let excl_rank = excluded.map(|p| p.prefix(len).rank());
                let mut rank = remaining - 1;
                if let Some(er) = excl_rank {
                    if rank >= er {
                        rank += 1;
                    }
                }
                return Bits::from_rank(len, rank);
            }
            remaining -= kept;
            len += 1;
        }
    }

    /// Index of a cylinder string under the same enumeration, when kept.
    pub fn basis_index_of_string(&self, w: &Bits) -> Option<u64> {
        if w.is_empty() {
            return None;
        }
        if let Some(p) = self.excluded() {
            if p.starts_with(w) {
                return None;
            }
        }
        let mut index = 0u64;
        for len in 1..w.len() {
            let total = 1u64 << len;
            index += if self.excluded().is_some() { total - 1 } else { total };
        }
        let mut rank = w.rank();
        if let Some(p) = self.excluded() {
            let er = p.prefix(w.len()).rank();
            if rank > er {
                rank -= 1;
            }
        }
        Some(index + rank + 1)
    }

    /// The canonical clopen set equal to the open ball `B(x, 2^-n)` of the
    /// space. For Cantor points this is the cylinder on the first `n+1`
    /// bits; for naturals it is a singleton or an upward tail.
    pub fn ball_atom(&self, x: &Point, n: u32) -> Result<ClopenSet> {
        if !self.contains(x) {
            return Err(Error::PointNotInSpace(format!("{x} in {self}")));
        }
        match (self, x) {
            (BaseSpace::NatDiscrete, Point::Nat(m)) => Ok(if *m <= u64::from(n) {
                ClopenSet::nat_set([*m])
            } else {
                ClopenSet::NatTail(u64::from(n) + 1)
            }),
            (_, Point::Cantor(c)) => Ok(ClopenSet::cylinder(c.prefix(n as usize + 1))),
            _ => unreachable!("membership checked"),
        }
    }

    /// Exact level of `dist(B, D \ B)` for a basis element `B` over the
    /// domain `D` described by `in_domain`, i.e. the largest disagreement
    /// index realizable by a pair straddling the boundary of `B`. Returns
    /// `Level::Infinite` when one side has no points of the domain.
    ///
    /// The scan walks prefix lengths of the defining data: for a cylinder
    /// `Z(w)` it tests, for `t = |w|-1, ..., 0`, whether the sibling cylinder
    /// `Z(w[..t] . !w[t])` meets the domain; for a finite set of naturals it
    /// scans candidate partners directly.
    pub fn min_separation_level<F: Fn(&Point) -> bool>(
        &self,
        set: &ClopenSet,
        in_domain: F,
    ) -> Level {
        match set {
            ClopenSet::CylinderUnion(ws) => {
                // cylinders minus at most one point always have points, so
                // two constant-tail probes decide inhabitedness
                let probes = |w: &Bits| -> Vec<Point> {
                    vec![
                        Point::Cantor(CantorPoint::constant(false).prepend(w)),
                        Point::Cantor(CantorPoint::constant(true).prepend(w)),
                    ]
                };
                let inside_inhabited =
                    |w: &Bits| probes(w).iter().any(|p| in_domain(p) && set.contains(p));
                let outside_inhabited =
                    |w: &Bits| probes(w).iter().any(|p| in_domain(p) && !set.contains(p));
                if !ws.iter().any(|w| inside_inhabited(w)) {
                    return Level::Infinite;
                }
                let mut best: Option<u32> = None;
                for w in ws {
                    if !inside_inhabited(w) {
                        continue;
                    }
                    for t in (0..w.len()).rev() {
                        let mut sib = w.prefix(t + 1).as_slice().to_vec();
                        sib[t] = !sib[t];
                        let sib = Bits::new(sib);
                        if outside_inhabited(&sib) {
                            best = Some(best.map_or(t as u32, |b| b.max(t as u32)));
                            break;
                        }
                    }
                }
                best.map_or(Level::Infinite, Level::Finite)
            }
            ClopenSet::FiniteNatSet(s) => {
                if s.is_empty() {
                    return Level::Infinite;
                }
                let inside: Vec<u64> = s.iter().copied().filter(|n| in_domain(&Point::Nat(*n))).collect();
                if inside.is_empty() {
                    return Level::Infinite;
                }
                // smallest distance = 2^-min(m, k) over m in B, k outside B;
                // scan k up to max(B)+1 which is always outside-reachable
                let limit = s.iter().max().unwrap() + 1;
                let mut best: Option<u64> = None;
                for k in 0..=limit {
                    if s.contains(&k) || !in_domain(&Point::Nat(k)) {
                        continue;
                    }
                    for m in &inside {
                        let lvl = (*m).min(k);
                        best = Some(best.map_or(lvl, |b| b.max(lvl)));
                    }
                }
                best.map_or(Level::Infinite, |b| Level::Finite(b as u32))
            }
            ClopenSet::NatTail(_) => Level::Infinite,
        }
    }
}

impl fmt::Display for BaseSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaseSpace::NatDiscrete => write!(f, "nat"),
            BaseSpace::CantorFull => write!(f, "cantor"),
            BaseSpace::CantorMinusPoint(p) => write!(f, "cantor-minus:{p}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(pre: &str, per: &str) -> Point {
        Point::cantor(pre, per)
    }

    #[test]
    fn cantor_distances_match_first_disagreement() {
        let s = BaseSpace::CantorFull;
        assert_eq!(
            s.point_distance(&pt("0", "0"), &pt("0", "0")).unwrap(),
            Level::Infinite
        );
        assert_eq!(
            s.point_distance(&pt("1", "0"), &pt("0", "0")).unwrap(),
            Level::Finite(0)
        );
        assert_eq!(
            s.point_distance(&pt("01", "1"), &pt("00", "1")).unwrap(),
            Level::Finite(1)
        );
    }

    #[test]
    fn nat_metric_and_infinity() {
        let s = BaseSpace::NatDiscrete;
        assert_eq!(
            s.point_distance(&Point::Nat(3), &Point::Infinity).unwrap(),
            Level::Finite(3)
        );
        assert_eq!(
            s.point_distance(&Point::Nat(4), &Point::Nat(7)).unwrap(),
            Level::Finite(4)
        );
        assert_eq!(
            s.point_distance(&Point::Infinity, &Point::Infinity).unwrap(),
            Level::Infinite
        );
    }

    #[test]
    fn punctured_space_identifies_infinity_with_excluded() {
        let s = BaseSpace::cantor_minus("", "1");
        assert!(!s.contains(&pt("", "1")));
        assert_eq!(
            s.point_distance(&pt("10", "0"), &Point::Infinity).unwrap(),
            Level::Finite(1)
        );
        assert!(s.point_distance(&pt("", "1"), &Point::Nat(0)).is_err());
    }

    #[test]
    fn basis_enumeration_golden_prefixes() {
        // hand-run of the documented enumerations for the first indices
        let full = BaseSpace::CantorFull;
        let got: Vec<String> = (1..=7).map(|i| full.enumerate_basis(i).to_string()).collect();
        assert_eq!(got, ["Z(0)", "Z(1)", "Z(00)", "Z(01)", "Z(10)", "Z(11)", "Z(000)"]);

        let vls = BaseSpace::cantor_minus("", "1");
        let got: Vec<String> = (1..=5).map(|i| vls.enumerate_basis(i).to_string()).collect();
        assert_eq!(got, ["Z(0)", "Z(00)", "Z(01)", "Z(10)", "Z(000)"]);

        let frm = BaseSpace::cantor_minus("0", "1");
        let got: Vec<String> = (1..=8).map(|i| frm.enumerate_basis(i).to_string()).collect();
        assert_eq!(
            got,
            ["Z(1)", "Z(00)", "Z(10)", "Z(11)", "Z(000)", "Z(001)", "Z(010)", "Z(100)"]
        );

        let nat = BaseSpace::NatDiscrete;
        let got: Vec<String> = (1..=6).map(|i| nat.enumerate_basis(i).to_string()).collect();
        assert_eq!(got, ["{0}", "{1}", "{0,1}", "{2}", "{0,2}", "{1,2}"]);
    }

    #[test]
    fn basis_index_inverts_enumeration() {
        for space in [
            BaseSpace::CantorFull,
            BaseSpace::cantor_minus("", "1"),
            BaseSpace::cantor_minus("0", "1"),
        ] {
            for i in 1..200u64 {
                let set = space.enumerate_basis(i);
                let ClopenSet::CylinderUnion(ws) = &set else { panic!() };
                assert_eq!(space.basis_index_of_string(&ws[0]), Some(i));
            }
        }
    }

    #[test]
    fn ball_atoms() {
        let s = BaseSpace::CantorFull;
        assert_eq!(
            s.ball_atom(&pt("010", "0"), 2).unwrap().to_string(),
            "Z(010)"
        );
        let n = BaseSpace::NatDiscrete;
        assert_eq!(n.ball_atom(&Point::Nat(1), 2).unwrap().to_string(), "{1}");
        assert_eq!(n.ball_atom(&Point::Nat(4), 2).unwrap().to_string(), "{3..}");
    }

    #[test]
    fn nat_ball_atom_matches_finite_scan() {
        // {m : d(4, m) < 1/4} over 0..=20 under the chosen metric
        let n = BaseSpace::NatDiscrete;
        let atom = n.ball_atom(&Point::Nat(4), 2).unwrap();
        for m in 0..=20u64 {
            let close = n
                .point_distance(&Point::Nat(4), &Point::Nat(m))
                .unwrap()
                .distance_below(2);
            assert_eq!(atom.contains(&Point::Nat(m)), close, "m={m}");
        }
    }

    #[test]
    fn separation_levels() {
        let vls = BaseSpace::cantor_minus("", "1");
        let everywhere = |p: &Point| vls.contains(p);
        // dist(Z(00), D\Z(00)) = 2^-1 via the sibling Z(01)
        let b = ClopenSet::cylinder(Bits::parse("00").unwrap());
        assert_eq!(vls.min_separation_level(&b, everywhere), Level::Finite(1));
        let b = ClopenSet::cylinder(Bits::parse("0").unwrap());
        assert_eq!(vls.min_separation_level(&b, everywhere), Level::Finite(0));
    }
}
