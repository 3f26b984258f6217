use std::fmt;

use crate::bits::Bits;
use crate::clopen::ClopenSet;
use crate::error::{Error, Result};
use crate::level::Level;
use crate::point::{CantorPoint, Point};
use crate::space::BaseSpace;

/// The bundled example systems.
///
/// * `Vls` - variable-length shift: `D = {0,1}^N \ {1^inf}`, branch `n` has
///   domain `Z(1^n 0)` and `f = sigma^(n+1)` there; `g_n(y) = 1^n 0 y`.
/// * `Frm` - first-return map of the left shift to `A = Z(0)`:
///   `D = A \ {0 1^inf}`, branch `k` has domain `Z(0 1^k 0)` and
///   `f = sigma^(k+1)` there; `g_k(y) = 0 1^k y`.
/// * `Halving` - `f(n) = 1` for odd `n`, `f(m) = m/2` for even `m` on
///   discrete `N`; the atlas is the family of singleton branches `{r}` with
///   `g_r` picking the preimage `r`. No separation constants are bundled, so
///   it is excluded from the transfer machinery.
/// * `NatIdentity` - the identity on discrete `N`, singleton branches.
/// * `OtwFull` - the full one-sided shift over the alphabet `N`, realized as
///   the word space over discrete `N` with the tail shift. Its dynamics acts
///   on words, not base points, so the point-level operations reject it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SystemKind {
    Vls,
    Frm,
    Halving,
    NatIdentity,
    OtwFull,
}

impl SystemKind {
    pub fn name(self) -> &'static str {
        match self {
            SystemKind::Vls => "vls",
            SystemKind::Frm => "frm",
            SystemKind::Halving => "halving",
            SystemKind::NatIdentity => "nat-identity",
            SystemKind::OtwFull => "otw-full",
        }
    }
}

impl fmt::Display for SystemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

/// A Deaconu-Renault system given by a base space with metric, a domain
/// membership rule, and a countable branch atlas with (for the two Cantor
/// examples) uniform separation constants: `theta_gain` is the uniform
/// contraction exponent (`theta = 2^-theta_gain`) and `r_level` the interior
/// radius exponent (`R = 2^-r_level`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DrSystem {
    kind: SystemKind,
    base: BaseSpace,
    theta_gain: Option<u32>,
    r_level: Option<u32>,
}

impl DrSystem {
    pub fn new(kind: SystemKind) -> Self {
        let base = match kind {
            SystemKind::Vls => BaseSpace::cantor_minus("", "1"),
            SystemKind::Frm => BaseSpace::cantor_minus("0", "1"),
            SystemKind::Halving | SystemKind::NatIdentity | SystemKind::OtwFull => {
                BaseSpace::NatDiscrete
            }
        };
        let (theta_gain, r_level) = match kind {
            SystemKind::Vls | SystemKind::Frm => (Some(1), Some(0)),
            _ => (None, None),
        };
        DrSystem { kind, base, theta_gain, r_level }
    }

    pub fn by_name(name: &str) -> Result<Self> {
        let kind = match name {
            "vls" => SystemKind::Vls,
            "frm" => SystemKind::Frm,
            "halving" => SystemKind::Halving,
            "nat-identity" => SystemKind::NatIdentity,
            "otw-full" => SystemKind::OtwFull,
            _ => return Err(Error::UnsupportedSystem(name.to_string())),
        };
        Ok(DrSystem::new(kind))
    }

    /// Replaces the claimed uniform contraction exponent; a corrupted claim
    /// is the negative control for separation verification.
    pub fn claiming_theta_gain(mut self, gain: u32) -> Self {
        self.theta_gain = Some(gain);
        self
    }

    pub fn kind(&self) -> SystemKind {
        self.kind
    }

    pub fn base(&self) -> &BaseSpace {
        &self.base
    }

    pub fn theta_gain(&self) -> Option<u32> {
        self.theta_gain
    }

    pub fn r_level(&self) -> Option<u32> {
        self.r_level
    }

    fn point_atlas(&self) -> Result<()> {
        if self.kind == SystemKind::OtwFull {
            return Err(Error::UnsupportedSystem(
                "otw-full acts on words, not base points".into(),
            ));
        }
        Ok(())
    }

    /// Membership in the domain `D = Dom(f)`.
    pub fn domain_contains(&self, x: &Point) -> bool {
        match self.kind {
            SystemKind::Vls => self.base.contains(x),
            SystemKind::Frm => match x {
                Point::Cantor(c) => !c.bit(0) && self.base.contains(x),
                _ => false,
            },
            SystemKind::Halving | SystemKind::NatIdentity => matches!(x, Point::Nat(_)),
            SystemKind::OtwFull => false,
        }
    }

    /// The image `f(x)`, computed via the unique branch containing `x`. The
    /// result lies in `D^inf`; when it equals the point compactified away it
    /// is returned as `Point::Infinity`.
    pub fn apply(&self, x: &Point) -> Result<Point> {
        let branch = self.branch_of(x)?;
        branch.forward(x)
    }

    /// The unique atlas branch whose domain contains `x`. Branch domains are
    /// pairwise disjoint in every bundled system.
    pub fn branch_of(&self, x: &Point) -> Result<Branch> {
        self.point_atlas()?;
        if !self.domain_contains(x) {
            return Err(Error::NotInDomain(format!("{x} in {}", self.kind)));
        }
        let index = match self.kind {
            SystemKind::Vls => {
                let c = x.as_cantor().unwrap();
                leading_run(c, true) as u32
            }
            SystemKind::Frm => {
                let c = x.as_cantor().unwrap();
                leading_run(&c.shift(1), true) as u32
            }
            SystemKind::Halving | SystemKind::NatIdentity => x.as_nat().unwrap() as u32,
            SystemKind::OtwFull => unreachable!(),
        };
        Ok(Branch { system: self.clone(), index })
    }

    /// The branch with atlas index `r`.
    pub fn branch(&self, r: u32) -> Result<Branch> {
        self.point_atlas()?;
        Ok(Branch { system: self.clone(), index: r })
    }

    /// First return time of `x in A = Z(0)` to `A` under the left shift.
    pub fn return_time(&self, x: &CantorPoint) -> Result<u32> {
        if self.kind != SystemKind::Frm {
            return Err(Error::UnsupportedSystem(format!(
                "return_time is defined for frm, not {}",
                self.kind
            )));
        }
        if x.bit(0) {
            return Err(Error::NotInDomain(format!("{x} does not start with 0")));
        }
        if *x == CantorPoint::constant(true).prepend(&Bits::parse("0").unwrap()) {
            return Err(Error::InfiniteReturnTime(x.to_string()));
        }
        // x = 0 1^k 0 ... returns after k+1 steps
        Ok(leading_run(&x.shift(1), true) as u32 + 1)
    }
}

impl fmt::Display for DrSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)
    }
}

/// Count of leading `bit`s; finite for any point other than `bit^inf`.
fn leading_run(c: &CantorPoint, bit: bool) -> usize {
    let mut n = 0;
    while c.bit(n) == bit {
        n += 1;
    }
    n
}

/// One chart of a branch atlas: a clopen domain `W_r` on which the system
/// map is injective, together with its inverse branch `g_r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Branch {
    system: DrSystem,
    index: u32,
}

impl Branch {
    pub fn index(&self) -> u32 {
        self.index
    }

    pub fn system(&self) -> &DrSystem {
        &self.system
    }

    /// The branch domain `W_r` as a clopen set.
    pub fn domain(&self) -> ClopenSet {
        match self.system.kind {
            SystemKind::Vls => ClopenSet::cylinder(Bits::run_then_flip(true, self.index as usize)),
            SystemKind::Frm => {
                let mut w = vec![false];
                w.extend(std::iter::repeat(true).take(self.index as usize));
                w.push(false);
                ClopenSet::cylinder(Bits::new(w))
            }
            SystemKind::Halving | SystemKind::NatIdentity => {
                ClopenSet::nat_set([u64::from(self.index)])
            }
            SystemKind::OtwFull => unreachable!(),
        }
    }

    /// The image `f(W_r)` as a clopen set (read inside `D^inf`; for the two
    /// Cantor systems the image is the whole compactification).
    pub fn image(&self) -> ClopenSet {
        match self.system.kind {
            SystemKind::Vls => ClopenSet::cylinder(Bits::empty()),
            SystemKind::Frm => ClopenSet::cylinder(Bits::parse("0").unwrap()),
            SystemKind::Halving => ClopenSet::nat_set([halving_forward(u64::from(self.index))]),
            SystemKind::NatIdentity => ClopenSet::nat_set([u64::from(self.index)]),
            SystemKind::OtwFull => unreachable!(),
        }
    }

    /// Membership of a point of `D^inf` (so possibly `Infinity`) in the
    /// branch image.
    pub fn image_contains(&self, y: &Point) -> bool {
        match self.system.kind {
            // f(W_r) = D^inf for both Cantor systems
            SystemKind::Vls => matches!(y, Point::Cantor(_) | Point::Infinity),
            SystemKind::Frm => match y {
                Point::Cantor(c) => !c.bit(0),
                Point::Infinity => true,
                _ => false,
            },
            SystemKind::Halving | SystemKind::NatIdentity => self.image().contains(y),
            SystemKind::OtwFull => false,
        }
    }

    /// The forward map restricted to this branch. The result may be the
    /// added compactification point, returned as `Point::Infinity`.
    pub fn forward(&self, x: &Point) -> Result<Point> {
        if !self.domain().contains(x) {
            return Err(Error::NotInDomain(format!(
                "{x} not in branch {} domain of {}",
                self.index, self.system.kind
            )));
        }
        match self.system.kind {
            SystemKind::Vls | SystemKind::Frm => {
                let c = x.as_cantor().unwrap();
                let shifted = c.shift(self.index as usize + 1);
                Ok(match self.system.base.excluded() {
                    Some(p) if &shifted == p => Point::Infinity,
                    _ => Point::Cantor(shifted),
                })
            }
            SystemKind::Halving => Ok(Point::Nat(halving_forward(x.as_nat().unwrap()))),
            SystemKind::NatIdentity => Ok(x.clone()),
            SystemKind::OtwFull => unreachable!(),
        }
    }

    /// The inverse branch `g_r`, defined on the branch image inside `D^inf`;
    /// `Infinity` is accepted where the image contains it and stands for the
    /// compactified-away point.
    pub fn inverse(&self, y: &Point) -> Result<Point> {
        if !self.image_contains(y) {
            return Err(Error::NotInImage(format!(
                "{y} not in branch {} image of {}",
                self.index, self.system.kind
            )));
        }
        match self.system.kind {
            SystemKind::Vls | SystemKind::Frm => {
                let rep = match y {
                    Point::Cantor(c) => c.clone(),
                    Point::Infinity => self.system.base.excluded().unwrap().clone(),
                    _ => unreachable!(),
                };
                let prefix = match self.system.kind {
                    // g_n(y) = 1^n 0 y
                    SystemKind::Vls => Bits::run_then_flip(true, self.index as usize),
                    // g_k(y) = 0 1^k y
                    _ => {
                        let mut w = vec![false];
                        w.extend(std::iter::repeat(true).take(self.index as usize));
                        Bits::new(w)
                    }
                };
                Ok(Point::Cantor(rep.prepend(&prefix)))
            }
            SystemKind::Halving | SystemKind::NatIdentity => Ok(Point::Nat(u64::from(self.index))),
            SystemKind::OtwFull => unreachable!(),
        }
    }

    /// Exact per-branch contraction exponent, where one exists: prefixing by
    /// `n+1` symbols shifts the first disagreement by exactly `n+1`.
    pub fn exact_gain(&self) -> Option<u32> {
        match self.system.kind {
            SystemKind::Vls | SystemKind::Frm => Some(self.index + 1),
            _ => None,
        }
    }

    /// Observed level gain of the inverse branch on a pair, `None` when
    /// either distance is zero.
    pub fn inverse_gain(&self, a: &Point, b: &Point) -> Result<Option<u32>> {
        let la = self.system.base.point_distance(a, b)?;
        let ga = self.inverse(a)?;
        let gb = self.inverse(b)?;
        let lg = self.system.base.point_distance(&ga, &gb)?;
        Ok(match (la, lg) {
            (Level::Finite(x), Level::Finite(y)) => Some(y - x),
            _ => None,
        })
    }
}

fn halving_forward(n: u64) -> u64 {
    if n % 2 == 1 {
        1
    } else {
        n / 2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(pre: &str, per: &str) -> Point {
        Point::cantor(pre, per)
    }

    #[test]
    fn vls_applies_variable_length_shift() {
        let sys = DrSystem::new(SystemKind::Vls);
        // x = 110 0* in W_2, f = sigma^3
        assert_eq!(sys.apply(&pt("110", "0")).unwrap(), pt("", "0"));
        assert_eq!(sys.branch_of(&pt("10", "0")).unwrap().index(), 1);
        // the forward image may be the compactified-away point
        assert_eq!(sys.apply(&pt("10", "1")).unwrap(), Point::Infinity);
        assert!(sys.apply(&Point::Infinity).is_err());
    }

    #[test]
    fn frm_return_time_and_apply() {
        let sys = DrSystem::new(SystemKind::Frm);
        let x = Point::cantor("01110", "01");
        assert_eq!(sys.return_time(x.as_cantor().unwrap()).unwrap(), 4);
        assert_eq!(sys.apply(&x).unwrap(), pt("0", "01"));
        assert_eq!(
            sys.return_time(Point::cantor("00", "0").as_cantor().unwrap()).unwrap(),
            1
        );
        assert!(sys
            .return_time(Point::cantor("0", "1").as_cantor().unwrap())
            .is_err());
        // branch of 00 1* is branch 0 with domain Z(00)
        let b = sys.branch_of(&pt("00", "1")).unwrap();
        assert_eq!(b.index(), 0);
        assert_eq!(b.domain().to_string(), "Z(00)");
    }

    #[test]
    fn halving_map_values() {
        let sys = DrSystem::new(SystemKind::Halving);
        assert_eq!(sys.apply(&Point::Nat(7)).unwrap(), Point::Nat(1));
        assert_eq!(sys.apply(&Point::Nat(6)).unwrap(), Point::Nat(3));
        let b = sys.branch_of(&Point::Nat(9)).unwrap();
        assert_eq!(b.index(), 9);
        assert_eq!(b.inverse(&Point::Nat(1)).unwrap(), Point::Nat(9));
        assert!(b.inverse(&Point::Nat(2)).is_err());
    }

    #[test]
    fn inverse_branches_prepend() {
        let vls = DrSystem::new(SystemKind::Vls);
        let g2 = vls.branch(2).unwrap();
        assert_eq!(g2.inverse(&pt("0", "1")).unwrap(), pt("1100", "1"));
        assert_eq!(
            g2.forward(&g2.inverse(&pt("0", "1")).unwrap()).unwrap(),
            pt("0", "1")
        );
        // g_n at the added point: 1^n 0 1^inf is an ordinary domain point
        assert_eq!(g2.inverse(&Point::Infinity).unwrap(), pt("110", "1"));

        let frm = DrSystem::new(SystemKind::Frm);
        let g1 = frm.branch(1).unwrap();
        assert_eq!(g1.inverse(&pt("0", "0")).unwrap(), pt("010", "0"));
    }

    #[test]
    fn exact_gain_matches_prefix_length() {
        let vls = DrSystem::new(SystemKind::Vls);
        for n in 0..4 {
            let b = vls.branch(n).unwrap();
            let a = pt("0110", "10");
            let c = pt("0111", "10");
            assert_eq!(b.inverse_gain(&a, &c).unwrap(), Some(n + 1));
        }
    }
}
