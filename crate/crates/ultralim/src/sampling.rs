//! Deterministic samplers for points, words and shift points. All
//! randomness flows through caller-provided `ChaCha8Rng` instances seeded
//! from explicit seeds, so every probe and suite is reproducible.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::bits::Bits;
use crate::eventually::EpSeq;
use crate::invlim::ShiftPoint;
use crate::point::{CantorPoint, Point};
use crate::space::BaseSpace;
use crate::systems::{DrSystem, SystemKind};
use crate::words::W0Word;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_bits(rng: &mut ChaCha8Rng, len: usize) -> Bits {
    Bits::new((0..len).map(|_| rng.gen_bool(0.5)).collect())
}

/// A random eventually periodic point with short preperiod and period.
pub fn cantor_point(rng: &mut ChaCha8Rng) -> CantorPoint {
    let pre_len = rng.gen_range(0..=6);
    let per_len = rng.gen_range(1..=4);
    CantorPoint::new(random_bits(rng, pre_len), random_bits(rng, per_len))
}

/// A random point whose period contains a zero, so that no forward shift
/// iterate ever equals an all-ones tail. Orbits of such points stay inside
/// the domains of both Cantor systems.
pub fn orbit_safe_cantor_point(rng: &mut ChaCha8Rng) -> CantorPoint {
    let pre_len = rng.gen_range(0..=6);
    let per_len = rng.gen_range(1..=4);
    let mut per = random_bits(rng, per_len).as_slice().to_vec();
    per[rng.gen_range(0..per_len)] = false;
    CantorPoint::new(random_bits(rng, pre_len), Bits::new(per))
}

/// A random point of the space (never the added point).
pub fn space_point(rng: &mut ChaCha8Rng, space: &BaseSpace) -> Point {
    match space {
        BaseSpace::NatDiscrete => Point::Nat(rng.gen_range(0..=24)),
        BaseSpace::CantorFull => Point::Cantor(cantor_point(rng)),
        BaseSpace::CantorMinusPoint(p) => loop {
            let c = cantor_point(rng);
            if &c != p {
                return Point::Cantor(c);
            }
        },
    }
}

/// A random point of the one-point compactification (occasionally the
/// added point itself).
pub fn compactified_point(rng: &mut ChaCha8Rng, space: &BaseSpace) -> Point {
    if space.has_infinity() && rng.gen_ratio(1, 12) {
        Point::Infinity
    } else {
        space_point(rng, space)
    }
}

/// A random point of the system domain whose forward orbit stays away from
/// the added point (periods always contain a zero; for `frm` the leading
/// block is `0 1^k 0`).
pub fn domain_point(rng: &mut ChaCha8Rng, sys: &DrSystem) -> Point {
    match sys.kind() {
        SystemKind::Vls => Point::Cantor(orbit_safe_cantor_point(rng)),
        SystemKind::Frm => {
            let k = rng.gen_range(0..=3);
            let mut prefix = vec![false];
            prefix.extend(std::iter::repeat(true).take(k));
            prefix.push(false);
            Point::Cantor(orbit_safe_cantor_point(rng).prepend(&Bits::new(prefix)))
        }
        SystemKind::Halving | SystemKind::NatIdentity => Point::Nat(rng.gen_range(0..=24)),
        SystemKind::OtwFull => panic!("otw-full has no point domain"),
    }
}

/// A random point of the image of the given branch, possibly the added
/// point when the image contains it.
pub fn branch_image_point(rng: &mut ChaCha8Rng, sys: &DrSystem, branch_index: u32) -> Point {
    let branch = sys.branch(branch_index).expect("point atlas");
    // the compactified-away point is always denoted Infinity, never by its
    // removed representative
    let canonical = |sys: &DrSystem, c: crate::point::CantorPoint| -> Point {
        match sys.base().excluded() {
            Some(p) if &c == p => Point::Infinity,
            _ => Point::Cantor(c),
        }
    };
    match sys.kind() {
        SystemKind::Vls => {
            if rng.gen_ratio(1, 10) {
                Point::Infinity
            } else {
                canonical(sys, cantor_point(rng))
            }
        }
        SystemKind::Frm => {
            if rng.gen_ratio(1, 10) {
                Point::Infinity
            } else {
                canonical(sys, cantor_point(rng).prepend(&Bits::parse("0").unwrap()))
            }
        }
        // singleton branches have a one-point image
        _ => branch.forward(&Point::Nat(u64::from(branch_index))).expect("domain point"),
    }
}

/// A random eventually periodic branch stream for the Cantor systems.
pub fn branch_stream(rng: &mut ChaCha8Rng, max_index: u32) -> EpSeq<u32> {
    let pre_len = rng.gen_range(0..=3);
    let per_len = rng.gen_range(1..=3);
    let pre: Vec<u32> = (0..pre_len).map(|_| rng.gen_range(0..=max_index)).collect();
    let per: Vec<u32> = (0..per_len).map(|_| rng.gen_range(0..=max_index)).collect();
    EpSeq::new(pre, per)
}

/// A random element of the inverse limit of the system. All sampled points
/// lie in the shift image (their first coordinate maps back into the
/// domain), so the prefixing map is defined on every sample of positive
/// length.
pub fn shift_point(rng: &mut ChaCha8Rng, sys: &DrSystem) -> ShiftPoint {
    match sys.kind() {
        SystemKind::Vls | SystemKind::Frm => {
            if rng.gen_ratio(1, 3) {
                // a finite backward path: each further coordinate is an
                // inverse-branch preimage of the one before it
                let len = rng.gen_range(1..=4);
                let mut coords = vec![domain_point(rng, sys)];
                for _ in 1..len {
                    let b = sys.branch(rng.gen_range(0..=3)).unwrap();
                    let deeper = b.inverse(coords.last().unwrap()).unwrap();
                    coords.push(deeper);
                }
                ShiftPoint::fin(sys, W0Word::finite(coords)).expect("backward path by construction")
            } else {
                let seed = domain_point(rng, sys);
                ShiftPoint::backward_path(sys, seed, branch_stream(rng, 4)).expect("full images")
            }
        }
        SystemKind::Halving => {
            if rng.gen_ratio(1, 2) {
                let len = rng.gen_range(1..=4);
                ShiftPoint::fin(sys, W0Word::finite(vec![Point::Nat(1); len])).unwrap()
            } else {
                ShiftPoint::backward_path(sys, Point::Nat(1), EpSeq::constant(1)).unwrap()
            }
        }
        SystemKind::NatIdentity => {
            let n = rng.gen_range(0..=24u64);
            ShiftPoint::backward_path(sys, Point::Nat(n), EpSeq::constant(n as u32)).unwrap()
        }
        SystemKind::OtwFull => panic!("otw-full has no point-level inverse limit"),
    }
}

/// The frozen word pool over the `vls` base space used by the word-space
/// ultrametric suite. Coordinates come from a two-point set diverging at
/// bit 1, so every distinct pair of pool words is separated by a tuple of
/// small enumeration index (asserted, with bound 1000, by the suite).
pub fn w0_pool_cantor() -> (BaseSpace, Vec<W0Word>) {
    let sys = DrSystem::new(SystemKind::Vls);
    let space = sys.base().clone();
    let p = Point::cantor("", "0");
    let q = Point::cantor("01", "0");
    let coords = [p.clone(), q.clone()];
    let mut pool = vec![W0Word::Zero];
    for a in &coords {
        pool.push(W0Word::finite(vec![a.clone()]));
        for b in &coords {
            pool.push(W0Word::finite(vec![a.clone(), b.clone()]));
            for c in &coords {
                pool.push(W0Word::finite(vec![a.clone(), b.clone(), c.clone()]));
            }
        }
    }
    // eventually periodic coordinate generators, pairwise split in the
    // first two coordinates
    pool.push(W0Word::periodic(vec![], vec![p.clone()]));
    pool.push(W0Word::periodic(vec![], vec![q.clone()]));
    pool.push(W0Word::periodic(vec![p.clone()], vec![q.clone()]));
    pool.push(W0Word::periodic(vec![q.clone()], vec![p.clone()]));
    // backward paths over vls; the (0)* path seeded at 0^inf normalizes to
    // the constant periodic word, exercising cross-kind equality
    for seed in [&p, &q] {
        for stream in [
            EpSeq::constant(0),
            EpSeq::new(vec![1], vec![0]),
            EpSeq::new(vec![], vec![0, 1]),
        ] {
            let w = W0Word::backward_path(
                crate::invlim::BackwardPathGen::new(sys.clone(), seed.clone(), stream).unwrap(),
            );
            pool.push(w);
        }
    }
    (space, pool)
}

/// The frozen word pool over discrete `N` for the ultrametric suite.
pub fn w0_pool_nat() -> (BaseSpace, Vec<W0Word>) {
    let space = BaseSpace::NatDiscrete;
    let mut pool = vec![W0Word::Zero];
    for a in 0..=2u64 {
        pool.push(W0Word::finite(vec![Point::Nat(a)]));
        for b in 0..=2u64 {
            pool.push(W0Word::finite(vec![Point::Nat(a), Point::Nat(b)]));
        }
    }
    pool.push(W0Word::periodic(vec![], vec![Point::Nat(0)]));
    pool.push(W0Word::periodic(vec![], vec![Point::Nat(1)]));
    (space, pool)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samplers_are_deterministic() {
        let sys = DrSystem::new(SystemKind::Frm);
        let a: Vec<Point> =
            (0..10).scan(rng_from_seed(7), |r, _| Some(domain_point(r, &sys))).collect();
        let b: Vec<Point> =
            (0..10).scan(rng_from_seed(7), |r, _| Some(domain_point(r, &sys))).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn domain_points_have_safe_orbits() {
        for kind in [SystemKind::Vls, SystemKind::Frm] {
            let sys = DrSystem::new(kind);
            let mut rng = rng_from_seed(11);
            for _ in 0..50 {
                let mut x = domain_point(&mut rng, &sys);
                for _ in 0..8 {
                    assert!(sys.domain_contains(&x), "{x} left the domain of {kind}");
                    x = sys.apply(&x).unwrap();
                }
            }
        }
    }

    #[test]
    fn pools_have_distinct_entries_up_to_duplicates() {
        let (_, pool) = w0_pool_cantor();
        assert!(pool.len() > 20);
        let (_, nat_pool) = w0_pool_nat();
        assert!(nat_pool.len() == 15);
    }
}
