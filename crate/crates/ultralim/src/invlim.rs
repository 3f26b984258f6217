use std::fmt;

use crate::error::{Error, Result};
use crate::eventually::EpSeq;
use crate::point::Point;
use crate::systems::{DrSystem, SystemKind};
use crate::words::{W0Distance, W0Word, WordLen};

/// Eager validation depth for backward-path construction. For the two
/// Cantor systems every branch image is the whole compactification, so any
/// stream is composable; for the singleton-branch systems composability is
/// a condition on consecutive stream entries, and one full period plus the
/// wraparound pair covers every pattern. The constructor checks to
/// `max(32, |pre| + |per| + 1)`, which includes that wraparound.
const PATH_VALIDATION_DEPTH: usize = 32;

/// A finitely described infinite backward path: coordinate 1 is the seed and
/// coordinate `t+1` is the inverse branch `stream[t]` applied to coordinate
/// `t`, so consecutive coordinates satisfy the backward-orbit law. The
/// branch stream is eventually periodic and kept in canonical form, which
/// together with the seed decides path equality (branch domains are pairwise
/// disjoint, so equal coordinate sequences force equal streams).
#[derive(Debug, Clone)]
pub struct BackwardPathGen {
    system: DrSystem,
    seed: Point,
    stream: EpSeq<u32>,
}

impl BackwardPathGen {
    pub fn new(system: DrSystem, seed: Point, stream: EpSeq<u32>) -> Result<Self> {
        if !system.domain_contains(&seed) {
            return Err(Error::NotInDomain(format!("seed {seed} in {system}")));
        }
        let gen = BackwardPathGen { system, seed, stream };
        let depth = PATH_VALIDATION_DEPTH
            .max(gen.stream.pre().len() + gen.stream.per().len() + 1);
        let mut current = gen.seed.clone();
        for t in 0..depth {
            let branch = gen.system.branch(*gen.stream.get(t))?;
            current = branch.inverse(&current).map_err(|_| {
                Error::InvalidBackwardPath(format!(
                    "coordinate {} is not in the image of branch {}",
                    t + 1,
                    gen.stream.get(t)
                ))
            })?;
        }
        Ok(gen)
    }

    pub fn system(&self) -> &DrSystem {
        &self.system
    }

    pub fn seed(&self) -> &Point {
        &self.seed
    }

    pub fn stream(&self) -> &EpSeq<u32> {
        &self.stream
    }

    /// 1-based coordinate. Evaluation is re-entrant: each call folds the
    /// inverse branches from the seed with no shared cursor.
    pub fn coordinate(&self, t: usize) -> Point {
        assert!(t >= 1);
        let mut current = self.seed.clone();
        for i in 0..t - 1 {
            let branch = self.system.branch(*self.stream.get(i)).expect("validated");
            current = branch.inverse(&current).expect("validated stream");
        }
        current
    }

    pub fn coordinates_upto(&self, t: usize) -> Vec<Point> {
        let mut out = Vec::with_capacity(t);
        let mut current = self.seed.clone();
        out.push(current.clone());
        for i in 0..t.saturating_sub(1) {
            let branch = self.system.branch(*self.stream.get(i)).expect("validated");
            current = branch.inverse(&current).expect("validated stream");
            out.push(current.clone());
        }
        out
    }

    /// The tail path: seed moves to coordinate 2, stream advances by one.
    pub fn advance(&self) -> Result<Self> {
        let branch = self.system.branch(*self.stream.get(0))?;
        let seed = branch.inverse(&self.seed)?;
        Ok(BackwardPathGen {
            system: self.system.clone(),
            seed,
            stream: self.stream.shifted(1),
        })
    }

    /// The prefixed path `f(x_1) x`: requires `f(seed)` to stay in the
    /// domain, i.e. the path to lie in the shift image.
    pub fn prepend_forward(&self) -> Result<Self> {
        let branch = self.system.branch_of(&self.seed)?;
        let seed = branch.forward(&self.seed)?;
        if !self.system.domain_contains(&seed) {
            return Err(Error::NotInDomain(format!(
                "f({}) leaves the domain, path is not in the shift image",
                self.seed
            )));
        }
        Ok(BackwardPathGen {
            system: self.system.clone(),
            seed,
            stream: self.stream.prepended(&[branch.index()]),
        })
    }

    /// Same infinite path: same system kind, seed and canonical stream.
    pub fn same_path(&self, other: &Self) -> bool {
        self.system.kind() == other.system.kind()
            && self.seed == other.seed
            && self.stream == other.stream
    }

    /// Detects an eventually periodic coordinate sequence. Coordinates are
    /// eventually periodic iff the first stream-aligned coordinate is fixed
    /// by the inverse-branch block of one stream period; aligned recurrence
    /// anywhere else would propagate back to this position because the
    /// forward map is deterministic.
    pub fn detect_periodic(&self) -> Option<EpSeq<Point>> {
        let pre_len = self.stream.pre().len();
        let period = self.stream.per().len();
        let coords = self.coordinates_upto(pre_len + period + 1);
        if coords[pre_len] == coords[pre_len + period] {
            Some(EpSeq::new(
                coords[..pre_len].to_vec(),
                coords[pre_len..pre_len + period].to_vec(),
            ))
        } else {
            None
        }
    }
}

impl fmt::Display for BackwardPathGen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[u32]| v.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",");
        write!(
            f,
            "inf({};{}({})*)",
            self.seed,
            join(self.stream.pre()),
            join(self.stream.per())
        )
    }
}

/// A word of finite length known to lie in the limit part of the inverse
/// limit, validated against the closed-form description of the bundled
/// system it belongs to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LimitWord {
    word: W0Word,
}

impl LimitWord {
    pub fn new(system: &DrSystem, word: W0Word) -> Result<Self> {
        match word.len() {
            WordLen::Infinite => {
                return Err(Error::NotALimitWord("limit words have finite length".into()))
            }
            WordLen::Finite(0) => return Ok(LimitWord { word: W0Word::Zero }),
            WordLen::Finite(_) => {}
        }
        let coords: Vec<Point> = match &word {
            W0Word::Finite(v) => v.clone(),
            _ => unreachable!("finite positive length"),
        };
        match system.kind() {
            SystemKind::Vls | SystemKind::Frm => {
                // every finite backward path is a limit of infinite ones:
                // deep inverse branches escape to the added point
                for x in &coords {
                    if !system.domain_contains(x) {
                        return Err(Error::NotALimitWord(format!("{x} is not in the domain")));
                    }
                }
                for i in 0..coords.len() - 1 {
                    if system.apply(&coords[i + 1])? != coords[i] {
                        return Err(Error::NotALimitWord(format!(
                            "not a backward path at coordinate {}",
                            i + 1
                        )));
                    }
                }
            }
            SystemKind::Halving => {
                if !coords.iter().all(|p| p == &Point::Nat(1)) {
                    return Err(Error::NotALimitWord(
                        "halving limit words are the all-ones words".into(),
                    ));
                }
            }
            SystemKind::NatIdentity => {
                return Err(Error::NotALimitWord(
                    "nat-identity has no limit words of positive length".into(),
                ));
            }
            SystemKind::OtwFull => {
                return Err(Error::UnsupportedSystem("otw-full".into()));
            }
        }
        Ok(LimitWord { word })
    }

    pub fn word(&self) -> &W0Word {
        &self.word
    }
}

/// An element of the inverse-limit space: an infinite backward path or a
/// finite limit word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ShiftPoint {
    Fin(LimitWord),
    Inf(BackwardPathGen),
}

impl PartialEq for BackwardPathGen {
    fn eq(&self, other: &Self) -> bool {
        self.same_path(other)
    }
}

impl Eq for BackwardPathGen {}

impl ShiftPoint {
    pub fn zero() -> Self {
        ShiftPoint::Fin(LimitWord { word: W0Word::Zero })
    }

    pub fn fin(system: &DrSystem, word: W0Word) -> Result<Self> {
        Ok(ShiftPoint::Fin(LimitWord::new(system, word)?))
    }

    pub fn backward_path(system: &DrSystem, seed: Point, stream: EpSeq<u32>) -> Result<Self> {
        Ok(ShiftPoint::Inf(BackwardPathGen::new(system.clone(), seed, stream)?))
    }

    pub fn len(&self) -> WordLen {
        match self {
            ShiftPoint::Fin(lw) => lw.word.len(),
            ShiftPoint::Inf(_) => WordLen::Infinite,
        }
    }

    /// The underlying word of the compactified word space over the domain.
    pub fn to_word(&self) -> W0Word {
        match self {
            ShiftPoint::Fin(lw) => lw.word.clone(),
            ShiftPoint::Inf(gen) => W0Word::backward_path(gen.clone()),
        }
    }

    /// The `t`-th coordinate with the projection convention: the added
    /// point when `t` exceeds the length.
    pub fn coordinate(&self, t: usize) -> Point {
        match self {
            ShiftPoint::Fin(lw) => lw.word.coord(t).unwrap_or(Point::Infinity),
            ShiftPoint::Inf(gen) => gen.coordinate(t),
        }
    }

    /// Literals: `zero`, `fin[p1; p2]`, `inf(<seed>;<pre>(<per>)*)`.
    pub fn parse(system: &DrSystem, s: &str) -> Result<ShiftPoint> {
        let s = s.trim();
        if s == "zero" {
            return Ok(ShiftPoint::zero());
        }
        if let Some(body) = s.strip_prefix("fin") {
            let word = W0Word::parse(body)?;
            return ShiftPoint::fin(system, word);
        }
        let body = s
            .strip_prefix("inf(")
            .and_then(|t| t.strip_suffix(')'))
            .ok_or_else(|| Error::Parse(format!("invalid shift-point literal {s:?}")))?;
        let semi = body
            .find(';')
            .ok_or_else(|| Error::Parse(format!("missing ';' in {s:?}")))?;
        let seed = Point::parse(&body[..semi])?;
        let stream = &body[semi + 1..];
        let rest = stream
            .strip_suffix(")*")
            .ok_or_else(|| Error::Parse(format!("missing '(...)*' in {s:?}")))?;
        let open = rest
            .rfind('(')
            .ok_or_else(|| Error::Parse(format!("missing '(' in {s:?}")))?;
        let parse_indices = |t: &str| -> Result<Vec<u32>> {
            let t = t.trim();
            if t.is_empty() {
                return Ok(Vec::new());
            }
            t.split(',')
                .map(|p| {
                    p.trim()
                        .parse::<u32>()
                        .map_err(|_| Error::Parse(format!("invalid branch index {p:?}")))
                })
                .collect()
        };
        let pre = parse_indices(&rest[..open])?;
        let per = parse_indices(&rest[open + 1..])?;
        if per.is_empty() {
            return Err(Error::Parse(format!("empty branch period in {s:?}")));
        }
        ShiftPoint::backward_path(system, seed, EpSeq::new(pre, per))
    }
}

impl fmt::Display for ShiftPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ShiftPoint::Fin(lw) => match &lw.word {
                W0Word::Zero => write!(f, "zero"),
                w => write!(f, "fin{w}"),
            },
            ShiftPoint::Inf(gen) => write!(f, "{gen}"),
        }
    }
}

/// The `t`-th coordinate projection with the added-point convention for
/// short words.
pub fn path_coordinate(p: &ShiftPoint, t: usize) -> Point {
    p.coordinate(t)
}

/// The tail shift of the inverse limit; defined on words of length `>= 1`
/// and sending length-1 words to the zero word.
pub fn sigma(system: &DrSystem, p: &ShiftPoint) -> Result<ShiftPoint> {
    match p {
        ShiftPoint::Fin(lw) => match &lw.word {
            W0Word::Zero => Err(Error::ZeroWordNotInDomain),
            w => Ok(ShiftPoint::Fin(LimitWord { word: w.tail()? })),
        },
        ShiftPoint::Inf(gen) => {
            debug_assert_eq!(gen.system().kind(), system.kind());
            Ok(ShiftPoint::Inf(gen.advance()?))
        }
    }
}

/// The restriction of the tail shift to words of length `>= 2`; mutually
/// inverse with the prefixing map.
pub fn sigma_hat(system: &DrSystem, p: &ShiftPoint) -> Result<ShiftPoint> {
    if !p.len().at_least(2) {
        return Err(Error::LengthBelowTwo);
    }
    sigma(system, p)
}

/// The prefixing map `y -> f(y_1) y`. Defined on the shift image minus the
/// zero word; for a word whose first coordinate maps outside the domain the
/// prefix would be the added point, and the map correctly rejects it.
pub fn alpha_f(system: &DrSystem, p: &ShiftPoint) -> Result<ShiftPoint> {
    match p {
        ShiftPoint::Fin(lw) => match &lw.word {
            W0Word::Zero => Err(Error::ZeroWordNotInDomain),
            W0Word::Finite(v) => {
                let fx = system.apply(&v[0])?;
                if fx.is_infinity() {
                    return Err(Error::NotInDomain(format!(
                        "f({}) leaves the domain, word is not in the shift image",
                        v[0]
                    )));
                }
                let mut coords = vec![fx];
                coords.extend_from_slice(v);
                Ok(ShiftPoint::Fin(LimitWord { word: W0Word::Finite(coords) }))
            }
            W0Word::Infinite(_) => unreachable!("limit words are finite"),
        },
        ShiftPoint::Inf(gen) => {
            debug_assert_eq!(gen.system().kind(), system.kind());
            Ok(ShiftPoint::Inf(gen.prepend_forward()?))
        }
    }
}

/// The inverse-limit ultrametric, computed as the word-space distance over
/// the basis of the domain.
pub fn xtilde_distance(
    system: &DrSystem,
    p: &ShiftPoint,
    q: &ShiftPoint,
    bound: u64,
) -> W0Distance {
    crate::words::w0_distance(system.base(), &p.to_word(), &q.to_word(), bound)
}

/// Closed-form shape of the limit part of the inverse limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DLimClosedForm {
    /// the zero word and every finite backward path: deep inverse branches
    /// escape to the added point, so every finite path extends to a
    /// convergent family of infinite ones
    AllFiniteBackwardPaths,
    /// the zero word and the all-ones words
    AllOnesWords,
    /// only the zero word
    ZeroOnly,
}

impl fmt::Display for DLimClosedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DLimClosedForm::AllFiniteBackwardPaths => {
                write!(f, "Zero and every finite backward path")
            }
            DLimClosedForm::AllOnesWords => write!(f, "Zero and the words (1), (1,1), ..."),
            DLimClosedForm::ZeroOnly => write!(f, "Zero only"),
        }
    }
}

/// Closed-form description of the limit words of a bundled system together
/// with distinguished members and their convergence witness families.
#[derive(Debug, Clone)]
pub struct DLimDescription {
    pub system: crate::systems::SystemKind,
    pub closed_form: DLimClosedForm,
    pub members: Vec<(W0Word, crate::convergence::WitnessFamily)>,
}

/// The closed-form description of the limit words for a bundled system.
pub fn limit_words(system: &DrSystem) -> Result<DLimDescription> {
    use crate::convergence::{tower_limit_point, WitnessFamily};
    let kind = system.kind();
    match kind {
        SystemKind::Halving => Ok(DLimDescription {
            system: kind,
            closed_form: DLimClosedForm::AllOnesWords,
            members: (0..=3)
                .map(|ones| {
                    let word = if ones == 0 {
                        W0Word::Zero
                    } else {
                        W0Word::finite(vec![Point::Nat(1); ones as usize])
                    };
                    (word, WitnessFamily::HalvingOnes { ones })
                })
                .collect(),
        }),
        SystemKind::NatIdentity => Ok(DLimDescription {
            system: kind,
            closed_form: DLimClosedForm::ZeroOnly,
            members: vec![(W0Word::Zero, WitnessFamily::NatSeedTower)],
        }),
        SystemKind::Vls | SystemKind::Frm => {
            let w = tower_limit_point(kind)?;
            Ok(DLimDescription {
                system: kind,
                closed_form: DLimClosedForm::AllFiniteBackwardPaths,
                members: vec![
                    (
                        W0Word::finite(vec![w]),
                        WitnessFamily::BranchTower { kind, lead: 0 },
                    ),
                    (W0Word::Zero, WitnessFamily::BranchTower { kind, lead: 1 }),
                ],
            })
        }
        SystemKind::OtwFull => Err(Error::UnsupportedSystem(
            "no closed-form limit description for otw-full".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::SystemKind;

    fn vls() -> DrSystem {
        DrSystem::new(SystemKind::Vls)
    }

    fn pt(pre: &str, per: &str) -> Point {
        Point::cantor(pre, per)
    }

    #[test]
    fn path_coordinates_follow_inverse_branches() {
        let sys = vls();
        let p = ShiftPoint::backward_path(&sys, pt("0", "0"), EpSeq::constant(0)).unwrap();
        assert_eq!(p.coordinate(1), pt("0", "0"));
        assert_eq!(p.coordinate(2), pt("00", "0"));
        // backward-path law: f(x_{t+1}) = x_t
        for t in 1..=16 {
            assert_eq!(sys.apply(&p.coordinate(t + 1)).unwrap(), p.coordinate(t));
        }
    }

    #[test]
    fn fin_words_project_with_infinity_padding() {
        let sys = vls();
        let w = ShiftPoint::fin(&sys, W0Word::finite(vec![pt("10", "0")])).unwrap();
        assert_eq!(w.coordinate(1), pt("10", "0"));
        assert_eq!(w.coordinate(2), Point::Infinity);
    }

    #[test]
    fn sigma_and_alpha_are_mutually_inverse() {
        let sys = vls();
        let p = ShiftPoint::backward_path(
            &sys,
            pt("01", "0"),
            EpSeq::new(vec![2], vec![1, 0]),
        )
        .unwrap();
        let up = alpha_f(&sys, &p).unwrap();
        assert_eq!(sigma_hat(&sys, &up).unwrap(), p);
        let down = sigma_hat(&sys, &p).unwrap();
        assert_eq!(alpha_f(&sys, &down).unwrap(), p);

        // on finite words
        let w = ShiftPoint::fin(
            &sys,
            W0Word::finite(vec![sys.apply(&pt("010", "0")).unwrap(), pt("010", "0")]),
        )
        .unwrap();
        assert_eq!(alpha_f(&sys, &sigma_hat(&sys, &w).unwrap()).unwrap(), w);
        assert_eq!(
            sigma(&sys, &ShiftPoint::fin(&sys, W0Word::finite(vec![pt("0", "0")])).unwrap())
                .unwrap(),
            ShiftPoint::zero()
        );
    }

    #[test]
    fn alpha_rejects_zero_and_off_image_words() {
        let sys = vls();
        assert_eq!(alpha_f(&sys, &ShiftPoint::zero()), Err(Error::ZeroWordNotInDomain));
        // f(1 0 1*) = 1* leaves the domain, so [1 0 1*] is not in the shift image
        let w = ShiftPoint::fin(&sys, W0Word::finite(vec![pt("10", "1")])).unwrap();
        assert!(matches!(alpha_f(&sys, &w), Err(Error::NotInDomain(_))));
    }

    #[test]
    fn halving_paths_are_constrained() {
        let sys = DrSystem::new(SystemKind::Halving);
        // the all-ones backward path exists
        let p = ShiftPoint::backward_path(&sys, Point::Nat(1), EpSeq::constant(1)).unwrap();
        assert_eq!(p.coordinate(5), Point::Nat(1));
        // a stream whose branch image misses the coordinate is rejected
        assert!(ShiftPoint::backward_path(&sys, Point::Nat(1), EpSeq::constant(3)).is_err());
        // limit words are the all-ones words
        assert!(ShiftPoint::fin(&sys, W0Word::finite(vec![Point::Nat(1), Point::Nat(1)])).is_ok());
        assert!(ShiftPoint::fin(&sys, W0Word::finite(vec![Point::Nat(2)])).is_err());
    }

    #[test]
    fn detect_periodic_identifies_fixed_paths() {
        let sys = vls();
        // g_0 fixes 0^inf, so the path is the constant word
        let gen =
            BackwardPathGen::new(sys.clone(), pt("", "0"), EpSeq::constant(0)).unwrap();
        let eps = gen.detect_periodic().expect("constant path is periodic");
        assert_eq!(eps.pre().len(), 0);
        assert_eq!(eps.per(), &[pt("", "0")][..]);
        // a growing path is not eventually periodic
        let gen =
            BackwardPathGen::new(sys.clone(), pt("01", "0"), EpSeq::constant(0)).unwrap();
        assert!(gen.detect_periodic().is_none());
        // word-level equality identifies the two presentations
        let w1 = W0Word::backward_path(
            BackwardPathGen::new(sys.clone(), pt("", "0"), EpSeq::constant(0)).unwrap(),
        );
        let w2 = W0Word::periodic(vec![], vec![pt("", "0")]);
        assert_eq!(w1, w2);
    }

    #[test]
    fn shift_point_literals_roundtrip() {
        let sys = vls();
        for s in ["zero", "fin[10(0)*]", "inf(0(0)*;2,1(0)*)", "inf(01(0)*;(1,0)*)"] {
            let p = ShiftPoint::parse(&sys, s).unwrap();
            assert_eq!(ShiftPoint::parse(&sys, &p.to_string()).unwrap(), p);
        }
    }
}
