/// Eventually periodic sequences `pre . per per per ...` over an arbitrary
/// element type, in a unique canonical form:
///
/// * the period is primitive (not a power of a shorter block), and
/// * the preperiod is minimal (empty, or its last entry differs from the last
///   entry of the period).
///
/// Minimality is obtained by rolling: while the preperiod ends with the same
/// entry as the period, strip it and rotate the period right by one. Rolling
/// preserves primitivity (rotations of a primitive block are primitive), so
/// two canonical forms describe the same sequence iff they are structurally
/// equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EpSeq<T> {
    pre: Vec<T>,
    per: Vec<T>,
}

impl<T: Clone + Eq> EpSeq<T> {
    /// Builds the canonical form. `per` must be nonempty.
    pub fn new(pre: Vec<T>, per: Vec<T>) -> Self {
        assert!(!per.is_empty(), "period must be nonempty");
        let mut s = EpSeq { pre, per };
        s.canonicalize();
        s
    }

    pub fn constant(value: T) -> Self {
        EpSeq { pre: Vec::new(), per: vec![value] }
    }

    pub fn pre(&self) -> &[T] {
        &self.pre
    }

    pub fn per(&self) -> &[T] {
        &self.per
    }

    pub fn get(&self, i: usize) -> &T {
        if i < self.pre.len() {
            &self.pre[i]
        } else {
            &self.per[(i - self.pre.len()) % self.per.len()]
        }
    }

    /// Drops the first `k` entries.
    pub fn shifted(&self, k: usize) -> Self {
        if k <= self.pre.len() {
            EpSeq::new(self.pre[k..].to_vec(), self.per.clone())
        } else {
            let offset = (k - self.pre.len()) % self.per.len();
            let mut per = self.per.clone();
            per.rotate_left(offset);
            EpSeq::new(Vec::new(), per)
        }
    }

    /// Prefixes the sequence with `front`.
    pub fn prepended(&self, front: &[T]) -> Self {
        let mut pre = front.to_vec();
        pre.extend_from_slice(&self.pre);
        EpSeq::new(pre, self.per.clone())
    }

    /// Smallest index at which the two sequences differ, or `None` if they
    /// are equal. The scan window `max(|pre|) + lcm(|per|)` is exhaustive:
    /// beyond the preperiods both sequences are periodic with the common
    /// period, so agreement on one full window implies agreement everywhere.
    pub fn first_disagreement(&self, other: &Self) -> Option<usize> {
        let start = self.pre.len().max(other.pre.len());
        let window = lcm(self.per.len(), other.per.len());
        for i in 0..start + window {
            if self.get(i) != other.get(i) {
                return Some(i);
            }
        }
        None
    }

    fn canonicalize(&mut self) {
        // primitive root of the period
        let n = self.per.len();
        for d in 1..=n {
            if n % d == 0 && (0..n).all(|i| self.per[i] == self.per[i % d]) {
                self.per.truncate(d);
                break;
            }
        }
        // minimal preperiod
        while let Some(last) = self.pre.last() {
            if last == self.per.last().expect("nonempty period") {
                self.pre.pop();
                self.per.rotate_right(1);
            } else {
                break;
            }
        }
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 { a } else { gcd(b, a % b) }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> Vec<bool> {
        s.chars().map(|c| c == '1').collect()
    }

    #[test]
    fn canonical_form_reduces_period_and_preperiod() {
        // 0 (1010)* has primitive period 10, and the preperiod 0 rolls in:
        // 0 (10)* = (01)*
        let s = EpSeq::new(bits("0"), bits("1010"));
        assert_eq!(s.pre(), &bits("")[..]);
        assert_eq!(s.per(), &bits("01")[..]);
    }

    #[test]
    fn canonicalization_is_idempotent_and_preserves_entries() {
        let raw_pre = bits("0110");
        let raw_per = bits("110110");
        let s = EpSeq::new(raw_pre.clone(), raw_per.clone());
        let t = EpSeq::new(s.pre().to_vec(), s.per().to_vec());
        assert_eq!(s, t);
        let raw = EpSeq { pre: raw_pre, per: raw_per };
        for i in 0..40 {
            assert_eq!(s.get(i), raw.get(i), "entry {i}");
        }
    }

    #[test]
    fn disagreement_scan_decides_equality() {
        let a = EpSeq::new(bits("01"), bits("10"));
        let b = EpSeq::new(bits("0"), bits("11010")); // differs eventually
        assert!(a.first_disagreement(&b).is_some());
        let c = EpSeq::new(bits("011"), bits("01"));
        let d = EpSeq::new(bits("0110"), bits("10"));
        // same sequence, different raw presentation
        assert_eq!(c, d);
        assert_eq!(c.first_disagreement(&d), None);
    }

    #[test]
    fn shift_and_prepend_roundtrip() {
        let s = EpSeq::new(bits("011"), bits("001"));
        let t = s.shifted(2).prepended(&bits("01"));
        assert_eq!(s, t);
        let deep = s.shifted(7);
        for i in 0..20 {
            assert_eq!(deep.get(i), s.get(i + 7));
        }
    }
}
