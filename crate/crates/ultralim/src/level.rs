use std::fmt;

/// Exponent encoding of a dyadic distance: `Finite(n)` stands for the
/// distance `2^(-n)` and `Infinite` stands for distance `0`.
///
/// The order is by level value, so `Infinite` is the largest level and a
/// *larger* level means a *smaller* distance. All metric comparisons in the
/// library are integer comparisons on levels; no floating point anywhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Level {
    Finite(u32),
    Infinite,
}

impl Level {
    pub const ZERO_DISTANCE: Level = Level::Infinite;

    pub fn finite(n: u32) -> Self {
        Level::Finite(n)
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Level::Infinite)
    }

    pub fn as_finite(self) -> Option<u32> {
        match self {
            Level::Finite(n) => Some(n),
            Level::Infinite => None,
        }
    }

    /// Level arithmetic for contraction gains: distance `2^(-n)` scaled by
    /// `2^(-g)` has level `n + g`; distance 0 stays 0.
    pub fn plus(self, gain: u32) -> Self {
        match self {
            Level::Finite(n) => Level::Finite(n + gain),
            Level::Infinite => Level::Infinite,
        }
    }

    /// True iff the encoded distance is strictly below `2^(-bound)`.
    pub fn distance_below(self, bound: u32) -> bool {
        match self {
            Level::Finite(n) => n > bound,
            Level::Infinite => true,
        }
    }

    /// True iff the encoded distance is at most `2^(-bound)`.
    pub fn distance_at_most(self, bound: u32) -> bool {
        match self {
            Level::Finite(n) => n >= bound,
            Level::Infinite => true,
        }
    }
}

impl PartialOrd for Level {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Level {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        match (self, other) {
            (Level::Infinite, Level::Infinite) => std::cmp::Ordering::Equal,
            (Level::Infinite, Level::Finite(_)) => std::cmp::Ordering::Greater,
            (Level::Finite(_), Level::Infinite) => std::cmp::Ordering::Less,
            (Level::Finite(a), Level::Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for Level {
    /// Prints the *distance* the level encodes: `2^-n` or `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Level::Finite(n) => write!(f, "2^-{n}"),
            Level::Infinite => write!(f, "0"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_puts_infinite_on_top() {
        assert!(Level::Infinite > Level::Finite(1_000_000));
        assert!(Level::Finite(3) > Level::Finite(2));
        assert_eq!(Level::Finite(4).min(Level::Infinite), Level::Finite(4));
    }

    #[test]
    fn strict_and_weak_distance_bounds() {
        // d = 2^-4 is below 2^-3 but not below 2^-4
        assert!(Level::Finite(4).distance_below(3));
        assert!(!Level::Finite(4).distance_below(4));
        assert!(Level::Finite(4).distance_at_most(4));
        assert!(Level::Infinite.distance_below(u32::MAX));
    }

    #[test]
    fn display_is_distance() {
        assert_eq!(Level::Finite(0).to_string(), "2^-0");
        assert_eq!(Level::Infinite.to_string(), "0");
    }
}
