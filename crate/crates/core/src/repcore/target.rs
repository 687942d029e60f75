use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// A value of the prescribed function: a count or `∞`.
///
/// `Infinite` compares greater than every finite count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Multiplicity {
    Finite(u64),
    Infinite,
}

impl Multiplicity {
    /// True iff `count <= self`.
    pub fn admits(self, count: u64) -> bool {
        match self {
            Multiplicity::Finite(m) => count <= m,
            Multiplicity::Infinite => true,
        }
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            Multiplicity::Finite(m) => Some(m),
            Multiplicity::Infinite => None,
        }
    }

    pub fn is_zero(self) -> bool {
        self == Multiplicity::Finite(0)
    }
}

impl fmt::Display for Multiplicity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Multiplicity::Finite(m) => write!(f, "{m}"),
            Multiplicity::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for Multiplicity {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Multiplicity::Finite(m) => serializer.serialize_u64(*m),
            Multiplicity::Infinite => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Multiplicity {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Count(u64),
            Word(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Count(m) => Ok(Multiplicity::Finite(m)),
            Raw::Word(w) if w == "inf" => Ok(Multiplicity::Infinite),
            Raw::Word(w) => Err(serde::de::Error::custom(format!(
                "expected a nonnegative integer or \"inf\", got {w:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TargetError {
    #[error("default value must be at least 1 so that f has finitely many zeros")]
    ZeroDefault,
    #[error("value given for n = {n}, outside the window [-{window}, {window}]")]
    OutsideWindow { n: i128, window: u64 },
    #[error("invalid integer key {0:?}")]
    BadKey(String),
}

/// The prescribed function `f: Z -> N_0 ∪ {∞}`.
///
/// Values are stored explicitly on `[-W, W]`; every `n` outside the window
/// (and every window entry not listed) takes `default`, which is at least 1,
/// so `f^{-1}(0)` is finite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepTarget {
    window: u64,
    values: BTreeMap<i128, Multiplicity>,
    default: Multiplicity,
}

impl RepTarget {
    pub fn new(
        window: u64,
        values: BTreeMap<i128, Multiplicity>,
        default: Multiplicity,
    ) -> Result<Self, TargetError> {
        if default.is_zero() {
            return Err(TargetError::ZeroDefault);
        }
        if let Some(&n) = values.keys().find(|n| n.unsigned_abs() > window as u128) {
            return Err(TargetError::OutsideWindow { n, window });
        }
        Ok(Self {
            window,
            values,
            default,
        })
    }

    /// `f ≡ m`.
    pub fn constant(m: Multiplicity) -> Result<Self, TargetError> {
        Self::new(0, BTreeMap::new(), m)
    }

    pub fn window(&self) -> u64 {
        self.window
    }

    pub fn default_value(&self) -> Multiplicity {
        self.default
    }

    pub fn explicit_values(&self) -> &BTreeMap<i128, Multiplicity> {
        &self.values
    }

    pub fn get(&self, n: i128) -> Multiplicity {
        self.values.get(&n).copied().unwrap_or(self.default)
    }

    /// The `n` with `f(n) = 0`, ascending.
    pub fn zeros(&self) -> impl Iterator<Item = i128> + '_ {
        self.values
            .iter()
            .filter(|(_, v)| v.is_zero())
            .map(|(&n, _)| n)
    }

    /// Least positive `d_0` with `f(n) >= 1` whenever `|n| >= d_0`.
    pub fn d0(&self) -> i128 {
        self.zeros().map(|n| n.abs() + 1).max().unwrap_or(1)
    }

    /// Largest finite value taken anywhere, `None` if `f` is `∞` everywhere.
    pub fn max_finite(&self) -> Option<u64> {
        self.values
            .values()
            .copied()
            .chain(std::iter::once(self.default))
            .filter_map(Multiplicity::finite)
            .max()
    }
}

#[derive(Serialize, Deserialize)]
struct RawTarget {
    default: Multiplicity,
    values: BTreeMap<String, Multiplicity>,
    window: u64,
}

impl Serialize for RepTarget {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        RawTarget {
            default: self.default,
            values: self
                .values
                .iter()
                .map(|(n, v)| (n.to_string(), *v))
                .collect(),
            window: self.window,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RepTarget {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = RawTarget::deserialize(deserializer)?;
        let mut values = BTreeMap::new();
        for (k, v) in raw.values {
            let n: i128 = k
                .trim()
                .parse()
                .map_err(|_| serde::de::Error::custom(TargetError::BadKey(k.clone())))?;
            values.insert(n, v);
        }
        RepTarget::new(raw.window, values, raw.default).map_err(serde::de::Error::custom)
    }
}

/// The `j`-th integer in the order `0, 1, -1, 2, -2, ...`.
pub fn spiral(j: u64) -> i128 {
    if j == 0 {
        0
    } else if j % 2 == 1 {
        j.div_ceil(2) as i128
    } else {
        -((j / 2) as i128)
    }
}

/// A sequence `u_1, u_2, ...` in which each `n` occurs exactly `f(n)` times
/// (infinitely often when `f(n) = ∞`).
///
/// Terms are produced in stages `t = 1, 2, ...`: stage `t` walks
/// `0, 1, -1, ..., t, -t` and emits `n` once whenever `min(f(n), t)` exceeds
/// the number of times `n` has been emitted so far. Extending the sequence
/// never changes earlier terms.
#[derive(Debug, Clone)]
pub struct TargetSequence {
    source: RepTarget,
    emitted: Vec<i128>,
    counts: HashMap<i128, u64>,
    stage: u64,
    cursor: u64,
}

impl TargetSequence {
    pub fn new(source: RepTarget) -> Self {
        Self {
            source,
            emitted: Vec::new(),
            counts: HashMap::new(),
            stage: 1,
            cursor: 0,
        }
    }

    pub fn source(&self) -> &RepTarget {
        &self.source
    }

    pub fn prefix(&self) -> &[i128] {
        &self.emitted
    }

    /// Grows the emitted prefix to at least `m` terms.
    pub fn extend_to(&mut self, m: usize) {
        while self.emitted.len() < m {
            let n = spiral(self.cursor);
            let cap = self.source.get(n).min(Multiplicity::Finite(self.stage));
            let seen = self.counts.entry(n).or_insert(0);
            if cap > Multiplicity::Finite(*seen) {
                *seen += 1;
                self.emitted.push(n);
            }
            self.cursor += 1;
            if self.cursor > 2 * self.stage {
                self.stage += 1;
                self.cursor = 0;
            }
        }
    }

    /// `u_k`, 1-based, extending as needed.
    pub fn term(&mut self, k: usize) -> i128 {
        assert!(k >= 1, "terms are indexed from 1");
        self.extend_to(k);
        self.emitted[k - 1]
    }
}

/// `u_1 .. u_m`.
pub fn target_prefix(f: &RepTarget, m: usize) -> Vec<i128> {
    let mut seq = TargetSequence::new(f.clone());
    seq.extend_to(m);
    seq.emitted.truncate(m);
    seq.emitted
}

/// `#{i <= prefix.len() : u_i = n}`.
pub fn occurrences(prefix: &[i128], n: i128) -> u64 {
    prefix.iter().filter(|&&u| u == n).count() as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    use Multiplicity::{Finite, Infinite};

    fn zeros_near_origin(radius: i128) -> RepTarget {
        let values = (-radius..=radius).map(|n| (n, Finite(0))).collect();
        RepTarget::new(radius as u64, values, Finite(1)).unwrap()
    }

    #[test]
    fn d0_examples() {
        assert_eq!(RepTarget::constant(Finite(1)).unwrap().d0(), 1);
        assert_eq!(zeros_near_origin(2).d0(), 3);
        let f = RepTarget::new(0, BTreeMap::from([(0, Finite(0))]), Finite(2)).unwrap();
        assert_eq!(f.d0(), 1);
        let f = RepTarget::new(4, BTreeMap::from([(-4, Finite(0))]), Finite(1)).unwrap();
        assert_eq!(f.d0(), 5);
    }

    #[test]
    fn rejects_zero_default_and_out_of_window_keys() {
        assert_eq!(
            RepTarget::constant(Finite(0)),
            Err(TargetError::ZeroDefault)
        );
        assert_eq!(
            RepTarget::new(1, BTreeMap::from([(2, Finite(3))]), Finite(1)),
            Err(TargetError::OutsideWindow { n: 2, window: 1 })
        );
    }

    #[test]
    fn infinity_orders_above_counts() {
        assert!(Infinite > Finite(u64::MAX));
        assert!(Infinite.admits(u64::MAX));
        assert!(!Finite(2).admits(3));
        assert_eq!(Infinite.min(Finite(7)), Finite(7));
    }

    #[test]
    fn spiral_order() {
        let got: Vec<i128> = (0..7).map(spiral).collect();
        assert_eq!(got, vec![0, 1, -1, 2, -2, 3, -3]);
    }

    #[test]
    fn prefix_examples() {
        let ones = RepTarget::constant(Finite(1)).unwrap();
        assert_eq!(target_prefix(&ones, 5), vec![0, 1, -1, 2, -2]);
        let twos = RepTarget::constant(Finite(2)).unwrap();
        assert_eq!(target_prefix(&twos, 8), vec![0, 1, -1, 0, 1, -1, 2, -2]);
        let no_zero = zeros_near_origin(0);
        assert_eq!(target_prefix(&no_zero, 4), vec![1, -1, 2, -2]);
    }

    #[test]
    fn infinite_value_recurs_every_stage() {
        let f = RepTarget::new(0, BTreeMap::from([(0, Infinite)]), Finite(1)).unwrap();
        let u = target_prefix(&f, 40);
        // stage t contributes 0 once and reaches |n| = t, so 0 keeps pace with t
        assert!(occurrences(&u, 0) >= 5);
        assert_eq!(&u[..5], &[0, 1, -1, 0, 2]);
    }

    #[test]
    fn extending_preserves_earlier_terms() {
        let f = RepTarget::constant(Finite(3)).unwrap();
        let mut seq = TargetSequence::new(f.clone());
        seq.extend_to(10);
        let first: Vec<i128> = seq.prefix().to_vec();
        seq.extend_to(50);
        assert_eq!(&seq.prefix()[..10], first.as_slice());
        assert_eq!(seq.term(3), first[2]);
        assert_eq!(target_prefix(&f, 50), seq.prefix()[..50].to_vec());
    }

    #[test]
    fn json_round_trip() {
        let json = r#"{"window": 1, "values": {"-1": 0, "0": "inf", "1": 3}, "default": 2}"#;
        let f: RepTarget = serde_json::from_str(json).unwrap();
        assert_eq!(f.get(-1), Finite(0));
        assert_eq!(f.get(0), Infinite);
        assert_eq!(f.get(1), Finite(3));
        assert_eq!(f.get(77), Finite(2));
        assert_eq!(f.d0(), 2);
        assert_eq!(f.max_finite(), Some(3));
        let back: RepTarget = serde_json::from_str(&serde_json::to_string(&f).unwrap()).unwrap();
        assert_eq!(back, f);

        let bad = r#"{"window": 0, "values": {}, "default": 0}"#;
        assert!(serde_json::from_str::<RepTarget>(bad).is_err());
        let bad = r#"{"window": 0, "values": {"x": 1}, "default": 1}"#;
        assert!(serde_json::from_str::<RepTarget>(bad).is_err());
    }

    fn arb_multiplicity() -> impl Strategy<Value = Multiplicity> {
        prop_oneof![4 => (0u64..4).prop_map(Finite), 1 => Just(Infinite)]
    }

    fn arb_target() -> impl Strategy<Value = RepTarget> {
        (0u64..4)
            .prop_flat_map(|w| {
                let span = (2 * w + 1) as usize;
                (
                    Just(w),
                    proptest::collection::vec(arb_multiplicity(), span),
                    prop_oneof![(1u64..4).prop_map(Finite), Just(Infinite)],
                )
            })
            .prop_map(|(w, vals, default)| {
                let values = vals
                    .into_iter()
                    .enumerate()
                    .map(|(i, v)| (i as i128 - w as i128, v))
                    .collect();
                RepTarget::new(w, values, default).unwrap()
            })
    }

    proptest! {
        #[test]
        fn prefix_never_exceeds_target(f in arb_target(), m in 1usize..120) {
            let u = target_prefix(&f, m);
            prop_assert_eq!(u.len(), m);
            for &n in &u {
                prop_assert!(f.get(n).admits(occurrences(&u, n)));
            }
        }

        #[test]
        fn finite_values_are_eventually_exhausted(f in arb_target()) {
            // stages 1..=6 emit at most 48 terms, so 60 terms finish stage 6,
            // after which n has min(f(n), 7 - max(|n|, 1)) occurrences
            let u = target_prefix(&f, 60);
            for n in -4i128..=4 {
                match f.get(n) {
                    Finite(k) => prop_assert_eq!(occurrences(&u, n), k),
                    Infinite => prop_assert!(occurrences(&u, n) >= 3),
                }
            }
        }
    }
}
