use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::RepError;

/// Largest element magnitude a [`FiniteBasis`] accepts, so that sums of two
/// elements and their doubles never overflow `i128`.
pub const ELEMENT_LIMIT: i128 = i128::MAX / 4;

/// A finite set of integers stored as a strictly increasing list.
///
/// The construction keeps `0` out of every stage, but that is a property of
/// the stages, checked by the construction and the verifier, not of the
/// type: representation functions are defined for any finite set.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct FiniteBasis {
    elements: Vec<i128>,
}

impl FiniteBasis {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a set from arbitrary input, sorting and dropping duplicates.
    ///
    /// Panics if an element exceeds [`ELEMENT_LIMIT`] in magnitude.
    pub fn new<I: IntoIterator<Item = i128>>(items: I) -> Self {
        let mut elements: Vec<i128> = items.into_iter().collect();
        elements.sort_unstable();
        elements.dedup();
        assert!(
            elements.iter().all(|a| a.abs() <= ELEMENT_LIMIT),
            "set element exceeds the supported magnitude"
        );
        Self { elements }
    }

    /// Accepts an already strictly increasing list, rejecting anything else.
    pub fn from_sorted(elements: Vec<i128>) -> Result<Self, RepError> {
        if let Some(i) = elements.windows(2).position(|w| w[0] >= w[1]) {
            return Err(RepError::NotStrictlyIncreasing(i + 1));
        }
        if let Some(i) = elements.iter().position(|a| a.abs() > ELEMENT_LIMIT) {
            return Err(RepError::OutOfRange(i));
        }
        Ok(Self { elements })
    }

    pub fn elements(&self) -> &[i128] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, a: i128) -> bool {
        self.elements.binary_search(&a).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = i128> + '_ {
        self.elements.iter().copied()
    }

    /// `max |a|` over the set, 0 for the empty set.
    pub fn max_abs(&self) -> i128 {
        match (self.elements.first(), self.elements.last()) {
            (Some(lo), Some(hi)) => lo.abs().max(hi.abs()),
            _ => 0,
        }
    }

    pub fn is_subset(&self, other: &FiniteBasis) -> bool {
        self.first_missing_from(other).is_none()
    }

    /// First element of `self` that `other` lacks.
    pub fn first_missing_from(&self, other: &FiniteBasis) -> Option<i128> {
        self.iter().find(|a| !other.contains(*a))
    }

    pub fn union(&self, other: &FiniteBasis) -> FiniteBasis {
        FiniteBasis::new(self.iter().chain(other.iter()))
    }

    /// Elements of `self` not in `other`, ascending.
    pub fn difference(&self, other: &FiniteBasis) -> Vec<i128> {
        self.iter().filter(|a| !other.contains(*a)).collect()
    }

    /// Translation `A + t`.
    pub fn translate(&self, t: i128) -> FiniteBasis {
        FiniteBasis::new(self.iter().map(|a| a + t))
    }

    /// Dilation `h * A`.
    pub fn dilate(&self, h: i128) -> FiniteBasis {
        FiniteBasis::new(self.iter().map(|a| a * h))
    }

    /// Sumset `A + B` as a set.
    pub fn sumset(&self, other: &FiniteBasis) -> FiniteBasis {
        FiniteBasis::new(
            self.iter()
                .flat_map(|a| other.iter().map(move |b| a + b)),
        )
    }
}

impl FromIterator<i128> for FiniteBasis {
    fn from_iter<I: IntoIterator<Item = i128>>(iter: I) -> Self {
        FiniteBasis::new(iter)
    }
}

impl fmt::Display for FiniteBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, a) in self.elements.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "}}")
    }
}

impl Serialize for FiniteBasis {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.elements.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FiniteBasis {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let elements = Vec::<i128>::deserialize(deserializer)?;
        FiniteBasis::from_sorted(elements).map_err(serde::de::Error::custom)
    }
}

/// `r_A(n)`: the number of pairs `a <= b` in `A` with `a + b = n`.
pub fn rep_function(a: &FiniteBasis, n: i128) -> u64 {
    let xs = a.elements();
    if xs.is_empty() {
        return 0;
    }
    let (mut i, mut j) = (0usize, xs.len() - 1);
    let mut count = 0;
    while i <= j {
        let s = xs[i] + xs[j];
        if s == n {
            count += 1;
            i += 1;
            if j == 0 {
                break;
            }
            j -= 1;
        } else if s < n {
            i += 1;
        } else {
            if j == 0 {
                break;
            }
            j -= 1;
        }
    }
    count
}

/// `r_A` over the whole window `[-2 max|a|, 2 max|a|]`, stored sparsely.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepProfile {
    lo: i128,
    hi: i128,
    counts: Vec<(i128, u64)>,
}

impl RepProfile {
    pub fn window(&self) -> (i128, i128) {
        (self.lo, self.hi)
    }

    /// `r_A(n)`; zero anywhere without a stored entry.
    pub fn get(&self, n: i128) -> u64 {
        match self.counts.binary_search_by_key(&n, |&(s, _)| s) {
            Ok(i) => self.counts[i].1,
            Err(_) => 0,
        }
    }

    /// Nonzero entries in increasing order of `n`.
    pub fn nonzero(&self) -> impl Iterator<Item = (i128, u64)> + '_ {
        self.counts.iter().copied()
    }

    /// Sum of all counts, i.e. the number of unordered pairs with repetition.
    pub fn total(&self) -> u64 {
        self.counts.iter().map(|&(_, c)| c).sum()
    }

    /// The support of `r_A`, i.e. the sumset `2A`.
    pub fn support(&self) -> impl Iterator<Item = i128> + '_ {
        self.counts.iter().map(|&(s, _)| s)
    }
}

pub fn rep_profile(a: &FiniteBasis) -> Result<RepProfile, RepError> {
    if a.is_empty() {
        return Err(RepError::EmptySet);
    }
    let xs = a.elements();
    let mut sums = Vec::with_capacity(xs.len() * (xs.len() + 1) / 2);
    for (i, &x) in xs.iter().enumerate() {
        for &y in &xs[i..] {
            sums.push(x + y);
        }
    }
    sums.sort_unstable();
    let mut counts: Vec<(i128, u64)> = Vec::new();
    for s in sums {
        match counts.last_mut() {
            Some((last, c)) if *last == s => *c += 1,
            _ => counts.push((s, 1)),
        }
    }
    let m = a.max_abs();
    Ok(RepProfile {
        lo: -2 * m,
        hi: 2 * m,
        counts,
    })
}

/// `A(y, x)`: number of elements in the closed interval `[y, x]`.
///
/// Real endpoints are rounded inward, so the count is exact for integer
/// elements. `y > x` or a NaN endpoint gives 0.
pub fn counting(a: &FiniteBasis, y: f64, x: f64) -> usize {
    if y.is_nan() || x.is_nan() || y > x {
        return 0;
    }
    counting_closed(a, ceil_to_i128(y), floor_to_i128(x))
}

/// `A(lo, hi)` for integer endpoints.
pub fn counting_closed(a: &FiniteBasis, lo: i128, hi: i128) -> usize {
    if lo > hi {
        return 0;
    }
    let xs = a.elements();
    let start = xs.partition_point(|&v| v < lo);
    let end = xs.partition_point(|&v| v <= hi);
    end.saturating_sub(start)
}

// `as` saturates for out-of-range floats, which is the behavior wanted here.
fn ceil_to_i128(y: f64) -> i128 {
    y.ceil() as i128
}

fn floor_to_i128(x: f64) -> i128 {
    x.floor() as i128
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(xs: &[i128]) -> FiniteBasis {
        FiniteBasis::new(xs.iter().copied())
    }

    fn brute_rep(xs: &[i128], n: i128) -> u64 {
        let mut c = 0;
        for &a in xs {
            for &b in xs {
                if a <= b && a + b == n {
                    c += 1;
                }
            }
        }
        c
    }

    #[test]
    fn rep_function_examples() {
        assert_eq!(rep_function(&set(&[1, 2, 3]), 4), 2);
        assert_eq!(rep_function(&FiniteBasis::empty(), 5), 0);
        assert_eq!(rep_function(&set(&[-4, 4]), 0), 1);
        assert_eq!(rep_function(&set(&[7]), 14), 1);
        assert_eq!(rep_function(&set(&[7]), 7), 0);
    }

    #[test]
    fn rep_profile_examples() {
        let p = rep_profile(&set(&[1])).unwrap();
        assert_eq!(p.window(), (-2, 2));
        assert_eq!(p.nonzero().collect::<Vec<_>>(), vec![(2, 1)]);
        assert_eq!(p.get(0), 0);

        let p = rep_profile(&set(&[1, 2, 3])).unwrap();
        assert_eq!(
            p.nonzero().collect::<Vec<_>>(),
            vec![(2, 1), (3, 1), (4, 2), (5, 1), (6, 1)]
        );

        let p = rep_profile(&set(&[-4, 4])).unwrap();
        assert_eq!(
            p.nonzero().collect::<Vec<_>>(),
            vec![(-8, 1), (0, 1), (8, 1)]
        );
        assert_eq!(rep_profile(&FiniteBasis::empty()), Err(RepError::EmptySet));
    }

    #[test]
    fn counting_examples() {
        assert_eq!(counting(&set(&[1, 5, 9]), 0.0, 6.0), 2);
        assert_eq!(counting(&FiniteBasis::empty(), -10.0, 10.0), 0);
        assert_eq!(counting(&set(&[-4, 4, 24, 48]), -912.0, 912.0), 4);
        assert_eq!(counting(&set(&[1, 5, 9]), 6.0, 0.0), 0);
        assert_eq!(counting(&set(&[1, 5, 9]), 1.5, 8.99), 1);
        assert_eq!(counting(&set(&[1, 5, 9]), f64::NAN, 8.0), 0);
    }

    #[test]
    fn from_sorted_rejects_disorder() {
        assert_eq!(
            FiniteBasis::from_sorted(vec![1, 3, 3]),
            Err(RepError::NotStrictlyIncreasing(2))
        );
        assert!(FiniteBasis::from_sorted(vec![-2, 0, 5]).is_ok());
    }

    #[test]
    fn set_operations() {
        let a = set(&[1, 2]);
        assert_eq!(a.translate(3), set(&[4, 5]));
        assert_eq!(a.dilate(5), set(&[5, 10]));
        assert_eq!(a.sumset(&a), set(&[2, 3, 4]));
        assert_eq!(a.union(&set(&[-9, 9])), set(&[-9, 1, 2, 9]));
        assert_eq!(set(&[-9, 1, 2, 9]).difference(&a), vec![-9, 9]);
        assert_eq!(set(&[-9, 1, 2]).max_abs(), 9);
    }

    fn small_set() -> impl Strategy<Value = Vec<i128>> {
        proptest::collection::vec(-60i128..60, 0..14)
    }

    proptest! {
        #[test]
        fn rep_function_matches_pair_enumeration(xs in small_set(), n in -130i128..130) {
            let a = FiniteBasis::new(xs.iter().copied());
            prop_assert_eq!(rep_function(&a, n), brute_rep(a.elements(), n));
        }

        #[test]
        fn rep_function_ignores_input_order(mut xs in small_set(), n in -130i128..130) {
            let a = FiniteBasis::new(xs.iter().copied());
            xs.reverse();
            let b = FiniteBasis::new(xs.iter().copied());
            prop_assert_eq!(rep_function(&a, n), rep_function(&b, n));
        }

        #[test]
        fn profile_total_counts_all_pairs(xs in small_set()) {
            let a = FiniteBasis::new(xs.iter().copied());
            prop_assume!(!a.is_empty());
            let p = rep_profile(&a).unwrap();
            let k = a.len() as u64;
            prop_assert_eq!(p.total(), k * (k + 1) / 2);
            let (lo, hi) = p.window();
            for (s, c) in p.nonzero() {
                prop_assert!(lo <= s && s <= hi);
                prop_assert_eq!(c, rep_function(&a, s));
            }
        }

        #[test]
        fn counting_is_monotone(xs in small_set(), y in -70i128..70, x in -70i128..70, dx in 0i128..20) {
            let a = FiniteBasis::new(xs.iter().copied());
            let base = counting(&a, y as f64, x as f64);
            prop_assert!(counting(&a, y as f64, (x + dx) as f64) >= base);
            prop_assert!(counting(&a, (y - dx) as f64, x as f64) >= base);
            let brute = a.iter().filter(|&v| y <= v && v <= x).count();
            prop_assert_eq!(base, brute);
        }
    }
}
