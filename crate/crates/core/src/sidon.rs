//! Sidon sets in `[1, n]` dense enough to satisfy `|D| > √n / 2`.
//!
//! Two generators are provided: the Mian–Chowla greedy scan, which wins for
//! small `n`, and the Erdős–Turán quadratic-residue construction, which gives
//! `|D| = p ≈ √(n/2)` for the largest prime `p` with `2p² <= n` and wins once
//! `n` is in the tens of thousands.

use std::collections::HashSet;

use serde::Serialize;
use thiserror::Error;

/// Above this `n` the greedy scan is skipped: its bitset grows linearly in
/// `n` and it is already smaller than the Erdős–Turán set well before here.
pub const GREEDY_LIMIT: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SidonError {
    #[error("no prime p with 2p^2 <= {0}")]
    InputTooSmall(u64),
    #[error("no Sidon set in [1, {n}] found with more than sqrt(n)/2 elements (best {best})")]
    DensityUnreachable { n: u64, best: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SidonMethod {
    Greedy,
    ErdosTuran,
}

/// A Sidon set `D ⊆ [1, n]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SidonSet {
    elements: Vec<u64>,
    ambient: u64,
    method: SidonMethod,
}

impl SidonSet {
    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn ambient(&self) -> u64 {
        self.ambient
    }

    pub fn method(&self) -> SidonMethod {
        self.method
    }

    /// `|D| > √n / 2`, decided exactly as `4|D|² > n`.
    pub fn is_dense(&self) -> bool {
        clears_density(self.len(), self.ambient)
    }
}

/// `size > √n / 2`, in integer arithmetic.
pub fn clears_density(size: usize, n: u64) -> bool {
    4 * (size as u128) * (size as u128) > n as u128
}

/// True iff the pairwise sums `a + b` (`a <= b`) of the set are distinct.
/// Input order and repeats are ignored.
pub fn is_sidon(d: &[i128]) -> bool {
    let mut xs = d.to_vec();
    xs.sort_unstable();
    xs.dedup();
    let mut sums = HashSet::with_capacity(xs.len() * (xs.len() + 1) / 2);
    for (i, &a) in xs.iter().enumerate() {
        for &b in &xs[i..] {
            if !sums.insert(a + b) {
                return false;
            }
        }
    }
    true
}

/// Mian–Chowla greedy scan over `1..=n`: keep each candidate whose
/// differences with the kept elements are all new.
pub fn greedy_sidon(n: u64) -> SidonSet {
    assert!(n >= 1, "ambient interval must be nonempty");
    let mut elements: Vec<u64> = Vec::new();
    let mut seen_diff = vec![false; n as usize];
    for c in 1..=n {
        if elements.iter().all(|&d| !seen_diff[(c - d) as usize]) {
            for &d in &elements {
                seen_diff[(c - d) as usize] = true;
            }
            elements.push(c);
        }
    }
    SidonSet {
        elements,
        ambient: n,
        method: SidonMethod::Greedy,
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut q = 2;
    while q * q <= p {
        if p.is_multiple_of(q) {
            return false;
        }
        q += 1;
    }
    true
}

/// Largest prime `p` with `2p² <= n`.
fn largest_admissible_prime(n: u64) -> Option<u64> {
    let mut p = (n / 2).isqrt();
    while p >= 2 {
        if is_prime(p) {
            return Some(p);
        }
        p -= 1;
    }
    None
}

/// `{2pk + (k² mod p) + 1 : 0 <= k < p}` for the largest prime `p` with
/// `2p² <= n`.
pub fn erdos_turan_sidon(n: u64) -> Result<SidonSet, SidonError> {
    let p = largest_admissible_prime(n).ok_or(SidonError::InputTooSmall(n))?;
    let elements = (0..p).map(|k| 2 * p * k + (k * k) % p + 1).collect();
    Ok(SidonSet {
        elements,
        ambient: n,
        method: SidonMethod::ErdosTuran,
    })
}

/// The larger of the two constructions (greedy on ties), provided it clears
/// `√n / 2`.
pub fn sidon_for_density(n: u64) -> Result<SidonSet, SidonError> {
    assert!(n >= 1, "ambient interval must be nonempty");
    let greedy = (n <= GREEDY_LIMIT).then(|| greedy_sidon(n));
    let quadratic = erdos_turan_sidon(n).ok();
    let best = match (greedy, quadratic) {
        (Some(g), Some(q)) => {
            if q.len() > g.len() {
                q
            } else {
                g
            }
        }
        (Some(g), None) => g,
        (None, Some(q)) => q,
        (None, None) => return Err(SidonError::DensityUnreachable { n, best: 0 }),
    };
    if best.is_dense() {
        Ok(best)
    } else {
        Err(SidonError::DensityUnreachable {
            n,
            best: best.len(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn as_i128(s: &SidonSet) -> Vec<i128> {
        s.elements().iter().map(|&x| x as i128).collect()
    }

    /// Greedy scan with a pairwise-sum oracle in place of the difference table.
    fn greedy_by_sums(n: u64) -> Vec<u64> {
        let mut kept: Vec<i128> = Vec::new();
        for c in 1..=n as i128 {
            kept.push(c);
            if !is_sidon(&kept) {
                kept.pop();
            }
        }
        kept.into_iter().map(|x| x as u64).collect()
    }

    #[test]
    fn is_sidon_examples() {
        assert!(is_sidon(&[1, 2, 4, 8]));
        assert!(!is_sidon(&[1, 2, 3]));
        assert!(is_sidon(&[]));
        assert!(is_sidon(&[5]));
        assert!(is_sidon(&[8, 1, 4, 2, 8]));
    }

    #[test]
    fn greedy_examples() {
        assert_eq!(greedy_sidon(5).elements(), &[1, 2, 4]);
        assert_eq!(greedy_sidon(10).elements(), &[1, 2, 4, 8]);
        assert_eq!(greedy_sidon(1).elements(), &[1]);
        assert_eq!(greedy_sidon(16).elements(), &[1, 2, 4, 8, 13]);
    }

    #[test]
    fn greedy_agrees_with_sum_oracle() {
        for n in [1, 2, 7, 38, 100, 300] {
            assert_eq!(greedy_sidon(n).elements(), greedy_by_sums(n).as_slice(), "n = {n}");
        }
    }

    #[test]
    fn erdos_turan_examples() {
        assert_eq!(erdos_turan_sidon(18).unwrap().elements(), &[1, 8, 14]);
        assert_eq!(erdos_turan_sidon(8).unwrap().elements(), &[1, 6]);
        assert_eq!(erdos_turan_sidon(7), Err(SidonError::InputTooSmall(7)));
        // 2·7² = 98 <= 100 < 2·11²
        assert_eq!(erdos_turan_sidon(100).unwrap().len(), 7);
    }

    #[test]
    fn density_examples() {
        let d = sidon_for_density(16).unwrap();
        assert_eq!(d.elements(), &[1, 2, 4, 8, 13]);
        assert_eq!(d.method(), SidonMethod::Greedy);
        let d = sidon_for_density(18).unwrap();
        assert!(d.len() >= 3 && (d.len() as f64) > 18f64.sqrt() / 2.0);
        assert_eq!(sidon_for_density(1).unwrap().elements(), &[1]);
    }

    #[test]
    fn erdos_turan_takes_over_for_large_n() {
        let d = sidon_for_density(100_000).unwrap();
        assert_eq!(d.method(), SidonMethod::ErdosTuran);
        assert_eq!(d.len(), 223);
        // beyond the greedy limit only the quadratic construction runs
        let d = sidon_for_density(GREEDY_LIMIT + 1).unwrap();
        assert_eq!(d.method(), SidonMethod::ErdosTuran);
        assert!(is_sidon(&as_i128(&d)));
    }

    #[test]
    fn clears_density_is_exact() {
        // √16 / 2 = 2: two elements are not enough, three are
        assert!(!clears_density(2, 16));
        assert!(clears_density(3, 16));
        assert!(clears_density(1, 3));
        assert!(!clears_density(1, 4));
    }

    #[test]
    fn generators_are_sidon_and_in_range_over_a_sweep() {
        for n in (1_000..=100_000).step_by(9_901) {
            let d = sidon_for_density(n).unwrap();
            assert!(d.is_dense(), "n = {n}");
            assert!(is_sidon(&as_i128(&d)), "n = {n}");
            assert!(d.elements().iter().all(|&x| 1 <= x && x <= n));
            let q = erdos_turan_sidon(n).unwrap();
            assert_eq!(Some(q.len() as u64), largest_admissible_prime(n));
        }
    }
}
