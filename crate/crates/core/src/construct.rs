//! The staged construction.
//!
//! Stages alternate between two moves on a finite set `A` with `r_A <= f`:
//!
//! * target extension adds a pair `{-c, c + u}` far outside `A`, raising
//!   `r(u)` by exactly one and creating no other sum twice;
//! * densification adds a dilated Sidon set `5T * D` far outside `A`, so that
//!   `A(-x, x) > √x / φ(x)` at a fresh checkpoint `x`.
//!
//! The base stage combines both moves for `u_1`. Every move is followed by
//! nothing but brute-force checks in [`crate::verify`]; the construction itself
//! only checks the preconditions it is handed.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::repcore::{
    counting_closed, exceeds_density_bound, occurrences, rep_function, rep_profile, FiniteBasis,
    Phi, RepTarget, TargetSequence, ELEMENT_LIMIT,
};
use crate::sidon::sidon_for_density;

/// Default bound on the scanned Sidon ambient size `n`.
pub const DEFAULT_SEARCH_CAP: u64 = 1_000_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchConfig {
    /// Largest `n` tried for the Sidon interval `[1, n]` before giving up.
    pub cap: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            cap: DEFAULT_SEARCH_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructError {
    #[error("phi grows too slowly: {step} needs n beyond the search cap {cap} ({detail})")]
    PhiTooSlow {
        step: &'static str,
        cap: u64,
        detail: String,
    },
    #[error("precondition violated at n = {witness}: {reason}")]
    PreconditionViolated { witness: i128, reason: String },
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum StageKind {
    Base,
    TargetExtension,
    Densification,
}

impl StageKind {
    /// The kind stage `index` (1-based) must have.
    pub fn for_index(index: usize) -> StageKind {
        match index {
            1 => StageKind::Base,
            i if i % 2 == 0 => StageKind::TargetExtension,
            _ => StageKind::Densification,
        }
    }
}

/// `m` such that stage `index` must satisfy `r >= #{i <= m : u_i = n}`:
/// 1 for the base stage, `l + 1` for stages `2l` and `2l + 1`.
pub fn required_coverage(index: usize) -> usize {
    index / 2 + 1
}

/// One stage `A_l` of the construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageRecord {
    /// Elements new at this stage; the whole set for the base stage.
    pub added: Vec<i128>,
    pub index: usize,
    pub kind: StageKind,
    pub m_covered: usize,
    pub set: FiniteBasis,
    /// Density checkpoint, present exactly on odd stages.
    #[serde(rename = "x", default, skip_serializing_if = "Option::is_none")]
    pub checkpoint: Option<i128>,
}

/// Nested stages `A_1 ⊆ A_2 ⊆ ...` with their checkpoints.
///
/// Field order is alphabetical so the serialized form has sorted keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstructionTrace {
    pub f: RepTarget,
    pub phi: Phi,
    pub stages: Vec<StageRecord>,
    pub u_prefix: Vec<i128>,
}

impl ConstructionTrace {
    /// Canonical JSON: sorted keys, integers only, trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("trace serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn final_stage(&self) -> Option<&StageRecord> {
        self.stages.last()
    }

    /// `(stage index, x)` for every recorded checkpoint, in stage order.
    pub fn checkpoints(&self) -> impl Iterator<Item = (usize, i128)> + '_ {
        self.stages
            .iter()
            .filter_map(|s| s.checkpoint.map(|x| (s.index, x)))
    }
}

/// A failed build together with every stage completed before the failure.
#[derive(Debug, Clone)]
pub struct BuildFailure {
    pub error: ConstructError,
    pub partial: Box<ConstructionTrace>,
}

impl fmt::Display for BuildFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} (after {} completed stages)",
            self.error,
            self.partial.stages.len()
        )
    }
}

impl std::error::Error for BuildFailure {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.error)
    }
}

/// Smallest `n` in `[lo, hi]` with `pred(n)`, for `pred` monotone in `n`.
fn first_true(lo: u64, hi: u64, pred: impl Fn(u64) -> bool) -> Option<u64> {
    if lo > hi || !pred(hi) {
        return None;
    }
    let (mut lo, mut hi) = (lo, hi);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Some(lo)
}

fn violated(witness: i128, reason: impl Into<String>) -> ConstructError {
    ConstructError::PreconditionViolated {
        witness,
        reason: reason.into(),
    }
}

fn require_zero_free(a: &FiniteBasis) -> Result<(), ConstructError> {
    if a.contains(0) {
        Err(violated(0, "0 is an element of the set"))
    } else {
        Ok(())
    }
}

fn require_rep_within_target(a: &FiniteBasis, f: &RepTarget) -> Result<(), ConstructError> {
    let Ok(profile) = rep_profile(a) else {
        return Ok(());
    };
    for (n, r) in profile.nonzero() {
        if !f.get(n).admits(r) {
            return Err(violated(n, format!("r_A(n) = {r} exceeds f(n) = {}", f.get(n))));
        }
    }
    Ok(())
}

fn require_prefix_coverage(a: &FiniteBasis, prefix: &[i128]) -> Result<(), ConstructError> {
    for &n in prefix {
        let need = occurrences(prefix, n);
        let have = rep_function(a, n);
        if have < need {
            return Err(violated(
                n,
                format!("r_A(n) = {have} but n occurs {need} times among u_1..u_{}", prefix.len()),
            ));
        }
    }
    Ok(())
}

/// Scales a Sidon set by `factor`.
fn dilated(d: &[u64], factor: i128) -> Result<Vec<i128>, ConstructError> {
    d.iter()
        .map(|&e| {
            factor
                .checked_mul(e as i128)
                .filter(|v| *v <= ELEMENT_LIMIT)
                .ok_or(ConstructError::Overflow("dilating the Sidon set"))
        })
        .collect()
}

/// `A_1 = 3α * D ∪ {-c, c + u_1}` with checkpoint `x_1 = 3αn`.
///
/// `c = ±4d_0` takes the sign of `u_1` (nonnegative for `u_1 = 0`) and
/// `α = |2c + 2u_1|`. `n` is the least value with `φ(3αn) > 2√(3α)` for
/// which a Sidon set `D ⊆ [1, n]` with `|D| > √n/2` is available.
pub fn base_case(f: &RepTarget, phi: &Phi, config: &SearchConfig) -> Result<StageRecord, ConstructError> {
    let mut u = TargetSequence::new(f.clone());
    let u1 = u.term(1);
    let d0 = f.d0();
    let c = if u1 >= 0 { 4 * d0 } else { -4 * d0 };
    let alpha = (2 * c + 2 * u1).abs();
    let three_alpha = 3 * alpha;
    let threshold = 2.0 * (three_alpha as f64).sqrt();

    let hi = config.cap.min((ELEMENT_LIMIT / three_alpha) as u64);
    let meets_phi = |n: u64| phi.eval_int(three_alpha * n as i128) > threshold;
    let too_slow = || ConstructError::PhiTooSlow {
        step: "base case",
        cap: config.cap,
        detail: format!("phi(3*alpha*n) must exceed {threshold:.6} with 3*alpha = {three_alpha}"),
    };
    let start = first_true(1, hi, meets_phi).ok_or_else(too_slow)?;

    for n in start..=hi {
        let Ok(d) = sidon_for_density(n) else { continue };
        let x = three_alpha * n as i128;
        let mut elements = dilated(d.elements(), three_alpha)?;
        elements.extend([-c, c + u1]);
        let set = FiniteBasis::new(elements);
        if exceeds_density_bound(counting_closed(&set, -x, x), x, phi) {
            return Ok(StageRecord {
                added: set.elements().to_vec(),
                index: 1,
                kind: StageKind::Base,
                m_covered: 1,
                set,
                checkpoint: Some(x),
            });
        }
    }
    Err(too_slow())
}

/// Extends `A` so that `r_B(n) >= #{i <= m+1 : u_i = n}` for all `n`, given
/// that `A` already covers `u_1 .. u_m`.
///
/// If `A` already covers `u_{m+1}` it is returned unchanged. Otherwise, with
/// `d = max(d_0, |u_{m+1}|, max|a|)` and `c = ±(4d + 1)` signed like
/// `u_{m+1}`, the result is `A ∪ {-c, c + u_{m+1}}`.
pub fn extend_target(
    a: &FiniteBasis,
    f: &RepTarget,
    u: &mut TargetSequence,
    m: usize,
) -> Result<FiniteBasis, ConstructError> {
    require_zero_free(a)?;
    require_rep_within_target(a, f)?;
    u.extend_to(m + 1);
    let prefix = &u.prefix()[..m + 1];
    require_prefix_coverage(a, &prefix[..m])?;

    let target = prefix[m];
    if rep_function(a, target) >= occurrences(prefix, target) {
        return Ok(a.clone());
    }

    let d = f.d0().max(target.abs()).max(a.max_abs());
    let magnitude = d
        .checked_mul(4)
        .and_then(|v| v.checked_add(1))
        .ok_or(ConstructError::Overflow("choosing c for target extension"))?;
    let c = if target >= 0 { magnitude } else { -magnitude };
    let partner = c + target;
    if partner.abs() > ELEMENT_LIMIT {
        return Err(ConstructError::Overflow("choosing c for target extension"));
    }
    Ok(a.union(&FiniteBasis::new([-c, partner])))
}

/// Result of [`densify`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Densified {
    pub set: FiniteBasis,
    pub checkpoint: i128,
    pub added: Vec<i128>,
}

/// Adds `5T * D` to `A` so that `B(-x, x) > √x / φ(x)` at a checkpoint
/// `x > bound`.
///
/// `T = max(d_0, max|a|)`. The checkpoint is the least multiple `x = 5Tn`
/// with `x > bound` and `φ(x) > bound + √(20T)` for which a Sidon set
/// `D ⊆ [1, n]` with `|D| > √n/2` exists.
pub fn densify(
    a: &FiniteBasis,
    f: &RepTarget,
    phi: &Phi,
    bound: i128,
    config: &SearchConfig,
) -> Result<Densified, ConstructError> {
    require_zero_free(a)?;
    require_rep_within_target(a, f)?;
    if bound < 1 {
        return Err(violated(bound, "checkpoint lower bound must be at least 1"));
    }

    let t = f.d0().max(a.max_abs());
    let five_t = 5 * t;
    let need = bound as f64 + (20.0 * t as f64).sqrt();
    let hi = config.cap.min((ELEMENT_LIMIT / five_t) as u64);
    let admissible = |n: u64| {
        let x = five_t * n as i128;
        x > bound && phi.eval_int(x) > need
    };
    let too_slow = || ConstructError::PhiTooSlow {
        step: "densification",
        cap: config.cap,
        detail: format!("phi(x) must exceed {need:.6} at a multiple x of {five_t} above {bound}"),
    };
    let start = first_true(1, hi, admissible).ok_or_else(too_slow)?;

    for n in start..=hi {
        let Ok(d) = sidon_for_density(n) else { continue };
        let x = five_t * n as i128;
        let added = dilated(d.elements(), five_t)?;
        let set = a.union(&FiniteBasis::new(added.iter().copied()));
        if exceeds_density_bound(counting_closed(&set, -x, x), x, phi) {
            return Ok(Densified {
                set,
                checkpoint: x,
                added,
            });
        }
    }
    Err(too_slow())
}

/// Builds `A_1 .. A_{2L+1}` with checkpoints `x_1 < .. < x_{L+1}`.
///
/// For `l = 1..=L`, stage `2l` extends stage `2l - 1` to cover `u_{l+1}` and
/// stage `2l + 1` densifies stage `2l` beyond `x_l`. On failure the stages
/// completed so far are returned in [`BuildFailure::partial`].
pub fn build(
    f: &RepTarget,
    phi: &Phi,
    rounds: usize,
    config: &SearchConfig,
) -> Result<ConstructionTrace, BuildFailure> {
    let mut u = TargetSequence::new(f.clone());
    let mut trace = ConstructionTrace {
        f: f.clone(),
        phi: *phi,
        stages: Vec::with_capacity(2 * rounds + 1),
        u_prefix: Vec::new(),
    };
    let finish = |trace: &mut ConstructionTrace, u: &mut TargetSequence| {
        let covered = trace.stages.last().map_or(0, |s| s.m_covered);
        u.extend_to(covered);
        trace.u_prefix = u.prefix()[..covered].to_vec();
    };
    let fail = |mut trace: ConstructionTrace, u: &mut TargetSequence, error| {
        finish(&mut trace, u);
        BuildFailure {
            error,
            partial: Box::new(trace),
        }
    };

    match base_case(f, phi, config) {
        Ok(stage) => trace.stages.push(stage),
        Err(e) => return Err(fail(trace, &mut u, e)),
    }
    let mut last_checkpoint = trace.stages[0].checkpoint.expect("base stage has a checkpoint");

    for l in 1..=rounds {
        let prev = trace.stages.last().expect("nonempty").set.clone();
        let extended = match extend_target(&prev, f, &mut u, l) {
            Ok(set) => set,
            Err(e) => return Err(fail(trace, &mut u, e)),
        };
        trace.stages.push(StageRecord {
            added: extended.difference(&prev),
            index: 2 * l,
            kind: StageKind::TargetExtension,
            m_covered: l + 1,
            set: extended.clone(),
            checkpoint: None,
        });

        let dense = match densify(&extended, f, phi, last_checkpoint, config) {
            Ok(d) => d,
            Err(e) => return Err(fail(trace, &mut u, e)),
        };
        last_checkpoint = dense.checkpoint;
        trace.stages.push(StageRecord {
            added: dense.added,
            index: 2 * l + 1,
            kind: StageKind::Densification,
            m_covered: l + 1,
            set: dense.set,
            checkpoint: Some(dense.checkpoint),
        });
    }
    finish(&mut trace, &mut u);
    Ok(trace)
}
