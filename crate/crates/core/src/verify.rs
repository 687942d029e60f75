//! Brute-force oracles for a finished [`ConstructionTrace`].
//!
//! Nothing here reads the construction's internal choices (`c`, `d`, `T`,
//! `D`). The oracles look only at stage sets, recorded additions and
//! checkpoints, and recompute `u_1, u_2, ...` from `f` directly.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::construct::{required_coverage, ConstructionTrace, StageKind};
use crate::repcore::{
    counting_closed, exceeds_density_bound, occurrences, rep_profile, target_prefix, FiniteBasis,
    Multiplicity, RepProfile,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("malformed trace: {0}")]
    MalformedTrace(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    /// Recorded `m_covered` agrees with the stage index.
    Structure,
    /// Recorded `u` prefix agrees with the enumeration of `f`.
    UPrefix,
    /// Condition (1): `r(n) <= f(n)` everywhere.
    RepWithinTarget,
    /// Condition (2): `r(n) >= #{i <= m : u_i = n}`.
    PrefixCoverage,
    /// Condition (3): `A(-x, x) > √x / φ(x)` at the stage checkpoint.
    Density,
    /// Condition (4): `0` is not an element.
    ZeroFree,
    Nesting,
    CheckpointOrder,
    AddedConsistency,
    Decomposition,
    EqualityCoverage,
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            CheckKind::Structure => "structure",
            CheckKind::UPrefix => "u prefix",
            CheckKind::RepWithinTarget => "condition (1) r <= f",
            CheckKind::PrefixCoverage => "condition (2) prefix coverage",
            CheckKind::Density => "condition (3) density",
            CheckKind::ZeroFree => "condition (4) zero-free",
            CheckKind::Nesting => "nesting",
            CheckKind::CheckpointOrder => "checkpoint order",
            CheckKind::AddedConsistency => "added consistency",
            CheckKind::Decomposition => "sumset decomposition",
            CheckKind::EqualityCoverage => "equality coverage",
        };
        f.write_str(name)
    }
}

/// Outcome of one check. A failure always carries a witness: the offending
/// integer `n` (or element, or checkpoint, or stage index for structural
/// checks).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub check: CheckKind,
    pub detail: String,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stage: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<i128>,
}

impl CheckResult {
    fn ok(check: CheckKind, stage: Option<usize>, detail: impl Into<String>) -> Self {
        Self {
            check,
            detail: detail.into(),
            pass: true,
            stage,
            witness: None,
        }
    }

    fn fail(check: CheckKind, stage: Option<usize>, witness: i128, detail: impl Into<String>) -> Self {
        Self {
            check,
            detail: detail.into(),
            pass: false,
            stage,
            witness: Some(witness),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub checks: Vec<CheckResult>,
    pub pass: bool,
}

impl InvariantReport {
    fn from_checks(checks: Vec<CheckResult>) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        Self { checks, pass }
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.pass)
    }

    /// First failure of the given kind, if any.
    pub fn failure_of(&self, kind: CheckKind) -> Option<&CheckResult> {
        self.failures().find(|c| c.check == kind)
    }

    pub fn merge(mut self, other: InvariantReport) -> Self {
        self.checks.extend(other.checks);
        self.pass = self.pass && other.pass;
        self
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

fn check_structure(trace: &ConstructionTrace) -> Result<(), VerifyError> {
    if trace.stages.is_empty() {
        return Err(VerifyError::MalformedTrace("no stages".into()));
    }
    for (pos, stage) in trace.stages.iter().enumerate() {
        let index = pos + 1;
        if stage.index != index {
            return Err(VerifyError::MalformedTrace(format!(
                "stage at position {pos} has index {}, expected {index}",
                stage.index
            )));
        }
        let kind = StageKind::for_index(index);
        if stage.kind != kind {
            return Err(VerifyError::MalformedTrace(format!(
                "stage {index} has kind {:?}, expected {kind:?}",
                stage.kind
            )));
        }
        match (index % 2 == 1, stage.checkpoint) {
            (true, None) => {
                return Err(VerifyError::MalformedTrace(format!(
                    "odd stage {index} has no checkpoint"
                )))
            }
            (false, Some(_)) => {
                return Err(VerifyError::MalformedTrace(format!(
                    "even stage {index} carries a checkpoint"
                )))
            }
            (true, Some(x)) if x < 1 => {
                return Err(VerifyError::MalformedTrace(format!(
                    "stage {index} checkpoint {x} is not positive"
                )))
            }
            _ => {}
        }
    }
    Ok(())
}

fn first_rep_excess(profile: Option<&RepProfile>, trace: &ConstructionTrace) -> Option<(i128, u64)> {
    profile?
        .nonzero()
        .find(|&(n, r)| !trace.f.get(n).admits(r))
}

/// Checks conditions (1)–(4), nesting, checkpoint order, the recorded
/// additions and the sumset decomposition of every non-base stage.
pub fn check_invariants(trace: &ConstructionTrace) -> Result<InvariantReport, VerifyError> {
    check_structure(trace)?;
    let mut checks = Vec::new();

    let last = trace.stages.len();
    let u = target_prefix(&trace.f, required_coverage(last));
    match trace.u_prefix.iter().zip(&u).position(|(a, b)| a != b) {
        Some(i) => checks.push(CheckResult::fail(
            CheckKind::UPrefix,
            None,
            i as i128 + 1,
            format!("u_{} recorded as {} but f enumerates {}", i + 1, trace.u_prefix[i], u[i]),
        )),
        None if trace.u_prefix.len() != u.len() => checks.push(CheckResult::fail(
            CheckKind::UPrefix,
            None,
            trace.u_prefix.len() as i128,
            format!("recorded prefix has {} terms, expected {}", trace.u_prefix.len(), u.len()),
        )),
        None => checks.push(CheckResult::ok(
            CheckKind::UPrefix,
            None,
            format!("u_1..u_{} match", u.len()),
        )),
    }

    let mut prev_checkpoint: Option<i128> = None;
    for (pos, stage) in trace.stages.iter().enumerate() {
        let s = Some(stage.index);
        let set = &stage.set;
        let m = required_coverage(stage.index);

        checks.push(if stage.m_covered == m {
            CheckResult::ok(CheckKind::Structure, s, format!("m_covered = {m}"))
        } else {
            CheckResult::fail(
                CheckKind::Structure,
                s,
                stage.index as i128,
                format!("m_covered = {}, expected {m}", stage.m_covered),
            )
        });

        checks.push(if set.contains(0) {
            CheckResult::fail(CheckKind::ZeroFree, s, 0, "0 is an element")
        } else {
            CheckResult::ok(CheckKind::ZeroFree, s, "0 absent")
        });

        let profile = rep_profile(set).ok();
        checks.push(match first_rep_excess(profile.as_ref(), trace) {
            Some((n, r)) => CheckResult::fail(
                CheckKind::RepWithinTarget,
                s,
                n,
                format!("r({n}) = {r} > f({n}) = {}", trace.f.get(n)),
            ),
            None => CheckResult::ok(
                CheckKind::RepWithinTarget,
                s,
                format!("{} sums checked", profile.as_ref().map_or(0, |p| p.total())),
            ),
        });

        let prefix = &u[..m.min(u.len())];
        let short = prefix.iter().find(|&&n| {
            let have = profile.as_ref().map_or(0, |p| p.get(n));
            have < occurrences(prefix, n)
        });
        checks.push(match short {
            Some(&n) => CheckResult::fail(
                CheckKind::PrefixCoverage,
                s,
                n,
                format!(
                    "r({n}) = {} but {n} occurs {} times in u_1..u_{m}",
                    profile.as_ref().map_or(0, |p| p.get(n)),
                    occurrences(prefix, n)
                ),
            ),
            None => CheckResult::ok(CheckKind::PrefixCoverage, s, format!("u_1..u_{m} covered")),
        });

        if let Some(x) = stage.checkpoint {
            let count = counting_closed(set, -x, x);
            checks.push(if exceeds_density_bound(count, x, &trace.phi) {
                CheckResult::ok(CheckKind::Density, s, format!("A(-{x}, {x}) = {count}"))
            } else {
                CheckResult::fail(
                    CheckKind::Density,
                    s,
                    x,
                    format!(
                        "A(-{x}, {x}) = {count} does not exceed sqrt(x)/phi(x) = {:.6}",
                        crate::repcore::density_bound(x, &trace.phi)
                    ),
                )
            });
            checks.push(match prev_checkpoint {
                Some(p) if x <= p => CheckResult::fail(
                    CheckKind::CheckpointOrder,
                    s,
                    x,
                    format!("checkpoint {x} does not exceed previous {p}"),
                ),
                _ => CheckResult::ok(CheckKind::CheckpointOrder, s, format!("x = {x}")),
            });
            prev_checkpoint = Some(x);
        }

        let previous = pos.checked_sub(1).map(|p| &trace.stages[p].set);
        let expected_added = match previous {
            Some(prev) => set.difference(prev),
            None => set.elements().to_vec(),
        };
        let recorded = FiniteBasis::new(stage.added.iter().copied());
        let mismatch = expected_added
            .iter()
            .copied()
            .find(|e| !recorded.contains(*e))
            .or_else(|| {
                recorded
                    .iter()
                    .find(|e| expected_added.binary_search(e).is_err())
            });
        checks.push(match mismatch {
            Some(e) => CheckResult::fail(
                CheckKind::AddedConsistency,
                s,
                e,
                format!("element {e} differs between the recorded additions and the set difference"),
            ),
            None => CheckResult::ok(
                CheckKind::AddedConsistency,
                s,
                format!("{} elements added", expected_added.len()),
            ),
        });

        if let Some(prev) = previous {
            checks.push(match prev.first_missing_from(set) {
                Some(e) => CheckResult::fail(
                    CheckKind::Nesting,
                    s,
                    e,
                    format!("element {e} of stage {} is missing", stage.index - 1),
                ),
                None => CheckResult::ok(CheckKind::Nesting, s, "contains previous stage"),
            });

            let d = check_decomposition(prev, &expected_added, stage.kind);
            checks.push(CheckResult {
                check: CheckKind::Decomposition,
                detail: d.detail,
                pass: d.pass,
                stage: s,
                witness: d.witness,
            });
        }
    }

    Ok(InvariantReport::from_checks(checks))
}

/// Outcome of [`check_decomposition`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecompositionReport {
    pub pass: bool,
    pub witness: Option<i128>,
    pub detail: String,
}

impl DecompositionReport {
    fn ok(detail: impl Into<String>) -> Self {
        Self {
            pass: true,
            witness: None,
            detail: detail.into(),
        }
    }

    fn fail(witness: i128, detail: impl Into<String>) -> Self {
        Self {
            pass: false,
            witness: Some(witness),
            detail: detail.into(),
        }
    }
}

fn first_common(a: &FiniteBasis, b: &FiniteBasis, skip: Option<i128>) -> Option<i128> {
    a.iter().find(|&n| Some(n) != skip && b.contains(n))
}

/// Splits `2(A ∪ added)` into `2A`, `A + added` and `2·added`, checks they are
/// disjoint, and checks the piecewise formula for `r_B` against the
/// brute-force profile of `B = A ∪ added`.
///
/// For a target extension `added = {-c, c + u}`, `u` is recovered as the sum
/// of the pair; `u` itself may already lie in `2A`, and the formula is
/// `r_B(u) = r_A(u) + 1`, `r_B = r_A` on the rest of `2A`, and `1` elsewhere
/// on `2B`. For a densification the formula is `r_A` on `2A` and `1`
/// elsewhere on `2B`.
pub fn check_decomposition(a: &FiniteBasis, added: &[i128], kind: StageKind) -> DecompositionReport {
    if kind == StageKind::Base {
        return DecompositionReport::ok("base stage: not applicable");
    }
    if added.is_empty() {
        return DecompositionReport::ok("no elements added");
    }
    let extra = FiniteBasis::new(added.iter().copied());
    if let Some(e) = first_common(&extra, a, None) {
        return DecompositionReport::fail(e, format!("added element {e} already present"));
    }

    let two_a = a.sumset(a);
    let cross = a.sumset(&extra);
    let two_extra = extra.sumset(&extra);

    let special = match kind {
        StageKind::TargetExtension => {
            if extra.len() != 2 {
                return DecompositionReport::fail(
                    extra.elements()[0],
                    format!("target extension must add exactly two elements, got {}", extra.len()),
                );
            }
            Some(extra.elements()[0] + extra.elements()[1])
        }
        _ => None,
    };

    if let Some(n) = first_common(&two_a, &cross, None) {
        return DecompositionReport::fail(n, format!("{n} lies in both 2A and A + added"));
    }
    if let Some(n) = first_common(&cross, &two_extra, None) {
        return DecompositionReport::fail(n, format!("{n} lies in both A + added and 2 added"));
    }
    if let Some(n) = first_common(&two_extra, &two_a, special) {
        return DecompositionReport::fail(n, format!("{n} lies in both 2A and 2 added"));
    }

    let b = a.union(&extra);
    let profile_b = rep_profile(&b).expect("B is nonempty");
    let profile_a = rep_profile(a).ok();
    let r_a = |n: i128| profile_a.as_ref().map_or(0, |p| p.get(n));
    for (n, got) in profile_b.nonzero() {
        let expected = if Some(n) == special {
            r_a(n) + 1
        } else if two_a.contains(n) {
            r_a(n)
        } else {
            1
        };
        if got != expected {
            return DecompositionReport::fail(
                n,
                format!("r_B({n}) = {got}, piecewise formula gives {expected}"),
            );
        }
    }
    DecompositionReport::ok(format!(
        "2A ({}), A + added ({}), 2 added ({}) disjoint; r_B matches",
        two_a.len(),
        cross.len(),
        two_extra.len()
    ))
}

/// `k(k+1)/2 <= r(4x + 1)` with `k = A(-x, x)`.
///
/// Holds for every set with `r_A <= r`; a `false` means the representation
/// or counting machinery is broken.
pub fn upper_bound_check(a: &FiniteBasis, x: i128, r: u64) -> bool {
    let k = counting_closed(a, -x, x) as u128;
    let lhs = k * (k + 1) / 2;
    let rhs = (r as u128).saturating_mul(4 * x.max(0) as u128 + 1);
    lhs <= rhs
}

/// Finite-stage shadow of `r_A = f`.
///
/// For the final stage: every `n` whose finite `f(n)` occurrences all lie in
/// the covered prefix must have `r(n) = f(n)` exactly. Separately, every `n`
/// with `f(n) = 0` must be unrepresented at every stage.
pub fn check_equality_coverage(trace: &ConstructionTrace) -> InvariantReport {
    let mut checks = Vec::new();
    let Some(last) = trace.final_stage() else {
        return InvariantReport::from_checks(checks);
    };
    let prefix = target_prefix(&trace.f, last.m_covered);
    let profile = rep_profile(&last.set).ok();
    let r = |n: i128| profile.as_ref().map_or(0, |p| p.get(n));

    let mut exhausted: Vec<i128> = prefix
        .iter()
        .copied()
        .filter(|&n| trace.f.get(n) == Multiplicity::Finite(occurrences(&prefix, n)))
        .collect();
    exhausted.sort_unstable();
    exhausted.dedup();
    let bad = exhausted
        .iter()
        .copied()
        .find(|&n| trace.f.get(n) != Multiplicity::Finite(r(n)));
    checks.push(match bad {
        Some(n) => CheckResult::fail(
            CheckKind::EqualityCoverage,
            Some(last.index),
            n,
            format!("r({n}) = {} but f({n}) = {}", r(n), trace.f.get(n)),
        ),
        None => CheckResult::ok(
            CheckKind::EqualityCoverage,
            Some(last.index),
            format!("r = f on {} fully covered values", exhausted.len()),
        ),
    });

    let zeros: Vec<i128> = trace.f.zeros().collect();
    let hit = trace.stages.iter().find_map(|stage| {
        let p = rep_profile(&stage.set).ok()?;
        zeros
            .iter()
            .copied()
            .find(|&n| p.get(n) > 0)
            .map(|n| (stage.index, n))
    });
    checks.push(match hit {
        Some((index, n)) => CheckResult::fail(
            CheckKind::EqualityCoverage,
            Some(index),
            n,
            format!("f({n}) = 0 but {n} is represented"),
        ),
        None => CheckResult::ok(
            CheckKind::EqualityCoverage,
            None,
            format!("{} zeros of f unrepresented at every stage", zeros.len()),
        ),
    });
    InvariantReport::from_checks(checks)
}
