//! Checkers shared by the pipelines and the `check` command.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagram::{
    ChordId, CuspStyle, Decoration, HandleKind, LegendrianId, Presentation, Role,
};
use crate::morse::disconnect_check;
use crate::trace::{replay_with, MoveRules, MoveTrace, ReplayError, StandardRules};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HandleCensus {
    pub counts: BTreeMap<u32, u64>,
    pub euler: i64,
}

impl HandleCensus {
    pub fn count(&self, index: u32) -> u64 {
        self.counts.get(&index).copied().unwrap_or(0)
    }
}

impl fmt::Display for HandleCensus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .counts
            .iter()
            .map(|(i, c)| format!("{i}:{c}"))
            .collect();
        write!(f, "handles {{{}}} euler {}", parts.join(", "), self.euler)
    }
}

pub fn census(p: &Presentation) -> HandleCensus {
    let mut counts = BTreeMap::new();
    for h in p.handles.values() {
        *counts.entry(h.index).or_insert(0u64) += 1;
    }
    let euler = counts
        .iter()
        .map(|(i, c)| if i % 2 == 0 { *c as i64 } else { -(*c as i64) })
        .sum();
    HandleCensus { counts, euler }
}

/// Per-index change in handle count, for every index `0..=n`.
pub fn census_delta(before: &HandleCensus, after: &HandleCensus, n: u32) -> BTreeMap<u32, i64> {
    (0..=n)
        .map(|i| (i, after.count(i) as i64 - before.count(i) as i64))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LooseRule {
    /// An explicit loose chart.
    L1,
    /// Generated by a disconnected region whose disk chord was slid last.
    L2,
    /// In cancelling position with an (n-1)-handle.
    L3,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", content = "rule", rename_all = "snake_case")]
pub enum Looseness {
    Loose(LooseRule),
    Unknown,
}

impl Looseness {
    pub fn is_loose(self) -> bool {
        matches!(self, Looseness::Loose(_))
    }
}

impl fmt::Display for Looseness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Looseness::Loose(r) => write!(f, "Loose({r:?})"),
            Looseness::Unknown => f.write_str("Unknown"),
        }
    }
}

/// Syntactic looseness certificate for `leg`. `Unknown` never means
/// "not loose".
pub fn detect_loose(p: &Presentation, leg: LegendrianId) -> Looseness {
    let Some(l) = p.legendrian(leg) else {
        return Looseness::Unknown;
    };
    if l.decorations
        .iter()
        .any(|d| matches!(d, Decoration::LooseChart { .. }))
    {
        return Looseness::Loose(LooseRule::L1);
    }
    if rule_l2(p, leg) {
        return Looseness::Loose(LooseRule::L2);
    }
    if rule_l3(p, leg) {
        return Looseness::Loose(LooseRule::L3);
    }
    Looseness::Unknown
}

fn rule_l2(p: &Presentation, leg: LegendrianId) -> bool {
    let l = &p.legendrians[&leg];
    let last_site = l.decorations.iter().rev().find_map(|d| match d {
        Decoration::CuspConnectSum {
            style: CuspStyle::CuspRing,
            site: Some(site),
            ..
        } => Some(site),
        _ => None,
    });
    let Some(site) = last_site else {
        return false;
    };
    p.regions
        .iter()
        .filter(|r| r.on == l.name && disconnect_check(&r.spec))
        .any(|r| {
            r.spec
                .component(&site.component)
                .is_some_and(|c| c.is_disk())
        })
}

fn rule_l3(p: &Presentation, leg: LegendrianId) -> bool {
    let l = &p.legendrians[&leg];
    let recorded = l.decorations.iter().any(|d| {
        matches!(
            d,
            Decoration::CuspPassedOverHandle {
                remaining: 1,
                exclusive: true,
                ..
            }
        )
    });
    let n = p.n();
    recorded
        || l.handle_passes.iter().any(|(h, count)| {
            *count == 1
                && p.handles
                    .get(h)
                    .is_some_and(|h| h.kind == HandleKind::Subcritical && h.index + 1 == n)
                && p.passing(*h).iter().all(|(other, _)| *other == leg)
        })
}

/// Stored chord gradings. `correction_terms` is reserved for boat-cusp
/// Maslov corrections and stays empty.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradingLedger {
    pub gradings: BTreeMap<ChordId, i64>,
    pub correction_terms: Vec<(Decoration, i64)>,
}

impl GradingLedger {
    pub fn of(p: &Presentation) -> Self {
        GradingLedger {
            gradings: p.chords.values().map(|c| (c.id, c.grading)).collect(),
            correction_terms: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GradingViolation {
    pub step: usize,
    pub chord: ChordId,
    pub before: i64,
    pub after: i64,
}

impl fmt::Display for GradingViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "step {}: grading of {} changed from {} to {}",
            self.step, self.chord, self.before, self.after
        )
    }
}

pub fn check_grading(trace: &MoveTrace) -> Result<Vec<GradingViolation>, ReplayError> {
    check_grading_with(trace, &StandardRules)
}

/// Replays `trace` under `rules` and reports every surviving chord whose
/// stored grading changed.
pub fn check_grading_with<R: MoveRules>(
    trace: &MoveTrace,
    rules: &R,
) -> Result<Vec<GradingViolation>, ReplayError> {
    let mut out = Vec::new();
    replay_with(trace, rules, |step, pre, post| {
        for (id, c) in &post.chords {
            if let Some(old) = pre.chords.get(id) {
                if old.grading != c.grading {
                    out.push(GradingViolation {
                        step,
                        chord: *id,
                        before: old.grading,
                        after: c.grading,
                    });
                }
            }
        }
    })?;
    Ok(out)
}

/// Every nondegenerate chord satisfies `local_index + dual = m`.
pub fn index_duality_holds(p: &Presentation) -> bool {
    p.chords.values().filter(|c| !c.degenerate).all(|c| {
        let Some(m) = p.legendrian(c.from).map(|l| l.dim) else {
            return false;
        };
        c.dual_index(m).is_some_and(|d| d + c.local_index == m)
    })
}

/// Attaching spheres of critical handles.
pub fn critical_attaching(p: &Presentation) -> BTreeSet<LegendrianId> {
    p.legendrians
        .values()
        .filter(|l| l.role == Role::Attaching)
        .filter(|l| {
            p.handle_of(l.id)
                .is_some_and(|h| h.kind == HandleKind::Critical)
        })
        .map(|l| l.id)
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ShapeError {
    #[error("handle delta {0:?} is not exactly one new (n-1)-handle")]
    HandleDelta(BTreeMap<u32, i64>),
    #[error("attaching sphere {0} has no image")]
    Unmapped(LegendrianId),
    #[error("{0} is not an attaching sphere of the result")]
    BadImage(LegendrianId),
    #[error("two attaching spheres map to {0}")]
    NotInjective(LegendrianId),
    #[error("result attaching sphere {0} has no preimage")]
    NotSurjective(LegendrianId),
}

/// The carve contract: one extra (n-1)-handle and a bijection of critical
/// attaching spheres.
pub fn check_carve_shape(
    input: &Presentation,
    result: &Presentation,
    correspondence: &BTreeMap<LegendrianId, LegendrianId>,
) -> Result<(), ShapeError> {
    let n = input.n();
    let delta = census_delta(&census(input), &census(result), n);
    let ok = delta
        .iter()
        .all(|(i, d)| *d == if *i + 1 == n { 1 } else { 0 });
    if !ok {
        return Err(ShapeError::HandleDelta(delta));
    }
    let before = critical_attaching(input);
    let after = critical_attaching(result);
    let mut seen = BTreeSet::new();
    for l in &before {
        let image = *correspondence.get(l).ok_or(ShapeError::Unmapped(*l))?;
        if !after.contains(&image) {
            return Err(ShapeError::BadImage(image));
        }
        if !seen.insert(image) {
            return Err(ShapeError::NotInjective(image));
        }
    }
    if let Some(missing) = after.difference(&seen).next() {
        return Err(ShapeError::NotSurjective(*missing));
    }
    Ok(())
}
