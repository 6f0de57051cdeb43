//! Replayable move logs.
//!
//! A [`MoveTrace`] stores the starting presentation and one step per applied
//! move, with canonical hashes before and after. [`replay`] re-applies every
//! step and fails on the first hash that does not match.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::canonical::{hash, Digest};
use crate::diagram::Presentation;
use crate::moves::{Move, MoveError};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    #[serde(flatten)]
    pub mv: Move,
    pub pre_hash: Digest,
    pub post_hash: Digest,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveTrace {
    pub initial: Presentation,
    pub steps: Vec<TraceStep>,
}

impl MoveTrace {
    pub fn empty(initial: Presentation) -> Self {
        MoveTrace {
            initial,
            steps: Vec::new(),
        }
    }

    /// Hash of the final state as recorded (no replay).
    pub fn final_hash(&self) -> Digest {
        self.steps
            .last()
            .map_or_else(|| hash(&self.initial), |s| s.post_hash)
    }

    pub fn count(&self, name: &str) -> usize {
        self.steps.iter().filter(|s| s.mv.name() == name).count()
    }
}

/// How a [`Move`] acts on a presentation. [`StandardRules`] is the only
/// implementation outside tests; others exist to inject faults.
pub trait MoveRules {
    fn apply(&self, mv: &Move, p: &Presentation) -> Result<Presentation, MoveError>;
}

#[derive(Clone, Copy, Debug, Default)]
pub struct StandardRules;

impl MoveRules for StandardRules {
    fn apply(&self, mv: &Move, p: &Presentation) -> Result<Presentation, MoveError> {
        mv.apply(p)
    }
}

#[derive(Debug, Error)]
pub enum ReplayError {
    #[error("step {step}: initial state hash {found} does not match recorded {expected}")]
    PreHashMismatch {
        step: usize,
        expected: Digest,
        found: Digest,
    },
    #[error("step {step}: result hash {found} does not match recorded {expected}")]
    PostHashMismatch {
        step: usize,
        expected: Digest,
        found: Digest,
    },
    #[error("step {step} ({name}): {source}")]
    Move {
        step: usize,
        name: &'static str,
        #[source]
        source: MoveError,
    },
}

/// Applies moves to a running state while building a trace.
pub struct Recorder<R: MoveRules = StandardRules> {
    rules: R,
    initial: Presentation,
    states: Vec<Presentation>,
    steps: Vec<TraceStep>,
    current_hash: Digest,
}

impl Recorder<StandardRules> {
    pub fn new(initial: Presentation) -> Self {
        Recorder::with_rules(initial, StandardRules)
    }
}

impl<R: MoveRules> Recorder<R> {
    pub fn with_rules(initial: Presentation, rules: R) -> Self {
        let current_hash = hash(&initial);
        Recorder {
            rules,
            states: vec![initial.clone()],
            initial,
            steps: Vec::new(),
            current_hash,
        }
    }

    pub fn current(&self) -> &Presentation {
        self.states.last().expect("never empty")
    }

    pub fn steps(&self) -> &[TraceStep] {
        &self.steps
    }

    pub fn apply(&mut self, mv: Move) -> Result<&Presentation, MoveError> {
        let next = self.rules.apply(&mv, self.current())?;
        Ok(self.push(mv, next))
    }

    /// Records a move whose result was computed by the caller (used when the
    /// caller also needs the ids a move allocates). Replay checks it.
    pub fn push(&mut self, mv: Move, post: Presentation) -> &Presentation {
        let post_hash = hash(&post);
        self.steps.push(TraceStep {
            mv,
            pre_hash: self.current_hash,
            post_hash,
        });
        self.current_hash = post_hash;
        self.states.push(post);
        self.current()
    }

    pub fn undo(&mut self) -> Option<TraceStep> {
        let step = self.steps.pop()?;
        self.states.pop();
        self.current_hash = step.pre_hash;
        Some(step)
    }

    pub fn finish(self) -> (Presentation, MoveTrace) {
        let Recorder {
            mut states,
            initial,
            steps,
            ..
        } = self;
        let last = states.pop().expect("never empty");
        (last, MoveTrace { initial, steps })
    }
}

pub fn replay(trace: &MoveTrace) -> Result<Presentation, ReplayError> {
    replay_with(trace, &StandardRules, |_, _, _| {})
}

/// Replays `trace` under `rules`, calling `visit(step, pre, post)` after each
/// step whose hashes check out.
pub fn replay_with<R: MoveRules>(
    trace: &MoveTrace,
    rules: &R,
    mut visit: impl FnMut(usize, &Presentation, &Presentation),
) -> Result<Presentation, ReplayError> {
    let mut state = trace.initial.clone();
    let mut state_hash = hash(&state);
    for (i, step) in trace.steps.iter().enumerate() {
        if state_hash != step.pre_hash {
            return Err(ReplayError::PreHashMismatch {
                step: i,
                expected: step.pre_hash,
                found: state_hash,
            });
        }
        let next = rules
            .apply(&step.mv, &state)
            .map_err(|source| ReplayError::Move {
                step: i,
                name: step.mv.name(),
                source,
            })?;
        let next_hash = hash(&next);
        if next_hash != step.post_hash {
            return Err(ReplayError::PostHashMismatch {
                step: i,
                expected: step.post_hash,
                found: next_hash,
            });
        }
        visit(i, &state, &next);
        state = next;
        state_hash = next_hash;
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{ChordId, Coefficient, LegendrianObject, Rational, ReebChord, Role};

    fn start() -> Presentation {
        let mut p = Presentation::new(3);
        p.add_handle(0);
        let h = p.add_handle(3);
        let a = p.add_legendrian(
            LegendrianObject::new("lambda", 2, Role::Attaching, Coefficient::Minus1).attached(h),
        );
        let b = p.add_legendrian(LegendrianObject::new(
            "lambda_plus",
            2,
            Role::CarvePlus,
            Coefficient::Plus1,
        ));
        p.add_chord(ReebChord {
            id: ChordId(0),
            from: a,
            to: b,
            local_index: 1,
            length: Rational::integer(1),
            bounded: true,
            degenerate: false,
            grading: 0,
            site: None,
        });
        p
    }

    #[test]
    fn record_replay_roundtrip() {
        let mut r = Recorder::new(start());
        r.apply(Move::BoatMove { chord: ChordId(0) }).unwrap();
        let (end, trace) = r.finish();
        let json = serde_json::to_string(&trace).unwrap();
        assert!(json.contains(r#""move":"boat_move","params":{"chord":0}"#));
        let back: MoveTrace = serde_json::from_str(&json).unwrap();
        assert_eq!(back, trace);
        assert_eq!(replay(&back).unwrap(), end);
        assert_eq!(trace.final_hash(), hash(&end));
    }

    #[test]
    fn undo_restores_state_and_hash() {
        let p = start();
        let mut r = Recorder::new(p.clone());
        r.apply(Move::BoatMove { chord: ChordId(0) }).unwrap();
        assert!(r.undo().is_some());
        assert!(r.undo().is_none());
        assert_eq!(r.current(), &p);
        let (_, trace) = r.finish();
        assert!(trace.steps.is_empty());
        assert_eq!(trace.final_hash(), hash(&p));
    }

    #[test]
    fn failed_move_leaves_recorder_unchanged() {
        let mut r = Recorder::new(start());
        assert!(r.apply(Move::BoatMove { chord: ChordId(9) }).is_err());
        assert!(r.steps().is_empty());
    }

    #[test]
    fn tampered_hash_detected() {
        let mut r = Recorder::new(start());
        r.apply(Move::BoatMove { chord: ChordId(0) }).unwrap();
        let (_, mut trace) = r.finish();
        trace.steps[0].post_hash = Digest(trace.steps[0].post_hash.0 ^ 1);
        assert!(matches!(
            replay(&trace),
            Err(ReplayError::PostHashMismatch { step: 0, .. })
        ));
    }
}
