//! Symbolic rewriting engine for Weinstein handle presentations.
//!
//! A [`Presentation`] is a handle diagram together with Legendrian attaching
//! data and Reeb chords. [`moves`] rewrites it one step at a time,
//! [`pipelines`] chains moves into the carving and P-loose constructions, and
//! [`invariants`] checks what the rewrites must preserve.

pub mod batch;
pub mod canonical;
pub mod diagram;
pub mod fixtures;
pub mod invariants;
pub mod morse;
pub mod moves;
pub mod pipelines;
pub mod random;
pub mod trace;
pub mod validate;

pub use canonical::{hash, structural_equal, Digest};
pub use diagram::*;
pub use invariants::{census, detect_loose, HandleCensus, LooseRule, Looseness};
pub use moves::{Move, MoveError};
pub use pipelines::{carve, construct_ploose, CarveInput, CarveReport, PipelineError};
pub use trace::{replay, MoveTrace, Recorder};
pub use validate::{validate, Violation};
