//! Batch runners over independent inputs.
//!
//! The `*_seq` functions always exist. With the `parallel` feature (on by
//! default) the `par_*` variants spread work over the rayon pool, and the
//! unprefixed entry points use them.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::canonical::Digest;
use crate::invariants::{check_grading, GradingViolation};
use crate::pipelines::{carve, CarveInput, CarveReport, PipelineError};
use crate::trace::{replay, MoveTrace, ReplayError};

pub type GradingResult = Result<Vec<GradingViolation>, ReplayError>;

pub fn carve_seq(inputs: &[CarveInput]) -> Vec<Result<CarveReport, PipelineError>> {
    inputs.iter().map(carve).collect()
}

pub fn check_seq(traces: &[MoveTrace]) -> Vec<GradingResult> {
    traces.iter().map(check_grading).collect()
}

/// Final hash of each replayed trace.
pub fn replay_seq(traces: &[MoveTrace]) -> Vec<Result<Digest, ReplayError>> {
    traces
        .iter()
        .map(|t| replay(t).map(|p| crate::canonical::hash(&p)))
        .collect()
}

#[cfg(feature = "parallel")]
pub fn par_carve(inputs: &[CarveInput]) -> Vec<Result<CarveReport, PipelineError>> {
    inputs.par_iter().map(carve).collect()
}

#[cfg(feature = "parallel")]
pub fn par_check(traces: &[MoveTrace]) -> Vec<GradingResult> {
    traces.par_iter().map(check_grading).collect()
}

#[cfg(feature = "parallel")]
pub fn par_replay(traces: &[MoveTrace]) -> Vec<Result<Digest, ReplayError>> {
    traces
        .par_iter()
        .map(|t| replay(t).map(|p| crate::canonical::hash(&p)))
        .collect()
}

pub fn carve_all(inputs: &[CarveInput]) -> Vec<Result<CarveReport, PipelineError>> {
    #[cfg(feature = "parallel")]
    return par_carve(inputs);
    #[cfg(not(feature = "parallel"))]
    return carve_seq(inputs);
}

pub fn check_all(traces: &[MoveTrace]) -> Vec<GradingResult> {
    #[cfg(feature = "parallel")]
    return par_check(traces);
    #[cfg(not(feature = "parallel"))]
    return check_seq(traces);
}

pub fn replay_all(traces: &[MoveTrace]) -> Vec<Result<Digest, ReplayError>> {
    #[cfg(feature = "parallel")]
    return par_replay(traces);
    #[cfg(not(feature = "parallel"))]
    return replay_seq(traces);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;

    #[test]
    fn batch_matches_sequential() {
        let mut r = random::rng(11);
        let inputs: Vec<_> = (0..24).map(|_| random::carve_input(&mut r)).collect();
        let seq: Vec<_> = carve_seq(&inputs).into_iter().map(|r| r.unwrap()).collect();
        let all: Vec<_> = carve_all(&inputs).into_iter().map(|r| r.unwrap()).collect();
        assert_eq!(seq, all);
        let traces: Vec<_> = seq.into_iter().map(|r| r.trace).collect();
        let a: Vec<_> = replay_seq(&traces)
            .into_iter()
            .map(|d| d.unwrap())
            .collect();
        let b: Vec<_> = replay_all(&traces)
            .into_iter()
            .map(|d| d.unwrap())
            .collect();
        assert_eq!(a, b);
        assert!(check_all(&traces)
            .into_iter()
            .all(|v| v.unwrap().is_empty()));
    }
}
