//! End-to-end constructions: carving a Lagrangian disk out of a presentation
//! and building P-loose Legendrians.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagram::{
    ChordId, Coefficient, HandleId, LegendrianId, LegendrianObject, LinkingNote, Presentation, Role,
};
use crate::invariants::{census, census_delta, critical_attaching};
use crate::morse::{insert_region, MooreSpaceSpec, MorseError};
use crate::moves::{self, Move, MoveError, Obstruction};
use crate::trace::{MoveTrace, Recorder};
use crate::validate::{validate, Violation};

/// A presentation with its carving disk boundary marked `CarvePlus`.
/// Legendrians in `carry` also traverse the new (n-1)-handle once, as when
/// the disk's boundary runs through a Legendrian's own neighbourhood.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CarveInput {
    #[serde(flatten)]
    pub presentation: Presentation,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub carry: Vec<LegendrianId>,
}

impl From<Presentation> for CarveInput {
    fn from(presentation: Presentation) -> Self {
        CarveInput {
            presentation,
            carry: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CarveStats {
    pub boat_count: usize,
    pub slide_count: usize,
    /// Chord sites a boat-and-slide was performed at, counting index-0
    /// chords as trivial boats.
    pub boat_sites: Vec<String>,
    pub handle_delta: BTreeMap<u32, i64>,
    pub attaching_correspondence: BTreeMap<LegendrianId, LegendrianId>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CarveReport {
    pub result: Presentation,
    pub trace: MoveTrace,
    pub stats: CarveStats,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ParallelStats {
    pub boats: usize,
    pub slides: usize,
    pub sites: Vec<String>,
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("input fails validation: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error("no CarvePlus Legendrian in input")]
    NoCarvePlus,
    #[error("several CarvePlus Legendrians: {0:?}")]
    AmbiguousCarvePlus(Vec<LegendrianId>),
    #[error("chord {0} is degenerate; perturb it first")]
    DegenerateChordPresent(ChordId),
    #[error("pair cannot be made parallel by slides: {}", .0.iter().map(|o| o.to_string()).collect::<Vec<_>>().join("; "))]
    Unprocessable(Vec<Obstruction>),
    #[error("carried Legendrian {0} does not exist")]
    UnknownCarry(LegendrianId),
    #[error(transparent)]
    Move(#[from] MoveError),
    #[error(transparent)]
    Morse(#[from] MorseError),
    #[error("n = {0}: need n >= 3")]
    InvalidDimension(u32),
    #[error("Moore space data has no entries")]
    EmptyMoore,
}

impl PipelineError {
    /// Stable machine-readable error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            PipelineError::Invalid(_) => "invalid_input",
            PipelineError::NoCarvePlus => "no_carve_plus",
            PipelineError::AmbiguousCarvePlus(_) => "ambiguous_carve_plus",
            PipelineError::DegenerateChordPresent(_) => "degenerate_chord_present",
            PipelineError::Unprocessable(_) => "unprocessable",
            PipelineError::UnknownCarry(_) => "unknown_carry",
            PipelineError::Move(_) => "move_error",
            PipelineError::Morse(_) => "morse_error",
            PipelineError::InvalidDimension(_) => "invalid_dimension",
            PipelineError::EmptyMoore => "empty_moore",
        }
    }
}

/// Slides away every bounded chord into `minus` (shortest first, boating
/// saddles to maxima) and then cancels the pair.
pub fn parallelize(
    p: &Presentation,
    plus: LegendrianId,
    minus: LegendrianId,
) -> Result<(Presentation, MoveTrace, ParallelStats), PipelineError> {
    let mut rec = Recorder::new(p.clone());
    let stats = parallelize_on(&mut rec, plus, minus)?;
    let (result, trace) = rec.finish();
    Ok((result, trace, stats))
}

pub fn parallelize_on(
    rec: &mut Recorder,
    plus: LegendrianId,
    minus: LegendrianId,
) -> Result<ParallelStats, PipelineError> {
    let mut stats = ParallelStats::default();
    loop {
        let p = rec.current();
        let obstructions = moves::parallel_obstructions(p, plus, minus);
        if obstructions.is_empty() {
            break;
        }
        let slideable = |o: &Obstruction| match o {
            Obstruction::BoundedChord { chord } => p.chords[chord].to == minus,
            _ => false,
        };
        if !obstructions.iter().all(slideable) {
            return Err(PipelineError::Unprocessable(obstructions));
        }
        let next = p
            .chords_into(minus)
            .filter(|c| c.bounded)
            .min_by_key(|c| c.order_key())
            .expect("an obstructing chord exists");
        if next.degenerate {
            return Err(PipelineError::DegenerateChordPresent(next.id));
        }
        let (id, slider, index) = (next.id, next.from, next.local_index);
        let site = next
            .site
            .as_ref()
            .map_or_else(|| id.to_string(), |s| s.to_string());
        let before = p.chords.len();
        if index > 0 {
            rec.apply(Move::BoatMove { chord: id })?;
            stats.boats += 1;
        }
        let after = rec.apply(Move::HandleslideMinus {
            slider,
            over: minus,
            at: id,
        })?;
        assert_eq!(
            after.chords.len() + 1,
            before,
            "each slide removes exactly one chord"
        );
        stats.slides += 1;
        stats.sites.push(site);
    }
    rec.apply(Move::CancelPlusMinus { plus, minus })?;
    Ok(stats)
}

fn add_pair(rec: &mut Recorder, plus: LegendrianId) -> Result<(HandleId, LegendrianId), MoveError> {
    let index = rec.current().n() - 1;
    let (q, h, m) = moves::add_cancelling_pair(rec.current(), plus)?;
    rec.push(
        Move::AddCancellingPair {
            index,
            parallel_to: plus,
        },
        q,
    );
    Ok((h, m))
}

pub fn find_carve_plus(p: &Presentation) -> Result<LegendrianId, PipelineError> {
    let plus: Vec<LegendrianId> = p
        .legendrians
        .values()
        .filter(|l| l.role == Role::CarvePlus)
        .map(|l| l.id)
        .collect();
    match plus[..] {
        [] => Err(PipelineError::NoCarvePlus),
        [one] => Ok(one),
        _ => Err(PipelineError::AmbiguousCarvePlus(plus)),
    }
}

/// Removes the regular Lagrangian disk bounded by the `CarvePlus` Legendrian.
pub fn carve(input: &CarveInput) -> Result<CarveReport, PipelineError> {
    let p = &input.presentation;
    let violations = validate(p);
    if !violations.is_empty() {
        return Err(PipelineError::Invalid(violations));
    }
    let plus = find_carve_plus(p)?;
    if let Some(c) = p.chords.values().find(|c| c.degenerate) {
        return Err(PipelineError::DegenerateChordPresent(c.id));
    }
    if let Some(l) = input.carry.iter().find(|l| p.legendrian(**l).is_none()) {
        return Err(PipelineError::UnknownCarry(*l));
    }

    let mut rec = Recorder::new(p.clone());
    let (h, minus) = add_pair(&mut rec, plus)?;
    let mut who = vec![plus, minus];
    who.extend(&input.carry);
    rec.apply(Move::RerouteOverHandle { who, handle: h })?;
    let stats = parallelize_on(&mut rec, plus, minus)?;
    for l in &input.carry {
        while rec.current().legendrians[l].passes(h) >= 2 {
            rec.apply(Move::CuspPassOverHandle { leg: *l, handle: h })?;
        }
    }
    let (result, trace) = rec.finish();

    let correspondence = critical_attaching(p)
        .into_iter()
        .filter(|l| result.legendrians.contains_key(l))
        .map(|l| (l, l))
        .collect();
    let handle_delta = census_delta(&census(p), &census(&result), p.n());
    Ok(CarveReport {
        result,
        trace,
        stats: CarveStats {
            boat_count: stats.boats,
            slide_count: stats.slides,
            boat_sites: stats.sites,
            handle_delta,
            attaching_correspondence: correspondence,
            warnings: Vec::new(),
        },
    })
}

struct PlooseEntry {
    lambda: LegendrianId,
    plus: LegendrianId,
}

/// Diagram of the Legendrian/carving pairs, one per entry of `moore`, each
/// with the Moore-space chords.
pub fn ploose_input(moore: &MooreSpaceSpec, n: u32) -> Result<Presentation, PipelineError> {
    ploose_diagram(moore, n).map(|(p, _)| p)
}

fn ploose_diagram(
    moore: &MooreSpaceSpec,
    n: u32,
) -> Result<(Presentation, Vec<PlooseEntry>), PipelineError> {
    if n < 3 {
        return Err(PipelineError::InvalidDimension(n));
    }
    if moore.p.is_empty() {
        return Err(PipelineError::EmptyMoore);
    }
    let mut p = Presentation::new(n);
    p.add_handle(0);
    let mut entries = Vec::new();
    for (i, value) in moore.p.iter().enumerate() {
        let group = format!("ploose.{i}");
        let lambda = p.add_legendrian(
            LegendrianObject::new(
                format!("lambda.{i}"),
                n - 1,
                Role::Auxiliary,
                Coefficient::Minus1,
            )
            .in_group(group.clone()),
        );
        let plus = p.add_legendrian(
            LegendrianObject::new(
                format!("lambda_plus.{i}"),
                n - 1,
                Role::CarvePlus,
                Coefficient::Plus1,
            )
            .in_group(group),
        );
        let region = moore.region(i, n - 1).expect("entry exists");
        p = insert_region(&p, &region, lambda, plus)?;
        p.regions.last_mut().expect("just recorded").moore = Some(MooreSpaceSpec::single(*value));
        p.linking_notes.push(LinkingNote {
            subjects: vec![format!("lambda.{i}")],
            note: format!("p = {value}"),
        });
        entries.push(PlooseEntry { lambda, plus });
    }
    Ok((p, entries))
}

/// Builds the P-loose Legendrian: one carve per Moore-space entry, the new
/// handle cancelled against a flexible handle, then connected sums.
pub fn construct_ploose(moore: &MooreSpaceSpec, n: u32) -> Result<CarveReport, PipelineError> {
    let (p, entries) = ploose_diagram(moore, n)?;
    let mut warnings = Vec::new();
    if n < 5 {
        warnings.push(format!(
            "n = {n} < 5: the Moore space may not embed in the (n-1)-sphere"
        ));
    }

    let mut rec = Recorder::new(p.clone());
    let mut total = ParallelStats::default();
    for (entry, value) in entries.iter().zip(&moore.p) {
        let (h, minus) = add_pair(&mut rec, entry.plus)?;
        rec.apply(Move::RerouteOverHandle {
            who: vec![entry.plus, minus],
            handle: h,
        })?;
        let stats = parallelize_on(&mut rec, entry.plus, minus)?;
        total.boats += stats.boats;
        total.slides += stats.slides;
        total.sites.extend(stats.sites);
        if *value == 0 {
            rec.apply(Move::CuspPassOverHandle {
                leg: entry.lambda,
                handle: h,
            })?;
        }
        let (q, _, flex) = moves::attach_flexible(rec.current(), h)?;
        rec.push(Move::AttachFlexible { through: h }, q);
        while rec.current().legendrians[&entry.lambda].passes(h) > 0 {
            rec.apply(Move::SlideOffHandle {
                leg: entry.lambda,
                over_flex: flex,
            })?;
        }
        rec.apply(Move::CancelHandleLegendrian {
            handle: h,
            leg: flex,
        })?;
    }
    let into = entries[0].lambda;
    for entry in &entries[1..] {
        rec.apply(Move::ConnectSum {
            into,
            from: entry.lambda,
        })?;
    }
    let (result, trace) = rec.finish();
    let handle_delta = census_delta(&census(&p), &census(&result), n);
    Ok(CarveReport {
        result,
        trace,
        stats: CarveStats {
            boat_count: total.boats,
            slide_count: total.slides,
            boat_sites: total.sites,
            handle_delta,
            attaching_correspondence: BTreeMap::new(),
            warnings,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{Decoration, Rational, ReebChord, TopoType};
    use crate::invariants::{check_carve_shape, detect_loose, LooseRule, Looseness};
    use crate::trace::replay;

    fn input(indices: &[u32]) -> CarveInput {
        let mut p = Presentation::new(3);
        p.add_handle(0);
        let h = p.add_handle(3);
        let a = p.add_legendrian(
            LegendrianObject::new("lambda", 2, Role::Attaching, Coefficient::Minus1).attached(h),
        );
        let plus = p.add_legendrian(LegendrianObject::new(
            "lambda_plus",
            2,
            Role::CarvePlus,
            Coefficient::Plus1,
        ));
        for (i, j) in indices.iter().enumerate() {
            p.add_chord(ReebChord {
                id: ChordId(0),
                from: a,
                to: plus,
                local_index: *j,
                length: Rational::integer(10 - i as i64),
                bounded: true,
                degenerate: false,
                grading: *j as i64,
                site: None,
            });
        }
        p.into()
    }

    #[test]
    fn counts_follow_indices() {
        for (indices, boats) in [
            (&[0][..], 0),
            (&[0, 1][..], 1),
            (&[0, 1, 2][..], 2),
            (&[][..], 0),
        ] {
            let r = carve(&input(indices)).unwrap();
            assert_eq!(r.stats.boat_count, boats);
            assert_eq!(r.stats.slide_count, indices.len());
            assert_eq!(r.trace.count("boat_move"), boats);
            assert!(r.result.chords.is_empty());
            let inp = input(indices);
            check_carve_shape(
                &inp.presentation,
                &r.result,
                &r.stats.attaching_correspondence,
            )
            .unwrap();
            assert_eq!(replay(&r.trace).unwrap(), r.result);
        }
    }

    #[test]
    fn shortest_chord_goes_first() {
        // Lengths decrease with declaration order, so the index-2 chord is first.
        let r = carve(&input(&[0, 1, 2])).unwrap();
        assert_eq!(r.trace.steps[2].mv, Move::BoatMove { chord: ChordId(2) });
    }

    #[test]
    fn boats_recorded_per_saddle() {
        let r = carve(&input(&[0, 1, 2])).unwrap();
        let l = r.result.legendrian_by_name("lambda").unwrap();
        let boats: Vec<_> = l
            .decorations
            .iter()
            .filter_map(|d| match d {
                Decoration::Boat { m, k, .. } => Some((*m, *k)),
                _ => None,
            })
            .collect();
        assert_eq!(boats, vec![(2, 0), (2, 1)]);
        assert_eq!(l.topo_type, TopoType::ConnectSumOfUnknots { components: 4 });
        assert_eq!(
            l.handle_passes.values().copied().collect::<Vec<_>>(),
            vec![3]
        );
    }

    #[test]
    fn degenerate_input_rejected() {
        let mut inp = input(&[0]);
        inp.presentation
            .chords
            .get_mut(&ChordId(0))
            .unwrap()
            .degenerate = true;
        assert!(matches!(
            carve(&inp),
            Err(PipelineError::DegenerateChordPresent(_))
        ));
    }

    #[test]
    fn missing_plus_rejected() {
        let mut p = Presentation::new(3);
        p.add_handle(0);
        assert!(matches!(carve(&p.into()), Err(PipelineError::NoCarvePlus)));
    }

    #[test]
    fn ploose_single_entry_shape() {
        for value in [0u32, 3] {
            let r = construct_ploose(&MooreSpaceSpec::single(value), 5).unwrap();
            assert_eq!(r.result.legendrians.len(), 1);
            let (id, l) = r.result.legendrians.iter().next().unwrap();
            assert_eq!(l.topo_type, TopoType::ConnectSumOfUnknots { components: 4 });
            assert_eq!(r.stats.boat_sites.len(), 3);
            assert_eq!(r.stats.boat_count, 2);
            assert!(r.stats.warnings.is_empty());
            let verdict = detect_loose(&r.result, *id);
            if value == 0 {
                assert_eq!(verdict, Looseness::Loose(LooseRule::L3));
            } else {
                assert_eq!(verdict, Looseness::Unknown);
            }
            assert_eq!(r.result.linking_notes[0].note, format!("p = {value}"));
        }
    }

    #[test]
    fn ploose_small_n_warns() {
        let r = construct_ploose(&MooreSpaceSpec::single(1), 3).unwrap();
        assert_eq!(r.stats.warnings.len(), 1);
        assert!(matches!(
            construct_ploose(&MooreSpaceSpec::single(1), 2),
            Err(PipelineError::InvalidDimension(2))
        ));
    }

    #[test]
    fn ploose_multi_entry_sums() {
        let r = construct_ploose(&MooreSpaceSpec { p: vec![2, 3] }, 4).unwrap();
        assert_eq!(r.result.legendrians.len(), 1);
        let l = r.result.legendrians.values().next().unwrap();
        assert_eq!(l.topo_type, TopoType::ConnectSumOfUnknots { components: 8 });
        assert_eq!(r.stats.boat_sites.len(), 6);
        assert_eq!(replay(&r.trace).unwrap(), r.result);
    }

    #[test]
    fn carve_input_json_roundtrip() {
        let mut inp = input(&[0, 1]);
        inp.carry = vec![LegendrianId(0)];
        let json = serde_json::to_string(&inp).unwrap();
        assert!(json.contains(r#""carry":[0]"#));
        let back: CarveInput = serde_json::from_str(&json).unwrap();
        assert_eq!(back, inp);
    }
}
