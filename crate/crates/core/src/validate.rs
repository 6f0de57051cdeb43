//! Invariant checks for presentations. Violations are data, not errors.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::diagram::{
    ChordId, Coefficient, Decoration, HandleId, HandleKind, LegendrianId, Presentation, Role,
};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum Violation {
    AmbientDimInvalid {
        ambient_dim: u32,
    },
    HandleIndexOutOfRange {
        handle: HandleId,
        index: u32,
    },
    HandleKindMismatch {
        handle: HandleId,
    },
    FlexibleSubcritical {
        handle: HandleId,
    },
    CriticalHandleAttachment {
        handle: HandleId,
        attaching: usize,
    },
    AttachmentInvalid {
        legendrian: LegendrianId,
        handle: HandleId,
    },
    AttachingWithoutHandle {
        legendrian: LegendrianId,
    },
    PlusCoefficientMisuse {
        legendrian: LegendrianId,
    },
    CarvePlusCoefficient {
        legendrian: LegendrianId,
    },
    LegendrianDimInvalid {
        legendrian: LegendrianId,
        dim: u32,
    },
    AttachingDimMismatch {
        legendrian: LegendrianId,
        dim: u32,
        expected: u32,
    },
    PassThroughInvalidHandle {
        legendrian: LegendrianId,
        handle: HandleId,
    },
    ZeroPassCount {
        legendrian: LegendrianId,
        handle: HandleId,
    },
    BoatOutOfRange {
        legendrian: LegendrianId,
        m: u32,
        k: u32,
    },
    EmptyLooseChart {
        legendrian: LegendrianId,
    },
    DanglingChordEndpoint {
        chord: ChordId,
        legendrian: LegendrianId,
    },
    SelfChord {
        chord: ChordId,
    },
    ChordIndexOutOfRange {
        chord: ChordId,
        index: u32,
        dim: u32,
    },
    NonPositiveLength {
        chord: ChordId,
    },
    DuplicateChordLength {
        to: LegendrianId,
        chords: Vec<ChordId>,
    },
    IdCounterBehind {
        kind: &'static str,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            AmbientDimInvalid { ambient_dim } => {
                write!(
                    f,
                    "ambient dimension {ambient_dim} is not an even integer >= 6"
                )
            }
            HandleIndexOutOfRange { handle, index } => {
                write!(f, "handle {handle} has index {index} outside [0, n]")
            }
            HandleKindMismatch { handle } => {
                write!(f, "handle {handle}: kind disagrees with its index")
            }
            FlexibleSubcritical { handle } => {
                write!(f, "handle {handle}: flexible but subcritical")
            }
            CriticalHandleAttachment { handle, attaching } => write!(
                f,
                "critical handle {handle} has {attaching} attaching (-1) Legendrians, expected 1"
            ),
            AttachmentInvalid { legendrian, handle } => write!(
                f,
                "Legendrian {legendrian} is bound to {handle}, which is missing or subcritical"
            ),
            AttachingWithoutHandle { legendrian } => {
                write!(
                    f,
                    "attaching Legendrian {legendrian} is not bound to a handle"
                )
            }
            PlusCoefficientMisuse { legendrian } => {
                write!(
                    f,
                    "Legendrian {legendrian} has a +1 coefficient but is not a carve boundary"
                )
            }
            CarvePlusCoefficient { legendrian } => {
                write!(
                    f,
                    "carve boundary {legendrian} must carry the +1 coefficient"
                )
            }
            LegendrianDimInvalid { legendrian, dim } => {
                write!(
                    f,
                    "Legendrian {legendrian} has dimension {dim} outside [1, n-1]"
                )
            }
            AttachingDimMismatch {
                legendrian,
                dim,
                expected,
            } => write!(
                f,
                "attaching Legendrian {legendrian} has dimension {dim}, expected {expected}"
            ),
            PassThroughInvalidHandle { legendrian, handle } => write!(
                f,
                "Legendrian {legendrian} passes through {handle}, which is missing or critical"
            ),
            ZeroPassCount { legendrian, handle } => {
                write!(
                    f,
                    "Legendrian {legendrian} records zero passes through {handle}"
                )
            }
            BoatOutOfRange { legendrian, m, k } => {
                write!(
                    f,
                    "Legendrian {legendrian} carries a ({m},{k})-boat with k outside [0, m]"
                )
            }
            EmptyLooseChart { legendrian } => {
                write!(
                    f,
                    "Legendrian {legendrian} carries a loose chart with count 0"
                )
            }
            DanglingChordEndpoint { chord, legendrian } => {
                write!(
                    f,
                    "chord {chord} references missing Legendrian {legendrian}"
                )
            }
            SelfChord { chord } => {
                write!(f, "chord {chord} starts and ends on the same Legendrian")
            }
            ChordIndexOutOfRange { chord, index, dim } => {
                write!(
                    f,
                    "chord {chord} has local index {index} outside [0, {dim}]"
                )
            }
            NonPositiveLength { chord } => write!(f, "chord {chord} has non-positive length"),
            DuplicateChordLength { to, chords } => {
                let ids: Vec<String> = chords.iter().map(|c| c.to_string()).collect();
                write!(f, "chords {} into {to} share a length", ids.join(", "))
            }
            IdCounterBehind { kind } => write!(f, "{kind} id counter is behind the ids in use"),
        }
    }
}

/// Returns every invariant violation of `p`; an empty list means valid.
pub fn validate(p: &Presentation) -> Vec<Violation> {
    let mut out = Vec::new();
    let n = p.n();
    if !p.ambient_dim.is_multiple_of(2) || p.ambient_dim < 6 {
        out.push(Violation::AmbientDimInvalid {
            ambient_dim: p.ambient_dim,
        });
    }

    for h in p.handles.values() {
        if h.index > n {
            out.push(Violation::HandleIndexOutOfRange {
                handle: h.id,
                index: h.index,
            });
        }
        let critical = h.index == n;
        if critical != (h.kind == HandleKind::Critical) {
            out.push(Violation::HandleKindMismatch { handle: h.id });
        }
        if h.flexible && h.kind != HandleKind::Critical {
            out.push(Violation::FlexibleSubcritical { handle: h.id });
        }
        if h.kind == HandleKind::Critical {
            let attaching = p
                .legendrians
                .values()
                .filter(|l| {
                    l.attached_to == Some(h.id)
                        && l.role == Role::Attaching
                        && l.coefficient == Coefficient::Minus1
                })
                .count();
            if attaching != 1 {
                out.push(Violation::CriticalHandleAttachment {
                    handle: h.id,
                    attaching,
                });
            }
        }
    }

    for l in p.legendrians.values() {
        if l.dim == 0 || l.dim + 1 > n.max(1) {
            out.push(Violation::LegendrianDimInvalid {
                legendrian: l.id,
                dim: l.dim,
            });
        }
        match l.attached_to {
            Some(h) => {
                let ok = p
                    .handles
                    .get(&h)
                    .is_some_and(|h| h.kind == HandleKind::Critical);
                if !ok {
                    out.push(Violation::AttachmentInvalid {
                        legendrian: l.id,
                        handle: h,
                    });
                }
            }
            None if l.role == Role::Attaching => {
                out.push(Violation::AttachingWithoutHandle { legendrian: l.id });
            }
            None => {}
        }
        if l.role == Role::Attaching && l.dim + 1 != n {
            out.push(Violation::AttachingDimMismatch {
                legendrian: l.id,
                dim: l.dim,
                expected: n.saturating_sub(1),
            });
        }
        if l.coefficient == Coefficient::Plus1 && l.role != Role::CarvePlus {
            out.push(Violation::PlusCoefficientMisuse { legendrian: l.id });
        }
        if l.role == Role::CarvePlus && l.coefficient != Coefficient::Plus1 {
            out.push(Violation::CarvePlusCoefficient { legendrian: l.id });
        }
        for (h, count) in &l.handle_passes {
            let ok = p
                .handles
                .get(h)
                .is_some_and(|h| h.kind == HandleKind::Subcritical);
            if !ok {
                out.push(Violation::PassThroughInvalidHandle {
                    legendrian: l.id,
                    handle: *h,
                });
            }
            if *count == 0 {
                out.push(Violation::ZeroPassCount {
                    legendrian: l.id,
                    handle: *h,
                });
            }
        }
        for d in &l.decorations {
            match d {
                Decoration::Boat { m, k, .. } if k > m => {
                    out.push(Violation::BoatOutOfRange {
                        legendrian: l.id,
                        m: *m,
                        k: *k,
                    });
                }
                Decoration::LooseChart { count: 0 } => {
                    out.push(Violation::EmptyLooseChart { legendrian: l.id });
                }
                _ => {}
            }
        }
    }

    let mut lengths: BTreeMap<(LegendrianId, _), Vec<ChordId>> = BTreeMap::new();
    for c in p.chords.values() {
        let mut endpoints_ok = true;
        for end in [c.from, c.to] {
            if !p.legendrians.contains_key(&end) {
                out.push(Violation::DanglingChordEndpoint {
                    chord: c.id,
                    legendrian: end,
                });
                endpoints_ok = false;
            }
        }
        if c.from == c.to {
            out.push(Violation::SelfChord { chord: c.id });
        }
        if endpoints_ok && !c.degenerate {
            let dim = p.legendrians[&c.from].dim;
            if c.local_index > dim {
                out.push(Violation::ChordIndexOutOfRange {
                    chord: c.id,
                    index: c.local_index,
                    dim,
                });
            }
        }
        if !c.length.is_positive() {
            out.push(Violation::NonPositiveLength { chord: c.id });
        }
        lengths.entry((c.to, c.length)).or_default().push(c.id);
    }
    for ((to, _), chords) in lengths {
        if chords.len() > 1 {
            out.push(Violation::DuplicateChordLength { to, chords });
        }
    }

    let behind = |next: u32, last: Option<u32>| last.is_some_and(|l| l >= next);
    if behind(p.next_ids.handle, p.handles.keys().last().map(|h| h.0)) {
        out.push(Violation::IdCounterBehind { kind: "handle" });
    }
    if behind(
        p.next_ids.legendrian,
        p.legendrians.keys().last().map(|l| l.0),
    ) {
        out.push(Violation::IdCounterBehind { kind: "legendrian" });
    }
    if behind(p.next_ids.chord, p.chords.keys().last().map(|c| c.0)) {
        out.push(Violation::IdCounterBehind { kind: "chord" });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{LegendrianObject, Rational, ReebChord};

    fn chord(from: LegendrianId, to: LegendrianId, len: i64) -> ReebChord {
        ReebChord {
            id: ChordId(0),
            from,
            to,
            local_index: 0,
            length: Rational::integer(len),
            bounded: true,
            degenerate: false,
            grading: 0,
            site: None,
        }
    }

    #[test]
    fn empty_presentation_is_valid() {
        assert!(validate(&Presentation::new(3)).is_empty());
    }

    #[test]
    fn dangling_chord_endpoint_reported() {
        let mut p = Presentation::new(3);
        let a = p.add_legendrian(LegendrianObject::new(
            "a",
            2,
            Role::Auxiliary,
            Coefficient::None,
        ));
        p.add_chord(chord(a, LegendrianId(7), 1));
        assert_eq!(
            validate(&p),
            vec![Violation::DanglingChordEndpoint {
                chord: ChordId(0),
                legendrian: LegendrianId(7)
            }]
        );
    }

    #[test]
    fn critical_handle_needs_one_attaching_sphere() {
        let mut p = Presentation::new(3);
        let h = p.add_handle(3);
        assert_eq!(
            validate(&p),
            vec![Violation::CriticalHandleAttachment {
                handle: h,
                attaching: 0
            }]
        );
        p.add_legendrian(
            LegendrianObject::new("l", 2, Role::Attaching, Coefficient::Minus1).attached(h),
        );
        assert!(validate(&p).is_empty());
    }

    #[test]
    fn plus_coefficient_only_on_carve_boundary() {
        let mut p = Presentation::new(3);
        p.add_legendrian(LegendrianObject::new(
            "x",
            2,
            Role::Auxiliary,
            Coefficient::Plus1,
        ));
        assert!(matches!(
            validate(&p)[..],
            [Violation::PlusCoefficientMisuse { .. }]
        ));
    }

    #[test]
    fn duplicate_lengths_into_same_target() {
        let mut p = Presentation::new(3);
        let a = p.add_legendrian(LegendrianObject::new(
            "a",
            2,
            Role::Auxiliary,
            Coefficient::None,
        ));
        let b = p.add_legendrian(LegendrianObject::new(
            "b",
            2,
            Role::Auxiliary,
            Coefficient::None,
        ));
        p.add_chord(chord(a, b, 2));
        p.add_chord(chord(a, b, 2));
        assert!(matches!(
            validate(&p)[..],
            [Violation::DuplicateChordLength { .. }]
        ));
    }

    #[test]
    fn passes_through_critical_handle_rejected() {
        let mut p = Presentation::new(3);
        let h = p.add_handle(3);
        let mut l = LegendrianObject::new("l", 2, Role::Attaching, Coefficient::Minus1).attached(h);
        l.handle_passes.insert(h, 1);
        p.add_legendrian(l);
        assert!(matches!(
            validate(&p)[..],
            [Violation::PassThroughInvalidHandle { .. }]
        ));
    }

    #[test]
    fn validate_is_idempotent() {
        let mut p = Presentation::new(2);
        p.add_handle(5);
        let first = validate(&p);
        assert_eq!(first, validate(&p));
        assert!(!first.is_empty());
    }
}
