//! Seeded generators for property tests, benches and the acceptance suite.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::diagram::{
    ChordId, ChordSite, HandleId, Coefficient, CuspStyle, Decoration, LegendrianId, LegendrianObject,
    LinkingNote, Presentation, Rational, ReebChord, Role, TopoType,
};
use crate::moves::{self, Move};
use crate::pipelines::CarveInput;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn fresh_length<R: Rng>(rng: &mut R, taken: &mut BTreeSet<Rational>) -> Rational {
    loop {
        let l = Rational::new(rng.gen_range(1..=400), rng.gen_range(1..=6));
        if taken.insert(l) {
            return l;
        }
    }
}

fn chord(
    from: LegendrianId,
    to: LegendrianId,
    index: u32,
    length: Rational,
    grading: i64,
) -> ReebChord {
    ReebChord {
        id: ChordId(0),
        from,
        to,
        local_index: index,
        length,
        bounded: true,
        degenerate: false,
        grading,
        site: None,
    }
}

/// T*D^n with 1-4 critical handles, each attaching sphere carrying 0-6
/// bounded chords of random index to the carving unknot, plus a few
/// unbounded chords between attaching spheres and optional subcritical
/// handles.
pub fn carve_input<R: Rng>(rng: &mut R) -> CarveInput {
    let n = rng.gen_range(3..=5);
    let m = n - 1;
    let mut p = Presentation::new(n);
    p.add_handle(0);
    for _ in 0..rng.gen_range(0..=2) {
        p.add_handle(rng.gen_range(1..n));
    }
    let mut spheres = Vec::new();
    for i in 0..rng.gen_range(1..=4) {
        let h = p.add_handle(n);
        let mut l = LegendrianObject::new(
            format!("lambda.{i}"),
            m,
            Role::Attaching,
            Coefficient::Minus1,
        )
        .attached(h);
        if rng.gen_bool(0.3) {
            l.topo_type = TopoType::Disk;
        }
        spheres.push(p.add_legendrian(l));
    }
    let plus = p.add_legendrian(LegendrianObject::new(
        "lambda_plus",
        m,
        Role::CarvePlus,
        Coefficient::Plus1,
    ));
    let mut into_plus = BTreeSet::new();
    for s in &spheres {
        for _ in 0..rng.gen_range(0..=6) {
            let len = fresh_length(rng, &mut into_plus);
            let idx = rng.gen_range(0..=m);
            p.add_chord(chord(*s, plus, idx, len, rng.gen_range(-5..=5)));
        }
    }
    if spheres.len() > 1 {
        let mut per_target = vec![BTreeSet::new(); spheres.len()];
        for _ in 0..rng.gen_range(0..=2) {
            let pick: Vec<usize> = (0..spheres.len())
                .collect::<Vec<_>>()
                .choose_multiple(rng, 2)
                .copied()
                .collect();
            let len = fresh_length(rng, &mut per_target[pick[1]]);
            let mut c = chord(
                spheres[pick[0]],
                spheres[pick[1]],
                rng.gen_range(0..=m),
                len,
                0,
            );
            c.bounded = false;
            p.add_chord(c);
        }
    }
    if rng.gen_bool(0.2) {
        p.linking_notes.push(LinkingNote {
            subjects: vec!["lambda.0".into(), "lambda_plus".into()],
            note: "linked in bounded region".into(),
        });
    }
    p.into()
}

/// A carve input with the cancelling pair already added and rerouted, ready
/// for slides. Returns the pair `(plus, minus)`.
pub fn slide_scene<R: Rng>(rng: &mut R) -> (Presentation, LegendrianId, LegendrianId) {
    let input = carve_input(rng);
    let p = input.presentation;
    let plus = p
        .legendrians
        .values()
        .find(|l| l.role == Role::CarvePlus)
        .expect("generated")
        .id;
    let (q, h, minus) = moves::add_cancelling_pair(&p, plus).expect("valid");
    let q = moves::reroute_over_handle(&q, &[plus, minus], h).expect("valid");
    (q, plus, minus)
}

/// Random presentation exercising every serialized field: decorations,
/// passes, groups, degenerate chords and regions.
pub fn presentation<R: Rng>(rng: &mut R) -> Presentation {
    let mut p = carve_input(rng).presentation;
    let n = p.n();
    let sub: Vec<_> = p
        .handles
        .values()
        .filter(|h| h.index + 1 == n)
        .map(|h| h.id)
        .collect();
    let sub = if sub.is_empty() {
        vec![p.add_handle(n - 1)]
    } else {
        sub
    };
    let ids: Vec<LegendrianId> = p.legendrians.keys().copied().collect();
    for id in ids {
        let l = p.legendrians.get_mut(&id).expect("present");
        if rng.gen_bool(0.5) {
            l.add_passes(*sub.choose(rng).expect("non-empty"), rng.gen_range(1..=3));
        }
        if rng.gen_bool(0.4) {
            l.parallel_group = Some(format!("g{}", rng.gen_range(0..2)));
        }
        for _ in 0..rng.gen_range(0..=3) {
            let d = match rng.gen_range(0..4) {
                0 => Decoration::Boat {
                    m: l.dim,
                    k: rng.gen_range(0..=l.dim),
                    site: rng.gen_bool(0.5).then(|| ChordSite {
                        component: "disk".into(),
                        point: 0,
                    }),
                },
                1 => Decoration::CuspConnectSum {
                    with: "lambda_minus".into(),
                    style: if rng.gen_bool(0.5) {
                        CuspStyle::CuspRing
                    } else {
                        CuspStyle::Cone
                    },
                    site: None,
                },
                2 => Decoration::LooseChart {
                    count: rng.gen_range(1..=2),
                },
                _ => Decoration::CuspPassedOverHandle {
                    handle: sub[0],
                    remaining: rng.gen_range(0..=2),
                    exclusive: rng.gen_bool(0.5),
                },
            };
            l.decorations.push(d);
        }
    }
    if let Some(c) = p.chords.values_mut().next() {
        if rng.gen_bool(0.2) {
            c.degenerate = true;
        }
    }
    p
}

/// A random move over the live objects of `p`. Parameters are drawn from
/// existing ids, so the move may or may not satisfy its preconditions.
pub fn random_move<R: Rng>(rng: &mut R, p: &Presentation) -> Option<Move> {
    let legs: Vec<LegendrianId> = p.legendrians.keys().copied().collect();
    let handles: Vec<HandleId> = p.handles.keys().copied().collect();
    let chords: Vec<ChordId> = p.chords.keys().copied().collect();
    let leg = |rng: &mut R| legs.choose(rng).copied();
    let handle = |rng: &mut R| handles.choose(rng).copied();
    let mv = match rng.gen_range(0..11) {
        0 => Move::BoatMove { chord: *chords.choose(rng)? },
        1 => {
            let c = &p.chords[chords.choose(rng)?];
            Move::HandleslideMinus { slider: c.from, over: c.to, at: c.id }
        }
        2 => Move::HandleslidePlus { slider: leg(rng)?, over: leg(rng)? },
        3 => Move::AddCancellingPair { index: p.n() - 1, parallel_to: leg(rng)? },
        4 => {
            let who = (0..rng.gen_range(0..=2)).filter_map(|_| leg(rng)).collect();
            Move::RerouteOverHandle { who, handle: handle(rng)? }
        }
        5 => Move::CancelPlusMinus { plus: leg(rng)?, minus: leg(rng)? },
        6 => Move::CancelHandleLegendrian { handle: handle(rng)?, leg: leg(rng)? },
        7 => Move::CuspPassOverHandle { leg: leg(rng)?, handle: handle(rng)? },
        8 => Move::AttachFlexible { through: handle(rng)? },
        9 => Move::SlideOffHandle { leg: leg(rng)?, over_flex: leg(rng)? },
        _ => Move::ConnectSum { into: leg(rng)?, from: leg(rng)? },
    };
    Some(mv)
}
