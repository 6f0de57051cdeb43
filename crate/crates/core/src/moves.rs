//! Rewriting moves on presentations.
//!
//! Each move checks its preconditions and returns a new presentation; the
//! input is never modified. [`Move`] is the serializable form recorded in
//! traces, and [`Move::apply`] dispatches to the functions below.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagram::{
    ChordId, Coefficient, CuspStyle, Decoration, HandleId, HandleKind, LegendrianId,
    LegendrianObject, Presentation, Role, TopoType,
};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "move", content = "params", rename_all = "snake_case")]
pub enum Move {
    BoatMove {
        chord: ChordId,
    },
    HandleslideMinus {
        slider: LegendrianId,
        over: LegendrianId,
        at: ChordId,
    },
    HandleslidePlus {
        slider: LegendrianId,
        over: LegendrianId,
    },
    AddCancellingPair {
        index: u32,
        parallel_to: LegendrianId,
    },
    RerouteOverHandle {
        who: Vec<LegendrianId>,
        handle: HandleId,
    },
    CancelPlusMinus {
        plus: LegendrianId,
        minus: LegendrianId,
    },
    CancelHandleLegendrian {
        handle: HandleId,
        leg: LegendrianId,
    },
    CuspPassOverHandle {
        leg: LegendrianId,
        handle: HandleId,
    },
    AttachFlexible {
        through: HandleId,
    },
    SlideOffHandle {
        leg: LegendrianId,
        over_flex: LegendrianId,
    },
    /// Connected sum of two free Legendrians lying in separate Darboux charts.
    ConnectSum {
        into: LegendrianId,
        from: LegendrianId,
    },
}

impl Move {
    pub fn name(&self) -> &'static str {
        match self {
            Move::BoatMove { .. } => "boat_move",
            Move::HandleslideMinus { .. } => "handleslide_minus",
            Move::HandleslidePlus { .. } => "handleslide_plus",
            Move::AddCancellingPair { .. } => "add_cancelling_pair",
            Move::RerouteOverHandle { .. } => "reroute_over_handle",
            Move::CancelPlusMinus { .. } => "cancel_plus_minus",
            Move::CancelHandleLegendrian { .. } => "cancel_handle_legendrian",
            Move::CuspPassOverHandle { .. } => "cusp_pass_over_handle",
            Move::AttachFlexible { .. } => "attach_flexible",
            Move::SlideOffHandle { .. } => "slide_off_handle",
            Move::ConnectSum { .. } => "connect_sum",
        }
    }

    pub fn apply(&self, p: &Presentation) -> Result<Presentation, MoveError> {
        match self {
            Move::BoatMove { chord } => boat_move(p, *chord),
            Move::HandleslideMinus { slider, over, at } => {
                let c = chord(p, *at)?;
                if c.from != *slider || c.to != *over {
                    return Err(MoveError::ChordMismatch { chord: *at });
                }
                handleslide_minus(p, *at)
            }
            Move::HandleslidePlus { slider, over } => handleslide_plus(p, *slider, *over),
            Move::AddCancellingPair { index, parallel_to } => {
                let expected = p.n() - 1;
                if *index != expected {
                    return Err(MoveError::InvalidIndex {
                        expected,
                        found: *index,
                    });
                }
                add_cancelling_pair(p, *parallel_to).map(|r| r.0)
            }
            Move::RerouteOverHandle { who, handle } => reroute_over_handle(p, who, *handle),
            Move::CancelPlusMinus { plus, minus } => cancel_plus_minus(p, *plus, *minus),
            Move::CancelHandleLegendrian { handle, leg } => {
                cancel_handle_legendrian(p, *handle, *leg)
            }
            Move::CuspPassOverHandle { leg, handle } => cusp_pass_over_handle(p, *leg, *handle),
            Move::AttachFlexible { through } => attach_flexible(p, *through).map(|r| r.0),
            Move::SlideOffHandle { leg, over_flex } => slide_off_handle(p, *leg, *over_flex),
            Move::ConnectSum { into, from } => connect_sum(p, *into, *from),
        }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Move::BoatMove { chord } => write!(f, "boat_move {chord}"),
            Move::HandleslideMinus { slider, over, at } => {
                write!(f, "handleslide_minus {slider} over {over} at {at}")
            }
            Move::HandleslidePlus { slider, over } => {
                write!(f, "handleslide_plus {slider} over {over}")
            }
            Move::AddCancellingPair { index, parallel_to } => {
                write!(
                    f,
                    "add_cancelling_pair index {index} parallel to {parallel_to}"
                )
            }
            Move::RerouteOverHandle { who, handle } => {
                let who: Vec<String> = who.iter().map(|l| l.to_string()).collect();
                write!(
                    f,
                    "reroute_over_handle [{}] through {handle}",
                    who.join(", ")
                )
            }
            Move::CancelPlusMinus { plus, minus } => write!(f, "cancel_plus_minus {plus} {minus}"),
            Move::CancelHandleLegendrian { handle, leg } => {
                write!(f, "cancel_handle_legendrian {handle} {leg}")
            }
            Move::CuspPassOverHandle { leg, handle } => {
                write!(f, "cusp_pass_over_handle {leg} {handle}")
            }
            Move::AttachFlexible { through } => write!(f, "attach_flexible through {through}"),
            Move::SlideOffHandle { leg, over_flex } => {
                write!(f, "slide_off_handle {leg} over {over_flex}")
            }
            Move::ConnectSum { into, from } => write!(f, "connect_sum {from} into {into}"),
        }
    }
}

/// Why two Legendrians are not yet parallel.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "obstruction", rename_all = "snake_case")]
pub enum Obstruction {
    DifferentGroups,
    DifferentPasses,
    /// A chord running between the pair itself.
    ChordBetween {
        chord: ChordId,
    },
    /// A bounded chord from a third Legendrian ending on the pair.
    BoundedChord {
        chord: ChordId,
    },
}

impl fmt::Display for Obstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Obstruction::DifferentGroups => f.write_str("not in the same parallel group"),
            Obstruction::DifferentPasses => f.write_str("handle passes differ"),
            Obstruction::ChordBetween { chord } => write!(f, "chord {chord} runs between the pair"),
            Obstruction::BoundedChord { chord } => {
                write!(f, "bounded chord {chord} ends on the pair")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum MoveError {
    #[error("unknown chord {0}")]
    UnknownChord(ChordId),
    #[error("unknown Legendrian {0}")]
    UnknownLegendrian(LegendrianId),
    #[error("unknown handle {0}")]
    UnknownHandle(HandleId),
    #[error("chord {0} is degenerate; perturb it first")]
    DegenerateChord(ChordId),
    #[error("chord {0} already ends at a maximum")]
    AlreadyMaximum(ChordId),
    #[error("chord {chord} has local index {index}; only index-0 chords can be slid along")]
    NotMaximum { chord: ChordId, index: u32 },
    #[error("Legendrian {legendrian} has coefficient {found}, expected {expected}")]
    WrongCoefficient {
        legendrian: LegendrianId,
        expected: Coefficient,
        found: Coefficient,
    },
    #[error("chord {chord} is not the shortest remaining chord ({shortest} is)")]
    NotShortest { chord: ChordId, shortest: ChordId },
    #[error("chord {chord} does not join the named Legendrians")]
    ChordMismatch { chord: ChordId },
    #[error("Legendrians are not parallel: {}", join(.obstructions))]
    NotParallel { obstructions: Vec<Obstruction> },
    #[error("{leg} passes {handle} {passes} time(s); others passing: {}", join(.others))]
    NotCancellable {
        handle: HandleId,
        leg: LegendrianId,
        passes: u32,
        others: Vec<LegendrianId>,
    },
    #[error("{leg} passes {handle} only {passes} time(s)")]
    InsufficientPasses {
        leg: LegendrianId,
        handle: HandleId,
        passes: u32,
    },
    #[error("handle {0} is not a subcritical handle of index n-1")]
    NotSubcritical(HandleId),
    #[error("{leg} does not pass {handle}")]
    NoPasses { leg: LegendrianId, handle: HandleId },
    #[error("{0} is not the attaching sphere of a flexible handle through one subcritical handle")]
    NotFlexible(LegendrianId),
    #[error("cancelling pair index must be {expected}, got {found}")]
    InvalidIndex { expected: u32, found: u32 },
    #[error("a Legendrian cannot act on itself ({0})")]
    SelfReference(LegendrianId),
    #[error("{0} is bound to a handle and cannot be summed away")]
    BoundToHandle(LegendrianId),
    #[error("dimension mismatch between {0} and {1}")]
    DimensionMismatch(LegendrianId, LegendrianId),
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    if items.is_empty() {
        return "none".into();
    }
    items
        .iter()
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

fn chord(p: &Presentation, c: ChordId) -> Result<&crate::diagram::ReebChord, MoveError> {
    p.chords.get(&c).ok_or(MoveError::UnknownChord(c))
}

fn leg(p: &Presentation, l: LegendrianId) -> Result<&LegendrianObject, MoveError> {
    p.legendrians.get(&l).ok_or(MoveError::UnknownLegendrian(l))
}

fn leg_mut(p: &mut Presentation, l: LegendrianId) -> &mut LegendrianObject {
    p.legendrians.get_mut(&l).expect("checked before mutation")
}

/// Subcritical handle of index n-1.
fn cancelling_handle(p: &Presentation, h: HandleId) -> Result<(), MoveError> {
    let handle = p.handles.get(&h).ok_or(MoveError::UnknownHandle(h))?;
    if handle.kind != HandleKind::Subcritical || handle.index + 1 != p.n() {
        return Err(MoveError::NotSubcritical(h));
    }
    Ok(())
}

fn expect_coefficient(l: &LegendrianObject, expected: Coefficient) -> Result<(), MoveError> {
    if l.coefficient != expected {
        return Err(MoveError::WrongCoefficient {
            legendrian: l.id,
            expected,
            found: l.coefficient,
        });
    }
    Ok(())
}

/// Converts the chord's endpoint into a front maximum by an `(m, m-j)`-boat.
pub fn boat_move(p: &Presentation, c: ChordId) -> Result<Presentation, MoveError> {
    let ch = chord(p, c)?;
    if ch.degenerate {
        return Err(MoveError::DegenerateChord(c));
    }
    if ch.local_index == 0 {
        return Err(MoveError::AlreadyMaximum(c));
    }
    let m = leg(p, ch.from)?.dim;
    let (from, j, site) = (ch.from, ch.local_index, ch.site.clone());
    let mut q = p.clone();
    q.chords.get_mut(&c).expect("present").local_index = 0;
    leg_mut(&mut q, from).decorations.push(Decoration::Boat {
        m,
        k: m.saturating_sub(j),
        site,
    });
    Ok(q)
}

/// Slides the chord's source over its (-1) target along an index-0 chord,
/// removing the chord and adding a ring of cusps.
pub fn handleslide_minus(p: &Presentation, c: ChordId) -> Result<Presentation, MoveError> {
    let ch = chord(p, c)?;
    if ch.degenerate {
        return Err(MoveError::DegenerateChord(c));
    }
    if ch.local_index != 0 {
        return Err(MoveError::NotMaximum {
            chord: c,
            index: ch.local_index,
        });
    }
    let slider = leg(p, ch.from)?;
    let over = leg(p, ch.to)?;
    expect_coefficient(over, Coefficient::Minus1)?;
    let shortest = p
        .chords
        .values()
        .filter(|o| o.from == ch.from && o.to == ch.to)
        .min_by_key(|o| o.order_key())
        .expect("c itself qualifies");
    if shortest.id != c {
        return Err(MoveError::NotShortest {
            chord: c,
            shortest: shortest.id,
        });
    }

    let deco = Decoration::CuspConnectSum {
        with: over.name.clone(),
        style: CuspStyle::CuspRing,
        site: ch.site.clone(),
    };
    let passes = over.handle_passes.clone();
    let added = over.topo_type.components();
    let slider_id = slider.id;

    let mut q = p.clone();
    q.chords.remove(&c);
    let s = leg_mut(&mut q, slider_id);
    s.decorations.push(deco);
    for (h, n) in passes {
        s.add_passes(h, n);
    }
    if let (Some(have), Some(add)) = (s.topo_type.components(), added) {
        s.topo_type = TopoType::ConnectSumOfUnknots {
            components: have + add,
        };
    }
    Ok(q)
}

/// Slide over a (+1) Legendrian; records the cone singularity only.
pub fn handleslide_plus(
    p: &Presentation,
    slider: LegendrianId,
    over: LegendrianId,
) -> Result<Presentation, MoveError> {
    leg(p, slider)?;
    let o = leg(p, over)?;
    if slider == over {
        return Err(MoveError::SelfReference(slider));
    }
    expect_coefficient(o, Coefficient::Plus1)?;
    let deco = Decoration::CuspConnectSum {
        with: o.name.clone(),
        style: CuspStyle::Cone,
        site: None,
    };
    let mut q = p.clone();
    leg_mut(&mut q, slider).decorations.push(deco);
    Ok(q)
}

fn minus_name(plus: &str) -> String {
    if plus.contains("plus") {
        plus.replacen("plus", "minus", 1)
    } else {
        format!("{plus}_minus")
    }
}

/// Inserts an (n-1)-handle and a (-1) Legendrian shadowing `parallel_to`.
///
/// Bounded chords ending on `parallel_to` are intercepted by the pushoff
/// first and now end on it, with index, length and grading unchanged.
/// Returns the new handle and Legendrian ids.
pub fn add_cancelling_pair(
    p: &Presentation,
    parallel_to: LegendrianId,
) -> Result<(Presentation, HandleId, LegendrianId), MoveError> {
    let base = leg(p, parallel_to)?;
    let group = base
        .parallel_group
        .clone()
        .unwrap_or_else(|| format!("{}~pair", base.name));
    let mut minus = LegendrianObject::new(
        minus_name(&base.name),
        base.dim,
        Role::CancelMinus,
        Coefficient::Minus1,
    )
    .in_group(group.clone());
    minus.topo_type = TopoType::Sphere;

    let mut q = p.clone();
    leg_mut(&mut q, parallel_to).parallel_group = Some(group);
    let h = q.add_handle(p.n() - 1);
    let m = q.add_legendrian(minus);
    for c in q.chords.values_mut() {
        if c.to == parallel_to && c.bounded {
            c.to = m;
        }
    }
    Ok((q, h, m))
}

/// Each listed Legendrian gains one pass through `h`.
pub fn reroute_over_handle(
    p: &Presentation,
    who: &[LegendrianId],
    h: HandleId,
) -> Result<Presentation, MoveError> {
    cancelling_handle(p, h)?;
    for l in who {
        leg(p, *l)?;
    }
    let mut q = p.clone();
    for l in who {
        leg_mut(&mut q, *l).add_passes(h, 1);
    }
    Ok(q)
}

/// Everything keeping `a` and `b` from being completely parallel.
pub fn parallel_obstructions(
    p: &Presentation,
    a: LegendrianId,
    b: LegendrianId,
) -> Vec<Obstruction> {
    let mut out = Vec::new();
    let (Some(la), Some(lb)) = (p.legendrian(a), p.legendrian(b)) else {
        return vec![Obstruction::DifferentGroups];
    };
    if la.parallel_group.is_none() || la.parallel_group != lb.parallel_group {
        out.push(Obstruction::DifferentGroups);
    }
    if la.handle_passes != lb.handle_passes {
        out.push(Obstruction::DifferentPasses);
    }
    let mut chords: Vec<_> = p
        .chords
        .values()
        .filter(|c| [a, b].contains(&c.from) || [a, b].contains(&c.to))
        .collect();
    chords.sort_by_key(|c| c.order_key());
    for c in chords {
        let between = [a, b].contains(&c.from) && [a, b].contains(&c.to);
        if between {
            out.push(Obstruction::ChordBetween { chord: c.id });
        } else if c.bounded {
            out.push(Obstruction::BoundedChord { chord: c.id });
        }
    }
    out
}

pub fn is_parallel(p: &Presentation, a: LegendrianId, b: LegendrianId) -> bool {
    parallel_obstructions(p, a, b).is_empty()
}

/// Cancels a parallel (+1)/(-1) pair of surgeries.
pub fn cancel_plus_minus(
    p: &Presentation,
    plus: LegendrianId,
    minus: LegendrianId,
) -> Result<Presentation, MoveError> {
    expect_coefficient(leg(p, plus)?, Coefficient::Plus1)?;
    expect_coefficient(leg(p, minus)?, Coefficient::Minus1)?;
    let obstructions = parallel_obstructions(p, plus, minus);
    if !obstructions.is_empty() {
        return Err(MoveError::NotParallel { obstructions });
    }
    let mut q = p.clone();
    q.legendrians.remove(&plus);
    q.legendrians.remove(&minus);
    // Only unbounded chords can remain here; they vanish with their endpoints.
    q.chords
        .retain(|_, c| ![plus, minus].contains(&c.from) && ![plus, minus].contains(&c.to));
    Ok(q)
}

/// Cancels subcritical handle `h` against `leg` (and `leg`'s own critical
/// handle, when it attaches one).
pub fn cancel_handle_legendrian(
    p: &Presentation,
    h: HandleId,
    leg_id: LegendrianId,
) -> Result<Presentation, MoveError> {
    cancelling_handle(p, h)?;
    let l = leg(p, leg_id)?;
    let passes = l.passes(h);
    let others: Vec<LegendrianId> = p
        .passing(h)
        .into_iter()
        .map(|(id, _)| id)
        .filter(|id| *id != leg_id)
        .collect();
    if passes != 1 || !others.is_empty() {
        return Err(MoveError::NotCancellable {
            handle: h,
            leg: leg_id,
            passes,
            others,
        });
    }
    let mut q = p.clone();
    q.handles.remove(&h);
    if let Some(own) = l.attached_to {
        q.handles.remove(&own);
    }
    q.legendrians.remove(&leg_id);
    q.chords.retain(|_, c| c.from != leg_id && c.to != leg_id);
    for other in q.legendrians.values_mut() {
        other.handle_passes.remove(&h);
    }
    Ok(q)
}

/// Isotopes a circle of cusps across `h`, removing two passes.
pub fn cusp_pass_over_handle(
    p: &Presentation,
    leg_id: LegendrianId,
    h: HandleId,
) -> Result<Presentation, MoveError> {
    cancelling_handle(p, h)?;
    let passes = leg(p, leg_id)?.passes(h);
    if passes < 2 {
        return Err(MoveError::InsufficientPasses {
            leg: leg_id,
            handle: h,
            passes,
        });
    }
    let exclusive = p.passing(h).iter().all(|(id, _)| *id == leg_id);
    let mut q = p.clone();
    let l = leg_mut(&mut q, leg_id);
    l.remove_passes(h, 2);
    l.decorations.push(Decoration::CuspPassedOverHandle {
        handle: h,
        remaining: passes - 2,
        exclusive,
    });
    Ok(q)
}

/// Attaches a flexible critical handle along a loose Legendrian winding once
/// around `through`. Returns the new handle and Legendrian ids.
pub fn attach_flexible(
    p: &Presentation,
    through: HandleId,
) -> Result<(Presentation, HandleId, LegendrianId), MoveError> {
    cancelling_handle(p, through)?;
    let mut q = p.clone();
    let h = q.add_handle(p.n());
    q.handles.get_mut(&h).expect("just added").flexible = true;
    let mut flex = LegendrianObject::new(
        "lambda_flex",
        p.n() - 1,
        Role::Attaching,
        Coefficient::Minus1,
    )
    .attached(h);
    flex.decorations.push(Decoration::LooseChart { count: 1 });
    flex.handle_passes.insert(through, 1);
    let l = q.add_legendrian(flex);
    Ok((q, h, l))
}

/// The single subcritical handle a flexible attaching sphere winds around.
fn flexible_route(p: &Presentation, flex: LegendrianId) -> Result<HandleId, MoveError> {
    let f = leg(p, flex)?;
    let flexible = p.handle_of(flex).is_some_and(|h| h.flexible);
    let passes: Vec<_> = f.handle_passes.iter().collect();
    match (flexible, &passes[..]) {
        (true, [(h, 1)]) => Ok(**h),
        _ => Err(MoveError::NotFlexible(flex)),
    }
}

/// Slides `leg` over the flexible attaching sphere, unwinding one pass.
pub fn slide_off_handle(
    p: &Presentation,
    leg_id: LegendrianId,
    over_flex: LegendrianId,
) -> Result<Presentation, MoveError> {
    if leg_id == over_flex {
        return Err(MoveError::SelfReference(leg_id));
    }
    let h = flexible_route(p, over_flex)?;
    if leg(p, leg_id)?.passes(h) == 0 {
        return Err(MoveError::NoPasses {
            leg: leg_id,
            handle: h,
        });
    }
    let deco = Decoration::CuspConnectSum {
        with: p.legendrians[&over_flex].name.clone(),
        style: CuspStyle::CuspRing,
        site: None,
    };
    let mut q = p.clone();
    let l = leg_mut(&mut q, leg_id);
    l.remove_passes(h, 1);
    l.decorations.push(deco);
    Ok(q)
}

/// Connected sum of `from` into `into`; `from` disappears and its chords,
/// passes and decorations carry over.
pub fn connect_sum(
    p: &Presentation,
    into: LegendrianId,
    from: LegendrianId,
) -> Result<Presentation, MoveError> {
    if into == from {
        return Err(MoveError::SelfReference(into));
    }
    let a = leg(p, into)?;
    let b = leg(p, from)?;
    if b.attached_to.is_some() {
        return Err(MoveError::BoundToHandle(from));
    }
    if a.dim != b.dim {
        return Err(MoveError::DimensionMismatch(into, from));
    }
    let topo = match (a.topo_type.components(), b.topo_type.components()) {
        (Some(x), Some(y)) => TopoType::ConnectSumOfUnknots { components: x + y },
        _ => a.topo_type,
    };
    let b = b.clone();
    let mut q = p.clone();
    q.legendrians.remove(&from);
    let l = leg_mut(&mut q, into);
    l.topo_type = topo;
    l.decorations.extend(b.decorations);
    for (h, n) in b.handle_passes {
        l.add_passes(h, n);
    }
    q.chords.retain(|_, c| {
        let joins = [c.from, c.to].contains(&into) && [c.from, c.to].contains(&from);
        !joins
    });
    for c in q.chords.values_mut() {
        if c.from == from {
            c.from = into;
        }
        if c.to == from {
            c.to = into;
        }
    }
    Ok(q)
}
