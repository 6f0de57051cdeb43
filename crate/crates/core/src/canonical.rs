//! Canonical form, structural equality and content hashing.
//!
//! Ids are arbitrary labels, so two presentations are the same diagram when a
//! bijective relabeling carries one onto the other. The canonical form picks
//! one labeling deterministically: objects are colored by their local data,
//! colors are refined along the id references (attachments, passes, chord
//! endpoints) until stable, remaining ties are individualized one at a time,
//! and the lexicographically smallest canonical JSON over all branches wins.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest as _, Sha256};

use crate::diagram::{
    to_canonical_json, ChordId, Decoration, HandleId, LegendrianId, NextIds, Presentation,
};

/// Placeholder for references to objects that no longer exist.
const DEAD: u32 = u32::MAX;

/// 64-bit content digest of a presentation's canonical form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Digest(pub u64);

impl fmt::Display for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:016x}", self.0)
    }
}

impl Serialize for Digest {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Digest {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        if s.len() != 16 {
            return Err(serde::de::Error::custom("digest must be 16 hex digits"));
        }
        u64::from_str_radix(&s, 16)
            .map(Digest)
            .map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Kind {
    Handle,
    Legendrian,
    Chord,
}

struct Graph {
    kinds: Vec<Kind>,
    raw: Vec<u32>,
    labels: Vec<String>,
    /// (source, target, edge label)
    edges: Vec<(usize, usize, String)>,
}

fn build_graph(p: &Presentation) -> Graph {
    let mut kinds = Vec::new();
    let mut raw = Vec::new();
    let mut labels = Vec::new();
    let mut handle_node = BTreeMap::new();
    let mut leg_node = BTreeMap::new();

    for h in p.handles.values() {
        handle_node.insert(h.id, kinds.len());
        kinds.push(Kind::Handle);
        raw.push(h.id.0);
        let mut h = h.clone();
        h.id = HandleId(0);
        labels.push(to_canonical_json(&h));
    }
    for l in p.legendrians.values() {
        leg_node.insert(l.id, kinds.len());
        kinds.push(Kind::Legendrian);
        raw.push(l.id.0);
        let mut l = l.clone();
        l.id = LegendrianId(0);
        l.attached_to = l.attached_to.map(|h| blank_handle(p, h));
        l.handle_passes.clear();
        for d in &mut l.decorations {
            if let Decoration::CuspPassedOverHandle { handle, .. } = d {
                *handle = blank_handle(p, *handle);
            }
        }
        labels.push(to_canonical_json(&l));
    }
    for c in p.chords.values() {
        kinds.push(Kind::Chord);
        raw.push(c.id.0);
        let mut c = c.clone();
        c.id = ChordId(0);
        c.from = blank_leg(p, c.from);
        c.to = blank_leg(p, c.to);
        labels.push(to_canonical_json(&c));
    }

    let mut edges = Vec::new();
    for l in p.legendrians.values() {
        let src = leg_node[&l.id];
        if let Some(t) = l.attached_to.and_then(|h| handle_node.get(&h)) {
            edges.push((src, *t, "attached".to_string()));
        }
        for (h, count) in &l.handle_passes {
            if let Some(t) = handle_node.get(h) {
                edges.push((src, *t, format!("pass:{count}")));
            }
        }
        for (pos, d) in l.decorations.iter().enumerate() {
            if let Decoration::CuspPassedOverHandle { handle, .. } = d {
                if let Some(t) = handle_node.get(handle) {
                    edges.push((src, *t, format!("deco:{pos}")));
                }
            }
        }
    }
    let chord_base = handle_node.len() + leg_node.len();
    for (i, c) in p.chords.values().enumerate() {
        if let Some(t) = leg_node.get(&c.from) {
            edges.push((chord_base + i, *t, "from".to_string()));
        }
        if let Some(t) = leg_node.get(&c.to) {
            edges.push((chord_base + i, *t, "to".to_string()));
        }
    }
    Graph {
        kinds,
        raw,
        labels,
        edges,
    }
}

// Live references become 0 (the edge carries the identity), dead ones DEAD.
fn blank_handle(p: &Presentation, h: HandleId) -> HandleId {
    if p.handles.contains_key(&h) {
        HandleId(0)
    } else {
        HandleId(DEAD)
    }
}

fn blank_leg(p: &Presentation, l: LegendrianId) -> LegendrianId {
    if p.legendrians.contains_key(&l) {
        LegendrianId(0)
    } else {
        LegendrianId(DEAD)
    }
}

fn rank<T: Ord + Clone>(keys: &[T]) -> Vec<u32> {
    let mut sorted: Vec<T> = keys.to_vec();
    sorted.sort();
    sorted.dedup();
    keys.iter()
        .map(|k| sorted.binary_search(k).expect("key present") as u32)
        .collect()
}

fn class_count(colors: &[u32]) -> usize {
    let mut c = colors.to_vec();
    c.sort_unstable();
    c.dedup();
    c.len()
}

/// Color refinement. The old color leads every signature, so classes only split
/// and keep their relative order.
type Signature<'a> = (u32, Vec<(u8, &'a str, u32)>);

fn refine(g: &Graph, mut colors: Vec<u32>) -> Vec<u32> {
    loop {
        let mut sigs: Vec<Signature> =
            colors.iter().map(|c| (*c, Vec::new())).collect();
        for (s, t, label) in &g.edges {
            sigs[*s].1.push((0, label.as_str(), colors[*t]));
            sigs[*t].1.push((1, label.as_str(), colors[*s]));
        }
        for s in &mut sigs {
            s.1.sort();
        }
        let next = rank(&sigs);
        if class_count(&next) == class_count(&colors) {
            return next;
        }
        colors = next;
    }
}

fn relabel(p: &Presentation, g: &Graph, colors: &[u32]) -> Presentation {
    let mut order: Vec<usize> = (0..g.kinds.len()).collect();
    order.sort_by_key(|i| (g.kinds[*i], colors[*i]));
    let mut hmap = BTreeMap::new();
    let mut lmap = BTreeMap::new();
    let mut cmap = BTreeMap::new();
    for i in order {
        match g.kinds[i] {
            Kind::Handle => {
                let next = hmap.len() as u32;
                hmap.insert(HandleId(g.raw[i]), HandleId(next));
            }
            Kind::Legendrian => {
                let next = lmap.len() as u32;
                lmap.insert(LegendrianId(g.raw[i]), LegendrianId(next));
            }
            Kind::Chord => {
                let next = cmap.len() as u32;
                cmap.insert(ChordId(g.raw[i]), ChordId(next));
            }
        }
    }
    let mh = |h: HandleId| hmap.get(&h).copied().unwrap_or(HandleId(DEAD));
    let ml = |l: LegendrianId| lmap.get(&l).copied().unwrap_or(LegendrianId(DEAD));

    let mut out = Presentation::new(0);
    out.ambient_dim = p.ambient_dim;
    for h in p.handles.values() {
        let mut h = h.clone();
        h.id = mh(h.id);
        out.handles.insert(h.id, h);
    }
    for l in p.legendrians.values() {
        let mut l = l.clone();
        l.id = ml(l.id);
        l.attached_to = l.attached_to.map(mh);
        l.handle_passes = l.handle_passes.iter().map(|(h, c)| (mh(*h), *c)).collect();
        for d in &mut l.decorations {
            if let Decoration::CuspPassedOverHandle { handle, .. } = d {
                *handle = mh(*handle);
            }
        }
        out.legendrians.insert(l.id, l);
    }
    for c in p.chords.values() {
        let mut c = c.clone();
        c.id = cmap[&c.id];
        c.from = ml(c.from);
        c.to = ml(c.to);
        out.chords.insert(c.id, c);
    }
    out.linking_notes = p.linking_notes.clone();
    out.linking_notes.sort();
    out.regions = p.regions.clone();
    out.regions.sort_by_cached_key(to_canonical_json);
    out.next_ids = NextIds {
        handle: out.handles.len() as u32,
        legendrian: out.legendrians.len() as u32,
        chord: out.chords.len() as u32,
    };
    out
}

fn search(
    p: &Presentation,
    g: &Graph,
    colors: Vec<u32>,
    best: &mut Option<(String, Presentation)>,
) {
    let colors = refine(g, colors);
    // First non-singleton class, by color.
    let mut members: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (i, c) in colors.iter().enumerate() {
        members.entry(*c).or_default().push(i);
    }
    let cell = members.into_values().find(|m| m.len() > 1);
    match cell {
        None => {
            let q = relabel(p, g, &colors);
            let json = to_canonical_json(&q);
            if best.as_ref().is_none_or(|(b, _)| json < *b) {
                *best = Some((json, q));
            }
        }
        Some(cell) => {
            let mut explored: Vec<usize> = Vec::new();
            for &v in &cell {
                // Swapping v with an explored twin is an automorphism, so the
                // branch would reach the same leaves.
                if explored.iter().any(|&w| swap_is_automorphism(g, v, w)) {
                    continue;
                }
                explored.push(v);
                let split: Vec<u32> = colors
                    .iter()
                    .enumerate()
                    .map(|(i, c)| 2 * c + u32::from(cell.contains(&i) && i != v))
                    .collect();
                search(p, g, split, best);
            }
        }
    }
}

fn swap_is_automorphism(g: &Graph, v: usize, w: usize) -> bool {
    if g.labels[v] != g.labels[w] || g.kinds[v] != g.kinds[w] {
        return false;
    }
    let swap = |x: usize| {
        if x == v {
            w
        } else if x == w {
            v
        } else {
            x
        }
    };
    let mut before: Vec<(usize, usize, &str)> = g
        .edges
        .iter()
        .map(|(s, t, l)| (*s, *t, l.as_str()))
        .collect();
    let mut after: Vec<(usize, usize, &str)> = before
        .iter()
        .map(|(s, t, l)| (swap(*s), swap(*t), *l))
        .collect();
    before.sort_unstable();
    after.sort_unstable();
    before == after
}

fn canonical_pair(p: &Presentation) -> (String, Presentation) {
    let g = build_graph(p);
    let keys: Vec<(Kind, &str)> = g
        .kinds
        .iter()
        .zip(&g.labels)
        .map(|(k, l)| (*k, l.as_str()))
        .collect();
    let colors = rank(&keys);
    let mut best = None;
    search(p, &g, colors, &mut best);
    best.expect("search always reaches a leaf")
}

/// The canonically relabeled copy of `p` (ids renumbered from 0).
pub fn canonical_form(p: &Presentation) -> Presentation {
    canonical_pair(p).1
}

/// Canonical JSON of the canonical form; equal iff structurally equal.
pub fn canonical_string(p: &Presentation) -> String {
    canonical_pair(p).0
}

pub fn structural_equal(a: &Presentation, b: &Presentation) -> bool {
    a.ambient_dim == b.ambient_dim
        && a.handles.len() == b.handles.len()
        && a.legendrians.len() == b.legendrians.len()
        && a.chords.len() == b.chords.len()
        && canonical_string(a) == canonical_string(b)
}

pub fn hash(p: &Presentation) -> Digest {
    let bytes = Sha256::digest(canonical_string(p).as_bytes());
    let mut head = [0u8; 8];
    head.copy_from_slice(&bytes[..8]);
    Digest(u64::from_be_bytes(head))
}

/// Applies an id permutation (used by tests and property checks).
pub fn relabel_ids(
    p: &Presentation,
    handle: impl Fn(HandleId) -> HandleId,
    leg: impl Fn(LegendrianId) -> LegendrianId,
    chord: impl Fn(ChordId) -> ChordId,
) -> Presentation {
    let mut out = p.clone();
    out.handles = p
        .handles
        .values()
        .map(|h| {
            let mut h = h.clone();
            h.id = handle(h.id);
            (h.id, h)
        })
        .collect();
    out.legendrians = p
        .legendrians
        .values()
        .map(|l| {
            let mut l = l.clone();
            l.id = leg(l.id);
            l.attached_to = l.attached_to.map(&handle);
            l.handle_passes = l
                .handle_passes
                .iter()
                .map(|(h, c)| (handle(*h), *c))
                .collect();
            for d in &mut l.decorations {
                if let Decoration::CuspPassedOverHandle { handle: h, .. } = d {
                    *h = handle(*h);
                }
            }
            (l.id, l)
        })
        .collect();
    out.chords = p
        .chords
        .values()
        .map(|c| {
            let mut c = c.clone();
            c.id = chord(c.id);
            c.from = leg(c.from);
            c.to = leg(c.to);
            (c.id, c)
        })
        .collect();
    out.next_ids = NextIds {
        handle: out.handles.keys().last().map_or(0, |h| h.0 + 1),
        legendrian: out.legendrians.keys().last().map_or(0, |l| l.0 + 1),
        chord: out.chords.keys().last().map_or(0, |c| c.0 + 1),
    };
    out
}
