//! Combinatorial data model for Weinstein handle presentations.
//!
//! A [`Presentation`] records handles by index, the Legendrian spheres that
//! attach critical handles (plus auxiliary surgery curves such as the carved
//! disk boundary), and the Reeb chords between those Legendrians. Every move
//! in [`crate::moves`] maps a presentation to a fresh one; nothing here is
//! mutated in place once a move has been recorded.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Rational64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::morse::{MooreSpaceSpec, MorseRegionSpec};

/// Schema version written into every presentation document.
pub const CARVE_SCHEMA: u32 = 1;

macro_rules! id_type {
    ($(#[$meta:meta])* $name:ident, $prefix:literal) => {
        $(#[$meta])*
        #[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub u32);

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, concat!($prefix, "{}"), self.0)
            }
        }
    };
}

id_type!(
    /// Identifier of a handle, unique within one presentation.
    HandleId,
    "h"
);
id_type!(
    /// Identifier of a Legendrian, unique within one presentation.
    LegendrianId,
    "L"
);
id_type!(
    /// Identifier of a Reeb chord, unique within one presentation.
    ChordId,
    "c"
);

/// Exact rational number, serialized as `{"num": a, "den": b}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(pub Rational64);

impl Rational {
    pub fn new(num: i64, den: i64) -> Self {
        Rational(Rational64::new(num, den))
    }

    pub fn integer(n: i64) -> Self {
        Rational(Rational64::from_integer(n))
    }

    pub fn is_positive(&self) -> bool {
        self.0 > Rational64::from_integer(0)
    }

    pub fn midpoint(a: Rational, b: Rational) -> Rational {
        Rational((a.0 + b.0) / Rational64::from_integer(2))
    }
}

impl std::ops::Add for Rational {
    type Output = Rational;
    fn add(self, rhs: Rational) -> Rational {
        Rational(self.0 + rhs.0)
    }
}

impl std::ops::Sub for Rational {
    type Output = Rational;
    fn sub(self, rhs: Rational) -> Rational {
        Rational(self.0 - rhs.0)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self.0.denom() == 1 {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

#[derive(Serialize, Deserialize)]
struct RationalRepr {
    num: i64,
    den: i64,
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        RationalRepr {
            num: *self.0.numer(),
            den: *self.0.denom(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = RationalRepr::deserialize(d)?;
        if repr.den == 0 {
            return Err(serde::de::Error::custom("rational with zero denominator"));
        }
        Ok(Rational::new(repr.num, repr.den))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HandleKind {
    Subcritical,
    Critical,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Handle {
    pub id: HandleId,
    pub index: u32,
    pub kind: HandleKind,
    /// Only critical handles attached along loose Legendrians are flexible.
    pub flexible: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    /// Attaching sphere of a critical handle.
    Attaching,
    /// Boundary of the disk being carved out; a (+1) placeholder.
    CarvePlus,
    /// The (-1) Legendrian of an inserted cancelling pair.
    CancelMinus,
    Auxiliary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TopoType {
    Sphere,
    Disk,
    ConnectSumOfUnknots { components: u32 },
}

impl TopoType {
    /// Number of unknot summands; a bare sphere counts as one.
    pub fn components(&self) -> Option<u32> {
        match self {
            TopoType::Sphere => Some(1),
            TopoType::ConnectSumOfUnknots { components } => Some(*components),
            TopoType::Disk => None,
        }
    }
}

/// Contact surgery coefficient.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coefficient {
    Minus1,
    Plus1,
    None,
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Coefficient::Minus1 => "-1",
            Coefficient::Plus1 => "+1",
            Coefficient::None => "none",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CuspStyle {
    /// Slide over a (-1) Legendrian: a circle of cusps.
    CuspRing,
    /// Slide over a (+1) Legendrian: a cone singularity.
    Cone,
}

/// Which critical point of which region component produced a chord.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ChordSite {
    pub component: String,
    pub point: u32,
}

impl fmt::Display for ChordSite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.component, self.point)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Decoration {
    /// `(m, k)`-boat; `k = m` is the identity, `k = 0` the m-dimensional
    /// first Reidemeister move.
    Boat {
        m: u32,
        k: u32,
        site: Option<ChordSite>,
    },
    /// Cusp connected sum with a snapshot (by name) of the Legendrian slid over.
    CuspConnectSum {
        with: String,
        style: CuspStyle,
        site: Option<ChordSite>,
    },
    LooseChart {
        count: u32,
    },
    /// `remaining` is the pass count left at the handle afterwards and
    /// `exclusive` whether any other Legendrian traversed the handle then.
    CuspPassedOverHandle {
        handle: HandleId,
        remaining: u32,
        exclusive: bool,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LegendrianObject {
    pub id: LegendrianId,
    pub name: String,
    pub dim: u32,
    pub role: Role,
    pub topo_type: TopoType,
    pub coefficient: Coefficient,
    /// Critical handle this Legendrian attaches, for `Role::Attaching`.
    pub attached_to: Option<HandleId>,
    pub decorations: Vec<Decoration>,
    pub handle_passes: BTreeMap<HandleId, u32>,
    pub parallel_group: Option<String>,
}

impl LegendrianObject {
    pub fn new(name: impl Into<String>, dim: u32, role: Role, coefficient: Coefficient) -> Self {
        LegendrianObject {
            id: LegendrianId(0),
            name: name.into(),
            dim,
            role,
            topo_type: TopoType::Sphere,
            coefficient,
            attached_to: None,
            decorations: Vec::new(),
            handle_passes: BTreeMap::new(),
            parallel_group: None,
        }
    }

    pub fn attached(mut self, handle: HandleId) -> Self {
        self.attached_to = Some(handle);
        self
    }

    pub fn in_group(mut self, group: impl Into<String>) -> Self {
        self.parallel_group = Some(group.into());
        self
    }

    pub fn passes(&self, h: HandleId) -> u32 {
        self.handle_passes.get(&h).copied().unwrap_or(0)
    }

    pub(crate) fn add_passes(&mut self, h: HandleId, count: u32) {
        if count > 0 {
            *self.handle_passes.entry(h).or_insert(0) += count;
        }
    }

    /// Removes `count` passes at `h`, dropping the entry when it reaches zero.
    pub(crate) fn remove_passes(&mut self, h: HandleId, count: u32) {
        if let Some(c) = self.handle_passes.get_mut(&h) {
            *c = c.saturating_sub(count);
            if *c == 0 {
                self.handle_passes.remove(&h);
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReebChord {
    pub id: ChordId,
    pub from: LegendrianId,
    pub to: LegendrianId,
    /// Morse index of the height difference; 0 is the slideable maximum.
    /// Meaningless while `degenerate` is set.
    pub local_index: u32,
    pub length: Rational,
    /// Member of the bounded chord set (between the flying-saucer pair).
    pub bounded: bool,
    pub degenerate: bool,
    /// Stored grading, fixed when the chord is created.
    #[serde(rename = "grading_ledger")]
    pub grading: i64,
    pub site: Option<ChordSite>,
}

impl ReebChord {
    /// Index of the same critical point seen from the other Legendrian.
    pub fn dual_index(&self, dim: u32) -> Option<u32> {
        dim.checked_sub(self.local_index)
    }

    /// Sort key used everywhere chords are processed shortest-first.
    pub fn order_key(&self) -> (Rational, ChordId) {
        (self.length, self.id)
    }
}

/// Opaque linking fact between named Legendrians, preserved by every move.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LinkingNote {
    pub subjects: Vec<String>,
    pub note: String,
}

/// A Morse region that generated chords on the named Legendrian.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionRecord {
    pub on: String,
    pub spec: MorseRegionSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub moore: Option<MooreSpaceSpec>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NextIds {
    pub handle: u32,
    pub legendrian: u32,
    pub chord: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub ambient_dim: u32,
    pub handles: BTreeMap<HandleId, Handle>,
    pub legendrians: BTreeMap<LegendrianId, LegendrianObject>,
    pub chords: BTreeMap<ChordId, ReebChord>,
    pub linking_notes: Vec<LinkingNote>,
    pub regions: Vec<RegionRecord>,
    pub next_ids: NextIds,
}

impl Presentation {
    /// Empty presentation of a `2n`-dimensional domain.
    pub fn new(n: u32) -> Self {
        Presentation {
            ambient_dim: 2 * n,
            handles: BTreeMap::new(),
            legendrians: BTreeMap::new(),
            chords: BTreeMap::new(),
            linking_notes: Vec::new(),
            regions: Vec::new(),
            next_ids: NextIds::default(),
        }
    }

    /// Half the ambient dimension; critical handles have this index.
    pub fn n(&self) -> u32 {
        self.ambient_dim / 2
    }

    pub fn add_handle(&mut self, index: u32) -> HandleId {
        let id = HandleId(self.next_ids.handle);
        self.next_ids.handle += 1;
        let kind = if index == self.n() {
            HandleKind::Critical
        } else {
            HandleKind::Subcritical
        };
        self.handles.insert(
            id,
            Handle {
                id,
                index,
                kind,
                flexible: false,
            },
        );
        id
    }

    pub fn add_legendrian(&mut self, mut leg: LegendrianObject) -> LegendrianId {
        let id = LegendrianId(self.next_ids.legendrian);
        self.next_ids.legendrian += 1;
        leg.id = id;
        self.legendrians.insert(id, leg);
        id
    }

    /// Inserts a chord, assigning it a fresh id (the `id` field is ignored).
    pub fn add_chord(&mut self, mut chord: ReebChord) -> ChordId {
        let id = ChordId(self.next_ids.chord);
        self.next_ids.chord += 1;
        chord.id = id;
        self.chords.insert(id, chord);
        id
    }

    pub fn legendrian(&self, id: LegendrianId) -> Option<&LegendrianObject> {
        self.legendrians.get(&id)
    }

    pub fn legendrian_by_name(&self, name: &str) -> Option<&LegendrianObject> {
        self.legendrians.values().find(|l| l.name == name)
    }

    pub fn chords_into(&self, to: LegendrianId) -> impl Iterator<Item = &ReebChord> {
        self.chords.values().filter(move |c| c.to == to)
    }

    pub fn chords_touching(&self, leg: LegendrianId) -> impl Iterator<Item = &ReebChord> {
        self.chords
            .values()
            .filter(move |c| c.from == leg || c.to == leg)
    }

    /// Legendrians passing through `h`, with their pass counts.
    pub fn passing(&self, h: HandleId) -> Vec<(LegendrianId, u32)> {
        self.legendrians
            .values()
            .filter_map(|l| l.handle_passes.get(&h).map(|c| (l.id, *c)))
            .collect()
    }

    /// The critical handle attached along `leg`, if any.
    pub fn handle_of(&self, leg: LegendrianId) -> Option<&Handle> {
        self.legendrians
            .get(&leg)
            .and_then(|l| l.attached_to)
            .and_then(|h| self.handles.get(&h))
    }
}

/// On-disk shape of a presentation.
#[derive(Serialize, Deserialize)]
struct PresentationDoc {
    carve_schema: u32,
    ambient_dim: u32,
    handles: Vec<Handle>,
    legendrians: Vec<LegendrianObject>,
    chords: Vec<ReebChord>,
    #[serde(default)]
    linking_notes: Vec<LinkingNote>,
    #[serde(default)]
    regions: Vec<RegionRecord>,
    #[serde(default)]
    next_ids: Option<NextIds>,
}

impl Serialize for Presentation {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PresentationDoc {
            carve_schema: CARVE_SCHEMA,
            ambient_dim: self.ambient_dim,
            handles: self.handles.values().cloned().collect(),
            legendrians: self.legendrians.values().cloned().collect(),
            chords: self.chords.values().cloned().collect(),
            linking_notes: self.linking_notes.clone(),
            regions: self.regions.clone(),
            next_ids: Some(self.next_ids),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Presentation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;

        let doc = PresentationDoc::deserialize(d)?;
        if doc.carve_schema != CARVE_SCHEMA {
            return Err(D::Error::custom(format!(
                "unsupported carve_schema {} (expected {})",
                doc.carve_schema, CARVE_SCHEMA
            )));
        }
        let mut p = Presentation::new(0);
        p.ambient_dim = doc.ambient_dim;
        for h in doc.handles {
            if p.handles.insert(h.id, h).is_some() {
                return Err(D::Error::custom("duplicate handle id"));
            }
        }
        for l in doc.legendrians {
            if p.legendrians.insert(l.id, l).is_some() {
                return Err(D::Error::custom("duplicate legendrian id"));
            }
        }
        for c in doc.chords {
            if p.chords.insert(c.id, c).is_some() {
                return Err(D::Error::custom("duplicate chord id"));
            }
        }
        p.linking_notes = doc.linking_notes;
        p.regions = doc.regions;
        // Counters never fall behind the ids already in use.
        let floor = NextIds {
            handle: p.handles.keys().last().map_or(0, |h| h.0 + 1),
            legendrian: p.legendrians.keys().last().map_or(0, |l| l.0 + 1),
            chord: p.chords.keys().last().map_or(0, |c| c.0 + 1),
        };
        let given = doc.next_ids.unwrap_or(floor);
        p.next_ids = NextIds {
            handle: given.handle.max(floor.handle),
            legendrian: given.legendrian.max(floor.legendrian),
            chord: given.chord.max(floor.chord),
        };
        Ok(p)
    }
}

/// Serializes any value as canonical JSON: sorted keys, no whitespace.
pub fn to_canonical_json<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("presentation data is always JSON-representable");
    serde_json::to_string(&v).expect("JSON value serializes")
}
