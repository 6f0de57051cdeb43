//! Reeb chords from combinatorial Morse data.
//!
//! Pushing a codimension-zero region `U` of one Legendrian past another
//! creates one chord per critical point of the pushing function on `U`, with
//! the chord's local index equal to the critical point's Morse index (index 0
//! shows up as a maximum in the front and is directly slideable). Chord
//! lengths follow critical values; only their order matters downstream.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagram::{
    ChordId, ChordSite, LegendrianId, Presentation, Rational, ReebChord, RegionRecord,
};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub index: u32,
    pub value: Rational,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    /// Grading stored on the generated chord; the Morse index when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grading: Option<i64>,
}

impl CriticalPoint {
    pub fn new(index: u32, value: Rational) -> Self {
        CriticalPoint {
            index,
            value,
            label: None,
            grading: None,
        }
    }

    fn stored_grading(&self) -> i64 {
        self.grading.unwrap_or(i64::from(self.index))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionComponent {
    pub name: String,
    pub critical_points: Vec<CriticalPoint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub euler: Option<i64>,
}

impl RegionComponent {
    pub fn signed_count(&self) -> i64 {
        self.critical_points
            .iter()
            .map(|c| if c.index % 2 == 0 { 1 } else { -1 })
            .sum()
    }

    /// A disk: a single critical point, of index 0.
    pub fn is_disk(&self) -> bool {
        matches!(self.critical_points[..], [CriticalPoint { index: 0, .. }])
    }
}

/// Morse data of a pushed-through region inside an `dim`-dimensional Legendrian.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorseRegionSpec {
    pub dim: u32,
    /// Added to every critical value to obtain a chord length.
    pub pushoff: Rational,
    pub components: Vec<RegionComponent>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum RegionError {
    #[error("region has no components")]
    NoComponents,
    #[error("component {0} has no critical points")]
    EmptyComponent(String),
    #[error("component {component}: index {index} exceeds dimension {dim}")]
    IndexOutOfRange {
        component: String,
        index: u32,
        dim: u32,
    },
    #[error("component {component}: signed count {found} disagrees with declared Euler characteristic {declared}")]
    EulerMismatch {
        component: String,
        declared: i64,
        found: i64,
    },
    #[error("duplicate component name {0}")]
    DuplicateName(String),
}

impl MorseRegionSpec {
    /// A disk `D^dim`: one index-0 critical point.
    pub fn disk(dim: u32) -> Self {
        MorseRegionSpec {
            dim,
            pushoff: Rational::integer(2),
            components: vec![RegionComponent {
                name: "disk".into(),
                critical_points: vec![CriticalPoint::new(0, Rational::integer(-1))],
                euler: Some(1),
            }],
        }
    }

    /// A neighbourhood of `S^k`: a maximum (index 0) below a saddle of index `k`.
    pub fn sphere(dim: u32, k: u32) -> Self {
        let euler = if k.is_multiple_of(2) { 2 } else { 0 };
        MorseRegionSpec {
            dim,
            pushoff: Rational::integer(3),
            components: vec![RegionComponent {
                name: format!("sphere{k}"),
                critical_points: vec![
                    CriticalPoint::new(0, Rational::integer(-2)),
                    CriticalPoint::new(k, Rational::integer(-1)),
                ],
                euler: Some(euler),
            }],
        }
    }

    pub fn point_count(&self) -> usize {
        self.components
            .iter()
            .map(|c| c.critical_points.len())
            .sum()
    }

    pub fn component(&self, name: &str) -> Option<&RegionComponent> {
        self.components.iter().find(|c| c.name == name)
    }

    pub fn validate(&self) -> Result<(), RegionError> {
        if self.components.is_empty() {
            return Err(RegionError::NoComponents);
        }
        let mut names = BTreeSet::new();
        for c in &self.components {
            if !names.insert(c.name.as_str()) {
                return Err(RegionError::DuplicateName(c.name.clone()));
            }
            if c.critical_points.is_empty() {
                return Err(RegionError::EmptyComponent(c.name.clone()));
            }
            if let Some(cp) = c.critical_points.iter().find(|p| p.index > self.dim) {
                return Err(RegionError::IndexOutOfRange {
                    component: c.name.clone(),
                    index: cp.index,
                    dim: self.dim,
                });
            }
            if let Some(declared) = c.euler {
                let found = c.signed_count();
                if declared != found {
                    return Err(RegionError::EulerMismatch {
                        component: c.name.clone(),
                        declared,
                        found,
                    });
                }
            }
        }
        Ok(())
    }
}

/// Moore spaces `S^1 ∪_p D^2`, one per entry of `p`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MooreSpaceSpec {
    pub p: Vec<u32>,
}

impl MooreSpaceSpec {
    pub fn single(p: u32) -> Self {
        MooreSpaceSpec { p: vec![p] }
    }

    /// Region data for entry `entry`: critical points of index 0 and 1 for the
    /// circle and index 2 for the disk, at increasing critical values.
    pub fn region(&self, entry: usize, dim: u32) -> Option<MorseRegionSpec> {
        let p = *self.p.get(entry)?;
        let cps = (0..3)
            .map(|i| CriticalPoint {
                index: i,
                value: Rational::integer(i64::from(i) - 3),
                label: Some(["circle0", "circle1", "disk2"][i as usize].to_string()),
                grading: None,
            })
            .collect();
        Some(MorseRegionSpec {
            dim,
            pushoff: Rational::integer(4),
            components: vec![RegionComponent {
                name: format!("moore{p}"),
                critical_points: cps,
                euler: Some(1),
            }],
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum MorseError {
    #[error("region dimension {found} does not match Legendrian dimension {expected}")]
    DimensionMismatch { expected: u32, found: u32 },
    #[error("unknown Legendrian {0}")]
    UnknownLegendrian(LegendrianId),
    #[error("unknown chord {0}")]
    UnknownChord(ChordId),
    #[error("invalid region: {0}")]
    InvalidRegion(#[from] RegionError),
    #[error("critical value {value} with pushoff gives a non-positive chord length")]
    NonPositiveLength { value: Rational },
    #[error("chord {0} is not degenerate")]
    NotDegenerate(ChordId),
    #[error("empty resolution")]
    EmptyResolution,
    #[error("resolution index {index} outside [0, {dim}]")]
    IndexOutOfRange { index: u32, dim: u32 },
    #[error("chord endpoints must be distinct Legendrians")]
    SameEndpoints,
}

/// Smallest value above `x` among `taken` and `ahead`, or `x + 1`.
fn ceiling(taken: &BTreeSet<Rational>, ahead: &[Rational], x: Rational) -> Rational {
    let t = taken.range(x..).find(|v| **v > x).copied();
    let a = ahead.iter().filter(|v| **v > x).min().copied();
    match (t, a) {
        (Some(t), Some(a)) => t.min(a),
        (Some(v), None) | (None, Some(v)) => v,
        (None, None) => x + Rational::integer(1),
    }
}

/// Free length for `wanted`, strictly above `floor` and below every later
/// raw value. Collisions are resolved by bisection toward the next bound.
fn untaken(
    taken: &BTreeSet<Rational>,
    ahead: &[Rational],
    floor: Option<Rational>,
    mut wanted: Rational,
) -> Rational {
    if let Some(lo) = floor {
        if wanted <= lo {
            wanted = Rational::midpoint(lo, ceiling(taken, ahead, lo));
        }
    }
    while taken.contains(&wanted) {
        wanted = Rational::midpoint(wanted, ceiling(taken, ahead, wanted));
    }
    wanted
}

/// One nondegenerate bounded chord per critical point of `spec`, ids issued
/// from `p`'s counter in order of increasing critical value.
pub fn chords_from_region(
    p: &Presentation,
    spec: &MorseRegionSpec,
    from: LegendrianId,
    to: LegendrianId,
) -> Result<Vec<ReebChord>, MorseError> {
    spec.validate()?;
    let src = p
        .legendrian(from)
        .ok_or(MorseError::UnknownLegendrian(from))?;
    p.legendrian(to).ok_or(MorseError::UnknownLegendrian(to))?;
    if from == to {
        return Err(MorseError::SameEndpoints);
    }
    if spec.dim != src.dim {
        return Err(MorseError::DimensionMismatch {
            expected: src.dim,
            found: spec.dim,
        });
    }

    let mut points: Vec<(&str, u32, &CriticalPoint)> = spec
        .components
        .iter()
        .flat_map(|c| {
            c.critical_points
                .iter()
                .enumerate()
                .map(move |(i, cp)| (c.name.as_str(), i as u32, cp))
        })
        .collect();
    // Stable sort keeps declaration order among equal critical values.
    points.sort_by_key(|(_, _, cp)| cp.value);

    let mut taken: BTreeSet<Rational> = p.chords_into(to).map(|c| c.length).collect();
    let raws: Vec<Rational> = points
        .iter()
        .map(|(_, _, cp)| cp.value + spec.pushoff)
        .collect();
    let mut out: Vec<ReebChord> = Vec::with_capacity(points.len());
    for (i, (component, point, cp)) in points.into_iter().enumerate() {
        let raw = raws[i];
        if !raw.is_positive() {
            return Err(MorseError::NonPositiveLength { value: cp.value });
        }
        let floor = out.last().map(|c| c.length);
        let length = untaken(&taken, &raws[i + 1..], floor, raw);
        taken.insert(length);
        out.push(ReebChord {
            id: ChordId(p.next_ids.chord + i as u32),
            from,
            to,
            local_index: cp.index,
            length,
            bounded: true,
            degenerate: false,
            grading: cp.stored_grading(),
            site: Some(ChordSite {
                component: component.to_string(),
                point,
            }),
        });
    }
    Ok(out)
}

/// Adds the chords of `spec` to `p` and records the region on `from`.
pub fn insert_region(
    p: &Presentation,
    spec: &MorseRegionSpec,
    from: LegendrianId,
    to: LegendrianId,
) -> Result<Presentation, MorseError> {
    let chords = chords_from_region(p, spec, from, to)?;
    let mut q = p.clone();
    for c in chords {
        q.next_ids.chord = c.id.0 + 1;
        q.chords.insert(c.id, c);
    }
    q.regions.push(RegionRecord {
        on: p.legendrians[&from].name.clone(),
        spec: spec.clone(),
        moore: None,
    });
    Ok(q)
}

/// Replaces degenerate chord `c` by one nondegenerate chord per resolution
/// entry. New lengths sit strictly between the neighbouring chord lengths, so
/// the order relative to every other chord is unchanged.
pub fn perturb_chord(
    p: &Presentation,
    c: ChordId,
    resolution: &[CriticalPoint],
) -> Result<Presentation, MorseError> {
    let chord = p.chords.get(&c).ok_or(MorseError::UnknownChord(c))?;
    if !chord.degenerate {
        return Err(MorseError::NotDegenerate(c));
    }
    if resolution.is_empty() {
        return Err(MorseError::EmptyResolution);
    }
    let dim = p
        .legendrian(chord.from)
        .ok_or(MorseError::UnknownLegendrian(chord.from))?
        .dim;
    if let Some(bad) = resolution.iter().find(|r| r.index > dim) {
        return Err(MorseError::IndexOutOfRange {
            index: bad.index,
            dim,
        });
    }

    let others = p.chords.values().filter(|o| o.id != c).map(|o| o.length);
    let below = others.clone().filter(|l| *l < chord.length).max();
    let above = others.filter(|l| *l > chord.length).min();
    let gap_below = chord.length - below.unwrap_or(Rational::integer(0));
    let gap_above = above.map_or(Rational::integer(2), |a| a - chord.length);
    let eps = Rational(gap_below.min(gap_above).0 / 2);
    let (lo, hi) = (chord.length - eps, chord.length + eps);

    let mut order: Vec<&CriticalPoint> = resolution.iter().collect();
    order.sort_by_key(|r| r.value);
    // The interval is centred on the old length and 2j/(2k+1) never equals
    // 1/2, so no new length collides with a chord tied to the old one.
    let k = order.len() as i64;
    let mut q = p.clone();
    q.chords.remove(&c);
    for (j, r) in order.into_iter().enumerate() {
        let t = Rational::new(2 * (j as i64 + 1), 2 * k + 1);
        let length = Rational(lo.0 + (hi.0 - lo.0) * t.0);
        q.add_chord(ReebChord {
            id: ChordId(0),
            from: chord.from,
            to: chord.to,
            local_index: r.index,
            length,
            bounded: chord.bounded,
            degenerate: false,
            grading: r.stored_grading(),
            site: chord.site.clone(),
        });
    }
    Ok(q)
}

/// True iff the region is disconnected with at least one disk component.
pub fn disconnect_check(spec: &MorseRegionSpec) -> bool {
    spec.components.len() >= 2 && spec.components.iter().any(RegionComponent::is_disk)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{Coefficient, LegendrianObject, Role};

    fn pair(dim: u32) -> (Presentation, LegendrianId, LegendrianId) {
        let mut p = Presentation::new(dim + 1);
        let a = p.add_legendrian(LegendrianObject::new(
            "a",
            dim,
            Role::Auxiliary,
            Coefficient::Minus1,
        ));
        let b = p.add_legendrian(LegendrianObject::new(
            "b",
            dim,
            Role::CarvePlus,
            Coefficient::Plus1,
        ));
        (p, a, b)
    }

    #[test]
    fn disk_gives_one_slideable_chord() {
        let (p, a, b) = pair(2);
        let chords = chords_from_region(&p, &MorseRegionSpec::disk(2), a, b).unwrap();
        assert_eq!(chords.len(), 1);
        assert_eq!(chords[0].local_index, 0);
        assert!(chords[0].bounded && !chords[0].degenerate);
    }

    #[test]
    fn sphere_gives_maximum_then_saddle() {
        let (p, a, b) = pair(2);
        let chords = chords_from_region(&p, &MorseRegionSpec::sphere(2, 1), a, b).unwrap();
        let idx: Vec<u32> = chords.iter().map(|c| c.local_index).collect();
        assert_eq!(idx, vec![0, 1]);
        assert!(chords[0].length < chords[1].length);
    }

    #[test]
    fn moore_space_gives_three_chords() {
        let (p, a, b) = pair(2);
        let spec = MooreSpaceSpec::single(3).region(0, 2).unwrap();
        let chords = chords_from_region(&p, &spec, a, b).unwrap();
        let idx: Vec<u32> = chords.iter().map(|c| c.local_index).collect();
        assert_eq!(idx, vec![0, 1, 2]);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let (p, a, b) = pair(2);
        let err = chords_from_region(&p, &MorseRegionSpec::disk(3), a, b).unwrap_err();
        assert_eq!(
            err,
            MorseError::DimensionMismatch {
                expected: 2,
                found: 3
            }
        );
    }

    #[test]
    fn equal_critical_values_are_separated() {
        let (p, a, b) = pair(2);
        let mut spec = MorseRegionSpec::disk(2);
        spec.components[0].critical_points = vec![CriticalPoint::new(0, Rational::integer(-1)); 3];
        spec.components[0].euler = None;
        let chords = chords_from_region(&p, &spec, a, b).unwrap();
        let lens: BTreeSet<Rational> = chords.iter().map(|c| c.length).collect();
        assert_eq!(lens.len(), 3);
        // Ids follow length order.
        assert!(chords
            .windows(2)
            .all(|w| w[0].length < w[1].length && w[0].id < w[1].id));
    }

    #[test]
    fn euler_mismatch_detected() {
        let mut spec = MorseRegionSpec::disk(2);
        spec.components[0].euler = Some(0);
        assert!(matches!(
            spec.validate(),
            Err(RegionError::EulerMismatch { .. })
        ));
    }

    fn degenerate(p: &mut Presentation, a: LegendrianId, b: LegendrianId, len: i64) -> ChordId {
        p.add_chord(ReebChord {
            id: ChordId(0),
            from: a,
            to: b,
            local_index: 0,
            length: Rational::integer(len),
            bounded: true,
            degenerate: true,
            grading: 0,
            site: None,
        })
    }

    #[test]
    fn singleton_resolution() {
        let (mut p, a, b) = pair(2);
        let c = degenerate(&mut p, a, b, 2);
        let q = perturb_chord(&p, c, &[CriticalPoint::new(0, Rational::integer(0))]).unwrap();
        assert_eq!(q.chords.len(), 1);
        let only = q.chords.values().next().unwrap();
        assert!(!only.degenerate);
        assert_eq!(only.local_index, 0);
        assert_ne!(only.id, c);
    }

    #[test]
    fn two_entry_resolution_adds_one_chord() {
        let (mut p, a, b) = pair(2);
        p = insert_region(&p, &MorseRegionSpec::sphere(2, 1), a, b).unwrap();
        let c = degenerate(&mut p, a, b, 5);
        let res = [
            CriticalPoint::new(0, Rational::integer(0)),
            CriticalPoint::new(1, Rational::integer(1)),
        ];
        let q = perturb_chord(&p, c, &res).unwrap();
        assert_eq!(q.chords.len(), p.chords.len() + 1);
        assert!(!q.chords.contains_key(&c));
    }

    #[test]
    fn empty_resolution_rejected() {
        let (mut p, a, b) = pair(2);
        let c = degenerate(&mut p, a, b, 2);
        assert_eq!(perturb_chord(&p, c, &[]), Err(MorseError::EmptyResolution));
    }

    #[test]
    fn nondegenerate_chord_rejected() {
        let (p, a, b) = pair(2);
        let p = insert_region(&p, &MorseRegionSpec::disk(2), a, b).unwrap();
        let c = *p.chords.keys().next().unwrap();
        assert_eq!(perturb_chord(&p, c, &[]), Err(MorseError::NotDegenerate(c)));
    }

    #[test]
    fn disconnect_cases() {
        let mut two = MorseRegionSpec::sphere(2, 1);
        two.components
            .push(MorseRegionSpec::disk(2).components.remove(0));
        assert!(disconnect_check(&two));
        assert!(!disconnect_check(&MorseRegionSpec::disk(2)));
        assert!(!disconnect_check(&MorseRegionSpec::sphere(2, 1)));
    }
}
