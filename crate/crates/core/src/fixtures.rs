//! Hand-encoded example presentations.
//!
//! `ex1`..`ex3` are carve inputs: T*D^n with one critical handle attached
//! along an unknot `lambda`, and a carving unknot `lambda_plus` whose chords
//! come from a region of `lambda`. `cor13` is the P-loose starting diagram.

use crate::diagram::{
    ChordSite, Coefficient, CuspStyle, Decoration, LegendrianId, LegendrianObject, Presentation,
    Rational, RegionRecord, Role, TopoType,
};
use crate::morse::{
    insert_region, CriticalPoint, MooreSpaceSpec, MorseRegionSpec, RegionComponent,
};
use crate::pipelines::{ploose_input, CarveInput, PipelineError};

pub const NAMES: [&str; 4] = ["ex1", "ex2", "ex3", "cor13"];

/// Default half-dimension for shipped fixtures.
pub const DEFAULT_N: u32 = 3;

fn base(n: u32, region: &MorseRegionSpec) -> CarveInput {
    let mut p = Presentation::new(n);
    p.add_handle(0);
    let h = p.add_handle(n);
    let lambda = p.add_legendrian(
        LegendrianObject::new("lambda", n - 1, Role::Attaching, Coefficient::Minus1).attached(h),
    );
    let plus = p.add_legendrian(LegendrianObject::new(
        "lambda_plus",
        n - 1,
        Role::CarvePlus,
        Coefficient::Plus1,
    ));
    let p = insert_region(&p, region, lambda, plus).expect("fixture regions are valid");
    CarveInput {
        presentation: p,
        carry: vec![lambda],
    }
}

/// The region is a disk: one index-0 chord.
pub fn ex1(n: u32) -> CarveInput {
    base(n, &MorseRegionSpec::disk(n - 1))
}

/// The region is a disjoint union of `u_prime` (a maximum and a saddle) and
/// a disk whose chord is the longest.
pub fn ex2(n: u32) -> CarveInput {
    let spec = MorseRegionSpec {
        dim: n - 1,
        pushoff: Rational::integer(6),
        components: vec![
            RegionComponent {
                name: "u_prime".into(),
                critical_points: vec![
                    CriticalPoint::new(0, Rational::integer(-5)),
                    CriticalPoint::new(1, Rational::integer(-4)),
                ],
                euler: Some(0),
            },
            RegionComponent {
                name: "disk".into(),
                critical_points: vec![CriticalPoint::new(0, Rational::integer(-1))],
                euler: Some(1),
            },
        ],
    };
    base(n, &spec)
}

/// The region is a neighbourhood of S^k: a maximum and an index-k saddle.
pub fn ex3(n: u32, k: u32) -> CarveInput {
    base(n, &MorseRegionSpec::sphere(n - 1, k))
}

pub fn cor13(p: u32, n: u32) -> Result<Presentation, PipelineError> {
    ploose_input(&MooreSpaceSpec::single(p), n)
}

/// Expected carve result for [`ex1`]: `lambda` is a connected sum of two
/// unknots that no longer passes the new (n-1)-handle.
pub fn ex1_result(n: u32) -> Presentation {
    let mut p = Presentation::new(n);
    p.add_handle(0);
    let h = p.add_handle(n);
    let extra = p.add_handle(n - 1);
    let mut lambda =
        LegendrianObject::new("lambda", n - 1, Role::Attaching, Coefficient::Minus1).attached(h);
    lambda.topo_type = TopoType::ConnectSumOfUnknots { components: 2 };
    lambda.decorations = vec![
        Decoration::CuspConnectSum {
            with: "lambda_minus".into(),
            style: CuspStyle::CuspRing,
            site: Some(ChordSite {
                component: "disk".into(),
                point: 0,
            }),
        },
        Decoration::CuspPassedOverHandle {
            handle: extra,
            remaining: 0,
            exclusive: true,
        },
    ];
    p.add_legendrian(lambda);
    p.regions.push(RegionRecord {
        on: "lambda".into(),
        spec: MorseRegionSpec::disk(n - 1),
        moore: None,
    });
    p
}

/// Named fixture as a carve-input document.
pub fn by_name(name: &str, n: u32) -> Option<CarveInput> {
    match name {
        "ex1" => Some(ex1(n)),
        "ex2" => Some(ex2(n)),
        "ex3" => Some(ex3(n, 1)),
        "cor13" => cor13(0, n).ok().map(CarveInput::from),
        _ => None,
    }
}

/// The Legendrian named `lambda`, which every carve fixture has.
pub fn lambda(p: &Presentation) -> LegendrianId {
    p.legendrian_by_name("lambda")
        .expect("fixture has lambda")
        .id
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::validate::validate;

    #[test]
    fn fixtures_validate() {
        for n in 3..=5 {
            for name in NAMES {
                let f = by_name(name, n).unwrap();
                assert_eq!(validate(&f.presentation), vec![], "{name} n={n}");
            }
            assert_eq!(validate(&ex1_result(n)), vec![]);
        }
    }

    #[test]
    fn chord_shapes() {
        let one = ex1(3).presentation;
        assert_eq!(one.chords.len(), 1);
        let two = ex2(3).presentation;
        let mut idx: Vec<_> = two
            .chords
            .values()
            .map(|c| (c.length, c.local_index))
            .collect();
        idx.sort();
        assert_eq!(idx.iter().map(|x| x.1).collect::<Vec<_>>(), vec![0, 1, 0]);
        let three = ex3(4, 2).presentation;
        let mut idx: Vec<_> = three.chords.values().map(|c| c.local_index).collect();
        idx.sort();
        assert_eq!(idx, vec![0, 2]);
    }

    #[test]
    fn unknown_name() {
        assert!(by_name("ex9", 3).is_none());
    }
}
