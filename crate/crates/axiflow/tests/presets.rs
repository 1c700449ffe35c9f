//! Invariants of the preset curves.

use axiflow::functionals::{mesh_ratio, surface_area, turning_number};
use axiflow::geometry::{validate, BoundaryClass, Topology};
use axiflow::presets::{make_preset_with, Side};
use axiflow::{make_preset, Error, Preset};
use proptest::prelude::*;

fn presets() -> impl Strategy<Value = Preset> {
    presets_with(8..96)
}

fn presets_with(j: std::ops::Range<usize>) -> impl Strategy<Value = Preset> {
    prop_oneof![
        j.clone()
            .prop_map(|elements| Preset::PerturbedSemicircle { elements }),
        (j.clone(), 0.5..2.0, any::<bool>()).prop_map(|(elements, radius, clockwise)| {
            Preset::Circle {
                elements,
                center: [3.0, 0.3],
                radius,
                clockwise,
            }
        }),
        (j.clone(), 0.2..1.0, 2.0..5.0).prop_map(|(elements, width, height)| Preset::Cigar {
            elements,
            center: [3.0, 0.0],
            width,
            height
        }),
        (j.clone(), 0.1..0.4, any::<bool>()).prop_map(|(elements, small_radius, right)| {
            Preset::TwoCircles {
                elements,
                side: if right { Side::Right } else { Side::Left },
                small_radius,
            }
        }),
        (j.clone(), 0.0..0.5, any::<bool>()).prop_map(|(elements, skew, flip)| {
            Preset::Lemniscate {
                elements,
                center: 1.5,
                half_width: 1.0,
                height: 1.2,
                skew,
                flip,
            }
        }),
        (j.clone(), 2.0..6.0, 0.3..1.5).prop_map(|(elements, width, thickness)| Preset::FlatDisc {
            elements,
            width,
            thickness
        }),
        (j.clone(), 0.3..3.0).prop_map(|(elements, angle)| Preset::SphericalCap {
            elements,
            radius: 1.0,
            angle
        }),
        j.clone().prop_map(|elements| Preset::OpenCylinder {
            elements,
            radius: 1.0,
            height: 2.0
        }),
        (j.clone(), 0.0..0.8).prop_map(|(elements, depth)| Preset::Dumbbell {
            elements,
            radius: 1.0,
            depth
        }),
        (j.clone(), 0.5..3.1).prop_map(|(elements, start_angle)| Preset::TorusCap {
            elements,
            center: 2.0,
            radius: 1.0,
            start_angle
        }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn presets_stay_in_the_half_plane(preset in presets()) {
        let curve = make_preset(&preset).unwrap();
        prop_assert_eq!(curve.num_elements(), preset.elements());
        prop_assert_eq!(curve.topology(), preset.default_topology());
        for &i in curve.endpoints().iter() {
            if curve.boundary_class(i) == Some(BoundaryClass::Axis) {
                prop_assert_eq!(curve.nodes()[i].x, 0.0);
            }
        }
        for (i, p) in curve.nodes().iter().enumerate() {
            prop_assert!(p.x >= 0.0);
            if !curve.endpoints().contains(&i) {
                prop_assert!(p.x > 0.0, "interior vertex {} on the axis", i);
            }
        }
        prop_assert!(surface_area(&curve) > 0.0);
    }

    #[test]
    fn resampled_presets_have_nearly_uniform_meshes(preset in presets_with(128..256)) {
        prop_assume!(!matches!(preset, Preset::PerturbedSemicircle { .. }));
        let curve = make_preset(&preset).unwrap();
        prop_assert!(mesh_ratio(&curve) < 1.1, "ratio {}", mesh_ratio(&curve));
    }

    #[test]
    fn turning_numbers_of_periodic_presets(preset in presets_with(64..160)) {
        let curve = make_preset(&preset).unwrap();
        let expected = match preset {
            Preset::Circle { clockwise: true, .. } | Preset::Cigar { .. } => -1,
            Preset::Circle { clockwise: false, .. } => 1,
            Preset::TwoCircles { side: Side::Right, .. } => 2,
            Preset::TwoCircles { side: Side::Left, .. } => -2,
            Preset::Lemniscate { .. } => 0,
            _ => {
                prop_assert!(matches!(turning_number(&curve), Err(Error::NotPeriodic)));
                return Ok(());
            }
        };
        prop_assert_eq!(turning_number(&curve).unwrap().value, expected);
    }

    #[test]
    fn presets_round_trip_through_json(preset in presets()) {
        let text = serde_json::to_string(&preset).unwrap();
        let back: Preset = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, preset);
    }
}

#[test]
fn genus_zero_presets_are_valid_initial_data() {
    for preset in [
        Preset::PerturbedSemicircle { elements: 32 },
        Preset::FlatDisc {
            elements: 64,
            width: 5.0,
            thickness: 1.0,
        },
    ] {
        assert!(
            validate(&make_preset(&preset).unwrap()).is_valid(),
            "{preset:?}"
        );
    }
}

#[test]
fn open_profiles_accept_other_boundary_classes() {
    let cylinder = Preset::OpenCylinder {
        elements: 8,
        radius: 1.0,
        height: 2.0,
    };
    let ends = (BoundaryClass::Free, BoundaryClass::Semifree2);
    let curve = make_preset_with(&cylinder, Some(ends)).unwrap();
    assert_eq!(
        curve.topology(),
        Topology::Interval {
            start: ends.0,
            end: ends.1
        }
    );
    let cap = Preset::SphericalCap {
        elements: 8,
        radius: 1.0,
        angle: 1.0,
    };
    assert!(matches!(
        make_preset_with(&cap, Some((BoundaryClass::Navier, BoundaryClass::Navier))),
        Err(Error::InvalidPresetParams(_))
    ));
}

#[test]
fn invalid_parameters_are_rejected() {
    for preset in [
        Preset::Circle {
            elements: 8,
            center: [0.5, 0.0],
            radius: 1.0,
            clockwise: true,
        },
        Preset::Circle {
            elements: 2,
            center: [3.0, 0.0],
            radius: 1.0,
            clockwise: true,
        },
        Preset::PerturbedSemicircle { elements: 1 },
        Preset::FlatDisc {
            elements: 16,
            width: 1.0,
            thickness: 2.0,
        },
        Preset::Dumbbell {
            elements: 16,
            radius: 1.0,
            depth: 1.5,
        },
    ] {
        assert!(
            matches!(make_preset(&preset), Err(Error::InvalidPresetParams(_))),
            "{preset:?}"
        );
    }
    assert!(
        serde_json::from_str::<Preset>(r#"{"kind": "circle", "elements": 8, "radius": 1}"#)
            .is_err()
    );
}
