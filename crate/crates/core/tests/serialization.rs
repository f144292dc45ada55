use serde::de::DeserializeOwned;
use serde::Serialize;

use simplex_reach::generators::b0_zero_temperature;
use simplex_reach::propagate::{ControlSchedule, Segment};
use simplex_reach::simplex::{Block, Permutation, SimplexVector};
use simplex_reach::steering::{plan_theorem2, steer_from_ground};

fn round_trip<T: Serialize + DeserializeOwned + PartialEq + std::fmt::Debug>(v: &T) {
    let text = serde_json::to_string(v).unwrap();
    let back: T = serde_json::from_str(&text).unwrap();
    assert_eq!(&back, v);
    assert_eq!(serde_json::to_string(&back).unwrap(), text);
}

fn bits(v: &[f64]) -> Vec<u64> {
    v.iter().map(|x| x.to_bits()).collect()
}

#[test]
fn simplex_vector_document_shape() {
    let x = SimplexVector::new(vec![0.1, 0.2, 0.7]).unwrap();
    let text = serde_json::to_string(&x).unwrap();
    assert_eq!(text, r#"{"n":3,"entries":[0.1,0.2,0.7]}"#);
    let back: SimplexVector = serde_json::from_str(&text).unwrap();
    assert_eq!(bits(back.as_slice()), bits(x.as_slice()));
}

#[test]
fn awkward_floats_round_trip_bit_exactly() {
    let raw = [1.0 / 3.0, std::f64::consts::PI / 10.0, 5e-324, 0.0];
    let s: f64 = raw.iter().sum();
    let x = SimplexVector::new(raw.iter().map(|v| v / s).collect()).unwrap();
    let back: SimplexVector = serde_json::from_str(&serde_json::to_string(&x).unwrap()).unwrap();
    assert_eq!(bits(back.as_slice()), bits(x.as_slice()));
}

#[test]
fn documents_are_validated_on_parse() {
    assert!(serde_json::from_str::<SimplexVector>(r#"{"n":2,"entries":[0.5,0.6]}"#).is_err());
    assert!(serde_json::from_str::<SimplexVector>(r#"{"n":3,"entries":[0.5,0.5]}"#).is_err());
    assert!(serde_json::from_str::<Permutation>("[1,1,2]").is_err());
    assert!(serde_json::from_str::<Permutation>("[0,1]").is_err());
    assert!(serde_json::from_str::<ControlSchedule>(
        r#"[{"duration":-1.0,"permutation":[1,2]}]"#
    )
    .is_err());
}

#[test]
fn permutations_and_blocks_are_one_based() {
    let p = Permutation::from_one_based(&[6, 3, 4, 1, 5, 2]).unwrap();
    assert_eq!(serde_json::to_string(&p).unwrap(), "[6,3,4,1,5,2]");
    round_trip(&p);
    let b = Block::one_based(3, 4);
    assert_eq!(serde_json::to_string(&b).unwrap(), r#"{"lo":3,"hi":4}"#);
    round_trip(&b);
}

#[test]
fn schedules_and_plans_round_trip() {
    let sched = ControlSchedule::new(vec![
        Segment {
            duration: 0.0,
            permutation: Permutation::from_one_based(&[2, 1, 3]).unwrap(),
        },
        Segment {
            duration: 0.1 + 0.2,
            permutation: Permutation::identity(3),
        },
    ])
    .unwrap();
    let text = serde_json::to_string(&sched).unwrap();
    assert!(text.starts_with(r#"[{"duration":0.0,"permutation":[2,1,3]}"#));
    round_trip(&sched);

    let b = b0_zero_temperature(4).unwrap();
    let target = SimplexVector::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
    round_trip(&steer_from_ground(&b, &target).unwrap());

    let x0 = SimplexVector::uniform(4).unwrap();
    round_trip(&plan_theorem2(2, 2, &x0, &target, 1e-5).unwrap());
}
