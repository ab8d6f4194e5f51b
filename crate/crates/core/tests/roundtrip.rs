mod common;

use common::{arb_maze, arb_program};
use mazemate_core::{parse_maze, parse_program, print_program, serialize_maze};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn program_round_trip(p in arb_program()) {
        let text = print_program(&p);
        let back = parse_program(&text).unwrap();
        prop_assert_eq!(&back, &p);
        prop_assert_eq!(print_program(&back), text);
    }

    #[test]
    fn maze_round_trip(m in arb_maze()) {
        let doc = serialize_maze(&m);
        let back = parse_maze(&doc).unwrap();
        prop_assert_eq!(&back, &m);
        prop_assert_eq!(serialize_maze(&back), doc);
    }

    #[test]
    fn canonical_form_ignores_entity_order(m in arb_maze(), seed in any::<u64>()) {
        let mut v: Value = serde_json::from_str(&serialize_maze(&m)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for key in ["obstacles", "gems", "hearts", "monsters"] {
            v[key].as_array_mut().unwrap().shuffle(&mut rng);
        }
        let shuffled = serde_json::to_string(&v).unwrap();
        prop_assert_eq!(serialize_maze(&parse_maze(&shuffled).unwrap()), serialize_maze(&m));
    }
}

#[test]
fn minimal_document_takes_defaults() {
    let m = parse_maze(r#"{"width":3,"height":1,"start":{"x":0,"y":0,"dir":"E"},"goal":{"x":2,"y":0}}"#).unwrap();
    assert_eq!(m.width(), 3);
    assert!(m.gems().is_empty());
    assert_eq!(m.initial_health(), 100);
    assert_eq!(m.heart_heal(), 20);
}
