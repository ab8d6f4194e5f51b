#![allow(dead_code)]

use mazemate_core::corpus::{random_maze, CorpusSpec};
use mazemate_core::program::{Condition, Probe};
use mazemate_core::{Action, Maze, Program, Stmt};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn arb_action() -> impl Strategy<Value = Action> {
    prop::sample::select(Action::ALL.to_vec())
}

pub fn arb_condition() -> impl Strategy<Value = Condition> {
    (prop::sample::select(Probe::ALL.to_vec()), any::<bool>())
        .prop_map(|(probe, negated)| Condition { probe, negated })
}

pub fn arb_stmt() -> impl Strategy<Value = Stmt> {
    let leaf = arb_action().prop_map(Stmt::Action);
    leaf.prop_recursive(4, 40, 4, |inner| {
        let block = prop::collection::vec(inner, 1..4);
        prop_oneof![
            (1u32..50, block.clone()).prop_map(|(n, b)| Stmt::repeat(n, b)),
            (arb_condition(), block.clone()).prop_map(|(c, b)| Stmt::while_(c, b)),
            (arb_condition(), block.clone()).prop_map(|(c, b)| Stmt::if_(c, b)),
            (arb_condition(), block.clone(), block).prop_map(|(c, t, e)| Stmt::if_else(c, t, e)),
        ]
    })
}

pub fn arb_program() -> impl Strategy<Value = Program> {
    prop::collection::vec(arb_stmt(), 1..6).prop_map(Program::new)
}

pub fn arb_maze() -> impl Strategy<Value = Maze> {
    any::<u64>().prop_map(|seed| random_maze(&mut ChaCha8Rng::seed_from_u64(seed), &CorpusSpec::small()))
}
