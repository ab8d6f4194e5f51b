//! From a step-by-step path to a structured program.
//!
//! Three stages: [`build_program_tree`] maps the path onto a program tree,
//! [`compress`] folds repeated structure while keeping the exact trace, and
//! [`vns_refine`] searches for a smaller program that still succeeds.

mod moves;
mod patch;
mod vns;

use std::cmp::Reverse;

use thiserror::Error;

use crate::interp::{execute, execute_actions, DEFAULT_FUEL};
use crate::maze::Maze;
use crate::program::{Action, Condition, Probe, Program, Stmt};
use crate::solver::{solve_low_within, Limits, Solution, SolveError, UnsolvableReason};

use moves::{candidates, Move};
pub use patch::{first_deviation, literal_block, patch, trace_equivalent, PatchFailure};
pub use vns::{objective, vns_refine, vns_refine_within, Neighborhood, Objective, VnsConfig};

/// Runs at least this long become `repeat` nodes in the program tree.
pub const RUN_THRESHOLD: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompressError {
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error(transparent)]
    Patch(#[from] PatchFailure),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PipelineError {
    #[error("maze is unsolvable: {0}")]
    Unsolvable(UnsolvableReason),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Compress(#[from] CompressError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stages {
    pub tree: Program,
    pub compressed: Program,
    pub refined: Program,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompressionResult {
    /// The step-by-step path the pipeline started from.
    pub actions: Vec<Action>,
    pub program: Program,
    pub block_count: usize,
    pub exec_steps: usize,
    /// Whether the final program replays `actions` exactly.
    pub trace_equivalent: bool,
    pub stages: Stages,
}

fn guarded_attack() -> Stmt {
    Stmt::if_(Condition::is(Probe::MonsterAhead), vec![Stmt::Action(Action::Attack)])
}

/// Maps a successful path onto a program tree: runs of three or more equal
/// actions become `repeat`, and each attack becomes
/// `if monster_ahead { attack }`. The tree replays `actions` exactly.
pub fn build_program_tree(actions: &[Action], m: &Maze) -> Result<Program, CompressError> {
    let trace = execute_actions(actions, m);
    if !trace.outcome.is_success() || trace.primitive_actions != actions {
        return Err(CompressError::Precondition(format!(
            "action sequence does not solve the maze ({:?})",
            trace.outcome
        )));
    }
    let mut body = Vec::new();
    let mut i = 0;
    while i < actions.len() {
        let a = actions[i];
        if a == Action::Attack {
            // the attack succeeded, so a monster stood ahead: the guard holds
            body.push(guarded_attack());
            i += 1;
            continue;
        }
        let run = actions[i..].iter().take_while(|&&b| b == a).count();
        if run >= RUN_THRESHOLD {
            body.push(Stmt::repeat(run as u32, vec![Stmt::Action(a)]));
        } else {
            body.extend(std::iter::repeat_n(Stmt::Action(a), run));
        }
        i += run;
    }
    let tree = Program::new(body);
    if !trace_equivalent(&tree, m, actions) {
        return Err(CompressError::Patch(PatchFailure {
            deviation: first_deviation(&execute(&tree, m, actions.len() + 1), actions).unwrap_or(0),
        }));
    }
    Ok(tree)
}

const COMPRESS_MOVES: [Move; 8] = [
    Move::Roll,
    Move::Absorb,
    Move::MergeRepeats,
    Move::MergeWhiles,
    Move::FlattenRepeat,
    Move::GuardedCorridor,
    Move::CorridorWhile,
    Move::StripGuard,
];

fn while_count(block: &[Stmt]) -> usize {
    block
        .iter()
        .map(|s| {
            usize::from(matches!(s, Stmt::While { .. }))
                + s.arms().into_iter().map(|b| while_count(b)).sum::<usize>()
        })
        .sum()
}

/// Fewer blocks first; at equal size, conditional loops beat counted ones.
fn rank(p: &Program) -> (usize, Reverse<usize>) {
    (p.block_count(), Reverse(while_count(&p.body)))
}

pub fn compress(tree: &Program, m: &Maze, reference: &[Action]) -> Result<Program, CompressError> {
    compress_within(tree, m, reference, &Limits::none())
}

/// Greedy best-first rewriting. Every candidate is executed; one that leaves
/// the reference trace goes through [`patch`], and is dropped (the rewrite
/// reverted) unless the patched program still ranks better.
pub fn compress_within(
    tree: &Program,
    m: &Maze,
    reference: &[Action],
    limits: &Limits,
) -> Result<Program, CompressError> {
    if !trace_equivalent(tree, m, reference) {
        return Err(CompressError::Precondition(
            "tree does not replay the reference path".into(),
        ));
    }
    let mut current = tree.clone();
    loop {
        limits.check()?;
        let here = rank(&current);
        let mut pool: Vec<(_, Program)> = COMPRESS_MOVES
            .iter()
            .flat_map(|&mv| candidates(&current, mv, m))
            .map(|p| (rank(&p), p))
            .filter(|(r, _)| *r < here)
            .collect();
        pool.sort_by_key(|(r, _)| *r);

        let mut accepted = None;
        for (_, cand) in pool {
            if trace_equivalent(&cand, m, reference) {
                accepted = Some(cand);
                break;
            }
            if let Ok(fixed) = patch(&cand, m, reference) {
                if rank(&fixed) < here && trace_equivalent(&fixed, m, reference) {
                    accepted = Some(fixed);
                    break;
                }
            }
        }
        match accepted {
            Some(next) => current = next,
            None => break,
        }
    }
    if !trace_equivalent(&current, m, reference) {
        return Err(PatchFailure {
            deviation: first_deviation(&execute(&current, m, reference.len() + 1), reference)
                .unwrap_or(0),
        }
        .into());
    }
    Ok(current)
}

pub fn solve_high(m: &Maze) -> Result<CompressionResult, PipelineError> {
    solve_high_with(m, &VnsConfig::default(), &Limits::none())
}

/// The full pipeline: shortest path, program tree, compression, refinement.
pub fn solve_high_with(
    m: &Maze,
    cfg: &VnsConfig,
    limits: &Limits,
) -> Result<CompressionResult, PipelineError> {
    let low = solve_low_within(m, limits)?;
    let actions = match low.solution {
        Solution::Actions(a) => a,
        Solution::Unsolvable(reason) => return Err(PipelineError::Unsolvable(reason)),
    };
    let tree = build_program_tree(&actions, m)?;
    let compressed = compress_within(&tree, m, &actions, limits)?;
    let refined = vns_refine_within(&compressed, m, cfg, limits)?;
    let trace = execute(&refined, m, DEFAULT_FUEL);
    Ok(CompressionResult {
        block_count: refined.block_count(),
        exec_steps: trace.fuel_used,
        trace_equivalent: trace.outcome.is_success() && trace.primitive_actions == actions,
        program: refined.clone(),
        actions,
        stages: Stages {
            tree,
            compressed,
            refined,
        },
    })
}
