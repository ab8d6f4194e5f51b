//! Variable neighborhood search over program rewrites.
//!
//! Objective: `(block_count, exec_steps)` compared lexicographically, over
//! programs that still reach success. Shaking picks one random move from the
//! current neighborhood; a first-improvement descent over all neighborhoods
//! follows. The neighborhood index resets on improvement and advances
//! otherwise.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::moves::{candidates, Move};
use crate::interp::{execute, DEFAULT_FUEL};
use crate::maze::Maze;
use crate::program::Program;
use crate::solver::{Limits, SolveError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Neighborhood {
    /// N1: roll windows into loops, unroll or peel counted loops.
    LoopRoll,
    /// N2: merge adjacent loops with equal bodies.
    MergeLoops,
    /// N3: swap counted and conditional loops.
    LoopSwap,
    /// N4: hoist shared statements out of `if`/`else` branches.
    Hoist,
    /// N5: fold or delete adjacent turns.
    DeadTurns,
}

impl Neighborhood {
    pub const ALL: [Neighborhood; 5] = [
        Neighborhood::LoopRoll,
        Neighborhood::MergeLoops,
        Neighborhood::LoopSwap,
        Neighborhood::Hoist,
        Neighborhood::DeadTurns,
    ];

    fn moves(self) -> &'static [Move] {
        match self {
            Neighborhood::LoopRoll => &[Move::Roll, Move::Absorb, Move::Unroll, Move::Peel],
            Neighborhood::MergeLoops => &[Move::MergeRepeats, Move::MergeWhiles, Move::FlattenRepeat],
            Neighborhood::LoopSwap => &[Move::RepeatToWhile, Move::WhileToRepeat],
            Neighborhood::Hoist => &[Move::Hoist],
            Neighborhood::DeadTurns => &[Move::FuseTurns],
        }
    }

    fn candidates(self, p: &Program, maze: &Maze) -> Vec<Program> {
        self.moves()
            .iter()
            .flat_map(|&mv| candidates(p, mv, maze))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VnsConfig {
    pub max_iterations: usize,
    pub no_improve_cap: usize,
    pub neighborhoods: Vec<Neighborhood>,
    pub seed: u64,
}

impl Default for VnsConfig {
    fn default() -> Self {
        VnsConfig {
            max_iterations: 200,
            no_improve_cap: 30,
            neighborhoods: Neighborhood::ALL.to_vec(),
            seed: 42,
        }
    }
}

/// `(block_count, exec_steps)`, or `None` when the program fails on the maze.
pub type Objective = (usize, usize);

pub fn objective(p: &Program, maze: &Maze) -> Option<Objective> {
    let t = execute(p, maze, DEFAULT_FUEL);
    t.outcome.is_success().then(|| (p.block_count(), t.fuel_used))
}

pub fn vns_refine(p: &Program, maze: &Maze, cfg: &VnsConfig) -> Program {
    vns_refine_within(p, maze, cfg, &Limits::none()).expect("no deadline set")
}

pub fn vns_refine_within(
    p: &Program,
    maze: &Maze,
    cfg: &VnsConfig,
    limits: &Limits,
) -> Result<Program, SolveError> {
    let Some(start_score) = objective(p, maze) else {
        return Ok(p.clone());
    };
    let hoods = if cfg.neighborhoods.is_empty() {
        Neighborhood::ALL.to_vec()
    } else {
        cfg.neighborhoods.clone()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (mut best, best_score) = descend(p.clone(), Some(start_score), maze, &hoods, limits)?;
    let mut best_score = best_score.unwrap_or(start_score);

    let mut k = 0;
    let mut stall = 0;
    let mut iteration = 0;
    while iteration < cfg.max_iterations && stall < cfg.no_improve_cap {
        iteration += 1;
        limits.check()?;
        let pool = hoods[k].candidates(&best, maze);
        if pool.is_empty() {
            k = (k + 1) % hoods.len();
            stall += 1;
            continue;
        }
        let shaken = pool[rng.random_range(0..pool.len())].clone();
        let shaken_score = objective(&shaken, maze);
        let (local, local_score) = descend(shaken, shaken_score, maze, &hoods, limits)?;
        match local_score {
            Some(s) if s < best_score => {
                best = local;
                best_score = s;
                k = 0;
                stall = 0;
            }
            _ => {
                k = (k + 1) % hoods.len();
                stall += 1;
            }
        }
    }
    Ok(best)
}

/// First-improvement descent, restarting from the first neighborhood after
/// every accepted move. Invalid programs rank below every valid one.
fn descend(
    mut current: Program,
    mut score: Option<Objective>,
    maze: &Maze,
    hoods: &[Neighborhood],
    limits: &Limits,
) -> Result<(Program, Option<Objective>), SolveError> {
    'outer: loop {
        limits.check()?;
        for hood in hoods {
            for cand in hood.candidates(&current, maze) {
                if let Some(s) = objective(&cand, maze) {
                    if score.is_none_or(|cur| s < cur) {
                        current = cand;
                        score = Some(s);
                        continue 'outer;
                    }
                }
            }
        }
        return Ok((current, score));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maze::Dir;
    use crate::program::{parse_program, print_program};

    #[test]
    fn merges_adjacent_repeats() {
        let m = Maze::from_picture("S . . . . . G", Dir::East).unwrap();
        let p = parse_program("repeat 3 { move }\nrepeat 3 { move }").unwrap();
        assert_eq!(p.block_count(), 4);
        let out = vns_refine(&p, &m, &VnsConfig::default());
        assert_eq!(out.block_count(), 2);
        assert!(objective(&out, &m).is_some());
    }

    #[test]
    fn local_optimum_is_kept() {
        let m = Maze::from_picture("S . G", Dir::East).unwrap();
        let p = parse_program("while path_ahead { move }").unwrap();
        assert_eq!(vns_refine(&p, &m, &VnsConfig::default()), p);
    }

    #[test]
    fn seeded_runs_repeat() {
        let m = Maze::from_picture("S . . .\n. # # .\n. . . G", Dir::East).unwrap();
        let p = parse_program("move; move; move; turn_right; turn_left; turn_right; move; move").unwrap();
        let cfg = VnsConfig::default();
        let a = vns_refine(&p, &m, &cfg);
        let b = vns_refine(&p, &m, &cfg);
        assert_eq!(print_program(&a), print_program(&b));
        assert!(objective(&a, &m).unwrap() <= objective(&p, &m).unwrap());
        assert!(objective(&a, &m).unwrap().0 < p.block_count());
    }

    #[test]
    fn failing_input_is_returned() {
        let m = Maze::from_picture("S # G", Dir::East).unwrap();
        let p = parse_program("move").unwrap();
        assert_eq!(vns_refine(&p, &m, &VnsConfig::default()), p);
    }
}
