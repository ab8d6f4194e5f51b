//! Shortest step-by-step solutions by breadth-first search.
//!
//! The search state is the avatar pose plus the gem, heart and monster masks.
//! Health is not part of the key: it is a function of the masks.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::interp::{advance, execute_actions, step, SimState};
use crate::maze::{Maze, MAX_GEMS, MAX_HEARTS, MAX_MONSTERS};
use crate::program::Action;

/// Longest sequence length [`oracle_enumerate`] accepts.
pub const ORACLE_MAX_LEN: usize = 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum UnsolvableReason {
    /// The goal cannot be reached with all gems even ignoring health.
    NoPath,
    /// Every route runs out of health.
    HealthInfeasible,
}

impl fmt::Display for UnsolvableReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UnsolvableReason::NoPath => "NoPath",
            UnsolvableReason::HealthInfeasible => "HealthInfeasible",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Solution {
    Actions(Vec<Action>),
    Unsolvable(UnsolvableReason),
}

#[derive(Debug, Clone)]
pub struct SolverResult {
    pub solution: Solution,
    /// Distinct search states reached, summed over both searches when the
    /// health-relaxed pass runs.
    pub explored: usize,
    pub elapsed: Duration,
}

impl SolverResult {
    pub fn actions(&self) -> Option<&[Action]> {
        match &self.solution {
            Solution::Actions(a) => Some(a),
            Solution::Unsolvable(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("maze exceeds solver capacity: {0}")]
    Capacity(String),
    #[error("search exceeded its time budget")]
    Timeout,
}

/// Optional bound on search time.
#[derive(Debug, Clone, Copy, Default)]
pub struct Limits {
    pub deadline: Option<Instant>,
}

impl Limits {
    pub fn none() -> Self {
        Limits::default()
    }

    pub fn within(budget: Duration) -> Self {
        Limits {
            deadline: Some(Instant::now() + budget),
        }
    }

    pub(crate) fn check(&self) -> Result<(), SolveError> {
        match self.deadline {
            Some(d) if Instant::now() >= d => Err(SolveError::Timeout),
            _ => Ok(()),
        }
    }
}

fn key(s: &SimState, m: &Maze) -> u64 {
    (m.cell_index(s.position) as u64)
        | (s.orientation.index() as u64) << 12
        | (s.gems_collected as u64) << 14
        | (s.hearts_collected as u64) << 30
        | (s.monsters_defeated as u64) << 38
}

fn bfs(m: &Maze, enforce_health: bool, limits: &Limits) -> Result<(Option<Vec<Action>>, usize), SolveError> {
    let init = SimState::initial(m);
    let root = key(&init, m);
    let mut parent: HashMap<u64, (u64, Action)> = HashMap::new();
    let mut seen: HashSet<u64> = HashSet::from([root]);
    let mut queue = VecDeque::from([init]);
    let mut expanded = 0usize;

    while let Some(s) = queue.pop_front() {
        expanded += 1;
        if expanded.is_multiple_of(4096) {
            limits.check()?;
        }
        let from = key(&s, m);
        for a in Action::ALL {
            let Ok(next) = advance(&s, a, m, enforce_health) else {
                continue;
            };
            let k = key(&next, m);
            if !seen.insert(k) {
                continue;
            }
            parent.insert(k, (from, a));
            if next.is_success(m) {
                let mut path = Vec::new();
                let mut cur = k;
                while cur != root {
                    let (p, a) = parent[&cur];
                    path.push(a);
                    cur = p;
                }
                path.reverse();
                return Ok((Some(path), seen.len()));
            }
            queue.push_back(next);
        }
    }
    Ok((None, seen.len()))
}

pub fn solve_low(m: &Maze) -> Result<SolverResult, SolveError> {
    solve_low_within(m, &Limits::none())
}

/// Breadth-first search expanding `move, turn_left, turn_right, turn_back,
/// attack` in that order, so ties always resolve the same way.
pub fn solve_low_within(m: &Maze, limits: &Limits) -> Result<SolverResult, SolveError> {
    let started = Instant::now();
    if m.gems().len() > MAX_GEMS || m.hearts().len() > MAX_HEARTS || m.monsters().len() > MAX_MONSTERS {
        return Err(SolveError::Capacity(format!(
            "{} gems, {} hearts, {} monsters",
            m.gems().len(),
            m.hearts().len(),
            m.monsters().len()
        )));
    }
    let (found, explored) = bfs(m, true, limits)?;
    let (solution, explored) = match found {
        Some(path) => (Solution::Actions(path), explored),
        None => {
            let (relaxed, more) = bfs(m, false, limits)?;
            let reason = if relaxed.is_some() {
                UnsolvableReason::HealthInfeasible
            } else {
                UnsolvableReason::NoPath
            };
            (Solution::Unsolvable(reason), explored + more)
        }
    };
    Ok(SolverResult {
        solution,
        explored,
        elapsed: started.elapsed(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Solvable(Vec<Action>),
    Unsolvable(UnsolvableReason),
}

impl Verdict {
    pub fn is_solvable(&self) -> bool {
        matches!(self, Verdict::Solvable(_))
    }
}

pub fn is_solvable(m: &Maze) -> Result<Verdict, SolveError> {
    is_solvable_within(m, &Limits::none())
}

pub fn is_solvable_within(m: &Maze, limits: &Limits) -> Result<Verdict, SolveError> {
    Ok(match solve_low_within(m, limits)?.solution {
        Solution::Actions(a) => Verdict::Solvable(a),
        Solution::Unsolvable(r) => Verdict::Unsolvable(r),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("oracle length {requested} exceeds the limit of {ORACLE_MAX_LEN}")]
pub struct OracleLimitError {
    pub requested: usize,
}

/// Test oracle: enumerates action sequences shortest first (and in action
/// order within a length) and returns the first one that succeeds.
///
/// It shares nothing with the breadth-first search except the single-step
/// game rules. Two sound prunings keep it tractable: an optimal sequence
/// never holds two consecutive turns (they fold into at most one), and never
/// revisits a state along its own path.
pub fn oracle_enumerate(m: &Maze, max_len: usize) -> Result<Option<Vec<Action>>, OracleLimitError> {
    if max_len > ORACLE_MAX_LEN {
        return Err(OracleLimitError { requested: max_len });
    }
    let init = SimState::initial(m);
    let mut path = Vec::with_capacity(max_len);
    let mut on_path = vec![strip(init)];
    for len in 1..=max_len {
        if dfs(m, init, len, &mut path, &mut on_path) {
            let trace = execute_actions(&path, m);
            assert!(
                trace.outcome.is_success() && trace.primitive_actions == path,
                "oracle sequence must replay to success"
            );
            return Ok(Some(path));
        }
    }
    Ok(None)
}

fn strip(mut s: SimState) -> SimState {
    s.steps_taken = 0;
    s
}

fn dfs(m: &Maze, s: SimState, remaining: usize, path: &mut Vec<Action>, on_path: &mut Vec<SimState>) -> bool {
    if remaining == 0 {
        return false;
    }
    let last_was_turn = path.last().is_some_and(|a| a.is_turn());
    for a in Action::ALL {
        if last_was_turn && a.is_turn() {
            continue;
        }
        let Ok(next) = step(&s, a, m) else {
            continue;
        };
        let bare = strip(next);
        if on_path.contains(&bare) {
            continue;
        }
        path.push(a);
        if next.is_success(m) {
            if remaining == 1 {
                return true;
            }
            // succeeded early: a shorter length already covered this prefix
            path.pop();
            continue;
        }
        on_path.push(bare);
        if dfs(m, next, remaining - 1, path, on_path) {
            return true;
        }
        on_path.pop();
        path.pop();
    }
    false
}

/// Length of the oracle's optimum, if one exists within `max_len`.
pub fn oracle_length(m: &Maze, max_len: usize) -> Result<Option<usize>, OracleLimitError> {
    Ok(oracle_enumerate(m, max_len)?.map(|p| p.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interp::{execute_actions, Outcome};
    use crate::maze::Dir;
    use Action::*;

    fn maze(pic: &str) -> Maze {
        Maze::from_picture(pic, Dir::East).unwrap()
    }

    #[test]
    fn corridor() {
        let r = solve_low(&maze("S . G")).unwrap();
        assert_eq!(r.actions(), Some(&[MoveForward, MoveForward][..]));
    }

    #[test]
    fn bat_in_the_way() {
        let m = maze("S b . G");
        let r = solve_low(&m).unwrap();
        let actions = r.actions().unwrap().to_vec();
        assert_eq!(actions, vec![Attack, MoveForward, MoveForward, MoveForward]);
        let t = execute_actions(&actions, &m);
        assert_eq!(t.outcome, Outcome::Success);
        assert_eq!(t.final_state().health, 80);
        assert_eq!(oracle_length(&m, 6).unwrap(), Some(4));
    }

    #[test]
    fn obstacle_severs_path() {
        let m = maze("S # G");
        assert_eq!(
            solve_low(&m).unwrap().solution,
            Solution::Unsolvable(UnsolvableReason::NoPath)
        );
        assert_eq!(oracle_enumerate(&m, 8).unwrap(), None);
    }

    #[test]
    fn two_dragons_are_health_infeasible() {
        let m = maze("S d d G");
        assert_eq!(
            is_solvable(&m).unwrap(),
            Verdict::Unsolvable(UnsolvableReason::HealthInfeasible)
        );
        // 100 + 20 - 120 = 0 is still death
        assert!(!is_solvable(&maze("S + d d G")).unwrap().is_solvable());
        assert!(is_solvable(&maze("S + + d d G")).unwrap().is_solvable());
    }

    #[test]
    fn oracle_limit() {
        assert_eq!(
            oracle_enumerate(&maze("S.G"), 15),
            Err(OracleLimitError { requested: 15 })
        );
        assert_eq!(oracle_enumerate(&maze("S . G"), 4).unwrap(), Some(vec![MoveForward, MoveForward]));
    }

    #[test]
    fn detour_for_gem() {
        let m = maze("S . G\n. * .");
        let r = solve_low(&m).unwrap();
        let len = r.actions().unwrap().len();
        assert_eq!(Some(len), oracle_length(&m, 10).unwrap());
        assert!(execute_actions(r.actions().unwrap(), &m).outcome.is_success());
    }

    #[test]
    fn timeout_is_reported() {
        let past = Limits {
            deadline: Some(Instant::now() - Duration::from_secs(1)),
        };
        // a grid big enough to expand more than one check interval
        let mut b = Maze::builder(30, 30);
        b.start(crate::maze::Pos::new(0, 0), Dir::East)
            .goal(crate::maze::Pos::new(29, 29));
        for i in 0..8 {
            b.gem(crate::maze::Pos::new(i * 3 + 1, 15));
        }
        assert_eq!(solve_low_within(&b.build().unwrap(), &past).unwrap_err(), SolveError::Timeout);
    }
}
