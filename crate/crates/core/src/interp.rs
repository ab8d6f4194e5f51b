//! Game rules and the program interpreter.

use serde::Serialize;
use thiserror::Error;

use crate::maze::{Cell, Dir, Maze, Pos};
use crate::program::{Action, Arm, Condition, Probe, Program, Stmt, StmtPath};

pub const DEFAULT_FUEL: usize = 10_000;

/// Avatar state during a run. Masks index the maze's sorted entity lists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct SimState {
    pub position: Pos,
    pub orientation: Dir,
    pub health: i32,
    pub gems_collected: u16,
    pub hearts_collected: u8,
    pub monsters_defeated: u16,
    pub steps_taken: u32,
}

impl SimState {
    /// Start pose; anything collectible on the start cell is picked up.
    pub fn initial(m: &Maze) -> SimState {
        let mut s = SimState {
            position: m.start(),
            orientation: m.start_dir(),
            health: m.initial_health(),
            gems_collected: 0,
            hearts_collected: 0,
            monsters_defeated: 0,
            steps_taken: 0,
        };
        s.collect(m);
        s
    }

    pub fn all_gems_collected(&self, m: &Maze) -> bool {
        self.gems_collected == m.full_gem_mask()
    }

    pub fn is_success(&self, m: &Maze) -> bool {
        self.position == m.goal() && self.all_gems_collected(m)
    }

    pub fn front(&self) -> Pos {
        self.position.offset(self.orientation)
    }

    /// Health recomputed from the collection masks alone.
    pub fn accounted_health(&self, m: &Maze) -> i32 {
        let healed = m.heart_heal() * self.hearts_collected.count_ones() as i32;
        let damage: i32 = (0..m.monsters().len())
            .filter(|&i| self.monsters_defeated & (1 << i) != 0)
            .map(|i| m.monster_damage(i))
            .sum();
        m.initial_health() + healed - damage
    }

    fn monster_ahead(&self, m: &Maze) -> Option<usize> {
        match m.cell(self.front()) {
            Cell::Monster(i) if self.monsters_defeated & (1 << i) == 0 => Some(i as usize),
            _ => None,
        }
    }

    fn path_ahead(&self, m: &Maze) -> bool {
        match m.cell(self.front()) {
            Cell::Obstacle => false,
            Cell::Monster(i) => self.monsters_defeated & (1 << i) != 0,
            _ => true,
        }
    }

    fn collect(&mut self, m: &Maze) {
        match m.cell(self.position) {
            Cell::Gem(i) => self.gems_collected |= 1 << i,
            Cell::Heart(i) if self.hearts_collected & (1 << i) == 0 => {
                self.hearts_collected |= 1 << i;
                self.health += m.heart_heal();
            }
            _ => {}
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Error, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RunFailure {
    #[error("cannot move forward: the cell ahead is blocked")]
    InvalidMove,
    #[error("nothing to attack ahead")]
    InvalidAttack,
    #[error("health would drop to zero")]
    Death,
}

pub fn eval_condition(c: Condition, s: &SimState, m: &Maze) -> bool {
    let v = match c.probe {
        Probe::PathAhead => s.path_ahead(m),
        Probe::MonsterAhead => s.monster_ahead(m).is_some(),
        Probe::GemsRemaining => !s.all_gems_collected(m),
        Probe::AtGoal => s.position == m.goal(),
    };
    v != c.negated
}

/// Applies one action under the game rules.
pub fn step(s: &SimState, a: Action, m: &Maze) -> Result<SimState, RunFailure> {
    advance(s, a, m, true)
}

/// Like [`step`]; with `enforce_health == false` attacks never kill, which
/// lets the solver separate missing paths from health budgets.
pub(crate) fn advance(
    s: &SimState,
    a: Action,
    m: &Maze,
    enforce_health: bool,
) -> Result<SimState, RunFailure> {
    let mut next = *s;
    next.steps_taken += 1;
    match a {
        Action::MoveForward => {
            if !s.path_ahead(m) {
                return Err(RunFailure::InvalidMove);
            }
            next.position = s.front();
            next.collect(m);
        }
        Action::TurnLeft => next.orientation = s.orientation.left(),
        Action::TurnRight => next.orientation = s.orientation.right(),
        Action::TurnBack => next.orientation = s.orientation.back(),
        Action::Attack => {
            let i = s.monster_ahead(m).ok_or(RunFailure::InvalidAttack)?;
            next.health -= m.monster_damage(i);
            if enforce_health && next.health <= 0 {
                return Err(RunFailure::Death);
            }
            next.monsters_defeated |= 1 << i;
        }
    }
    Ok(next)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureReason {
    InvalidMove,
    InvalidAttack,
    Death,
    FuelExhausted,
    Incomplete,
}

impl From<RunFailure> for FailureReason {
    fn from(f: RunFailure) -> Self {
        match f {
            RunFailure::InvalidMove => FailureReason::InvalidMove,
            RunFailure::InvalidAttack => FailureReason::InvalidAttack,
            RunFailure::Death => FailureReason::Death,
        }
    }
}

impl FailureReason {
    pub fn name(self) -> &'static str {
        match self {
            FailureReason::InvalidMove => "InvalidMove",
            FailureReason::InvalidAttack => "InvalidAttack",
            FailureReason::Death => "Death",
            FailureReason::FuelExhausted => "FuelExhausted",
            FailureReason::Incomplete => "Incomplete",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Success,
    Failure(FailureReason),
}

impl Outcome {
    pub fn is_success(self) -> bool {
        self == Outcome::Success
    }
}

/// Record of one run. `states[i]` is the state before `primitive_actions[i]`.
/// A rejected action is not recorded; it is kept in `failed_action`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Trace {
    pub primitive_actions: Vec<Action>,
    pub states: Vec<SimState>,
    pub outcome: Outcome,
    pub fuel_used: usize,
    pub failed_action: Option<Action>,
}

impl Trace {
    pub fn final_state(&self) -> &SimState {
        self.states.last().expect("trace holds the initial state")
    }
}

/// One execution of a control statement, covering actions `start..end`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Span {
    pub path: StmtPath,
    /// Branch taken by an `if`; `None` for loops or an `if` whose condition
    /// failed with no `else`.
    pub arm: Option<Arm>,
    /// Loop iterations run; zero for an `if`.
    pub iterations: usize,
    pub start: usize,
    pub end: usize,
}

/// A trace plus, for every action, the statement that emitted it and the
/// spans of every control statement executed.
#[derive(Debug, Clone)]
pub struct Instrumented {
    pub trace: Trace,
    pub origins: Vec<StmtPath>,
    pub spans: Vec<Span>,
}

enum Halt {
    Success,
    Failure(FailureReason),
}

struct Machine<'a> {
    maze: &'a Maze,
    fuel: usize,
    state: SimState,
    actions: Vec<Action>,
    states: Vec<SimState>,
    failed_action: Option<Action>,
    record: bool,
    stack: Vec<(usize, Arm)>,
    origins: Vec<StmtPath>,
    spans: Vec<Span>,
}

impl Machine<'_> {
    fn here(&self, index: usize) -> StmtPath {
        StmtPath {
            parents: self.stack.clone(),
            index,
        }
    }

    fn act(&mut self, a: Action, index: usize) -> Result<(), Halt> {
        if self.actions.len() >= self.fuel {
            return Err(Halt::Failure(FailureReason::FuelExhausted));
        }
        match step(&self.state, a, self.maze) {
            Ok(next) => {
                self.state = next;
                self.actions.push(a);
                self.states.push(next);
                if self.record {
                    let here = self.here(index);
                    self.origins.push(here);
                }
                if next.is_success(self.maze) {
                    Err(Halt::Success)
                } else {
                    Ok(())
                }
            }
            Err(f) => {
                self.failed_action = Some(a);
                Err(Halt::Failure(f.into()))
            }
        }
    }

    fn run_arm(&mut self, index: usize, arm: Arm, block: &[Stmt]) -> Result<(), Halt> {
        self.stack.push((index, arm));
        let r = self.run_block(block);
        self.stack.pop();
        r
    }

    fn run_block(&mut self, block: &[Stmt]) -> Result<(), Halt> {
        for (i, s) in block.iter().enumerate() {
            self.run_stmt(i, s)?;
        }
        Ok(())
    }

    fn run_stmt(&mut self, index: usize, s: &Stmt) -> Result<(), Halt> {
        let start = self.actions.len();
        let mut iterations = 0;
        let (result, arm) = match s {
            Stmt::Action(a) => return self.act(*a, index),
            Stmt::Repeat { count, body } => {
                let mut r = Ok(());
                for _ in 0..*count {
                    let before = self.actions.len();
                    iterations += 1;
                    r = self.run_arm(index, Arm::Body, body);
                    // an iteration without actions leaves the state untouched,
                    // so every later iteration is empty too
                    if r.is_err() || self.actions.len() == before {
                        break;
                    }
                }
                (r, None)
            }
            Stmt::While { cond, body } => {
                let mut r = Ok(());
                while eval_condition(*cond, &self.state, self.maze) {
                    let before = self.actions.len();
                    iterations += 1;
                    r = self.run_arm(index, Arm::Body, body);
                    if r.is_err() {
                        break;
                    }
                    if self.actions.len() == before {
                        // same state, same condition: this never ends
                        r = Err(Halt::Failure(FailureReason::FuelExhausted));
                        break;
                    }
                }
                (r, None)
            }
            Stmt::If {
                cond,
                then,
                otherwise,
            } => {
                if eval_condition(*cond, &self.state, self.maze) {
                    (self.run_arm(index, Arm::Body, then), Some(Arm::Body))
                } else if let Some(e) = otherwise {
                    (self.run_arm(index, Arm::Else, e), Some(Arm::Else))
                } else {
                    (Ok(()), None)
                }
            }
        };
        if self.record {
            let here = self.here(index);
            self.spans.push(Span {
                path: here,
                arm,
                iterations,
                start,
                end: self.actions.len(),
            });
        }
        result
    }
}

fn run(p: &Program, m: &Maze, fuel: usize, record: bool) -> Instrumented {
    let init = SimState::initial(m);
    let mut machine = Machine {
        maze: m,
        fuel,
        state: init,
        actions: Vec::new(),
        states: vec![init],
        failed_action: None,
        record,
        stack: Vec::new(),
        origins: Vec::new(),
        spans: Vec::new(),
    };
    let outcome = match machine.run_block(&p.body) {
        Err(Halt::Success) => Outcome::Success,
        Err(Halt::Failure(reason)) => Outcome::Failure(reason),
        Ok(()) => Outcome::Failure(FailureReason::Incomplete),
    };
    let fuel_used = machine.actions.len();
    Instrumented {
        trace: Trace {
            primitive_actions: machine.actions,
            states: machine.states,
            outcome,
            fuel_used,
            failed_action: machine.failed_action,
        },
        origins: machine.origins,
        spans: machine.spans,
    }
}

/// Runs `p` on `m`, halting at success, at the first failed action, or when
/// `fuel` primitive actions have been spent.
pub fn execute(p: &Program, m: &Maze, fuel: usize) -> Trace {
    run(p, m, fuel, false).trace
}

pub fn execute_instrumented(p: &Program, m: &Maze, fuel: usize) -> Instrumented {
    run(p, m, fuel, true)
}

/// Runs a flat action list.
pub fn execute_actions(actions: &[Action], m: &Maze) -> Trace {
    execute(&Program::from_actions(actions), m, actions.len().max(1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maze::MonsterKind;
    use crate::program::parse_program;

    fn maze(pic: &str) -> Maze {
        Maze::from_picture(pic, Dir::East).unwrap()
    }

    #[test]
    fn monster_ahead_at_start() {
        let m = maze("S b . G");
        let s = SimState::initial(&m);
        assert!(eval_condition(Condition::is(Probe::MonsterAhead), &s, &m));
        assert!(!eval_condition(Condition::is(Probe::PathAhead), &s, &m));
        assert!(eval_condition(Condition::not(Probe::PathAhead), &s, &m));
    }

    #[test]
    fn boundary_is_not_a_path() {
        let m = Maze::from_picture("S.G", Dir::West).unwrap();
        let s = SimState::initial(&m);
        assert!(!eval_condition(Condition::is(Probe::PathAhead), &s, &m));
    }

    #[test]
    fn no_gems_means_none_remaining() {
        let m = maze("S.G");
        let s = SimState::initial(&m);
        assert!(!eval_condition(Condition::is(Probe::GemsRemaining), &s, &m));
        assert!(!eval_condition(Condition::is(Probe::AtGoal), &s, &m));
    }

    #[test]
    fn dragon_costs_sixty() {
        let m = maze("S d G");
        let s = SimState::initial(&m);
        let after = step(&s, Action::Attack, &m).unwrap();
        assert_eq!(after.health, 40);
        assert_eq!(after.monsters_defeated, 1);
        assert_eq!(after.position, s.position);

        let weak = SimState { health: 50, ..s };
        assert_eq!(step(&weak, Action::Attack, &m), Err(RunFailure::Death));
        let exact = SimState { health: 60, ..s };
        assert_eq!(step(&exact, Action::Attack, &m), Err(RunFailure::Death));
    }

    #[test]
    fn damage_table() {
        for (kind, expected) in [
            (MonsterKind::Bat, 80),
            (MonsterKind::Ghost, 60),
            (MonsterKind::SkeletonArcher, 80),
            (MonsterKind::Dragon, 40),
        ] {
            let m = Maze::builder(3, 1)
                .start(Pos::new(0, 0), Dir::East)
                .goal(Pos::new(2, 0))
                .monster(Pos::new(1, 0), kind)
                .build()
                .unwrap();
            let s = step(&SimState::initial(&m), Action::Attack, &m).unwrap();
            assert_eq!(s.health, expected, "{kind}");
        }
    }

    #[test]
    fn turns_and_invalid_actions() {
        let m = maze("S.G");
        let s = SimState::initial(&m);
        let back = step(&s, Action::TurnBack, &m).unwrap();
        assert_eq!(back.orientation, Dir::West);
        assert_eq!(back.position, s.position);
        assert_eq!(step(&back, Action::MoveForward, &m), Err(RunFailure::InvalidMove));
        assert_eq!(step(&s, Action::Attack, &m), Err(RunFailure::InvalidAttack));
        let m = maze("S b G");
        assert_eq!(
            step(&SimState::initial(&m), Action::MoveForward, &m),
            Err(RunFailure::InvalidMove)
        );
    }

    #[test]
    fn hearts_heal_once_and_gems_collect() {
        let m = maze("S + * G");
        let t = execute(&parse_program("move; move; move").unwrap(), &m, DEFAULT_FUEL);
        assert_eq!(t.outcome, Outcome::Success);
        assert_eq!(t.states[1].health, 120);
        assert_eq!(t.states[2].gems_collected, 1);
        assert_eq!(t.final_state().accounted_health(&m), 120);
    }

    #[test]
    fn straight_corridor() {
        let m = maze("S . G");
        let t = execute(&parse_program("move; move").unwrap(), &m, DEFAULT_FUEL);
        assert_eq!(t.outcome, Outcome::Success);
        assert_eq!(t.primitive_actions, vec![Action::MoveForward; 2]);
        assert_eq!(t.states.len(), 3);
    }

    #[test]
    fn while_halts_on_goal_entry() {
        let m = maze("S . G");
        let t = execute(&parse_program("while path_ahead { move }").unwrap(), &m, DEFAULT_FUEL);
        assert_eq!(t.outcome, Outcome::Success);
        assert_eq!(t.fuel_used, 2);
    }

    #[test]
    fn spinning_exhausts_fuel() {
        let m = maze("S . G");
        let t = execute(&parse_program("while not at_goal { turn_left }").unwrap(), &m, 50);
        assert_eq!(t.outcome, Outcome::Failure(FailureReason::FuelExhausted));
        assert_eq!(t.fuel_used, 50);
        let idle = execute(
            &parse_program("while not at_goal { if monster_ahead { attack } }").unwrap(),
            &m,
            DEFAULT_FUEL,
        );
        assert_eq!(idle.outcome, Outcome::Failure(FailureReason::FuelExhausted));
        let big = execute(
            &parse_program("repeat 4000000000 { if monster_ahead { attack } }\nmove\nmove").unwrap(),
            &m,
            DEFAULT_FUEL,
        );
        assert_eq!(big.outcome, Outcome::Success);
    }

    #[test]
    fn goal_without_gems_is_pass_through() {
        let m = maze("S G *");
        let t = execute(
            &parse_program("move; move; turn_back; move").unwrap(),
            &m,
            DEFAULT_FUEL,
        );
        assert_eq!(t.outcome, Outcome::Success);
        assert_eq!(t.fuel_used, 4);
        let short = execute(&parse_program("move").unwrap(), &m, DEFAULT_FUEL);
        assert_eq!(short.outcome, Outcome::Failure(FailureReason::Incomplete));
    }

    #[test]
    fn failure_records_rejected_action() {
        let m = maze("S # G");
        let t = execute(&parse_program("move").unwrap(), &m, DEFAULT_FUEL);
        assert_eq!(t.outcome, Outcome::Failure(FailureReason::InvalidMove));
        assert_eq!(t.failed_action, Some(Action::MoveForward));
        assert!(t.primitive_actions.is_empty());
    }

    #[test]
    fn spans_cover_emitted_actions() {
        let m = maze("S . . . G");
        let p = parse_program("repeat 2 { move }\nif path_ahead { move } else { attack }\nmove").unwrap();
        let run = execute_instrumented(&p, &m, DEFAULT_FUEL);
        assert_eq!(run.trace.outcome, Outcome::Success);
        assert_eq!(run.origins.len(), 4);
        assert_eq!(run.origins[2], StmtPath::top(1).child(Arm::Body, 0));
        assert_eq!(
            run.spans,
            vec![
                Span { path: StmtPath::top(0), arm: None, iterations: 2, start: 0, end: 2 },
                Span { path: StmtPath::top(1), arm: Some(Arm::Body), iterations: 0, start: 2, end: 3 },
            ]
        );
    }
}
