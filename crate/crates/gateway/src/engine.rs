//! Engine calls shared by the HTTP handlers and the CLI, so both produce
//! the same bodies.

use mazemate_core::compress::{solve_high_with, VnsConfig};
use mazemate_core::interp::{execute, FailureReason, SimState, DEFAULT_FUEL};
use mazemate_core::scaffold::{check_design_within, DesignReport, DesignRequirements};
use mazemate_core::solver::{solve_low_within, Limits, Solution};
use mazemate_core::{parse_program, print_program, Action, Maze, Outcome, Program};
use serde::{Deserialize, Serialize};

use crate::error::ApiError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SolveMode {
    Low,
    High,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageTexts {
    pub tree: String,
    pub compressed: String,
    pub refined: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum SolveView {
    Low {
        actions: Vec<Action>,
        /// One action keyword per line.
        text: String,
    },
    High {
        /// Canonical program text.
        program: String,
        block_count: usize,
        exec_steps: usize,
        trace_equivalent: bool,
        actions: Vec<Action>,
        stages: StageTexts,
    },
}

impl SolveView {
    pub fn text(&self) -> &str {
        match self {
            SolveView::Low { text, .. } => text,
            SolveView::High { program, .. } => program,
        }
    }
}

pub fn solve(m: &Maze, mode: SolveMode, cfg: &VnsConfig, limits: &Limits) -> Result<SolveView, ApiError> {
    match mode {
        SolveMode::Low => match solve_low_within(m, limits)?.solution {
            Solution::Actions(actions) => Ok(SolveView::Low {
                text: print_program(&Program::from_actions(&actions)),
                actions,
            }),
            Solution::Unsolvable(r) => Err(ApiError::unsolvable(r)),
        },
        SolveMode::High => {
            let r = solve_high_with(m, cfg, limits)?;
            Ok(SolveView::High {
                program: print_program(&r.program),
                block_count: r.block_count,
                exec_steps: r.exec_steps,
                trace_equivalent: r.trace_equivalent,
                actions: r.actions,
                stages: StageTexts {
                    tree: print_program(&r.stages.tree),
                    compressed: print_program(&r.stages.compressed),
                    refined: print_program(&r.stages.refined),
                },
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExecuteView {
    /// "Success" or the failure reason.
    pub outcome: String,
    pub success: bool,
    pub actions: Vec<Action>,
    pub states: Vec<SimState>,
    pub fuel_used: usize,
    pub failed_action: Option<Action>,
    pub final_state: SimState,
}

pub fn outcome_name(o: Outcome) -> &'static str {
    match o {
        Outcome::Success => "Success",
        Outcome::Failure(r) => FailureReason::name(r),
    }
}

pub fn run_program(m: &Maze, program_text: &str) -> Result<ExecuteView, ApiError> {
    let p = parse_program(program_text)?;
    let t = execute(&p, m, DEFAULT_FUEL);
    Ok(ExecuteView {
        outcome: outcome_name(t.outcome).to_string(),
        success: t.outcome.is_success(),
        final_state: *t.final_state(),
        actions: t.primitive_actions,
        states: t.states,
        fuel_used: t.fuel_used,
        failed_action: t.failed_action,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidateView {
    pub valid: bool,
    pub content_hash: String,
    pub width: u32,
    pub height: u32,
    pub gems: usize,
    pub hearts: usize,
    pub monsters: usize,
    pub obstacles: usize,
}

pub fn validate(m: &Maze) -> ValidateView {
    ValidateView {
        valid: true,
        content_hash: m.content_hash(),
        width: m.width(),
        height: m.height(),
        gems: m.gems().len(),
        hearts: m.hearts().len(),
        monsters: m.monsters().len(),
        obstacles: m.obstacles().len(),
    }
}

pub fn design_check(m: &Maze, req: &DesignRequirements, limits: &Limits) -> Result<DesignReport, ApiError> {
    Ok(check_design_within(m, req, limits)?)
}
