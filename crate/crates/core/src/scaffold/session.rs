//! The three-stage hint session.

use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::patterns::{pattern_report, Finding};
use super::text::render_hint_text;
use crate::compress::{solve_high_with, CompressError, PipelineError, VnsConfig};
use crate::maze::Maze;
use crate::program::{print_program, Action};
use crate::solver::{solve_low_within, Limits, Solution, SolveError, UnsolvableReason};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HintKind {
    LowEfficiencySteps,
    TransformationHints,
    HighEfficiencyProgram,
}

impl HintKind {
    /// Kinds in the order a session issues them.
    pub const ORDER: [HintKind; 3] = [
        HintKind::LowEfficiencySteps,
        HintKind::TransformationHints,
        HintKind::HighEfficiencyProgram,
    ];

    pub fn for_stage(stage: u8) -> Option<HintKind> {
        HintKind::ORDER.get(usize::from(stage).checked_sub(1)?).copied()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HintContent {
    Actions(Vec<Action>),
    Findings(Vec<Finding>),
    /// Canonical program text.
    Program(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HintPayload {
    pub stage: u8,
    pub kind: HintKind,
    pub content: HintContent,
    pub rendered_text: String,
}

impl HintPayload {
    fn new(stage: u8, content: HintContent) -> Self {
        let mut p = HintPayload {
            stage,
            kind: HintKind::for_stage(stage).expect("stage in 1..=3"),
            content,
            rendered_text: String::new(),
        };
        p.rendered_text = render_hint_text(&p);
        p
    }

    /// The program text of a stage-3 payload.
    pub fn program_text(&self) -> Option<&str> {
        match &self.content {
            HintContent::Program(p) => Some(p),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HintSession {
    pub id: String,
    /// Content hash of the maze the session is bound to.
    pub maze_hash: String,
    /// Hints issued so far, at most 3.
    pub stage: u8,
    pub payloads: Vec<HintPayload>,
    pub created_ms: u64,
    pub updated_ms: u64,
}

pub const MAX_STAGE: u8 = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HintError {
    #[error("the maze changed since the session started (expected {expected}, found {found})")]
    StaleSession { expected: String, found: String },
    #[error("maze is unsolvable: {0}")]
    Unsolvable(UnsolvableReason),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Compress(#[from] CompressError),
}

impl From<PipelineError> for HintError {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Unsolvable(r) => HintError::Unsolvable(r),
            PipelineError::Solve(e) => HintError::Solve(e),
            PipelineError::Compress(e) => HintError::Compress(e),
        }
    }
}

fn now_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

pub fn new_session(m: &Maze) -> HintSession {
    let now = now_ms();
    HintSession {
        id: uuid::Uuid::new_v4().to_string(),
        maze_hash: m.content_hash(),
        stage: 0,
        payloads: Vec::new(),
        created_ms: now,
        updated_ms: now,
    }
}

pub fn request_hint(s: &HintSession, m: &Maze) -> Result<(HintSession, HintPayload), HintError> {
    request_hint_with(s, m, &VnsConfig::default(), &Limits::none())
}

/// Issues the next hint. Stage 3 is re-issued unchanged once reached. The
/// input session is left untouched on error.
pub fn request_hint_with(
    s: &HintSession,
    m: &Maze,
    cfg: &VnsConfig,
    limits: &Limits,
) -> Result<(HintSession, HintPayload), HintError> {
    let found = m.content_hash();
    if found != s.maze_hash {
        return Err(HintError::StaleSession {
            expected: s.maze_hash.clone(),
            found,
        });
    }
    if s.stage >= MAX_STAGE {
        if let Some(last) = s.payloads.last() {
            return Ok((s.clone(), last.clone()));
        }
    }
    let stage = s.stage + 1;
    let content = match stage {
        1 => HintContent::Actions(low_actions(m, limits)?),
        2 => {
            let actions = match s.payloads.first().map(|p| &p.content) {
                Some(HintContent::Actions(a)) => a.clone(),
                _ => low_actions(m, limits)?,
            };
            HintContent::Findings(pattern_report(&actions))
        }
        _ => HintContent::Program(print_program(&solve_high_with(m, cfg, limits)?.program)),
    };
    let payload = HintPayload::new(stage, content);
    let mut next = s.clone();
    next.stage = stage;
    next.payloads.push(payload.clone());
    next.updated_ms = now_ms().max(s.updated_ms);
    Ok((next, payload))
}

fn low_actions(m: &Maze, limits: &Limits) -> Result<Vec<Action>, HintError> {
    match solve_low_within(m, limits)?.solution {
        Solution::Actions(a) => Ok(a),
        Solution::Unsolvable(r) => Err(HintError::Unsolvable(r)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compress::solve_high;
    use crate::interp::{execute, DEFAULT_FUEL};
    use crate::maze::Dir;
    use crate::program::parse_program;
    use crate::scaffold::text::count_sentences;
    use Action::*;

    fn bat() -> Maze {
        Maze::from_picture("S b . G", Dir::East).unwrap()
    }

    #[test]
    fn three_stages_then_repeat() {
        let m = bat();
        let s0 = new_session(&m);
        assert_eq!((s0.stage, s0.payloads.len()), (0, 0));

        let (s1, p1) = request_hint(&s0, &m).unwrap();
        assert_eq!(p1.kind, HintKind::LowEfficiencySteps);
        assert_eq!(p1.content, HintContent::Actions(vec![Attack, MoveForward, MoveForward, MoveForward]));
        assert!(p1.rendered_text.contains("4) Move Forward"));
        assert!(p1.rendered_text.trim_end().ends_with('?'));

        let (s2, p2) = request_hint(&s1, &m).unwrap();
        assert_eq!(p2.kind, HintKind::TransformationHints);
        assert!(p2.rendered_text.contains("Move Forward ×3 run"), "{}", p2.rendered_text);
        assert!(p2.rendered_text.contains("if monster_ahead"));
        assert!(p2.rendered_text.trim_end().ends_with('?'));

        let (s3, p3) = request_hint(&s2, &m).unwrap();
        assert_eq!(p3.kind, HintKind::HighEfficiencyProgram);
        let text = p3.program_text().unwrap();
        assert_eq!(text, print_program(&solve_high(&m).unwrap().program));
        let prog = parse_program(text).unwrap();
        assert!(execute(&prog, &m, DEFAULT_FUEL).outcome.is_success());
        assert!(p3.rendered_text.contains(&format!("```\n{text}\n```")));

        let (s4, p4) = request_hint(&s3, &m).unwrap();
        assert_eq!(s4.stage, 3);
        assert_eq!(s4.payloads.len(), 3);
        assert_eq!(p4, p3);
        for p in [&p1, &p2, &p3] {
            assert!(count_sentences(&p.rendered_text) <= 10);
        }
    }

    #[test]
    fn two_sessions_share_hash() {
        let m = bat();
        let (a, b) = (new_session(&m), new_session(&m));
        assert_ne!(a.id, b.id);
        assert_eq!(a.maze_hash, b.maze_hash);
    }

    #[test]
    fn edited_maze_is_stale() {
        let m = bat();
        let s = new_session(&m);
        let edited = Maze::from_picture("S . . G", Dir::East).unwrap();
        assert!(matches!(request_hint(&s, &edited), Err(HintError::StaleSession { .. })));
    }

    #[test]
    fn unsolvable_surfaces() {
        let m = Maze::from_picture("S # G", Dir::East).unwrap();
        let s = new_session(&m);
        assert_eq!(
            request_hint(&s, &m).unwrap_err(),
            HintError::Unsolvable(UnsolvableReason::NoPath)
        );
    }
}
