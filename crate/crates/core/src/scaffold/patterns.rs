//! Repetition and conditional structure inside a step-by-step route.

use serde::{Deserialize, Serialize};

use crate::program::Action;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Finding {
    /// A maximal run of one action, at least two long.
    Run { action: Action, start: usize, length: usize },
    /// A window of two or more mixed actions repeated back to back.
    RepeatedSequence { start: usize, pattern: Vec<Action>, count: usize },
    /// An attack, which a `monster_ahead` guard can protect.
    Attack { index: usize },
}

impl Finding {
    pub fn start(&self) -> usize {
        match self {
            Finding::Run { start, .. } | Finding::RepeatedSequence { start, .. } => *start,
            Finding::Attack { index } => *index,
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Finding::Run { .. } => 0,
            Finding::RepeatedSequence { .. } => 1,
            Finding::Attack { .. } => 2,
        }
    }
}

/// Findings sorted by start index, runs before sequences before attacks at
/// equal starts.
pub fn pattern_report(actions: &[Action]) -> Vec<Finding> {
    let mut out = Vec::new();

    let mut i = 0;
    while i < actions.len() {
        let len = actions[i..].iter().take_while(|&&a| a == actions[i]).count();
        if len >= 2 {
            out.push(Finding::Run {
                action: actions[i],
                start: i,
                length: len,
            });
        }
        i += len;
    }

    // greedy left to right; at each start take the window covering the most
    // steps, shortest window on ties
    let mut i = 0;
    while i < actions.len() {
        let mut best: Option<(usize, usize)> = None;
        for w in 2..=(actions.len() - i) / 2 {
            let pattern = &actions[i..i + w];
            if pattern.iter().all(|&a| a == pattern[0]) {
                continue;
            }
            let count = 1 + actions[i + w..]
                .chunks_exact(w)
                .take_while(|c| *c == pattern)
                .count();
            if count >= 2 && best.is_none_or(|(bw, bc)| w * count > bw * bc) {
                best = Some((w, count));
            }
        }
        match best {
            Some((w, count)) => {
                out.push(Finding::RepeatedSequence {
                    start: i,
                    pattern: actions[i..i + w].to_vec(),
                    count,
                });
                i += w * count;
            }
            None => i += 1,
        }
    }

    out.extend(
        actions
            .iter()
            .enumerate()
            .filter(|(_, &a)| a == Action::Attack)
            .map(|(index, _)| Finding::Attack { index }),
    );
    out.sort_by_key(|f| (f.start(), f.rank()));
    out
}
