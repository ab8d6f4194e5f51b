//! Hint texts and the ten-sentence cap.
//!
//! A sentence ends at `.`, `!` or `?` followed by whitespace or the end of
//! the text. Fenced code blocks count as no sentences and are never split.

use super::patterns::Finding;
use super::session::{HintContent, HintPayload};
use crate::program::{parse_program, Action};

pub const MAX_SENTENCES: usize = 10;

fn is_fence(line: &str) -> bool {
    line.trim_start().starts_with("```")
}

/// Byte offsets just past the end of each sentence.
fn sentence_ends(text: &str) -> Vec<usize> {
    let mut ends = Vec::new();
    let mut pending: Option<usize> = None;
    let mut in_fence = false;
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        let line_start = offset;
        offset += line.len();
        if is_fence(line) {
            if !in_fence {
                if let Some(end) = pending.take() {
                    ends.push(end);
                }
            }
            in_fence = !in_fence;
            continue;
        }
        if in_fence {
            continue;
        }
        let bytes = line.as_bytes();
        for (i, &b) in bytes.iter().enumerate() {
            let at = line_start + i;
            if matches!(b, b'.' | b'!' | b'?') {
                let next = bytes.get(i + 1).copied();
                let closes = next.is_none_or(|n| n.is_ascii_whitespace());
                if closes && pending.is_some() {
                    ends.push(at + 1);
                    pending = None;
                } else if !closes {
                    pending = Some(at + 1);
                }
            } else if !b.is_ascii_whitespace() {
                pending = Some(at + 1);
            }
        }
    }
    if let Some(end) = pending {
        ends.push(end);
    }
    ends
}

pub fn count_sentences(text: &str) -> usize {
    sentence_ends(text).len()
}

/// Keeps the first `max` sentences and any fenced blocks before the cut.
pub fn truncate_sentences(text: &str, max: usize) -> String {
    let ends = sentence_ends(text);
    if ends.len() <= max {
        return text.to_string();
    }
    if max == 0 {
        return String::new();
    }
    let cut = ends[max - 1];
    let kept = &text[..cut];
    // close a fence the cut could have left open
    let open = kept.lines().filter(|l| is_fence(l)).count() % 2 == 1;
    let mut out = kept.trim_end().to_string();
    if open {
        out.push_str("\n```");
    }
    out
}

fn step_list(actions: &[Action]) -> String {
    actions
        .iter()
        .enumerate()
        .map(|(i, a)| format!("{}) {}", i + 1, a.label()))
        .collect::<Vec<_>>()
        .join(", ")
}

fn steps(start: usize, len: usize) -> String {
    if len == 1 {
        format!("step {}", start + 1)
    } else {
        format!("steps {}-{}", start + 1, start + len)
    }
}

fn join_numbers(ns: &[usize]) -> String {
    match ns {
        [] => String::new(),
        [one] => one.to_string(),
        [init @ .., last] => format!(
            "{} and {last}",
            init.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(", ")
        ),
    }
}

const MAX_LISTED_FINDINGS: usize = 6;

fn render_findings(findings: &[Finding]) -> Vec<String> {
    let mut out = vec!["Now look for patterns in your step-by-step route.".to_string()];
    let structural: Vec<&Finding> = findings
        .iter()
        .filter(|f| !matches!(f, Finding::Attack { .. }))
        .collect();
    for f in structural.iter().take(MAX_LISTED_FINDINGS) {
        match f {
            Finding::Run { action, start, length } => {
                let tail = match action {
                    Action::MoveForward => {
                        "a repeat loop can replace it, or a while path_ahead loop if the path ends right there"
                    }
                    a if a.is_turn() => "and turns in a row can often be folded into a single turn",
                    _ => "a repeat loop can replace it",
                };
                out.push(format!(
                    "In {} you have a {} ×{length} run, {tail}.",
                    steps(*start, *length),
                    action.label()
                ));
            }
            Finding::RepeatedSequence { start, pattern, count } => {
                let labels: Vec<&str> = pattern.iter().map(|a| a.label()).collect();
                out.push(format!(
                    "In {} the pattern {} appears ×{count} in a row, so one repeat loop around it can replace them.",
                    steps(*start, pattern.len() * count),
                    labels.join(", ")
                ));
            }
            Finding::Attack { .. } => {}
        }
    }
    if structural.len() > MAX_LISTED_FINDINGS {
        out.push(format!(
            "There are {} more patterns of the same kind further along.",
            structural.len() - MAX_LISTED_FINDINGS
        ));
    }
    let attacks: Vec<usize> = findings
        .iter()
        .filter_map(|f| match f {
            Finding::Attack { index } => Some(index + 1),
            _ => None,
        })
        .collect();
    match attacks.len() {
        0 => {}
        1 => out.push(format!(
            "The Attack at step {} can be guarded by if monster_ahead, so it only runs when a monster blocks the way.",
            attacks[0]
        )),
        _ => out.push(format!(
            "The Attacks at steps {} can each be guarded by if monster_ahead, so they only run when a monster blocks the way.",
            join_numbers(&attacks)
        )),
    }
    if out.len() == 1 {
        out.push("This route has no repeated steps, so each block already does useful work.".into());
    }
    out.push("Which of these patterns would you turn into a loop or a condition first?".into());
    out
}

/// Deterministic template text for a payload, at most [`MAX_SENTENCES`].
pub fn render_hint_text(payload: &HintPayload) -> String {
    let text = match &payload.content {
        HintContent::Actions(actions) => [
            "Let's break the journey into small steps.".to_string(),
            format!(
                "One shortest route takes {} actions: {}.",
                actions.len(),
                step_list(actions)
            ),
            "Each action is one block in a step-by-step program.".to_string(),
            "Which parts of this route belong together, such as the steps that reach each gem or the goal?"
                .to_string(),
        ]
        .join(" "),
        HintContent::Findings(findings) => render_findings(findings).join(" "),
        HintContent::Program(program) => {
            let blocks = parse_program(program).map(|p| p.block_count()).unwrap_or(0);
            format!(
                "Here is a high-efficiency program that solves the maze with {blocks} blocks.\n\n```\n{program}\n```\n\nRun it and compare where each loop starts and stops with your own solution."
            )
        }
    };
    truncate_sentences(&text, MAX_SENTENCES)
}
