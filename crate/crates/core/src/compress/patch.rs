//! Restoring trace equivalence after a rewrite went wrong.

use thiserror::Error;

use crate::interp::{execute, execute_instrumented, Span, Trace};
use crate::maze::Maze;
use crate::program::{Action, Arm, Program, Stmt, StmtPath};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("no patch restores the reference trace (first deviation at step {deviation})")]
pub struct PatchFailure {
    pub deviation: usize,
}

/// Index of the first primitive action where `trace` leaves `reference`.
/// A trace that stops early, runs long or ends without success deviates
/// at the point where the two lengths part.
pub fn first_deviation(trace: &Trace, reference: &[Action]) -> Option<usize> {
    let actions = &trace.primitive_actions;
    if let Some(i) = actions.iter().zip(reference).position(|(a, b)| a != b) {
        return Some(i);
    }
    if actions.len() != reference.len() || !trace.outcome.is_success() {
        return Some(actions.len().min(reference.len()));
    }
    None
}

/// Fuel enough to notice a program running past the reference.
pub(crate) fn fuel_for(reference: &[Action]) -> usize {
    reference.len() + 1
}

/// Strict trace equality: same primitive actions, ending in success.
pub fn trace_equivalent(p: &Program, m: &Maze, reference: &[Action]) -> bool {
    first_deviation(&execute(p, m, fuel_for(reference)), reference).is_none()
}

/// Actions written out, with runs of three or more as `repeat`.
pub fn literal_block(actions: &[Action]) -> Vec<Stmt> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < actions.len() {
        let a = actions[i];
        let run = actions[i..].iter().take_while(|&&b| b == a).count();
        if run >= 3 {
            out.push(Stmt::repeat(run as u32, vec![Stmt::Action(a)]));
        } else {
            out.extend(std::iter::repeat_n(Stmt::Action(a), run));
        }
        i += run;
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Target {
    Node(StmtPath),
    Branch(StmtPath, Arm),
}

fn apply(p: &Program, target: &Target, literal: Vec<Stmt>) -> Option<Program> {
    let mut q = p.clone();
    match target {
        Target::Node(path) => {
            if !q.splice(path, literal) {
                return None;
            }
            if q.block(&path.parents).is_none_or(|b| b.is_empty()) {
                return None;
            }
        }
        Target::Branch(path, arm) => {
            if literal.is_empty() {
                return None;
            }
            let mut parents = path.parents.clone();
            parents.push((path.index, *arm));
            *q.block_mut(&parents)? = literal;
        }
    }
    Some(q)
}

fn targets(spans: &[Span], d: usize) -> Vec<(Target, usize, usize)> {
    let mut enclosing: Vec<&Span> = spans.iter().filter(|s| s.start <= d && d <= s.end).collect();
    // innermost first; spans that strictly contain the deviation before
    // those that merely end at it
    enclosing.sort_by_key(|s| (s.end == d, std::cmp::Reverse(s.path.depth()), s.end - s.start));
    let mut out: Vec<(Target, usize, usize)> = Vec::new();
    for s in enclosing {
        let mut push = |t: Target| {
            if !out.iter().any(|(u, _, _)| *u == t) {
                out.push((t, s.start, s.end));
            }
        };
        if let Some(arm) = s.arm {
            push(Target::Branch(s.path.clone(), arm));
        }
        push(Target::Node(s.path.clone()));
    }
    out
}

/// Finds the first step where `p` leaves `reference`, then replaces the
/// innermost control statement (or taken branch) around that step with
/// the literal actions it should have produced. Repeats until the traces
/// agree, falling back to writing the whole reference out.
pub fn patch(p: &Program, m: &Maze, reference: &[Action]) -> Result<Program, PatchFailure> {
    let fuel = fuel_for(reference);
    let mut current = p.clone();
    loop {
        let run = execute_instrumented(&current, m, fuel);
        let Some(d) = first_deviation(&run.trace, reference) else {
            return Ok(current);
        };
        match improve(&current, m, reference, &run.spans, d) {
            Some(next) => current = next,
            None => {
                let flat = Program::new(literal_block(reference));
                if !flat.body.is_empty() && trace_equivalent(&flat, m, reference) {
                    return Ok(flat);
                }
                return Err(PatchFailure { deviation: d });
            }
        }
    }
}

/// One patch step; returns a program deviating strictly later than `d`.
fn improve(p: &Program, m: &Maze, reference: &[Action], spans: &[Span], d: usize) -> Option<Program> {
    let fuel = fuel_for(reference);
    for (target, start, end) in targets(spans, d) {
        let mut ends: Vec<usize> = (start..=reference.len()).collect();
        ends.sort_by_key(|&e| e.abs_diff(end));
        let mut best: Option<(usize, Program)> = None;
        for e in ends {
            let Some(q) = apply(p, &target, literal_block(&reference[start..e])) else {
                continue;
            };
            match first_deviation(&execute(&q, m, fuel), reference) {
                None => return Some(q),
                Some(dq) if dq > d && best.as_ref().is_none_or(|(bd, _)| dq > *bd) => {
                    best = Some((dq, q));
                }
                _ => {}
            }
        }
        if let Some((_, q)) = best {
            return Some(q);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maze::Dir;
    use crate::program::{parse_program, print_program};
    use Action::*;

    #[test]
    fn overshooting_while_becomes_counted() {
        let m = Maze::from_picture("S . . . .\n# # # . #\n# # # G #", Dir::East).unwrap();
        let reference = [MoveForward, MoveForward, MoveForward, TurnRight, MoveForward, MoveForward];
        let p = parse_program("while path_ahead { move }\nturn_right\nmove\nmove").unwrap();
        assert!(!trace_equivalent(&p, &m, &reference));
        let fixed = patch(&p, &m, &reference).unwrap();
        assert_eq!(print_program(&fixed), "repeat 3 {\n    move\n}\nturn_right\nmove\nmove");
        assert!(trace_equivalent(&fixed, &m, &reference));
    }

    #[test]
    fn equivalent_program_is_untouched() {
        let m = Maze::from_picture("S . G", Dir::East).unwrap();
        let p = parse_program("while path_ahead { move }").unwrap();
        assert_eq!(patch(&p, &m, &[MoveForward, MoveForward]).unwrap(), p);
    }

    #[test]
    fn wrong_branch_body_is_literalised() {
        let m = Maze::from_picture("S b . G", Dir::East).unwrap();
        let reference = [Attack, MoveForward, MoveForward, MoveForward];
        let p = parse_program("if monster_ahead { move } else { attack }\nrepeat 3 { move }").unwrap();
        let fixed = patch(&p, &m, &reference).unwrap();
        assert_eq!(
            print_program(&fixed),
            "if monster_ahead {\n    attack\n} else {\n    attack\n}\nrepeat 3 {\n    move\n}"
        );
    }

    #[test]
    fn literal_fallback() {
        let m = Maze::from_picture("S . G", Dir::East).unwrap();
        let p = parse_program("turn_left").unwrap();
        let fixed = patch(&p, &m, &[MoveForward, MoveForward]).unwrap();
        assert_eq!(print_program(&fixed), "move\nmove");
    }

    #[test]
    fn unreachable_reference_fails() {
        let m = Maze::from_picture("S # G", Dir::East).unwrap();
        let p = parse_program("move").unwrap();
        assert!(patch(&p, &m, &[MoveForward, MoveForward]).is_err());
    }

    #[test]
    fn deviation_index() {
        let m = Maze::from_picture("S . G", Dir::East).unwrap();
        let t = execute(&parse_program("move; turn_left").unwrap(), &m, 10);
        assert_eq!(first_deviation(&t, &[MoveForward, MoveForward]), Some(1));
        let short = execute(&parse_program("move").unwrap(), &m, 10);
        assert_eq!(first_deviation(&short, &[MoveForward, MoveForward]), Some(1));
    }
}
