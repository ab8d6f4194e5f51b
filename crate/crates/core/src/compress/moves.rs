//! Local program rewrites. Each move yields whole candidate programs; none of
//! them checks semantics, callers decide by executing the candidate.

use crate::interp::execute_instrumented;
use crate::maze::Maze;
use crate::program::{Action, Condition, Probe, Program, Stmt};

/// Longest statement list an unroll may produce.
const UNROLL_LIMIT: usize = 24;

/// Conditions tried when turning a counted loop into a conditional one.
const LOOP_CONDITIONS: [Condition; 3] = [
    Condition::is(Probe::PathAhead),
    Condition::not(Probe::AtGoal),
    Condition::is(Probe::GemsRemaining),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Move {
    /// `W W … W` → `repeat k { W }`.
    Roll,
    /// `repeat c { W }` swallowing neighbouring literal copies of `W`.
    Absorb,
    /// `repeat c { W }` → `W` written out `c` times.
    Unroll,
    /// `repeat c { W }` → `W; repeat c-1 { W }`.
    Peel,
    /// `repeat a { W }; repeat b { W }` → `repeat a+b { W }`.
    MergeRepeats,
    /// `while c { W }; while c { W }` → `while c { W }`.
    MergeWhiles,
    /// `repeat a { repeat b { W } }` → `repeat a*b { W }`.
    FlattenRepeat,
    /// `repeat k { move }` → `while path_ahead { move }`.
    CorridorWhile,
    /// `repeat k { W }` → `while c { W }` over a small condition set.
    RepeatToWhile,
    /// `while c { W }` → `repeat k { W }` with `k` taken from a run.
    WhileToRepeat,
    /// Lift a shared first or last statement out of both `if` branches.
    Hoist,
    /// Two adjacent turns → one turn, or nothing.
    FuseTurns,
    /// A straight stretch of moves with guarded attacks →
    /// `repeat k { if monster_ahead { attack }; move }`.
    GuardedCorridor,
    /// `if monster_ahead { attack }` → `attack`.
    StripGuard,
}

pub(crate) fn candidates(p: &Program, mv: Move, maze: &Maze) -> Vec<Program> {
    let mut out = Vec::new();
    if mv == Move::WhileToRepeat {
        while_to_repeat(p, maze, &mut out);
        return out;
    }
    for parents in p.blocks() {
        let block = p.block(&parents).expect("block address valid");
        for variant in block_variants(block, mv) {
            if variant.is_empty() {
                continue;
            }
            let mut q = p.clone();
            *q.block_mut(&parents).expect("block address valid") = variant;
            if q.validate().is_ok() {
                out.push(q);
            }
        }
    }
    out
}

fn replace(block: &[Stmt], range: std::ops::Range<usize>, with: Vec<Stmt>) -> Vec<Stmt> {
    let mut v = block.to_vec();
    v.splice(range, with);
    v
}

fn guard() -> Stmt {
    Stmt::if_(Condition::is(Probe::MonsterAhead), vec![Stmt::Action(Action::Attack)])
}

fn is_guard(s: &Stmt) -> bool {
    *s == guard()
}

/// Moves contributed by `s` when it is a plain forward movement.
fn forward_moves(s: &Stmt) -> Option<u32> {
    match s {
        Stmt::Action(Action::MoveForward) => Some(1),
        Stmt::Repeat { count, body } if body[..] == [Stmt::Action(Action::MoveForward)] => {
            Some(*count)
        }
        _ => None,
    }
}

fn block_variants(block: &[Stmt], mv: Move) -> Vec<Vec<Stmt>> {
    let n = block.len();
    let mut out = Vec::new();
    match mv {
        Move::Roll => {
            for i in 0..n {
                for w in 1..=(n - i) / 2 {
                    let window = &block[i..i + w];
                    let mut k = 1;
                    while i + (k + 1) * w <= n && &block[i + k * w..i + (k + 1) * w] == window {
                        k += 1;
                    }
                    if k >= 2 {
                        out.push(replace(
                            block,
                            i..i + k * w,
                            vec![Stmt::repeat(k as u32, window.to_vec())],
                        ));
                    }
                }
            }
        }
        Move::Absorb => {
            for (i, s) in block.iter().enumerate() {
                let Stmt::Repeat { count, body } = s else { continue };
                let w = body.len();
                let mut after = 0;
                while i + 1 + (after + 1) * w <= n
                    && block[i + 1 + after * w..i + 1 + (after + 1) * w] == body[..]
                {
                    after += 1;
                }
                let mut before = 0;
                while (before + 1) * w <= i && block[i - (before + 1) * w..i - before * w] == body[..] {
                    before += 1;
                }
                if before + after > 0 {
                    let total = *count as usize + before + after;
                    if total <= u32::MAX as usize {
                        out.push(replace(
                            block,
                            i - before * w..i + 1 + after * w,
                            vec![Stmt::repeat(total as u32, body.clone())],
                        ));
                    }
                }
            }
        }
        Move::Unroll => {
            for (i, s) in block.iter().enumerate() {
                if let Stmt::Repeat { count, body } = s {
                    if (*count as usize).saturating_mul(body.len()) <= UNROLL_LIMIT {
                        let flat: Vec<Stmt> =
                            (0..*count).flat_map(|_| body.iter().cloned()).collect();
                        out.push(replace(block, i..i + 1, flat));
                    }
                }
            }
        }
        Move::Peel => {
            for (i, s) in block.iter().enumerate() {
                if let Stmt::Repeat { count, body } = s {
                    if *count >= 2 {
                        let mut with = body.clone();
                        if *count == 2 {
                            with.extend(body.iter().cloned());
                        } else {
                            with.push(Stmt::repeat(count - 1, body.clone()));
                        }
                        out.push(replace(block, i..i + 1, with));
                    }
                }
            }
        }
        Move::MergeRepeats => {
            for i in 0..n.saturating_sub(1) {
                if let (
                    Stmt::Repeat { count: a, body: x },
                    Stmt::Repeat { count: b, body: y },
                ) = (&block[i], &block[i + 1])
                {
                    if x == y {
                        if let Some(total) = a.checked_add(*b) {
                            out.push(replace(block, i..i + 2, vec![Stmt::repeat(total, x.clone())]));
                        }
                    }
                }
            }
        }
        Move::MergeWhiles => {
            for i in 0..n.saturating_sub(1) {
                if let (Stmt::While { .. }, Stmt::While { .. }) = (&block[i], &block[i + 1]) {
                    if block[i] == block[i + 1] {
                        out.push(replace(block, i..i + 2, vec![block[i].clone()]));
                    }
                }
            }
        }
        Move::FlattenRepeat => {
            for (i, s) in block.iter().enumerate() {
                if let Stmt::Repeat { count: a, body } = s {
                    if let [Stmt::Repeat { count: b, body: inner }] = &body[..] {
                        if let Some(total) = a.checked_mul(*b) {
                            out.push(replace(block, i..i + 1, vec![Stmt::repeat(total, inner.clone())]));
                        }
                    }
                }
            }
        }
        Move::CorridorWhile => {
            for (i, s) in block.iter().enumerate() {
                if let Stmt::Repeat { body, .. } = s {
                    if body[..] == [Stmt::Action(Action::MoveForward)] {
                        out.push(replace(
                            block,
                            i..i + 1,
                            vec![Stmt::while_(Condition::is(Probe::PathAhead), body.clone())],
                        ));
                    }
                }
            }
        }
        Move::RepeatToWhile => {
            for (i, s) in block.iter().enumerate() {
                if let Stmt::Repeat { body, .. } = s {
                    for cond in LOOP_CONDITIONS {
                        out.push(replace(block, i..i + 1, vec![Stmt::while_(cond, body.clone())]));
                    }
                }
            }
        }
        Move::WhileToRepeat => unreachable!("handled with execution spans"),
        Move::Hoist => {
            for (i, s) in block.iter().enumerate() {
                let Stmt::If {
                    cond,
                    then,
                    otherwise: Some(other),
                } = s
                else {
                    continue;
                };
                if then == other {
                    out.push(replace(block, i..i + 1, then.clone()));
                    continue;
                }
                if then.last() == other.last() {
                    let shared = then.last().cloned().expect("branches non-empty");
                    let mut with = rebuild_if(*cond, &then[..then.len() - 1], &other[..other.len() - 1]);
                    with.push(shared);
                    out.push(replace(block, i..i + 1, with));
                }
                if then.first() == other.first() {
                    let shared = then[0].clone();
                    let mut with = vec![shared];
                    with.extend(rebuild_if(*cond, &then[1..], &other[1..]));
                    out.push(replace(block, i..i + 1, with));
                }
            }
        }
        Move::FuseTurns => {
            for i in 0..n.saturating_sub(1) {
                let (Some(a), Some(b)) = (block[i].as_action(), block[i + 1].as_action()) else {
                    continue;
                };
                if let (Some(qa), Some(qb)) = (a.quarter_turns(), b.quarter_turns()) {
                    let with = Action::turn_for(qa + qb).map(Stmt::Action).into_iter().collect();
                    out.push(replace(block, i..i + 2, with));
                }
            }
        }
        Move::GuardedCorridor => {
            for i in 0..n {
                let mut moves = 0u32;
                let mut guards = 0;
                let mut j = i;
                while j < n {
                    let s = &block[j];
                    if is_guard(s) {
                        // a guard must lead into a move
                        if j + 1 >= n || forward_moves(&block[j + 1]).is_none() {
                            break;
                        }
                        guards += 1;
                    } else if let Some(k) = forward_moves(s) {
                        moves += k;
                        if guards > 0 && moves >= 2 {
                            out.push(replace(
                                block,
                                i..j + 1,
                                vec![Stmt::repeat(
                                    moves,
                                    vec![guard(), Stmt::Action(Action::MoveForward)],
                                )],
                            ));
                        }
                    } else {
                        break;
                    }
                    j += 1;
                }
            }
        }
        Move::StripGuard => {
            for (i, s) in block.iter().enumerate() {
                if is_guard(s) {
                    out.push(replace(block, i..i + 1, vec![Stmt::Action(Action::Attack)]));
                }
            }
        }
    }
    out
}

/// `if` with possibly emptied branches, normalised so no block is empty.
fn rebuild_if(cond: Condition, then: &[Stmt], other: &[Stmt]) -> Vec<Stmt> {
    match (then.is_empty(), other.is_empty()) {
        (true, true) => vec![],
        (false, true) => vec![Stmt::if_(cond, then.to_vec())],
        (true, false) => vec![Stmt::if_(
            Condition {
                probe: cond.probe,
                negated: !cond.negated,
            },
            other.to_vec(),
        )],
        (false, false) => vec![Stmt::if_else(cond, then.to_vec(), other.to_vec())],
    }
}

fn while_to_repeat(p: &Program, maze: &Maze, out: &mut Vec<Program>) {
    let run = execute_instrumented(p, maze, crate::interp::DEFAULT_FUEL);
    for path in p.paths() {
        let Some(Stmt::While { body, .. }) = p.get(&path) else { continue };
        let mut counts = run
            .spans
            .iter()
            .filter(|s| s.path == path)
            .map(|s| s.iterations);
        let Some(first) = counts.next() else { continue };
        if first == 0 || counts.any(|c| c != first) {
            continue;
        }
        let mut q = p.clone();
        q.splice(&path, vec![Stmt::repeat(first as u32, body.clone())]);
        out.push(q);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maze::Dir;
    use crate::program::{parse_program, print_program};

    fn texts(src: &str, mv: Move) -> Vec<String> {
        let maze = Maze::from_picture("S.G", Dir::East).unwrap();
        candidates(&parse_program(src).unwrap(), mv, &maze)
            .iter()
            .map(|p| print_program(p).replace('\n', "; "))
            .collect()
    }

    #[test]
    fn roll_detects_window() {
        let out = texts("move; turn_left; move; turn_left; move; turn_left", Move::Roll);
        assert!(out.contains(&"repeat 3 {;     move;     turn_left; }".to_string()), "{out:?}");
    }

    #[test]
    fn absorb_and_merge() {
        assert_eq!(
            texts("move; repeat 2 { move }; move", Move::Absorb),
            vec!["repeat 4 {;     move; }"]
        );
        assert_eq!(
            texts("repeat 3 { move }; repeat 3 { move }", Move::MergeRepeats),
            vec!["repeat 6 {;     move; }"]
        );
    }

    #[test]
    fn fuse_turns() {
        assert_eq!(texts("turn_right; turn_back", Move::FuseTurns), vec!["turn_left"]);
        assert!(texts("turn_left; turn_right", Move::FuseTurns).is_empty());
        assert_eq!(texts("move; turn_left; turn_right", Move::FuseTurns), vec!["move"]);
    }

    #[test]
    fn hoist_shared_suffix() {
        assert_eq!(
            texts("if path_ahead { move; attack } else { turn_left; attack }", Move::Hoist),
            vec!["if path_ahead {;     move; } else {;     turn_left; }; attack"]
        );
        assert_eq!(
            texts("if path_ahead { attack } else { turn_left; attack }", Move::Hoist),
            vec!["if not path_ahead {;     turn_left; }; attack"]
        );
    }

    #[test]
    fn guarded_corridor() {
        let out = texts(
            "if monster_ahead { attack }; move; move; if monster_ahead { attack }; move",
            Move::GuardedCorridor,
        );
        assert!(out.contains(
            &"repeat 3 {;     if monster_ahead {;         attack;     };     move; }".to_string()
        ));
    }
}
