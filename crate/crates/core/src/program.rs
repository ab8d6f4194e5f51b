//! Program tree and its text form.
//!
//! ```text
//! program := stmt+
//! stmt    := "move" | "turn_left" | "turn_right" | "turn_back" | "attack"
//!          | "repeat" INT block | "while" cond block | "if" cond block ("else" block)?
//! block   := "{" stmt+ "}"
//! cond    := "not"? ("path_ahead" | "monster_ahead" | "gems_remaining" | "at_goal")
//! ```
//!
//! Statements are separated by newlines or semicolons. Sequencing is implicit:
//! a block is a `Vec<Stmt>`, so there is exactly one tree per program text.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::ProgramError;

/// Deepest allowed nesting of statements, counting top level as depth 1.
pub const MAX_DEPTH: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Action {
    #[serde(rename = "move")]
    MoveForward,
    #[serde(rename = "turn_left")]
    TurnLeft,
    #[serde(rename = "turn_right")]
    TurnRight,
    #[serde(rename = "turn_back")]
    TurnBack,
    #[serde(rename = "attack")]
    Attack,
}

impl Action {
    /// Fixed expansion order used by the solver.
    pub const ALL: [Action; 5] = [
        Action::MoveForward,
        Action::TurnLeft,
        Action::TurnRight,
        Action::TurnBack,
        Action::Attack,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            Action::MoveForward => "move",
            Action::TurnLeft => "turn_left",
            Action::TurnRight => "turn_right",
            Action::TurnBack => "turn_back",
            Action::Attack => "attack",
        }
    }

    pub fn from_keyword(word: &str) -> Option<Action> {
        Action::ALL.into_iter().find(|a| a.keyword() == word)
    }

    /// Human label, e.g. "Move Forward".
    pub fn label(self) -> &'static str {
        match self {
            Action::MoveForward => "Move Forward",
            Action::TurnLeft => "Turn Left",
            Action::TurnRight => "Turn Right",
            Action::TurnBack => "Turn Back",
            Action::Attack => "Attack",
        }
    }

    pub fn is_turn(self) -> bool {
        matches!(self, Action::TurnLeft | Action::TurnRight | Action::TurnBack)
    }

    /// Clockwise quarter turns performed by a turn action.
    pub fn quarter_turns(self) -> Option<u8> {
        match self {
            Action::TurnRight => Some(1),
            Action::TurnBack => Some(2),
            Action::TurnLeft => Some(3),
            _ => None,
        }
    }

    /// The single turn equal to `quarters` clockwise quarter turns, if any.
    pub fn turn_for(quarters: u8) -> Option<Action> {
        match quarters % 4 {
            1 => Some(Action::TurnRight),
            2 => Some(Action::TurnBack),
            3 => Some(Action::TurnLeft),
            _ => None,
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Probe {
    PathAhead,
    MonsterAhead,
    GemsRemaining,
    AtGoal,
}

impl Probe {
    pub const ALL: [Probe; 4] = [
        Probe::PathAhead,
        Probe::MonsterAhead,
        Probe::GemsRemaining,
        Probe::AtGoal,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            Probe::PathAhead => "path_ahead",
            Probe::MonsterAhead => "monster_ahead",
            Probe::GemsRemaining => "gems_remaining",
            Probe::AtGoal => "at_goal",
        }
    }

    pub fn from_keyword(word: &str) -> Option<Probe> {
        Probe::ALL.into_iter().find(|p| p.keyword() == word)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Condition {
    pub probe: Probe,
    pub negated: bool,
}

impl Condition {
    pub const fn is(probe: Probe) -> Self {
        Condition { probe, negated: false }
    }

    pub const fn not(probe: Probe) -> Self {
        Condition { probe, negated: true }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            f.write_str("not ")?;
        }
        f.write_str(self.probe.keyword())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Stmt {
    Action(Action),
    Repeat {
        count: u32,
        body: Vec<Stmt>,
    },
    While {
        cond: Condition,
        body: Vec<Stmt>,
    },
    If {
        cond: Condition,
        then: Vec<Stmt>,
        otherwise: Option<Vec<Stmt>>,
    },
}

impl Stmt {
    pub fn repeat(count: u32, body: Vec<Stmt>) -> Stmt {
        Stmt::Repeat { count, body }
    }

    pub fn while_(cond: Condition, body: Vec<Stmt>) -> Stmt {
        Stmt::While { cond, body }
    }

    pub fn if_(cond: Condition, then: Vec<Stmt>) -> Stmt {
        Stmt::If {
            cond,
            then,
            otherwise: None,
        }
    }

    pub fn if_else(cond: Condition, then: Vec<Stmt>, otherwise: Vec<Stmt>) -> Stmt {
        Stmt::If {
            cond,
            then,
            otherwise: Some(otherwise),
        }
    }

    pub fn is_loop(&self) -> bool {
        matches!(self, Stmt::Repeat { .. } | Stmt::While { .. })
    }

    pub fn as_action(&self) -> Option<Action> {
        match self {
            Stmt::Action(a) => Some(*a),
            _ => None,
        }
    }

    /// Action and control nodes in this subtree; sequencing is free.
    pub fn block_count(&self) -> usize {
        1 + match self {
            Stmt::Action(_) => 0,
            Stmt::Repeat { body, .. } | Stmt::While { body, .. } => block_count(body),
            Stmt::If {
                then, otherwise, ..
            } => block_count(then) + otherwise.as_deref().map_or(0, block_count),
        }
    }

    pub fn loop_count(&self) -> usize {
        let own = usize::from(self.is_loop());
        own + match self {
            Stmt::Action(_) => 0,
            Stmt::Repeat { body, .. } | Stmt::While { body, .. } => loop_count(body),
            Stmt::If {
                then, otherwise, ..
            } => loop_count(then) + otherwise.as_deref().map_or(0, loop_count),
        }
    }

    fn depth(&self) -> usize {
        1 + match self {
            Stmt::Action(_) => 0,
            Stmt::Repeat { body, .. } | Stmt::While { body, .. } => block_depth(body),
            Stmt::If {
                then, otherwise, ..
            } => block_depth(then).max(otherwise.as_deref().map_or(0, block_depth)),
        }
    }

    /// Child blocks in a fixed order: body/then first, else second.
    pub fn arms(&self) -> Vec<&Vec<Stmt>> {
        match self {
            Stmt::Action(_) => vec![],
            Stmt::Repeat { body, .. } | Stmt::While { body, .. } => vec![body],
            Stmt::If {
                then, otherwise, ..
            } => std::iter::once(then).chain(otherwise.iter()).collect(),
        }
    }

    pub fn arm_mut(&mut self, arm: Arm) -> Option<&mut Vec<Stmt>> {
        match (self, arm) {
            (Stmt::Repeat { body, .. } | Stmt::While { body, .. }, Arm::Body) => Some(body),
            (Stmt::If { then, .. }, Arm::Body) => Some(then),
            (Stmt::If { otherwise, .. }, Arm::Else) => otherwise.as_mut(),
            _ => None,
        }
    }

    pub fn arm(&self, arm: Arm) -> Option<&Vec<Stmt>> {
        match (self, arm) {
            (Stmt::Repeat { body, .. } | Stmt::While { body, .. }, Arm::Body) => Some(body),
            (Stmt::If { then, .. }, Arm::Body) => Some(then),
            (Stmt::If { otherwise, .. }, Arm::Else) => otherwise.as_ref(),
            _ => None,
        }
    }
}

pub fn block_count(block: &[Stmt]) -> usize {
    block.iter().map(Stmt::block_count).sum()
}

pub fn loop_count(block: &[Stmt]) -> usize {
    block.iter().map(Stmt::loop_count).sum()
}

fn block_depth(block: &[Stmt]) -> usize {
    block.iter().map(Stmt::depth).max().unwrap_or(0)
}

/// Which child block of a control statement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Arm {
    /// Loop body or `then` branch.
    Body,
    Else,
}

/// Address of a statement: descend through `(index, arm)` pairs to reach a
/// block, then pick `index` within it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct StmtPath {
    pub parents: Vec<(usize, Arm)>,
    pub index: usize,
}

impl StmtPath {
    pub fn top(index: usize) -> Self {
        StmtPath {
            parents: Vec::new(),
            index,
        }
    }

    pub fn child(&self, arm: Arm, index: usize) -> Self {
        let mut parents = self.parents.clone();
        parents.push((self.index, arm));
        StmtPath { parents, index }
    }

    pub fn depth(&self) -> usize {
        self.parents.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Program {
    pub body: Vec<Stmt>,
}

impl Program {
    pub fn new(body: Vec<Stmt>) -> Self {
        Program { body }
    }

    pub fn from_actions(actions: &[Action]) -> Self {
        Program::new(actions.iter().copied().map(Stmt::Action).collect())
    }

    pub fn block_count(&self) -> usize {
        block_count(&self.body)
    }

    pub fn loop_count(&self) -> usize {
        loop_count(&self.body)
    }

    pub fn depth(&self) -> usize {
        block_depth(&self.body)
    }

    /// Checks the structural limits that the text form enforces.
    pub fn validate(&self) -> Result<(), ProgramError> {
        fn check(block: &[Stmt], depth: usize) -> Result<(), ProgramError> {
            let limit = |message: String| ProgramError::Limit {
                line: 0,
                column: 0,
                message,
            };
            if block.is_empty() {
                return Err(limit("empty block".into()));
            }
            if depth > MAX_DEPTH {
                return Err(limit(format!("nesting deeper than {MAX_DEPTH}")));
            }
            for s in block {
                if let Stmt::Repeat { count: 0, .. } = s {
                    return Err(limit("repeat count must be at least 1".into()));
                }
                for arm in s.arms() {
                    check(arm, depth + 1)?;
                }
            }
            Ok(())
        }
        check(&self.body, 1)
    }

    pub fn block(&self, parents: &[(usize, Arm)]) -> Option<&Vec<Stmt>> {
        let mut block = &self.body;
        for &(i, arm) in parents {
            block = block.get(i)?.arm(arm)?;
        }
        Some(block)
    }

    pub fn block_mut(&mut self, parents: &[(usize, Arm)]) -> Option<&mut Vec<Stmt>> {
        let mut block = &mut self.body;
        for &(i, arm) in parents {
            block = block.get_mut(i)?.arm_mut(arm)?;
        }
        Some(block)
    }

    pub fn get(&self, path: &StmtPath) -> Option<&Stmt> {
        self.block(&path.parents)?.get(path.index)
    }

    /// Replaces the statement at `path` with `with` (which may be several
    /// statements, or none).
    pub fn splice(&mut self, path: &StmtPath, with: Vec<Stmt>) -> bool {
        match self.block_mut(&path.parents) {
            Some(block) if path.index < block.len() => {
                block.splice(path.index..=path.index, with);
                true
            }
            _ => false,
        }
    }

    /// Every statement address in pre-order.
    pub fn paths(&self) -> Vec<StmtPath> {
        fn walk(block: &[Stmt], parents: &[(usize, Arm)], out: &mut Vec<StmtPath>) {
            for (i, s) in block.iter().enumerate() {
                let path = StmtPath {
                    parents: parents.to_vec(),
                    index: i,
                };
                out.push(path);
                let arms: &[Arm] = match s {
                    Stmt::Action(_) => &[],
                    Stmt::If {
                        otherwise: Some(_), ..
                    } => &[Arm::Body, Arm::Else],
                    _ => &[Arm::Body],
                };
                for &arm in arms {
                    let mut p = parents.to_vec();
                    p.push((i, arm));
                    walk(s.arm(arm).expect("arm exists"), &p, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(&self.body, &[], &mut out);
        out
    }

    /// Parent addresses of every block in the program, top level first.
    pub fn blocks(&self) -> Vec<Vec<(usize, Arm)>> {
        let mut out = vec![Vec::new()];
        for path in self.paths() {
            let s = self.get(&path).expect("path valid");
            for arm in [Arm::Body, Arm::Else] {
                if s.arm(arm).is_some() {
                    let mut p = path.parents.clone();
                    p.push((path.index, arm));
                    out.push(p);
                }
            }
        }
        out
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_program(self))
    }
}

// ---------------------------------------------------------------------------
// Printer

const INDENT: &str = "    ";

/// Canonical text: one statement per line, four-space indentation, no
/// trailing newline.
pub fn print_program(p: &Program) -> String {
    let mut out = String::new();
    print_block(&p.body, 0, &mut out);
    if out.ends_with('\n') {
        out.pop();
    }
    out
}

fn print_block(block: &[Stmt], level: usize, out: &mut String) {
    for s in block {
        let pad = INDENT.repeat(level);
        match s {
            Stmt::Action(a) => {
                out.push_str(&pad);
                out.push_str(a.keyword());
                out.push('\n');
            }
            Stmt::Repeat { count, body } => {
                out.push_str(&format!("{pad}repeat {count} {{\n"));
                print_block(body, level + 1, out);
                out.push_str(&format!("{pad}}}\n"));
            }
            Stmt::While { cond, body } => {
                out.push_str(&format!("{pad}while {cond} {{\n"));
                print_block(body, level + 1, out);
                out.push_str(&format!("{pad}}}\n"));
            }
            Stmt::If {
                cond,
                then,
                otherwise,
            } => {
                out.push_str(&format!("{pad}if {cond} {{\n"));
                print_block(then, level + 1, out);
                match otherwise {
                    Some(e) => {
                        out.push_str(&format!("{pad}}} else {{\n"));
                        print_block(e, level + 1, out);
                        out.push_str(&format!("{pad}}}\n"));
                    }
                    None => out.push_str(&format!("{pad}}}\n")),
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Parser

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Word(String),
    Int(String),
    Open,
    Close,
    Sep,
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, ProgramError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut column) = (1usize, 1usize);
    while let Some(&c) = chars.peek() {
        let (l, col) = (line, column);
        let push = |out: &mut Vec<Token>, tok| out.push(Token { tok, line: l, column: col });
        match c {
            '\n' | ';' => {
                chars.next();
                push(&mut out, Tok::Sep);
                if c == '\n' {
                    line += 1;
                    column = 1;
                } else {
                    column += 1;
                }
            }
            c if c.is_whitespace() => {
                chars.next();
                column += 1;
            }
            '{' => {
                chars.next();
                column += 1;
                push(&mut out, Tok::Open);
            }
            '}' => {
                chars.next();
                column += 1;
                push(&mut out, Tok::Close);
            }
            c if c.is_ascii_digit() => {
                let mut s = String::new();
                while let Some(&d) = chars.peek().filter(|d| d.is_ascii_alphanumeric() || **d == '_') {
                    s.push(d);
                    chars.next();
                    column += 1;
                }
                push(&mut out, Tok::Int(s));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut s = String::new();
                while let Some(&d) = chars.peek().filter(|d| d.is_ascii_alphanumeric() || **d == '_') {
                    s.push(d);
                    chars.next();
                    column += 1;
                }
                push(&mut out, Tok::Word(s));
            }
            other => {
                return Err(ProgramError::Syntax {
                    line,
                    column,
                    message: format!("unexpected character {other:?}"),
                })
            }
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        column,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn skip_seps(&mut self) {
        while self.peek().tok == Tok::Sep {
            self.bump();
        }
    }

    fn syntax(&self, t: &Token, message: impl Into<String>) -> ProgramError {
        ProgramError::Syntax {
            line: t.line,
            column: t.column,
            message: message.into(),
        }
    }

    /// Parses statements until `Close` (when `nested`) or end of input.
    fn stmts(&mut self, depth: usize, nested: bool) -> Result<Vec<Stmt>, ProgramError> {
        let mut out = Vec::new();
        loop {
            self.skip_seps();
            let t = self.peek().clone();
            match t.tok {
                Tok::Close if nested => break,
                Tok::Eof if !nested => break,
                Tok::Eof => return Err(self.syntax(&t, "unclosed block, expected `}`")),
                Tok::Close => return Err(self.syntax(&t, "unmatched `}`")),
                _ => {}
            }
            out.push(self.stmt(depth)?);
            let next = self.peek().clone();
            match next.tok {
                Tok::Sep | Tok::Eof | Tok::Close => {}
                _ => {
                    return Err(self.syntax(&next, "expected newline or `;` between statements"))
                }
            }
        }
        if out.is_empty() {
            let t = self.peek().clone();
            return Err(self.syntax(&t, "expected at least one statement"));
        }
        Ok(out)
    }

    fn block(&mut self, depth: usize) -> Result<Vec<Stmt>, ProgramError> {
        let open = self.bump();
        if open.tok != Tok::Open {
            return Err(self.syntax(&open, "expected `{`"));
        }
        let body = self.stmts(depth + 1, true)?;
        self.bump(); // the `}`
        Ok(body)
    }

    fn cond(&mut self) -> Result<Condition, ProgramError> {
        let t = self.bump();
        let (negated, t) = match &t.tok {
            Tok::Word(w) if w == "not" => (true, self.bump()),
            _ => (false, t),
        };
        match &t.tok {
            Tok::Word(w) => Probe::from_keyword(w)
                .map(|probe| Condition { probe, negated })
                .ok_or_else(|| self.syntax(&t, format!("unknown condition `{w}`"))),
            _ => Err(self.syntax(&t, "expected a condition")),
        }
    }

    fn stmt(&mut self, depth: usize) -> Result<Stmt, ProgramError> {
        let t = self.bump();
        if depth > MAX_DEPTH {
            return Err(ProgramError::Limit {
                line: t.line,
                column: t.column,
                message: format!("nesting deeper than {MAX_DEPTH}"),
            });
        }
        let word = match &t.tok {
            Tok::Word(w) => w.clone(),
            _ => return Err(self.syntax(&t, "expected a statement")),
        };
        if let Some(a) = Action::from_keyword(&word) {
            return Ok(Stmt::Action(a));
        }
        match word.as_str() {
            "repeat" => {
                let n = self.bump();
                let count = match &n.tok {
                    Tok::Int(s) if !s.chars().all(|c| c.is_ascii_digit()) => {
                        return Err(self.syntax(&n, format!("malformed count `{s}`")))
                    }
                    Tok::Int(s) => s.parse::<u64>().map_err(|_| ProgramError::Limit {
                        line: n.line,
                        column: n.column,
                        message: format!("repeat count `{s}` is not a valid count"),
                    })?,
                    _ => return Err(self.syntax(&n, "expected a repeat count")),
                };
                if count < 1 || count > u32::MAX as u64 {
                    return Err(ProgramError::Limit {
                        line: n.line,
                        column: n.column,
                        message: format!("repeat count {count} outside 1..={}", u32::MAX),
                    });
                }
                let body = self.block(depth)?;
                Ok(Stmt::Repeat {
                    count: count as u32,
                    body,
                })
            }
            "while" => {
                let cond = self.cond()?;
                let body = self.block(depth)?;
                Ok(Stmt::While { cond, body })
            }
            "if" => {
                let cond = self.cond()?;
                let then = self.block(depth)?;
                let otherwise = match &self.peek().tok {
                    Tok::Word(w) if w == "else" => {
                        self.bump();
                        Some(self.block(depth)?)
                    }
                    _ => None,
                };
                Ok(Stmt::If {
                    cond,
                    then,
                    otherwise,
                })
            }
            other => Err(self.syntax(&t, format!("unknown statement `{other}`"))),
        }
    }
}

pub fn parse_program(text: &str) -> Result<Program, ProgramError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let body = p.stmts(1, false)?;
    Ok(Program { body })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_move() {
        assert_eq!(
            parse_program("move").unwrap().body,
            vec![Stmt::Action(Action::MoveForward)]
        );
    }

    #[test]
    fn while_one_liner() {
        let p = parse_program("while path_ahead { move }").unwrap();
        assert_eq!(
            p.body,
            vec![Stmt::while_(
                Condition::is(Probe::PathAhead),
                vec![Stmt::Action(Action::MoveForward)]
            )]
        );
        assert_eq!(parse_program(&print_program(&p)).unwrap(), p);
        assert_eq!(print_program(&p), "while path_ahead {\n    move\n}");
    }

    #[test]
    fn repeat_zero_is_limit_error() {
        assert!(matches!(
            parse_program("repeat 0 { move }"),
            Err(ProgramError::Limit { line: 1, column: 8, .. })
        ));
        assert!(matches!(
            parse_program("repeat 99999999999 { move }"),
            Err(ProgramError::Limit { .. })
        ));
    }

    #[test]
    fn semicolons_and_else() {
        let p = parse_program("move; if not monster_ahead { move } else { attack }; turn_back")
            .unwrap();
        assert_eq!(p.body.len(), 3);
        assert_eq!(p.block_count(), 5);
        let text = print_program(&p);
        assert_eq!(
            text,
            "move\nif not monster_ahead {\n    move\n} else {\n    attack\n}\nturn_back"
        );
        assert_eq!(parse_program(&text).unwrap(), p);
    }

    #[test]
    fn syntax_errors_carry_position() {
        assert_eq!(
            parse_program("move\n  jump"),
            Err(ProgramError::Syntax {
                line: 2,
                column: 3,
                message: "unknown statement `jump`".into()
            })
        );
        assert!(matches!(
            parse_program("repeat 2 { move"),
            Err(ProgramError::Syntax { .. })
        ));
        assert!(matches!(parse_program("move move"), Err(ProgramError::Syntax { .. })));
        assert!(matches!(parse_program(""), Err(ProgramError::Syntax { .. })));
        assert!(matches!(parse_program("while { move }"), Err(ProgramError::Syntax { .. })));
        assert!(matches!(parse_program("repeat 2 { }"), Err(ProgramError::Syntax { .. })));
        assert!(matches!(parse_program("move }"), Err(ProgramError::Syntax { .. })));
        assert!(matches!(parse_program("move @"), Err(ProgramError::Syntax { .. })));
    }

    #[test]
    fn depth_limit() {
        let nest = |n: usize| {
            let mut s = String::from("move");
            for _ in 1..n {
                s = format!("repeat 2 {{ {s} }}");
            }
            s
        };
        assert_eq!(parse_program(&nest(MAX_DEPTH)).unwrap().depth(), MAX_DEPTH);
        assert!(matches!(
            parse_program(&nest(MAX_DEPTH + 1)),
            Err(ProgramError::Limit { .. })
        ));
    }

    #[test]
    fn paths_and_splice() {
        let mut p = parse_program("move\nrepeat 2 { turn_left; move }\nattack").unwrap();
        let paths = p.paths();
        assert_eq!(paths.len(), 5);
        let inner = StmtPath::top(1).child(Arm::Body, 1);
        assert_eq!(p.get(&inner), Some(&Stmt::Action(Action::MoveForward)));
        assert!(p.splice(&inner, vec![Stmt::Action(Action::Attack), Stmt::Action(Action::Attack)]));
        assert_eq!(print_program(&p), "move\nrepeat 2 {\n    turn_left\n    attack\n    attack\n}\nattack");
        assert_eq!(p.blocks().len(), 2);
    }

    #[test]
    fn turn_algebra() {
        for a in [Action::TurnLeft, Action::TurnRight, Action::TurnBack] {
            assert_eq!(Action::turn_for(a.quarter_turns().unwrap()), Some(a));
        }
        assert_eq!(Action::turn_for(1 + 2), Some(Action::TurnLeft));
        assert_eq!(Action::turn_for(3 + 1), None);
    }
}
