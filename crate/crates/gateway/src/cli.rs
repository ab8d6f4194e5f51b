//! The `mazemate` command line.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use mazemate_core::compress::{build_program_tree, compress, vns_refine, VnsConfig};
use mazemate_core::interp::DEFAULT_FUEL;
use mazemate_core::scaffold::{new_session, request_hint, DesignRequirements};
use mazemate_core::solver::Limits;
use mazemate_core::{execute, parse_maze, parse_program, print_program, Action, Maze, Stmt};
use serde::Serialize;
use serde_json::json;

use crate::engine::{self, outcome_name, SolveMode};
use crate::error::{ApiError, ErrorCode};
use crate::server::{serve, ServeArgs};

#[derive(Parser)]
#[command(name = "mazemate", version, about = "Maze solver, program compressor and hint engine")]
struct Cli {
    /// Machine-readable output; errors go to stderr as JSON.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse and validate a maze document.
    Validate { maze: PathBuf },
    /// Print the shortest action list or the compact program.
    Solve {
        #[arg(long, value_enum, default_value = "low")]
        mode: SolveMode,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        maze: PathBuf,
    },
    /// Compress an action list (default: the shortest one) into a program.
    Compress {
        maze: PathBuf,
        /// File of plain actions, one statement each.
        #[arg(long)]
        actions: Option<PathBuf>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Run a program and summarize the trace.
    Simulate {
        maze: PathBuf,
        program: PathBuf,
        #[arg(long, default_value_t = DEFAULT_FUEL)]
        fuel: usize,
    },
    /// Check a maze against lesson requirements.
    Check {
        maze: PathBuf,
        /// JSON requirements; omitted fields take defaults.
        #[arg(long)]
        requirements: Option<PathBuf>,
    },
    /// Print the hint a fresh session gives at `stage`.
    Hint {
        maze: PathBuf,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=3))]
        stage: u8,
    },
    /// Run the HTTP service.
    Serve(ServeArgs),
}

struct Output<'a> {
    json: bool,
    out: &'a mut dyn Write,
}

impl Output<'_> {
    fn emit<T: Serialize>(&mut self, value: &T, text: impl FnOnce() -> String) {
        let line = if self.json {
            serde_json::to_string_pretty(value).expect("output serializes")
        } else {
            text()
        };
        let _ = writeln!(self.out, "{line}");
    }
}

fn read(path: &Path) -> Result<String, ApiError> {
    std::fs::read_to_string(path).map_err(|e| {
        ApiError::new(
            axum::http::StatusCode::NOT_FOUND,
            ErrorCode::NotFound,
            format!("cannot read {}: {e}", path.display()),
        )
    })
}

fn load_maze(path: &Path) -> Result<Maze, ApiError> {
    Ok(parse_maze(&read(path)?)?)
}

fn plain_actions(text: &str) -> Result<Vec<Action>, ApiError> {
    parse_program(text)?
        .body
        .iter()
        .map(|s| match s {
            Stmt::Action(a) => Ok(*a),
            _ => Err(ApiError::syntax("the actions file may hold plain actions only")),
        })
        .collect()
}

/// Runs the CLI and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    let json = cli.json;
    let mut o = Output { json, out };
    match dispatch(cli.cmd, &mut o) {
        Ok(code) => code,
        Err(e) => {
            let _ = if json {
                writeln!(err, "{}", serde_json::to_string(&e).expect("error serializes"))
            } else {
                writeln!(err, "error: {}", e.message)
            };
            e.exit_code()
        }
    }
}

fn dispatch(cmd: Cmd, o: &mut Output) -> Result<u8, ApiError> {
    match cmd {
        Cmd::Validate { maze } => {
            let v = engine::validate(&load_maze(&maze)?);
            o.emit(&v, || {
                format!(
                    "valid {}×{} maze: {} gems, {} hearts, {} monsters, {} obstacles (hash {})",
                    v.width, v.height, v.gems, v.hearts, v.monsters, v.obstacles, v.content_hash
                )
            });
            Ok(0)
        }
        Cmd::Solve { mode, seed, maze } => {
            let m = load_maze(&maze)?;
            let cfg = VnsConfig { seed, ..VnsConfig::default() };
            let v = engine::solve(&m, mode, &cfg, &Limits::none())?;
            o.emit(&v, || v.text().to_string());
            Ok(0)
        }
        Cmd::Compress { maze, actions, seed } => {
            let m = load_maze(&maze)?;
            let actions = match actions {
                Some(path) => plain_actions(&read(&path)?)?,
                None => match engine::solve(&m, SolveMode::Low, &VnsConfig::default(), &Limits::none())? {
                    engine::SolveView::Low { actions, .. } => actions,
                    engine::SolveView::High { actions, .. } => actions,
                },
            };
            let tree = build_program_tree(&actions, &m).map_err(|e| {
                ApiError::new(axum::http::StatusCode::UNPROCESSABLE_ENTITY, ErrorCode::Unsolvable, e.to_string())
            })?;
            let compressed = compress(&tree, &m, &actions)?;
            let refined = vns_refine(&compressed, &m, &VnsConfig { seed, ..VnsConfig::default() });
            let body = json!({
                "actions": actions,
                "tree": print_program(&tree),
                "compressed": print_program(&compressed),
                "program": print_program(&refined),
                "block_count": refined.block_count(),
            });
            o.emit(&body, || print_program(&refined));
            Ok(0)
        }
        Cmd::Simulate { maze, program, fuel } => {
            let m = load_maze(&maze)?;
            let p = parse_program(&read(&program)?)?;
            let t = execute(&p, &m, fuel);
            let last = *t.final_state();
            let body = json!({
                "outcome": outcome_name(t.outcome),
                "success": t.outcome.is_success(),
                "actions": t.primitive_actions,
                "fuel_used": t.fuel_used,
                "failed_action": t.failed_action,
                "final_state": last,
            });
            o.emit(&body, || {
                format!(
                    "outcome: {}\nactions: {}\nhealth: {}\ngems: {}/{}\nposition: {} facing {}",
                    outcome_name(t.outcome),
                    t.primitive_actions.len(),
                    last.health,
                    last.gems_collected.count_ones(),
                    m.gems().len(),
                    last.position,
                    last.orientation.letter()
                )
            });
            Ok(if t.outcome.is_success() { 0 } else { 1 })
        }
        Cmd::Check { maze, requirements } => {
            let m = load_maze(&maze)?;
            let req = match requirements {
                Some(path) => serde_json::from_str::<DesignRequirements>(&read(&path)?).map_err(|e| {
                    ApiError::new(axum::http::StatusCode::UNPROCESSABLE_ENTITY, ErrorCode::Schema, e.to_string())
                })?,
                None => DesignRequirements::default(),
            };
            let r = engine::design_check(&m, &req, &Limits::none())?;
            o.emit(&r, || {
                let mut lines: Vec<String> = r
                    .checks
                    .iter()
                    .map(|c| format!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail))
                    .collect();
                lines.push(format!("overall: {}", if r.passed { "PASS" } else { "FAIL" }));
                lines.join("\n")
            });
            Ok(if r.passed { 0 } else { 1 })
        }
        Cmd::Hint { maze, stage } => {
            let m = load_maze(&maze)?;
            let mut session = new_session(&m);
            let mut payload = None;
            for _ in 0..stage {
                let (next, p) = request_hint(&session, &m)?;
                session = next;
                payload = Some(p);
            }
            let p = payload.expect("stage is at least 1");
            o.emit(&p, || p.rendered_text.clone());
            Ok(0)
        }
        Cmd::Serve(args) => {
            let rt = tokio::runtime::Runtime::new().map_err(|e| {
                ApiError::new(axum::http::StatusCode::INTERNAL_SERVER_ERROR, ErrorCode::Internal, e.to_string())
            })?;
            rt.block_on(serve(args)).map_err(|e| {
                ApiError::new(axum::http::StatusCode::INTERNAL_SERVER_ERROR, ErrorCode::Internal, format!("{e:#}"))
            })?;
            Ok(0)
        }
    }
}
