//! Grid-maze game model, interpreter, solvers and program compressor.

pub mod compress;
pub mod corpus;
pub mod error;
pub mod interp;
pub mod maze;
pub mod program;
pub mod scaffold;
pub mod solver;

pub use compress::{solve_high, CompressionResult, PipelineError};
pub use error::{MazeError, ProgramError};
pub use interp::{execute, execute_actions, Outcome, Trace, DEFAULT_FUEL};
pub use maze::{parse_maze, serialize_maze, Dir, Maze, MonsterKind, Pos};
pub use program::{parse_program, print_program, Action, Program, Stmt};
pub use solver::{solve_low, Solution, SolverResult, UnsolvableReason};
