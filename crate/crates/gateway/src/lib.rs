//! HTTP service and command line for the maze engine.

pub mod api;
pub mod chat;
pub mod cli;
pub mod engine;
pub mod error;
pub mod server;
pub mod store;

pub use api::{router, AppState};
pub use error::{ApiError, ErrorCode};
pub use store::Store;
