use thiserror::Error;

use crate::maze::Pos;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MazeError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("schema error in `{field}`{}: {message}", at.map(|p| format!(" at {p}")).unwrap_or_default())]
    Schema {
        field: String,
        at: Option<Pos>,
        message: String,
    },
}

impl MazeError {
    pub fn schema(field: &str, at: Option<Pos>, message: impl Into<String>) -> Self {
        MazeError::Schema {
            field: field.to_string(),
            at,
            message: message.into(),
        }
    }

    pub(crate) fn from_json(err: serde_json::Error) -> Self {
        use serde_json::error::Category;
        match err.classify() {
            Category::Data => {
                let text = err.to_string();
                // serde names the offending key between backticks
                let field = text
                    .split('`')
                    .nth(1)
                    .filter(|f| !f.is_empty())
                    .unwrap_or("document")
                    .to_string();
                MazeError::Schema {
                    field,
                    at: None,
                    message: text,
                }
            }
            _ => MazeError::Syntax {
                line: err.line(),
                column: err.column(),
                message: err.to_string(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProgramError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("limit exceeded at line {line}, column {column}: {message}")]
    Limit {
        line: usize,
        column: usize,
        message: String,
    },
}
