//! Lesson checks and staged hints.

mod design;
mod patterns;
mod session;
mod text;

pub use design::{asset_kinds, check_design, check_design_within, DesignCheck, DesignReport, DesignRequirements, Witness};
pub use patterns::{pattern_report, Finding};
pub use session::{
    new_session, request_hint, request_hint_with, HintContent, HintError, HintKind, HintPayload, HintSession,
    MAX_STAGE,
};
pub use text::{count_sentences, render_hint_text, truncate_sentences, MAX_SENTENCES};
