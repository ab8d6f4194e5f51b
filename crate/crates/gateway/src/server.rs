//! Service startup from flags and environment.

use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use anyhow::Context;
use clap::Args;

use crate::api::{router, AppState};
use crate::chat::OpenAiChat;
use crate::store::Store;

pub const API_KEY_VAR: &str = "MAZEMATE_CHAT_API_KEY";

#[derive(Debug, Clone, Args)]
pub struct ServeArgs {
    #[arg(long, env = "MAZEMATE_BIND", default_value = "127.0.0.1:8080")]
    pub bind: String,
    /// Snapshot file; sessions live only in memory when unset.
    #[arg(long, env = "MAZEMATE_SNAPSHOT")]
    pub snapshot: Option<PathBuf>,
    /// Base URL of an OpenAI-compatible chat endpoint.
    #[arg(long, env = "MAZEMATE_CHAT_URL")]
    pub chat_url: Option<String>,
    #[arg(long, env = "MAZEMATE_CHAT_MODEL")]
    pub chat_model: Option<String>,
    /// Budget for each solver call, in milliseconds.
    #[arg(long, env = "MAZEMATE_TIMEBOX_MS", default_value_t = 10_000)]
    pub timebox_ms: u64,
}

pub fn app_state(args: &ServeArgs) -> anyhow::Result<AppState> {
    let store = match &args.snapshot {
        Some(path) => Store::open(path)?,
        None => Store::memory(),
    };
    let mut state = AppState::new(store);
    state.timebox = Duration::from_millis(args.timebox_ms);
    if let (Some(url), Some(model)) = (&args.chat_url, &args.chat_model) {
        let key = std::env::var(API_KEY_VAR).ok().filter(|k| !k.is_empty());
        state = state.with_chat(Arc::new(OpenAiChat::new(url, model, key)));
    }
    Ok(state)
}

pub async fn serve(args: ServeArgs) -> anyhow::Result<()> {
    let state = app_state(&args)?;
    let listener = tokio::net::TcpListener::bind(&args.bind)
        .await
        .with_context(|| format!("binding {}", args.bind))?;
    eprintln!(
        "mazemate listening on {} (chat model {})",
        listener.local_addr()?,
        if state.chat.is_some() { "configured" } else { "off" }
    );
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
