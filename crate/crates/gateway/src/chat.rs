//! Optional language-model chat with locally executed tools.
//!
//! The model only ever sees tool results computed here. A `solve_high`
//! result is withheld until the session has issued two hints, and replies
//! are scanned for the withheld program text before delivery.

use std::collections::VecDeque;
use std::sync::Mutex;
use std::time::Duration;

use async_trait::async_trait;
use mazemate_core::compress::VnsConfig;
use mazemate_core::scaffold::{truncate_sentences, DesignRequirements, MAX_SENTENCES};
use mazemate_core::solver::Limits;
use mazemate_core::{serialize_maze, Maze};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::engine::{self, SolveMode, SolveView};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Student,
    Assistant,
    Tool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToolCall {
    pub name: String,
    pub arguments: Value,
    pub result: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatTurn {
    pub role: Role,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tool_call: Option<ToolCall>,
}

impl ChatTurn {
    pub fn student(text: impl Into<String>) -> Self {
        ChatTurn {
            role: Role::Student,
            text: text.into(),
            tool_call: None,
        }
    }

    pub fn assistant(text: impl Into<String>) -> Self {
        ChatTurn {
            role: Role::Assistant,
            text: text.into(),
            tool_call: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tool {
    GetMazeState,
    SolveLow,
    SolveHigh,
    DesignCheck,
}

impl Tool {
    pub const ALL: [Tool; 4] = [Tool::GetMazeState, Tool::SolveLow, Tool::SolveHigh, Tool::DesignCheck];

    pub fn name(self) -> &'static str {
        match self {
            Tool::GetMazeState => "get_maze_state",
            Tool::SolveLow => "solve_low",
            Tool::SolveHigh => "solve_high",
            Tool::DesignCheck => "design_check",
        }
    }

    pub fn from_name(name: &str) -> Option<Tool> {
        Tool::ALL.into_iter().find(|t| t.name() == name)
    }

    fn description(self) -> &'static str {
        match self {
            Tool::GetMazeState => "Current maze document as canonical JSON.",
            Tool::SolveLow => "Shortest step-by-step action list for the maze.",
            Tool::SolveHigh => "Compact loop-based program for the maze. Withheld before the second hint.",
            Tool::DesignCheck => "Checks the maze against lesson requirements.",
        }
    }

    /// OpenAI-style function declaration.
    pub fn declaration(self) -> Value {
        json!({
            "type": "function",
            "function": {
                "name": self.name(),
                "description": self.description(),
                "parameters": { "type": "object", "properties": {} },
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToolRequest {
    pub id: String,
    pub name: String,
    pub arguments: Value,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelMessage {
    /// "system", "user", "assistant" or "tool".
    pub role: String,
    pub content: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tool_call_id: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tool_calls: Vec<ToolRequest>,
}

impl ModelMessage {
    fn new(role: &str, content: impl Into<String>) -> Self {
        ModelMessage {
            role: role.to_string(),
            content: content.into(),
            tool_call_id: None,
            tool_calls: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelReply {
    Text(String),
    ToolCalls(Vec<ToolRequest>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChatError {
    #[error("language model unavailable: {0}")]
    Unavailable(String),
}

#[async_trait]
pub trait ChatModel: Send + Sync {
    async fn complete(&self, messages: &[ModelMessage], tools: &[Value]) -> Result<ModelReply, ChatError>;
}

/// Client for any endpoint speaking the OpenAI chat-completions protocol.
pub struct OpenAiChat {
    client: reqwest::Client,
    url: String,
    model: String,
    api_key: Option<String>,
}

impl OpenAiChat {
    pub fn new(base_url: &str, model: &str, api_key: Option<String>) -> Self {
        OpenAiChat {
            client: reqwest::Client::builder()
                .timeout(Duration::from_secs(30))
                .build()
                .expect("http client builds"),
            url: format!("{}/chat/completions", base_url.trim_end_matches('/')),
            model: model.to_string(),
            api_key,
        }
    }

    fn wire_message(m: &ModelMessage) -> Value {
        let mut v = json!({ "role": m.role, "content": m.content });
        if let Some(id) = &m.tool_call_id {
            v["tool_call_id"] = json!(id);
        }
        if !m.tool_calls.is_empty() {
            v["tool_calls"] = m
                .tool_calls
                .iter()
                .map(|c| {
                    json!({
                        "id": c.id,
                        "type": "function",
                        "function": { "name": c.name, "arguments": c.arguments.to_string() },
                    })
                })
                .collect();
        }
        v
    }
}

#[async_trait]
impl ChatModel for OpenAiChat {
    async fn complete(&self, messages: &[ModelMessage], tools: &[Value]) -> Result<ModelReply, ChatError> {
        let body = json!({
            "model": self.model,
            "messages": messages.iter().map(Self::wire_message).collect::<Vec<_>>(),
            "tools": tools,
        });
        let mut req = self.client.post(&self.url).json(&body);
        if let Some(key) = &self.api_key {
            req = req.bearer_auth(key);
        }
        let unavailable = |e: reqwest::Error| ChatError::Unavailable(e.to_string());
        let resp = req.send().await.map_err(unavailable)?;
        if !resp.status().is_success() {
            return Err(ChatError::Unavailable(format!("endpoint answered {}", resp.status())));
        }
        let v: Value = resp.json().await.map_err(unavailable)?;
        parse_completion(&v)
    }
}

/// Reads the first choice of a chat-completions response.
pub fn parse_completion(v: &Value) -> Result<ModelReply, ChatError> {
    let msg = &v["choices"][0]["message"];
    if msg.is_null() {
        return Err(ChatError::Unavailable("response has no choices".into()));
    }
    if let Some(calls) = msg["tool_calls"].as_array().filter(|c| !c.is_empty()) {
        let requests = calls
            .iter()
            .map(|c| {
                let raw = c["function"]["arguments"].as_str().unwrap_or("{}");
                ToolRequest {
                    id: c["id"].as_str().unwrap_or_default().to_string(),
                    name: c["function"]["name"].as_str().unwrap_or_default().to_string(),
                    arguments: serde_json::from_str(raw).unwrap_or(Value::Null),
                }
            })
            .collect();
        return Ok(ModelReply::ToolCalls(requests));
    }
    Ok(ModelReply::Text(msg["content"].as_str().unwrap_or_default().to_string()))
}

/// Plays back canned replies in order; unavailable once they run out.
/// Records every request it receives.
#[derive(Default)]
pub struct ScriptedModel {
    replies: Mutex<VecDeque<ModelReply>>,
    seen: Mutex<Vec<Vec<ModelMessage>>>,
}

impl ScriptedModel {
    pub fn new(replies: impl IntoIterator<Item = ModelReply>) -> Self {
        ScriptedModel {
            replies: Mutex::new(replies.into_iter().collect()),
            seen: Mutex::new(Vec::new()),
        }
    }

    pub fn push(&self, reply: ModelReply) {
        self.replies.lock().unwrap().push_back(reply);
    }

    pub fn requests(&self) -> Vec<Vec<ModelMessage>> {
        self.seen.lock().unwrap().clone()
    }
}

#[async_trait]
impl ChatModel for ScriptedModel {
    async fn complete(&self, messages: &[ModelMessage], _tools: &[Value]) -> Result<ModelReply, ChatError> {
        self.seen.lock().unwrap().push(messages.to_vec());
        self.replies
            .lock()
            .unwrap()
            .pop_front()
            .ok_or_else(|| ChatError::Unavailable("script exhausted".into()))
    }
}

pub const MAX_TOOL_ROUNDS: usize = 4;

pub const WITHHELD: &str =
    "withheld: the high-efficiency program is shared only after the student has received two hints";

const REPLY_WITHHELD: &str = "I can't show the finished program yet. \
Try the step-by-step route first and look for repeated moves you could turn into a loop.";

/// What a session exposes to one chat exchange.
pub struct ChatContext<'a> {
    pub maze: &'a Maze,
    pub stage: u8,
    pub history: &'a [ChatTurn],
    pub vns: &'a VnsConfig,
    pub timebox: Duration,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Exchange {
    /// Tool turns in call order, then the assistant reply.
    pub turns: Vec<ChatTurn>,
    /// The reply was replaced because it held the withheld program.
    pub withheld: bool,
}

fn system_prompt(ctx: &ChatContext) -> String {
    format!(
        "You are MazeMate, a tutor for a block-based maze programming game. \
Answer in at most {MAX_SENTENCES} sentences and prefer guiding questions over answers. \
The student has received {} of 3 staged hints. \
Do not reveal a complete loop-based solution before the second hint. \
Use the tools for facts about the maze; never invent solutions.\n\nCurrent maze:\n{}",
        ctx.stage,
        serialize_maze(ctx.maze)
    )
}

/// Executes one tool locally. `solve_high` is gated on `stage`.
pub fn run_tool(tool: Tool, args: &Value, maze: &Maze, stage: u8, vns: &VnsConfig, timebox: Duration) -> String {
    let limits = Limits::within(timebox);
    let rendered = match tool {
        Tool::GetMazeState => return serialize_maze(maze),
        Tool::SolveLow => engine::solve(maze, SolveMode::Low, vns, &limits).map(|v| to_json(&v)),
        Tool::SolveHigh if stage < 2 => return WITHHELD.to_string(),
        Tool::SolveHigh => engine::solve(maze, SolveMode::High, vns, &limits).map(|v| match v {
            SolveView::High { program, block_count, .. } => {
                to_json(&json!({ "program": program, "block_count": block_count }))
            }
            low => to_json(&low),
        }),
        Tool::DesignCheck => {
            let req = serde_json::from_value::<DesignRequirements>(args.clone()).unwrap_or_default();
            engine::design_check(maze, &req, &limits).map(|r| to_json(&r))
        }
    };
    rendered.unwrap_or_else(|e| to_json(&e))
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("tool result serializes")
}

/// The program text that must not appear before stage 2, if any.
pub fn secret_program(maze: &Maze, vns: &VnsConfig, timebox: Duration) -> Option<String> {
    match engine::solve(maze, SolveMode::High, vns, &Limits::within(timebox)).ok()? {
        SolveView::High { program, .. } => Some(program),
        SolveView::Low { .. } => None,
    }
}

/// One student message through the model, with tool calls resolved
/// locally. Blocking engine work runs off the async executor.
pub async fn converse(model: &dyn ChatModel, ctx: &ChatContext<'_>, student_text: &str) -> Result<Exchange, ChatError> {
    let mut messages = vec![ModelMessage::new("system", system_prompt(ctx))];
    for turn in ctx.history {
        match turn.role {
            Role::Student => messages.push(ModelMessage::new("user", &turn.text)),
            Role::Assistant => messages.push(ModelMessage::new("assistant", &turn.text)),
            Role::Tool => {}
        }
    }
    messages.push(ModelMessage::new("user", student_text));
    let tools: Vec<Value> = Tool::ALL.iter().map(|t| t.declaration()).collect();

    let mut turns = Vec::new();
    for _ in 0..MAX_TOOL_ROUNDS {
        match model.complete(&messages, &tools).await? {
            ModelReply::Text(text) => {
                return Ok(finish(ctx, turns, text).await);
            }
            ModelReply::ToolCalls(calls) => {
                let mut asked = ModelMessage::new("assistant", "");
                asked.tool_calls = calls.clone();
                messages.push(asked);
                for call in calls {
                    let result = match Tool::from_name(&call.name) {
                        Some(tool) => {
                            let (maze, args, vns) = (ctx.maze.clone(), call.arguments.clone(), ctx.vns.clone());
                            let (stage, timebox) = (ctx.stage, ctx.timebox);
                            tokio::task::spawn_blocking(move || run_tool(tool, &args, &maze, stage, &vns, timebox))
                                .await
                                .unwrap_or_else(|e| format!("tool failed: {e}"))
                        }
                        None => format!("unknown tool {:?}", call.name),
                    };
                    turns.push(ChatTurn {
                        role: Role::Tool,
                        text: format!("{} result", call.name),
                        tool_call: Some(ToolCall {
                            name: call.name.clone(),
                            arguments: call.arguments.clone(),
                            result: result.clone(),
                        }),
                    });
                    let mut reply = ModelMessage::new("tool", result);
                    reply.tool_call_id = Some(call.id);
                    messages.push(reply);
                }
            }
        }
    }
    Ok(finish(ctx, turns, "I could not finish looking that up. Could you ask again in a simpler way?".into()).await)
}

async fn finish(ctx: &ChatContext<'_>, mut turns: Vec<ChatTurn>, text: String) -> Exchange {
    let mut text = truncate_sentences(text.trim(), MAX_SENTENCES);
    let mut withheld = false;
    if ctx.stage < 2 {
        let (maze, vns, timebox) = (ctx.maze.clone(), ctx.vns.clone(), ctx.timebox);
        let secret = tokio::task::spawn_blocking(move || secret_program(&maze, &vns, timebox))
            .await
            .ok()
            .flatten();
        if secret.is_some_and(|s| text.contains(&s)) {
            text = REPLY_WITHHELD.to_string();
            withheld = true;
        }
    }
    turns.push(ChatTurn::assistant(text));
    Exchange { turns, withheld }
}
