mod common;

use std::sync::Arc;

use axum::http::{Method, StatusCode};
use common::{call, fixture, fixture_text, open_session, put_fixture};
use mazemate_core::{print_program, serialize_maze, solve_high};
use mazemate_gateway::chat::{ModelReply, ScriptedModel, ToolRequest, WITHHELD};
use mazemate_gateway::{router, AppState, Store};
use serde_json::json;

fn app() -> axum::Router {
    router(AppState::new(Store::memory()))
}

#[tokio::test]
async fn put_echoes_canonical_document() {
    let app = app();
    let shuffled = r#"{"goal":{"x":2,"y":0},"width":3,"height":1,"start":{"x":0,"y":0,"dir":"E"}}"#;
    let r = call(&app, Method::PUT, "/mazes/m1", shuffled).await;
    assert_eq!(r.status, StatusCode::OK);
    assert_eq!(r.body, fixture_text("trivial.json").trim_end());
    let g = call(&app, Method::GET, "/mazes/m1", "").await;
    assert_eq!(g.body, r.body);
}

#[tokio::test]
async fn error_bodies() {
    let app = app();
    let r = call(&app, Method::PUT, "/mazes/m1", "{not json").await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
    assert_eq!(r.json()["code"], "SYNTAX");

    let r = call(&app, Method::PUT, "/mazes/m1", r#"{"width":3,"height":1,"start":{"x":0,"y":0,"dir":"E"},"goal":{"x":5,"y":0}}"#).await;
    assert_eq!(r.status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(r.json()["code"], "SCHEMA");
    assert_eq!(r.json()["detail"]["field"], "goal");

    let r = call(&app, Method::GET, "/mazes/nope", "").await;
    assert_eq!(r.status, StatusCode::NOT_FOUND);
    assert_eq!(r.json()["code"], "NOT_FOUND");

    put_fixture(&app, "b", "blocked").await;
    let r = call(&app, Method::POST, "/mazes/b/solve?mode=low", "").await;
    assert_eq!(r.status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(r.json()["code"], "UNSOLVABLE");
    assert_eq!(r.json()["detail"]["reason"], "NoPath");

    let r = call(&app, Method::POST, "/mazes/b/solve?mode=fast", "").await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);

    put_fixture(&app, "t", "trivial").await;
    let r = call(&app, Method::POST, "/mazes/t/execute", "repeat 0 { move }").await;
    assert_eq!(r.json()["code"], "LIMIT");
    let r = call(&app, Method::POST, "/mazes/t/execute", "move(").await;
    assert_eq!(r.json()["code"], "SYNTAX");
}

#[tokio::test]
async fn solve_and_execute() {
    let app = app();
    put_fixture(&app, "bat", "bat_corridor").await;
    let low = call(&app, Method::POST, "/mazes/bat/solve?mode=low", "").await.json();
    assert_eq!(low["actions"], json!(["attack", "move", "move", "move"]));
    let high = call(&app, Method::POST, "/mazes/bat/solve?mode=high", "").await.json();
    assert_eq!(high["program"], print_program(&solve_high(&fixture("bat_corridor")).unwrap().program));

    let run = call(&app, Method::POST, "/mazes/bat/execute", fixture_text("bat_corridor.prog")).await.json();
    assert_eq!(run["outcome"], "Success");
    assert_eq!(run["final_state"]["health"], 80);
    assert_eq!(run["states"].as_array().unwrap().len(), 5);

    let v = call(&app, Method::POST, "/mazes/bat/validate", "").await.json();
    assert_eq!(v["valid"], true);
    assert_eq!(v["monsters"], 1);
}

#[tokio::test]
async fn design_check_endpoint() {
    let app = app();
    put_fixture(&app, "c", "classroom_8x8").await;
    let r = call(&app, Method::POST, "/mazes/c/design-check", "").await.json();
    assert_eq!(r["passed"], true);
    put_fixture(&app, "s", "small_3x3").await;
    let r = call(&app, Method::POST, "/mazes/s/design-check", "").await.json();
    assert_eq!(r["checks"][0]["detail"], "expected 8×8, found 3×3");
    let r = call(&app, Method::POST, "/mazes/s/design-check", r#"{"required_width":3,"required_height":3,"min_monsters":1,"min_asset_kinds":2}"#).await.json();
    assert_eq!(r["passed"], true, "{r}");
}

#[tokio::test]
async fn hint_stages_and_stale_session() {
    let app = app();
    put_fixture(&app, "m", "bat_corridor").await;
    let sid = open_session(&app, "m").await;
    let uri = format!("/sessions/{sid}/hint");
    let kinds: Vec<String> = futures_kinds(&app, &uri, 4).await;
    assert_eq!(
        kinds,
        ["low_efficiency_steps", "transformation_hints", "high_efficiency_program", "high_efficiency_program"]
    );

    put_fixture(&app, "m", "trivial").await;
    let r = call(&app, Method::POST, &uri, "").await;
    assert_eq!(r.status, StatusCode::CONFLICT);
    assert_eq!(r.json()["code"], "STALE_SESSION");

    let r = call(&app, Method::POST, "/sessions", r#"{"maze_id":"missing"}"#).await;
    assert_eq!(r.status, StatusCode::NOT_FOUND);
    let r = call(&app, Method::POST, "/sessions", r#"{"maze":"m"}"#).await;
    assert_eq!(r.json()["code"], "SCHEMA");
}

async fn futures_kinds(app: &axum::Router, uri: &str, n: usize) -> Vec<String> {
    let mut out = Vec::new();
    for _ in 0..n {
        let r = call(app, Method::POST, uri, "").await;
        assert_eq!(r.status, StatusCode::OK, "{}", r.body);
        out.push(r.json()["kind"].as_str().unwrap().to_string());
    }
    out
}

#[tokio::test]
async fn chat_without_model_falls_back() {
    let app = app();
    put_fixture(&app, "m", "bat_corridor").await;
    let sid = open_session(&app, "m").await;
    let r = call(&app, Method::POST, &format!("/sessions/{sid}/chat"), r#"{"text":"help"}"#).await;
    assert_eq!(r.status, StatusCode::OK);
    let v = r.json();
    assert_eq!(v["fallback"], true);
    assert_eq!(v["hint"]["stage"], 1);
    assert!(v["notice"].as_str().unwrap().contains("LLM_UNAVAILABLE"));
}

#[tokio::test]
async fn chat_tools_run_locally_and_gate() {
    let model = Arc::new(ScriptedModel::new([
        ModelReply::ToolCalls(vec![
            ToolRequest { id: "1".into(), name: "get_maze_state".into(), arguments: json!({}) },
            ToolRequest { id: "2".into(), name: "solve_high".into(), arguments: json!({}) },
        ]),
        ModelReply::Text("Look at the corridor. What repeats?".into()),
    ]));
    let app = router(AppState::new(Store::memory()).with_chat(model.clone()));
    put_fixture(&app, "q", "quiz_corridor").await;
    let sid = open_session(&app, "q").await;
    let v = call(&app, Method::POST, &format!("/sessions/{sid}/chat"), r#"{"text":"solve it for me"}"#).await.json();
    assert_eq!(v["fallback"], false);
    assert_eq!(v["tools"][0]["tool_call"]["result"], serialize_maze(&fixture("quiz_corridor")));
    assert_eq!(v["tools"][1]["tool_call"]["result"], WITHHELD);
    assert_eq!(v["reply"]["text"], "Look at the corridor. What repeats?");
    // the model saw the withheld notice, never the program
    let seen = model.requests();
    assert!(seen[1].iter().any(|m| m.content == WITHHELD));
}

#[tokio::test]
async fn chat_reply_scanned_for_program() {
    let m = fixture("quiz_corridor");
    let program = print_program(&solve_high(&m).unwrap().program);
    let model = Arc::new(ScriptedModel::new([ModelReply::Text(format!("Here you go:\n```\n{program}\n```"))]));
    let app = router(AppState::new(Store::memory()).with_chat(model));
    put_fixture(&app, "q", "quiz_corridor").await;
    let sid = open_session(&app, "q").await;
    let r = call(&app, Method::POST, &format!("/sessions/{sid}/chat"), r#"{"text":"answer?"}"#).await;
    let v = r.json();
    assert!(!v["reply"]["text"].as_str().unwrap().contains(&program));
    assert!(!r.body.contains(&serde_json::to_string(&program).unwrap()[1..program.len()]));
    assert!(v["notice"].is_string());
}

#[tokio::test]
async fn snapshot_survives_restart() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("snap.json");
    let sid = {
        let app = router(AppState::new(Store::open(&path).unwrap()));
        put_fixture(&app, "m", "bat_corridor").await;
        let sid = open_session(&app, "m").await;
        let r = call(&app, Method::POST, &format!("/sessions/{sid}/hint"), "").await;
        assert_eq!(r.json()["stage"], 1);
        sid
    };
    let app = router(AppState::new(Store::open(&path).unwrap()));
    let r = call(&app, Method::POST, &format!("/sessions/{sid}/hint"), "").await;
    assert_eq!(r.json()["stage"], 2);
    assert_eq!(r.json()["kind"], "transformation_hints");
}
