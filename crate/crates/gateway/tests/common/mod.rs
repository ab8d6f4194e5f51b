#![allow(dead_code)]

use std::path::PathBuf;

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use mazemate_core::{parse_maze, Maze};
use serde_json::Value;
use tower::ServiceExt;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

pub fn fixture_text(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap()
}

pub fn fixture(name: &str) -> Maze {
    parse_maze(&fixture_text(&format!("{name}.json"))).unwrap()
}

pub struct Reply {
    pub status: StatusCode,
    pub body: String,
}

impl Reply {
    pub fn json(&self) -> Value {
        serde_json::from_str(&self.body).unwrap_or_else(|e| panic!("{e}: {}", self.body))
    }
}

pub async fn call(app: &Router, method: Method, uri: &str, body: impl Into<String>) -> Reply {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(Body::from(body.into()))
        .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    Reply {
        status,
        body: String::from_utf8(bytes.to_vec()).unwrap(),
    }
}

pub async fn put_fixture(app: &Router, id: &str, name: &str) -> Reply {
    call(app, Method::PUT, &format!("/mazes/{id}"), fixture_text(&format!("{name}.json"))).await
}

pub async fn open_session(app: &Router, maze_id: &str) -> String {
    let r = call(app, Method::POST, "/sessions", format!(r#"{{"maze_id":"{maze_id}"}}"#)).await;
    assert_eq!(r.status, StatusCode::CREATED, "{}", r.body);
    r.json()["session_id"].as_str().unwrap().to_string()
}
