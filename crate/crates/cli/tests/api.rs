use std::path::Path;
use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use bwqa_cli::server::{router, AppState, TOKEN_HEADER};
use bwqa_cli::{load_transducer, load_world};
use bwqa_core::session::ClockMode;
use futures::StreamExt;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

fn state() -> Arc<AppState> {
    let world = load_world(&Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data/worlds/logo-row.json")).unwrap();
    AppState::new(world, load_transducer(None).unwrap(), ClockMode::Simulated)
}

async fn call(state: &Arc<AppState>, method: &str, uri: &str, token: &str, body: Option<Value>) -> (StatusCode, Value) {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header(TOKEN_HEADER, token)
        .header("content-type", "application/json");
    let req = req.body(body.map_or(Body::empty(), |b| Body::from(b.to_string()))).unwrap();
    let resp = router(state.clone()).oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, serde_json::from_slice(&bytes).unwrap_or(Value::Null))
}

#[tokio::test]
async fn scene_lists_all_blocks() {
    let s = state();
    let (status, body) = call(&s, "GET", "/api/scene", "a", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["blocks"].as_array().unwrap().len(), 8);
    assert_eq!(body["blocks"][2]["name"], "Toyota");
    assert_eq!(body["side"], 0.15);
}

#[tokio::test]
async fn move_then_ask_answers_from_memory() {
    let s = state();
    let (status, body) = call(&s, "POST", "/api/move", "a", Some(json!({"block": "Toyota", "to": [0.08, -0.6, 0.225]}))).await;
    assert_eq!(status, StatusCode::OK, "{body}");
    assert_eq!(body["outcome"], "recorded");
    assert_eq!(body["tokens"], json!([1, 2]));
    let (status, body) = call(&s, "POST", "/api/ask", "a", Some(json!({"text": "Which block did I just move?"}))).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["answer"], "You moved the Toyota block.");
    assert_eq!(body["ulf"], "(you.pro ((past move.v) (the.d (|Toyota| block.n))))");
}

#[tokio::test]
async fn scene_at_token_shows_the_past() {
    let s = state();
    call(&s, "POST", "/api/move", "a", Some(json!({"block": "Toyota", "to": [0.08, -0.6, 0.225]}))).await;
    let (_, now) = call(&s, "GET", "/api/scene", "a", None).await;
    let (_, then) = call(&s, "GET", "/api/scene?at=1", "a", None).await;
    assert_eq!(now["blocks"][2]["position"], json!([0.08, -0.6, 0.225]));
    assert_eq!(then["blocks"][2]["position"], json!([-0.24, -0.6, 0.075]));
    let (status, body) = call(&s, "GET", "/api/scene?at=40", "a", None).await;
    assert_eq!(status, StatusCode::INTERNAL_SERVER_ERROR);
    assert!(body["error"]["message"].is_string());
}

#[tokio::test]
async fn sessions_are_isolated_by_token() {
    let s = state();
    call(&s, "POST", "/api/move", "a", Some(json!({"block": "Toyota", "to": [0.08, -0.6, 0.225]}))).await;
    let (_, a) = call(&s, "GET", "/api/history", "a", None).await;
    let (_, b) = call(&s, "GET", "/api/history", "b", None).await;
    assert_eq!(a.as_array().unwrap().len(), 2);
    assert_eq!(b.as_array().unwrap().len(), 1);
    assert_eq!(a[1]["kind"], "move");
}

#[tokio::test]
async fn bad_requests_get_structured_errors() {
    let s = state();
    let (status, body) = call(&s, "POST", "/api/move", "a", Some(json!({"block": "Nvidia", "to": [0.0, 0.0, 0.075]}))).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(body["error"]["code"], "unknown-block");
    let (status, body) = call(&s, "POST", "/api/move", "a", Some(json!({"block": "Toyota", "to": [9.0, 0.0, 0.075]}))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["error"]["code"], "out-of-bounds");
    let (status, body) = call(&s, "POST", "/api/ask", "a", Some(json!({"question": "hi"}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["error"]["code"], "bad-request");
    let (status, _) = call(&s, "GET", "/api/scene?at=minus", "a", None).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn gibberish_ask_is_a_clarification() {
    let s = state();
    let (status, body) = call(&s, "POST", "/api/ask", "a", Some(json!({"text": "qwzx plorp"}))).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["error"], "parse-failure");
    assert!(body["answer"].as_str().unwrap().starts_with("Sorry"));
}

#[tokio::test]
async fn events_stream_over_websocket() {
    let s = state();
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    let app = router(s.clone());
    tokio::spawn(async move { axum::serve(listener, app).await });
    let (mut ws, _) = tokio_tungstenite::connect_async(format!("ws://{addr}/api/events?token=w")).await.unwrap();
    call(&s, "POST", "/api/move", "w", Some(json!({"block": "Twitter", "to": [-0.4, -0.3, 0.075]}))).await;
    let msg = ws.next().await.unwrap().unwrap();
    let event: Value = serde_json::from_str(msg.to_text().unwrap()).unwrap();
    assert_eq!(event["kind"], "move");
    assert_eq!(event["block"], "Twitter");
    assert_eq!(event["seq"], 1);
}
