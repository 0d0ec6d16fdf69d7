mod common;

use common::{pipeline, FIG1};
use flowrank::frames::relation_to_json_rows;
use flowrank::mcp::{serve, McpError, ServerConfig, ServerHandle};
use flowrank::{execute, Relation};
use serde_json::{json, Value};

fn start() -> ServerHandle {
    let mut config = ServerConfig::new().with_port(0);
    config
        .register("bm25", pipeline("bm25"), "BM25 over TOY5")
        .unwrap()
        .register("rag", pipeline(FIG1), "Fused retrieval with extractive answers")
        .unwrap();
    serve(config).unwrap()
}

async fn post(client: &reqwest::Client, url: &str, body: &str) -> (u16, String) {
    let resp = client
        .post(url)
        .header("content-type", "application/json")
        .body(body.to_string())
        .send()
        .await
        .unwrap();
    (resp.status().as_u16(), resp.text().await.unwrap())
}

async fn rpc(client: &reqwest::Client, url: &str, body: Value) -> Value {
    let (status, text) = post(client, url, &body.to_string()).await;
    assert_eq!(status, 200);
    serde_json::from_str(&text).unwrap()
}

#[tokio::test(flavor = "multi_thread")]
async fn scripted_session() {
    let server = start();
    let url = server.url();
    let client = reqwest::Client::new();

    let init = rpc(
        &client,
        &url,
        json!({"jsonrpc":"2.0","id":1,"method":"initialize","params":{}}),
    )
    .await;
    assert_eq!(init["jsonrpc"], "2.0");
    assert_eq!(init["id"], 1);
    assert_eq!(init["result"]["protocolVersion"], "2025-03-26");
    assert_eq!(init["result"]["serverInfo"]["name"], "flowrank");

    let (status, body) = post(
        &client,
        &url,
        r#"{"jsonrpc":"2.0","method":"notifications/initialized"}"#,
    )
    .await;
    assert_eq!((status, body.as_str()), (202, ""));

    let list = rpc(&client, &url, json!({"jsonrpc":"2.0","id":"l","method":"tools/list"})).await;
    assert_eq!(list["id"], "l");
    let tools = list["result"]["tools"].as_array().unwrap();
    assert_eq!(tools.len(), 2);
    assert_eq!(tools[0]["name"], "bm25");
    let schema = &tools[0]["inputSchema"];
    assert_eq!(schema["required"], json!(["queries"]));
    assert_eq!(
        schema["properties"]["queries"]["items"]["required"],
        json!(["qid", "query"])
    );
    assert_eq!(
        tools[0]["outputColumns"],
        json!(["qid", "query", "docno", "rank", "score"])
    );
    assert_eq!(tools[1]["outputColumns"], json!(["qid", "qanswer"]));

    let call = rpc(
        &client,
        &url,
        json!({"jsonrpc":"2.0","id":2,"method":"tools/call","params":{
            "name":"bm25","arguments":{"queries":[{"qid":"q1","query":"quick fox"}]}}}),
    )
    .await;
    let local = execute(&pipeline("bm25"), &Relation::from_queries([("q1", "quick fox")])).unwrap();
    assert_eq!(call["result"]["isError"], false);
    assert_eq!(call["result"]["rows"], Value::Array(relation_to_json_rows(&local)));
    assert_eq!(call["result"]["content"][0]["type"], "text");

    let (status, text) = post(&client, &url, "not json").await;
    assert_eq!(status, 200);
    let parse: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(parse["error"]["code"], -32700);
    assert_eq!(parse["id"], Value::Null);

    let unknown = rpc(&client, &url, json!({"jsonrpc":"2.0","id":9,"method":"resources/list"})).await;
    assert_eq!(unknown["error"]["code"], -32601);
    assert_eq!(unknown["id"], 9);

    server.shutdown().unwrap();
}

#[tokio::test(flavor = "multi_thread")]
async fn concurrent_identical_calls_agree() {
    let server = start();
    let url = server.url();
    let client = reqwest::Client::new();
    let body = json!({"jsonrpc":"2.0","id":5,"method":"tools/call","params":{
        "name":"rag","arguments":{"queries":[{"qid":"q1","query":"quick fox"},{"qid":"q2","query":"lazy dog"}]}}})
    .to_string();
    let handles: Vec<_> = (0..8)
        .map(|_| {
            let (client, url, body) = (client.clone(), url.clone(), body.clone());
            tokio::spawn(async move { post(&client, &url, &body).await })
        })
        .collect();
    let mut replies = Vec::new();
    for h in handles {
        replies.push(h.await.unwrap());
    }
    assert!(replies.windows(2).all(|w| w[0] == w[1]));
    let first: Value = serde_json::from_str(&replies[0].1).unwrap();
    assert_eq!(first["result"]["rows"].as_array().unwrap().len(), 2);
    server.shutdown().unwrap();
}

#[test]
fn occupied_port_is_a_bind_error() {
    let taken = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
    let port = taken.local_addr().unwrap().port();
    let err = serve(ServerConfig::new().with_port(port)).err().unwrap();
    assert!(matches!(err, McpError::Bind { .. }));
}
