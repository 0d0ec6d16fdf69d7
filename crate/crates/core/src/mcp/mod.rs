//! Pipelines as remotely callable tools: a small MCP subset (`initialize`,
//! `tools/list`, `tools/call`) over JSON-RPC 2.0 on HTTP POST `/mcp`.

mod server;

pub use server::{serve, ServerHandle};

use std::net::{IpAddr, Ipv4Addr};

use serde_json::{json, Map, Value as Json};
use thiserror::Error;

use crate::algebra::{execute, PipelineNode};
use crate::cols;
use crate::frames::{relation_to_json_rows, write_tsv, Relation};
use crate::inspect::{self, ValidationDiagnostic};

pub const PROTOCOL_VERSION: &str = "2025-03-26";
pub const PORT_ENV: &str = "FLOWRANK_MCP_PORT";
pub const DEFAULT_PORT: u16 = 8765;

pub const PARSE_ERROR: i64 = -32700;
pub const INVALID_REQUEST: i64 = -32600;
pub const METHOD_NOT_FOUND: i64 = -32601;
pub const INVALID_PARAMS: i64 = -32602;

#[derive(Debug, Error)]
pub enum McpError {
    #[error("pipeline `{name}` cannot be served: {}", .diagnostic.message)]
    NotServable {
        name: String,
        diagnostic: Box<ValidationDiagnostic>,
    },
    #[error("tool `{0}` is registered twice")]
    DuplicateTool(String),
    #[error("cannot bind {addr}: {source}")]
    Bind { addr: String, source: std::io::Error },
    #[error("invalid {PORT_ENV} value `{0}`")]
    BadPortEnv(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ToolDescriptor {
    pub name: String,
    pub description: String,
    pub input_schema: Json,
    pub output_columns: Vec<String>,
}

impl ToolDescriptor {
    pub fn to_json(&self) -> Json {
        json!({
            "name": self.name,
            "description": self.description,
            "inputSchema": self.input_schema,
            "outputColumns": self.output_columns,
        })
    }
}

fn queries_schema() -> Json {
    json!({
        "type": "object",
        "properties": {
            "queries": {
                "type": "array",
                "description": "Queries to run, one object per query.",
                "items": {
                    "type": "object",
                    "properties": {
                        "qid": { "type": "string", "description": "Query identifier." },
                        "query": { "type": "string", "description": "Query text." }
                    },
                    "required": ["qid", "query"],
                    "additionalProperties": false
                }
            }
        },
        "required": ["queries"],
        "additionalProperties": false
    })
}

/// Describes a pipeline as a tool. Only pipelines that accept a plain query
/// frame `{qid, query}` can be served.
pub fn tool_descriptor(name: &str, node: &PipelineNode, description: &str) -> Result<ToolDescriptor, McpError> {
    let given = cols!["qid", "query"];
    let output = inspect::output_columns(node, &given).map_err(|e| McpError::NotServable {
        name: name.to_string(),
        diagnostic: match e {
            inspect::InspectError::NotSatisfied(d) => d,
            other => Box::new(ValidationDiagnostic {
                ok: false,
                failing_path: None,
                node: None,
                missing: Default::default(),
                available: given.clone(),
                message: other.to_string(),
            }),
        },
    })?;
    Ok(ToolDescriptor {
        name: name.to_string(),
        description: description.to_string(),
        input_schema: queries_schema(),
        output_columns: output.ordered().into_iter().map(String::from).collect(),
    })
}

#[derive(Debug, Clone)]
pub struct ServerConfig {
    pub host: IpAddr,
    pub port: u16,
    pub protocol_version: String,
    tools: Vec<(ToolDescriptor, PipelineNode)>,
}

impl Default for ServerConfig {
    fn default() -> Self {
        ServerConfig {
            host: IpAddr::V4(Ipv4Addr::LOCALHOST),
            port: DEFAULT_PORT,
            protocol_version: PROTOCOL_VERSION.to_string(),
            tools: Vec::new(),
        }
    }
}

impl ServerConfig {
    pub fn new() -> Self {
        ServerConfig::default()
    }

    pub fn with_port(mut self, port: u16) -> Self {
        self.port = port;
        self
    }

    pub fn register(&mut self, name: &str, node: PipelineNode, description: &str) -> Result<&mut Self, McpError> {
        if self.tools.iter().any(|(t, _)| t.name == name) {
            return Err(McpError::DuplicateTool(name.to_string()));
        }
        let descriptor = tool_descriptor(name, &node, description)?;
        self.tools.push((descriptor, node));
        Ok(self)
    }

    pub fn tools(&self) -> impl Iterator<Item = &ToolDescriptor> {
        self.tools.iter().map(|(t, _)| t)
    }

    /// The port after applying the environment override.
    pub fn effective_port(&self) -> Result<u16, McpError> {
        match std::env::var(PORT_ENV) {
            Ok(v) => v.trim().parse().map_err(|_| McpError::BadPortEnv(v)),
            Err(_) => Ok(self.port),
        }
    }
}

/// Request handling without any transport; each call is independent.
#[derive(Debug, Clone)]
pub struct McpService {
    protocol_version: String,
    tools: Vec<(ToolDescriptor, PipelineNode)>,
}

fn response(id: Json, result: Json) -> Json {
    json!({ "jsonrpc": "2.0", "id": id, "result": result })
}

fn error(id: Json, code: i64, message: impl Into<String>) -> Json {
    json!({ "jsonrpc": "2.0", "id": id, "error": { "code": code, "message": message.into() } })
}

fn call_result(text: String, rows: Vec<Json>, is_error: bool) -> Json {
    let mut out = Map::new();
    out.insert("content".into(), json!([{ "type": "text", "text": text }]));
    if !is_error {
        out.insert("rows".into(), Json::Array(rows));
    }
    out.insert("isError".into(), Json::Bool(is_error));
    Json::Object(out)
}

fn parse_queries(arguments: Option<&Json>) -> Result<Relation, String> {
    let queries = arguments
        .and_then(|a| a.get("queries"))
        .and_then(Json::as_array)
        .ok_or("arguments.queries must be an array")?;
    let mut pairs = Vec::with_capacity(queries.len());
    for (i, q) in queries.iter().enumerate() {
        let field = |name: &str| {
            q.get(name)
                .and_then(Json::as_str)
                .ok_or_else(|| format!("queries[{i}].{name} must be a string"))
        };
        pairs.push((field("qid")?.to_string(), field("query")?.to_string()));
    }
    Ok(Relation::from_queries(pairs))
}

impl McpService {
    pub fn new(config: &ServerConfig) -> Self {
        McpService {
            protocol_version: config.protocol_version.clone(),
            tools: config.tools.clone(),
        }
    }

    pub fn tool_list(&self) -> Json {
        json!({ "tools": self.tools.iter().map(|(t, _)| t.to_json()).collect::<Vec<_>>() })
    }

    /// Runs a tool in process, producing the `tools/call` result object.
    pub fn call_tool(&self, name: &str, arguments: Option<&Json>) -> Result<Json, (i64, String)> {
        let (_, node) = self
            .tools
            .iter()
            .find(|(t, _)| t.name == name)
            .ok_or_else(|| (INVALID_PARAMS, format!("unknown tool `{name}`")))?;
        let input = parse_queries(arguments).map_err(|m| (INVALID_PARAMS, m))?;
        Ok(match execute(node, &input) {
            Ok(rel) => call_result(write_tsv(&rel), relation_to_json_rows(&rel), false),
            Err(e) => call_result(e.to_string(), Vec::new(), true),
        })
    }

    /// Handles one request body. `None` means the request was a
    /// notification and gets no response.
    pub fn handle(&self, body: &[u8]) -> Option<Json> {
        let Ok(req) = serde_json::from_slice::<Json>(body) else {
            return Some(error(Json::Null, PARSE_ERROR, "parse error"));
        };
        let Some(obj) = req.as_object() else {
            return Some(error(Json::Null, INVALID_REQUEST, "request must be an object"));
        };
        let id = match obj.get("id") {
            None => None,
            Some(id @ (Json::Null | Json::String(_) | Json::Number(_))) => Some(id.clone()),
            Some(_) => return Some(error(Json::Null, INVALID_REQUEST, "invalid id")),
        };
        let reply_id = id.clone().unwrap_or(Json::Null);
        if obj.get("jsonrpc").and_then(Json::as_str) != Some("2.0") {
            return Some(error(reply_id, INVALID_REQUEST, "jsonrpc must be \"2.0\""));
        }
        let Some(method) = obj.get("method").and_then(Json::as_str) else {
            return Some(error(reply_id, INVALID_REQUEST, "method must be a string"));
        };
        let params = obj.get("params");
        if params.is_some_and(|p| !p.is_object() && !p.is_array()) {
            return Some(error(reply_id, INVALID_REQUEST, "params must be an object or array"));
        }
        // notifications never get a response
        let id = id?;

        Some(match method {
            "initialize" => response(
                id,
                json!({
                    "protocolVersion": self.protocol_version,
                    "capabilities": { "tools": { "listChanged": false } },
                    "serverInfo": { "name": "flowrank", "version": env!("CARGO_PKG_VERSION") }
                }),
            ),
            "ping" => response(id, json!({})),
            "tools/list" => response(id, self.tool_list()),
            "tools/call" => {
                let Some(name) = params.and_then(|p| p.get("name")).and_then(Json::as_str) else {
                    return Some(error(id, INVALID_PARAMS, "params.name must be a string"));
                };
                match self.call_tool(name, params.and_then(|p| p.get("arguments"))) {
                    Ok(result) => response(id, result),
                    Err((code, message)) => error(id, code, message),
                }
            }
            other => error(id, METHOD_NOT_FOUND, format!("method not found: {other}")),
        })
    }
}
