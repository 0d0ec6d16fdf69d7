use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use flowrank::dsl::{builtin_registry, compile, render};
use flowrank::frames::{parse_topics, write_trec_run, write_tsv, ColumnSet};
use flowrank::index::{build_index, read_corpus_file, Index};
use flowrank::inspect::{self, validate};
use flowrank::mcp::{serve, ServerConfig, DEFAULT_PORT};
use flowrank::schematic::{build_schematic, render_html, render_text};
use flowrank::{execute, PipelineNode};

#[derive(Parser)]
#[command(name = "flowrank", version, about = "Build, check and serve retrieval pipelines")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build an index from a JSONL corpus of {"docno", "text"} records.
    Index {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a pipeline over a topics file and print the results.
    Search {
        #[arg(long)]
        index: PathBuf,
        /// Pipeline expression, or @file to read it from a file.
        #[arg(long)]
        pipeline: String,
        /// Tab-separated `qid<TAB>query` lines.
        #[arg(long)]
        topics: PathBuf,
        #[arg(long, default_value = "flowrank")]
        tag: String,
    },
    /// Check column flow without running anything.
    Validate {
        #[arg(long)]
        index: PathBuf,
        #[arg(long)]
        pipeline: String,
        #[arg(long, value_delimiter = ',', default_value = "qid,query")]
        input_columns: Vec<String>,
    },
    /// Print accepted inputs, outputs, subtransformers and attributes.
    Inspect {
        #[arg(long)]
        index: PathBuf,
        #[arg(long)]
        pipeline: String,
    },
    /// Draw the pipeline.
    Schematic {
        #[arg(long)]
        index: PathBuf,
        #[arg(long)]
        pipeline: String,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long, value_delimiter = ',', default_value = "qid,query")]
        input_columns: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Serve pipelines as MCP tools over HTTP.
    Serve {
        #[arg(long)]
        index: PathBuf,
        /// One or more `name=expression` pairs.
        #[arg(long, num_args = 1.., required = true)]
        pipelines: Vec<String>,
        #[arg(long)]
        port: Option<u16>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Html,
    Text,
}

fn read_expr(src: &str) -> Result<String> {
    match src.strip_prefix('@') {
        Some(path) => Ok(fs::read_to_string(path)
            .with_context(|| format!("cannot read pipeline file {path}"))?
            .trim()
            .to_string()),
        None => Ok(src.to_string()),
    }
}

fn load(index: &Path) -> Result<Arc<Index>> {
    let ix = Index::load(index).with_context(|| format!("cannot load index {}", index.display()))?;
    Ok(Arc::new(ix))
}

fn pipeline(index: &Arc<Index>, src: &str) -> Result<PipelineNode> {
    let expr = read_expr(src)?;
    Ok(compile(&expr, &builtin_registry(index.clone()))?)
}

fn column_set(names: &[String]) -> ColumnSet {
    names.iter().map(|s| s.trim()).filter(|s| !s.is_empty()).collect()
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("cannot write {}", path.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn describe(expr: &str, node: &PipelineNode) -> String {
    let leaves = inspect::subtransformers(node);
    match leaves.as_slice() {
        [(_, t)] => t.description().to_string(),
        _ => {
            let names: Vec<&str> = leaves.iter().map(|(_, t)| t.name()).collect();
            format!("Retrieval pipeline `{expr}` ({}).", names.join(", "))
        }
    }
}

/// Ok(false) means a domain failure that has already been reported.
fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Index { corpus, out } => {
            let docs = read_corpus_file(&corpus)?;
            let stats = build_index(docs, &out)?;
            println!(
                "indexed {} documents ({} tokens) into {}",
                stats.n_docs,
                stats.total_tokens,
                out.display()
            );
        }
        Command::Search {
            index,
            pipeline: src,
            topics,
            tag,
        } => {
            let index = load(&index)?;
            let node = pipeline(&index, &src)?;
            let text =
                fs::read_to_string(&topics).with_context(|| format!("cannot read topics {}", topics.display()))?;
            let queries = parse_topics(&text)?;
            let result = execute(&node, &queries)?;
            let columns = result.columns();
            let out = if ["qid", "docno", "rank", "score"].iter().all(|c| columns.contains(c)) {
                write_trec_run(&result, &tag)?
            } else {
                write_tsv(&result)
            };
            emit(None, &out)?;
        }
        Command::Validate {
            index,
            pipeline: src,
            input_columns,
        } => {
            let node = pipeline(&load(&index)?, &src)?;
            let diag = validate(&node, &column_set(&input_columns));
            if !diag.ok {
                eprintln!("{}", diag.message);
                return Ok(false);
            }
            println!("ok");
        }
        Command::Inspect { index, pipeline: src } => {
            let node = pipeline(&load(&index)?, &src)?;
            let mut out = format!("pipeline: {}\n", render(&node));
            match inspect::io_report(&node) {
                Ok(report) => {
                    out.push_str("accepted inputs:\n");
                    for a in &report.accepted_inputs {
                        out.push_str(&format!("  {a}\n"));
                    }
                    out.push_str("outputs:\n");
                    for (a, o) in &report.outputs_for {
                        out.push_str(&format!("  {a} -> {o}\n"));
                    }
                }
                Err(e) => out.push_str(&format!("not inspectable: {e}\n")),
            }
            out.push_str("subtransformers:\n");
            for (path, t) in inspect::subtransformers(&node) {
                let attrs: Vec<String> = inspect::attributes(t)
                    .into_iter()
                    .map(|(k, v)| format!("{k}={v}"))
                    .collect();
                out.push_str(format!("  {:<8} {:<12} {}\n", path.to_string(), t.name(), attrs.join(" ")).trim_end());
                out.push('\n');
            }
            emit(None, &out)?;
        }
        Command::Schematic {
            index,
            pipeline: src,
            format,
            input_columns,
            out,
        } => {
            let node = pipeline(&load(&index)?, &src)?;
            let graph = build_schematic(&node, &column_set(&input_columns))?;
            let text = match format {
                Format::Html => render_html(&graph),
                Format::Text => render_text(&graph),
            };
            emit(out.as_deref(), &text)?;
        }
        Command::Serve { index, pipelines, port } => {
            let index = load(&index)?;
            let mut config = ServerConfig::new().with_port(port.unwrap_or(DEFAULT_PORT));
            for spec in &pipelines {
                let Some((name, src)) = spec.split_once('=') else {
                    bail!("expected name=expression, got `{spec}`");
                };
                let expr = read_expr(src)?;
                let node = pipeline(&index, &expr)?;
                config.register(name.trim(), node.clone(), &describe(&expr, &node))?;
            }
            let handle = serve(config)?;
            eprintln!("serving {} tool(s) at {}", pipelines.len(), handle.url());
            handle.wait()?;
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
