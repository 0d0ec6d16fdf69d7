use std::fmt::Write;

use crate::algebra::NodePath;

use super::{Chain, FrameBadge, SchematicGraph, Stage};

const ROOT_STYLE: &str = "display:inline-flex;align-items:center;gap:4px;padding:8px;\
font-family:ui-monospace,Menlo,Consolas,monospace;font-size:13px;color:#1f2328;background:#ffffff";
const BOX_STYLE: &str = "padding:6px 10px;border:1px solid #57606a;border-radius:4px;background:#f6f8fa;cursor:default";
const FUSION_STYLE: &str =
    "padding:6px 10px;border:1px solid #8250df;border-radius:14px;background:#fbefff;cursor:default";
const LANES_STYLE: &str = "display:flex;flex-direction:column;gap:6px;padding:4px 6px;\
border-left:2px solid #8250df;border-right:2px solid #8250df";
const LANE_STYLE: &str = "display:flex;align-items:center;gap:4px";
const FORK_STYLE: &str = "display:flex;align-items:center;gap:4px";

fn badge_style(abbr: &str) -> &'static str {
    match abbr.trim_end_matches('+') {
        "Q" => "padding:1px 5px;border-radius:8px;font-size:11px;background:#ddf4ff;color:#0969da;cursor:default",
        "D" => "padding:1px 5px;border-radius:8px;font-size:11px;background:#dafbe1;color:#1a7f37;cursor:default",
        "R" => "padding:1px 5px;border-radius:8px;font-size:11px;background:#fff8c5;color:#9a6700;cursor:default",
        "A" => "padding:1px 5px;border-radius:8px;font-size:11px;background:#ffebe9;color:#cf222e;cursor:default",
        _ => "padding:1px 5px;border-radius:8px;font-size:11px;background:#eaeef2;color:#57606a;cursor:default",
    }
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            '\n' => out.push_str("&#10;"),
            c => out.push(c),
        }
    }
    out
}

fn element_id(prefix: &str, path: &NodePath) -> String {
    format!("{prefix}-{}", path.dotted().replace('.', "-"))
}

fn badge(out: &mut String, b: &FrameBadge, indent: usize) {
    let abbr = b.abbr();
    let _ = writeln!(
        out,
        "{:indent$}<span class=\"badge\" data-frame=\"{abbr}\" title=\"{}\" style=\"{}\">&#8594; {abbr} &#8594;</span>",
        "",
        escape(&format!("{}: {}", abbr, b.columns)),
        badge_style(&abbr),
    );
}

fn chain(out: &mut String, c: &Chain, indent: usize) {
    for (stage, b) in &c.steps {
        match stage {
            Stage::Box(bx) => {
                let _ = writeln!(
                    out,
                    "{:indent$}<div class=\"box\" id=\"{}\" data-path=\"{}\" title=\"{}\" style=\"{BOX_STYLE}\">{}</div>",
                    "",
                    element_id("node", &bx.path),
                    bx.path.dotted(),
                    escape(&bx.tooltip),
                    escape(&bx.name),
                );
            }
            Stage::Fork(f) => {
                let _ = writeln!(
                    out,
                    "{:indent$}<div class=\"fork\" id=\"{}\" style=\"{FORK_STYLE}\">",
                    "",
                    element_id("fork", &f.path)
                );
                let _ = writeln!(
                    out,
                    "{:w$}<div class=\"lanes\" style=\"{LANES_STYLE}\">",
                    "",
                    w = indent + 2
                );
                for lane in &f.lanes {
                    let _ = writeln!(
                        out,
                        "{:w$}<div class=\"lane\" style=\"{LANE_STYLE}\">",
                        "",
                        w = indent + 4
                    );
                    chain(out, lane, indent + 6);
                    let _ = writeln!(out, "{:w$}</div>", "", w = indent + 4);
                }
                let _ = writeln!(out, "{:w$}</div>", "", w = indent + 2);
                let _ = writeln!(
                    out,
                    "{:w$}<div class=\"fusion\" id=\"{}\" data-fusion-path=\"{}\" title=\"{}\" style=\"{FUSION_STYLE}\">{}</div>",
                    "",
                    element_id("fusion", &f.path),
                    f.path.dotted(),
                    escape(&f.tooltip),
                    escape(&f.operator),
                    w = indent + 2,
                );
                let _ = writeln!(out, "{:indent$}</div>", "");
            }
        }
        badge(out, b, indent);
    }
}

/// Self-contained HTML fragment: inline styles only, details on hover via
/// `title` attributes.
pub fn render_html(g: &SchematicGraph) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<div class=\"schematic\" data-schematic-version=\"1\" style=\"{ROOT_STYLE}\">"
    );
    badge(&mut out, &g.entry, 2);
    chain(&mut out, &g.chain, 2);
    out.push_str("</div>\n");
    out
}
