use super::{Chain, FrameBadge, SchematicGraph, Stage};

/// A rectangle of text; all lines padded to the same width.
struct Block {
    lines: Vec<String>,
    width: usize,
}

impl Block {
    fn line(s: String) -> Self {
        let width = s.chars().count();
        Block { lines: vec![s], width }
    }

    fn stack(parts: Vec<Vec<String>>) -> Self {
        let lines: Vec<String> = parts.into_iter().flatten().collect();
        let width = lines.iter().map(|l| l.chars().count()).max().unwrap_or(0);
        let lines = lines.into_iter().map(|l| pad(&l, width)).collect();
        Block { lines, width }
    }

    /// Side by side, separated by single spaces, top aligned.
    fn beside(blocks: Vec<Block>) -> Self {
        let height = blocks.iter().map(|b| b.lines.len()).max().unwrap_or(0);
        let lines = (0..height)
            .map(|row| {
                blocks
                    .iter()
                    .map(|b| b.lines.get(row).cloned().unwrap_or_else(|| " ".repeat(b.width)))
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect();
        Block::stack(vec![lines])
    }
}

fn pad(s: &str, width: usize) -> String {
    let n = s.chars().count();
    format!("{s}{}", " ".repeat(width.saturating_sub(n)))
}

fn badge(b: &FrameBadge) -> Block {
    Block::line(format!("--{}-->", b.abbr()))
}

fn chain_block(chain: &Chain) -> Block {
    let mut parts = Vec::new();
    for (stage, out) in &chain.steps {
        parts.push(stage_block(stage));
        parts.push(badge(out));
    }
    Block::beside(parts)
}

fn stage_block(stage: &Stage) -> Block {
    match stage {
        Stage::Box(b) => Block::line(format!("[{}]", b.name)),
        Stage::Fork(f) => {
            let lanes: Vec<Block> = f.lanes.iter().map(chain_block).collect();
            let inner = lanes.iter().map(|l| l.width).max().unwrap_or(0);
            let join = format!("}}={}=>", f.operator);
            let rest = format!("}}{}", " ".repeat(join.chars().count() - 1));
            let mut lines = Vec::new();
            for lane in &lanes {
                for l in &lane.lines {
                    let close = if lines.is_empty() { &join } else { &rest };
                    lines.push(format!("{{ {} {close}", pad(l, inner)));
                }
            }
            Block::stack(vec![lines])
        }
    }
}

/// Plain-text diagram, e.g. `--Q--> [bm25] --R-->`. Fork lanes are stacked
/// in braces and joined by `}=rrf=>` or `}=linear=>`.
pub fn render_text(g: &SchematicGraph) -> String {
    let block = Block::beside(vec![badge(&g.entry), chain_block(&g.chain)]);
    let mut out = String::new();
    for line in block.lines {
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}
