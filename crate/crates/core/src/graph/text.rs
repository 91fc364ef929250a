use std::fmt::Write as _;

use super::{BaseGraph, Edge, GraphError, Walk, WalkAssignment};

/// A parsed graph file: the base graph plus its (possibly trivial) walks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphFile {
    pub graph: BaseGraph,
    pub walks: WalkAssignment,
}

fn parse_err(line: usize, msg: impl Into<String>) -> GraphError {
    GraphError::Parse {
        line,
        msg: msg.into(),
    }
}

fn num(tok: Option<&str>, line: usize, what: &str) -> Result<usize, GraphError> {
    let tok = tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| parse_err(line, format!("invalid {what} `{tok}`")))
}

/// Parses the line-oriented format: `v <id>`, `e <id> <u> <v>`,
/// `walk <vertex> <edge-id>...`; `#` starts a comment line.
pub fn parse_graph(input: &str) -> Result<GraphFile, GraphError> {
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    let mut walk_lines: Vec<(usize, Walk)> = Vec::new();
    for (idx, raw) in input.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut toks = line.split_whitespace();
        match toks.next() {
            Some("v") => {
                vertices.push(num(toks.next(), line_no, "vertex id")?);
                no_trailing(toks, line_no)?;
            }
            Some("e") => {
                let id = num(toks.next(), line_no, "edge id")?;
                let u = num(toks.next(), line_no, "endpoint")?;
                let v = num(toks.next(), line_no, "endpoint")?;
                edges.push(Edge { id, u, v });
                no_trailing(toks, line_no)?;
            }
            Some("walk") => {
                let start = num(toks.next(), line_no, "walk start")?;
                let steps = toks
                    .map(|t| num(Some(t), line_no, "edge id"))
                    .collect::<Result<Vec<_>, _>>()?;
                walk_lines.push((line_no, Walk::new(start, steps)));
            }
            Some(other) => return Err(parse_err(line_no, format!("unknown record `{other}`"))),
            None => unreachable!(),
        }
    }
    let graph = BaseGraph::new(&vertices, &edges)?;
    let mut lists: Vec<Vec<Walk>> = vec![Vec::new(); graph.vertex_count()];
    for (line_no, w) in walk_lines {
        if w.start >= graph.vertex_count() {
            return Err(parse_err(line_no, format!("walk starts at unknown vertex {}", w.start)));
        }
        lists[w.start].push(w);
    }
    let walks = WalkAssignment::new(&graph, lists)?;
    Ok(GraphFile { graph, walks })
}

fn no_trailing<'a>(mut toks: impl Iterator<Item = &'a str>, line: usize) -> Result<(), GraphError> {
    match toks.next() {
        Some(t) => Err(parse_err(line, format!("unexpected trailing token `{t}`"))),
        None => Ok(()),
    }
}

/// Emits a graph (and optionally its walks) in the text format.
pub fn write_graph(g: &BaseGraph, walks: Option<&WalkAssignment>) -> String {
    let mut out = String::new();
    for v in 0..g.vertex_count() {
        writeln!(out, "v {v}").unwrap();
    }
    for e in g.edges() {
        writeln!(out, "e {} {} {}", e.id, e.u, e.v).unwrap();
    }
    if let Some(wa) = walks {
        for (_, list) in wa.iter() {
            for w in list {
                write!(out, "walk {}", w.start).unwrap();
                for s in &w.steps {
                    write!(out, " {s}").unwrap();
                }
                out.push('\n');
            }
        }
    }
    out
}
