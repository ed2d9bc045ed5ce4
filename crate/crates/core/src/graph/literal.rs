//! Text format for graphs and extension pairs.
//!
//! ```text
//! # a cherry rooted at its leaves
//! n=3
//! 0 2
//! 1 2
//! roots=0,1
//! ```
//!
//! A pair file holds the base literal, a `---` line, the top literal, and a
//! `base=i,j,...` line giving the top vertex of each base vertex in order.

use super::{ExtensionPair, Graph, GraphBuilder};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphLiteral {
    pub graph: Graph,
    pub roots: Option<Vec<usize>>,
}

fn perr(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

fn parse_list(body: &str, line: usize, column: usize) -> Result<Vec<usize>> {
    if body.trim().is_empty() {
        return Ok(Vec::new());
    }
    body.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| perr(line, column, format!("expected a vertex index, found {:?}", t.trim())))
        })
        .collect()
}

/// Parses one graph literal. Line numbers in errors are offset by `first_line - 1`.
fn parse_section(lines: &[(usize, &str)]) -> Result<GraphLiteral> {
    let mut builder: Option<GraphBuilder> = None;
    let mut roots = None;
    for &(ln, raw) in lines {
        let text = raw.split('#').next().unwrap_or("");
        let trimmed = text.trim();
        if trimmed.is_empty() {
            continue;
        }
        let col = text.find(trimmed).unwrap_or(0) + 1;
        if let Some(rest) = trimmed.strip_prefix("n=") {
            if builder.is_some() {
                return Err(perr(ln, col, "vertex count given twice"));
            }
            let n = rest
                .trim()
                .parse::<usize>()
                .map_err(|_| perr(ln, col + 2, "expected a vertex count after n="))?;
            builder = Some(GraphBuilder::new(n));
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix("roots=") {
            roots = Some(parse_list(rest, ln, col + 6)?);
            continue;
        }
        if trimmed.starts_with("base=") {
            continue;
        }
        let b = builder
            .as_mut()
            .ok_or_else(|| perr(ln, col, "the first line must be n=<int>"))?;
        let parts: Vec<&str> = trimmed.split_whitespace().collect();
        if parts.len() != 2 {
            return Err(perr(ln, col, "expected an edge line \"u v\""));
        }
        let u = parts[0]
            .parse::<usize>()
            .map_err(|_| perr(ln, col, format!("bad vertex {:?}", parts[0])))?;
        let v = parts[1]
            .parse::<usize>()
            .map_err(|_| perr(ln, col, format!("bad vertex {:?}", parts[1])))?;
        b.add_edge(u, v).map_err(|e| perr(ln, col, e.to_string()))?;
    }
    let graph = builder
        .ok_or_else(|| perr(lines.first().map_or(1, |l| l.0), 1, "missing n=<int> line"))?
        .build();
    if let Some(r) = &roots {
        for &v in r {
            if v >= graph.n() {
                return Err(perr(0, 0, format!("root {v} out of range")));
            }
        }
    }
    Ok(GraphLiteral { graph, roots })
}

pub fn parse_graph_literal(text: &str) -> Result<GraphLiteral> {
    let lines: Vec<(usize, &str)> = text.lines().enumerate().map(|(i, l)| (i + 1, l)).collect();
    parse_section(&lines)
}

pub fn to_literal(g: &Graph, roots: Option<&[usize]>) -> String {
    let mut out = format!("n={}\n", g.n());
    for (u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    if let Some(r) = roots {
        let list: Vec<String> = r.iter().map(|v| v.to_string()).collect();
        out.push_str(&format!("roots={}\n", list.join(",")));
    }
    out
}

pub fn parse_pair_literal(text: &str) -> Result<ExtensionPair> {
    let lines: Vec<(usize, &str)> = text.lines().enumerate().map(|(i, l)| (i + 1, l)).collect();
    let split = lines
        .iter()
        .position(|(_, l)| l.trim() == "---")
        .ok_or_else(|| perr(1, 1, "pair file needs a --- line between the base and top graphs"))?;
    let base = parse_section(&lines[..split])?;
    let rest = &lines[split + 1..];
    let top_lines: Vec<(usize, &str)> = rest.iter().copied().filter(|(_, l)| l.trim() != "---").collect();
    let top = parse_section(&top_lines)?;
    let mut corr = None;
    for &(ln, l) in rest {
        let t = l.split('#').next().unwrap_or("").trim();
        if let Some(body) = t.strip_prefix("base=") {
            corr = Some(parse_list(body, ln, 6)?);
        }
    }
    let corr = corr.ok_or_else(|| perr(lines.len(), 1, "pair file needs a base=i,j,... line"))?;
    ExtensionPair::new(base.graph, top.graph, corr)
}

pub fn pair_to_literal(pair: &ExtensionPair) -> String {
    let list: Vec<String> = pair.base_vertices().iter().map(|v| v.to_string()).collect();
    format!(
        "{}---\n{}base={}\n",
        to_literal(pair.base(), None),
        to_literal(pair.top(), None),
        list.join(",")
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_with_comments_and_roots() {
        let lit = parse_graph_literal("# cherry\nn=3\n0 2  # edge\n1 2\nroots=0,1\n").unwrap();
        assert_eq!(lit.graph.edge_vec(), vec![(0, 2), (1, 2)]);
        assert_eq!(lit.roots, Some(vec![0, 1]));
    }

    #[test]
    fn reports_position() {
        match parse_graph_literal("n=3\n0 1\n0 x\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_graph_literal("0 1\n").is_err());
    }

    #[test]
    fn literal_round_trip() {
        let g = Graph::cycle(6);
        let back = parse_graph_literal(&to_literal(&g, Some(&[2, 4]))).unwrap();
        assert_eq!(back.graph, g);
        assert_eq!(back.roots, Some(vec![2, 4]));
    }

    #[test]
    fn pair_round_trip() {
        let top = Graph::from_edges(3, &[(0, 2), (1, 2)]).unwrap();
        let pair = ExtensionPair::rooted(top, vec![0, 1]).unwrap();
        let back = parse_pair_literal(&pair_to_literal(&pair)).unwrap();
        assert_eq!(back, pair);
    }
}
