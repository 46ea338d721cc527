//! METIS graph files, terminal lists and assignment files.
//!
//! Files are 1-indexed, memory is 0-indexed.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::graph::{Graph, VertexId, Weight};

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

fn syntax(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax { line, message: message.into() }
}

fn read(path: &Path) -> Result<String, ParseError> {
    fs::read_to_string(path).map_err(|source| ParseError::Io { path: path.display().to_string(), source })
}

pub fn read_graph(path: impl AsRef<Path>) -> Result<Graph, ParseError> {
    parse_metis(&read(path.as_ref())?)
}

/// Parses METIS adjacency text. Header `n m [fmt [ncon]]`; the last digit of
/// `fmt` flags edge weights, the one before it vertex weights (skipped).
/// Every vertex has one line, possibly empty; `%` lines are comments.
pub fn parse_metis(text: &str) -> Result<Graph, ParseError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l)).filter(|(_, l)| !l.trim_start().starts_with('%'));

    let (header_line, header) =
        lines.by_ref().find(|(_, l)| !l.trim().is_empty()).ok_or_else(|| syntax(1, "missing header"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() < 2 || fields.len() > 4 {
        return Err(syntax(header_line, "header must be `n m [fmt [ncon]]`"));
    }
    let number = |s: &str, what: &str| -> Result<usize, ParseError> {
        s.parse().map_err(|_| syntax(header_line, format!("bad {what} `{s}`")))
    };
    let n = number(fields[0], "vertex count")?;
    let m = number(fields[1], "edge count")?;
    let fmt = fields.get(2).copied().unwrap_or("0");
    if fmt.len() > 3 || !fmt.chars().all(|c| c == '0' || c == '1') {
        return Err(syntax(header_line, format!("unsupported format `{fmt}`")));
    }
    let digits: Vec<bool> = fmt.chars().rev().map(|c| c == '1').collect();
    let edge_weights = digits.first().copied().unwrap_or(false);
    let vertex_weights = digits.get(1).copied().unwrap_or(false);
    if digits.get(2).copied().unwrap_or(false) {
        return Err(syntax(header_line, "vertex sizes are not supported"));
    }
    let ncon = match fields.get(3) {
        Some(s) => number(s, "constraint count")?,
        None => usize::from(vertex_weights),
    };

    let mut directed: HashMap<(VertexId, VertexId), (Weight, usize)> = HashMap::new();
    let mut last_line = header_line;
    let mut g = Graph::new(n);
    for u in 0..n {
        let (line, text) =
            lines.next().ok_or_else(|| syntax(last_line + 1, format!("expected {n} vertex lines, found {u}")))?;
        last_line = line;
        let mut tokens = text.split_whitespace();
        for _ in 0..if vertex_weights { ncon } else { 0 } {
            tokens.next().ok_or_else(|| syntax(line, "missing vertex weight"))?;
        }
        let values: Vec<&str> = tokens.collect();
        let stride = if edge_weights { 2 } else { 1 };
        if !values.len().is_multiple_of(stride) {
            return Err(syntax(line, "neighbour without weight"));
        }
        for chunk in values.chunks(stride) {
            let v: usize = chunk[0].parse().map_err(|_| syntax(line, format!("bad neighbour `{}`", chunk[0])))?;
            if v == 0 || v > n {
                return Err(syntax(line, format!("neighbour {v} out of range 1..={n}")));
            }
            let v = v - 1;
            if v == u {
                return Err(syntax(line, "self-loop"));
            }
            let w: Weight = if edge_weights {
                let w: i128 = chunk[1].parse().map_err(|_| syntax(line, format!("bad weight `{}`", chunk[1])))?;
                if w <= 0 {
                    return Err(syntax(line, format!("weight {w} is not positive")));
                }
                Weight::try_from(w).map_err(|_| syntax(line, format!("weight {w} too large")))?
            } else {
                1
            };
            if directed.insert((u, v), (w, line)).is_some() {
                return Err(syntax(line, format!("neighbour {} listed twice", v + 1)));
            }
        }
    }
    if let Some((line, text)) = lines.find(|(_, l)| !l.trim().is_empty()) {
        return Err(syntax(line, format!("unexpected content after {n} vertex lines: `{}`", text.trim())));
    }

    let mut keys: Vec<(VertexId, VertexId)> = directed.keys().copied().collect();
    keys.sort_unstable();
    for (u, v) in keys {
        let (w, line) = directed[&(u, v)];
        match directed.get(&(v, u)) {
            None => return Err(syntax(line, format!("edge {}-{} has no reverse entry", u + 1, v + 1))),
            Some(&(rw, _)) if rw != w => {
                return Err(syntax(line, format!("edge {}-{} has weights {w} and {rw}", u + 1, v + 1)))
            }
            Some(_) => {}
        }
        if u < v {
            g.add_edge(u, v, w).expect("validated edge");
        }
    }
    if g.num_edges() != m {
        return Err(syntax(header_line, format!("header says {m} edges, found {}", g.num_edges())));
    }
    Ok(g)
}

/// Edge-weighted METIS text of the live vertices, renumbered densely.
pub fn write_metis(g: &Graph) -> String {
    let live: Vec<VertexId> = g.vertices().collect();
    let mut index = vec![0; g.capacity()];
    for (i, &v) in live.iter().enumerate() {
        index[v] = i + 1;
    }
    let mut out = format!("{} {} 1\n", live.len(), g.num_edges());
    for &v in &live {
        let line: Vec<String> = g.neighbors(v).map(|(x, w)| format!("{} {w}", index[x])).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

/// Whitespace separated 1-indexed vertex ids; `%` and `#` start comments.
pub fn parse_terminals(text: &str) -> Result<Vec<VertexId>, ParseError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split(['%', '#']).next().unwrap_or("");
        for token in line.split_whitespace() {
            let v: usize = token.parse().map_err(|_| syntax(i + 1, format!("bad vertex id `{token}`")))?;
            if v == 0 {
                return Err(syntax(i + 1, "vertex ids start at 1"));
            }
            out.push(v - 1);
        }
    }
    Ok(out)
}

pub fn read_terminals(path: impl AsRef<Path>) -> Result<Vec<VertexId>, ParseError> {
    parse_terminals(&read(path.as_ref())?)
}

/// One `vertex block` line per vertex, both 1-indexed.
pub fn format_assignment(assignment: &[usize]) -> String {
    let mut out = String::with_capacity(assignment.len() * 8);
    for (v, b) in assignment.iter().enumerate() {
        writeln!(out, "{} {}", v + 1, b + 1).expect("writing to a string");
    }
    out
}

pub fn parse_assignment(text: &str) -> Result<Vec<usize>, ParseError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let nums: Vec<usize> = line
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| syntax(i + 1, format!("bad number `{t}`"))))
            .collect::<Result<_, _>>()?;
        match nums[..] {
            [v, b] if v == out.len() + 1 && b > 0 => out.push(b - 1),
            _ => return Err(syntax(i + 1, "expected `vertex block` in vertex order")),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::generate_random_graph;
    use proptest::prelude::*;

    #[test]
    fn weighted_triangle() {
        let g = parse_metis("% a triangle\n3 3 1\n2 1 3 3\n1 1 3 2\n1 3 2 2\n").unwrap();
        assert_eq!(g.num_edges(), 3);
        assert_eq!(g.total_weight(), 6);
        assert_eq!(g.weight(0, 2), Some(3));
    }

    #[test]
    fn unweighted_defaults_to_one() {
        let g = parse_metis("3 2\n2\n1 3\n2\n").unwrap();
        assert!(g.edges().iter().all(|e| e.weight == 1));
        let g = parse_metis("3 2 0\n2\n1 3\n2\n").unwrap();
        assert_eq!(g.total_weight(), 2);
    }

    #[test]
    fn isolated_vertices_have_empty_lines() {
        let g = parse_metis("3 1 001\n2 4\n1 4\n\n").unwrap();
        assert_eq!(g.num_vertices(), 3);
        assert_eq!(g.neighbor_count(2), 0);
    }

    #[test]
    fn vertex_weights_are_skipped() {
        let g = parse_metis("2 1 011\n7 2 5\n9 1 5\n").unwrap();
        assert_eq!(g.weight(0, 1), Some(5));
    }

    fn error_line(text: &str) -> usize {
        match parse_metis(text) {
            Err(ParseError::Syntax { line, .. }) => line,
            other => panic!("expected a syntax error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_files_with_line_numbers() {
        assert_eq!(error_line("2 1 1\n2 3\n1 4\n"), 2);
        assert_eq!(error_line("2 1 1\n2 0\n1 0\n"), 2);
        assert_eq!(error_line("3 1 1\n2 1\n\n\n"), 2);
        assert_eq!(error_line("3 2 1\n2 1\n1 1\n\n"), 1);
        assert_eq!(error_line("2 1\n1\n1\n"), 2);
        assert_eq!(error_line("2 1\n2\n"), 3);
        assert_eq!(error_line("2 1\n5\n1\n"), 2);
        assert_eq!(error_line("1 0\n\n1 2\n"), 3);
    }

    #[test]
    fn terminals_and_assignments() {
        assert_eq!(parse_terminals("1 4 % seeds\n# more\n8\n").unwrap(), vec![0, 3, 7]);
        assert!(parse_terminals("0").is_err());
        let text = format_assignment(&[0, 2, 1]);
        assert_eq!(text, "1 1\n2 3\n3 2\n");
        assert_eq!(parse_assignment(&text).unwrap(), vec![0, 2, 1]);
    }

    proptest! {
        #[test]
        fn write_then_parse_is_identity(n in 2usize..30, deg in 1.0f64..6.0, seed: u64) {
            let g = generate_random_graph(n, deg, 9, seed);
            let back = parse_metis(&write_metis(&g)).unwrap();
            prop_assert_eq!(back.num_vertices(), g.num_vertices());
            prop_assert_eq!(back.edges(), g.edges());
        }
    }
}
