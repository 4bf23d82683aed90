use std::collections::HashMap;
use std::fs;
use std::path::Path;

use crate::cut;
use crate::error::{Error, Result};
use crate::graph::{Graph, Partition, SbmParams};

/// A parsed edge list. Integer ids are used as node indices directly; any
/// quoted or non-numeric id switches to names, numbered by first appearance.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeList {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    pub names: Option<Vec<String>>,
}

impl EdgeList {
    pub fn graph(&self) -> Result<Graph> {
        Graph::from_edges(self.n, self.edges.iter().copied())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledGraph {
    pub graph: Graph,
    pub labels: Partition,
    pub node_names: Option<Vec<String>>,
}

impl LabeledGraph {
    pub fn estimate_params(&self) -> Result<SbmParams> {
        cut::estimate_params(&self.graph, &self.labels)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Bare(String),
    Quoted(String),
}

fn tokenize(line: &str, path: &Path, lineno: usize) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let mut chars = line.char_indices().peekable();
    while let Some(&(start, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c == '"' {
            chars.next();
            let mut text = String::new();
            let mut closed = false;
            for (_, c) in chars.by_ref() {
                if c == '"' {
                    closed = true;
                    break;
                }
                text.push(c);
            }
            if !closed {
                return Err(parse_error(path, lineno, "unterminated quote"));
            }
            out.push(Token::Quoted(text));
        } else {
            let mut end = line.len();
            while let Some(&(i, c)) = chars.peek() {
                if c.is_whitespace() {
                    end = i;
                    break;
                }
                chars.next();
            }
            out.push(Token::Bare(line[start..end].to_string()));
        }
    }
    Ok(out)
}

fn parse_error(path: &Path, line: usize, reason: impl Into<String>) -> Error {
    Error::Parse { path: path.to_path_buf(), line, reason: reason.into() }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

/// Non-empty, non-comment lines as (1-based line number, tokens).
fn records(text: &str, path: &Path) -> Result<Vec<(usize, Vec<Token>)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let tokens = tokenize(line, path, i + 1)?;
        if tokens.len() != 2 {
            return Err(parse_error(path, i + 1, format!("expected 2 fields, found {}", tokens.len())));
        }
        out.push((i + 1, tokens));
    }
    Ok(out)
}

fn as_index(token: &Token) -> Option<usize> {
    match token {
        Token::Bare(s) => s.parse().ok(),
        Token::Quoted(_) => None,
    }
}

fn token_text(token: &Token) -> &str {
    match token {
        Token::Bare(s) | Token::Quoted(s) => s,
    }
}

/// Parses whitespace-separated `u v` pairs; `#` starts a comment line.
/// Duplicates and self-loops are dropped when the graph is built.
pub fn parse_edge_list(text: &str, path: &Path) -> Result<EdgeList> {
    let recs = records(text, path)?;
    let integer = recs.iter().all(|(_, t)| t.iter().all(|tok| as_index(tok).is_some()));
    if integer {
        let edges: Vec<(usize, usize)> =
            recs.iter().map(|(_, t)| (as_index(&t[0]).unwrap(), as_index(&t[1]).unwrap())).collect();
        let n = edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0);
        return Ok(EdgeList { n, edges, names: None });
    }
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut names = Vec::new();
    let mut id = |name: &str| {
        *index.entry(name.to_string()).or_insert_with(|| {
            names.push(name.to_string());
            names.len() - 1
        })
    };
    let edges = recs.iter().map(|(_, t)| (id(token_text(&t[0])), id(token_text(&t[1])))).collect();
    Ok(EdgeList { n: names.len(), edges, names: Some(names) })
}

pub fn load_edge_list(path: &Path) -> Result<EdgeList> {
    parse_edge_list(&read(path)?, path)
}

fn parse_label(token: &Token) -> Option<i8> {
    match token_text(token) {
        "1" | "+1" => Some(1),
        "-1" | "0" => Some(-1),
        _ => None,
    }
}

/// Attaches `node label` lines to an edge list. Labels are `+1`, `-1`, `1`
/// or `0`, with `0` read as `-1`. With integer ids, a labelled node beyond the
/// largest edge endpoint is added as an isolated node. Every node must end
/// up labelled.
pub fn parse_labels(edges: &EdgeList, text: &str, path: &Path) -> Result<LabeledGraph> {
    let recs = records(text, path)?;
    let mut assigned: Vec<(usize, i8)> = Vec::with_capacity(recs.len());
    let mut n = edges.n;
    let lookup: Option<HashMap<&str, usize>> =
        edges.names.as_ref().map(|names| names.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect());
    for (line, tokens) in &recs {
        let label = parse_label(&tokens[1])
            .ok_or_else(|| parse_error(path, *line, format!("non-binary label {:?}", token_text(&tokens[1]))))?;
        let node = match &lookup {
            None => {
                let node = as_index(&tokens[0])
                    .ok_or_else(|| parse_error(path, *line, format!("unknown node {:?}", token_text(&tokens[0]))))?;
                n = n.max(node + 1);
                node
            }
            Some(map) => *map
                .get(token_text(&tokens[0]))
                .ok_or_else(|| parse_error(path, *line, format!("unknown node {:?}", token_text(&tokens[0]))))?,
        };
        assigned.push((node, label));
    }
    let mut labels = vec![0i8; n];
    for (node, label) in assigned {
        labels[node] = label;
    }
    if let Some(missing) = labels.iter().position(|&l| l == 0) {
        return Err(parse_error(path, 0, format!("node {missing} has no label")));
    }
    let graph = Graph::from_edges(n, edges.edges.iter().copied())?;
    Ok(LabeledGraph { graph, labels: Partition::new(labels)?, node_names: edges.names.clone() })
}

pub fn load_labels(edges: &EdgeList, path: &Path) -> Result<LabeledGraph> {
    parse_labels(edges, &read(path)?, path)
}

pub fn load_labeled_graph(edges_path: &Path, labels_path: &Path) -> Result<LabeledGraph> {
    load_labels(&load_edge_list(edges_path)?, labels_path)
}

/// One `u v` line per edge, preceded by a comment recording the node count.
pub fn format_edge_list(g: &Graph) -> String {
    let mut out = format!("# nodes {}\n", g.n());
    for (u, v) in g.edge_iter() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

/// One `node label` line per node, labels written as `+1` / `-1`.
pub fn format_labels(x: &Partition) -> String {
    let mut out = String::new();
    for (i, &l) in x.labels().iter().enumerate() {
        out.push_str(&format!("{i} {}\n", if l > 0 { "+1" } else { "-1" }));
    }
    out
}

/// Induced subgraph on the largest connected component (lowest node wins
/// ties), re-indexed in increasing node order.
pub fn largest_connected_component(g: &LabeledGraph) -> Result<LabeledGraph> {
    if g.graph.n() == 0 {
        return Err(Error::EmptyGraph);
    }
    let components = g.graph.components();
    let largest = components
        .iter()
        .reduce(|best, c| if c.len() > best.len() { c } else { best })
        .expect("non-empty graph has a component");
    let labels = Partition::new(largest.iter().map(|&i| g.labels.label(i)).collect())?;
    Ok(LabeledGraph {
        graph: g.graph.induced(largest),
        labels,
        node_names: g.node_names.as_ref().map(|names| largest.iter().map(|&i| names[i].clone()).collect()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::PathBuf;

    fn here() -> PathBuf {
        PathBuf::from("<memory>")
    }

    #[test]
    fn path_graph() {
        let e = parse_edge_list("0 1\n1 2\n", &here()).unwrap();
        let g = e.graph().unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn comments_duplicates_and_loops() {
        let e = parse_edge_list("# header\n0 1\n1 0\n\n2 2\n0 1\n", &here()).unwrap();
        let g = e.graph().unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.n(), 3);
    }

    #[test]
    fn named_nodes() {
        let e = parse_edge_list("\"blog a\" b\nb 3\n", &here()).unwrap();
        assert_eq!(e.names.as_deref().unwrap(), ["blog a", "b", "3"]);
        assert_eq!(e.edges, vec![(0, 1), (1, 2)]);
        let lg = parse_labels(&e, "\"blog a\" 1\nb 0\n3 -1\n", &here()).unwrap();
        assert_eq!(lg.labels.labels(), &[1, -1, -1]);
        assert!(parse_labels(&e, "zzz 1\n", &here()).is_err());
    }

    #[test]
    fn label_errors() {
        let e = parse_edge_list("0 1\n", &here()).unwrap();
        assert!(parse_labels(&e, "0 1\n1 2\n", &here()).is_err());
        assert!(parse_labels(&e, "0 1\n", &here()).is_err());
        assert!(parse_edge_list("0 1 2\n", &here()).is_err());
        assert!(parse_edge_list("\"open 1\n", &here()).is_err());
    }

    #[test]
    fn labels_extend_isolated_nodes() {
        let e = parse_edge_list("0 1\n", &here()).unwrap();
        let lg = parse_labels(&e, "0 +1\n1 -1\n2 1\n", &here()).unwrap();
        assert_eq!(lg.graph.n(), 3);
        assert_eq!(lg.graph.degree(2), 0);
    }

    #[test]
    fn formatted_files_parse_back() {
        let g = Graph::from_edges(4, [(0, 1), (2, 3), (1, 3)]).unwrap();
        let x = Partition::new(vec![1, -1, 1, -1]).unwrap();
        let e = parse_edge_list(&format_edge_list(&g), &here()).unwrap();
        let lg = parse_labels(&e, &format_labels(&x), &here()).unwrap();
        assert_eq!(lg.graph, g);
        assert_eq!(lg.labels, x);
    }

    #[test]
    fn lcc_picks_largest() {
        let e = parse_edge_list("0 1\n1 2\n3 4\n", &here()).unwrap();
        let lg = parse_labels(&e, "0 1\n1 0\n2 1\n3 1\n4 0\n", &here()).unwrap();
        let lcc = largest_connected_component(&lg).unwrap();
        assert_eq!(lcc.graph.n(), 3);
        assert_eq!(lcc.labels.labels(), &[1, -1, 1]);
        let again = largest_connected_component(&lcc).unwrap();
        assert_eq!(again, lcc);
        let empty = LabeledGraph { graph: Graph::empty(0), labels: Partition::new(vec![]).unwrap(), node_names: None };
        assert!(matches!(largest_connected_component(&empty), Err(Error::EmptyGraph)));
    }
}
