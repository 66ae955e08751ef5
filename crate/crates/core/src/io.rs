//! Text formats. Files use 1-based node ids; the library uses 0-based ids.
//!
//! * Hypergraph: `n m`, then `m` lines of node ids with an optional trailing
//!   `w=<float>` weight. Weighted graphs use the same format with two nodes
//!   per line.
//! * Bipartite: `n1 n2 m`, then `m` lines `i j`, each 1-based on its side.
//! * Clustering: one `node_id cluster_id` line per node (cluster ids 0-based).
//! * Labels: one `node_id label` line per node, labels are arbitrary tokens.
//!
//! Blank lines and lines starting with `#` or `%` are ignored on input.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use crate::error::{ParaccError, Result};
use crate::eval::format_g9;
use crate::graph::{BipartiteGraph, Clustering, Hypergraph, PairMatrix, WeightedGraph};

struct Lines<R> {
    inner: std::io::Lines<R>,
    line: usize,
}

impl<R: BufRead> Lines<R> {
    fn new(r: R) -> Self {
        Self {
            inner: r.lines(),
            line: 0,
        }
    }

    /// Next non-comment, non-blank line with its 1-based line number.
    fn next_content(&mut self) -> Result<Option<(usize, String)>> {
        for l in self.inner.by_ref() {
            self.line += 1;
            let l = l?;
            let t = l.trim();
            if t.is_empty() || t.starts_with('#') || t.starts_with('%') {
                continue;
            }
            return Ok(Some((self.line, t.to_string())));
        }
        Ok(None)
    }

    fn expect(&mut self, what: &str) -> Result<(usize, String)> {
        self.next_content()?.ok_or_else(|| ParaccError::Parse {
            line: self.line + 1,
            msg: format!("unexpected end of input, expected {what}"),
        })
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> ParaccError {
    ParaccError::Parse { line, msg: msg.into() }
}

fn parse_usize(tok: &str, line: usize) -> Result<usize> {
    tok.parse().map_err(|_| parse_err(line, format!("expected a nonnegative integer, got `{tok}`")))
}

fn parse_node(tok: &str, n: usize, line: usize) -> Result<usize> {
    let v = parse_usize(tok, line)?;
    if v == 0 || v > n {
        return Err(parse_err(line, format!("node id {v} outside 1..={n}")));
    }
    Ok(v - 1)
}

fn header<const K: usize>(lines: &mut Lines<impl BufRead>) -> Result<[usize; K]> {
    let (line, text) = lines.expect("header")?;
    let toks: Vec<&str> = text.split_whitespace().collect();
    if toks.len() != K {
        return Err(parse_err(line, format!("header needs {K} integers")));
    }
    let mut out = [0; K];
    for (slot, tok) in out.iter_mut().zip(toks) {
        *slot = parse_usize(tok, line)?;
    }
    Ok(out)
}

fn read_edge_lines(r: impl BufRead) -> Result<(usize, Vec<(Vec<usize>, f64, usize)>)> {
    let mut lines = Lines::new(r);
    let [n, m] = header::<2>(&mut lines)?;
    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        let (line, text) = lines.expect("hyperedge line")?;
        let mut nodes = Vec::new();
        let mut weight = 1.0;
        let mut toks = text.split_whitespace().peekable();
        while let Some(tok) = toks.next() {
            if let Some(w) = tok.strip_prefix("w=") {
                if toks.peek().is_some() {
                    return Err(parse_err(line, "weight must be the last token"));
                }
                weight = w
                    .parse()
                    .ok()
                    .filter(|w: &f64| *w > 0.0 && w.is_finite())
                    .ok_or_else(|| parse_err(line, format!("bad weight `{w}`")))?;
            } else {
                nodes.push(parse_node(tok, n, line)?);
            }
        }
        if nodes.is_empty() {
            return Err(parse_err(line, "hyperedge has no nodes"));
        }
        edges.push((nodes, weight, line));
    }
    if let Some((line, _)) = lines.next_content()? {
        return Err(parse_err(line, format!("more than {m} edge lines")));
    }
    Ok((n, edges))
}

pub fn read_hypergraph(r: impl BufRead) -> Result<Hypergraph> {
    let (n, edges) = read_edge_lines(r)?;
    Hypergraph::with_edge_weights(n, edges.into_iter().map(|(e, w, _)| (e, w)).collect())
}

/// Graph in hypergraph format; every line must hold exactly two distinct nodes.
pub fn read_weighted_graph(r: impl BufRead) -> Result<WeightedGraph> {
    let (n, edges) = read_edge_lines(r)?;
    let mut pairs = Vec::with_capacity(edges.len());
    for (e, w, line) in edges {
        if e.len() != 2 || e[0] == e[1] {
            return Err(parse_err(line, "graph edges need two distinct nodes"));
        }
        pairs.push((e[0], e[1], w));
    }
    WeightedGraph::new(n, pairs)
}

fn weight_suffix(w: f64) -> String {
    if w == 1.0 {
        String::new()
    } else {
        format!(" w={}", format_g9(w))
    }
}

pub fn write_hypergraph(h: &Hypergraph, mut w: impl Write) -> Result<()> {
    writeln!(w, "{} {}", h.n(), h.num_edges())?;
    for e in h.edges() {
        let ids: Vec<String> = e.nodes().iter().map(|v| (v + 1).to_string()).collect();
        writeln!(w, "{}{}", ids.join(" "), weight_suffix(e.weight()))?;
    }
    Ok(())
}

pub fn write_weighted_graph(g: &WeightedGraph, mut w: impl Write) -> Result<()> {
    writeln!(w, "{} {}", g.n(), g.edges().len())?;
    for &(i, j, wt) in g.edges() {
        writeln!(w, "{} {}{}", i + 1, j + 1, weight_suffix(wt))?;
    }
    Ok(())
}

pub fn read_bipartite(r: impl BufRead) -> Result<BipartiteGraph> {
    let mut lines = Lines::new(r);
    let [n1, n2, m] = header::<3>(&mut lines)?;
    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        let (line, text) = lines.expect("edge line")?;
        let toks: Vec<&str> = text.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(parse_err(line, "edge line needs `i j`"));
        }
        edges.push((parse_node(toks[0], n1, line)?, parse_node(toks[1], n2, line)?));
    }
    if let Some((line, _)) = lines.next_content()? {
        return Err(parse_err(line, format!("more than {m} edge lines")));
    }
    BipartiteGraph::new(n1, n2, edges)
}

pub fn write_bipartite(g: &BipartiteGraph, mut w: impl Write) -> Result<()> {
    writeln!(w, "{} {} {}", g.n1(), g.n2(), g.num_edges())?;
    for &(i, j) in g.edges() {
        writeln!(w, "{} {}", i + 1, j + 1)?;
    }
    Ok(())
}

pub fn write_clustering(c: &Clustering, mut w: impl Write) -> Result<()> {
    for (v, &k) in c.assignment().iter().enumerate() {
        writeln!(w, "{} {}", v + 1, k)?;
    }
    Ok(())
}

/// `node_id token` lines covering nodes `1..=n` exactly once. Tokens are
/// mapped to clusters in order of first appearance by node id.
fn read_node_tokens(r: impl BufRead, n: usize) -> Result<Vec<String>> {
    let mut lines = Lines::new(r);
    let mut tokens: Vec<Option<String>> = vec![None; n];
    while let Some((line, text)) = lines.next_content()? {
        let toks: Vec<&str> = text.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(parse_err(line, "expected `node_id label`"));
        }
        let v = parse_node(toks[0], n, line)?;
        if tokens[v].is_some() {
            return Err(parse_err(line, format!("node {} listed twice", v + 1)));
        }
        tokens[v] = Some(toks[1].to_string());
    }
    tokens
        .into_iter()
        .enumerate()
        .map(|(v, t)| {
            t.ok_or_else(|| ParaccError::Parse {
                line: lines.line,
                msg: format!("node {} has no label", v + 1),
            })
        })
        .collect()
}

pub fn read_labels(r: impl BufRead, n: usize) -> Result<Clustering> {
    let tokens = read_node_tokens(r, n)?;
    let mut ids: HashMap<String, usize> = HashMap::new();
    Ok(Clustering::new(tokens.into_iter().map(|t| {
        let next = ids.len();
        *ids.entry(t).or_insert(next)
    })))
}

pub fn read_clustering(r: impl BufRead, n: usize) -> Result<Clustering> {
    read_labels(r, n)
}

/// Whitespace-separated 1-based node ids.
pub fn read_node_set(r: impl BufRead, n: usize) -> Result<Vec<usize>> {
    let mut lines = Lines::new(r);
    let mut out = Vec::new();
    while let Some((line, text)) = lines.next_content()? {
        for tok in text.split_whitespace() {
            out.push(parse_node(tok, n, line)?);
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// Strictly lower triangle of `x`: line `i` (for `i >= 1`) lists
/// `x[i][0] .. x[i][i-1]`.
pub fn write_triangular(x: &PairMatrix, mut w: impl Write) -> Result<()> {
    writeln!(w, "{}", x.n())?;
    for i in 1..x.n() {
        let row: Vec<String> = (0..i).map(|j| format_g9(x.get(i, j))).collect();
        writeln!(w, "{}", row.join(" "))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hypergraph_round_trip() {
        let text = "4 3\n1 2 3\n2 4 w=2.5\n# comment\n3\n";
        let h = read_hypergraph(text.as_bytes()).unwrap();
        assert_eq!(h.n(), 4);
        assert_eq!(h.edges()[1].nodes(), &[1, 3]);
        assert_eq!(h.edges()[1].weight(), 2.5);
        let mut out = Vec::new();
        write_hypergraph(&h, &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "4 3\n1 2 3\n2 4 w=2.5\n3\n");
    }

    #[test]
    fn hypergraph_errors() {
        for (text, line) in [
            ("2 1\n1 3\n", 2),
            ("2 2\n1 2\n", 3),
            ("x 1\n", 1),
            ("2 1\n1 w=0\n", 2),
            ("2 1\n1 2\n1\n", 3),
            ("2 1\nw=1 1\n", 2),
        ] {
            match read_hypergraph(text.as_bytes()) {
                Err(ParaccError::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn bipartite_round_trip() {
        let text = "2 3 3\n1 1\n2 3\n1 2\n";
        let g = read_bipartite(text.as_bytes()).unwrap();
        assert_eq!(g.edges(), &[(0, 0), (0, 1), (1, 2)]);
        let mut out = Vec::new();
        write_bipartite(&g, &mut out).unwrap();
        let again = read_bipartite(out.as_slice()).unwrap();
        assert_eq!(g, again);
        assert!(read_bipartite("2 2 1\n3 1\n".as_bytes()).is_err());
    }

    #[test]
    fn clustering_round_trip() {
        let c = Clustering::new([0, 1, 0, 2]);
        let mut out = Vec::new();
        write_clustering(&c, &mut out).unwrap();
        assert_eq!(String::from_utf8(out.clone()).unwrap(), "1 0\n2 1\n3 0\n4 2\n");
        assert_eq!(read_clustering(out.as_slice(), 4).unwrap(), c);
        let labels = read_labels("2 cat\n1 dog\n3 cat\n".as_bytes(), 3).unwrap();
        assert_eq!(labels.assignment(), &[0, 1, 1]);
        assert!(read_labels("1 a\n".as_bytes(), 2).is_err());
    }

    #[test]
    fn graph_reader_needs_pairs() {
        let g = read_weighted_graph("3 2\n1 2\n2 3 w=0.5\n".as_bytes()).unwrap();
        assert_eq!(g.edges(), &[(0, 1, 1.0), (1, 2, 0.5)]);
        assert!(read_weighted_graph("3 1\n1 2 3\n".as_bytes()).is_err());
    }
}
