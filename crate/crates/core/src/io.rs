//! Plain-text graph and party-assignment files.
//!
//! Graph: a header `nodes=N cliques=l` followed by one `u v` edge per line.
//! `cliques=0` means the graph carries no clique labels; otherwise node `i`
//! belongs to clique `i / (N / l)`.
//!
//! Assignment: one `node party` pair per line. Parties are ordered by first
//! appearance when scanning nodes in increasing order.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::{Graph, PartyAssignment, PartyId};

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

pub fn write_graph(graph: &Graph) -> String {
    let cliques = graph.cliques().map_or(0, |c| c.count);
    let mut out = format!("nodes={} cliques={}\n", graph.node_count(), cliques);
    for (u, v) in graph.edges() {
        writeln!(out, "{u} {v}").unwrap();
    }
    out
}

pub fn read_graph(text: &str) -> Result<Graph> {
    let mut lines = content_lines(text);
    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "missing header"))?;
    let mut nodes = None;
    let mut cliques = None;
    for field in header.split_whitespace() {
        let (key, val) = field
            .split_once('=')
            .ok_or_else(|| parse_err(hline, format!("expected key=value, got `{field}`")))?;
        let val: usize = val
            .parse()
            .map_err(|_| parse_err(hline, format!("`{key}` is not a non-negative integer")))?;
        match key {
            "nodes" => nodes = Some(val),
            "cliques" => cliques = Some(val),
            _ => return Err(parse_err(hline, format!("unknown header key `{key}`"))),
        }
    }
    let nodes = nodes.ok_or_else(|| parse_err(hline, "header lacks `nodes=`"))?;
    let mut graph = Graph::new(nodes);
    for (ln, line) in lines {
        let mut it = line.split_whitespace();
        let (Some(u), Some(v), None) = (it.next(), it.next(), it.next()) else {
            return Err(parse_err(ln, "expected `u v`"));
        };
        let u: usize = u.parse().map_err(|_| parse_err(ln, "bad node index"))?;
        let v: usize = v.parse().map_err(|_| parse_err(ln, "bad node index"))?;
        graph.add_edge(u, v).map_err(|e| parse_err(ln, e.to_string()))?;
    }
    match cliques {
        Some(0) | None => Ok(graph),
        Some(l) => graph.with_contiguous_cliques(l).map_err(|e| parse_err(hline, e.to_string())),
    }
}

pub fn write_assignment(assignment: &PartyAssignment) -> String {
    let mut out = String::new();
    for (n, &p) in assignment.votes().iter().enumerate() {
        writeln!(out, "{n} {}", assignment.name(p)).unwrap();
    }
    out
}

pub fn read_assignment(text: &str, node_count: usize) -> Result<PartyAssignment> {
    let mut named: Vec<Option<String>> = vec![None; node_count];
    for (ln, line) in content_lines(text) {
        let mut it = line.split_whitespace();
        let (Some(n), Some(party), None) = (it.next(), it.next(), it.next()) else {
            return Err(parse_err(ln, "expected `node party`"));
        };
        let n: usize = n.parse().map_err(|_| parse_err(ln, "bad node index"))?;
        let slot = named
            .get_mut(n)
            .ok_or_else(|| parse_err(ln, format!("node {n} out of range for {node_count} nodes")))?;
        if slot.is_some() {
            return Err(parse_err(ln, format!("node {n} assigned twice")));
        }
        *slot = Some(party.to_string());
    }
    let mut parties: Vec<String> = Vec::new();
    let mut votes = Vec::with_capacity(node_count);
    for (n, name) in named.into_iter().enumerate() {
        let name = name.ok_or_else(|| Error::Assignment(format!("node {n} has no party")))?;
        let idx = match parties.iter().position(|p| *p == name) {
            Some(i) => i,
            None => {
                parties.push(name);
                parties.len() - 1
            }
        };
        votes.push(PartyId(idx));
    }
    PartyAssignment::new(parties, votes)
}
