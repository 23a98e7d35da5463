//! Undirected simple graphs, party assignments and the caveman family of
//! generators (caveman, relaxed caveman, homophilic relaxed caveman).

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::seed::Seed;

/// Undirected simple graph over nodes `0..node_count`.
///
/// Adjacency lists are kept sorted. Graphs built by the caveman generators
/// also carry the clique label of every node in the original construction;
/// rewiring keeps those labels so they can serve as districts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    edge_count: usize,
    cliques: Option<Cliques>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cliques {
    pub count: usize,
    pub labels: Vec<usize>,
}

impl Graph {
    pub fn new(node_count: usize) -> Self {
        Graph {
            adj: vec![Vec::new(); node_count],
            edge_count: 0,
            cliques: None,
        }
    }

    pub fn from_edges(node_count: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Graph::new(node_count);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, n: usize) -> &[usize] {
        &self.adj[n]
    }

    pub fn degree(&self, n: usize) -> usize {
        self.adj[n].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.adj.len() && self.adj[u].binary_search(&v).is_ok()
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        let n = self.node_count();
        if u >= n || v >= n {
            return Err(Error::Graph(format!("edge ({u},{v}) out of range for {n} nodes")));
        }
        if u == v {
            return Err(Error::Graph(format!("self-loop at {u}")));
        }
        match self.adj[u].binary_search(&v) {
            Ok(_) => return Err(Error::Graph(format!("duplicate edge ({u},{v})"))),
            Err(pos) => self.adj[u].insert(pos, v),
        }
        let pos = self.adj[v].binary_search(&u).unwrap_err();
        self.adj[v].insert(pos, u);
        self.edge_count += 1;
        Ok(())
    }

    /// Returns whether the edge was present.
    pub fn remove_edge(&mut self, u: usize, v: usize) -> bool {
        if u >= self.node_count() || v >= self.node_count() {
            return false;
        }
        match self.adj[u].binary_search(&v) {
            Ok(pos) => {
                self.adj[u].remove(pos);
                let pos = self.adj[v].binary_search(&u).expect("adjacency is symmetric");
                self.adj[v].remove(pos);
                self.edge_count -= 1;
                true
            }
            Err(_) => false,
        }
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, ns)| ns.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn cliques(&self) -> Option<&Cliques> {
        self.cliques.as_ref()
    }

    pub fn clique_of(&self, n: usize) -> Option<usize> {
        self.cliques.as_ref().map(|c| c.labels[n])
    }

    /// Attach contiguous clique labels: node `i` belongs to clique `i / (N / count)`.
    pub fn with_contiguous_cliques(mut self, count: usize) -> Result<Self> {
        let n = self.node_count();
        if count == 0 || n % count != 0 {
            return Err(Error::Graph(format!("{n} nodes cannot be split into {count} equal cliques")));
        }
        let size = n / count;
        self.cliques = Some(Cliques {
            count,
            labels: (0..n).map(|i| i / size).collect(),
        });
        Ok(self)
    }

    /// Number of edges whose endpoints lie in different original cliques.
    pub fn cross_clique_edges(&self) -> Option<usize> {
        let c = self.cliques.as_ref()?;
        Some(self.edges().filter(|&(u, v)| c.labels[u] != c.labels[v]).count())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PartyId(pub usize);

/// Party of every voter plus the ordered list of party names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartyAssignment {
    parties: Vec<String>,
    votes: Vec<PartyId>,
    counts: Vec<usize>,
}

impl PartyAssignment {
    /// Every listed party must hold at least one voter.
    pub fn new(parties: Vec<String>, votes: Vec<PartyId>) -> Result<Self> {
        let mut counts = vec![0; parties.len()];
        for (n, p) in votes.iter().enumerate() {
            match counts.get_mut(p.0) {
                Some(c) => *c += 1,
                None => {
                    return Err(Error::Assignment(format!("node {n} has unknown party index {}", p.0)))
                }
            }
        }
        if let Some(i) = counts.iter().position(|&c| c == 0) {
            return Err(Error::Assignment(format!("party `{}` has no voters", parties[i])));
        }
        let mut seen = std::collections::HashSet::new();
        for name in &parties {
            if !seen.insert(name.as_str()) {
                return Err(Error::Assignment(format!("party `{name}` listed twice")));
            }
        }
        Ok(PartyAssignment { parties, votes, counts })
    }

    /// Strong party assignment: exactly `count` voters per party, placed by a
    /// uniformly random permutation.
    pub fn strong(counts: &[(String, usize)], node_count: usize, seed: Seed) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::Assignment("no parties given".into()));
        }
        if let Some((name, _)) = counts.iter().find(|(_, c)| *c == 0) {
            return Err(Error::Assignment(format!("party `{name}` has zero count")));
        }
        let total: usize = counts.iter().map(|(_, c)| c).sum();
        if total != node_count {
            return Err(Error::Assignment(format!(
                "party counts sum to {total}, graph has {node_count} nodes"
            )));
        }
        let mut votes: Vec<PartyId> = counts
            .iter()
            .enumerate()
            .flat_map(|(i, &(_, c))| std::iter::repeat_n(PartyId(i), c))
            .collect();
        votes.shuffle(&mut seed.rng());
        PartyAssignment::new(counts.iter().map(|(n, _)| n.clone()).collect(), votes)
    }

    pub fn len(&self) -> usize {
        self.votes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.votes.is_empty()
    }

    pub fn party_count(&self) -> usize {
        self.parties.len()
    }

    pub fn parties(&self) -> &[String] {
        &self.parties
    }

    pub fn votes(&self) -> &[PartyId] {
        &self.votes
    }

    pub fn party(&self, n: usize) -> PartyId {
        self.votes[n]
    }

    pub fn name(&self, p: PartyId) -> &str {
        &self.parties[p.0]
    }

    pub fn count(&self, p: PartyId) -> usize {
        self.counts[p.0]
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn id(&self, name: &str) -> Result<PartyId> {
        self.parties
            .iter()
            .position(|p| p == name)
            .map(PartyId)
            .ok_or_else(|| Error::UnknownParty(name.to_string()))
    }

    pub fn counts_by_name(&self) -> BTreeMap<&str, usize> {
        self.parties.iter().map(String::as_str).zip(self.counts.iter().copied()).collect()
    }
}

/// Count votes per party in the poll of `n` (the node and its neighbours).
/// Fills `counts` (length = number of parties) and returns the poll size.
pub fn poll_counts(graph: &Graph, votes: &[PartyId], n: usize, counts: &mut [usize]) -> usize {
    counts.iter_mut().for_each(|c| *c = 0);
    counts[votes[n].0] += 1;
    for &m in graph.neighbors(n) {
        counts[votes[m].0] += 1;
    }
    graph.degree(n) + 1
}

/// Fraction of `n`'s poll voting for each party, self included.
pub fn poll_fractions(graph: &Graph, assignment: &PartyAssignment, n: usize) -> Vec<f64> {
    let mut counts = vec![0; assignment.party_count()];
    let size = poll_counts(graph, assignment.votes(), n, &mut counts) as f64;
    counts.into_iter().map(|c| c as f64 / size).collect()
}

/// `l` disjoint `k`-cliques; clique `c` holds nodes `c*k .. (c+1)*k`.
pub fn build_caveman(l: usize, k: usize) -> Result<Graph> {
    if l == 0 || k == 0 {
        return Err(invalid(format!("caveman graph needs l >= 1 and k >= 1, got l={l}, k={k}")));
    }
    let mut g = Graph::new(l * k);
    for c in 0..l {
        let base = c * k;
        for i in 0..k {
            for j in i + 1..k {
                g.add_edge(base + i, base + j)?;
            }
        }
    }
    g.with_contiguous_cliques(l)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HrcParams {
    pub cliques: usize,
    pub clique_size: usize,
    pub rewire_probability: f64,
    pub homophily: f64,
}

impl HrcParams {
    pub fn new(cliques: usize, clique_size: usize, p0: f64, h: f64) -> Self {
        HrcParams {
            cliques,
            clique_size,
            rewire_probability: p0,
            homophily: h,
        }
    }

    pub fn node_count(&self) -> usize {
        self.cliques * self.clique_size
    }

    pub fn validate(&self) -> Result<()> {
        if self.cliques == 0 || self.clique_size == 0 {
            return Err(invalid("clique count and clique size must be positive"));
        }
        check_probability("rewire probability", self.rewire_probability)?;
        check_probability("homophily", self.homophily)
    }
}

fn check_probability(what: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(invalid(format!("{what} must lie in [0, 1], got {p}")))
    }
}

/// What happened while rewiring a caveman graph.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RewireTrace {
    /// Edges whose rewire coin came up heads.
    pub attempts: usize,
    /// Edges actually moved.
    pub rewires: usize,
    /// Attempts that left the graph unchanged because the target edge was
    /// intra-clique or already present.
    pub blocked: usize,
    /// Edges created by rewiring, as `(kept endpoint, new endpoint)`.
    pub added: Vec<(usize, usize)>,
}

/// Rewire every original edge `(u, v)`, `u < v`, once and in lexicographic
/// order. For each edge a target `n` is drawn uniformly from `V \ {u, v}`,
/// then the edge becomes `(u, n)` with probability `prob(u, n)`. Targets
/// inside `u`'s original clique, or already adjacent to `u`, leave the graph
/// unchanged.
fn rewire_caveman<F>(base: Graph, prob: F, seed: Seed) -> (Graph, RewireTrace)
where
    F: Fn(usize, usize) -> f64,
{
    let mut graph = base;
    let labels = graph.cliques.as_ref().expect("caveman graph carries clique labels").labels.clone();
    let n_nodes = graph.node_count();
    let mut trace = RewireTrace::default();
    if n_nodes < 3 {
        return (graph, trace);
    }
    let snapshot: Vec<(usize, usize)> = graph.edges().collect();
    let mut rng = seed.rng();
    for (u, v) in snapshot {
        // Uniform over V \ {u, v}: draw from N-2 slots and skip the two holes.
        let mut target = rng.random_range(0..n_nodes - 2);
        let (lo, hi) = (u.min(v), u.max(v));
        if target >= lo {
            target += 1;
        }
        if target >= hi {
            target += 1;
        }
        let coin: f64 = rng.random();
        if coin >= prob(u, target) {
            continue;
        }
        trace.attempts += 1;
        if labels[u] == labels[target] || graph.has_edge(u, target) {
            trace.blocked += 1;
            continue;
        }
        graph.remove_edge(u, v);
        graph.add_edge(u, target).expect("target edge checked absent");
        trace.rewires += 1;
        trace.added.push((u, target));
    }
    (graph, trace)
}

/// Homophilic relaxed-caveman graph.
pub fn generate_hrc(params: &HrcParams, assignment: &PartyAssignment, seed: Seed) -> Result<Graph> {
    generate_hrc_traced(params, assignment, seed).map(|(g, _)| g)
}

pub fn generate_hrc_traced(
    params: &HrcParams,
    assignment: &PartyAssignment,
    seed: Seed,
) -> Result<(Graph, RewireTrace)> {
    params.validate()?;
    if assignment.len() != params.node_count() {
        return Err(Error::Assignment(format!(
            "assignment covers {} nodes, hRC graph has {}",
            assignment.len(),
            params.node_count()
        )));
    }
    let base = build_caveman(params.cliques, params.clique_size)?;
    let same = params.rewire_probability * params.homophily;
    let other = params.rewire_probability * (1.0 - params.homophily);
    let votes = assignment.votes();
    Ok(rewire_caveman(
        base,
        |u, n| if votes[u] == votes[n] { same } else { other },
        seed,
    ))
}

/// Party-blind relaxed caveman: every edge is rewired with probability `p`.
pub fn rewire_relaxed(graph: &Graph, p: f64, seed: Seed) -> Result<Graph> {
    rewire_relaxed_traced(graph, p, seed).map(|(g, _)| g)
}

pub fn rewire_relaxed_traced(graph: &Graph, p: f64, seed: Seed) -> Result<(Graph, RewireTrace)> {
    check_probability("rewire probability", p)?;
    let Some(cliques) = graph.cliques() else {
        return Err(invalid("relaxed rewiring needs a caveman graph with clique labels"));
    };
    let expected = build_caveman(cliques.count, graph.node_count() / cliques.count)?;
    if expected != *graph {
        return Err(invalid("relaxed rewiring needs an unrewired caveman graph"));
    }
    Ok(rewire_caveman(graph.clone(), |_, _| p, seed))
}
