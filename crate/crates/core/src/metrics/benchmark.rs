//! Benchmark predictors measured at the start of an election: initial
//! majority, deterministic voter skew and efficiency gap.

use serde::Serialize;

use super::{gap_from_assortments, party_assortments, AssortmentConvention, GapConvention};
use crate::error::{invalid, Error, Result};
use crate::graph::{poll_counts, Graph, PartyAssignment, PartyId};

/// Two parties: votes above parity, `N_P - N/2`. More parties: the raw count `N_P`.
pub fn initial_majority(assignment: &PartyAssignment, party: PartyId) -> f64 {
    let count = assignment.count(party) as f64;
    if assignment.party_count() == 2 {
        count - assignment.len() as f64 / 2.0
    } else {
        count
    }
}

/// Vote shares after `steps` synchronous rounds in which every voter adopts
/// the strict plurality of its poll, keeping its vote on any tie for first.
pub fn deterministic_vote_shares(
    graph: &Graph,
    votes: &[PartyId],
    party_count: usize,
    steps: usize,
) -> Vec<f64> {
    let mut current = votes.to_vec();
    let mut next = current.clone();
    let mut counts = vec![0; party_count];
    for _ in 0..steps {
        for (n, slot) in next.iter_mut().enumerate() {
            poll_counts(graph, &current, n, &mut counts);
            let top = *counts.iter().max().expect("at least one party");
            let mut leaders = counts.iter().enumerate().filter(|(_, &c)| c == top);
            let first = leaders.next().expect("max exists").0;
            *slot = if leaders.next().is_none() { PartyId(first) } else { current[n] };
        }
        std::mem::swap(&mut current, &mut next);
    }
    let mut tally = vec![0usize; party_count];
    for p in &current {
        tally[p.0] += 1;
    }
    let n = votes.len() as f64;
    tally.into_iter().map(|c| c as f64 / n).collect()
}

/// `share_P - 1/2` after `steps` deterministic rounds.
pub fn deterministic_voter_skew(
    graph: &Graph,
    assignment: &PartyAssignment,
    steps: usize,
    party: PartyId,
) -> Result<f64> {
    if steps == 0 {
        return Err(invalid("deterministic voter skew needs at least one step"));
    }
    if party.0 >= assignment.party_count() {
        return Err(Error::UnknownParty(format!("#{}", party.0)));
    }
    let shares = deterministic_vote_shares(graph, assignment.votes(), assignment.party_count(), steps);
    Ok(shares[party.0] - 0.5)
}

/// Efficiency gap in favour of `party`, using the graph's clique labels as
/// districts. A district winner wastes its votes above `floor(size/2) + 1`,
/// the loser wastes all of its votes, and a tied district wastes every vote.
pub fn efficiency_gap(graph: &Graph, assignment: &PartyAssignment, party: PartyId) -> Result<f64> {
    if assignment.party_count() != 2 {
        return Err(invalid(format!(
            "efficiency gap is defined for two parties, got {}",
            assignment.party_count()
        )));
    }
    if party.0 >= 2 {
        return Err(Error::UnknownParty(format!("#{}", party.0)));
    }
    let cliques = graph
        .cliques()
        .ok_or_else(|| invalid("efficiency gap needs district (clique) labels"))?;
    let wasted = wasted_votes(&cliques.labels, cliques.count, assignment.votes());
    let own = wasted[party.0] as f64;
    let other = wasted[1 - party.0] as f64;
    Ok((other - own) / assignment.len() as f64)
}

fn wasted_votes(districts: &[usize], district_count: usize, votes: &[PartyId]) -> [usize; 2] {
    let mut tally = vec![[0usize; 2]; district_count];
    for (&d, p) in districts.iter().zip(votes) {
        tally[d][p.0] += 1;
    }
    let mut wasted = [0usize; 2];
    for [a, b] in tally {
        let quota = (a + b) / 2 + 1;
        match a.cmp(&b) {
            std::cmp::Ordering::Greater => {
                wasted[0] += a - quota;
                wasted[1] += b;
            }
            std::cmp::Ordering::Less => {
                wasted[0] += a;
                wasted[1] += b - quota;
            }
            std::cmp::Ordering::Equal => {
                wasted[0] += a;
                wasted[1] += b;
            }
        }
    }
    wasted
}

/// Every predictor for every party of one graph.
#[derive(Debug, Clone, Serialize)]
pub struct MetricReport {
    pub parties: Vec<String>,
    pub assortment_convention: AssortmentConvention,
    pub gap_convention: GapConvention,
    pub assortment: Vec<f64>,
    /// One set of values per party; singletons except under the runner-up convention.
    pub influence_gap: Vec<Vec<f64>>,
    pub majority: Vec<f64>,
    pub dvs: Vec<f64>,
    /// `None` unless there are exactly two parties and the graph has districts.
    pub efficiency_gap: Option<Vec<f64>>,
}

impl MetricReport {
    pub fn compute(
        graph: &Graph,
        assignment: &PartyAssignment,
        aconv: AssortmentConvention,
        gconv: GapConvention,
    ) -> Result<Self> {
        if graph.node_count() != assignment.len() {
            return Err(Error::Assignment(format!(
                "assignment covers {} nodes, graph has {}",
                assignment.len(),
                graph.node_count()
            )));
        }
        let parties = (0..assignment.party_count()).map(PartyId);
        let assortment = party_assortments::<f64>(graph, assignment, aconv);
        let influence_gap = parties
            .clone()
            .map(|p| gap_from_assortments(&assortment, assignment, p, gconv))
            .collect::<Result<_>>()?;
        let majority = parties.clone().map(|p| initial_majority(assignment, p)).collect();
        let dvs = deterministic_vote_shares(graph, assignment.votes(), assignment.party_count(), 1)
            .into_iter()
            .map(|s| s - 0.5)
            .collect();
        let efficiency_gap = if assignment.party_count() == 2 && graph.cliques().is_some() {
            Some(parties.map(|p| efficiency_gap(graph, assignment, p)).collect::<Result<_>>()?)
        } else {
            None
        };
        Ok(MetricReport {
            parties: assignment.parties().to_vec(),
            assortment_convention: aconv,
            gap_convention: gconv,
            assortment,
            influence_gap,
            majority,
            dvs,
            efficiency_gap,
        })
    }
}
