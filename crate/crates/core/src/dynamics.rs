//! Stochastic voter dynamics driven by six-parameter behavioural strategies.
//!
//! Every voter owns a ChaCha stream derived from the election seed, and every
//! update within a tick reads only the pre-tick vote vector, so the result of
//! a tick does not depend on the order in which voters are processed.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::graph::{poll_counts, Graph, PartyAssignment, PartyId};
use crate::seed::Seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PollState {
    Win,
    Deadlock,
    Lose,
}

impl PollState {
    pub const ALL: [PollState; 3] = [PollState::Win, PollState::Deadlock, PollState::Lose];

    fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Early,
    Late,
}

impl Phase {
    pub const ALL: [Phase; 2] = [Phase::Early, Phase::Late];

    fn index(self) -> usize {
        self as usize
    }
}

/// Win if the own-party poll share reaches `threshold`, lose if it is at most
/// `1 - threshold`, deadlock in between.
pub fn classify_poll_state(delta_own: f64, threshold: f64) -> PollState {
    if delta_own >= threshold {
        PollState::Win
    } else if delta_own <= 1.0 - threshold {
        PollState::Lose
    } else {
        PollState::Deadlock
    }
}

/// Stick probabilities indexed `[state][phase]`.
pub type StrategyTable = [[f64; 2]; 3];

/// Mean stick probabilities measured in the human-subject voting game.
pub const MEAN_STRATEGIES: StrategyTable = [[0.975, 0.979], [0.964, 0.911], [0.598, 0.574]];

pub const DEFAULT_CONCENTRATION: f64 = 10.0;

/// Population distribution of the six stick probabilities.
///
/// Without empirical samples each parameter is Beta distributed with mean
/// `mu` and shapes `(mu * nu, (1 - mu) * nu)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BehaviorDistribution {
    pub means: StrategyTable,
    pub concentration: f64,
    pub samples: Option<[[Vec<f64>; 2]; 3]>,
}

impl Default for BehaviorDistribution {
    fn default() -> Self {
        BehaviorDistribution {
            means: MEAN_STRATEGIES,
            concentration: DEFAULT_CONCENTRATION,
            samples: None,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct CellFile<T> {
    win_early: Option<T>,
    win_late: Option<T>,
    deadlock_early: Option<T>,
    deadlock_late: Option<T>,
    lose_early: Option<T>,
    lose_late: Option<T>,
}

impl<T> CellFile<T> {
    fn into_table(self) -> [[Option<T>; 2]; 3] {
        [
            [self.win_early, self.win_late],
            [self.deadlock_early, self.deadlock_late],
            [self.lose_early, self.lose_late],
        ]
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct DistributionFile {
    concentration: Option<f64>,
    means: Option<CellFile<f64>>,
    samples: Option<CellFile<Vec<f64>>>,
}

impl BehaviorDistribution {
    /// Parse a TOML strategy file. Missing means fall back to the defaults;
    /// a `[samples]` table, if present, must list all six cells.
    pub fn from_toml(text: &str) -> Result<Self> {
        let file: DistributionFile =
            toml::from_str(text).map_err(|e| invalid(format!("strategy file: {e}")))?;
        let mut dist = BehaviorDistribution::default();
        if let Some(nu) = file.concentration {
            dist.concentration = nu;
        }
        if let Some(means) = file.means {
            for (s, row) in means.into_table().into_iter().enumerate() {
                for (p, m) in row.into_iter().enumerate() {
                    if let Some(m) = m {
                        dist.means[s][p] = m;
                    }
                }
            }
        }
        if let Some(samples) = file.samples {
            let table = samples.into_table().map(|row| {
                row.map(|cell| cell.ok_or_else(|| invalid("[samples] must list all six cells")))
            });
            let [[a, b], [c, d], [e, f]] = table;
            dist.samples = Some([[a?, b?], [c?, d?], [e?, f?]]);
        }
        dist.validate()?;
        Ok(dist)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.concentration > 0.0) || !self.concentration.is_finite() {
            return Err(invalid(format!("concentration must be positive, got {}", self.concentration)));
        }
        for m in self.means.iter().flatten() {
            if !(*m > 0.0 && *m < 1.0) {
                return Err(invalid(format!("mean stick probability {m} outside (0, 1)")));
            }
        }
        if let Some(samples) = &self.samples {
            for cell in samples.iter().flatten() {
                if cell.is_empty() {
                    return Err(invalid("empty empirical sample table"));
                }
                if let Some(x) = cell.iter().find(|x| !(0.0..=1.0).contains(*x)) {
                    return Err(invalid(format!("empirical stick probability {x} outside [0, 1]")));
                }
            }
        }
        Ok(())
    }
}

/// One 3x2 stick-probability table per voter.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategyMatrix {
    tables: Vec<StrategyTable>,
}

impl StrategyMatrix {
    pub fn new(tables: Vec<StrategyTable>) -> Result<Self> {
        for t in &tables {
            if let Some(p) = t.iter().flatten().find(|p| !(0.0..=1.0).contains(*p)) {
                return Err(invalid(format!("stick probability {p} outside [0, 1]")));
            }
        }
        Ok(StrategyMatrix { tables })
    }

    pub fn constant(voters: usize, p: f64) -> Result<Self> {
        StrategyMatrix::new(vec![[[p; 2]; 3]; voters])
    }

    pub fn len(&self) -> usize {
        self.tables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tables.is_empty()
    }

    pub fn stick(&self, voter: usize, state: PollState, phase: Phase) -> f64 {
        self.tables[voter][state.index()][phase.index()]
    }

    pub fn table(&self, voter: usize) -> &StrategyTable {
        &self.tables[voter]
    }
}

pub fn sample_strategies(
    dist: &BehaviorDistribution,
    voters: usize,
    seed: Seed,
) -> Result<StrategyMatrix> {
    dist.validate()?;
    let mut rng = seed.rng();
    let tables = match &dist.samples {
        Some(samples) => (0..voters)
            .map(|_| samples.each_ref().map(|row| row.each_ref().map(|cell| cell[rng.random_range(0..cell.len())])))
            .collect(),
        None => {
            let nu = dist.concentration;
            let betas = dist.means.map(|row| {
                row.map(|mu| Beta::new(mu * nu, (1.0 - mu) * nu).expect("validated shape parameters"))
            });
            (0..voters)
                .map(|_| betas.each_ref().map(|row| row.each_ref().map(|b| b.sample(&mut rng))))
                .collect()
        }
    };
    Ok(StrategyMatrix { tables })
}

/// Which vote the stick probability protects. The poll state is measured
/// for the same party.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StickTarget {
    /// The voter's vote before this tick.
    Current,
    /// The party the voter was originally assigned.
    #[default]
    Assigned,
}

impl std::str::FromStr for StickTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "current" => Ok(StickTarget::Current),
            "assigned" => Ok(StickTarget::Assigned),
            _ => Err(invalid(format!("unknown stick target `{s}` (current, assigned)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElectionConfig {
    pub duration: f64,
    pub cutoff: f64,
    pub tick: f64,
    pub threshold: f64,
    pub stick: StickTarget,
}

impl Default for ElectionConfig {
    fn default() -> Self {
        ElectionConfig {
            duration: 240.0,
            cutoff: 83.0,
            tick: 3.3,
            threshold: 0.6,
            stick: StickTarget::Assigned,
        }
    }
}

impl ElectionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.threshold > 0.5 && self.threshold <= 1.0) {
            return Err(invalid(format!("victory threshold must lie in (0.5, 1], got {}", self.threshold)));
        }
        if !(self.tick > 0.0) {
            return Err(invalid("tick interval must be positive"));
        }
        if !(self.cutoff < self.duration) {
            return Err(invalid("early-phase cutoff must precede the end of the election"));
        }
        Ok(())
    }

    /// Whole ticks that fit in the election; no partial final tick.
    pub fn tick_count(&self) -> usize {
        (self.duration / self.tick + 1e-9).floor() as usize
    }

    pub fn tick_time(&self, tick: usize) -> f64 {
        self.tick * tick as f64
    }

    pub fn phase(&self, tick: usize) -> Phase {
        if self.tick_time(tick) < self.cutoff {
            Phase::Early
        } else {
            Phase::Late
        }
    }
}

/// Per-tick inputs shared by every voter update.
#[derive(Debug, Clone, Copy)]
pub struct StepContext<'a> {
    pub graph: &'a Graph,
    pub assigned: &'a [PartyId],
    pub party_count: usize,
    pub strategies: &'a StrategyMatrix,
    pub phase: Phase,
    pub threshold: f64,
    pub stick: StickTarget,
}

impl StepContext<'_> {
    /// New vote of voter `v` given the pre-tick votes.
    pub fn update_voter<R: Rng>(&self, v: usize, votes: &[PartyId], counts: &mut [usize], rng: &mut R) -> PartyId {
        let size = poll_counts(self.graph, votes, v, counts);
        let anchor = match self.stick {
            StickTarget::Current => votes[v],
            StickTarget::Assigned => self.assigned[v],
        };
        let delta = counts[anchor.0] as f64 / size as f64;
        let state = classify_poll_state(delta, self.threshold);
        let p = self.strategies.stick(v, state, self.phase);
        if rng.random::<f64>() < p {
            return anchor;
        }
        let top = counts
            .iter()
            .enumerate()
            .filter(|&(q, _)| q != anchor.0)
            .map(|(_, &c)| c)
            .max()
            .unwrap_or(0);
        if top == 0 {
            return anchor;
        }
        let tied = counts.iter().enumerate().filter(|&(q, &c)| q != anchor.0 && c == top).count();
        let pick = if tied == 1 { 0 } else { rng.random_range(0..tied) };
        counts
            .iter()
            .enumerate()
            .filter(|&(q, &c)| q != anchor.0 && c == top)
            .nth(pick)
            .map(|(q, _)| PartyId(q))
            .expect("pick < tied")
    }
}

/// One synchronous tick. `rngs[v]` is voter `v`'s private stream.
pub fn step<R: Rng>(ctx: &StepContext<'_>, votes: &[PartyId], rngs: &mut [R]) -> Vec<PartyId> {
    let mut counts = vec![0; ctx.party_count];
    rngs.iter_mut()
        .enumerate()
        .map(|(v, rng)| ctx.update_voter(v, votes, &mut counts, rng))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TickShares {
    pub tick: usize,
    pub t_seconds: f64,
    pub shares: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ElectionOutcome {
    pub parties: Vec<String>,
    pub shares: Vec<f64>,
    /// Party whose final share reaches the threshold; `None` is a deadlock.
    pub winner: Option<PartyId>,
    pub trajectory: Vec<TickShares>,
    pub final_votes: Vec<PartyId>,
}

impl ElectionOutcome {
    pub fn skew(&self, party: PartyId) -> f64 {
        self.shares[party.0] - 0.5
    }

    pub fn winner_name(&self) -> &str {
        self.winner.map_or("deadlock", |p| self.parties[p.0].as_str())
    }
}

fn shares_of(votes: &[PartyId], party_count: usize) -> Vec<f64> {
    let mut tally = vec![0usize; party_count];
    for p in votes {
        tally[p.0] += 1;
    }
    tally.into_iter().map(|c| c as f64 / votes.len() as f64).collect()
}

pub fn voter_streams(seed: Seed, voters: usize) -> Vec<ChaCha8Rng> {
    (0..voters as u64).map(|v| seed.stream(v)).collect()
}

pub fn run_election(
    graph: &Graph,
    assignment: &PartyAssignment,
    config: &ElectionConfig,
    strategies: &StrategyMatrix,
    seed: Seed,
) -> Result<ElectionOutcome> {
    config.validate()?;
    let n = graph.node_count();
    if assignment.len() != n || strategies.len() != n {
        return Err(Error::Assignment(format!(
            "graph has {n} nodes, assignment {} and strategies {}",
            assignment.len(),
            strategies.len()
        )));
    }
    let party_count = assignment.party_count();
    let mut rngs = voter_streams(seed, n);
    let mut votes = assignment.votes().to_vec();
    let mut trajectory = vec![TickShares {
        tick: 0,
        t_seconds: 0.0,
        shares: shares_of(&votes, party_count),
    }];
    let mut counts = vec![0; party_count];
    let mut next = votes.clone();
    for tick in 1..=config.tick_count() {
        let ctx = StepContext {
            graph,
            assigned: assignment.votes(),
            party_count,
            strategies,
            phase: config.phase(tick),
            threshold: config.threshold,
            stick: config.stick,
        };
        for (v, slot) in next.iter_mut().enumerate() {
            *slot = ctx.update_voter(v, &votes, &mut counts, &mut rngs[v]);
        }
        std::mem::swap(&mut votes, &mut next);
        trajectory.push(TickShares {
            tick,
            t_seconds: config.tick_time(tick),
            shares: shares_of(&votes, party_count),
        });
    }
    let shares = trajectory.last().expect("tick 0 recorded").shares.clone();
    let winner = shares.iter().position(|&s| s >= config.threshold).map(PartyId);
    Ok(ElectionOutcome {
        parties: assignment.parties().to_vec(),
        shares,
        winner,
        trajectory,
        final_votes: votes,
    })
}
