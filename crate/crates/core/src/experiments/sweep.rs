//! Batch elections over a `(p0, h)` grid.
//!
//! Cell `c` (p0-major order) and repetition `r` get the child seed
//! `master.child(c, r)`; everything random in that election (party counts,
//! placement, graph, strategies, dynamics) is derived from it. Records come
//! back in `(cell, repetition)` order whatever the execution mode.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::exec::Execution;
use crate::dynamics::{run_election, sample_strategies, BehaviorDistribution, ElectionConfig};
use crate::error::{invalid, Error, Result};
use crate::graph::{generate_hrc, HrcParams, PartyAssignment, PartyId};
use crate::metrics::{
    deterministic_voter_skew, efficiency_gap, influence_gaps, initial_majority, AssortmentConvention,
};
use crate::seed::Seed;

pub const PARTY_NAMES: [&str; 3] = ["red", "blue", "green"];

pub const RECORDS_HEADER: &str = "seed,l,k,p0,h,n_red,n_blue,n_green,ig_red,ig_blue,ig_green,majority,dvs,eg,final_skew_red,final_skew_blue,final_skew_green,winner";

/// How party sizes are chosen for each election.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CountRule {
    /// Two parties; red takes every count in `min..=max` with equal probability.
    RedRange { min: usize, max: usize },
    /// Uniform choice from an explicit set of count vectors.
    Choice(Vec<Vec<usize>>),
    /// Uniform over all compositions of N into `parties` parts of at least `min`.
    Compositions { parties: usize, min: usize },
}

impl CountRule {
    /// Every count vector the rule can produce, in a fixed order.
    pub fn options(&self, node_count: usize) -> Result<Vec<Vec<usize>>> {
        let opts: Vec<Vec<usize>> = match self {
            CountRule::RedRange { min, max } => {
                if min > max || *max >= node_count {
                    return Err(invalid(format!(
                        "red range {min}..={max} invalid for {node_count} voters"
                    )));
                }
                (*min..=*max).map(|r| vec![r, node_count - r]).collect()
            }
            CountRule::Choice(set) => set.clone(),
            CountRule::Compositions { parties, min } => {
                let mut out = Vec::new();
                compositions(node_count, *parties, (*min).max(1), &mut Vec::new(), &mut out);
                out
            }
        };
        if opts.is_empty() {
            return Err(invalid("party count rule yields no options"));
        }
        for o in &opts {
            if !(2..=3).contains(&o.len()) {
                return Err(invalid("sweeps support two or three parties"));
            }
            if o.iter().sum::<usize>() != node_count || o.contains(&0) {
                return Err(invalid(format!("counts {o:?} do not split {node_count} voters")));
            }
        }
        let parties = opts[0].len();
        if opts.iter().any(|o| o.len() != parties) {
            return Err(invalid("all count vectors must have the same number of parties"));
        }
        Ok(opts)
    }
}

fn compositions(total: usize, parts: usize, min: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if parts == 1 {
        if total >= min {
            prefix.push(total);
            out.push(prefix.clone());
            prefix.pop();
        }
        return;
    }
    let mut first = min;
    while first + min * (parts - 1) <= total {
        prefix.push(first);
        compositions(total - first, parts - 1, min, prefix, out);
        prefix.pop();
        first += 1;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub p0_grid: Vec<f64>,
    pub h_grid: Vec<f64>,
    pub counts: CountRule,
    pub elections_per_cell: usize,
    pub cliques: usize,
    pub clique_size: usize,
    pub election: ElectionConfig,
    pub behavior: BehaviorDistribution,
    pub assortment: AssortmentConvention,
    pub seed: Seed,
}

fn tenths() -> Vec<f64> {
    (0..=10).map(|i| f64::from(i) / 10.0).collect()
}

impl SweepConfig {
    /// Two parties, N = 20 on 4 cliques of 5, red count uniform in 10..=16.
    pub fn two_party(seed: Seed) -> Self {
        SweepConfig {
            p0_grid: vec![0.0, 0.4, 1.0],
            h_grid: tenths(),
            counts: CountRule::RedRange { min: 10, max: 16 },
            elections_per_cell: 2000,
            cliques: 4,
            clique_size: 5,
            election: ElectionConfig::default(),
            behavior: BehaviorDistribution::default(),
            assortment: AssortmentConvention::default(),
            seed,
        }
    }

    /// Red, blue and green with counts uniform over all compositions of 20.
    pub fn three_party(seed: Seed) -> Self {
        SweepConfig {
            counts: CountRule::Compositions { parties: 3, min: 1 },
            ..SweepConfig::two_party(seed)
        }
    }

    pub fn node_count(&self) -> usize {
        self.cliques * self.clique_size
    }

    pub fn cells(&self) -> Vec<(f64, f64)> {
        self.p0_grid
            .iter()
            .flat_map(|&p0| self.h_grid.iter().map(move |&h| (p0, h)))
            .collect()
    }

    pub fn total_elections(&self) -> usize {
        self.p0_grid.len() * self.h_grid.len() * self.elections_per_cell
    }

    pub fn validate(&self) -> Result<Vec<Vec<usize>>> {
        if self.p0_grid.is_empty() || self.h_grid.is_empty() {
            return Err(invalid("parameter grids must be nonempty"));
        }
        if self.elections_per_cell == 0 {
            return Err(invalid("need at least one election per cell"));
        }
        for (p0, h) in self.cells() {
            HrcParams::new(self.cliques, self.clique_size, p0, h).validate()?;
        }
        self.election.validate()?;
        self.behavior.validate()?;
        self.counts.options(self.node_count())
    }
}

/// One simulated election: initial predictors and final outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct ElectionRecord {
    pub seed: u64,
    pub cliques: usize,
    pub clique_size: usize,
    pub p0: f64,
    pub h: f64,
    pub counts: Vec<usize>,
    pub ig: Vec<f64>,
    /// Two-party only: red count above parity.
    pub majority: Option<f64>,
    /// Two-party only, toward red.
    pub dvs: Option<f64>,
    /// Two-party only, toward red.
    pub eg: Option<f64>,
    pub final_skew: Vec<f64>,
    pub winner: String,
}

impl ElectionRecord {
    pub fn party_count(&self) -> usize {
        self.counts.len()
    }

    pub fn node_count(&self) -> usize {
        self.counts.iter().sum()
    }
}

mod stream {
    pub const COUNTS: u64 = 0;
    pub const PLACEMENT: u64 = 1;
    pub const GRAPH: u64 = 2;
    pub const STRATEGIES: u64 = 3;
    pub const DYNAMICS: u64 = 4;
}

/// Simulate a single election with an already-derived child seed.
pub fn simulate_election(
    config: &SweepConfig,
    options: &[Vec<usize>],
    p0: f64,
    h: f64,
    seed: Seed,
) -> Result<ElectionRecord> {
    let sub = |s| seed.child(s, 0);
    let counts = &options[sub(stream::COUNTS).rng().random_range(0..options.len())];
    let named: Vec<(String, usize)> =
        counts.iter().enumerate().map(|(i, &c)| (PARTY_NAMES[i].to_string(), c)).collect();
    let n = config.node_count();
    let assignment = PartyAssignment::strong(&named, n, sub(stream::PLACEMENT))?;
    let params = HrcParams::new(config.cliques, config.clique_size, p0, h);
    let graph = generate_hrc(&params, &assignment, sub(stream::GRAPH))?;

    let ig = influence_gaps::<f64>(&graph, &assignment, config.assortment)?;
    let red = PartyId(0);
    let two = counts.len() == 2;
    let (majority, dvs, eg) = if two {
        (
            Some(initial_majority(&assignment, red)),
            Some(deterministic_voter_skew(&graph, &assignment, 1, red)?),
            Some(efficiency_gap(&graph, &assignment, red)?),
        )
    } else {
        (None, None, None)
    };

    let strategies = sample_strategies(&config.behavior, n, sub(stream::STRATEGIES))?;
    let outcome = run_election(&graph, &assignment, &config.election, &strategies, sub(stream::DYNAMICS))?;
    Ok(ElectionRecord {
        seed: seed.0,
        cliques: config.cliques,
        clique_size: config.clique_size,
        p0,
        h,
        counts: counts.clone(),
        ig,
        majority,
        dvs,
        eg,
        final_skew: (0..counts.len()).map(|p| outcome.skew(PartyId(p))).collect(),
        winner: outcome.winner_name().to_string(),
    })
}

pub fn run_batch(config: &SweepConfig, exec: Execution) -> Result<Vec<ElectionRecord>> {
    let options = config.validate()?;
    let cells = config.cells();
    let reps = config.elections_per_cell;
    exec.map(cells.len() * reps, |i| {
        let (cell, rep) = (i / reps, i % reps);
        let (p0, h) = cells[cell];
        let seed = config.seed.child(cell as u64, rep as u64);
        simulate_election(config, &options, p0, h, seed).map_err(|e| Error::Cell {
            cell,
            rep,
            p0,
            h,
            source: Box::new(e),
        })
    })
    .into_iter()
    .collect()
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn nth<T: ToString>(v: &[T], i: usize) -> String {
    v.get(i).map(ToString::to_string).unwrap_or_default()
}

pub fn write_records<W: std::io::Write>(out: W, records: &[ElectionRecord]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RECORDS_HEADER.split(','))?;
    for r in records {
        w.write_record([
            r.seed.to_string(),
            r.cliques.to_string(),
            r.clique_size.to_string(),
            r.p0.to_string(),
            r.h.to_string(),
            nth(&r.counts, 0),
            nth(&r.counts, 1),
            nth(&r.counts, 2),
            nth(&r.ig, 0),
            nth(&r.ig, 1),
            nth(&r.ig, 2),
            opt(r.majority),
            opt(r.dvs),
            opt(r.eg),
            nth(&r.final_skew, 0),
            nth(&r.final_skew, 1),
            nth(&r.final_skew, 2),
            r.winner.clone(),
        ])?;
    }
    w.flush()
}

pub fn records_to_string(records: &[ElectionRecord]) -> String {
    let mut buf = Vec::new();
    write_records(&mut buf, records).expect("writing to memory");
    String::from_utf8(buf).expect("csv output is utf-8")
}

pub fn read_records<R: std::io::Read>(input: R) -> Result<Vec<ElectionRecord>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = rdr
        .headers()
        .map_err(|e| Error::Parse { line: 1, msg: e.to_string() })?
        .iter()
        .collect::<Vec<_>>()
        .join(",");
    if header != RECORDS_HEADER {
        return Err(Error::Parse { line: 1, msg: format!("unexpected header `{header}`") });
    }
    let mut out = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let line = i + 2;
        let row = row.map_err(|e| Error::Parse { line, msg: e.to_string() })?;
        let field = |j: usize| row.get(j).unwrap_or("");
        let num = |j: usize| -> Result<Option<f64>> {
            match field(j) {
                "" => Ok(None),
                s => s
                    .parse()
                    .map(Some)
                    .map_err(|_| Error::Parse { line, msg: format!("bad number `{s}`") }),
            }
        };
        let int = |j: usize| -> Result<Option<usize>> {
            match field(j) {
                "" => Ok(None),
                s => s
                    .parse()
                    .map(Some)
                    .map_err(|_| Error::Parse { line, msg: format!("bad integer `{s}`") }),
            }
        };
        let req = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| Error::Parse { line, msg: format!("missing {name}") })
        };
        let counts: Vec<usize> = (5..8).map(int).collect::<Result<Vec<_>>>()?.into_iter().flatten().collect();
        let k = counts.len();
        if k < 2 {
            return Err(Error::Parse { line, msg: "need at least two party counts".into() });
        }
        let take = |start: usize, name: &str| -> Result<Vec<f64>> {
            (start..start + k).map(|j| num(j).and_then(|v| req(v, name))).collect()
        };
        out.push(ElectionRecord {
            seed: field(0).parse().map_err(|_| Error::Parse { line, msg: "bad seed".into() })?,
            cliques: int(1)?.ok_or_else(|| Error::Parse { line, msg: "missing l".into() })?,
            clique_size: int(2)?.ok_or_else(|| Error::Parse { line, msg: "missing k".into() })?,
            p0: req(num(3)?, "p0")?,
            h: req(num(4)?, "h")?,
            counts,
            ig: take(8, "ig")?,
            majority: num(11)?,
            dvs: num(12)?,
            eg: num(13)?,
            final_skew: take(14, "final skew")?,
            winner: field(17).to_string(),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(seed: u64) -> SweepConfig {
        SweepConfig {
            p0_grid: vec![0.0, 1.0],
            h_grid: vec![0.2, 0.8],
            elections_per_cell: 5,
            ..SweepConfig::two_party(Seed(seed))
        }
    }

    #[test]
    fn count_rules() {
        let r = CountRule::RedRange { min: 10, max: 16 }.options(20).unwrap();
        assert_eq!(r.len(), 7);
        assert_eq!(r[6], vec![16, 4]);
        let c = CountRule::Compositions { parties: 3, min: 1 }.options(20).unwrap();
        assert_eq!(c.len(), 171);
        assert!(c.iter().all(|v| v.iter().sum::<usize>() == 20 && !v.contains(&0)));
        assert!(CountRule::Choice(vec![vec![10, 10, 1]]).options(20).is_err());
        assert!(CountRule::Choice(vec![vec![20]]).options(20).is_err());
        assert!(CountRule::RedRange { min: 12, max: 10 }.options(20).is_err());
        assert!(CountRule::Choice(vec![vec![10, 10], vec![5, 5, 10]]).options(20).is_err());
    }

    #[test]
    fn one_cell_one_record() {
        let cfg = SweepConfig {
            p0_grid: vec![0.4],
            h_grid: vec![0.6],
            elections_per_cell: 1,
            ..SweepConfig::two_party(Seed(1))
        };
        let recs = run_batch(&cfg, Execution::Sequential).unwrap();
        assert_eq!(recs.len(), 1);
        let r = &recs[0];
        assert!(r.majority.is_some() && r.dvs.is_some() && r.eg.is_some());
        assert_eq!(r.ig.len(), 2);
        assert_eq!(r.ig[0], -r.ig[1]);
        assert!(r.ig.iter().chain(&r.final_skew).all(|x| x.is_finite()));
    }

    #[test]
    fn per_cell_counts_and_fields() {
        let cfg = small(3);
        let recs = run_batch(&cfg, Execution::Sequential).unwrap();
        assert_eq!(recs.len(), 20);
        for (c, (p0, h)) in cfg.cells().into_iter().enumerate() {
            let cell = &recs[c * 5..(c + 1) * 5];
            assert!(cell.iter().all(|r| r.p0 == p0 && r.h == h));
        }
        let three = SweepConfig { counts: CountRule::Compositions { parties: 3, min: 1 }, ..small(3) };
        for r in run_batch(&three, Execution::Sequential).unwrap() {
            assert_eq!((r.ig.len(), r.final_skew.len()), (3, 3));
            assert!(r.majority.is_none() && r.dvs.is_none() && r.eg.is_none());
            assert!((r.final_skew.iter().sum::<f64>() + 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn csv_is_deterministic_and_parses_back() {
        let a = records_to_string(&run_batch(&small(9), Execution::Sequential).unwrap());
        let b = records_to_string(&run_batch(&small(9), Execution::with_workers(3)).unwrap());
        assert_eq!(a, b);
        assert!(a.starts_with(RECORDS_HEADER));
        let back = read_records(a.as_bytes()).unwrap();
        assert_eq!(records_to_string(&back), a);
        assert_ne!(a, records_to_string(&run_batch(&small(10), Execution::Sequential).unwrap()));
    }

    #[test]
    fn bad_header_is_rejected() {
        assert!(read_records("seed,l\n1,2\n".as_bytes()).is_err());
    }

    #[test]
    fn errors_carry_cell_context() {
        let cfg = SweepConfig { p0_grid: vec![1.5], ..small(0) };
        assert!(run_batch(&cfg, Execution::Sequential).is_err());
        let cfg = SweepConfig { elections_per_cell: 0, ..small(0) };
        assert!(run_batch(&cfg, Execution::Sequential).is_err());
    }
}
