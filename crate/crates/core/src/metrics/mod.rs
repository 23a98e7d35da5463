//! Influence assortment and influence gap, for any number of parties.
//!
//! All computations are generic over [`Scalar`] so the same code path runs in
//! `f64` for experiments and in exact rationals for small-graph checks.
//! Plurality decisions are made on integer poll counts, never on floats.

mod benchmark;
mod closed;

use std::fmt;
use std::ops::Neg;
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::Num;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::graph::{poll_counts, Graph, PartyAssignment, PartyId};

pub use benchmark::{
    deterministic_vote_shares, deterministic_voter_skew, efficiency_gap, initial_majority,
    MetricReport,
};
pub use closed::{
    caveman_assortments_closed, caveman_gap_closed, clique_gap, equal_rep_gap, plurality_core_gap,
    CliqueCounts,
};

pub trait Scalar: Num + Neg<Output = Self> + Copy + PartialOrd + fmt::Debug {
    fn ratio(num: i64, den: i64) -> Self;
}

impl Scalar for f64 {
    fn ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
}

impl Scalar for Rational64 {
    fn ratio(num: i64, den: i64) -> Self {
        Rational64::new(num, den)
    }
}

/// How a node that does not hold plurality in its own poll is penalised.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AssortmentConvention {
    /// Minus the poll share of the dominant party.
    #[default]
    DominantNegative,
    /// Minus the combined share of every party other than the node's own.
    ComplementNegative,
}

/// Which rival a party's assortment is compared against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GapConvention {
    /// The most influential other party (largest assortment).
    #[default]
    VsMostInfluential,
    /// Every other party tied for the largest vote count. May yield several values.
    VsPluralityRunnerUp,
}

macro_rules! kebab_enum {
    ($ty:ty { $($variant:ident => $name:literal),+ $(,)? }) => {
        impl $ty {
            pub const ALL: &'static [$ty] = &[$(<$ty>::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self { $(<$ty>::$variant => $name),+ }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $ty {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($name => Ok(<$ty>::$variant),)+
                    _ => Err(invalid(format!("unknown convention `{s}`"))),
                }
            }
        }
    };
}

kebab_enum!(AssortmentConvention {
    DominantNegative => "dominant-negative",
    ComplementNegative => "complement-negative",
});

kebab_enum!(GapConvention {
    VsMostInfluential => "vs-most-influential",
    VsPluralityRunnerUp => "vs-plurality-runner-up",
});

/// Node assortment from integer poll counts. Ties for the top count count as
/// holding plurality.
fn assortment_from_counts<T: Scalar>(
    counts: &[usize],
    own: PartyId,
    poll_size: usize,
    conv: AssortmentConvention,
) -> T {
    let own_count = counts[own.0];
    let top = counts.iter().copied().max().unwrap_or(0);
    let size = poll_size as i64;
    if own_count == top {
        T::ratio(own_count as i64, size)
    } else {
        match conv {
            AssortmentConvention::DominantNegative => -T::ratio(top as i64, size),
            AssortmentConvention::ComplementNegative => -T::ratio(size - own_count as i64, size),
        }
    }
}

/// Node assortment against an arbitrary vote vector.
pub fn node_assortment_votes<T: Scalar>(
    graph: &Graph,
    votes: &[PartyId],
    party_count: usize,
    n: usize,
    conv: AssortmentConvention,
) -> T {
    let mut counts = vec![0; party_count];
    let size = poll_counts(graph, votes, n, &mut counts);
    assortment_from_counts(&counts, votes[n], size, conv)
}

pub fn node_assortment<T: Scalar>(
    graph: &Graph,
    assignment: &PartyAssignment,
    n: usize,
    conv: AssortmentConvention,
) -> T {
    node_assortment_votes(graph, assignment.votes(), assignment.party_count(), n, conv)
}

/// Party assortment of every party, indexed by party id.
pub fn party_assortments<T: Scalar>(
    graph: &Graph,
    assignment: &PartyAssignment,
    conv: AssortmentConvention,
) -> Vec<T> {
    let k = assignment.party_count();
    let mut sums = vec![T::zero(); k];
    let mut counts = vec![0; k];
    let votes = assignment.votes();
    for n in 0..graph.node_count() {
        let size = poll_counts(graph, votes, n, &mut counts);
        let own = votes[n];
        sums[own.0] = sums[own.0] + assortment_from_counts::<T>(&counts, own, size, conv);
    }
    sums.into_iter()
        .enumerate()
        .map(|(p, s)| s / T::ratio(assignment.count(PartyId(p)) as i64, 1))
        .collect()
}

pub fn party_assortment<T: Scalar>(
    graph: &Graph,
    assignment: &PartyAssignment,
    party: PartyId,
    conv: AssortmentConvention,
) -> Result<T> {
    check_party(assignment, party)?;
    Ok(party_assortments(graph, assignment, conv)[party.0])
}

fn check_party(assignment: &PartyAssignment, party: PartyId) -> Result<()> {
    if party.0 < assignment.party_count() {
        Ok(())
    } else {
        Err(Error::UnknownParty(format!("#{}", party.0)))
    }
}

fn max_of<T: Scalar>(it: impl Iterator<Item = T>) -> Option<T> {
    it.fold(None, |acc, x| match acc {
        Some(m) if m >= x => Some(m),
        _ => Some(x),
    })
}

/// Gap of `party` given precomputed party assortments. The result is sorted
/// and deduplicated; it has one element under `VsMostInfluential`.
pub fn gap_from_assortments<T: Scalar>(
    assortments: &[T],
    assignment: &PartyAssignment,
    party: PartyId,
    conv: GapConvention,
) -> Result<Vec<T>> {
    check_party(assignment, party)?;
    if assignment.party_count() < 2 {
        return Err(invalid("influence gap needs at least two parties"));
    }
    let others = || (0..assortments.len()).filter(move |&q| q != party.0);
    let own = assortments[party.0];
    let mut out: Vec<T> = match conv {
        GapConvention::VsMostInfluential => {
            vec![own - max_of(others().map(|q| assortments[q])).expect("two parties")]
        }
        GapConvention::VsPluralityRunnerUp => {
            let counts = assignment.counts();
            let top = others().map(|q| counts[q]).max().expect("two parties");
            others()
                .filter(|&q| counts[q] == top)
                .map(|q| own - assortments[q])
                .collect()
        }
    };
    out.sort_by(|a, b| a.partial_cmp(b).expect("gap values are comparable"));
    out.dedup();
    Ok(out)
}

pub fn influence_gap<T: Scalar>(
    graph: &Graph,
    assignment: &PartyAssignment,
    party: PartyId,
    aconv: AssortmentConvention,
    gconv: GapConvention,
) -> Result<Vec<T>> {
    let a = party_assortments(graph, assignment, aconv);
    gap_from_assortments(&a, assignment, party, gconv)
}

/// Single-valued gap of every party (most-influential rival).
pub fn influence_gaps<T: Scalar>(
    graph: &Graph,
    assignment: &PartyAssignment,
    aconv: AssortmentConvention,
) -> Result<Vec<T>> {
    let a = party_assortments(graph, assignment, aconv);
    (0..assignment.party_count())
        .map(|p| {
            gap_from_assortments(&a, assignment, PartyId(p), GapConvention::VsMostInfluential)
                .map(|v| v[0])
        })
        .collect()
}
