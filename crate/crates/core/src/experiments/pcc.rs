//! Per-cell correlation between initial predictors and the final skew.

use serde::Serialize;

use super::stats::pearson;
use super::sweep::{ElectionRecord, PARTY_NAMES};
use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PccMetric {
    /// `N_P - N/2`.
    Majority,
    /// Raw initial vote count `N_P`.
    PartyVotes,
    InfluenceGap,
    /// Two-party records only.
    Dvs,
    /// Two-party records only.
    EfficiencyGap,
}

impl PccMetric {
    pub const ALL: [PccMetric; 5] = [
        PccMetric::Majority,
        PccMetric::PartyVotes,
        PccMetric::InfluenceGap,
        PccMetric::Dvs,
        PccMetric::EfficiencyGap,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PccMetric::Majority => "majority",
            PccMetric::PartyVotes => "party-votes",
            PccMetric::InfluenceGap => "influence-gap",
            PccMetric::Dvs => "dvs",
            PccMetric::EfficiencyGap => "efficiency-gap",
        }
    }

    /// Value of the metric for `party` in one record. Two-party dVS and EG
    /// are stored toward red; blue's value is the negation.
    pub fn value(self, r: &ElectionRecord, party: usize) -> Option<f64> {
        let signed = |v: Option<f64>| {
            v.filter(|_| r.party_count() == 2).map(|x| if party == 0 { x } else { -x })
        };
        match self {
            PccMetric::Majority => Some(r.counts[party] as f64 - r.node_count() as f64 / 2.0),
            PccMetric::PartyVotes => Some(r.counts[party] as f64),
            PccMetric::InfluenceGap => r.ig.get(party).copied(),
            PccMetric::Dvs => signed(r.dvs),
            PccMetric::EfficiencyGap => signed(r.eg),
        }
    }
}

impl std::str::FromStr for PccMetric {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        PccMetric::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| invalid(format!("unknown metric `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PccEntry {
    pub p0: f64,
    pub h: f64,
    pub party: String,
    pub metric: PccMetric,
    pub records: usize,
    /// `None` when the correlation is undefined; `degenerate` says why.
    pub pcc: Option<f64>,
    pub degenerate: Option<String>,
}

/// Cells in order of first appearance.
pub fn group_by_cell(records: &[ElectionRecord]) -> Vec<((f64, f64), Vec<&ElectionRecord>)> {
    let mut groups: Vec<((f64, f64), Vec<&ElectionRecord>)> = Vec::new();
    for r in records {
        match groups.iter_mut().find(|(k, _)| k.0 == r.p0 && k.1 == r.h) {
            Some((_, g)) => g.push(r),
            None => groups.push(((r.p0, r.h), vec![r])),
        }
    }
    groups
}

/// PCC of each metric against each party's final skew, per `(p0, h)` cell.
/// Metrics that a cell's records do not define are skipped; undefined
/// correlations are kept with a reason.
pub fn pcc_curves(records: &[ElectionRecord], metrics: &[PccMetric], parties: &[usize]) -> Result<Vec<PccEntry>> {
    let mut out = Vec::new();
    for ((p0, h), group) in group_by_cell(records) {
        let k = group[0].party_count();
        if group.iter().any(|r| r.party_count() != k) {
            return Err(invalid(format!("cell (p0={p0}, h={h}) mixes party counts")));
        }
        for &party in parties.iter().filter(|&&p| p < k) {
            let skew: Vec<f64> = group.iter().map(|r| r.final_skew[party]).collect();
            for &metric in metrics {
                let Some(xs) = group.iter().map(|r| metric.value(r, party)).collect::<Option<Vec<f64>>>() else {
                    continue;
                };
                let (pcc, degenerate) = match pearson(&xs, &skew) {
                    Ok(v) => (Some(v), None),
                    Err(e) => (None, Some(e.to_string())),
                };
                out.push(PccEntry {
                    p0,
                    h,
                    party: PARTY_NAMES[party].to_string(),
                    metric,
                    records: group.len(),
                    pcc,
                    degenerate,
                });
            }
        }
    }
    Ok(out)
}

pub fn pcc_to_csv(entries: &[PccEntry]) -> String {
    let mut out = String::from("p0,h,party,metric,records,pcc,degenerate\n");
    for e in entries {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            e.p0,
            e.h,
            e.party,
            e.metric.as_str(),
            e.records,
            e.pcc.map(|v| v.to_string()).unwrap_or_default(),
            e.degenerate.as_deref().unwrap_or("").replace(',', ";"),
        ));
    }
    out
}
