//! Flat TOML configuration for sweeps and surfaces. The same structs double
//! as CLI flag groups; a flag given on the command line overrides the file.

use std::path::{Path, PathBuf};

use clap::Args;
use serde::Deserialize;

use super::surface::SurfaceConfig;
use super::sweep::{CountRule, SweepConfig};
use crate::dynamics::BehaviorDistribution;
use crate::error::{invalid, Result};
use crate::metrics::AssortmentConvention;
use crate::seed::Seed;

macro_rules! overlay {
    ($ty:ident { $($field:ident),+ $(,)? }) => {
        impl $ty {
            /// Fields set in `other` win.
            pub fn overlay(self, other: $ty) -> $ty {
                $ty { $($field: other.$field.or(self.$field)),+ }
            }
        }
    };
}

pub fn read_toml<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct SweepFile {
    /// Rewire probabilities, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub p0_grid: Option<Vec<f64>>,
    /// Homophily factors, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub h_grid: Option<Vec<f64>>,
    #[arg(long)]
    pub elections_per_cell: Option<usize>,
    #[arg(long)]
    pub cliques: Option<usize>,
    #[arg(long)]
    pub clique_size: Option<usize>,
    /// 2 or 3.
    #[arg(long)]
    pub parties: Option<usize>,
    /// Two parties: smallest red count.
    #[arg(long)]
    pub n_red_min: Option<usize>,
    /// Two parties: largest red count.
    #[arg(long)]
    pub n_red_max: Option<usize>,
    /// Three parties: smallest size of any party.
    #[arg(long)]
    pub min_party_size: Option<usize>,
    #[arg(long)]
    pub duration: Option<f64>,
    #[arg(long)]
    pub cutoff: Option<f64>,
    #[arg(long)]
    pub tick: Option<f64>,
    #[arg(long)]
    pub threshold: Option<f64>,
    /// current or assigned.
    #[arg(long)]
    pub stick: Option<String>,
    /// Beta concentration of the surrogate strategy distribution.
    #[arg(long)]
    pub concentration: Option<f64>,
    /// TOML file with strategy means or empirical samples.
    #[arg(long)]
    pub strategies: Option<PathBuf>,
    #[arg(long)]
    pub assortment: Option<String>,
}

overlay!(SweepFile {
    p0_grid,
    h_grid,
    elections_per_cell,
    cliques,
    clique_size,
    parties,
    n_red_min,
    n_red_max,
    min_party_size,
    duration,
    cutoff,
    tick,
    threshold,
    stick,
    concentration,
    strategies,
    assortment,
});

impl SweepFile {
    pub fn into_config(self, seed: Seed) -> Result<SweepConfig> {
        let mut cfg = match self.parties.unwrap_or(2) {
            2 => SweepConfig::two_party(seed),
            3 => SweepConfig::three_party(seed),
            p => return Err(invalid(format!("sweeps support 2 or 3 parties, got {p}"))),
        };
        if self.parties == Some(3) && (self.n_red_min.is_some() || self.n_red_max.is_some()) {
            return Err(invalid("n_red_min/n_red_max apply to two-party sweeps"));
        }
        if self.parties.unwrap_or(2) == 2 && self.min_party_size.is_some() {
            return Err(invalid("min_party_size applies to three-party sweeps"));
        }
        cfg.p0_grid = self.p0_grid.unwrap_or(cfg.p0_grid);
        cfg.h_grid = self.h_grid.unwrap_or(cfg.h_grid);
        cfg.elections_per_cell = self.elections_per_cell.unwrap_or(cfg.elections_per_cell);
        cfg.cliques = self.cliques.unwrap_or(cfg.cliques);
        cfg.clique_size = self.clique_size.unwrap_or(cfg.clique_size);
        cfg.counts = match cfg.counts {
            CountRule::RedRange { min, max } => CountRule::RedRange {
                min: self.n_red_min.unwrap_or(min),
                max: self.n_red_max.unwrap_or(max),
            },
            CountRule::Compositions { parties, min } => CountRule::Compositions {
                parties,
                min: self.min_party_size.unwrap_or(min),
            },
            other => other,
        };
        let e = &mut cfg.election;
        e.duration = self.duration.unwrap_or(e.duration);
        e.cutoff = self.cutoff.unwrap_or(e.cutoff);
        e.tick = self.tick.unwrap_or(e.tick);
        e.threshold = self.threshold.unwrap_or(e.threshold);
        if let Some(s) = &self.stick {
            e.stick = s.parse()?;
        }
        if let Some(path) = &self.strategies {
            let text = std::fs::read_to_string(path)
                .map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
            cfg.behavior = BehaviorDistribution::from_toml(&text)?;
        }
        if let Some(nu) = self.concentration {
            cfg.behavior.concentration = nu;
        }
        if let Some(a) = &self.assortment {
            cfg.assortment = a.parse::<AssortmentConvention>()?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct SurfaceFile {
    #[arg(long, value_delimiter = ',')]
    pub p0_grid: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub h_grid: Option<Vec<f64>>,
    /// Assignment/graph pairs per grid point.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub cliques: Option<usize>,
    #[arg(long)]
    pub clique_size: Option<usize>,
    #[arg(long)]
    pub assortment: Option<String>,
}

overlay!(SurfaceFile { p0_grid, h_grid, samples, cliques, clique_size, assortment });

impl SurfaceFile {
    pub fn into_config(self, seed: Seed) -> Result<SurfaceConfig> {
        let d = SurfaceConfig::new(seed);
        Ok(SurfaceConfig {
            p0_grid: self.p0_grid.unwrap_or(d.p0_grid),
            h_grid: self.h_grid.unwrap_or(d.h_grid),
            samples: self.samples.unwrap_or(d.samples),
            cliques: self.cliques.unwrap_or(d.cliques),
            clique_size: self.clique_size.unwrap_or(d.clique_size),
            assortment: match &self.assortment {
                Some(a) => a.parse()?,
                None => d.assortment,
            },
            seed,
        })
    }
}
