//! Mean absolute influence gap over the `(p0, h)` plane under equal
//! representation.

use serde::Serialize;

use super::exec::Execution;
use crate::error::{invalid, Result};
use crate::graph::{generate_hrc, HrcParams, PartyAssignment, PartyId};
use crate::metrics::{influence_gaps, AssortmentConvention};
use crate::seed::Seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurfacePoint {
    pub p0: f64,
    pub h: f64,
    pub mean_abs_gap: f64,
    pub samples: usize,
    pub std_err: f64,
}

pub const SURFACE_HEADER: &str = "p0,h,mean_abs_gap,samples,std_err";

#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceConfig {
    pub p0_grid: Vec<f64>,
    pub h_grid: Vec<f64>,
    pub samples: usize,
    pub cliques: usize,
    pub clique_size: usize,
    pub assortment: AssortmentConvention,
    pub seed: Seed,
}

impl SurfaceConfig {
    pub fn new(seed: Seed) -> Self {
        SurfaceConfig {
            p0_grid: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            h_grid: (0..=10).map(|i| f64::from(i) / 10.0).collect(),
            samples: 300,
            cliques: 10,
            clique_size: 10,
            assortment: AssortmentConvention::default(),
            seed,
        }
    }
}

/// `|G|` of the party with the higher assortment, i.e. `|A_R - A_B|`.
fn abs_gap(cfg: &SurfaceConfig, p0: f64, h: f64, sample: usize) -> Result<f64> {
    let n = cfg.cliques * cfg.clique_size;
    let half = n / 2;
    let counts = [("red".to_string(), half), ("blue".to_string(), half)];
    // Assignment and graph seeds depend on the sample only, so every grid
    // point sees the same assignments and the same rewiring draws.
    let base = cfg.seed.child(0, sample as u64);
    let assignment = PartyAssignment::strong(&counts, n, base.child(0, 0))?;
    let params = HrcParams::new(cfg.cliques, cfg.clique_size, p0, h);
    let graph = generate_hrc(&params, &assignment, base.child(1, 0))?;
    let gaps = influence_gaps::<f64>(&graph, &assignment, cfg.assortment)?;
    Ok(gaps[PartyId(0).0].abs())
}

pub fn surface_mean_abs_gap(cfg: &SurfaceConfig, exec: Execution) -> Result<Vec<SurfacePoint>> {
    let n = cfg.cliques * cfg.clique_size;
    if n == 0 || n % 2 == 1 {
        return Err(invalid(format!("equal representation needs an even, positive node count, got {n}")));
    }
    if cfg.samples == 0 {
        return Err(invalid("need at least one sample per point"));
    }
    if cfg.p0_grid.is_empty() || cfg.h_grid.is_empty() {
        return Err(invalid("parameter grids must be nonempty"));
    }
    let points: Vec<(f64, f64)> = cfg
        .p0_grid
        .iter()
        .flat_map(|&p0| cfg.h_grid.iter().map(move |&h| (p0, h)))
        .collect();
    for &(p0, h) in &points {
        HrcParams::new(cfg.cliques, cfg.clique_size, p0, h).validate()?;
    }
    let s = cfg.samples;
    let values = exec
        .map(points.len() * s, |i| abs_gap(cfg, points[i / s].0, points[i / s].1, i % s))
        .into_iter()
        .collect::<Result<Vec<f64>>>()?;
    Ok(points
        .iter()
        .zip(values.chunks(s))
        .map(|(&(p0, h), xs)| {
            let mean = xs.iter().sum::<f64>() / s as f64;
            let std_err = if s > 1 {
                let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (s - 1) as f64;
                (var / s as f64).sqrt()
            } else {
                0.0
            };
            SurfacePoint { p0, h, mean_abs_gap: mean, samples: s, std_err }
        })
        .collect())
}

pub fn surface_to_csv(points: &[SurfacePoint]) -> String {
    let mut out = String::from(SURFACE_HEADER);
    out.push('\n');
    for p in points {
        out.push_str(&format!("{},{},{},{},{}\n", p.p0, p.h, p.mean_abs_gap, p.samples, p.std_err));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(seed: u64) -> SurfaceConfig {
        SurfaceConfig {
            p0_grid: vec![0.0, 1.0],
            h_grid: vec![0.0, 0.3, 1.0],
            samples: 20,
            cliques: 4,
            clique_size: 4,
            ..SurfaceConfig::new(Seed(seed))
        }
    }

    #[test]
    fn zero_rewiring_column_ignores_homophily() {
        let pts = surface_mean_abs_gap(&small(1), Execution::Sequential).unwrap();
        assert_eq!(pts.len(), 6);
        let col: Vec<_> = pts.iter().filter(|p| p.p0 == 0.0).collect();
        assert!(col.iter().all(|p| p.mean_abs_gap == col[0].mean_abs_gap && p.std_err == col[0].std_err));
        assert!(pts.iter().all(|p| p.mean_abs_gap >= 0.0 && p.samples == 20));
    }

    #[test]
    fn parallel_matches_sequential() {
        let a = surface_mean_abs_gap(&small(2), Execution::Sequential).unwrap();
        let b = surface_mean_abs_gap(&small(2), Execution::with_workers(4)).unwrap();
        assert_eq!(surface_to_csv(&a), surface_to_csv(&b));
    }

    #[test]
    fn std_err_shrinks_with_samples() {
        let mut cfg = small(3);
        cfg.p0_grid = vec![1.0];
        cfg.h_grid = vec![0.3];
        cfg.samples = 50;
        let few = surface_mean_abs_gap(&cfg, Execution::Sequential).unwrap()[0].std_err;
        cfg.samples = 800;
        let many = surface_mean_abs_gap(&cfg, Execution::Sequential).unwrap()[0].std_err;
        let ratio = few / many;
        assert!(ratio > 2.5 && ratio < 6.0, "{ratio}");
    }

    #[test]
    fn odd_node_count_is_rejected() {
        let cfg = SurfaceConfig { cliques: 3, clique_size: 3, ..small(0) };
        assert!(surface_mean_abs_gap(&cfg, Execution::Sequential).is_err());
        let cfg = SurfaceConfig { samples: 0, ..small(0) };
        assert!(surface_mean_abs_gap(&cfg, Execution::Sequential).is_err());
    }
}
