//! Pearson correlation and least-squares regression.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::seed::Seed;

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample Pearson correlation. Constant inputs are an error, not zero.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(invalid(format!("pearson: lengths differ ({} vs {})", xs.len(), ys.len())));
    }
    if xs.len() < 2 {
        return Err(Error::UndefinedCorrelation("fewer than two observations".into()));
    }
    let (mx, my) = (mean(xs), mean(ys));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::UndefinedCorrelation("constant input".into()));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Least-squares fit `y = X beta + intercept` on all rows.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearFit {
    pub coefficients: Vec<f64>,
    pub intercept: f64,
}

impl LinearFit {
    pub fn predict(&self, row: &[f64]) -> f64 {
        self.intercept + row.iter().zip(&self.coefficients).map(|(x, b)| x * b).sum::<f64>()
    }
}

/// Solves via thin QR of the design matrix with an intercept column.
pub fn least_squares(rows: &[Vec<f64>], target: &[f64]) -> Result<LinearFit> {
    let n = rows.len();
    if n != target.len() {
        return Err(invalid("feature rows and target differ in length"));
    }
    let p = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != p) {
        return Err(invalid("ragged feature rows"));
    }
    if n < p + 1 {
        return Err(invalid(format!("{n} rows cannot fit {} parameters", p + 1)));
    }
    let design = DMatrix::from_fn(n, p + 1, |i, j| if j < p { rows[i][j] } else { 1.0 });
    let y = DVector::from_column_slice(target);
    let scale: Vec<f64> = design.column_iter().map(|c| c.norm()).collect();
    let qr = design.qr();
    let r = qr.r();
    for j in 0..=p {
        if scale[j] == 0.0 || r[(j, j)].abs() <= 1e-10 * scale[j] {
            return Err(Error::RankDeficient);
        }
    }
    let qty = qr.q().transpose() * y;
    let beta = r.solve_upper_triangular(&qty).ok_or(Error::RankDeficient)?;
    Ok(LinearFit {
        coefficients: beta.iter().take(p).copied().collect(),
        intercept: beta[p],
    })
}

pub fn r_squared(fit: &LinearFit, rows: &[Vec<f64>], target: &[f64]) -> Result<f64> {
    let m = mean(target);
    let ss_tot: f64 = target.iter().map(|y| (y - m).powi(2)).sum();
    if ss_tot == 0.0 {
        return Err(invalid("R^2 undefined for a constant target"));
    }
    let ss_res: f64 = rows.iter().zip(target).map(|(r, y)| (y - fit.predict(r)).powi(2)).sum();
    Ok(1.0 - ss_res / ss_tot)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegressionResult {
    pub coefficients: Vec<f64>,
    pub intercept: f64,
    /// Coefficient of determination on the held-out rows.
    pub r_squared: f64,
    pub train_r_squared: f64,
    pub train_fraction: f64,
    pub train_rows: usize,
    pub test_rows: usize,
}

/// Split row indices with a seeded shuffle: `(train, test)`.
pub fn train_test_split(n: usize, train_fraction: f64, seed: Seed) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(invalid(format!("train fraction must lie in (0, 1), got {train_fraction}")));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut seed.rng());
    let cut = (n as f64 * train_fraction).round() as usize;
    let test = idx.split_off(cut.min(n));
    Ok((idx, test))
}

/// OLS with intercept on a seeded train split; R^2 reported on the rest.
pub fn ols_fit(rows: &[Vec<f64>], target: &[f64], train_fraction: f64, seed: Seed) -> Result<RegressionResult> {
    if rows.len() != target.len() {
        return Err(invalid("feature rows and target differ in length"));
    }
    let (train, test) = train_test_split(rows.len(), train_fraction, seed)?;
    if test.len() < 2 {
        return Err(invalid("test split needs at least two rows"));
    }
    let pick = |idx: &[usize]| -> (Vec<Vec<f64>>, Vec<f64>) {
        (idx.iter().map(|&i| rows[i].clone()).collect(), idx.iter().map(|&i| target[i]).collect())
    };
    let (xtr, ytr) = pick(&train);
    let (xte, yte) = pick(&test);
    let fit = least_squares(&xtr, &ytr)?;
    Ok(RegressionResult {
        r_squared: r_squared(&fit, &xte, &yte)?,
        train_r_squared: r_squared(&fit, &xtr, &ytr)?,
        coefficients: fit.coefficients,
        intercept: fit.intercept,
        train_fraction,
        train_rows: train.len(),
        test_rows: test.len(),
    })
}
