//! Power-law scaling fits on log-log axes, exponent classification,
//! log-residual rankings and log-normal distribution fits.
//!
//! `A = a * p^beta` is fitted as ordinary least squares of `log10 A` on
//! `log10 p`. Rows with `A = 0` cannot be logged; they are skipped and
//! counted in [`ScalingFit::excluded_zero_rows`].

use std::fmt;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};
use statrs::function::erf::erf;
use thiserror::Error;

use crate::metrics::AttractivenessTable;

/// `|beta - 1|` at or below this is classified as linear.
pub const LINEAR_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum FitError {
    #[error("need at least {needed} usable rows, have {have}")]
    TooFewRows { needed: usize, have: usize },
    #[error("log population has zero variance; slope is undefined")]
    ZeroVariance,
    #[error("value #{index} ({value}) is not positive")]
    NonPositive { index: usize, value: f64 },
    #[error("histogram needs at least 2 bins, got {0}")]
    TooFewBins(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    Sublinear,
    Linear,
    Superlinear,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::Sublinear => "sublinear",
            Classification::Linear => "linear",
            Classification::Superlinear => "superlinear",
        })
    }
}

pub fn classify(beta: f64) -> Classification {
    if (beta - 1.0).abs() <= LINEAR_TOLERANCE {
        Classification::Linear
    } else if beta < 1.0 {
        Classification::Sublinear
    } else {
        Classification::Superlinear
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub beta: f64,
    /// Base-10 log of the prefactor `a`.
    pub log_a: f64,
    /// 95% t-interval on beta; absent when `n < 3`.
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    pub r2: f64,
    pub n: usize,
    pub classification: Classification,
    pub excluded_zero_rows: usize,
    /// Standard error of the slope; absent when `n < 3`.
    #[serde(skip)]
    pub se_beta: Option<f64>,
}

impl ScalingFit {
    pub fn expected_log10(&self, population: f64) -> f64 {
        self.log_a + self.beta * population.log10()
    }

    pub fn ci_contains(&self, beta: f64) -> bool {
        matches!((self.ci_low, self.ci_high), (Some(lo), Some(hi)) if lo <= beta && beta <= hi)
    }
}

/// Two-sided 95% Student-t critical value.
pub fn t_critical_95(df: usize) -> f64 {
    StudentsT::new(0.0, 1.0, df as f64).expect("degrees of freedom are positive").inverse_cdf(0.975)
}

/// OLS of `log10 A` on `log10 p`. Two usable rows give an exact line with
/// no interval; fewer than two is an error.
pub fn fit_power_law(table: &AttractivenessTable) -> Result<ScalingFit, FitError> {
    let usable: Vec<(f64, f64)> =
        table.rows.iter().filter(|r| r.attractiveness > 0.0).map(|r| (r.population.log10(), r.attractiveness.log10())).collect();
    let excluded_zero_rows = table.rows.len() - usable.len();
    let n = usable.len();
    if n < 2 {
        return Err(FitError::TooFewRows { needed: 2, have: n });
    }
    let nf = n as f64;
    let x_mean = usable.iter().map(|p| p.0).sum::<f64>() / nf;
    let y_mean = usable.iter().map(|p| p.1).sum::<f64>() / nf;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in &usable {
        let (dx, dy) = (x - x_mean, y - y_mean);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(FitError::ZeroVariance);
    }
    let beta = sxy / sxx;
    let log_a = y_mean - beta * x_mean;
    let ssr: f64 = usable.iter().map(|&(x, y)| (y - log_a - beta * x).powi(2)).sum();
    let r2 = if syy == 0.0 { 1.0 } else { (1.0 - ssr / syy).clamp(0.0, 1.0) };

    let (se_beta, ci_low, ci_high) = if n >= 3 {
        let se = (ssr / (nf - 2.0) / sxx).sqrt();
        let half = t_critical_95(n - 2) * se;
        (Some(se), Some(beta - half), Some(beta + half))
    } else {
        (None, None, None)
    };

    Ok(ScalingFit { beta, log_a, ci_low, ci_high, r2, n, classification: classify(beta), excluded_zero_rows, se_beta })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualRow {
    pub region_id: String,
    /// `log10(observed) - log10(expected)`; positive means over-performing.
    pub residual: f64,
}

/// Residuals of every fitted row, largest first (ties by region_id).
pub fn residuals(table: &AttractivenessTable, fit: &ScalingFit) -> Vec<ResidualRow> {
    let mut out: Vec<ResidualRow> = table
        .rows
        .iter()
        .filter(|r| r.attractiveness > 0.0)
        .map(|r| ResidualRow {
            region_id: r.region_id.clone(),
            residual: r.attractiveness.log10() - fit.expected_log10(r.population),
        })
        .collect();
    out.sort_by(|a, b| b.residual.total_cmp(&a.residual).then_with(|| a.region_id.cmp(&b.region_id)));
    out
}

/// Moments of the natural logs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogNormalFit {
    pub mu: f64,
    /// Sample (n - 1) standard deviation.
    pub sigma: f64,
}

impl LogNormalFit {
    /// Probability mass of `ln X` falling in `[lo, hi]`; needs `sigma > 0`.
    fn log_mass(&self, lo: f64, hi: f64) -> f64 {
        let cdf = |z: f64| 0.5 * (1.0 + erf((z - self.mu) / (self.sigma * std::f64::consts::SQRT_2)));
        cdf(hi) - cdf(lo)
    }
}

pub fn fit_lognormal(values: &[f64]) -> Result<LogNormalFit, FitError> {
    if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !(**v > 0.0 && v.is_finite())) {
        return Err(FitError::NonPositive { index, value });
    }
    if values.len() < 2 {
        return Err(FitError::TooFewRows { needed: 2, have: values.len() });
    }
    let n = values.len() as f64;
    // shifted by the first log so that a constant sample gives exactly zero spread
    let shift = values[0].ln();
    let mu = shift + values.iter().map(|v| v.ln() - shift).sum::<f64>() / n;
    let var = values.iter().map(|v| (v.ln() - mu).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(LogNormalFit { mu, sigma: var.sqrt() })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub bin_low: f64,
    pub bin_high: f64,
    /// Geometric centre.
    pub bin_center: f64,
    pub count: u64,
    /// Density of `ln X` per unit of natural log; sums to 1 against bin widths.
    pub empirical_density: f64,
    /// Fitted log-normal mass in the bin divided by its log width.
    pub fitted_density: f64,
}

/// Log-spaced histogram between the sample minimum and maximum, alongside
/// the fitted log-normal. A sample with a single distinct value gets a
/// range of one decade centred on it.
pub fn histogram_lognormal(values: &[f64], bins: usize) -> Result<(LogNormalFit, Vec<HistogramBin>), FitError> {
    if bins < 2 {
        return Err(FitError::TooFewBins(bins));
    }
    let fit = fit_lognormal(values)?;
    let logs: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let mut lo = logs.iter().copied().fold(f64::INFINITY, f64::min);
    let mut hi = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi - lo <= 0.0 {
        let half_decade = 0.5 * std::f64::consts::LN_10;
        lo -= half_decade;
        hi += half_decade;
    }
    let width = (hi - lo) / bins as f64;
    let bin_of = |l: f64| (((l - lo) / width).floor().max(0.0) as usize).min(bins - 1);
    let mut counts = vec![0u64; bins];
    for &l in &logs {
        counts[bin_of(l)] += 1;
    }
    let point_mass_bin = (fit.sigma == 0.0).then(|| bin_of(fit.mu));
    let n = values.len() as f64;
    let table = counts
        .iter()
        .enumerate()
        .map(|(i, &count)| {
            let a = lo + width * i as f64;
            let b = if i + 1 == bins { hi } else { a + width };
            let mass = match point_mass_bin {
                Some(j) => f64::from(u8::from(i == j)),
                None => fit.log_mass(a, b),
            };
            HistogramBin {
                bin_low: a.exp(),
                bin_high: b.exp(),
                bin_center: (0.5 * (a + b)).exp(),
                count,
                empirical_density: count as f64 / (n * width),
                fitted_density: mass / width,
            }
        })
        .collect();
    Ok((fit, table))
}
