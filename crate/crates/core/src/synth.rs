//! Seeded synthetic attractiveness tables with a known exponent.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

use crate::metrics::{AttractivenessTable, TableRow};

#[derive(Debug, Error, PartialEq)]
pub enum SynthError {
    #[error("need at least 3 regions, got {0}")]
    TooFewRegions(usize),
    #[error("{0} must be finite and non-negative")]
    BadParameter(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthConfig {
    pub seed: u64,
    pub n_regions: usize,
    pub beta_true: f64,
    /// Standard deviation of ln(population).
    pub sigma_pop: f64,
    /// Standard deviation of the multiplicative noise, in natural-log units.
    pub noise_sigma: f64,
    /// Median population.
    pub median_population: f64,
    pub log10_prefactor: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            seed: 1,
            n_regions: 238,
            beta_true: 0.64,
            sigma_pop: 2.3,
            noise_sigma: 1.0,
            median_population: 5.0e6,
            log10_prefactor: 1.0,
        }
    }
}

/// Populations are log-normal around `median_population`; attractiveness is
/// `a * p^beta * exp(noise)` with Gaussian `noise`. Identical configs give
/// identical tables.
pub fn generate_synthetic(cfg: &SynthConfig) -> Result<AttractivenessTable, SynthError> {
    if cfg.n_regions < 3 {
        return Err(SynthError::TooFewRegions(cfg.n_regions));
    }
    if !(cfg.sigma_pop >= 0.0 && cfg.sigma_pop.is_finite()) {
        return Err(SynthError::BadParameter("sigma_pop"));
    }
    if !(cfg.noise_sigma >= 0.0 && cfg.noise_sigma.is_finite()) {
        return Err(SynthError::BadParameter("noise_sigma"));
    }
    if !(cfg.median_population > 0.0 && cfg.median_population.is_finite()) {
        return Err(SynthError::BadParameter("median_population"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let std_normal = Normal::new(0.0, 1.0).expect("unit normal");
    let mu_pop = cfg.median_population.ln();
    let width = cfg.n_regions.to_string().len();
    let rows = (0..cfg.n_regions)
        .map(|i| {
            let population = (mu_pop + cfg.sigma_pop * std_normal.sample(&mut rng)).exp();
            let noise = cfg.noise_sigma * std_normal.sample(&mut rng);
            let attractiveness = 10f64.powf(cfg.log10_prefactor) * population.powf(cfg.beta_true) * noise.exp();
            TableRow { region_id: format!("R{i:0width$}"), population, attractiveness }
        })
        .collect();
    Ok(AttractivenessTable {
        source_label: format!("synthetic(seed={})", cfg.seed),
        rows,
        excluded: Vec::new(),
        od_orientation: None,
    })
}
