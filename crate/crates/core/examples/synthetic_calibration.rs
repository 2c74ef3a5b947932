//! Checks how often the 95% interval on the exponent covers the true value
//! over many seeded synthetic tables.
//!
//! ```text
//! cargo run --release --example synthetic_calibration [runs] [beta]
//! ```

use geoscale::scaling::fit_power_law;
use geoscale::synth::{generate_synthetic, SynthConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let runs: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(500);
    let beta: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(0.64);

    let mut covered = 0;
    let mut mean_beta = 0.0;
    for seed in 0..runs {
        let table = generate_synthetic(&SynthConfig { seed, beta_true: beta, ..SynthConfig::default() })?;
        let fit = fit_power_law(&table)?;
        covered += fit.ci_contains(beta) as u64;
        mean_beta += fit.beta / runs as f64;
    }
    println!("true beta {beta}, mean estimate {mean_beta:.4}");
    println!("interval coverage {covered}/{runs} = {:.3}", covered as f64 / runs as f64);
    Ok(())
}
