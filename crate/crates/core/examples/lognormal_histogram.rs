//! Draws a log-normal sample and prints a log-binned histogram beside the
//! fitted density.
//!
//! ```text
//! cargo run --example lognormal_histogram [sigma] [bins]
//! ```

use geoscale::scaling::histogram_lognormal;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let sigma: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(2.3);
    let bins: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(12);

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let sample: Vec<f64> = LogNormal::new(14.0, sigma)?.sample_iter(&mut rng).take(5_000).collect();
    let (fit, hist) = histogram_lognormal(&sample, bins)?;
    println!("mu = {:.3}, sigma = {:.3}", fit.mu, fit.sigma);
    for b in &hist {
        let bar = "#".repeat((b.empirical_density * 100.0).round() as usize);
        println!("{:>10.3e} {:>5} {:.4} {:.4} {bar}", b.bin_center, b.count, b.empirical_density, b.fitted_density);
    }
    Ok(())
}
