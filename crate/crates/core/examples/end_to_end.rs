//! Runs every stage over the toy world and prints the manifest.
//!
//! ```text
//! cargo run --example end_to_end [out_dir]
//! ```

use std::path::{Path, PathBuf};

use geoscale::pipeline::{run_pipeline, PipelineConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let toy = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/toy_world");
    let out_dir = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("geoscale_toy_world"));

    let mut cfg = PipelineConfig::new(toy.join("records.tsv"), toy.join("regions.geojson"), toy.join("population.csv"), &out_dir);
    cfg.od = Some(toy.join("od.csv"));
    cfg.cities = Some(toy.join("cities.csv"));
    cfg.bins = 4;

    let report = run_pipeline(&cfg);
    println!("{}", serde_json::to_string_pretty(&report.manifest)?);
    if let Some(same) = report.matches_previous {
        println!("outputs match previous run: {same}");
    }
    match report.error {
        Some(e) => Err(e.into()),
        None => {
            println!("outputs in {}", out_dir.display());
            Ok(())
        }
    }
}
