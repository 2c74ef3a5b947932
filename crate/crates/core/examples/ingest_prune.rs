//! Streams a raw tab-separated export, keeping geotagged records with valid
//! timestamps and tallying why the rest were dropped.
//!
//! ```text
//! cargo run --example ingest_prune [path/to/export.tsv[.gz]]
//! ```

use std::path::PathBuf;

use geoscale::ingest::{open_input, PruneStream, Schema};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/toy_world/records.tsv"));

    let mut stream = PruneStream::new(open_input(&path)?, Schema::default());
    let mut first = Vec::new();
    for record in stream.by_ref() {
        let record = record?;
        if first.len() < 3 {
            first.push(record);
        }
    }
    for r in &first {
        println!("{} by {} on {} at ({}, {})", r.object_id, r.user_id, r.taken_date(), r.lon, r.lat);
    }
    println!("{}", serde_json::to_string_pretty(&stream.stats())?);
    Ok(())
}
