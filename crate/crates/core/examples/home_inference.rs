//! Infers home countries from the toy world and prints the coverage
//! statistics.

use std::fs;
use std::path::Path;

use geoscale::geoassign::{assign_batch, load_regions, read_population_table};
use geoscale::homeinfer::{accumulate, coverage_stats, infer_homes};
use geoscale::ingest::{open_input, PruneStream, Schema};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/toy_world");
    let population = read_population_table(fs::File::open(dir.join("population.csv"))?)?;
    let rs = load_regions(&fs::read_to_string(dir.join("regions.geojson"))?, &population)?;
    let records = PruneStream::new(open_input(&dir.join("records.tsv"))?, Schema::default()).collect::<Result<Vec<_>, _>>()?;

    let assigned = assign_batch(records, &rs);
    let profiles = accumulate(&assigned, &rs);
    let homes = infer_homes(&profiles);
    for (user, profile) in &profiles {
        let activity: Vec<String> = profile
            .per_country
            .iter()
            .map(|(c, a)| format!("{c}: {} objects / {} days", a.object_count, a.active_days))
            .collect();
        println!("{user}: home {:?} [{}]", homes[user], activity.join(", "));
    }
    println!("{}", serde_json::to_string_pretty(&coverage_stats(&profiles, &homes))?);
    Ok(())
}
