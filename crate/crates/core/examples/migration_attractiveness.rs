//! Reads an origin/destination migrant-stock matrix and sums, for each
//! destination, the stock born elsewhere.

use std::collections::BTreeMap;

use geoscale::metrics::{load_od_matrix, migration_attractiveness};

// Rows are origins here; the corner cell says so.
const OD: &str = "\
orig\\dest,FR,DE,IT,ES
FR,0,120,80,300
DE,60,0,40,20
IT,200,700,0,90
ES,250,150,30,
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let od = load_od_matrix(OD.as_bytes())?;
    println!("orientation: {:?}", od.orientation);
    let population: BTreeMap<String, f64> =
        [("FR", 67.0e6), ("DE", 83.0e6), ("IT", 59.0e6), ("ES", 47.0e6)].into_iter().map(|(k, v)| (k.to_string(), v)).collect();
    let table = migration_attractiveness(&od, &population);
    table.write_csv(std::io::stdout())?;
    Ok(())
}
