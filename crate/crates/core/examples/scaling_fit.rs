//! Fits a power law to a small table and ranks regions by log-residual.

use geoscale::metrics::AttractivenessTable;
use geoscale::scaling::{fit_power_law, residuals};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut table = AttractivenessTable::new("example");
    for (id, p, a) in [
        ("alpha", 1.2e6, 4_100.0),
        ("beta", 8.0e6, 9_800.0),
        ("gamma", 3.1e7, 61_000.0),
        ("delta", 4.5e5, 3_900.0),
        ("epsilon", 1.4e8, 70_000.0),
        ("zeta", 2.2e7, 0.0),
    ] {
        table.push(id, Some(p), a);
    }
    table.push("unknown", None, 10.0);

    let fit = fit_power_law(&table)?;
    println!("{}", serde_json::to_string_pretty(&fit)?);
    for row in residuals(&table, &fit) {
        println!("{:>8} {:+.3}", row.region_id, row.residual);
    }
    println!("excluded: {:?}", table.excluded);
    Ok(())
}
