//! Counts large cities per country and picks out capital populations.

use std::collections::BTreeMap;

use geoscale::metrics::{country_structure, read_cities, DEFAULT_CITY_THRESHOLD};
use geoscale::scaling::fit_power_law;

const CITIES: &str = "\
city,country_id,population,is_capital
Lyon,FR,520000,false
Paris,FR,2100000,true
Marseille,FR,870000,false
Nice,FR,300000,false
Berlin,DE,3600000,true
Hamburg,DE,1800000,false
Munich,DE,1500000,false
Cologne,DE,1080000,false
Valletta,MT,6000,true
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cities = read_cities(CITIES.as_bytes())?;
    let structure = country_structure(&cities, DEFAULT_CITY_THRESHOLD);
    println!("cities above {DEFAULT_CITY_THRESHOLD}: {:?}", structure.city_counts);
    println!("capital populations: {:?}", structure.capital_population);

    let population: BTreeMap<String, f64> =
        [("FR", 67.0e6), ("DE", 83.0e6), ("MT", 0.5e6)].into_iter().map(|(k, v)| (k.to_string(), v)).collect();
    let (counts, capitals) = structure.into_tables(&population);
    match fit_power_law(&capitals) {
        Ok(fit) => println!("capital population ~ p^{:.3}", fit.beta),
        Err(e) => println!("capital fit: {e}"),
    }
    counts.write_csv(std::io::stdout())?;
    Ok(())
}
