//! Assigns a handful of points to regions, including one on a shared border
//! and one in the ocean.

use std::collections::BTreeMap;

use geoscale::geoassign::load_regions;

const REGIONS: &str = r#"{"type": "FeatureCollection", "features": [
  {"type": "Feature", "properties": {"region_id": "west", "country_id": "XX"},
   "geometry": {"type": "Polygon", "coordinates": [[[0,0],[10,0],[10,10],[0,10],[0,0]]]}},
  {"type": "Feature", "properties": {"region_id": "east", "country_id": "XX"},
   "geometry": {"type": "Polygon", "coordinates": [[[10,0],[20,0],[20,10],[10,10],[10,0]]]}},
  {"type": "Feature", "properties": {"region_id": "lake", "country_id": "YY"},
   "geometry": {"type": "Polygon", "coordinates": [[[30,0],[40,0],[40,10],[30,10],[30,0]],
                                                   [[34,4],[36,4],[36,6],[34,6],[34,4]]]}}
]}"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let population = BTreeMap::from([("west".to_string(), 2.0e6), ("east".to_string(), 5.0e5)]);
    let rs = load_regions(REGIONS, &population)?;
    println!("regions without a population: {:?}", rs.unpopulated());

    for p in [[5.0, 5.0], [10.0, 5.0], [15.0, 9.0], [35.0, 5.0], [31.0, 5.0], [-40.0, 0.0]] {
        let region = rs.assign(p);
        let country = region.and_then(|r| rs.country_of(r));
        println!("{p:?} -> {} ({})", region.unwrap_or("-"), country.unwrap_or("-"));
    }
    Ok(())
}
