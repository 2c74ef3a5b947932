mod common;

use geoscale::geoassign::{assign_batch, load_regions, RegionSet};
use geoscale::ingest::{parse_timestamp, MediaRecord};
use proptest::prelude::*;
use std::collections::BTreeMap;

use common::{oracle_assign, synthetic_world, World};

fn world() -> &'static World {
    static WORLD: std::sync::OnceLock<World> = std::sync::OnceLock::new();
    WORLD.get_or_init(|| synthetic_world(1))
}

proptest! {
    #[test]
    fn index_agrees_with_winding_oracle(lon in -75.0f64..75.0, lat in -65.0f64..65.0) {
        let w = world();
        prop_assert_eq!(w.regions.assign([lon, lat]).map(str::to_string), oracle_assign(w.regions.regions(), [lon, lat]));
        prop_assert_eq!(w.regions.assign([lon, lat]), w.regions.assign_exhaustive([lon, lat]));
    }

    #[test]
    fn grid_points_agree(i in -140i32..140, j in -120i32..120) {
        // half-degree lattice: lands on every square edge and corner
        let p = [i as f64 * 0.5, j as f64 * 0.5];
        let w = world();
        prop_assert_eq!(w.regions.assign(p).map(str::to_string), oracle_assign(w.regions.regions(), p));
    }
}

#[test]
fn adversarial_points_agree() {
    let w = world();
    for p in &w.adversarial {
        assert_eq!(w.regions.assign(*p).map(str::to_string), oracle_assign(w.regions.regions(), *p), "{p:?}");
    }
}

const MIXED: &str = r#"{"type": "FeatureCollection", "features": [
  {"type": "Feature", "properties": {"region_id": "N", "country_id": "N"},
   "geometry": {"type": "Polygon", "coordinates": [[[0,0],[10,0],[10,10],[0,10],[0,0]], [[4,4],[6,4],[6,6],[4,6],[4,4]]]}},
  {"type": "Feature", "properties": {"region_id": "M", "country_id": "M"},
   "geometry": {"type": "Polygon", "coordinates": [[[10,0],[20,0],[20,10],[10,10],[10,0]]]}},
  {"type": "Feature", "properties": {"region_id": "I", "country_id": "I"},
   "geometry": {"type": "Polygon", "coordinates": [[[4.5,4.5],[5.5,4.5],[5.5,5.5],[4.5,5.5],[4.5,4.5]]]}}
]}"#;

#[test]
fn mixed_fixture_tally() {
    let rs: RegionSet = load_regions(MIXED, &BTreeMap::new()).unwrap();
    // (point, expected region) tallied by hand
    let cases: [([f64; 2], Option<&str>); 20] = [
        ([1.0, 1.0], Some("N")),
        ([9.0, 9.0], Some("N")),
        ([5.0, 5.0], Some("I")),
        ([4.2, 5.0], None),
        ([5.0, 4.2], None),
        ([4.0, 5.0], Some("N")),
        ([6.0, 6.0], Some("N")),
        ([4.5, 4.5], Some("I")),
        ([10.0, 5.0], Some("M")),
        ([10.0, 0.0], Some("M")),
        ([15.0, 5.0], Some("M")),
        ([20.0, 10.0], Some("M")),
        ([0.0, 0.0], Some("N")),
        ([0.0, 5.0], Some("N")),
        ([-0.1, 5.0], None),
        ([20.1, 5.0], None),
        ([15.0, 10.1], None),
        ([3.99, 3.99], Some("N")),
        ([5.5, 5.0], Some("I")),
        ([5.6, 5.0], None),
    ];
    let records: Vec<MediaRecord> = cases
        .iter()
        .enumerate()
        .map(|(i, (p, _))| MediaRecord {
            object_id: format!("o{i}"),
            user_id: "u".into(),
            taken_at: parse_timestamp("2012-01-01 00:00:00").unwrap(),
            lon: p[0],
            lat: p[1],
        })
        .collect();
    let assigned = assign_batch(records, &rs);
    for ((p, want), got) in cases.iter().zip(&assigned) {
        assert_eq!(got.region_id.as_deref(), *want, "{p:?}");
    }
    let tally = |id: Option<&str>| assigned.iter().filter(|a| a.region_id.as_deref() == id).count();
    assert_eq!((tally(Some("N")), tally(Some("M")), tally(Some("I")), tally(None)), (7, 4, 3, 6));
}
