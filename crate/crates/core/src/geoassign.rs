//! Reverse geocoding of points against named polygonal regions.
//!
//! Regions are read from a GeoJSON `FeatureCollection` and joined with a
//! `region_id,population` table. Lookups go through an R-tree over the
//! bounding boxes of individual polygon parts, then an exact even-odd test
//! on the candidate parts. Points on a boundary are inside. When several
//! regions contain a point the smallest `region_id` wins.

use std::collections::{BTreeMap, HashMap};
use std::io::Read;

use rayon::prelude::*;
use rstar::primitives::{GeomWithData, Rectangle};
use rstar::RTree;
use serde_json::Value;
use thiserror::Error;

use crate::ingest::MediaRecord;

#[derive(Debug, Error)]
pub enum GeoError {
    #[error("invalid GeoJSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("GeoJSON input is not a FeatureCollection")]
    NotFeatureCollection,
    #[error("feature #{index} has no region_id property")]
    MissingRegionId { index: usize },
    #[error("duplicate region_id '{0}'")]
    DuplicateRegion(String),
    #[error("feature '{feature}': {message}")]
    Geometry { feature: String, message: String },
    #[error("population table: {0}")]
    Population(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// `[lon, lat]` in degrees.
pub type Coord = [f64; 2];

/// Closed ring: the first vertex is repeated at the end.
pub type Ring = Vec<Coord>;

#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    pub exterior: Ring,
    pub holes: Vec<Ring>,
}

impl Polygon {
    pub fn new(exterior: Ring, holes: Vec<Ring>) -> Self {
        Polygon { exterior, holes }
    }

    fn rings(&self) -> impl Iterator<Item = &Ring> {
        std::iter::once(&self.exterior).chain(self.holes.iter())
    }

    /// Even-odd containment with the boundary counted as inside.
    pub fn contains(&self, p: Coord) -> bool {
        if self.rings().any(|ring| on_ring_boundary(ring, p)) {
            return true;
        }
        let mut inside = false;
        for ring in self.rings() {
            for edge in ring.windows(2) {
                let (a, b) = (edge[0], edge[1]);
                if (a[1] > p[1]) != (b[1] > p[1]) {
                    let x_cross = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
                    if p[0] < x_cross {
                        inside = !inside;
                    }
                }
            }
        }
        inside
    }

    pub fn bbox(&self) -> (Coord, Coord) {
        ring_bbox(&self.exterior)
    }
}

fn on_ring_boundary(ring: &Ring, p: Coord) -> bool {
    ring.windows(2).any(|e| on_segment(e[0], e[1], p))
}

fn on_segment(a: Coord, b: Coord, p: Coord) -> bool {
    let cross = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
    cross == 0.0 && p[0] >= a[0].min(b[0]) && p[0] <= a[0].max(b[0]) && p[1] >= a[1].min(b[1]) && p[1] <= a[1].max(b[1])
}

fn ring_bbox(ring: &Ring) -> (Coord, Coord) {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for v in ring {
        for k in 0..2 {
            lo[k] = lo[k].min(v[k]);
            hi[k] = hi[k].max(v[k]);
        }
    }
    (lo, hi)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    pub region_id: String,
    pub name: String,
    /// Equals `region_id` when the region is itself a country.
    pub country_id: String,
    pub polygons: Vec<Polygon>,
    /// `None` when the population table has no positive entry for the region.
    pub population: Option<f64>,
}

impl Region {
    pub fn contains(&self, p: Coord) -> bool {
        self.polygons.iter().any(|poly| poly.contains(p))
    }

    fn validate(&self) -> Result<(), GeoError> {
        let fail = |message: String| GeoError::Geometry { feature: self.region_id.clone(), message };
        if self.polygons.is_empty() {
            return Err(fail("no polygons".into()));
        }
        for poly in &self.polygons {
            for ring in poly.rings() {
                if ring.len() < 4 {
                    return Err(fail(format!("ring has {} vertices, need at least 4", ring.len())));
                }
                if ring.first() != ring.last() {
                    return Err(fail("ring is not closed".into()));
                }
                for v in ring {
                    if !v[0].is_finite() || !v[1].is_finite() {
                        return Err(fail("non-finite coordinate".into()));
                    }
                }
                if ring.windows(2).any(|e| (e[1][0] - e[0][0]).abs() > 180.0) {
                    return Err(fail("ring crosses the antimeridian; split it before loading".into()));
                }
            }
        }
        Ok(())
    }
}

type PartEntry = GeomWithData<Rectangle<Coord>, (u32, u32)>;

/// Immutable set of regions with a spatial index; shareable across threads.
#[derive(Debug)]
pub struct RegionSet {
    regions: Vec<Region>,
    by_id: HashMap<String, usize>,
    index: RTree<PartEntry>,
}

impl RegionSet {
    pub fn new(regions: Vec<Region>) -> Result<Self, GeoError> {
        let mut by_id = HashMap::with_capacity(regions.len());
        for (i, r) in regions.iter().enumerate() {
            r.validate()?;
            if by_id.insert(r.region_id.clone(), i).is_some() {
                return Err(GeoError::DuplicateRegion(r.region_id.clone()));
            }
        }
        let parts = regions
            .iter()
            .enumerate()
            .flat_map(|(ri, r)| {
                r.polygons.iter().enumerate().map(move |(pi, poly)| {
                    let (lo, hi) = poly.bbox();
                    GeomWithData::new(Rectangle::from_corners(lo, hi), (ri as u32, pi as u32))
                })
            })
            .collect();
        Ok(RegionSet { regions, by_id, index: RTree::bulk_load(parts) })
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    pub fn len(&self) -> usize {
        self.regions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.regions.is_empty()
    }

    pub fn get(&self, region_id: &str) -> Option<&Region> {
        self.by_id.get(region_id).map(|&i| &self.regions[i])
    }

    pub fn country_of(&self, region_id: &str) -> Option<&str> {
        self.get(region_id).map(|r| r.country_id.as_str())
    }

    /// Regions loaded without a usable population.
    pub fn unpopulated(&self) -> Vec<&str> {
        self.regions.iter().filter(|r| r.population.is_none()).map(|r| r.region_id.as_str()).collect()
    }

    /// Indexed lookup.
    pub fn assign(&self, p: Coord) -> Option<&str> {
        let mut best: Option<&str> = None;
        for entry in self.index.locate_all_at_point(&p) {
            let (ri, pi) = entry.data;
            let region = &self.regions[ri as usize];
            if best.is_some_and(|b| b <= region.region_id.as_str()) {
                continue;
            }
            if region.polygons[pi as usize].contains(p) {
                best = Some(&region.region_id);
            }
        }
        best
    }

    /// Unindexed lookup: tests every polygon of every region.
    pub fn assign_exhaustive(&self, p: Coord) -> Option<&str> {
        self.regions.iter().filter(|r| r.contains(p)).map(|r| r.region_id.as_str()).min()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssignedRecord {
    pub record: MediaRecord,
    /// `None` for points outside every region (ocean, unmapped land).
    pub region_id: Option<String>,
}

/// Assigns every record; runs on the current rayon pool and keeps input order.
pub fn assign_batch(records: Vec<MediaRecord>, rs: &RegionSet) -> Vec<AssignedRecord> {
    records
        .into_par_iter()
        .map(|record| {
            let region_id = rs.assign([record.lon, record.lat]).map(str::to_owned);
            AssignedRecord { record, region_id }
        })
        .collect()
}

fn property_string(props: Option<&serde_json::Map<String, Value>>, key: &str) -> Option<String> {
    match props?.get(key)? {
        Value::String(s) if !s.is_empty() => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        _ => None,
    }
}

fn parse_ring(v: &Value, feature: &str) -> Result<Ring, GeoError> {
    let fail = |m: &str| GeoError::Geometry { feature: feature.to_string(), message: m.to_string() };
    v.as_array()
        .ok_or_else(|| fail("ring is not an array"))?
        .iter()
        .map(|pos| {
            let pos = pos.as_array().ok_or_else(|| fail("position is not an array"))?;
            match (pos.first().and_then(Value::as_f64), pos.get(1).and_then(Value::as_f64)) {
                (Some(lon), Some(lat)) => Ok([lon, lat]),
                _ => Err(fail("position needs numeric lon and lat")),
            }
        })
        .collect()
}

fn parse_polygon(v: &Value, feature: &str) -> Result<Polygon, GeoError> {
    let rings = v
        .as_array()
        .ok_or_else(|| GeoError::Geometry { feature: feature.to_string(), message: "polygon is not an array of rings".into() })?;
    let mut rings = rings.iter().map(|r| parse_ring(r, feature));
    let exterior = rings
        .next()
        .ok_or_else(|| GeoError::Geometry { feature: feature.to_string(), message: "polygon has no exterior ring".into() })??;
    Ok(Polygon { exterior, holes: rings.collect::<Result<_, _>>()? })
}

fn parse_geometry(geom: Option<&Value>, feature: &str) -> Result<Vec<Polygon>, GeoError> {
    let fail = |m: String| GeoError::Geometry { feature: feature.to_string(), message: m };
    let geom = geom.filter(|g| !g.is_null()).ok_or_else(|| fail("missing geometry".into()))?;
    let coords = geom.get("coordinates").ok_or_else(|| fail("geometry has no coordinates".into()))?;
    match geom.get("type").and_then(Value::as_str) {
        Some("Polygon") => Ok(vec![parse_polygon(coords, feature)?]),
        Some("MultiPolygon") => coords
            .as_array()
            .ok_or_else(|| fail("MultiPolygon coordinates are not an array".into()))?
            .iter()
            .map(|p| parse_polygon(p, feature))
            .collect(),
        other => Err(fail(format!("unsupported geometry type {other:?}"))),
    }
}

/// Parses a FeatureCollection into regions with no population attached.
pub fn parse_regions_geojson(text: &str) -> Result<Vec<Region>, GeoError> {
    let doc: Value = serde_json::from_str(text)?;
    if doc.get("type").and_then(Value::as_str) != Some("FeatureCollection") {
        return Err(GeoError::NotFeatureCollection);
    }
    let features = doc.get("features").and_then(Value::as_array).ok_or(GeoError::NotFeatureCollection)?;
    features
        .iter()
        .enumerate()
        .map(|(index, f)| {
            let props = f.get("properties").and_then(Value::as_object);
            let region_id = property_string(props, "region_id").ok_or(GeoError::MissingRegionId { index })?;
            let name = property_string(props, "name").unwrap_or_else(|| region_id.clone());
            let country_id = property_string(props, "country_id").unwrap_or_else(|| region_id.clone());
            let polygons = parse_geometry(f.get("geometry"), &region_id)?;
            Ok(Region { region_id, name, country_id, polygons, population: None })
        })
        .collect()
}

/// Reads a two-column `region_id,population` CSV with a header row.
pub fn read_population_table<R: Read>(reader: R) -> Result<BTreeMap<String, f64>, GeoError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let mut table = BTreeMap::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row?;
        let line = i + 2;
        if row.len() != 2 {
            return Err(GeoError::Population(format!("line {line}: expected 2 columns, found {}", row.len())));
        }
        let pop: f64 =
            row[1].parse().map_err(|_| GeoError::Population(format!("line {line}: population '{}' is not a number", &row[1])))?;
        if !pop.is_finite() {
            return Err(GeoError::Population(format!("line {line}: population is not finite")));
        }
        if table.insert(row[0].to_string(), pop).is_some() {
            return Err(GeoError::Population(format!("line {line}: duplicate region_id '{}'", &row[0])));
        }
    }
    Ok(table)
}

/// Builds a [`RegionSet`] from GeoJSON text and a population table.
/// Regions without a positive population are kept and reported by
/// [`RegionSet::unpopulated`].
pub fn load_regions(geojson: &str, population: &BTreeMap<String, f64>) -> Result<RegionSet, GeoError> {
    let mut regions = parse_regions_geojson(geojson)?;
    for r in &mut regions {
        r.population = population.get(&r.region_id).copied().filter(|p| *p > 0.0);
    }
    RegionSet::new(regions)
}
