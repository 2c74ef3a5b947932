//! Attractiveness tables: foreign media objects per region, foreign-born
//! stock per destination country, and country-structure counts.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geoassign::{AssignedRecord, RegionSet};
use crate::homeinfer::Homes;

/// Cities must be strictly larger than this to be counted.
pub const DEFAULT_CITY_THRESHOLD: f64 = 300_000.0;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("OD matrix line {line}, column {column}: {message}")]
    OdCell { line: usize, column: usize, message: String },
    #[error("OD matrix: {0}")]
    OdShape(String),
    #[error("table line {line}: {message}")]
    Table { line: usize, message: String },
    #[error("city list line {line}: {message}")]
    City { line: usize, message: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub region_id: String,
    pub population: f64,
    pub attractiveness: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExcludedRow {
    pub region_id: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttractivenessTable {
    pub source_label: String,
    pub rows: Vec<TableRow>,
    /// Regions that could not enter the table, with the reason.
    pub excluded: Vec<ExcludedRow>,
    pub od_orientation: Option<OdOrientation>,
}

#[derive(Debug, Serialize)]
struct TableMetadata<'a> {
    source_label: &'a str,
    rows: usize,
    excluded_rows: &'a [ExcludedRow],
    #[serde(skip_serializing_if = "Option::is_none")]
    od_orientation: Option<OdOrientation>,
}

impl AttractivenessTable {
    pub fn new(source_label: impl Into<String>) -> Self {
        AttractivenessTable { source_label: source_label.into(), rows: Vec::new(), excluded: Vec::new(), od_orientation: None }
    }

    /// Adds a row, or records an exclusion when the population is missing
    /// or not positive.
    pub fn push(&mut self, region_id: &str, population: Option<f64>, attractiveness: f64) {
        match population {
            Some(p) if p > 0.0 && p.is_finite() => {
                self.rows.push(TableRow { region_id: region_id.to_string(), population: p, attractiveness })
            }
            Some(_) => self.exclude(region_id, "population not positive"),
            None => self.exclude(region_id, "missing population"),
        }
    }

    fn exclude(&mut self, region_id: &str, reason: &str) {
        self.excluded.push(ExcludedRow { region_id: region_id.to_string(), reason: reason.to_string() });
    }

    pub fn get(&self, region_id: &str) -> Option<&TableRow> {
        self.rows.iter().find(|r| r.region_id == region_id)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), MetricsError> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["region_id", "population", "attractiveness"])?;
        for r in &self.rows {
            w.write_record([r.region_id.as_str(), &r.population.to_string(), &r.attractiveness.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_metadata<W: Write>(&self, writer: W) -> Result<(), MetricsError> {
        let meta = TableMetadata {
            source_label: &self.source_label,
            rows: self.rows.len(),
            excluded_rows: &self.excluded,
            od_orientation: self.od_orientation,
        };
        serde_json::to_writer_pretty(writer, &meta)?;
        Ok(())
    }

    /// Reads `region_id,population,attractiveness`. Rows with non-positive
    /// population are an error rather than being dropped.
    pub fn read_csv<R: Read>(reader: R, source_label: &str) -> Result<Self, MetricsError> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.iter().ne(["region_id", "population", "attractiveness"]) {
            return Err(MetricsError::Table { line: 1, message: format!("unexpected header {headers:?}") });
        }
        let mut table = AttractivenessTable::new(source_label);
        let mut seen = std::collections::HashSet::new();
        for (i, row) in rdr.records().enumerate() {
            let row = row?;
            let line = i + 2;
            let err = |message: String| MetricsError::Table { line, message };
            let num = |k: usize| row[k].parse::<f64>().map_err(|_| err(format!("'{}' is not a number", &row[k])));
            let (p, a) = (num(1)?, num(2)?);
            if !(p > 0.0 && p.is_finite()) {
                return Err(err(format!("population of '{}' must be positive", &row[0])));
            }
            if !(a >= 0.0 && a.is_finite()) {
                return Err(err(format!("attractiveness of '{}' must be non-negative", &row[0])));
            }
            if !seen.insert(row[0].to_string()) {
                return Err(err(format!("duplicate region_id '{}'", &row[0])));
            }
            table.rows.push(TableRow { region_id: row[0].to_string(), population: p, attractiveness: a });
        }
        Ok(table)
    }
}

/// Counts objects per region taken by users whose defined home country
/// differs from the region's country.
#[derive(Debug, Clone, Default)]
pub struct ForeignCounter {
    counts: HashMap<String, u64>,
}

impl ForeignCounter {
    pub fn add(&mut self, user_id: &str, region_id: &str, homes: &Homes, rs: &RegionSet) {
        let Some(Some(home)) = homes.get(user_id) else { return };
        let Some(country) = rs.country_of(region_id) else { return };
        if home != country {
            match self.counts.get_mut(region_id) {
                Some(c) => *c += 1,
                None => {
                    self.counts.insert(region_id.to_string(), 1);
                }
            }
        }
    }

    pub fn merge(&mut self, other: ForeignCounter) {
        for (k, v) in other.counts {
            *self.counts.entry(k).or_default() += v;
        }
    }

    pub fn count(&self, region_id: &str) -> u64 {
        self.counts.get(region_id).copied().unwrap_or(0)
    }

    /// One row per region of `rs`, ordered by region_id; zero counts included.
    pub fn into_table(self, rs: &RegionSet, source_label: &str) -> AttractivenessTable {
        let mut regions: Vec<_> = rs.regions().iter().collect();
        regions.sort_by(|a, b| a.region_id.cmp(&b.region_id));
        let mut table = AttractivenessTable::new(source_label);
        for r in regions {
            table.push(&r.region_id, r.population, self.count(&r.region_id) as f64);
        }
        table
    }
}

pub fn flickr_attractiveness<'a, I>(assigned: I, homes: &Homes, rs: &RegionSet) -> AttractivenessTable
where
    I: IntoIterator<Item = &'a AssignedRecord>,
{
    let mut counter = ForeignCounter::default();
    for a in assigned {
        if let Some(region) = a.region_id.as_deref() {
            counter.add(&a.record.user_id, region, homes, rs);
        }
    }
    counter.into_table(rs, "flickr")
}

/// Which axis of the CSV carries destinations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OdOrientation {
    /// Rows are destinations, columns are origins.
    RowsDestination,
    /// Rows are origins, columns are destinations.
    RowsOrigin,
}

impl fmt::Display for OdOrientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OdOrientation::RowsDestination => "rows_destination",
            OdOrientation::RowsOrigin => "rows_origin",
        })
    }
}

impl OdOrientation {
    /// Reads the corner cell of the header, e.g. `destination\origin` or
    /// `origin/destination`. An empty corner means rows are destinations.
    pub fn from_corner(cell: &str) -> Option<Self> {
        let cell = cell.trim().to_ascii_lowercase();
        if cell.is_empty() {
            return Some(OdOrientation::RowsDestination);
        }
        let first = cell.split(['\\', '/', '|', ':']).next().unwrap_or("").trim();
        if first.starts_with("dest") {
            Some(OdOrientation::RowsDestination)
        } else if first.starts_with("orig") {
            Some(OdOrientation::RowsOrigin)
        } else {
            None
        }
    }
}

/// Migrant stock; `stock[d][o]` persons born in `o` live in `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct ODMatrix {
    pub countries: Vec<String>,
    pub stock: Vec<Vec<f64>>,
    /// Orientation of the file this matrix was read from.
    pub orientation: OdOrientation,
}

impl ODMatrix {
    pub fn index_of(&self, country: &str) -> Option<usize> {
        self.countries.iter().position(|c| c == country)
    }
}

/// Parses a square origin/destination CSV. The header lists column ids after
/// an orientation corner cell; each data row starts with its row id. Blank
/// cells are zero. The result covers the union of row and column ids.
pub fn load_od_matrix<R: Read>(reader: R) -> Result<ODMatrix, MetricsError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(reader);
    let mut records = rdr.records();
    let header = records.next().ok_or_else(|| MetricsError::OdShape("empty file".into()))??;
    let corner = header.get(0).unwrap_or("");
    let orientation = OdOrientation::from_corner(corner).ok_or_else(|| MetricsError::OdCell {
        line: 1,
        column: 1,
        message: format!("unknown orientation marker '{corner}'"),
    })?;
    let col_ids: Vec<String> = header.iter().skip(1).map(|s| s.trim().to_string()).collect();
    if col_ids.iter().any(String::is_empty) {
        return Err(MetricsError::OdShape("blank column id in header".into()));
    }

    let mut rows: Vec<(String, Vec<f64>)> = Vec::new();
    for (i, rec) in records.enumerate() {
        let rec = rec?;
        let line = i + 2;
        if rec.len() != header.len() {
            return Err(MetricsError::OdShape(format!("line {line} has {} cells, header has {}", rec.len(), header.len())));
        }
        let row_id = rec[0].trim().to_string();
        if row_id.is_empty() {
            return Err(MetricsError::OdCell { line, column: 1, message: "blank row id".into() });
        }
        let values = rec
            .iter()
            .enumerate()
            .skip(1)
            .map(|(j, cell)| {
                let cell = cell.trim();
                if cell.is_empty() {
                    return Ok(0.0);
                }
                let v: f64 = cell.parse().map_err(|_| MetricsError::OdCell {
                    line,
                    column: j + 1,
                    message: format!("'{cell}' is not a number"),
                })?;
                if !(v >= 0.0 && v.is_finite()) {
                    return Err(MetricsError::OdCell {
                        line,
                        column: j + 1,
                        message: format!("'{cell}' is negative or not finite"),
                    });
                }
                Ok(v)
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push((row_id, values));
    }

    let mut countries: Vec<String> = Vec::new();
    let mut index = HashMap::new();
    for id in rows.iter().map(|(r, _)| r).chain(col_ids.iter()) {
        if !index.contains_key(id) {
            index.insert(id.clone(), countries.len());
            countries.push(id.clone());
        }
    }
    let n = countries.len();
    let mut stock = vec![vec![0.0; n]; n];
    let mut seen_rows = std::collections::HashSet::new();
    for (line, (row_id, values)) in rows.iter().enumerate() {
        if !seen_rows.insert(row_id) {
            return Err(MetricsError::OdShape(format!("duplicate row id '{row_id}' on line {}", line + 2)));
        }
        let r = index[row_id];
        for (col_id, &v) in col_ids.iter().zip(values) {
            let c = index[col_id];
            let (d, o) = match orientation {
                OdOrientation::RowsDestination => (r, c),
                OdOrientation::RowsOrigin => (c, r),
            };
            stock[d][o] += v;
        }
    }
    Ok(ODMatrix { countries, stock, orientation })
}

/// A(d) = Σ_{o ≠ d} stock[d][o]. Rows come out in matrix order.
pub fn migration_attractiveness(od: &ODMatrix, population: &BTreeMap<String, f64>) -> AttractivenessTable {
    let mut table = AttractivenessTable::new("migration");
    table.od_orientation = Some(od.orientation);
    for (d, country) in od.countries.iter().enumerate() {
        let foreign: f64 = od.stock[d].iter().enumerate().filter(|&(o, _)| o != d).map(|(_, v)| v).sum();
        table.push(country, population.get(country).copied(), foreign);
    }
    table
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CityRecord {
    pub name: String,
    pub country_id: String,
    pub population: f64,
    pub is_capital: bool,
}

/// Reads `city,country_id,population,is_capital`.
pub fn read_cities<R: Read>(reader: R) -> Result<Vec<CityRecord>, MetricsError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let mut out = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row?;
        let line = i + 2;
        let err = |message: String| MetricsError::City { line, message };
        if row.len() != 4 {
            return Err(err(format!("expected 4 columns, found {}", row.len())));
        }
        let population: f64 = row[2].parse().map_err(|_| err(format!("population '{}' is not a number", &row[2])))?;
        if !(population > 0.0 && population.is_finite()) {
            return Err(err("population must be positive".into()));
        }
        let is_capital = match row[3].to_ascii_lowercase().as_str() {
            "1" | "true" | "yes" | "y" => true,
            "0" | "false" | "no" | "n" | "" => false,
            other => return Err(err(format!("is_capital '{other}' is not a boolean"))),
        };
        out.push(CityRecord { name: row[0].to_string(), country_id: row[1].to_string(), population, is_capital });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CountryStructure {
    /// Cities above the threshold, per country with at least one listed city.
    pub city_counts: BTreeMap<String, u64>,
    /// Population of the capital; the largest one if several are flagged.
    pub capital_population: BTreeMap<String, f64>,
}

impl CountryStructure {
    pub fn into_tables(self, population: &BTreeMap<String, f64>) -> (AttractivenessTable, AttractivenessTable) {
        let mut counts = AttractivenessTable::new("city_count");
        for (c, n) in &self.city_counts {
            counts.push(c, population.get(c).copied(), *n as f64);
        }
        let mut capitals = AttractivenessTable::new("capital_population");
        for (c, p) in &self.capital_population {
            capitals.push(c, population.get(c).copied(), *p);
        }
        (counts, capitals)
    }
}

pub fn country_structure(cities: &[CityRecord], threshold: f64) -> CountryStructure {
    let mut s = CountryStructure::default();
    for city in cities {
        let count = s.city_counts.entry(city.country_id.clone()).or_default();
        if city.population > threshold {
            *count += 1;
        }
        if city.is_capital {
            let cap = s.capital_population.entry(city.country_id.clone()).or_insert(city.population);
            *cap = cap.max(city.population);
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geoassign::{Polygon, Region};
    use crate::ingest::{parse_timestamp, MediaRecord};
    use proptest::prelude::*;

    fn square(x0: f64) -> Polygon {
        Polygon::new(vec![[x0, 0.0], [x0 + 1.0, 0.0], [x0 + 1.0, 1.0], [x0, 1.0], [x0, 0.0]], vec![])
    }

    fn region(id: &str, country: &str, x0: f64, pop: Option<f64>) -> Region {
        Region { region_id: id.into(), name: id.into(), country_id: country.into(), polygons: vec![square(x0)], population: pop }
    }

    fn rec(user: &str, region: &str) -> AssignedRecord {
        AssignedRecord {
            record: MediaRecord {
                object_id: "o".into(),
                user_id: user.into(),
                taken_at: parse_timestamp("2012-01-01 00:00:00").unwrap(),
                lon: 0.0,
                lat: 0.0,
            },
            region_id: Some(region.into()),
        }
    }

    fn homes(pairs: &[(&str, Option<&str>)]) -> Homes {
        pairs.iter().map(|(u, h)| (u.to_string(), h.map(str::to_string))).collect()
    }

    #[test]
    fn foreign_objects_only() {
        let rs = RegionSet::new(vec![region("X", "X", 0.0, Some(10.0)), region("Y", "Y", 2.0, Some(5.0))]).unwrap();
        let h = homes(&[("visitor", Some("Y")), ("local", Some("X")), ("unknown", None)]);
        let mut recs: Vec<_> = (0..5).map(|_| rec("visitor", "X")).collect();
        recs.extend((0..3).map(|_| rec("local", "X")));
        recs.extend((0..4).map(|_| rec("unknown", "X")));
        let t = flickr_attractiveness(&recs, &h, &rs);
        assert_eq!(t.get("X").unwrap().attractiveness, 5.0);
        assert_eq!(t.get("Y").unwrap().attractiveness, 0.0);

        let locals: Vec<_> = (0..4).map(|_| rec("local", "X")).collect();
        let t = flickr_attractiveness(&locals, &h, &rs);
        assert!(t.rows.iter().all(|r| r.attractiveness == 0.0));
    }

    #[test]
    fn states_count_against_home_country() {
        let rs = RegionSet::new(vec![
            region("US-NY", "USA", 0.0, Some(19.0)),
            region("US-CA", "USA", 2.0, Some(39.0)),
            region("FRA", "FRA", 4.0, Some(67.0)),
            region("US-XX", "USA", 6.0, None),
        ])
        .unwrap();
        let h = homes(&[("american", Some("USA")), ("french", Some("FRA"))]);
        let recs = vec![
            rec("american", "US-NY"),
            rec("american", "US-CA"),
            rec("french", "US-NY"),
            rec("french", "US-CA"),
            rec("french", "US-CA"),
            rec("french", "US-XX"),
            rec("american", "FRA"),
        ];
        let t = flickr_attractiveness(&recs, &h, &rs);
        assert_eq!(t.get("US-NY").unwrap().attractiveness, 1.0);
        assert_eq!(t.get("US-CA").unwrap().attractiveness, 2.0);
        assert_eq!(t.get("FRA").unwrap().attractiveness, 1.0);
        assert_eq!(t.excluded, vec![ExcludedRow { region_id: "US-XX".into(), reason: "missing population".into() }]);
        // roll-up: states of one country add up to its foreign count
        let usa_foreign = recs
            .iter()
            .filter(|r| rs.country_of(r.region_id.as_deref().unwrap()) == Some("USA") && r.record.user_id != "american")
            .count() as f64;
        let mut counter = ForeignCounter::default();
        for r in &recs {
            counter.add(&r.record.user_id, r.region_id.as_deref().unwrap(), &h, &rs);
        }
        let states: u64 = ["US-NY", "US-CA", "US-XX"].iter().map(|s| counter.count(s)).sum();
        assert_eq!(states as f64, usa_foreign);
    }

    #[test]
    fn od_two_by_two() {
        let od = load_od_matrix("dest\\orig,d1,d2\nd1,0,5\nd2,3,0\n".as_bytes()).unwrap();
        assert_eq!(od.countries, ["d1", "d2"]);
        assert_eq!(od.stock, vec![vec![0.0, 5.0], vec![3.0, 0.0]]);
        let pop = BTreeMap::from([("d1".to_string(), 10.0), ("d2".to_string(), 20.0)]);
        let t = migration_attractiveness(&od, &pop);
        assert_eq!(t.get("d1").unwrap().attractiveness, 5.0);
        assert_eq!(t.get("d2").unwrap().attractiveness, 3.0);

        let diag = load_od_matrix("dest\\orig,d1,d2\nd1,9,5\nd2,3,9\n".as_bytes()).unwrap();
        assert_eq!(migration_attractiveness(&diag, &pop).rows, t.rows);
    }

    #[test]
    fn od_orientation_transposes() {
        let od = load_od_matrix("origin/destination,d1,d2\nd1,0,5\nd2,3,0\n".as_bytes()).unwrap();
        assert_eq!(od.orientation, OdOrientation::RowsOrigin);
        // d1 sends 5 people to d2, d2 sends 3 to d1
        assert_eq!(od.stock, vec![vec![0.0, 3.0], vec![5.0, 0.0]]);
    }

    #[test]
    fn od_blank_cells_and_union() {
        let od = load_od_matrix(",a,b\na,,2\nc,1,\n".as_bytes()).unwrap();
        assert_eq!(od.countries, ["a", "c", "b"]);
        let (a, b, c) = (0, 2, 1);
        assert_eq!(od.stock[a][b], 2.0);
        assert_eq!(od.stock[c][a], 1.0);
        assert_eq!(od.stock[b].iter().sum::<f64>(), 0.0);
    }

    #[test]
    fn od_errors() {
        let e = load_od_matrix("dest\\orig,a,b\na,0,x\nb,1,0\n".as_bytes()).unwrap_err();
        assert!(matches!(e, MetricsError::OdCell { line: 2, column: 3, .. }), "{e}");
        assert!(matches!(load_od_matrix("dest\\orig,a,b\na,0\n".as_bytes()), Err(MetricsError::OdShape(_))));
        assert!(load_od_matrix("sideways,a\na,1\n".as_bytes()).is_err());
        assert!(load_od_matrix("dest\\orig,a\na,-1\n".as_bytes()).is_err());
        assert!(load_od_matrix("dest\\orig,a\na,1\na,2\n".as_bytes()).is_err());
    }

    #[test]
    fn missing_destination_population_is_reported() {
        let od = load_od_matrix("dest\\orig,a,b\na,0,1\nb,1,0\n".as_bytes()).unwrap();
        let t = migration_attractiveness(&od, &BTreeMap::from([("a".to_string(), 1.0)]));
        assert_eq!(t.rows.len(), 1);
        assert_eq!(t.excluded[0].region_id, "b");
    }

    #[test]
    fn city_threshold_is_strict() {
        let cities = read_cities(
            "city,country_id,population,is_capital\n\
             Big,AA,350000,1\nSmall,AA,250000,0\nEdge,BB,300000,1\nTiny,CC,1000,no\n"
                .as_bytes(),
        )
        .unwrap();
        let s = country_structure(&cities, DEFAULT_CITY_THRESHOLD);
        assert_eq!(s.city_counts["AA"], 1);
        assert_eq!(s.city_counts["BB"], 0);
        assert_eq!(s.city_counts["CC"], 0);
        assert_eq!(s.capital_population["BB"], 300000.0);
        assert!(!s.capital_population.contains_key("CC"));
    }

    #[test]
    fn table_csv_rejects_bad_population() {
        let err = AttractivenessTable::read_csv("region_id,population,attractiveness\nA,0,3\n".as_bytes(), "t").unwrap_err();
        assert!(err.to_string().contains("must be positive"));
        let t = AttractivenessTable::read_csv("region_id,population,attractiveness\nA,10,3\n".as_bytes(), "t").unwrap();
        let mut out = Vec::new();
        t.write_csv(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "region_id,population,attractiveness\nA,10,3\n");
    }

    proptest! {
        #[test]
        fn migration_ignores_diagonal(vals in proptest::collection::vec(0u32..1000, 9), diag in proptest::collection::vec(0u32..1000, 3)) {
            let ids = ["a", "b", "c"];
            let render = |with_diag: bool| {
                let mut s = String::from("dest\\orig,a,b,c\n");
                for d in 0..3 {
                    s.push_str(ids[d]);
                    for o in 0..3 {
                        let v = if d == o { if with_diag { diag[d] } else { 0 } } else { vals[d * 3 + o] };
                        s.push_str(&format!(",{v}"));
                    }
                    s.push('\n');
                }
                s
            };
            let pop: BTreeMap<_, _> = ids.iter().map(|c| (c.to_string(), 1.0)).collect();
            let a = migration_attractiveness(&load_od_matrix(render(true).as_bytes()).unwrap(), &pop);
            let b = migration_attractiveness(&load_od_matrix(render(false).as_bytes()).unwrap(), &pop);
            prop_assert_eq!(a.rows, b.rows);
        }
    }
}
