//! File-to-file stages and the one-shot pipeline run.
//!
//! Every stage reads the previous stage's plain CSV/JSON output, so each
//! one can be run alone with the same result as inside [`run_pipeline`].

use std::collections::BTreeMap;
use std::fmt;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::geoassign::{assign_batch, load_regions, read_population_table, RegionSet};
use crate::homeinfer::{coverage_stats, infer_homes, ActivityAccumulator, CoverageStats, Homes};
use crate::ingest::{open_input, read_records, PruneStats, PruneStream, RecordWriter, Schema};
use crate::metrics::{
    country_structure, load_od_matrix, migration_attractiveness, read_cities, AttractivenessTable, ForeignCounter,
    DEFAULT_CITY_THRESHOLD,
};
use crate::scaling::{fit_power_law, histogram_lognormal, residuals, LogNormalFit, ScalingFit};
use crate::synth::{generate_synthetic, SynthConfig};

type BoxError = Box<dyn std::error::Error + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Config,
    Ingest,
    Assign,
    Homes,
    Attract,
    Fit,
    Dist,
    Synth,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Stage::Config => "config",
            Stage::Ingest => "ingest",
            Stage::Assign => "assign",
            Stage::Homes => "homes",
            Stage::Attract => "attract",
            Stage::Fit => "fit",
            Stage::Dist => "dist",
            Stage::Synth => "synth",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Error)]
#[error("stage '{stage}' failed: {source}")]
pub struct StageError {
    pub stage: Stage,
    #[source]
    pub source: BoxError,
}

impl StageError {
    pub fn new(stage: Stage, source: impl Into<BoxError>) -> Self {
        StageError { stage, source: source.into() }
    }
}

fn at<E: Into<BoxError>>(stage: Stage) -> impl FnOnce(E) -> StageError {
    move |e| StageError::new(stage, e)
}

fn create(path: &Path, stage: Stage) -> Result<BufWriter<File>, StageError> {
    File::create(path).map(BufWriter::new).map_err(|e| StageError::new(stage, format!("cannot create {}: {e}", path.display())))
}

fn open(path: &Path, stage: Stage) -> Result<File, StageError> {
    File::open(path).map_err(|e| StageError::new(stage, format!("cannot open {}: {e}", path.display())))
}

fn write_json<T: Serialize>(path: &Path, value: &T, stage: Stage) -> Result<(), StageError> {
    let mut w = create(path, stage)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(at(stage))?;
    w.write_all(b"\n").map_err(at(stage))?;
    w.flush().map_err(at(stage))
}

/// `foo.csv` → `foo.json`, the sidecar convention used by every stage.
pub fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("json")
}

pub fn ingest_stage(input: &Path, schema: Schema, out: &Path, stats_out: &Path) -> Result<PruneStats, StageError> {
    let reader =
        open_input(input).map_err(|e| StageError::new(Stage::Ingest, format!("cannot open {}: {e}", input.display())))?;
    let mut writer =
        RecordWriter::new(create(out, Stage::Ingest)?, crate::ingest::RecordFormat::from_path(out)).map_err(at(Stage::Ingest))?;
    let mut stream = PruneStream::new(reader, schema);
    for record in stream.by_ref() {
        writer.write(&record.map_err(at(Stage::Ingest))?).map_err(at(Stage::Ingest))?;
    }
    writer.finish().map_err(at(Stage::Ingest))?.flush().map_err(at(Stage::Ingest))?;
    let stats = stream.stats();
    write_json(stats_out, &stats, Stage::Ingest)?;
    Ok(stats)
}

pub fn load_region_files(regions: &Path, population: Option<&Path>, stage: Stage) -> Result<RegionSet, StageError> {
    let text = fs::read_to_string(regions)
        .map_err(|e| StageError::new(stage, format!("cannot read regions {}: {e}", regions.display())))?;
    let pop = match population {
        Some(p) => read_population_table(open(p, stage)?).map_err(at(stage))?,
        None => BTreeMap::new(),
    };
    load_regions(&text, &pop).map_err(at(stage))
}

const ASSIGN_CHUNK: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct AssignSummary {
    pub records: u64,
    pub assigned: u64,
    pub unassigned: u64,
}

/// Writes `object_id,user_id,taken_date,region_id` (blank region = none).
/// Works in fixed-size chunks so memory stays bounded on large inputs.
pub fn assign_stage(records: &Path, rs: &RegionSet, out: &Path) -> Result<AssignSummary, StageError> {
    let stage = Stage::Assign;
    let mut w = csv::Writer::from_writer(create(out, stage)?);
    w.write_record(["object_id", "user_id", "taken_date", "region_id"]).map_err(at(stage))?;
    let mut summary = AssignSummary::default();
    let mut iter = read_records(records).map_err(at(stage))?;
    loop {
        let chunk = iter.by_ref().take(ASSIGN_CHUNK).collect::<Result<Vec<_>, _>>().map_err(at(stage))?;
        if chunk.is_empty() {
            break;
        }
        for a in assign_batch(chunk, rs) {
            summary.records += 1;
            match &a.region_id {
                Some(_) => summary.assigned += 1,
                None => summary.unassigned += 1,
            }
            let date = a.record.taken_date().format("%Y-%m-%d").to_string();
            w.write_record([&a.record.object_id, &a.record.user_id, &date, a.region_id.as_deref().unwrap_or("")])
                .map_err(at(stage))?;
        }
    }
    w.flush().map_err(at(stage))?;
    Ok(summary)
}

/// Streams an assigned CSV as `(user_id, taken_date, region_id)` triples.
fn for_each_assigned(
    path: &Path,
    stage: Stage,
    mut f: impl FnMut(&str, &str, Option<&str>) -> Result<(), StageError>,
) -> Result<(), StageError> {
    let mut rdr = csv::Reader::from_reader(open(path, stage)?);
    let headers = rdr.headers().map_err(at(stage))?.clone();
    if headers.iter().ne(["object_id", "user_id", "taken_date", "region_id"]) {
        return Err(StageError::new(stage, format!("{}: unexpected header {headers:?}", path.display())));
    }
    let mut row = csv::StringRecord::new();
    while rdr.read_record(&mut row).map_err(at(stage))? {
        let region = Some(&row[3]).filter(|r| !r.is_empty());
        f(&row[1], &row[2], region)?;
    }
    Ok(())
}

pub fn homes_stage(assigned: &Path, rs: &RegionSet, out: &Path, stats_out: &Path) -> Result<CoverageStats, StageError> {
    let stage = Stage::Homes;
    let mut acc = ActivityAccumulator::new();
    for_each_assigned(assigned, stage, |user, date, region| {
        if let Some(country) = region.and_then(|r| rs.country_of(r)) {
            let date = chrono::NaiveDate::parse_from_str(date, "%Y-%m-%d")
                .map_err(|e| StageError::new(stage, format!("bad taken_date '{date}': {e}")))?;
            acc.add(user, country, date);
        }
        Ok(())
    })?;
    let profiles = acc.finish();
    let homes = infer_homes(&profiles);
    let mut w = csv::Writer::from_writer(create(out, stage)?);
    w.write_record(["user_id", "home_country"]).map_err(at(stage))?;
    for (user, home) in &homes {
        w.write_record([user.as_str(), home.as_deref().unwrap_or("")]).map_err(at(stage))?;
    }
    w.flush().map_err(at(stage))?;
    let stats = coverage_stats(&profiles, &homes);
    write_json(stats_out, &stats, stage)?;
    Ok(stats)
}

pub fn read_homes(path: &Path, stage: Stage) -> Result<Homes, StageError> {
    let mut rdr = csv::Reader::from_reader(open(path, stage)?);
    let mut homes = Homes::new();
    for row in rdr.records() {
        let row = row.map_err(at(stage))?;
        if row.len() != 2 {
            return Err(StageError::new(stage, format!("{}: expected user_id,home_country", path.display())));
        }
        homes.insert(row[0].to_string(), Some(&row[1]).filter(|h| !h.is_empty()).map(str::to_string));
    }
    Ok(homes)
}

fn write_table(table: &AttractivenessTable, out: &Path, stage: Stage) -> Result<(), StageError> {
    let mut w = create(out, stage)?;
    table.write_csv(&mut w).map_err(at(stage))?;
    w.flush().map_err(at(stage))?;
    let mut m = create(&sidecar_path(out), stage)?;
    table.write_metadata(&mut m).map_err(at(stage))?;
    m.write_all(b"\n").map_err(at(stage))?;
    m.flush().map_err(at(stage))
}

pub fn attract_flickr_stage(
    assigned: &Path,
    homes: &Path,
    rs: &RegionSet,
    out: &Path,
) -> Result<AttractivenessTable, StageError> {
    let stage = Stage::Attract;
    let homes = read_homes(homes, stage)?;
    let mut counter = ForeignCounter::default();
    for_each_assigned(assigned, stage, |user, _, region| {
        if let Some(region) = region {
            counter.add(user, region, &homes, rs);
        }
        Ok(())
    })?;
    let table = counter.into_table(rs, "flickr");
    write_table(&table, out, stage)?;
    Ok(table)
}

pub fn attract_migration_stage(od: &Path, population: &Path, out: &Path) -> Result<AttractivenessTable, StageError> {
    let stage = Stage::Attract;
    let od = load_od_matrix(open(od, stage)?).map_err(at(stage))?;
    let pop = read_population_table(open(population, stage)?).map_err(at(stage))?;
    let table = migration_attractiveness(&od, &pop);
    write_table(&table, out, stage)?;
    Ok(table)
}

pub fn attract_cities_stage(
    cities: &Path,
    population: &Path,
    threshold: f64,
    out_count: &Path,
    out_capital: &Path,
) -> Result<(AttractivenessTable, AttractivenessTable), StageError> {
    let stage = Stage::Attract;
    let cities = read_cities(open(cities, stage)?).map_err(at(stage))?;
    let pop = read_population_table(open(population, stage)?).map_err(at(stage))?;
    let (counts, capitals) = country_structure(&cities, threshold).into_tables(&pop);
    write_table(&counts, out_count, stage)?;
    write_table(&capitals, out_capital, stage)?;
    Ok((counts, capitals))
}

pub fn read_table(path: &Path, stage: Stage) -> Result<AttractivenessTable, StageError> {
    let label = path.file_stem().and_then(|s| s.to_str()).unwrap_or("table");
    AttractivenessTable::read_csv(open(path, stage)?, label).map_err(at(stage))
}

pub fn fit_stage(table: &Path, out: &Path, residuals_out: &Path) -> Result<ScalingFit, StageError> {
    let stage = Stage::Fit;
    let table = read_table(table, stage)?;
    let fit = fit_power_law(&table).map_err(at(stage))?;
    write_json(out, &fit, stage)?;
    let mut w = csv::Writer::from_writer(create(residuals_out, stage)?);
    w.write_record(["region_id", "residual"]).map_err(at(stage))?;
    for r in residuals(&table, &fit) {
        w.write_record([r.region_id, r.residual.to_string()]).map_err(at(stage))?;
    }
    w.flush().map_err(at(stage))?;
    Ok(fit)
}

#[derive(Debug, Serialize)]
struct DistMetadata<'a> {
    column: &'a str,
    n: usize,
    bins: usize,
    mu: f64,
    sigma: f64,
    method: &'static str,
}

/// Reads one column of a CSV (by name, or the last column), skipping zeros,
/// and writes a log-binned histogram with a fitted log-normal.
pub fn dist_stage(values: &Path, column: Option<&str>, bins: usize, out: &Path) -> Result<LogNormalFit, StageError> {
    let stage = Stage::Dist;
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(open(values, stage)?);
    let headers = rdr.headers().map_err(at(stage))?.clone();
    let idx = match column {
        Some(c) => headers
            .iter()
            .position(|h| h == c)
            .ok_or_else(|| StageError::new(stage, format!("no column '{c}' in {}", values.display())))?,
        None => headers.len().checked_sub(1).ok_or_else(|| StageError::new(stage, "empty header"))?,
    };
    let mut data = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row.map_err(at(stage))?;
        let cell = row.get(idx).unwrap_or("");
        let v: f64 = cell.parse().map_err(|_| StageError::new(stage, format!("line {}: '{cell}' is not a number", i + 2)))?;
        // zero attractiveness cannot be logged; it is skipped like in the fit
        if v != 0.0 {
            data.push(v);
        }
    }
    let (fit, hist) = histogram_lognormal(&data, bins).map_err(at(stage))?;
    let mut w = csv::Writer::from_writer(create(out, stage)?);
    w.write_record(["bin_low", "bin_high", "bin_center", "count", "empirical_density", "fitted_density"]).map_err(at(stage))?;
    for b in &hist {
        w.write_record([
            b.bin_low.to_string(),
            b.bin_high.to_string(),
            b.bin_center.to_string(),
            b.count.to_string(),
            b.empirical_density.to_string(),
            b.fitted_density.to_string(),
        ])
        .map_err(at(stage))?;
    }
    w.flush().map_err(at(stage))?;
    let meta = DistMetadata {
        column: &headers[idx],
        n: data.len(),
        bins,
        mu: fit.mu,
        sigma: fit.sigma,
        method: "moments_of_log_values",
    };
    write_json(&sidecar_path(out), &meta, stage)?;
    Ok(fit)
}

pub fn synth_stage(cfg: &SynthConfig, out: &Path) -> Result<AttractivenessTable, StageError> {
    let table = generate_synthetic(cfg).map_err(at(Stage::Synth))?;
    let mut w = create(out, Stage::Synth)?;
    table.write_csv(&mut w).map_err(at(Stage::Synth))?;
    w.flush().map_err(at(Stage::Synth))?;
    Ok(table)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub records: PathBuf,
    pub regions: PathBuf,
    pub population: PathBuf,
    pub od: Option<PathBuf>,
    pub cities: Option<PathBuf>,
    pub schema: Schema,
    pub out_dir: PathBuf,
    /// Worker cap; 0 lets the runtime decide. Never changes outputs.
    pub threads: usize,
    /// Histogram bins for the distribution tables.
    pub bins: usize,
    pub city_threshold: f64,
}

impl PipelineConfig {
    pub fn new(
        records: impl Into<PathBuf>,
        regions: impl Into<PathBuf>,
        population: impl Into<PathBuf>,
        out_dir: impl Into<PathBuf>,
    ) -> Self {
        PipelineConfig {
            records: records.into(),
            regions: regions.into(),
            population: population.into(),
            od: None,
            cities: None,
            schema: Schema::default(),
            out_dir: out_dir.into(),
            threads: 0,
            bins: 10,
            city_threshold: DEFAULT_CITY_THRESHOLD,
        }
    }

    /// Checks every input exists, reporting the stage that would consume it.
    pub fn validate(&self) -> Result<(), StageError> {
        let mut inputs = vec![
            (Stage::Ingest, "records", &self.records),
            (Stage::Assign, "regions", &self.regions),
            (Stage::Assign, "population", &self.population),
        ];
        if let Some(od) = &self.od {
            inputs.push((Stage::Attract, "od", od));
        }
        if let Some(c) = &self.cities {
            inputs.push((Stage::Attract, "cities", c));
        }
        for (stage, role, path) in inputs {
            if !path.is_file() {
                return Err(StageError::new(stage, format!("{role} file {} does not exist", path.display())));
            }
        }
        if self.bins < 2 {
            return Err(StageError::new(Stage::Config, "bins must be at least 2"));
        }
        Ok(())
    }

    fn inputs(&self) -> Vec<(&'static str, &Path)> {
        let mut v = vec![("records", self.records.as_path()), ("regions", &self.regions), ("population", &self.population)];
        if let Some(od) = &self.od {
            v.push(("od", od));
        }
        if let Some(c) = &self.cities {
            v.push(("cities", c));
        }
        v
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileEntry {
    pub role: String,
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
    /// Data rows for CSV outputs.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub rows: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub status: String,
    pub failed_stage: Option<Stage>,
    pub error: Option<String>,
    pub schema: String,
    pub bins: usize,
    pub city_threshold: f64,
    pub completed_stages: Vec<Stage>,
    pub inputs: Vec<FileEntry>,
    pub outputs: Vec<FileEntry>,
    pub prune_stats: Option<PruneStats>,
    pub coverage: Option<CoverageStats>,
}

pub const MANIFEST_FILE: &str = "manifest.json";

fn digest_file(path: &Path) -> std::io::Result<(String, u64, Vec<u8>)> {
    let bytes = fs::read(path)?;
    Ok((hex::encode(Sha256::digest(&bytes)), bytes.len() as u64, bytes))
}

fn file_entry(role: &str, path: &Path, shown: String) -> std::io::Result<FileEntry> {
    let (sha256, len, bytes) = digest_file(path)?;
    let rows = (path.extension().and_then(|e| e.to_str()) == Some("csv"))
        .then(|| bytes.iter().filter(|&&b| b == b'\n').count().saturating_sub(1) as u64);
    Ok(FileEntry { role: role.to_string(), path: shown, sha256, bytes: len, rows })
}

/// Outcome of [`run_pipeline`].
#[derive(Debug)]
pub struct RunReport {
    pub manifest: Manifest,
    /// When the output directory held a previous manifest: whether every
    /// output digest matched it.
    pub matches_previous: Option<bool>,
    pub error: Option<StageError>,
}

impl RunReport {
    pub fn succeeded(&self) -> bool {
        self.error.is_none()
    }
}

struct Run<'a> {
    cfg: &'a PipelineConfig,
    outputs: Vec<(String, PathBuf)>,
    completed: Vec<Stage>,
    prune_stats: Option<PruneStats>,
    coverage: Option<CoverageStats>,
}

impl Run<'_> {
    fn out(&mut self, role: &str, name: &str) -> PathBuf {
        let p = self.cfg.out_dir.join(name);
        self.outputs.push((role.to_string(), p.clone()));
        p
    }

    fn fit_and_dist(&mut self, table_path: &Path, label: &str) -> Result<(), StageError> {
        let fit_out = self.out("fit", &format!("fit_{label}.json"));
        let res_out = self.out("residuals", &format!("residuals_{label}.csv"));
        fit_stage(table_path, &fit_out, &res_out)?;
        for column in ["population", "attractiveness"] {
            let hist = self.out("dist", &format!("hist_{label}_{column}.csv"));
            self.outputs.push(("dist".into(), sidecar_path(&hist)));
            dist_stage(table_path, Some(column), self.cfg.bins, &hist)?;
        }
        Ok(())
    }

    fn execute(&mut self) -> Result<(), StageError> {
        let cfg = self.cfg;
        cfg.validate()?;
        fs::create_dir_all(&cfg.out_dir).map_err(at(Stage::Config))?;

        let records = self.out("records", "records.csv");
        let prune = self.out("prune_stats", "prune_stats.json");
        self.prune_stats = Some(ingest_stage(&cfg.records, cfg.schema, &records, &prune)?);
        self.completed.push(Stage::Ingest);

        let rs = load_region_files(&cfg.regions, Some(&cfg.population), Stage::Assign)?;
        let assigned = self.out("assigned", "assigned.csv");
        assign_stage(&records, &rs, &assigned)?;
        self.completed.push(Stage::Assign);

        let homes = self.out("homes", "homes.csv");
        let homes_stats = self.out("homes_stats", "homes_stats.json");
        self.coverage = Some(homes_stage(&assigned, &rs, &homes, &homes_stats)?);
        self.completed.push(Stage::Homes);

        let mut tables = Vec::new();
        let flickr = self.out("table", "table_flickr.csv");
        self.outputs.push(("table_metadata".into(), sidecar_path(&flickr)));
        attract_flickr_stage(&assigned, &homes, &rs, &flickr)?;
        tables.push((flickr, "flickr"));
        if let Some(od) = &cfg.od {
            let t = self.out("table", "table_migration.csv");
            self.outputs.push(("table_metadata".into(), sidecar_path(&t)));
            attract_migration_stage(od, &cfg.population, &t)?;
            tables.push((t, "migration"));
        }
        if let Some(cities) = &cfg.cities {
            let count = self.out("table", "table_city_count.csv");
            self.outputs.push(("table_metadata".into(), sidecar_path(&count)));
            let capital = self.out("table", "table_capital_population.csv");
            self.outputs.push(("table_metadata".into(), sidecar_path(&capital)));
            attract_cities_stage(cities, &cfg.population, cfg.city_threshold, &count, &capital)?;
            tables.push((count, "city_count"));
            tables.push((capital, "capital_population"));
        }
        self.completed.push(Stage::Attract);

        for (path, label) in &tables {
            self.fit_and_dist(path, label)?;
        }
        self.completed.push(Stage::Fit);
        self.completed.push(Stage::Dist);
        Ok(())
    }
}

fn read_manifest(path: &Path) -> Option<Manifest> {
    serde_json::from_slice(&fs::read(path).ok()?).ok()
}

/// Runs ingest → assign → homes → attract → fit/residuals → dist and writes
/// `manifest.json`. A failing stage stops the run; the manifest is still
/// written, marked incomplete, listing whatever was produced.
pub fn run_pipeline(cfg: &PipelineConfig) -> RunReport {
    let previous = read_manifest(&cfg.out_dir.join(MANIFEST_FILE));
    let mut run = Run { cfg, outputs: Vec::new(), completed: Vec::new(), prune_stats: None, coverage: None };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.threads).build();
    let result = match pool {
        Ok(pool) => pool.install(|| run.execute()),
        Err(e) => Err(StageError::new(Stage::Config, e)),
    };

    let inputs = cfg.inputs().into_iter().filter_map(|(role, p)| file_entry(role, p, p.display().to_string()).ok()).collect();
    let outputs: Vec<FileEntry> = run
        .outputs
        .iter()
        .filter_map(|(role, p)| {
            let shown = p.file_name()?.to_string_lossy().into_owned();
            file_entry(role, p, shown).ok()
        })
        .collect();
    let manifest = Manifest {
        tool: "geoscale".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        status: if result.is_ok() { "complete" } else { "incomplete" }.into(),
        failed_stage: result.as_ref().err().map(|e| e.stage),
        error: result.as_ref().err().map(|e| e.to_string()),
        schema: cfg.schema.to_string(),
        bins: cfg.bins,
        city_threshold: cfg.city_threshold,
        completed_stages: run.completed,
        inputs,
        outputs,
        prune_stats: run.prune_stats,
        coverage: run.coverage,
    };
    let matches_previous = previous.map(|prev| prev.outputs == manifest.outputs && prev.status == manifest.status);
    let mut error = result.err();
    if cfg.out_dir.is_dir() {
        if let Err(e) = write_json(&cfg.out_dir.join(MANIFEST_FILE), &manifest, Stage::Config) {
            error.get_or_insert(e);
        }
    }
    RunReport { manifest, matches_previous, error }
}

/// Re-hashes every output listed in `dir/manifest.json` and returns the
/// names whose content no longer matches.
pub fn verify_manifest(dir: &Path) -> Result<Vec<String>, StageError> {
    let path = dir.join(MANIFEST_FILE);
    let manifest =
        read_manifest(&path).ok_or_else(|| StageError::new(Stage::Config, format!("cannot read {}", path.display())))?;
    Ok(manifest
        .outputs
        .iter()
        .filter(|e| digest_file(&dir.join(&e.path)).map(|(d, _, _)| d != e.sha256).unwrap_or(true))
        .map(|e| e.path.clone())
        .collect())
}
