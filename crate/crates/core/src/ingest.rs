//! Parsing and pruning of tab-separated media-object metadata.
//!
//! Raw exports are read line by line (optionally gzip-compressed). Every line
//! is either turned into a [`MediaRecord`] or counted against one of the
//! [`SkipReason`]s in [`PruneStats`]. Only unreadable input is a hard error.

use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::ops::AddAssign;
use std::path::Path;
use std::str::FromStr;

use chrono::{NaiveDate, NaiveDateTime, NaiveTime};
use flate2::read::MultiGzDecoder;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("failed to read input at line {line}: {source}")]
    Read {
        line: u64,
        #[source]
        source: io::Error,
    },
    #[error("invalid schema '{0}': expected five column indices (object_id,user_id,taken_at,lon,lat) and an optional width, or key=value pairs")]
    Schema(String),
    #[error("record file {path}: {message}")]
    RecordFile { path: String, message: String },
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Column layout of a raw export.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Schema {
    pub object_id: usize,
    pub user_id: usize,
    pub taken_at: usize,
    pub lon: usize,
    pub lat: usize,
    /// Exact number of tab-separated cells a well-formed line carries.
    pub width: usize,
}

impl Schema {
    pub fn new(object_id: usize, user_id: usize, taken_at: usize, lon: usize, lat: usize) -> Self {
        let width = 1 + object_id.max(user_id).max(taken_at).max(lon).max(lat);
        Schema { object_id, user_id, taken_at, lon, lat, width }
    }

    pub fn with_width(mut self, width: usize) -> Result<Self, IngestError> {
        if width < self.min_width() {
            return Err(IngestError::Schema(format!("width {width} is narrower than the referenced columns")));
        }
        self.width = width;
        Ok(self)
    }

    fn min_width(&self) -> usize {
        1 + self.object_id.max(self.user_id).max(self.taken_at).max(self.lon).max(self.lat)
    }
}

impl Default for Schema {
    fn default() -> Self {
        Schema::new(0, 1, 2, 3, 4)
    }
}

impl fmt::Display for Schema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{},{},{}", self.object_id, self.user_id, self.taken_at, self.lon, self.lat, self.width)
    }
}

/// Accepts either positional `oid,uid,taken,lon,lat[,width]` or
/// `object_id=0,user_id=1,...,width=5` in any order.
impl FromStr for Schema {
    type Err = IngestError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || IngestError::Schema(s.to_string());
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.iter().any(|p| p.contains('=')) {
            let mut cols: [Option<usize>; 6] = [None; 6];
            for part in parts {
                let (key, value) = part.split_once('=').ok_or_else(bad)?;
                let value: usize = value.trim().parse().map_err(|_| bad())?;
                let slot = match key.trim() {
                    "object_id" => 0,
                    "user_id" => 1,
                    "taken_at" => 2,
                    "lon" => 3,
                    "lat" => 4,
                    "width" => 5,
                    _ => return Err(bad()),
                };
                cols[slot] = Some(value);
            }
            let schema = Schema::new(
                cols[0].ok_or_else(bad)?,
                cols[1].ok_or_else(bad)?,
                cols[2].ok_or_else(bad)?,
                cols[3].ok_or_else(bad)?,
                cols[4].ok_or_else(bad)?,
            );
            return match cols[5] {
                Some(w) => schema.with_width(w),
                None => Ok(schema),
            };
        }
        let nums = parts.iter().map(|p| p.parse::<usize>().map_err(|_| bad())).collect::<Result<Vec<_>, _>>()?;
        match nums.as_slice() {
            [o, u, t, lo, la] => Ok(Schema::new(*o, *u, *t, *lo, *la)),
            [o, u, t, lo, la, w] => Schema::new(*o, *u, *t, *lo, *la).with_width(*w),
            _ => Err(bad()),
        }
    }
}

/// One line of input split into its tab-separated cells.
#[derive(Debug, Clone)]
pub struct RawLine<'a> {
    pub line_number: u64,
    pub fields: Vec<&'a str>,
}

impl<'a> RawLine<'a> {
    pub fn split(line_number: u64, text: &'a str) -> Self {
        RawLine { line_number, fields: text.split('\t').collect() }
    }
}

/// A pruned, geo-tagged media object.
#[derive(Debug, Clone, PartialEq)]
pub struct MediaRecord {
    pub object_id: String,
    pub user_id: String,
    /// UTC.
    pub taken_at: NaiveDateTime,
    pub lon: f64,
    pub lat: f64,
}

impl MediaRecord {
    pub fn taken_date(&self) -> NaiveDate {
        self.taken_at.date()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SkipReason {
    NotGeotagged,
    BadDate,
    Malformed,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PruneStats {
    pub total: u64,
    pub kept: u64,
    pub dropped_not_geotagged: u64,
    pub dropped_bad_date: u64,
    pub dropped_malformed: u64,
}

impl PruneStats {
    pub fn record(&mut self, outcome: Result<(), SkipReason>) {
        self.total += 1;
        match outcome {
            Ok(()) => self.kept += 1,
            Err(SkipReason::NotGeotagged) => self.dropped_not_geotagged += 1,
            Err(SkipReason::BadDate) => self.dropped_bad_date += 1,
            Err(SkipReason::Malformed) => self.dropped_malformed += 1,
        }
    }

    pub fn is_consistent(&self) -> bool {
        self.total == self.kept + self.dropped_not_geotagged + self.dropped_bad_date + self.dropped_malformed
    }
}

impl AddAssign for PruneStats {
    fn add_assign(&mut self, rhs: Self) {
        self.total += rhs.total;
        self.kept += rhs.kept;
        self.dropped_not_geotagged += rhs.dropped_not_geotagged;
        self.dropped_bad_date += rhs.dropped_bad_date;
        self.dropped_malformed += rhs.dropped_malformed;
    }
}

/// Parses `YYYY-MM-DD HH:MM:SS` with an optional `.fraction`, as UTC.
pub fn parse_timestamp(cell: &str) -> Option<NaiveDateTime> {
    let b = cell.as_bytes();
    if b.len() < 19 {
        return None;
    }
    let digits = |r: std::ops::Range<usize>| b[r].iter().all(u8::is_ascii_digit);
    let shape_ok = digits(0..4)
        && b[4] == b'-'
        && digits(5..7)
        && b[7] == b'-'
        && digits(8..10)
        && b[10] == b' '
        && digits(11..13)
        && b[13] == b':'
        && digits(14..16)
        && b[16] == b':'
        && digits(17..19);
    if !shape_ok {
        return None;
    }
    let mut nanos = 0u32;
    if b.len() > 19 {
        let frac = &b[20..];
        if b[19] != b'.' || frac.is_empty() || !frac.iter().all(u8::is_ascii_digit) {
            return None;
        }
        // digits beyond nanosecond precision are truncated
        for (i, d) in frac.iter().take(9).enumerate() {
            nanos += u32::from(d - b'0') * 10u32.pow(8 - i as u32);
        }
    }
    let num = |r: std::ops::Range<usize>| cell[r].parse::<u32>().ok();
    let date = NaiveDate::from_ymd_opt(num(0..4)? as i32, num(5..7)?, num(8..10)?)?;
    let time = NaiveTime::from_hms_nano_opt(num(11..13)?, num(14..16)?, num(17..19)?, nanos)?;
    Some(NaiveDateTime::new(date, time))
}

pub fn format_timestamp(ts: &NaiveDateTime) -> String {
    ts.format("%Y-%m-%d %H:%M:%S%.f").to_string()
}

fn parse_coordinates(lon: &str, lat: &str) -> Result<(f64, f64), SkipReason> {
    let (lon, lat) = (lon.trim(), lat.trim());
    if lon.is_empty() || lat.is_empty() {
        return Err(SkipReason::NotGeotagged);
    }
    let lon: f64 = lon.parse().map_err(|_| SkipReason::Malformed)?;
    let lat: f64 = lat.parse().map_err(|_| SkipReason::Malformed)?;
    if !lon.is_finite() || !lat.is_finite() {
        return Err(SkipReason::Malformed);
    }
    if !(-180.0..=180.0).contains(&lon) || !(-90.0..=90.0).contains(&lat) {
        return Err(SkipReason::NotGeotagged);
    }
    Ok((lon, lat))
}

/// Validates one raw line. Coordinates are checked before the date, so a
/// line that is both untagged and badly dated counts as not geo-tagged.
pub fn parse_record(raw: &RawLine<'_>, schema: &Schema) -> Result<MediaRecord, SkipReason> {
    if raw.fields.len() != schema.width {
        return Err(SkipReason::Malformed);
    }
    let object_id = raw.fields[schema.object_id].trim();
    let user_id = raw.fields[schema.user_id].trim();
    if object_id.is_empty() || user_id.is_empty() {
        return Err(SkipReason::Malformed);
    }
    let (lon, lat) = parse_coordinates(raw.fields[schema.lon], raw.fields[schema.lat])?;
    let taken_at = parse_timestamp(raw.fields[schema.taken_at].trim()).ok_or(SkipReason::BadDate)?;
    Ok(MediaRecord { object_id: object_id.to_string(), user_id: user_id.to_string(), taken_at, lon, lat })
}

/// Streaming pruner over any buffered reader. Memory use is one line.
pub struct PruneStream<R> {
    reader: R,
    schema: Schema,
    line_number: u64,
    buf: Vec<u8>,
    stats: PruneStats,
    failed: bool,
}

impl<R: BufRead> PruneStream<R> {
    pub fn new(reader: R, schema: Schema) -> Self {
        PruneStream { reader, schema, line_number: 0, buf: Vec::new(), stats: PruneStats::default(), failed: false }
    }

    pub fn stats(&self) -> PruneStats {
        self.stats
    }

    pub fn lines_read(&self) -> u64 {
        self.line_number
    }
}

impl<R: BufRead> Iterator for PruneStream<R> {
    type Item = Result<MediaRecord, IngestError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        loop {
            self.buf.clear();
            match self.reader.read_until(b'\n', &mut self.buf) {
                Ok(0) => return None,
                Ok(_) => {}
                Err(source) => {
                    self.failed = true;
                    return Some(Err(IngestError::Read { line: self.line_number + 1, source }));
                }
            }
            self.line_number += 1;
            let mut bytes = self.buf.as_slice();
            if let Some(rest) = bytes.strip_suffix(b"\n") {
                bytes = rest;
            }
            if let Some(rest) = bytes.strip_suffix(b"\r") {
                bytes = rest;
            }
            let outcome = match std::str::from_utf8(bytes) {
                Ok(text) => parse_record(&RawLine::split(self.line_number, text), &self.schema),
                Err(_) => Err(SkipReason::Malformed),
            };
            match outcome {
                Ok(record) => {
                    self.stats.record(Ok(()));
                    return Some(Ok(record));
                }
                Err(reason) => self.stats.record(Err(reason)),
            }
        }
    }
}

/// Convenience wrapper over in-memory lines, mostly for tests and examples.
pub fn prune_stream<'a, I>(lines: I, schema: &Schema) -> (Vec<MediaRecord>, PruneStats)
where
    I: IntoIterator<Item = RawLine<'a>>,
{
    let mut stats = PruneStats::default();
    let mut kept = Vec::new();
    for line in lines {
        match parse_record(&line, schema) {
            Ok(record) => {
                stats.record(Ok(()));
                kept.push(record);
            }
            Err(reason) => stats.record(Err(reason)),
        }
    }
    (kept, stats)
}

/// Opens a file for line reading, transparently decompressing gzip input
/// (detected by its magic bytes, not the file name).
pub fn open_input(path: &Path) -> io::Result<Box<dyn BufRead + Send>> {
    let mut file = BufReader::new(File::open(path)?);
    let magic = file.fill_buf()?;
    if magic.starts_with(&[0x1f, 0x8b]) {
        Ok(Box::new(BufReader::new(MultiGzDecoder::new(file))))
    } else {
        Ok(Box::new(file))
    }
}

const BIN_MAGIC: &[u8; 8] = b"GSREC01\0";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecordFormat {
    Csv,
    Bin,
}

impl RecordFormat {
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("bin") => RecordFormat::Bin,
            _ => RecordFormat::Csv,
        }
    }
}

/// Writes pruned records either as CSV (`object_id,user_id,taken_at,lon,lat`)
/// or as a little-endian binary stream with length-prefixed strings.
pub enum RecordWriter<W: Write> {
    Csv(Box<csv::Writer<W>>),
    Bin(W),
}

impl RecordWriter<BufWriter<File>> {
    pub fn create(path: &Path) -> Result<Self, IngestError> {
        let file = BufWriter::new(File::create(path)?);
        RecordWriter::new(file, RecordFormat::from_path(path))
    }
}

impl<W: Write> RecordWriter<W> {
    pub fn new(inner: W, format: RecordFormat) -> Result<Self, IngestError> {
        match format {
            RecordFormat::Csv => {
                let mut w = csv::Writer::from_writer(inner);
                w.write_record(["object_id", "user_id", "taken_at", "lon", "lat"])?;
                Ok(RecordWriter::Csv(Box::new(w)))
            }
            RecordFormat::Bin => {
                let mut inner = inner;
                inner.write_all(BIN_MAGIC)?;
                Ok(RecordWriter::Bin(inner))
            }
        }
    }

    pub fn write(&mut self, r: &MediaRecord) -> Result<(), IngestError> {
        match self {
            RecordWriter::Csv(w) => {
                w.write_record([
                    r.object_id.as_str(),
                    r.user_id.as_str(),
                    &format_timestamp(&r.taken_at),
                    &r.lon.to_string(),
                    &r.lat.to_string(),
                ])?;
            }
            RecordWriter::Bin(w) => {
                for s in [&r.object_id, &r.user_id] {
                    w.write_all(&(s.len() as u32).to_le_bytes())?;
                    w.write_all(s.as_bytes())?;
                }
                w.write_all(&r.taken_at.and_utc().timestamp().to_le_bytes())?;
                w.write_all(&r.taken_at.and_utc().timestamp_subsec_nanos().to_le_bytes())?;
                w.write_all(&r.lon.to_le_bytes())?;
                w.write_all(&r.lat.to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn finish(self) -> Result<W, IngestError> {
        match self {
            RecordWriter::Csv(w) => w.into_inner().map_err(|e| IngestError::Io(e.into_error())),
            RecordWriter::Bin(mut w) => {
                w.flush()?;
                Ok(w)
            }
        }
    }
}

/// Reads a record file written by [`RecordWriter`], choosing the format by
/// its leading bytes.
pub fn read_records(path: &Path) -> Result<Box<dyn Iterator<Item = Result<MediaRecord, IngestError>>>, IngestError> {
    let mut reader = BufReader::new(File::open(path)?);
    let is_bin = reader.fill_buf()?.starts_with(BIN_MAGIC);
    let name = path.display().to_string();
    if is_bin {
        reader.consume(BIN_MAGIC.len());
        Ok(Box::new(BinRecordReader { reader, path: name, done: false }))
    } else {
        let mut rdr = csv::Reader::from_reader(reader);
        let headers = rdr.headers()?.clone();
        let expected = ["object_id", "user_id", "taken_at", "lon", "lat"];
        if headers.iter().ne(expected.iter().copied()) {
            return Err(IngestError::RecordFile { path: name, message: format!("unexpected header {headers:?}") });
        }
        Ok(Box::new(rdr.into_records().map(move |row| {
            let row = row?;
            let bad = |m: &str| IngestError::RecordFile { path: name.clone(), message: m.to_string() };
            let taken_at = parse_timestamp(&row[2]).ok_or_else(|| bad("bad taken_at"))?;
            let lon = row[3].parse().map_err(|_| bad("bad lon"))?;
            let lat = row[4].parse().map_err(|_| bad("bad lat"))?;
            Ok(MediaRecord { object_id: row[0].to_string(), user_id: row[1].to_string(), taken_at, lon, lat })
        })))
    }
}

struct BinRecordReader<R> {
    reader: R,
    path: String,
    done: bool,
}

impl<R: BufRead> BinRecordReader<R> {
    fn read_one(&mut self) -> Result<Option<MediaRecord>, IngestError> {
        if self.reader.fill_buf()?.is_empty() {
            return Ok(None);
        }
        let truncated = |_| IngestError::RecordFile { path: self.path.clone(), message: "truncated record".into() };
        let mut u32buf = [0u8; 4];
        let mut strings = Vec::with_capacity(2);
        for _ in 0..2 {
            self.reader.read_exact(&mut u32buf).map_err(truncated)?;
            let mut s = vec![0u8; u32::from_le_bytes(u32buf) as usize];
            self.reader.read_exact(&mut s).map_err(truncated)?;
            let s = String::from_utf8(s)
                .map_err(|_| IngestError::RecordFile { path: self.path.clone(), message: "non-UTF-8 identifier".into() })?;
            strings.push(s);
        }
        let mut b8 = [0u8; 8];
        self.reader.read_exact(&mut b8).map_err(truncated)?;
        let secs = i64::from_le_bytes(b8);
        self.reader.read_exact(&mut u32buf).map_err(truncated)?;
        let nanos = u32::from_le_bytes(u32buf);
        self.reader.read_exact(&mut b8).map_err(truncated)?;
        let lon = f64::from_le_bytes(b8);
        self.reader.read_exact(&mut b8).map_err(truncated)?;
        let lat = f64::from_le_bytes(b8);
        let taken_at = chrono::DateTime::from_timestamp(secs, nanos)
            .ok_or_else(|| IngestError::RecordFile { path: self.path.clone(), message: "timestamp out of range".into() })?
            .naive_utc();
        let user_id = strings.pop().unwrap_or_default();
        let object_id = strings.pop().unwrap_or_default();
        Ok(Some(MediaRecord { object_id, user_id, taken_at, lon, lat }))
    }
}

impl<R: BufRead> Iterator for BinRecordReader<R> {
    type Item = Result<MediaRecord, IngestError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        match self.read_one() {
            Ok(Some(r)) => Some(Ok(r)),
            Ok(None) => {
                self.done = true;
                None
            }
            Err(e) => {
                self.done = true;
                Some(Err(e))
            }
        }
    }
}
