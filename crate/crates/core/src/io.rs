//! JSON and CSV encodings of results.
//!
//! Every float is written with 17 significant digits, so values read back
//! are bit-identical. JSON documents carry the full [`SpectralConfig`] under
//! `"config"`; CSV files carry it as leading `# key=value` lines followed by
//! a header row.

use std::io;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::approximant::BandCover;
use crate::config::{ConfigError, SpectralConfig};
use crate::interval::IntervalSet;
use crate::oracle::Boundary;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("csv header mismatch: expected {expected:?}, found {found:?}")]
    Header { expected: Vec<String>, found: Vec<String> },
    #[error("csv row {row}: bad value `{value}` in column `{column}`")]
    Field { row: usize, column: String, value: String },
    #[error("csv row {row}: expected {expected} fields, found {found}")]
    Width { row: usize, expected: usize, found: usize },
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// 17 significant digits in scientific notation; `nan`, `inf`, `-inf` for
/// non-finite values.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

struct SignificantDigits;

impl serde_json::ser::Formatter for SignificantDigits {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        write!(writer, "{:.16e}", f64::from(value))
    }
}

/// Serde adapter for floats that may be non-finite: finite values are
/// numbers, the rest are the strings `"inf"`, `"-inf"` and `"nan"`.
pub mod nonfinite {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else {
            s.serialize_str(&super::fmt_f64(*x))
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Number(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Number(x) => Ok(x),
            Repr::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(serde::de::Error::custom(format!("not a float: `{other}`"))),
            },
        }
    }
}

/// Compact JSON, newline-terminated. Plain non-finite floats become `null`;
/// fields that can be non-finite use [`nonfinite`].
pub fn to_json<T: Serialize>(value: &T) -> Result<String, IoError> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SignificantDigits);
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T, IoError> {
    Ok(serde_json::from_str(text)?)
}

/// `{"V", "k", "tol", "bands": [[a, b], …]}` plus summary fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandCoverRecord {
    #[serde(rename = "V")]
    pub coupling: f64,
    #[serde(rename = "k")]
    pub level: usize,
    pub tol: f64,
    pub bands: IntervalSet,
    pub band_count: usize,
    pub max_band_length: f64,
    pub total_length: f64,
    pub config: SpectralConfig,
}

impl BandCoverRecord {
    pub fn new(cover: &BandCover, config: &SpectralConfig) -> Self {
        BandCoverRecord {
            coupling: cover.coupling,
            level: cover.level,
            tol: cover.tol,
            bands: cover.cover.clone(),
            band_count: cover.band_count(),
            max_band_length: cover.max_band_length,
            total_length: cover.total_length,
            config: config.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    #[serde(rename = "V")]
    pub coupling: f64,
    #[serde(rename = "k")]
    pub level: usize,
    #[serde(with = "nonfinite")]
    pub tau: f64,
    #[serde(with = "nonfinite")]
    pub theta: f64,
    pub dim_lower: f64,
    pub dim_upper: f64,
    pub box_dim: f64,
    pub presentation: String,
    pub band_count: usize,
    pub max_band_length: f64,
    pub box_scales: Vec<f64>,
    pub config: SpectralConfig,
}

/// Eigenvalues of one chain and how they sit relative to a band cover.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    #[serde(rename = "V")]
    pub coupling: f64,
    #[serde(rename = "N")]
    pub size: usize,
    pub omega: f64,
    pub boundary: Boundary,
    #[serde(rename = "k")]
    pub level: usize,
    pub eigenvalues: Vec<f64>,
    pub max_distance: f64,
    pub distance_threshold: f64,
    pub outside_threshold: usize,
    pub band_count: usize,
    pub empty_bands: usize,
    pub config: SpectralConfig,
}

/// A table that knows its own CSV column names.
pub trait CsvRow: Sized {
    const HEADER: &'static [&'static str];

    fn fields(&self) -> Vec<String>;

    fn from_fields(fields: &[String], row: usize) -> Result<Self, IoError>;
}

/// Parses column `i` of a row.
pub fn field<T: std::str::FromStr>(fields: &[String], i: usize, header: &[&str], row: usize) -> Result<T, IoError> {
    fields[i].trim().parse().map_err(|_| IoError::Field {
        row,
        column: header[i].to_string(),
        value: fields[i].clone(),
    })
}

/// Parses a float written by [`fmt_f64`].
pub fn float_field(fields: &[String], i: usize, header: &[&str], row: usize) -> Result<f64, IoError> {
    match fields[i].trim() {
        "nan" => Ok(f64::NAN),
        "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        _ => field(fields, i, header, row),
    }
}

/// Writes `# key=value` lines for `config` and then for `extra`, the header
/// and the rows.
pub fn write_csv<R: CsvRow>(config: &SpectralConfig, extra: &[(&str, String)], rows: &[R]) -> Result<String, IoError> {
    let mut out = String::new();
    for (k, v) in config.pairs().iter().map(|(k, v)| (*k, v.clone())).chain(extra.iter().map(|(k, v)| (*k, v.clone()))) {
        out.push_str(&format!("# {k}={v}\n"));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(R::HEADER)?;
    for r in rows {
        w.write_record(r.fields())?;
    }
    let bytes = w.into_inner().map_err(|e| IoError::Io(e.into_error()))?;
    out.push_str(&String::from_utf8(bytes).expect("csv writes UTF-8"));
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable<R> {
    pub config: SpectralConfig,
    /// Comment pairs that are not configuration keys.
    pub extra: Vec<(String, String)>,
    pub rows: Vec<R>,
}

pub fn read_csv<R: CsvRow>(text: &str) -> Result<CsvTable<R>, IoError> {
    let mut config = SpectralConfig::default();
    let mut extra = Vec::new();
    let mut body_start = 0;
    for line in text.split_inclusive('\n') {
        let Some(comment) = line.trim().strip_prefix('#') else { break };
        body_start += line.len();
        if let Some((k, v)) = comment.split_once('=') {
            match config.set(k, v) {
                Ok(()) => {}
                Err(ConfigError::UnknownKey(_)) => extra.push((k.trim().to_string(), v.trim().to_string())),
                Err(e) => return Err(e.into()),
            }
        }
    }
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(&text.as_bytes()[body_start..]);
    let found: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if found != R::HEADER {
        return Err(IoError::Header { expected: R::HEADER.iter().map(|s| s.to_string()).collect(), found });
    }
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let fields: Vec<String> = rec.iter().map(str::to_string).collect();
        if fields.len() != R::HEADER.len() {
            return Err(IoError::Width { row: i + 1, expected: R::HEADER.len(), found: fields.len() });
        }
        rows.push(R::from_fields(&fields, i + 1)?);
    }
    Ok(CsvTable { config, extra, rows })
}

/// One band per row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandRow {
    pub lo: f64,
    pub hi: f64,
}

impl CsvRow for BandRow {
    const HEADER: &'static [&'static str] = &["lo", "hi"];

    fn fields(&self) -> Vec<String> {
        vec![fmt_f64(self.lo), fmt_f64(self.hi)]
    }

    fn from_fields(f: &[String], row: usize) -> Result<Self, IoError> {
        Ok(BandRow { lo: float_field(f, 0, Self::HEADER, row)?, hi: float_field(f, 1, Self::HEADER, row)? })
    }
}

pub fn band_rows(cover: &IntervalSet) -> Vec<BandRow> {
    cover.iter().map(|i| BandRow { lo: i.lo, hi: i.hi }).collect()
}

/// One sample of a gap track.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapTrackRow {
    pub coupling: f64,
    pub gap_left: f64,
    pub gap_right: f64,
    pub width: f64,
    pub width_over_coupling: f64,
}

impl CsvRow for GapTrackRow {
    const HEADER: &'static [&'static str] = &["V", "gap_left", "gap_right", "width", "width_over_V"];

    fn fields(&self) -> Vec<String> {
        [self.coupling, self.gap_left, self.gap_right, self.width, self.width_over_coupling]
            .into_iter()
            .map(fmt_f64)
            .collect()
    }

    fn from_fields(f: &[String], row: usize) -> Result<Self, IoError> {
        let h = Self::HEADER;
        Ok(GapTrackRow {
            coupling: float_field(f, 0, h, row)?,
            gap_left: float_field(f, 1, h, row)?,
            gap_right: float_field(f, 2, h, row)?,
            width: float_field(f, 3, h, row)?,
            width_over_coupling: float_field(f, 4, h, row)?,
        })
    }
}

impl From<&crate::gaps::GapSample> for GapTrackRow {
    fn from(s: &crate::gaps::GapSample) -> Self {
        GapTrackRow {
            coupling: s.coupling,
            gap_left: s.gap.lo,
            gap_right: s.gap.hi,
            width: s.width,
            width_over_coupling: s.width_over_coupling,
        }
    }
}

/// One translate of the Gap Lemma sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TranslateRow {
    pub t: f64,
    pub verdict: crate::sumset::GapLemmaOutcome,
}

impl CsvRow for TranslateRow {
    const HEADER: &'static [&'static str] = &["t", "verdict"];

    fn fields(&self) -> Vec<String> {
        vec![fmt_f64(self.t), format!("{:?}", self.verdict)]
    }

    fn from_fields(f: &[String], row: usize) -> Result<Self, IoError> {
        use crate::sumset::GapLemmaOutcome::*;
        let verdict = match f[1].trim() {
            "Intersect" => Intersect,
            "C1InGapOfC2" => C1InGapOfC2,
            "C2InGapOfC1" => C2InGapOfC1,
            "Inconclusive" => Inconclusive,
            other => {
                return Err(IoError::Field { row, column: "verdict".into(), value: other.into() });
            }
        };
        Ok(TranslateRow { t: float_field(f, 0, Self::HEADER, row)?, verdict })
    }
}

/// One chain eigenvalue with its distance to the comparison cover.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenRow {
    pub index: usize,
    pub eigenvalue: f64,
    pub distance: f64,
}

impl CsvRow for EigenRow {
    const HEADER: &'static [&'static str] = &["index", "eigenvalue", "distance_to_cover"];

    fn fields(&self) -> Vec<String> {
        vec![self.index.to_string(), fmt_f64(self.eigenvalue), fmt_f64(self.distance)]
    }

    fn from_fields(f: &[String], row: usize) -> Result<Self, IoError> {
        let h = Self::HEADER;
        Ok(EigenRow {
            index: field(f, 0, h, row)?,
            eigenvalue: float_field(f, 1, h, row)?,
            distance: float_field(f, 2, h, row)?,
        })
    }
}
