use clap::{Args, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use fibspec::approximant::{band_cover, cover_with_max_band, BandCover, BandError};
use fibspec::cantor::{box_dimension, default_box_scales, thickness, CantorError, PRESENTATION};
use fibspec::config::{OutputFormat, SpectralConfig};
use fibspec::gaps::{track_gap_partial, track_largest_gap, GapLabel, GapTrack, TrackError};
use fibspec::io::{
    band_rows, fmt_f64, to_json, write_csv, BandCoverRecord, CsvRow, EigenRow, GapTrackRow, IoError, MetricsRecord,
    OracleReport, TranslateRow,
};
use fibspec::oracle::{chain_eigenvalues, potential, square_spectrum, Boundary, OracleError, MAX_SQUARE_PAIRS};
use fibspec::sumset::{minkowski_sum, self_sum_evidence, translate_sweep, SumsetError, SumsetEvidence};
use fibspec::Error;

/// Default search ceiling for level policies.
const DEFAULT_MAX_LEVEL: usize = 22;

/// Eigenvalues farther than this from the cover are counted as outside.
const ORACLE_DISTANCE: f64 = 0.02;

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Band(BandError::ResolutionExceeded { .. }) => 2,
        Error::Track(TrackError::TrackLost { .. }) => 2,
        Error::Track(TrackError::Band(BandError::ResolutionExceeded { .. })) => 2,
        Error::Oracle(OracleError::ConvergenceFailure { .. }) => 2,
        Error::Oracle(OracleError::TooLarge { .. }) | Error::Sumset(SumsetError::TooLarge { .. }) => 3,
        Error::Cantor(CantorError::TooManyGaps(_)) => 3,
        _ => 1,
    }
}

fn cover(cfg: &SpectralConfig) -> Result<BandCover, Error> {
    Ok(band_cover(cfg.coupling, cfg.level, cfg.tol)?)
}

pub fn bands(cfg: &SpectralConfig) -> Result<String, Error> {
    let c = cover(cfg)?;
    Ok(match cfg.format {
        OutputFormat::Json => to_json(&BandCoverRecord::new(&c, cfg))?,
        OutputFormat::Csv => write_csv(cfg, &[], &band_rows(&c.cover))?,
    })
}

/// Statistics of one cover. An interval has no gaps and infinite thickness.
fn metrics_of(c: &BandCover, cfg: &SpectralConfig) -> Result<MetricsRecord, Error> {
    let (tau, theta, dim_lower, dim_upper) = match thickness(&c.cover) {
        Ok(s) => (s.tau, s.theta, s.dim_lower, s.dim_upper),
        Err(CantorError::EmptyInput(_)) => (f64::INFINITY, f64::INFINITY, 1.0, 1.0),
        Err(e) => return Err(e.into()),
    };
    let box_scales = default_box_scales(&c.cover);
    let box_dim = box_dimension(&c.cover, &box_scales)?;
    Ok(MetricsRecord {
        coupling: c.coupling,
        level: c.level,
        tau,
        theta,
        dim_lower,
        dim_upper,
        box_dim,
        presentation: PRESENTATION.to_string(),
        band_count: c.band_count(),
        max_band_length: c.max_band_length,
        box_scales,
        config: SpectralConfig { coupling: c.coupling, level: c.level, ..cfg.clone() },
    })
}

struct MetricsRow<'a>(&'a MetricsRecord);

impl CsvRow for MetricsRow<'_> {
    const HEADER: &'static [&'static str] =
        &["V", "k", "band_count", "max_band_length", "tau", "theta", "dim_lower", "dim_upper", "box_dim"];

    fn fields(&self) -> Vec<String> {
        let m = self.0;
        vec![
            fmt_f64(m.coupling),
            m.level.to_string(),
            m.band_count.to_string(),
            fmt_f64(m.max_band_length),
            fmt_f64(m.tau),
            fmt_f64(m.theta),
            fmt_f64(m.dim_lower),
            fmt_f64(m.dim_upper),
            fmt_f64(m.box_dim),
        ]
    }

    fn from_fields(_: &[String], _: usize) -> Result<Self, IoError> {
        unreachable!("metrics rows are written only")
    }
}

pub fn metrics(cfg: &SpectralConfig) -> Result<String, Error> {
    let m = metrics_of(&cover(cfg)?, cfg)?;
    Ok(match cfg.format {
        OutputFormat::Json => to_json(&m)?,
        OutputFormat::Csv => write_csv(cfg, &[], &[MetricsRow(&m)])?,
    })
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    Metrics,
    Gaps,
    Sumset,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// What to compute per coupling
    #[arg(long, value_enum, default_value = "metrics")]
    what: SweepKind,
    /// Comma-separated couplings
    #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
    couplings: Vec<f64>,
    /// Use this level for every coupling instead of the level policy
    #[arg(long)]
    fixed_level: Option<usize>,
    /// Highest level the level policy may pick
    #[arg(long, default_value_t = DEFAULT_MAX_LEVEL)]
    max_level: usize,
}

/// The cover used for coupling `v` in a sweep: the fixed level if given,
/// otherwise the first level whose bands are all shorter than `v / 10`.
fn policy_cover(v: f64, args: &SweepArgs, tol: f64) -> Result<BandCover, Error> {
    if let Some(k) = args.fixed_level {
        return Ok(band_cover(v, k, tol)?);
    }
    match cover_with_max_band(v, v.abs() / 10.0, 1, args.max_level, tol)? {
        Some(c) => Ok(c),
        None => Ok(band_cover(v, args.max_level, tol)?),
    }
}

#[derive(Serialize)]
struct SumsetRecord {
    #[serde(rename = "V")]
    coupling: f64,
    #[serde(rename = "k")]
    level: usize,
    #[serde(flatten)]
    evidence: SumsetEvidence,
}

impl CsvRow for SumsetRecord {
    const HEADER: &'static [&'static str] = &[
        "V",
        "k",
        "components",
        "sum_is_interval",
        "tau",
        "product",
        "intersect_count",
        "samples",
        "translates_all_intersect",
    ];

    fn fields(&self) -> Vec<String> {
        let e = &self.evidence;
        vec![
            fmt_f64(self.coupling),
            self.level.to_string(),
            e.components.to_string(),
            e.sum_is_interval.to_string(),
            fmt_f64(e.tau),
            fmt_f64(e.product),
            e.intersect_count.to_string(),
            e.samples.to_string(),
            e.translates_all_intersect.to_string(),
        ]
    }

    fn from_fields(_: &[String], _: usize) -> Result<Self, IoError> {
        unreachable!("sum-set rows are written only")
    }
}

#[derive(Serialize)]
struct GapRow {
    #[serde(rename = "V")]
    coupling: f64,
    #[serde(rename = "k")]
    level: usize,
    label_level: usize,
    label_index: usize,
    #[serde(with = "fibspec::io::nonfinite")]
    gap_left: f64,
    #[serde(with = "fibspec::io::nonfinite")]
    gap_right: f64,
    #[serde(with = "fibspec::io::nonfinite")]
    width: f64,
    #[serde(rename = "width_over_V", with = "fibspec::io::nonfinite")]
    width_over_v: f64,
    status: String,
}

impl CsvRow for GapRow {
    const HEADER: &'static [&'static str] =
        &["V", "k", "label_level", "label_index", "gap_left", "gap_right", "width", "width_over_V", "status"];

    fn fields(&self) -> Vec<String> {
        vec![
            fmt_f64(self.coupling),
            self.level.to_string(),
            self.label_level.to_string(),
            self.label_index.to_string(),
            fmt_f64(self.gap_left),
            fmt_f64(self.gap_right),
            fmt_f64(self.width),
            fmt_f64(self.width_over_v),
            self.status.clone(),
        ]
    }

    fn from_fields(_: &[String], _: usize) -> Result<Self, IoError> {
        unreachable!("gap rows are written only")
    }
}

#[derive(Serialize)]
struct Sweep<R> {
    what: &'static str,
    rows: Vec<R>,
    config: SpectralConfig,
}

fn emit<R: Serialize + CsvRow>(cfg: &SpectralConfig, what: &'static str, rows: Vec<R>) -> Result<String, Error> {
    Ok(match cfg.format {
        OutputFormat::Json => to_json(&Sweep { what, rows, config: cfg.clone() })?,
        OutputFormat::Csv => write_csv(cfg, &[("what", what.to_string())], &rows)?,
    })
}

fn gap_rows(track: &GapTrack, couplings: &[f64]) -> Vec<GapRow> {
    couplings
        .iter()
        .enumerate()
        .map(|(i, &v)| match track.samples.get(i) {
            Some(s) => GapRow {
                coupling: s.coupling,
                level: track.level,
                label_level: track.label.level_opened,
                label_index: track.label.index,
                gap_left: s.gap.lo,
                gap_right: s.gap.hi,
                width: s.width,
                width_over_v: s.width_over_coupling,
                status: "ok".into(),
            },
            None => GapRow {
                coupling: v,
                level: track.level,
                label_level: track.label.level_opened,
                label_index: track.label.index,
                gap_left: f64::NAN,
                gap_right: f64::NAN,
                width: f64::NAN,
                width_over_v: f64::NAN,
                status: "lost".into(),
            },
        })
        .collect()
}

pub fn sweep(cfg: &SpectralConfig, args: &SweepArgs) -> Result<String, Error> {
    match args.what {
        SweepKind::Metrics => {
            let rows = args
                .couplings
                .par_iter()
                .map(|&v| metrics_of(&policy_cover(v, args, cfg.tol)?, cfg))
                .collect::<Result<Vec<_>, Error>>()?;
            match cfg.format {
                OutputFormat::Json => Ok(to_json(&Sweep { what: "metrics", rows, config: cfg.clone() })?),
                OutputFormat::Csv => {
                    let view: Vec<MetricsRow> = rows.iter().map(MetricsRow).collect();
                    Ok(write_csv(cfg, &[("what", "metrics".to_string())], &view)?)
                }
            }
        }
        SweepKind::Sumset => {
            let rows = args
                .couplings
                .par_iter()
                .map(|&v| {
                    let c = policy_cover(v, args, cfg.tol)?;
                    Ok(SumsetRecord { coupling: v, level: c.level, evidence: self_sum_evidence(&c.cover)? })
                })
                .collect::<Result<Vec<_>, Error>>()?;
            emit(cfg, "sumset", rows)
        }
        SweepKind::Gaps => {
            let mut couplings = args.couplings.clone();
            couplings.sort_by(|a, b| b.total_cmp(a));
            couplings.dedup();
            let (track, _) = match args.fixed_level {
                Some(k) => {
                    let widest = fibspec::gaps::largest_gap(couplings[0], k, cfg.tol)?
                        .ok_or(TrackError::NoGap { coupling: couplings[0] })?;
                    track_gap_partial(widest.label, &couplings, k, cfg.tol)?
                }
                None => track_largest_gap(&couplings, args.max_level, cfg.tol)?,
            };
            emit(cfg, "gaps", gap_rows(&track, &couplings))
        }
    }
}

#[derive(Args, Debug)]
pub struct TrackArgs {
    /// Comma-separated couplings, largest first
    #[arg(long, value_delimiter = ',', required = true)]
    couplings: Vec<f64>,
    /// Gap label `LEVEL:INDEX` at the first coupling (default: the widest gap)
    #[arg(long, value_parser = parse_label)]
    label: Option<GapLabel>,
    /// Highest level the level policy may pick
    #[arg(long, default_value_t = DEFAULT_MAX_LEVEL)]
    max_level: usize,
}

fn parse_label(s: &str) -> Result<GapLabel, String> {
    let (l, i) = s.split_once(':').ok_or("expected LEVEL:INDEX")?;
    Ok(GapLabel {
        level_opened: l.trim().parse().map_err(|_| format!("bad level `{l}`"))?,
        index: i.trim().parse().map_err(|_| format!("bad index `{i}`"))?,
    })
}

#[derive(Serialize)]
struct TrackRecord<'a> {
    track: &'a GapTrack,
    edge_speed: f64,
    max_ratio_variation: f64,
    config: &'a SpectralConfig,
}

/// With `--label`, the track runs at `-k`; otherwise the widest gap is
/// tracked at the policy level.
pub fn track(cfg: &SpectralConfig, args: &TrackArgs) -> Result<String, Error> {
    let (track, lost) = match args.label {
        Some(label) => track_gap_partial(label, &args.couplings, cfg.level, cfg.tol)?,
        None => track_largest_gap(&args.couplings, args.max_level, cfg.tol)?,
    };
    if let Some(e) = lost {
        return Err(e.into());
    }
    let cfg = SpectralConfig { level: track.level, ..cfg.clone() };
    Ok(match cfg.format {
        OutputFormat::Json => to_json(&TrackRecord {
            track: &track,
            edge_speed: track.edge_speed(),
            max_ratio_variation: track.max_ratio_variation(),
            config: &cfg,
        })?,
        OutputFormat::Csv => {
            let rows: Vec<GapTrackRow> = track.samples.iter().map(GapTrackRow::from).collect();
            let label = format!("{}:{}", track.label.level_opened, track.label.index);
            write_csv(&cfg, &[("label", label)], &rows)?
        }
    })
}

pub fn sumset(cfg: &SpectralConfig) -> Result<String, Error> {
    let c = cover(cfg)?;
    Ok(match cfg.format {
        OutputFormat::Json => {
            #[derive(Serialize)]
            struct Out<'a> {
                #[serde(flatten)]
                record: SumsetRecord,
                config: &'a SpectralConfig,
            }
            let record = SumsetRecord { coupling: c.coupling, level: c.level, evidence: self_sum_evidence(&c.cover)? };
            to_json(&Out { record, config: cfg })?
        }
        OutputFormat::Csv => {
            let sweep = translate_sweep(&c.cover, &c.cover);
            let rows: Vec<TranslateRow> =
                sweep.samples.iter().map(|s| TranslateRow { t: s.t, verdict: s.outcome }).collect();
            write_csv(cfg, &[("tau", fmt_f64(sweep.tau1)), ("product", fmt_f64(sweep.product))], &rows)?
        }
    })
}

#[derive(ValueEnum, Debug, Clone, Copy)]
pub enum BoundaryArg {
    Dirichlet,
    Periodic,
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    /// Chain length
    #[arg(short = 'N', long = "size", default_value_t = 610)]
    size: usize,
    #[arg(long, value_enum, default_value = "dirichlet")]
    boundary: BoundaryArg,
    /// Compare all pairwise eigenvalue sums with B_k + B_k instead
    #[arg(long)]
    square: bool,
}

#[derive(Serialize)]
struct SquareReport {
    #[serde(rename = "V")]
    coupling: f64,
    #[serde(rename = "N")]
    size: usize,
    #[serde(rename = "k")]
    level: usize,
    sum_count: usize,
    sumset_components: usize,
    max_distance: f64,
    distance_threshold: f64,
    outside_threshold: usize,
    config: SpectralConfig,
}

fn square_oracle(cfg: &SpectralConfig, args: &OracleArgs, boundary: Boundary) -> Result<String, Error> {
    let pairs = args.size.saturating_mul(args.size);
    if pairs > MAX_SQUARE_PAIRS {
        return Err(OracleError::TooLarge { pairs }.into());
    }
    let spectrum = chain_eigenvalues(&potential(cfg.coupling, cfg.omega, args.size), boundary)?;
    let sums = square_spectrum(&spectrum)?;
    let c = cover(cfg)?;
    let sum_cover = minkowski_sum(&c.cover, &c.cover)?;
    let distances: Vec<f64> = sums.iter().map(|&e| sum_cover.distance_to(e)).collect();
    Ok(match cfg.format {
        OutputFormat::Json => to_json(&SquareReport {
            coupling: cfg.coupling,
            size: args.size,
            level: c.level,
            sum_count: sums.len(),
            sumset_components: sum_cover.len(),
            max_distance: distances.iter().copied().fold(0.0, f64::max),
            distance_threshold: ORACLE_DISTANCE,
            outside_threshold: distances.iter().filter(|&&d| d > ORACLE_DISTANCE).count(),
            config: cfg.clone(),
        })?,
        OutputFormat::Csv => {
            let rows: Vec<EigenRow> = sums
                .iter()
                .zip(&distances)
                .enumerate()
                .map(|(index, (&eigenvalue, &distance))| EigenRow { index, eigenvalue, distance })
                .collect();
            write_csv(cfg, &[("N", args.size.to_string()), ("square", "true".into())], &rows)?
        }
    })
}

pub fn oracle(cfg: &SpectralConfig, args: &OracleArgs) -> Result<String, Error> {
    let boundary = match args.boundary {
        BoundaryArg::Dirichlet => Boundary::Dirichlet,
        BoundaryArg::Periodic => Boundary::Periodic,
    };
    if args.square {
        return square_oracle(cfg, args, boundary);
    }
    let spectrum = chain_eigenvalues(&potential(cfg.coupling, cfg.omega, args.size), boundary)?;
    let c = cover(cfg)?;
    let distances: Vec<f64> = spectrum.eigenvalues.iter().map(|&e| c.cover.distance_to(e)).collect();
    let empty_bands =
        c.cover.iter().filter(|b| !spectrum.eigenvalues.iter().any(|&e| b.contains(e))).count();
    Ok(match cfg.format {
        OutputFormat::Json => to_json(&OracleReport {
            coupling: cfg.coupling,
            size: spectrum.size,
            omega: cfg.omega,
            boundary,
            level: c.level,
            max_distance: distances.iter().copied().fold(0.0, f64::max),
            distance_threshold: ORACLE_DISTANCE,
            outside_threshold: distances.iter().filter(|&&d| d > ORACLE_DISTANCE).count(),
            band_count: c.band_count(),
            empty_bands,
            eigenvalues: spectrum.eigenvalues,
            config: cfg.clone(),
        })?,
        OutputFormat::Csv => {
            let rows: Vec<EigenRow> = spectrum
                .eigenvalues
                .iter()
                .zip(&distances)
                .enumerate()
                .map(|(index, (&eigenvalue, &distance))| EigenRow { index, eigenvalue, distance })
                .collect();
            let extra = [("N", args.size.to_string()), ("boundary", format!("{boundary:?}").to_lowercase())];
            write_csv(cfg, &extra, &rows)?
        }
    })
}
