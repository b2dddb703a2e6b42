//! Gap labels across levels and gap tracks across couplings.
//!
//! A gap of `B_k` is labeled by the lowest level `j ≤ k` at which some gap of
//! `B_j` overlaps it, together with that ancestor's left-to-right index among
//! the gaps of `B_j`. Because the covers nest, refining the level never
//! changes the label of a surviving gap.
//!
//! Tracks follow one gap through decreasing couplings at a fixed level by
//! interval overlap. Between requested samples the coupling is stepped
//! geometrically so that no step shrinks `V` by more than [`MAX_STEP_RATIO`].

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::approximant::{band_covers, BandCover, BandError};
use crate::interval::Interval;

/// Largest relative coupling step `ΔV / V` taken between matched covers.
pub const MAX_STEP_RATIO: f64 = 0.5;

/// Relative step actually used for internal continuation.
pub const CONTINUATION_STEP: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GapLabel {
    pub level_opened: usize,
    pub index: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabeledGap {
    pub label: GapLabel,
    pub gap: Interval,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrackError {
    #[error("couplings must be positive and strictly decreasing")]
    BadCouplings,
    #[error("gap {label:?} does not exist at V = {coupling}")]
    UnknownLabel { label: GapLabel, coupling: f64 },
    #[error("cover at V = {coupling} has no gaps")]
    NoGap { coupling: f64 },
    #[error("lost track of the gap at V = {coupling} ({candidates} overlapping gaps)")]
    TrackLost { coupling: f64, candidates: usize },
    #[error(transparent)]
    Band(#[from] BandError),
}

/// Labels the gaps of the last cover in `covers`, which must hold
/// consecutive levels starting at 1 (as returned by [`band_covers`]).
pub fn label_gaps_in(covers: &[BandCover]) -> Vec<LabeledGap> {
    let Some(top) = covers.last() else {
        return Vec::new();
    };
    let per_level: Vec<Vec<Interval>> = covers.iter().map(|c| c.cover.gaps()).collect();
    top.cover
        .gaps()
        .into_iter()
        .map(|gap| {
            let label = per_level
                .iter()
                .zip(covers)
                .find_map(|(gaps, c)| {
                    let first = gaps.partition_point(|g| g.hi <= gap.lo);
                    gaps.get(first)
                        .filter(|g| g.lo < gap.hi)
                        .map(|_| GapLabel { level_opened: c.level, index: first })
                })
                .expect("a gap of the top cover overlaps itself");
            LabeledGap { label, gap }
        })
        .collect()
}

/// Labeled gaps of `B_k(V)`.
pub fn label_gaps(coupling: f64, level: usize, tol: f64) -> Result<Vec<LabeledGap>, BandError> {
    Ok(label_gaps_in(&band_covers(coupling, level, tol)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapSample {
    pub coupling: f64,
    pub gap: Interval,
    pub width: f64,
    pub width_over_coupling: f64,
}

impl GapSample {
    fn new(coupling: f64, gap: Interval) -> Self {
        let width = gap.length();
        GapSample { coupling, gap, width, width_over_coupling: width / coupling }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapTrack {
    pub label: GapLabel,
    pub level: usize,
    pub samples: Vec<GapSample>,
}

impl GapTrack {
    /// Largest `|Δedge| / ΔV` between consecutive samples.
    pub fn edge_speed(&self) -> f64 {
        self.samples
            .windows(2)
            .map(|w| {
                let dv = (w[0].coupling - w[1].coupling).abs();
                let moved = (w[0].gap.lo - w[1].gap.lo).abs().max((w[0].gap.hi - w[1].gap.hi).abs());
                moved / dv
            })
            .fold(0.0, f64::max)
    }

    /// Largest relative change of `|U_V| / V` between consecutive samples.
    pub fn max_ratio_variation(&self) -> f64 {
        self.samples
            .windows(2)
            .map(|w| (w[1].width_over_coupling - w[0].width_over_coupling).abs() / w[0].width_over_coupling)
            .fold(0.0, f64::max)
    }

    pub fn ratio_spread(&self) -> f64 {
        let r = self.samples.iter().map(|s| s.width_over_coupling);
        let max = r.clone().fold(f64::NEG_INFINITY, f64::max);
        let min = r.fold(f64::INFINITY, f64::min);
        max / min
    }
}

/// The gap of `gaps` (computed at coupling `to`) that best continues `prev`:
/// the only overlapping gap, or one whose overlap is more than twice that of
/// any other.
fn continue_gap(prev: &Interval, to: f64, gaps: &[Interval]) -> Result<Interval, TrackError> {
    let guess = *prev;
    let mut overlaps: Vec<(f64, Interval)> = gaps
        .iter()
        .filter_map(|g| {
            let o = g.hi.min(guess.hi) - g.lo.max(guess.lo);
            (o > 0.0).then_some((o, *g))
        })
        .collect();
    overlaps.sort_by(|a, b| b.0.total_cmp(&a.0));
    match overlaps.as_slice() {
        [] => Err(TrackError::TrackLost { coupling: to, candidates: 0 }),
        [(_, g)] => Ok(*g),
        [(a, g), (b, _), ..] if *a > 2.0 * *b => Ok(*g),
        _ => Err(TrackError::TrackLost { coupling: to, candidates: overlaps.len() }),
    }
}

/// Geometric coupling grid from `from` down to `to` with relative steps of
/// at most [`CONTINUATION_STEP`].
fn substeps(from: f64, to: f64) -> Vec<f64> {
    let n = ((from / to).ln() / (1.0 / (1.0 - CONTINUATION_STEP)).ln()).ceil().max(1.0) as usize;
    (1..=n).map(|i| if i == n { to } else { from * (to / from).powf(i as f64 / n as f64) }).collect()
}

/// Follows the gap labeled `label` at the first (largest) coupling through
/// the remaining couplings, all at level `level`.
pub fn track_gap(label: GapLabel, couplings: &[f64], level: usize, tol: f64) -> Result<GapTrack, TrackError> {
    match track_gap_partial(label, couplings, level, tol)? {
        (track, None) => Ok(track),
        (_, Some(lost)) => Err(lost),
    }
}

/// Like [`track_gap`], but a lost track returns the samples gathered so far
/// together with the [`TrackError::TrackLost`] that ended it.
pub fn track_gap_partial(
    label: GapLabel,
    couplings: &[f64],
    level: usize,
    tol: f64,
) -> Result<(GapTrack, Option<TrackError>), TrackError> {
    if couplings.is_empty()
        || couplings.iter().any(|&v| !v.is_finite() || v <= 0.0)
        || couplings.windows(2).any(|w| w[1] >= w[0])
    {
        return Err(TrackError::BadCouplings);
    }
    let start = couplings[0];
    let gap = label_gaps(start, level, tol)?
        .into_iter()
        .find(|g| g.label == label)
        .ok_or(TrackError::UnknownLabel { label, coupling: start })?
        .gap;

    // Every coupling visited, requested or intermediate, in order.
    let mut path = vec![start];
    for w in couplings.windows(2) {
        path.extend(substeps(w[0], w[1]));
    }
    let gap_sets: Vec<Vec<Interval>> = path[1..]
        .par_iter()
        .map(|&v| band_covers(v, level, tol).map(|c| c.last().expect("level ≥ 1").cover.gaps()))
        .collect::<Result<_, _>>()?;

    let mut track = GapTrack { label, level, samples: vec![GapSample::new(start, gap)] };
    let mut current = gap;
    let mut next_requested = 1;
    for (i, gaps) in gap_sets.iter().enumerate() {
        let to = path[i + 1];
        current = match continue_gap(&current, to, gaps) {
            Ok(g) => g,
            Err(e) => return Ok((track, Some(e))),
        };
        if next_requested < couplings.len() && to == couplings[next_requested] {
            track.samples.push(GapSample::new(to, current));
            next_requested += 1;
        }
    }
    Ok((track, None))
}

/// The widest labeled gap of `B_k(V)`.
pub fn largest_gap(coupling: f64, level: usize, tol: f64) -> Result<Option<LabeledGap>, BandError> {
    Ok(label_gaps(coupling, level, tol)?
        .into_iter()
        .max_by(|a, b| a.gap.length().total_cmp(&b.gap.length())))
}

/// Smallest level whose bands at `coupling` are all shorter than a tenth of
/// `gap_width`.
pub fn track_level(coupling: f64, gap_width: f64, max_level: usize, tol: f64) -> Result<Option<usize>, BandError> {
    Ok(band_covers(coupling, max_level, tol)?
        .into_iter()
        .find(|c| c.max_band_length < 0.1 * gap_width)
        .map(|c| c.level))
}

/// Level at which the widest gap is first located before the tracking level
/// is chosen.
pub const PROBE_LEVEL: usize = 8;

/// Tracks the widest gap of the cover at `couplings[0]`. The level is the
/// first one (up to `max_level`) whose bands there are all shorter than a
/// tenth of that gap.
pub fn track_largest_gap(
    couplings: &[f64],
    max_level: usize,
    tol: f64,
) -> Result<(GapTrack, Option<TrackError>), TrackError> {
    let start = *couplings.first().ok_or(TrackError::BadCouplings)?;
    let probe = largest_gap(start, PROBE_LEVEL.min(max_level), tol)?.ok_or(TrackError::NoGap { coupling: start })?;
    let level = track_level(start, probe.gap.length(), max_level, tol)?.unwrap_or(max_level);
    let widest = largest_gap(start, level, tol)?.ok_or(TrackError::NoGap { coupling: start })?;
    track_gap_partial(widest.label, couplings, level, tol)
}
