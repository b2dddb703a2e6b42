//! Minkowski sums of interval sets and the Gap Lemma trichotomy.
//!
//! For compact sets `C₁, C₂` with `τ(C₁)·τ(C₂) > 1`, either one lies in a
//! gap of the other or they intersect. Applied to `C₁ = A` and
//! `C₂ = t - B`, an intersection for `t` means `t ∈ A + B`. Sweeping `t`
//! through the interior of `hull(A) + hull(B)` therefore gives a second line
//! of evidence that `A + B` is an interval, next to the direct sum of the
//! covers.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cantor::{thickness, CantorError};
use crate::interval::{Interval, IntervalSet};

/// Largest number of interval pairs [`minkowski_sum`] will form.
pub const MAX_PAIRS: usize = 100_000_000;

/// Number of translates sampled by [`translate_sweep`].
pub const SWEEP_SAMPLES: usize = 1001;

/// Relative merge tolerance used by [`is_interval_default`].
pub const RELATIVE_MERGE_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SumsetError {
    #[error("{pairs} interval pairs exceed the limit of {MAX_PAIRS}")]
    TooLarge { pairs: usize },
}

/// `{a + b : a ∈ A, b ∈ B}`. Endpoints are `aᵢ.lo + bⱼ.lo` and
/// `aᵢ.hi + bⱼ.hi`, each computed once.
///
/// Row `i` (the translates of the shorter set by `aᵢ`) is already sorted by
/// left endpoint, so the rows are merged through a heap keyed on the next
/// left endpoint of each row, coalescing overlaps on the fly.
pub fn minkowski_sum(a: &IntervalSet, b: &IntervalSet) -> Result<IntervalSet, SumsetError> {
    let pairs = a.len().saturating_mul(b.len());
    if pairs > MAX_PAIRS {
        return Err(SumsetError::TooLarge { pairs });
    }
    if pairs == 0 {
        return Ok(IntervalSet::empty());
    }
    let (outer, inner) = if a.len() >= b.len() { (a.intervals(), b.intervals()) } else { (b.intervals(), a.intervals()) };
    let pair = |row: usize, col: usize| Interval::new(outer[row].lo + inner[col].lo, outer[row].hi + inner[col].hi);

    // Min-heap on (left endpoint, row); ties resolved by row for determinism.
    let mut heap: BinaryHeap<Reverse<(OrderedF64, usize)>> =
        (0..outer.len()).map(|r| Reverse((OrderedF64(pair(r, 0).lo), r))).collect();
    let mut next_col = vec![1usize; outer.len()];
    let mut out: Vec<Interval> = Vec::new();
    while let Some(Reverse((_, row))) = heap.pop() {
        let col = next_col[row] - 1;
        let iv = pair(row, col);
        match out.last_mut() {
            Some(last) if iv.lo <= last.hi => last.hi = last.hi.max(iv.hi),
            _ => out.push(iv),
        }
        if next_col[row] < inner.len() {
            heap.push(Reverse((OrderedF64(pair(row, next_col[row]).lo), row)));
            next_col[row] += 1;
        }
    }
    Ok(IntervalSet::from_intervals(out))
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct OrderedF64(f64);

impl Eq for OrderedF64 {}

impl PartialOrd for OrderedF64 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrderedF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Whether `a` has exactly one component once gaps of length `≤ tol` are
/// closed.
pub fn is_interval(a: &IntervalSet, tol: f64) -> bool {
    a.merge_gaps(tol).len() == 1
}

/// Merge tolerance `10⁻⁹ · |hull(a)|`.
pub fn default_merge_tol(a: &IntervalSet) -> f64 {
    a.hull().map_or(0.0, |h| RELATIVE_MERGE_TOL * h.length())
}

pub fn is_interval_default(a: &IntervalSet) -> bool {
    is_interval(a, default_merge_tol(a))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GapLemmaOutcome {
    Intersect,
    C1InGapOfC2,
    C2InGapOfC1,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapLemmaVerdict {
    pub outcome: GapLemmaOutcome,
    pub tau1: f64,
    pub tau2: f64,
    pub product: f64,
    pub note: Option<String>,
}

/// Whether the closed interval `h` lies in one component of the complement
/// of `c`, the two unbounded components included.
fn in_complement_component(h: &Interval, c: &IntervalSet) -> bool {
    let bands = c.intervals();
    // First band whose right end reaches h.lo.
    let i = bands.partition_point(|b| b.hi < h.lo);
    match bands.get(i) {
        None => true,
        Some(b) => b.lo > h.hi,
    }
}

fn tau_or_note(c: &IntervalSet) -> Result<f64, String> {
    match thickness(c) {
        Ok(s) => Ok(s.tau),
        Err(CantorError::EmptyInput(n)) => Err(format!("set has {n} component(s)")),
        Err(e) => Err(e.to_string()),
    }
}

fn classify(a: &IntervalSet, b: &IntervalSet, product: f64) -> GapLemmaOutcome {
    match (a.hull(), b.hull()) {
        (Some(ha), _) if in_complement_component(&ha, b) => GapLemmaOutcome::C1InGapOfC2,
        (_, Some(hb)) if in_complement_component(&hb, a) => GapLemmaOutcome::C2InGapOfC1,
        _ if product > 1.0 => GapLemmaOutcome::Intersect,
        _ => GapLemmaOutcome::Inconclusive,
    }
}

/// Gap Lemma verdict for two finite covers. Sets with fewer than two
/// components are reported as inconclusive with a note.
pub fn gap_lemma_check(a: &IntervalSet, b: &IntervalSet) -> GapLemmaVerdict {
    match (tau_or_note(a), tau_or_note(b)) {
        (Ok(tau1), Ok(tau2)) => {
            let product = tau1 * tau2;
            GapLemmaVerdict { outcome: classify(a, b, product), tau1, tau2, product, note: None }
        }
        (t1, t2) => {
            let note = [t1.as_ref().err().map(|n| format!("C1: {n}")), t2.as_ref().err().map(|n| format!("C2: {n}"))]
                .into_iter()
                .flatten()
                .collect::<Vec<_>>()
                .join("; ");
            let tau1 = t1.unwrap_or(f64::NAN);
            let tau2 = t2.unwrap_or(f64::NAN);
            GapLemmaVerdict {
                outcome: GapLemmaOutcome::Inconclusive,
                tau1,
                tau2,
                product: tau1 * tau2,
                note: Some(note),
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TranslateSample {
    pub t: f64,
    pub outcome: GapLemmaOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranslateSweep {
    pub tau1: f64,
    pub tau2: f64,
    pub product: f64,
    pub samples: Vec<TranslateSample>,
}

impl TranslateSweep {
    pub fn all_intersect(&self) -> bool {
        !self.samples.is_empty() && self.samples.iter().all(|s| s.outcome == GapLemmaOutcome::Intersect)
    }

    pub fn count(&self, outcome: GapLemmaOutcome) -> usize {
        self.samples.iter().filter(|s| s.outcome == outcome).count()
    }
}

/// `t_i = lo + (hi - lo)(i + 1)/(n + 1)` for `i = 0..n`, strictly inside
/// `hull(a) + hull(b) = [lo, hi]`.
pub fn sweep_points(a: &IntervalSet, b: &IntervalSet, n: usize) -> Vec<f64> {
    let (Some(ha), Some(hb)) = (a.hull(), b.hull()) else {
        return Vec::new();
    };
    let (lo, hi) = (ha.lo + hb.lo, ha.hi + hb.hi);
    (0..n).map(|i| lo + (hi - lo) * (i + 1) as f64 / (n + 1) as f64).collect()
}

/// Gap Lemma verdicts for `A` against `t - B` at [`SWEEP_SAMPLES`] values
/// of `t`. Thickness is computed once: it does not change under reflection
/// and translation.
pub fn translate_sweep(a: &IntervalSet, b: &IntervalSet) -> TranslateSweep {
    translate_sweep_n(a, b, SWEEP_SAMPLES)
}

pub fn translate_sweep_n(a: &IntervalSet, b: &IntervalSet, n: usize) -> TranslateSweep {
    let reflected = b.affine(-1.0, 0.0);
    let base = gap_lemma_check(a, &reflected);
    let (tau1, tau2, product) = (base.tau1, base.tau2, base.product);
    let decided = base.note.is_none();
    let samples = sweep_points(a, b, n)
        .into_par_iter()
        .map(|t| {
            let outcome = if !decided {
                GapLemmaOutcome::Inconclusive
            } else {
                let translated = reflected.affine(1.0, t);
                classify(a, &translated, product)
            };
            TranslateSample { t, outcome }
        })
        .collect();
    TranslateSweep { tau1, tau2, product, samples }
}

/// Both lines of evidence for `A + A` being an interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SumsetEvidence {
    pub components: usize,
    pub merge_tol: f64,
    pub sum_is_interval: bool,
    #[serde(with = "crate::io::nonfinite")]
    pub tau: f64,
    #[serde(with = "crate::io::nonfinite")]
    pub product: f64,
    pub intersect_count: usize,
    pub samples: usize,
    pub translates_all_intersect: bool,
}

pub fn self_sum_evidence(a: &IntervalSet) -> Result<SumsetEvidence, SumsetError> {
    let sum = minkowski_sum(a, a)?;
    let merge_tol = default_merge_tol(&sum);
    let sweep = translate_sweep(a, a);
    Ok(SumsetEvidence {
        components: sum.merge_gaps(merge_tol).len(),
        merge_tol,
        sum_is_interval: is_interval(&sum, merge_tol),
        tau: sweep.tau1,
        product: sweep.product,
        intersect_count: sweep.count(GapLemmaOutcome::Intersect),
        samples: sweep.samples.len(),
        translates_all_intersect: sweep.all_intersect(),
    })
}
