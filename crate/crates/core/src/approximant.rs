//! Periodic-approximant band structure.
//!
//! Along the spectral line the trace map produces the half-trace sequence
//!
//! ```text
//! x₋₁ = 1,  x₀ = E/2,  x₁ = (E - V)/2,  x_{k+1} = 2 x_k x_{k-1} - x_{k-2},
//! ```
//!
//! where `x_k(E)` is half the trace of the transfer matrix over the `k`-th
//! Fibonacci word (length `F_k`, with `F₀ = F₁ = 1`). It is a polynomial of
//! degree `F_k`, and `σ_k = {E : |x_k(E)| ≤ 1}` is the spectrum of the
//! periodic operator built from that word. The covers
//! `B_k = σ_k ∪ σ_{k+1}` decrease to the spectrum.
//!
//! # Band-edge isolation
//!
//! `x_k` is the discriminant of a periodic Jacobi operator: it has `F_k`
//! simple real zeros, one per band, and exactly one critical point between
//! consecutive zeros, where `|x_k| ≥ 1`. So once all `F_k` zeros are
//! bracketed by sign changes, everything else is a bisection on a monotone
//! piece:
//!
//! 1. Sample `x_k` over the search domain with steps proportional to the
//!    local band width and count sign changes. A polynomial of degree `F_k`
//!    cannot have more roots than that, so a count of exactly `F_k` proves
//!    every zero is bracketed. Otherwise the step scale is halved, within a
//!    fixed work budget.
//! 2. Between consecutive zeros, bisect on the sign of `x_k'` toward the
//!    critical point, stopping early at any point where `|x_k| > 1`. If one
//!    is found the gap edges are the unique crossings of `|x_k| = 1` on
//!    either side of it; if not the neighbouring bands touch.
//! 3. The outermost edges are the unique crossings outside the first and
//!    last zeros.
//!
//! Levels are computed in increasing order and the grid for `σ_k` is laid
//! only over `σ_{k-1} ∪ σ_{k-2}`, which contains it. If the count check
//! ever fails there the search falls back to the whole hull.

use crate::interval::{Interval, IntervalSet};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Saturation magnitude for half-trace evaluation.
pub const HALF_TRACE_GUARD: f64 = 1e300;

/// Default band-edge accuracy.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Desk-scale level ceiling.
pub const DEFAULT_MAX_LEVEL: usize = 20;

/// Step length as a fraction of `max(1, |x_k|) / |x_k'|` on the first pass.
const INITIAL_STEP_SCALE: f64 = 0.125;

/// Every search component is sampled at least this many times.
const MIN_STEPS_PER_COMPONENT: usize = 16;

/// Total sampling work allowed per expected zero, summed over all
/// step-scale halvings, before a level is declared unresolvable.
const STEP_BUDGET_PER_ZERO: usize = 4096;

/// A gap is opened only when `|x_k|` exceeds one by more than this at some
/// point between two zeros. Touching bands evaluate to `1 ± O(k·ε)` at their
/// common edge.
const GAP_EXCESS_FLOOR: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BandError {
    #[error("level {level}: found {found} zeros of x_k, expected {expected}; band edges not separable at tol {tol:e}")]
    ResolutionExceeded { level: usize, found: usize, expected: usize, tol: f64 },
    #[error("invalid tolerance {0}")]
    InvalidTolerance(f64),
    #[error("level must be at least {min}, got {level}")]
    InvalidLevel { level: usize, min: usize },
}

/// `F_k` with `F₀ = F₁ = 1`: the length of the `k`-th Fibonacci word and
/// the degree of `x_k`.
pub fn fibonacci(k: usize) -> usize {
    let (mut a, mut b) = (1usize, 1usize);
    for _ in 0..k {
        let c = a + b;
        a = b;
        b = c;
    }
    a
}

/// Half-trace sequence `x₋₁, …, x_k` at one energy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfTraceSeq {
    pub energy: f64,
    pub coupling: f64,
    /// `values[j]` holds `x_{j-1}`.
    pub values: Vec<f64>,
    /// `dx_j/dE`, aligned with `values`.
    pub derivatives: Option<Vec<f64>>,
    /// Set when the sequence was truncated at the overflow guard; holds the
    /// first index `j` whose value would have exceeded it.
    pub escaped_at: Option<usize>,
}

impl HalfTraceSeq {
    /// `x_j`, if computed.
    pub fn get(&self, j: isize) -> Option<f64> {
        self.values.get((j + 1) as usize).copied()
    }

    /// Deviation of the invariant from `V²/4` over the computed triples.
    pub fn max_invariant_drift(&self) -> f64 {
        let target = 0.25 * self.coupling * self.coupling;
        self.values
            .windows(3)
            .map(|w| {
                let (z, y, x) = (w[0], w[1], w[2]);
                (x * x + y * y + z * z - 2.0 * x * y * z - 1.0 - target).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Drift of the invariant relative to the size of its terms,
    /// `|I - V²/4| / (1 + x² + y² + z²)`, maximized over triples.
    pub fn max_relative_invariant_drift(&self) -> f64 {
        let target = 0.25 * self.coupling * self.coupling;
        self.values
            .windows(3)
            .map(|w| {
                let (z, y, x) = (w[0], w[1], w[2]);
                let scale = 1.0 + x * x + y * y + z * z;
                (x * x + y * y + z * z - 2.0 * x * y * z - 1.0 - target).abs() / scale
            })
            .fold(0.0, f64::max)
    }
}

/// Computes `x₋₁ … x_k`, optionally with `E`-derivatives from
/// `x'_{j+1} = 2(x'_j x_{j-1} + x_j x'_{j-1}) - x'_{j-2}`.
pub fn half_traces(energy: f64, coupling: f64, k: usize, with_derivatives: bool) -> HalfTraceSeq {
    let mut values = vec![1.0, 0.5 * energy, 0.5 * (energy - coupling)];
    let mut derivs = vec![0.0, 0.5, 0.5];
    let mut escaped_at = None;
    while values.len() < k + 2 {
        let n = values.len();
        let next = 2.0 * values[n - 1] * values[n - 2] - values[n - 3];
        if !next.is_finite() || next.abs() > HALF_TRACE_GUARD {
            escaped_at = Some(n - 1);
            break;
        }
        let d = 2.0 * (derivs[n - 1] * values[n - 2] + values[n - 1] * derivs[n - 2]) - derivs[n - 3];
        values.push(next);
        derivs.push(d);
    }
    values.truncate(k + 2);
    derivs.truncate(k + 2);
    HalfTraceSeq {
        energy,
        coupling,
        values,
        derivatives: with_derivatives.then_some(derivs),
        escaped_at,
    }
}

/// Magnitude past which two consecutive half-traces are treated as escaped:
/// from there on `x_{j+1} = 2 x_j x_{j-1}` to relative accuracy far below
/// machine epsilon, so only signs and logarithmic derivatives are tracked.
const ESCAPE_MAGNITUDE: f64 = 1e100;

/// `x_k(E)` with the rate `|x_k'| / max(1, |x_k|)`. Escaped values saturate
/// at `±HALF_TRACE_GUARD` with the correct sign.
fn trace_and_rate(energy: f64, coupling: f64, k: usize) -> (f64, f64) {
    let (x, dx, escaped) = trace_state(energy, coupling, k);
    if escaped {
        (x, dx.abs())
    } else {
        (x, dx.abs() / x.abs().max(1.0))
    }
}

/// Returns `(x_k, d, escaped)`. Before escape `d = x_k'`; after escape `x_k`
/// is saturated and `d = x_k'/x_k`.
#[inline]
fn trace_state(energy: f64, coupling: f64, k: usize) -> (f64, f64, bool) {
    let (mut z, mut y, mut x) = (1.0, 0.5 * energy, 0.5 * (energy - coupling));
    let (mut dz, mut dy, mut dx) = (0.0, 0.5, 0.5);
    if k == 0 {
        return (y, dy, false);
    }
    let mut j = 1;
    while j < k {
        if x.abs() > ESCAPE_MAGNITUDE && y.abs() > ESCAPE_MAGNITUDE {
            let (mut sy, mut sx) = (y.signum(), x.signum());
            let (mut ly, mut lx) = (dy / y, dx / x);
            while j < k {
                let s = sx * sy;
                let l = lx + ly;
                sy = sx;
                sx = s;
                ly = lx;
                lx = l;
                j += 1;
            }
            return (sx * HALF_TRACE_GUARD, lx, true);
        }
        let next = 2.0 * x * y - z;
        let dnext = 2.0 * (dx * y + x * dy) - dz;
        z = y;
        y = x;
        x = next;
        dz = dy;
        dy = dx;
        dx = dnext;
        j += 1;
    }
    (x, dx, false)
}

/// `x_k(E)` with sign-preserving saturation, so that signs stay meaningful
/// deep inside gaps where the true value overflows.
#[inline]
pub fn half_trace(energy: f64, coupling: f64, k: usize) -> f64 {
    trace_state(energy, coupling, k).0
}

/// `(x_k(E), x_k'(E))`, saturated like [`half_trace`].
#[inline]
pub fn half_trace_with_derivative(energy: f64, coupling: f64, k: usize) -> (f64, f64) {
    let (x, d, escaped) = trace_state(energy, coupling, k);
    if escaped {
        (x, (d * x).clamp(-HALF_TRACE_GUARD, HALF_TRACE_GUARD))
    } else {
        (x, d)
    }
}

/// The energy window `[-2 - V, 2 + V]` that contains every `σ_k`.
pub fn energy_hull(coupling: f64) -> Interval {
    let r = 2.0 + coupling.abs();
    Interval::new(-r, r)
}

/// Band-edge solver for one coupling.
#[derive(Debug, Clone)]
pub struct BandSolver {
    coupling: f64,
    tol: f64,
}

impl BandSolver {
    pub fn new(coupling: f64, tol: f64) -> Result<Self, BandError> {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(BandError::InvalidTolerance(tol));
        }
        Ok(BandSolver { coupling, tol })
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// `σ₀, …, σ_{max_level}`.
    pub fn sigma_levels(&self, max_level: usize) -> Result<Vec<IntervalSet>, BandError> {
        let v = self.coupling;
        let mut out: Vec<IntervalSet> = Vec::with_capacity(max_level + 1);
        out.push(IntervalSet::single(-2.0, 2.0));
        if max_level >= 1 {
            out.push(IntervalSet::single(v - 2.0, v + 2.0));
        }
        for k in 2..=max_level {
            let domain = out[k - 1].union(&out[k - 2]);
            let s = self.sigma_within(k, &domain)?;
            out.push(s);
        }
        Ok(out)
    }

    /// `σ_k` computed from scratch.
    pub fn sigma(&self, k: usize) -> Result<IntervalSet, BandError> {
        Ok(self.sigma_levels(k)?.pop().expect("level list is nonempty"))
    }

    /// `σ_k`, searching for zeros first inside `domain` and then across the
    /// whole hull.
    fn sigma_within(&self, k: usize, domain: &IntervalSet) -> Result<IntervalSet, BandError> {
        let hull = energy_hull(self.coupling);
        let pad = (64.0 * self.tol).max(1e-9);
        let local = domain.dilate(pad).intersection(&IntervalSet::single(hull.lo, hull.hi));
        match self.isolate_zeros(k, &local) {
            Ok(zeros) => Ok(self.bands_from_zeros(k, &zeros)),
            Err(_) => {
                let zeros = self.isolate_zeros(k, &IntervalSet::single(hull.lo, hull.hi))?;
                Ok(self.bands_from_zeros(k, &zeros))
            }
        }
    }

    /// Brackets and bisects all `F_k` zeros of `x_k` inside `domain`.
    fn isolate_zeros(&self, k: usize, domain: &IntervalSet) -> Result<Vec<f64>, BandError> {
        let v = self.coupling;
        let expected = fibonacci(k);
        let mut found = 0;
        let mut step_scale = INITIAL_STEP_SCALE;
        let budget = STEP_BUDGET_PER_ZERO * expected + 1_000_000;
        let mut spent = 0;
        while spent < budget {
            let sweeps: Vec<(Vec<(f64, f64)>, usize)> = domain
                .intervals()
                .par_iter()
                .map(|iv| adaptive_sign_changes(iv, v, k, step_scale, self.tol))
                .collect();
            spent += sweeps.iter().map(|s| s.1).sum::<usize>();
            let cells: Vec<(f64, f64)> = sweeps.into_iter().flat_map(|s| s.0).collect();
            found = cells.len();
            if found == expected {
                return Ok(cells
                    .par_iter()
                    .map(|&(a, b)| bisect_sign(|e| half_trace(e, v, k), a, b, 0.0))
                    .collect());
            }
            if found > expected {
                break;
            }
            step_scale *= 0.5;
        }
        Err(BandError::ResolutionExceeded { level: k, found, expected, tol: self.tol })
    }

    fn bands_from_zeros(&self, k: usize, zeros: &[f64]) -> IntervalSet {
        let v = self.coupling;
        let tol = self.tol;
        let f = move |e: f64| half_trace(e, v, k);
        let hull = energy_hull(v);
        let (outer_lo, outer_hi) = (hull.lo - 0.5, hull.hi + 0.5);

        let first = zeros[0];
        let last = zeros[zeros.len() - 1];
        let left_edge = crossing(&f, first, outer_lo, tol);
        let right_edge = crossing(&f, last, outer_hi, tol);

        // For each pair of consecutive zeros: Some((gap_lo, gap_hi)) if open.
        let gaps: Vec<Option<(f64, f64)>> = zeros
            .par_windows(2)
            .map(|w| {
                let peak = gap_witness(v, k, w[0], w[1], tol)?;
                let lo = crossing(&f, w[0], peak, tol);
                let hi = crossing(&f, w[1], peak, tol);
                (hi - lo > tol).then_some((lo, hi))
            })
            .collect();

        let mut bands = Vec::with_capacity(zeros.len());
        let mut start = left_edge;
        for (lo, hi) in gaps.into_iter().flatten() {
            bands.push(Interval::new(start, lo));
            start = hi;
        }
        bands.push(Interval::new(start, right_edge));
        IntervalSet::from_intervals(bands)
    }
}

/// Cells of `iv` across which `x_k` changes sign, found by stepping with
/// `h = scale · max(1, |x|) / |x'|`: a fixed fraction of the local band
/// width near zeros, and of the growth length inside gaps. Steps may at most
/// double from one to the next, since `x_k'` vanishes at the critical point
/// inside every gap. Zero counts as positive.
fn adaptive_sign_changes(iv: &Interval, v: f64, k: usize, scale: f64, tol: f64) -> (Vec<(f64, f64)>, usize) {
    let h_max = iv.length() / MIN_STEPS_PER_COMPONENT as f64;
    let h_min = tol;
    let mut out = Vec::new();
    let mut steps = 0;
    let mut e = iv.lo;
    let (mut x, mut rate) = trace_and_rate(e, v, k);
    let mut h_prev = f64::INFINITY;
    while e < iv.hi {
        let h = (scale / rate)
            .min(2.0 * h_prev)
            .clamp(h_min, h_max.max(h_min));
        h_prev = h;
        let next = (e + h).min(iv.hi);
        let (nx, nrate) = trace_and_rate(next, v, k);
        if (x >= 0.0) != (nx >= 0.0) {
            out.push((e, next));
        }
        e = next;
        x = nx;
        rate = nrate;
        steps += 1;
    }
    (out, steps)
}

/// Bisection for a sign change of `f` on `[a, b]`.
fn bisect_sign(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let sa = f(a) >= 0.0;
    while b - a > tol {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if (f(m) >= 0.0) == sa {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Unique point between a zero `z` of `x_k` and a point `far` with
/// `|x_k(far)| > 1` where `|x_k| = 1`, assuming `x_k` is unimodal there.
/// Returns `z` when rounding already puts `|x_k(z)|` past 1.
fn crossing(f: &impl Fn(f64) -> f64, z: f64, far: f64, tol: f64) -> f64 {
    let target = if f(far) >= 0.0 { 1.0 } else { -1.0 };
    let g = |e: f64| f(e) - target;
    if (g(z) >= 0.0) == (g(far) >= 0.0) {
        return z;
    }
    let (lo, hi) = if z < far { (z, far) } else { (far, z) };
    bisect_sign(g, lo, hi, tol)
}

/// A point strictly between consecutive zeros `a < b` where `|x_k| > 1`,
/// or `None` if the neighbouring bands touch.
fn gap_witness(coupling: f64, k: usize, a: f64, b: f64, tol: f64) -> Option<f64> {
    let (_, da) = half_trace_with_derivative(a, coupling, k);
    let rising = da >= 0.0;
    let (mut lo, mut hi) = (a, b);
    let threshold = 1.0 + GAP_EXCESS_FLOOR;
    while hi - lo > 0.25 * tol {
        let m = 0.5 * (lo + hi);
        if m <= lo || m >= hi {
            break;
        }
        let (x, dx) = half_trace_with_derivative(m, coupling, k);
        if x.abs() > threshold {
            return Some(m);
        }
        if (dx >= 0.0) == rising {
            lo = m;
        } else {
            hi = m;
        }
    }
    None
}

/// `σ_k` for one coupling.
pub fn sigma_k(coupling: f64, k: usize, tol: f64) -> Result<IntervalSet, BandError> {
    BandSolver::new(coupling, tol)?.sigma(k)
}

/// `B_k = σ_k ∪ σ_{k+1}` with summary lengths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandCover {
    pub level: usize,
    pub coupling: f64,
    pub tol: f64,
    pub cover: IntervalSet,
    pub max_band_length: f64,
    pub total_length: f64,
}

impl BandCover {
    fn from_sigmas(level: usize, coupling: f64, tol: f64, a: &IntervalSet, b: &IntervalSet) -> Self {
        let cover = a.union(b);
        BandCover {
            level,
            coupling,
            tol,
            max_band_length: cover.max_length(),
            total_length: cover.total_length(),
            cover,
        }
    }

    pub fn band_count(&self) -> usize {
        self.cover.len()
    }

    /// Membership with the same test the escape comparison uses.
    pub fn contains(&self, energy: f64) -> bool {
        self.cover.contains_point(energy)
    }
}

pub fn band_cover(coupling: f64, k: usize, tol: f64) -> Result<BandCover, BandError> {
    if k < 1 {
        return Err(BandError::InvalidLevel { level: k, min: 1 });
    }
    let sig = BandSolver::new(coupling, tol)?.sigma_levels(k + 1)?;
    Ok(BandCover::from_sigmas(k, coupling, tol, &sig[k], &sig[k + 1]))
}

/// `B_1, …, B_{max_level}` in one pass.
pub fn band_covers(coupling: f64, max_level: usize, tol: f64) -> Result<Vec<BandCover>, BandError> {
    if max_level < 1 {
        return Err(BandError::InvalidLevel { level: max_level, min: 1 });
    }
    let sig = BandSolver::new(coupling, tol)?.sigma_levels(max_level + 1)?;
    Ok((1..=max_level)
        .map(|k| BandCover::from_sigmas(k, coupling, tol, &sig[k], &sig[k + 1]))
        .collect())
}

/// Smallest level `k ≥ min_level` whose cover has every band shorter than
/// `max_band_length`, searching up to `max_level`.
pub fn cover_with_max_band(
    coupling: f64,
    max_band_length: f64,
    min_level: usize,
    max_level: usize,
    tol: f64,
) -> Result<Option<BandCover>, BandError> {
    if max_level < 1 {
        return Err(BandError::InvalidLevel { level: max_level, min: 1 });
    }
    let solver = BandSolver::new(coupling, tol)?;
    let mut sig = solver.sigma_levels(min_level.max(1).min(max_level) + 1)?;
    for k in min_level.max(1)..=max_level {
        if sig.len() < k + 2 {
            let domain = sig[k].union(&sig[k - 1]);
            let next = solver.sigma_within(k + 1, &domain)?;
            sig.push(next);
        }
        let c = BandCover::from_sigmas(k, coupling, tol, &sig[k], &sig[k + 1]);
        if c.max_band_length < max_band_length {
            return Ok(Some(c));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn fibonacci_numbers() {
        let f: Vec<usize> = (0..8).map(fibonacci).collect();
        assert_eq!(f, vec![1, 1, 2, 3, 5, 8, 13, 21]);
        assert_eq!(fibonacci(14), 610);
        assert_eq!(fibonacci(20), 10946);
    }

    #[test]
    fn fixed_point_energy() {
        let s = half_traces(2.0, 0.0, 10, false);
        assert!(s.values.iter().all(|&x| x == 1.0));
    }

    #[test]
    fn zero_energy_free_sequence() {
        // cos(F_j π/2) for F = 0, 1, 1, 2, 3, 5, 8, 13, 21, 34: period six in j.
        let s = half_traces(0.0, 0.0, 8, false);
        assert_eq!(s.values, vec![1.0, 0.0, 0.0, -1.0, 0.0, 0.0, 1.0, 0.0, 0.0, -1.0]);
    }

    #[test]
    fn free_half_traces_are_cosines() {
        // Oracle: with E = 2cosθ and V = 0, x_j = cos(F_j θ).
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        for _ in 0..100 {
            let theta: f64 = rng.gen_range(0.0..std::f64::consts::PI);
            let s = half_traces(2.0 * theta.cos(), 0.0, 12, true);
            for j in 0..=12 {
                let expect = (fibonacci(j) as f64 * theta).cos();
                assert!((s.get(j as isize).unwrap() - expect).abs() < 1e-9);
            }
            assert_eq!(s.get(-1), Some(1.0));
        }
    }

    #[test]
    fn derivative_recursion_matches_finite_differences() {
        let (v, k) = (0.7, 9);
        for &e in &[-1.3, 0.2, 1.9] {
            let h = 1e-6;
            let fd = (half_trace(e + h, v, k) - half_trace(e - h, v, k)) / (2.0 * h);
            let (x, d) = half_trace_with_derivative(e, v, k);
            assert_eq!(x, half_trace(e, v, k));
            assert!((d - fd).abs() < 1e-5 * (1.0 + d.abs()), "d={d} fd={fd}");
            let s = half_traces(e, v, k, true);
            assert_eq!(*s.derivatives.unwrap().last().unwrap(), d);
        }
    }

    #[test]
    fn invariant_holds_along_sequence() {
        for &v in &[0.0, 0.3, 1.0, 4.0] {
            for &e in &[-2.0, -0.7, 0.1, 1.5, 2.2, 3.0] {
                let s = half_traces(e, v, 25, false);
                let bounded: Vec<f64> = s.values.iter().copied().take_while(|x| x.abs() <= 1e6).collect();
                let t = HalfTraceSeq { values: bounded, ..s };
                assert!(t.max_relative_invariant_drift() <= 1e-9 * (1.0 + v * v), "E={e} V={v}");
            }
        }
        // Energies in the spectrum keep the sequence bounded; there the
        // absolute drift is at rounding level.
        for &v in &[0.3, 1.0, 4.0] {
            let c = band_cover(v, 12, DEFAULT_TOL).unwrap();
            for b in c.cover.iter().step_by(7) {
                let s = half_traces(b.midpoint(), v, 60, false);
                let bounded: Vec<f64> = s.values.iter().copied().take_while(|x| x.abs() <= 10.0).collect();
                let t = HalfTraceSeq { values: bounded, ..s };
                assert!(t.max_invariant_drift() <= 1e-9 * (1.0 + v * v), "V={v}");
            }
        }
    }

    #[test]
    fn truncates_at_guard() {
        let s = half_traces(30.0, 0.0, 40, false);
        assert!(s.escaped_at.is_some());
        assert!(s.values.len() < 42);
        assert!(s.values.iter().all(|x| x.abs() <= HALF_TRACE_GUARD));
    }

    #[test]
    fn free_sigma_is_one_band() {
        for k in 0..=14 {
            let s = sigma_k(0.0, k, DEFAULT_TOL).unwrap();
            assert_eq!(s.len(), 1, "k={k}: {s}");
            let i = s.intervals()[0];
            assert!((i.lo + 2.0).abs() < 1e-9 && (i.hi - 2.0).abs() < 1e-9);
        }
    }

    #[test]
    fn level_two_bands_match_quadratic() {
        // x₂ = E(E - 1)/2 - 1 at V = 1; |x₂| ≤ 1 iff 0 ≤ E(E - 1) ≤ 4.
        let s = sigma_k(1.0, 2, DEFAULT_TOL).unwrap();
        let r = 17f64.sqrt();
        let expect = IntervalSet::from_pairs([((1.0 - r) / 2.0, 0.0), (1.0, (1.0 + r) / 2.0)]);
        assert_eq!(s.len(), 2);
        assert!(s.hausdorff(&expect) < 1e-11, "{s}");
    }

    #[test]
    fn band_count_bounded_by_degree() {
        for &v in &[0.1, 0.5, 1.0, 4.0, 16.0] {
            let sig = BandSolver::new(v, DEFAULT_TOL).unwrap().sigma_levels(12).unwrap();
            for (k, s) in sig.iter().enumerate() {
                assert!(s.len() <= fibonacci(k), "V={v} k={k}");
            }
            // Gaps of periodic operators are open for V > 0.
            assert_eq!(sig[12].len(), fibonacci(12), "V={v}");
        }
    }

    #[test]
    fn band_edges_solve_unit_level_equation() {
        let v = 1.0;
        let k = 10;
        let s = sigma_k(v, k, DEFAULT_TOL).unwrap();
        for i in s.iter() {
            for e in [i.lo, i.hi] {
                let x = half_trace(e, v, k);
                assert!((x.abs() - 1.0).abs() < 1e-6, "x={x} at {e}");
            }
        }
    }

    #[test]
    fn covers_are_nested() {
        for &v in &[0.05, 0.1, 0.5, 1.0, 4.0, 16.0] {
            let covers = band_covers(v, 13, DEFAULT_TOL).unwrap();
            for w in covers.windows(2) {
                let dilated = w[0].cover.dilate(2.0 * DEFAULT_TOL);
                assert!(dilated.contains_set(&w[1].cover), "V={v} k={}", w[0].level);
            }
        }
    }

    #[test]
    fn cover_membership_matches_direct_evaluation() {
        let v = 1.0;
        let k = 12;
        let c = band_cover(v, k, DEFAULT_TOL).unwrap();
        for i in 0..=10_000 {
            let e = -3.0 + 6.0 * i as f64 / 10_000.0;
            if c.cover.dilate(1e-9).difference(&c.cover.dilate(-0.0)).contains_point(e) {
                continue;
            }
            let direct = half_trace(e, v, k).abs().min(half_trace(e, v, k + 1).abs()) <= 1.0;
            let near_edge = c.cover.iter().any(|b| (b.lo - e).abs() < 1e-9 || (b.hi - e).abs() < 1e-9);
            if !near_edge {
                assert_eq!(c.contains(e), direct, "E={e}");
            }
        }
    }

    #[test]
    fn free_cover_symmetric() {
        let c = band_cover(0.0, 10, DEFAULT_TOL).unwrap();
        assert_eq!(c.band_count(), 1);
        assert!((c.total_length - 4.0).abs() < 1e-9);
        assert!(c.cover.hausdorff(&c.cover.affine(-1.0, 0.0)) < 1e-9);
    }

    #[test]
    fn strong_coupling_measure_shrinks() {
        let covers = band_covers(4.0, 14, DEFAULT_TOL).unwrap();
        let lens: Vec<f64> = covers[4..].iter().map(|c| c.total_length).collect();
        for w in lens.windows(2) {
            assert!(w[1] < w[0], "{lens:?}");
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(matches!(sigma_k(1.0, 3, 0.0), Err(BandError::InvalidTolerance(_))));
        assert!(matches!(band_cover(1.0, 0, 1e-12), Err(BandError::InvalidLevel { .. })));
    }

    #[test]
    fn strong_coupling_bands_near_tolerance() {
        // Bands at V = 16, k = 17 are a few tol wide and sit between gaps
        // where x_k overflows.
        let s = BandSolver::new(16.0, 1e-12).unwrap().sigma_levels(17).unwrap();
        for k in 2..=17 {
            assert_eq!(s[k].len(), fibonacci(k), "k={k}");
            assert!(s[k].total_length() < s[k - 1].total_length());
        }
        assert!(s[17].max_length() < 1e-11);
        for iv in s[17].iter() {
            assert!(half_trace(iv.midpoint(), 16.0, 17).abs() < 2.0);
        }
    }
}
