//! Gap/bridge statistics of finite Cantor-set approximations.
//!
//! For a compact set `C` with convex hull `I`, a presentation is an ordering
//! of the gaps (bounded components of `I \ C`). When gap `U` comes up, the
//! bridge `K` at an endpoint `u` of `U` is the component of
//! `I \ (earlier gaps ∪ U)` that touches `u`, and the ratio `|K| / |U|`
//! measures how well `C` fills the space next to that gap. Thickness is the
//! best worst-case ratio over presentations, denseness the best best-case
//! ratio, and together they bracket the Hausdorff dimension:
//!
//! ```text
//! log 2 / log(2 + 1/τ)  ≤  dim_H C  ≤  log 2 / log(2 + 1/θ)
//! ```
//!
//! [`thickness`] uses the presentation that takes gaps in order of decreasing
//! length, which realizes the supremum for `τ`. The reported `θ` comes from
//! the same ordering and is therefore only an upper estimate of the true
//! infimum; [`presentation_extrema`] searches every ordering of a small cover
//! when the exact value is needed.

use crate::interval::{Interval, IntervalSet};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

/// Name of the presentation used by [`thickness`].
pub const PRESENTATION: &str = "decreasing-length";

/// Largest gap count accepted by [`presentation_extrema`].
pub const MAX_EXHAUSTIVE_GAPS: usize = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CantorError {
    #[error("set has {0} component(s); at least two are needed to have a gap")]
    EmptyInput(usize),
    #[error("box-counting fit is degenerate: scales are not distinct")]
    DegenerateFit,
    #[error("dimension bounds need 0 < tau <= theta, got tau = {tau}, theta = {theta}")]
    DomainError { tau: f64, theta: f64 },
    #[error("exhaustive presentation search limited to {MAX_EXHAUSTIVE_GAPS} gaps, got {0}")]
    TooManyGaps(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// One bridge next to one gap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapBridgeRecord {
    pub gap: Interval,
    pub side: Side,
    pub bridge: Interval,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CantorStats {
    pub tau: f64,
    pub theta: f64,
    pub dim_lower: f64,
    pub dim_upper: f64,
    pub records: Vec<GapBridgeRecord>,
    pub presentation: String,
}

/// Gaps of `cover`, left to right.
pub fn gaps_of(cover: &IntervalSet) -> Result<Vec<Interval>, CantorError> {
    if cover.len() < 2 {
        return Err(CantorError::EmptyInput(cover.len()));
    }
    Ok(cover.gaps())
}

/// Gap indices in presentation order: decreasing length, ties left to right.
pub fn presentation_order(gaps: &[Interval]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..gaps.len()).collect();
    order.sort_by(|&a, &b| gaps[b].length().total_cmp(&gaps[a].length()).then(a.cmp(&b)));
    order
}

/// Bridge records for the gaps taken in `order`.
fn bridges_in_order(hull: Interval, gaps: &[Interval], order: &[usize]) -> Vec<GapBridgeRecord> {
    // Earlier gaps keyed by left endpoint; gaps are disjoint so neighbours
    // in this map are the nearest earlier gaps on each side.
    let mut placed: BTreeMap<u64, Interval> = BTreeMap::new();
    let key = |x: f64| ordered_key(x);
    let mut records = Vec::with_capacity(2 * order.len());
    for &idx in order {
        let g = gaps[idx];
        let left_end = placed
            .range(..key(g.lo))
            .next_back()
            .map_or(hull.lo, |(_, u)| u.hi);
        let right_end = placed
            .range(key(g.hi)..)
            .next()
            .map_or(hull.hi, |(_, u)| u.lo);
        let gl = g.length();
        for (side, bridge) in [
            (Side::Left, Interval::new(left_end, g.lo)),
            (Side::Right, Interval::new(g.hi, right_end)),
        ] {
            records.push(GapBridgeRecord { gap: g, side, bridge, ratio: bridge.length() / gl });
        }
        placed.insert(key(g.lo), g);
    }
    records
}

/// Monotone map from finite floats to `u64`.
fn ordered_key(x: f64) -> u64 {
    let b = x.to_bits();
    if b >> 63 == 1 {
        !b
    } else {
        b | (1 << 63)
    }
}

/// Thickness and denseness estimates of `cover` under the decreasing-length
/// presentation, with the bridge records that produced them.
pub fn thickness(cover: &IntervalSet) -> Result<CantorStats, CantorError> {
    let gaps = gaps_of(cover)?;
    let hull = cover.hull().expect("nonempty");
    let order = presentation_order(&gaps);
    let records = bridges_in_order(hull, &gaps, &order);
    let (tau, theta) = records
        .iter()
        .fold((f64::INFINITY, 0.0_f64), |(lo, hi), r| (lo.min(r.ratio), hi.max(r.ratio)));
    let (dim_lower, dim_upper) = dimension_bounds(tau, theta)?;
    Ok(CantorStats {
        tau,
        theta,
        dim_lower,
        dim_upper,
        records,
        presentation: PRESENTATION.to_string(),
    })
}

/// `(sup over presentations of min ratio, inf over presentations of max
/// ratio)` by enumerating every ordering of at most
/// [`MAX_EXHAUSTIVE_GAPS`] gaps.
pub fn presentation_extrema(cover: &IntervalSet) -> Result<(f64, f64), CantorError> {
    let gaps = gaps_of(cover)?;
    if gaps.len() > MAX_EXHAUSTIVE_GAPS {
        return Err(CantorError::TooManyGaps(gaps.len()));
    }
    let hull = cover.hull().expect("nonempty");
    let mut order: Vec<usize> = (0..gaps.len()).collect();
    let (mut best_tau, mut best_theta) = (0.0_f64, f64::INFINITY);
    permute(&mut order, 0, &mut |ord| {
        // Direct scan rather than the ordered map: each bridge runs to the
        // closest earlier gap edge or the hull.
        let mut lo_ratio = f64::INFINITY;
        let mut hi_ratio = 0.0_f64;
        for (pos, &i) in ord.iter().enumerate() {
            let g = gaps[i];
            let earlier = &ord[..pos];
            let left = earlier
                .iter()
                .map(|&j| gaps[j])
                .filter(|u| u.hi <= g.lo)
                .map(|u| u.hi)
                .fold(hull.lo, f64::max);
            let right = earlier
                .iter()
                .map(|&j| gaps[j])
                .filter(|u| u.lo >= g.hi)
                .map(|u| u.lo)
                .fold(hull.hi, f64::min);
            for r in [(g.lo - left) / g.length(), (right - g.hi) / g.length()] {
                lo_ratio = lo_ratio.min(r);
                hi_ratio = hi_ratio.max(r);
            }
        }
        best_tau = best_tau.max(lo_ratio);
        best_theta = best_theta.min(hi_ratio);
    });
    Ok((best_tau, best_theta))
}

fn permute(v: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == v.len() {
        visit(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permute(v, k + 1, visit);
        v.swap(k, i);
    }
}

/// `(log 2 / log(2 + 1/τ), log 2 / log(2 + 1/θ))`.
pub fn dimension_bounds(tau: f64, theta: f64) -> Result<(f64, f64), CantorError> {
    if tau.is_nan() || theta.is_nan() || tau <= 0.0 || theta < tau {
        return Err(CantorError::DomainError { tau, theta });
    }
    let f = |t: f64| std::f64::consts::LN_2 / (2.0 + 1.0 / t).ln();
    Ok((f(tau), f(theta)))
}

/// Number of boxes `[jε, (j+1)ε)` whose interior meets `cover`; isolated
/// points count the box that holds them. Box indices are snapped to the
/// nearest integer when within `1e-9` relative, so grids commensurate with
/// the cover do not pick up boxes from rounding.
pub fn box_count(cover: &IntervalSet, eps: f64) -> u64 {
    let snap = |t: f64| {
        let r = t.round();
        if (t - r).abs() <= 1e-9 * r.abs().max(1.0) {
            r
        } else {
            t
        }
    };
    let mut count: u64 = 0;
    let mut last: Option<i64> = None;
    for iv in cover.iter() {
        let a = snap(iv.lo / eps);
        let b = snap(iv.hi / eps);
        let (first, end) = if b > a {
            (a.floor() as i64, b.ceil() as i64 - 1)
        } else {
            (a.floor() as i64, a.floor() as i64)
        };
        let first = match last {
            Some(l) if first <= l => l + 1,
            _ => first,
        };
        if end >= first {
            count += (end - first + 1) as u64;
            last = Some(end);
        }
    }
    count
}

/// Least-squares slope of `log N(ε)` against `log(1/ε)`.
pub fn box_dimension(cover: &IntervalSet, scales: &[f64]) -> Result<f64, CantorError> {
    if cover.is_empty() {
        return Err(CantorError::EmptyInput(0));
    }
    if scales.len() < 2 {
        return Err(CantorError::DegenerateFit);
    }
    let pts: Vec<(f64, f64)> = scales
        .iter()
        .map(|&e| ((1.0 / e).ln(), (box_count(cover, e) as f64).ln()))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx <= 0.0 {
        return Err(CantorError::DegenerateFit);
    }
    Ok(sxy / sxx)
}

/// Level-`n` approximation of the Cantor set that keeps the outer
/// `(1 - removed)/2` of every interval, starting from `[lo, hi]`.
pub fn central_cantor(lo: f64, hi: f64, removed: f64, n: usize) -> IntervalSet {
    let mut v = vec![Interval::new(lo, hi)];
    let keep = 0.5 * (1.0 - removed);
    for _ in 0..n {
        v = v
            .into_iter()
            .flat_map(|i| {
                let l = i.length();
                [Interval::new(i.lo, i.lo + keep * l), Interval::new(i.hi - keep * l, i.hi)]
            })
            .collect();
    }
    IntervalSet::from_intervals(v)
}

/// Number of scales returned by [`default_box_scales`].
pub const DEFAULT_BOX_SCALES: usize = 12;

/// Geometric scales from just above the band scale of `cover` up to a tenth
/// of its hull. When the bands are too long for that window the lower end is
/// pinned two decades below the upper one.
pub fn default_box_scales(cover: &IntervalSet) -> Vec<f64> {
    let Some(hull) = cover.hull() else {
        return Vec::new();
    };
    let hi = 0.1 * hull.length();
    let lo = (10.0 * cover.max_length()).max(1e-9 * hull.length()).min(0.01 * hi);
    let n = DEFAULT_BOX_SCALES;
    (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect()
}

/// Middle-thirds level `n` on `[0, 3ⁿ]`, where every endpoint is an integer.
pub fn middle_thirds_integer(n: usize) -> IntervalSet {
    let mut v: Vec<(i64, i64)> = vec![(0, 3i64.pow(n as u32))];
    for _ in 0..n {
        v = v
            .into_iter()
            .flat_map(|(a, b)| {
                let t = (b - a) / 3;
                [(a, a + t), (b - t, b)]
            })
            .collect();
    }
    IntervalSet::from_pairs(v.into_iter().map(|(a, b)| (a as f64, b as f64)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const LOG3_2: f64 = 0.630_929_753_571_457_4;

    #[test]
    fn gaps_examples() {
        let a = IntervalSet::from_pairs([(0.0, 1.0), (2.0, 3.0)]);
        assert_eq!(gaps_of(&a).unwrap(), vec![Interval::new(1.0, 2.0)]);
        let c = central_cantor(0.0, 1.0, 1.0 / 3.0, 2);
        let g = gaps_of(&c).unwrap();
        let expect = [(1.0 / 9.0, 2.0 / 9.0), (1.0 / 3.0, 2.0 / 3.0), (7.0 / 9.0, 8.0 / 9.0)];
        assert_eq!(g.len(), 3);
        for (u, (a, b)) in g.iter().zip(expect) {
            assert!((u.lo - a).abs() < 1e-15 && (u.hi - b).abs() < 1e-15);
        }
        assert_eq!(gaps_of(&IntervalSet::single(0.0, 1.0)), Err(CantorError::EmptyInput(1)));
    }

    #[test]
    fn middle_thirds_is_exactly_unit_thick() {
        for n in 1..=8 {
            let s = thickness(&middle_thirds_integer(n)).unwrap();
            assert_eq!((s.tau, s.theta), (1.0, 1.0), "n={n}");
            assert!((s.dim_lower - LOG3_2).abs() < 1e-12);
            assert!((s.dim_upper - LOG3_2).abs() < 1e-12);
        }
    }

    #[test]
    fn one_gap_ratios() {
        let s = thickness(&IntervalSet::from_pairs([(0.0, 2.0), (3.0, 4.0)])).unwrap();
        assert_eq!((s.tau, s.theta), (1.0, 2.0));
        assert_eq!(s.records.len(), 2);
        assert_eq!(s.records[0].side, Side::Left);
        assert_eq!(s.records[0].bridge, Interval::new(0.0, 2.0));
    }

    #[test]
    fn middle_fifths_has_thickness_two() {
        // Removing the central fifth leaves bridges (2/5)·l around a gap (1/5)·l
        // at every scale.
        let s = thickness(&central_cantor(0.0, 1.0, 0.2, 3)).unwrap();
        assert!((s.tau - 2.0).abs() < 1e-12, "{}", s.tau);
        assert!((s.theta - 2.0).abs() < 1e-12);
    }

    #[test]
    fn dimension_bound_values() {
        let (a, b) = dimension_bounds(1.0, 1.0).unwrap();
        assert!((a - LOG3_2).abs() < 1e-15 && (b - LOG3_2).abs() < 1e-15);
        assert!((dimension_bounds(0.5, 0.5).unwrap().0 - 0.5).abs() < 1e-15);
        let mut prev = 0.0;
        for t in [1.0, 10.0, 100.0, 1e4, 1e8] {
            let d = dimension_bounds(t, t).unwrap().0;
            assert!(d > prev && d < 1.0);
            prev = d;
        }
        assert!(1.0 - prev < 1e-7);
        assert!(matches!(dimension_bounds(0.0, 1.0), Err(CantorError::DomainError { .. })));
        assert!(matches!(dimension_bounds(2.0, 1.0), Err(CantorError::DomainError { .. })));
    }

    #[test]
    fn box_dimension_examples() {
        let scales: Vec<f64> = (1..=10).map(|j| 0.5f64.powi(j)).collect();
        let d = box_dimension(&IntervalSet::single(0.0, 1.0), &scales).unwrap();
        assert!((d - 1.0).abs() < 0.01, "{d}");
        assert_eq!(box_dimension(&IntervalSet::single(0.3, 0.3), &scales).unwrap(), 0.0);
        assert_eq!(box_dimension(&IntervalSet::single(0.0, 1.0), &[0.1, 0.1]), Err(CantorError::DegenerateFit));
    }

    #[test]
    fn box_dimension_of_middle_thirds() {
        // Oracle: exactly 2^j boxes of size 3^-j meet level-10 middle thirds.
        let c = central_cantor(0.0, 1.0, 1.0 / 3.0, 10);
        for j in 1..=8 {
            assert_eq!(box_count(&c, 3f64.powi(-j)), 1 << j);
        }
        let scales: Vec<f64> = (1..=8).map(|j| 3f64.powi(-j)).collect();
        let d = box_dimension(&c, &scales).unwrap();
        assert!((d - LOG3_2).abs() < 0.02, "{d}");
    }

    #[test]
    fn exhaustive_search_agrees_on_tau() {
        let sets = [
            IntervalSet::from_pairs([(0.0, 1.0), (1.5, 2.0), (4.0, 4.2), (4.3, 7.0)]),
            IntervalSet::from_pairs([(0.0, 0.1), (0.5, 0.6), (0.65, 2.0), (3.0, 3.1), (3.3, 4.0)]),
            central_cantor(0.0, 1.0, 0.4, 2),
        ];
        for s in &sets {
            let (tau, theta) = presentation_extrema(s).unwrap();
            let st = thickness(s).unwrap();
            assert_eq!(st.tau, tau);
            assert!(st.theta >= theta);
        }
    }

    fn arb_cover(max_gaps: usize) -> impl Strategy<Value = IntervalSet> {
        prop::collection::vec((1u32..40, 1u32..40), 2..=max_gaps + 1).prop_map(|v| {
            let mut x = 0.0;
            let mut out = Vec::new();
            for (band, gap) in v {
                out.push(Interval::new(x, x + band as f64 / 8.0));
                x += (band + gap) as f64 / 8.0;
            }
            IntervalSet::from_intervals(out)
        })
    }

    proptest! {
        #[test]
        fn decreasing_order_realizes_sup(c in arb_cover(6)) {
            let (tau, theta) = presentation_extrema(&c).unwrap();
            let s = thickness(&c).unwrap();
            prop_assert_eq!(s.tau, tau);
            prop_assert!(s.theta >= theta);
        }

        #[test]
        fn ordering_and_bounds(c in arb_cover(20)) {
            let s = thickness(&c).unwrap();
            prop_assert!(s.tau <= s.theta);
            prop_assert!(s.dim_lower <= s.dim_upper);
            prop_assert!(s.dim_lower > 0.0 && s.dim_upper < 1.0);
        }

        #[test]
        fn affine_invariance(c in arb_cover(12), k in -3i32..=3, shift in -64i32..64, flip in any::<bool>()) {
            // Power-of-two scalings and dyadic shifts keep every endpoint exact.
            let a = if flip { -(2f64.powi(k)) } else { 2f64.powi(k) };
            let s0 = thickness(&c).unwrap();
            let s1 = thickness(&c.affine(a, shift as f64 / 4.0)).unwrap();
            prop_assert_eq!(s0.tau, s1.tau);
            // Ties between equal gaps break left to right, so a reflection can
            // reorder them and change the denseness estimate (never tau).
            let gaps = c.gaps();
            let tied = gaps.iter().enumerate().any(|(i, g)| {
                gaps[i + 1..].iter().any(|h| h.length() == g.length())
            });
            if !flip || !tied {
                prop_assert_eq!(s0.theta, s1.theta);
            }
        }

        #[test]
        fn dropping_smallest_gap_never_thins(c in arb_cover(12)) {
            prop_assume!(c.len() >= 3);
            let gaps = c.gaps();
            let order = presentation_order(&gaps);
            let g = gaps[*order.last().unwrap()];
            let filled = c.union(&IntervalSet::single(g.lo, g.hi));
            let before = thickness(&c).unwrap().tau;
            let after = thickness(&filled).unwrap().tau;
            prop_assert!(after >= before);
        }
    }
}
