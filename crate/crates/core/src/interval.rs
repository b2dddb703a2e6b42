//! Finite unions of disjoint closed intervals.
//!
//! [`IntervalSet`] is the common currency of the crate: band covers,
//! gap lists, Minkowski sums and finite Cantor-set approximations are all
//! stored as sorted, pairwise disjoint closed intervals. Every constructor
//! normalizes, so two intervals that touch or overlap are merged and the
//! stored gaps are strictly positive.

use serde::{Deserialize, Serialize};
use std::fmt;

/// A closed interval `[lo, hi]` with `lo <= hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    /// Builds `[lo, hi]`, swapping the endpoints if they arrive reversed.
    pub fn new(lo: f64, hi: f64) -> Self {
        if lo <= hi {
            Interval { lo, hi }
        } else {
            Interval { lo: hi, hi: lo }
        }
    }

    pub fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// True if `other` lies inside `self`.
    pub fn encloses(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// True if the closed intervals share at least one point.
    pub fn meets(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    /// Distance from `x` to the interval (zero inside).
    pub fn distance_to(&self, x: f64) -> f64 {
        if x < self.lo {
            self.lo - x
        } else if x > self.hi {
            x - self.hi
        } else {
            0.0
        }
    }
}

impl From<[f64; 2]> for Interval {
    fn from(p: [f64; 2]) -> Self {
        Interval::new(p[0], p[1])
    }
}

impl From<Interval> for [f64; 2] {
    fn from(i: Interval) -> Self {
        [i.lo, i.hi]
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Sorted, disjoint closed intervals separated by strictly positive gaps.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "Vec<Interval>", into = "Vec<Interval>")]
pub struct IntervalSet {
    intervals: Vec<Interval>,
}

impl From<Vec<Interval>> for IntervalSet {
    fn from(v: Vec<Interval>) -> Self {
        IntervalSet::from_intervals(v)
    }
}

impl From<IntervalSet> for Vec<Interval> {
    fn from(s: IntervalSet) -> Self {
        s.intervals
    }
}

impl FromIterator<Interval> for IntervalSet {
    fn from_iter<I: IntoIterator<Item = Interval>>(iter: I) -> Self {
        IntervalSet::from_intervals(iter.into_iter().collect())
    }
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet { intervals: Vec::new() }
    }

    pub fn single(lo: f64, hi: f64) -> Self {
        IntervalSet { intervals: vec![Interval::new(lo, hi)] }
    }

    /// Normalizes an arbitrary list: sorts by left endpoint and merges
    /// intervals that overlap or touch.
    pub fn from_intervals(mut v: Vec<Interval>) -> Self {
        v.retain(|i| i.lo.is_finite() && i.hi.is_finite());
        v.sort_by(|a, b| a.lo.total_cmp(&b.lo).then(a.hi.total_cmp(&b.hi)));
        let mut out: Vec<Interval> = Vec::with_capacity(v.len());
        for i in v {
            match out.last_mut() {
                Some(last) if i.lo <= last.hi => {
                    if i.hi > last.hi {
                        last.hi = i.hi;
                    }
                }
                _ => out.push(i),
            }
        }
        IntervalSet { intervals: out }
    }

    /// Builds from `(lo, hi)` pairs.
    pub fn from_pairs<I: IntoIterator<Item = (f64, f64)>>(pairs: I) -> Self {
        pairs.into_iter().map(|(a, b)| Interval::new(a, b)).collect()
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Interval> {
        self.intervals.iter()
    }

    /// Convex hull, or `None` for the empty set.
    pub fn hull(&self) -> Option<Interval> {
        match (self.intervals.first(), self.intervals.last()) {
            (Some(a), Some(b)) => Some(Interval { lo: a.lo, hi: b.hi }),
            _ => None,
        }
    }

    /// Lebesgue measure.
    pub fn total_length(&self) -> f64 {
        self.intervals.iter().map(Interval::length).sum()
    }

    pub fn max_length(&self) -> f64 {
        self.intervals.iter().map(Interval::length).fold(0.0, f64::max)
    }

    /// Bounded components of `hull \ self`, as closed intervals whose
    /// endpoints are the adjacent interval edges.
    pub fn gaps(&self) -> Vec<Interval> {
        self.intervals
            .windows(2)
            .map(|w| Interval { lo: w[0].hi, hi: w[1].lo })
            .collect()
    }

    /// Index of the interval containing `x`, if any.
    pub fn locate(&self, x: f64) -> Option<usize> {
        let idx = self.intervals.partition_point(|i| i.hi < x);
        match self.intervals.get(idx) {
            Some(i) if i.lo <= x => Some(idx),
            _ => None,
        }
    }

    pub fn contains_point(&self, x: f64) -> bool {
        self.locate(x).is_some()
    }

    /// Distance from `x` to the set; infinite for the empty set.
    pub fn distance_to(&self, x: f64) -> f64 {
        if self.intervals.is_empty() {
            return f64::INFINITY;
        }
        let idx = self.intervals.partition_point(|i| i.hi < x);
        let mut d = f64::INFINITY;
        if let Some(i) = self.intervals.get(idx) {
            d = d.min(i.distance_to(x));
        }
        if idx > 0 {
            d = d.min(self.intervals[idx - 1].distance_to(x));
        }
        d
    }

    /// Every interval widened by `r` on both sides (then renormalized).
    pub fn dilate(&self, r: f64) -> Self {
        self.intervals
            .iter()
            .map(|i| Interval { lo: i.lo - r, hi: i.hi + r })
            .collect()
    }

    /// Merges every gap no longer than `tol`.
    pub fn merge_gaps(&self, tol: f64) -> Self {
        let mut out: Vec<Interval> = Vec::with_capacity(self.intervals.len());
        for &i in &self.intervals {
            match out.last_mut() {
                Some(last) if i.lo - last.hi <= tol => last.hi = i.hi,
                _ => out.push(i),
            }
        }
        IntervalSet { intervals: out }
    }

    /// Image under `x -> scale * x + shift`.
    pub fn affine(&self, scale: f64, shift: f64) -> Self {
        self.intervals
            .iter()
            .map(|i| Interval::new(scale * i.lo + shift, scale * i.hi + shift))
            .collect()
    }

    pub fn union(&self, other: &IntervalSet) -> Self {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.intervals);
        v.extend_from_slice(&other.intervals);
        IntervalSet::from_intervals(v)
    }

    /// Two-pointer sweep over both endpoint lists.
    pub fn intersection(&self, other: &IntervalSet) -> Self {
        let (a, b) = (&self.intervals, &other.intervals);
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < a.len() && j < b.len() {
            let lo = a[i].lo.max(b[j].lo);
            let hi = a[i].hi.min(b[j].hi);
            if lo <= hi {
                out.push(Interval { lo, hi });
            }
            if a[i].hi < b[j].hi {
                i += 1;
            } else {
                j += 1;
            }
        }
        // Adjacent outputs can only touch at a shared endpoint.
        IntervalSet::from_intervals(out)
    }

    /// Closure of `self \ other`.
    pub fn difference(&self, other: &IntervalSet) -> Self {
        let b = &other.intervals;
        let mut out = Vec::new();
        for &iv in &self.intervals {
            let first = b.partition_point(|g| g.hi < iv.lo);
            let mut cur = iv.lo;
            let mut touched = false;
            for g in b[first..].iter().take_while(|g| g.lo <= iv.hi) {
                touched = true;
                if g.lo > cur {
                    out.push(Interval { lo: cur, hi: g.lo });
                }
                cur = cur.max(g.hi);
            }
            if !touched {
                out.push(iv);
            } else if cur < iv.hi {
                out.push(Interval { lo: cur, hi: iv.hi });
            }
        }
        IntervalSet::from_intervals(out)
    }

    /// True if `other` is a subset of `self`.
    pub fn contains_set(&self, other: &IntervalSet) -> bool {
        other.intervals.iter().all(|iv| match self.locate(iv.lo) {
            Some(idx) => self.intervals[idx].hi >= iv.hi,
            None => false,
        })
    }

    /// Hausdorff distance. The supremum of `d(., B)` over `A` is attained at
    /// an endpoint of `A` or at the midpoint of a gap of `B` lying inside `A`.
    pub fn hausdorff(&self, other: &IntervalSet) -> f64 {
        match (self.is_empty(), other.is_empty()) {
            (true, true) => 0.0,
            (true, false) | (false, true) => f64::INFINITY,
            _ => one_sided(self, other).max(one_sided(other, self)),
        }
    }
}

fn one_sided(a: &IntervalSet, b: &IntervalSet) -> f64 {
    let mut d = 0.0_f64;
    for iv in &a.intervals {
        d = d.max(b.distance_to(iv.lo)).max(b.distance_to(iv.hi));
    }
    for g in b.gaps() {
        let m = g.midpoint();
        if a.contains_point(m) {
            d = d.max(0.5 * g.length());
        }
    }
    d
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.intervals.is_empty() {
            return write!(f, "{{}}");
        }
        let parts: Vec<String> = self.intervals.iter().map(|i| i.to_string()).collect();
        write!(f, "{}", parts.join(" ∪ "))
    }
}
