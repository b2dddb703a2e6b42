//! The Fibonacci trace map and its Fricke-Vogt invariant.
//!
//! `T(x, y, z) = (2xy - z, x, y)` acts on half-traces of Fibonacci transfer
//! matrices and preserves `I(x, y, z) = x² + y² + z² - 2xyz - 1`. Energies
//! enter through the line `((E - V)/2, E/2, 1)`, which lies on the level
//! surface `I = V²/4`; an energy is in the spectrum exactly when its forward
//! orbit stays bounded. [`classify_orbit`] turns that into a finite-horizon
//! verdict.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Components beyond this magnitude are reported as overflow.
pub const OVERFLOW_GUARD: f64 = 1e300;

/// Default secondary escape bound used by [`classify_orbit`].
pub const DEFAULT_ESCAPE_BOUND: f64 = 1e6;

/// Default number of trace-map steps used by [`classify_orbit`].
pub const DEFAULT_MAX_STEPS: usize = 60;

/// Period-two points are searched for within this distance of `x = 1`.
/// The window stays clear of the pole at `x = 1/2`; couplings up to
/// roughly `V = 1.5` have both intersections inside it.
pub const PER2_WINDOW: f64 = 0.45;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TraceError {
    #[error("trace map overflow: component exceeds {OVERFLOW_GUARD:e}")]
    Overflow,
    #[error("no period-two intersection with the invariant surface near (1,1,1) for V = {coupling}")]
    NoIntersection { coupling: f64 },
}

/// A point of the trace-map phase space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceState {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl TraceState {
    /// The conic singularity `(1, 1, 1)` of the Cayley cubic.
    pub const SINGULAR: TraceState = TraceState { x: 1.0, y: 1.0, z: 1.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        TraceState { x, y, z }
    }

    /// One application of the trace map.
    pub fn step(self) -> Result<Self, TraceError> {
        guarded(TraceState {
            x: 2.0 * self.x * self.y - self.z,
            y: self.x,
            z: self.y,
        })
    }

    /// Inverse map `(x, y, z) -> (y, z, 2yz - x)`.
    pub fn step_inverse(self) -> Result<Self, TraceError> {
        guarded(TraceState {
            x: self.y,
            y: self.z,
            z: 2.0 * self.y * self.z - self.x,
        })
    }

    /// Fricke-Vogt invariant `x² + y² + z² - 2xyz - 1`.
    pub fn invariant(&self) -> f64 {
        let TraceState { x, y, z } = *self;
        x * x + y * y + z * z - 2.0 * x * y * z - 1.0
    }

    /// Size of the terms that cancel in [`TraceState::invariant`], at least one.
    /// Rounding error in the invariant is relative to this.
    pub fn invariant_scale(&self) -> f64 {
        let TraceState { x, y, z } = *self;
        (x * x + y * y + z * z + 2.0 * (x * y * z).abs()).max(1.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.x.abs().max(self.y.abs()).max(self.z.abs())
    }

    pub fn distance(&self, other: &TraceState) -> f64 {
        let (dx, dy, dz) = (self.x - other.x, self.y - other.y, self.z - other.z);
        (dx * dx + dy * dy + dz * dz).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

fn guarded(s: TraceState) -> Result<TraceState, TraceError> {
    if s.is_finite() && s.max_abs() <= OVERFLOW_GUARD {
        Ok(s)
    } else {
        Err(TraceError::Overflow)
    }
}

pub fn trace_step(s: TraceState) -> Result<TraceState, TraceError> {
    s.step()
}

pub fn trace_step_inverse(s: TraceState) -> Result<TraceState, TraceError> {
    s.step_inverse()
}

pub fn invariant(s: &TraceState) -> f64 {
    s.invariant()
}

/// The point `((E - V)/2, E/2, 1)` of the spectral line for coupling `V`.
pub fn line_point(energy: f64, coupling: f64) -> TraceState {
    TraceState::new(0.5 * (energy - coupling), 0.5 * energy, 1.0)
}

/// Finite-horizon orbit verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    /// The escape predicate first held at this step.
    Escaped(usize),
    /// No escape through `steps_checked`; not a proof of membership.
    Bounded(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EscapeResult {
    pub verdict: Verdict,
    pub final_state: TraceState,
}

impl EscapeResult {
    pub fn escaped(&self) -> bool {
        matches!(self.verdict, Verdict::Escaped(_))
    }
}

/// Escape predicate on a single state: the two most recent half-traces,
/// `x` and `y`, both exceed one in absolute value.
pub fn escape_predicate(s: &TraceState) -> bool {
    s.x.abs() > 1.0 && s.y.abs() > 1.0
}

/// Iterates the trace map from `line_point(energy, coupling)`.
///
/// Step `n` refers to the state `Tⁿ(p₀)`; steps `0..=max_steps` are tested.
/// Escape is declared at the first step where [`escape_predicate`] holds or
/// a component exceeds `escape_bound`.
pub fn classify_orbit(
    energy: f64,
    coupling: f64,
    max_steps: usize,
    escape_bound: f64,
) -> EscapeResult {
    let mut s = line_point(energy, coupling);
    for n in 0..=max_steps {
        if escape_predicate(&s) || s.max_abs() > escape_bound {
            return EscapeResult { verdict: Verdict::Escaped(n), final_state: s };
        }
        if n == max_steps {
            break;
        }
        // The bound fires long before the overflow guard could.
        s = s.step().expect("escape bound below overflow guard");
    }
    EscapeResult { verdict: Verdict::Bounded(max_steps), final_state: s }
}

/// The two points where the period-two curve meets `S_V` near `(1, 1, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Per2Points {
    pub p1: TraceState,
    pub p2: TraceState,
    pub separation: f64,
}

/// Point of the period-two curve with first coordinate `x`.
///
/// Solving `T²(x, y, z) = (x, y, z)` gives `z = x` and `y(2x - 1) = x`,
/// so the curve is `(x, x/(2x - 1), x)` away from the pole `x = 1/2`.
pub fn per2_curve(x: f64) -> TraceState {
    TraceState::new(x, x / (2.0 * x - 1.0), x)
}

/// Invariant along the period-two curve in closed form:
/// `I = (x - 1)² (4x² + 2x - 1) / (2x - 1)²`.
pub fn per2_invariant(x: f64) -> f64 {
    let d = 2.0 * x - 1.0;
    (x - 1.0).powi(2) * (4.0 * x * x + 2.0 * x - 1.0) / (d * d)
}

/// Intersections of the period-two curve with `S_V`, one on each side of
/// `x = 1`, located by bisection on `I(x) - V²/4` to accuracy `tol` in `x`.
pub fn per2_points(coupling: f64, tol: f64) -> Result<Per2Points, TraceError> {
    if !coupling.is_finite() || coupling < 0.0 {
        return Err(TraceError::NoIntersection { coupling });
    }
    if coupling == 0.0 {
        return Ok(Per2Points {
            p1: TraceState::SINGULAR,
            p2: TraceState::SINGULAR,
            separation: 0.0,
        });
    }
    let level = 0.25 * coupling * coupling;
    let g = |x: f64| per2_invariant(x) - level;
    let left = bracket_root(&g, 1.0, 1.0 - PER2_WINDOW, tol)
        .ok_or(TraceError::NoIntersection { coupling })?;
    let right = bracket_root(&g, 1.0, 1.0 + PER2_WINDOW, tol)
        .ok_or(TraceError::NoIntersection { coupling })?;
    let (p1, p2) = (per2_curve(left), per2_curve(right));
    Ok(Per2Points { p1, p2, separation: p1.distance(&p2) })
}

/// Walks from `inner` toward `outer` in geometrically growing steps until
/// `g` changes sign, then bisects. `g(inner)` must be negative.
fn bracket_root(g: &impl Fn(f64) -> f64, inner: f64, outer: f64, tol: f64) -> Option<f64> {
    let dir = (outer - inner).signum();
    let span = (outer - inner).abs();
    let mut near = inner;
    let mut h = span * 1e-6;
    loop {
        let far = inner + dir * h.min(span);
        if g(far) > 0.0 {
            return Some(bisect(g, near, far, tol));
        }
        if h >= span {
            return None;
        }
        near = far;
        h *= 2.0;
    }
}

/// Bisection for a sign change with `g(neg) <= 0 < g(pos)`.
fn bisect(g: &impl Fn(f64) -> f64, mut neg: f64, mut pos: f64, tol: f64) -> f64 {
    while (pos - neg).abs() > tol {
        let mid = 0.5 * (neg + pos);
        if mid == neg || mid == pos {
            break;
        }
        if g(mid) > 0.0 {
            pos = mid;
        } else {
            neg = mid;
        }
    }
    0.5 * (neg + pos)
}
