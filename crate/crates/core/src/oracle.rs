//! Finite-volume ground truth for the Fibonacci Hamiltonian.
//!
//! Truncates `[Hψ](n) = ψ(n+1) + ψ(n-1) + V·χ_{[1-α,1)}(nα + ω mod 1)·ψ(n)`
//! to `n = 1..N` and computes every eigenvalue by Sturm-sequence bisection.
//! Nothing here touches the trace map, so agreement with the band covers is
//! an independent check.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Inverse golden mean `(√5 - 1)/2`.
pub const ALPHA: f64 = 0.618_033_988_749_894_9;

/// Largest pair count accepted by [`square_spectrum`].
pub const MAX_SQUARE_PAIRS: usize = 10_000_000;

/// Accuracy of every eigenvalue returned by [`chain_eigenvalues`].
pub const EIGEN_TOL: f64 = 1e-11;

const MAX_BISECTIONS: usize = 200;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("chain must have at least one site")]
    EmptyChain,
    #[error("bisection for eigenvalue {index} did not converge")]
    ConvergenceFailure { index: usize },
    #[error("{pairs} pairwise sums exceed the limit of {MAX_SQUARE_PAIRS}")]
    TooLarge { pairs: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Dirichlet,
    Periodic,
}

/// `V·χ_{[1-α,1)}(nα + ω mod 1)` for `n = 1..=N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FibonacciPotential {
    pub coupling: f64,
    pub omega: f64,
    pub alpha: f64,
    pub values: Vec<f64>,
}

impl FibonacciPotential {
    /// The 0/1 pattern, one entry per site.
    pub fn pattern(&self) -> Vec<u8> {
        self.values.iter().map(|&v| u8::from(v != 0.0)).collect()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Whether `nα + ω mod 1` falls in `[1 - α, 1)`.
///
/// `n·α` is evaluated in double precision; for `n ≤ 10⁶` the orbit keeps a
/// distance from `1 - α` far above that rounding error.
pub fn in_coding_window(n: u64, omega: f64) -> bool {
    let t = (n as f64 * ALPHA + omega).rem_euclid(1.0);
    t >= 1.0 - ALPHA
}

pub fn potential(coupling: f64, omega: f64, n: usize) -> FibonacciPotential {
    let values = (1..=n as u64)
        .map(|i| if in_coding_window(i, omega) { coupling } else { 0.0 })
        .collect();
    FibonacciPotential { coupling, omega, alpha: ALPHA, values }
}

/// Prefix of the fixed point of `a -> ab, b -> a`, coded `a = 1`, `b = 0`.
pub fn substitution_word(n: usize) -> Vec<u8> {
    let mut w: Vec<u8> = vec![1];
    while w.len() < n {
        w = w.iter().flat_map(|&c| if c == 1 { vec![1, 0] } else { vec![1] }).collect();
    }
    w.truncate(n);
    w
}

/// Number of eigenvalues strictly below `lambda` of the symmetric
/// tridiagonal matrix with `diag` and unit off-diagonal, from the signs of
/// the LDLᵀ pivots.
pub fn sturm_count(diag: &[f64], lambda: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for (i, &d) in diag.iter().enumerate() {
        q = if i == 0 { d - lambda } else { d - lambda - 1.0 / q };
        if q == 0.0 {
            q = -f64::EPSILON;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Eigenvalue count below `lambda` for the periodic chain: unit
/// off-diagonals plus the corner coupling between the first and last site.
///
/// Eliminating sites `0..N-1` leaves a bordered system: the pivots `d_i`
/// follow the tridiagonal recursion while the border column carries
/// `w_0 = 1`, `w_i = [i = N-2] - w_{i-1}/d_{i-1}`. The last pivot is the
/// Schur complement `s = diag[N-1] - λ - Σ w_i² / d_i`, and by Sylvester's
/// law of inertia the count is the number of negative values among
/// `d_0, …, d_{N-2}, s`.
pub fn periodic_sturm_count(diag: &[f64], lambda: f64) -> usize {
    let n = diag.len();
    match n {
        0 => 0,
        1 => usize::from(diag[0] + 2.0 < lambda),
        2 => bordered2(diag, 2.0, lambda),
        _ => {
            let mut count = 0;
            let mut d_prev = 0.0;
            let mut w_prev = 0.0;
            let mut schur = diag[n - 1] - lambda;
            for i in 0..n - 1 {
                let (d, w) = if i == 0 {
                    (diag[0] - lambda, 1.0)
                } else {
                    let border = if i == n - 2 { 1.0 } else { 0.0 };
                    (diag[i] - lambda - 1.0 / d_prev, border - w_prev / d_prev)
                };
                let d = if d == 0.0 { -f64::EPSILON } else { d };
                if d < 0.0 {
                    count += 1;
                }
                schur -= w * w / d;
                d_prev = d;
                w_prev = w;
            }
            if schur < 0.0 {
                count += 1;
            }
            count
        }
    }
}

/// Two-site ring: both neighbours of a site are the other site.
fn bordered2(diag: &[f64], off: f64, lambda: f64) -> usize {
    let d0 = diag[0] - lambda;
    let d0 = if d0 == 0.0 { -f64::EPSILON } else { d0 };
    let s = diag[1] - lambda - off * off / d0;
    usize::from(d0 < 0.0) + usize::from(s < 0.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainSpectrum {
    pub size: usize,
    pub eigenvalues: Vec<f64>,
    pub boundary: Boundary,
}

/// All eigenvalues of the truncated operator, ascending, each bisected to
/// [`EIGEN_TOL`]. With periodic boundary, rounding in the Schur complement
/// limits doubly degenerate eigenvalues to about `1e-8`.
pub fn chain_eigenvalues(pot: &FibonacciPotential, boundary: Boundary) -> Result<ChainSpectrum, OracleError> {
    eigenvalues_of(&pot.values, boundary)
}

/// Same as [`chain_eigenvalues`] for an arbitrary diagonal.
pub fn eigenvalues_of(diag: &[f64], boundary: Boundary) -> Result<ChainSpectrum, OracleError> {
    let n = diag.len();
    if n == 0 {
        return Err(OracleError::EmptyChain);
    }
    let count = |lambda: f64| match boundary {
        Boundary::Dirichlet => sturm_count(diag, lambda),
        Boundary::Periodic => periodic_sturm_count(diag, lambda),
    };
    // Gershgorin: every row has off-diagonal mass at most 2.
    let lo = diag.iter().copied().fold(f64::INFINITY, f64::min) - 2.0 - 1e-9;
    let hi = diag.iter().copied().fold(f64::NEG_INFINITY, f64::max) + 2.0 + 1e-9;
    let eigenvalues = (0..n)
        .into_par_iter()
        .map(|j| {
            // Smallest λ with more than j eigenvalues below it.
            let (mut a, mut b) = (lo, hi);
            for _ in 0..MAX_BISECTIONS {
                if b - a <= EIGEN_TOL {
                    return Ok(0.5 * (a + b));
                }
                let m = 0.5 * (a + b);
                if count(m) > j {
                    b = m;
                } else {
                    a = m;
                }
            }
            Err(OracleError::ConvergenceFailure { index: j })
        })
        .collect::<Result<Vec<f64>, OracleError>>()?;
    Ok(ChainSpectrum { size: n, eigenvalues, boundary })
}

/// Sorted multiset of all `N²` sums `λ_i + λ_j`: the spectrum of the
/// square-lattice truncation, which is the tensor sum of two chains.
pub fn square_spectrum(s: &ChainSpectrum) -> Result<Vec<f64>, OracleError> {
    let n = s.eigenvalues.len();
    let pairs = n.saturating_mul(n);
    if pairs > MAX_SQUARE_PAIRS {
        return Err(OracleError::TooLarge { pairs });
    }
    let mut out = Vec::with_capacity(pairs);
    for &a in &s.eigenvalues {
        out.extend(s.eigenvalues.iter().map(|&b| a + b));
    }
    out.sort_by(f64::total_cmp);
    Ok(out)
}
