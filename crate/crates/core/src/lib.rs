//! Spectra of the Fibonacci Hamiltonian
//!
//! ```text
//! [Hψ](n) = ψ(n+1) + ψ(n-1) + V·χ_{[1-α,1)}(nα + ω mod 1)·ψ(n)
//! ```
//!
//! computed through the trace map `T(x, y, z) = (2xy - z, x, y)`. The
//! spectrum is approximated by band covers `B_k = σ_k ∪ σ_{k+1}` with
//! `σ_k = {E : |x_k(E)| ≤ 1}`, and the covers are measured as Cantor sets:
//! thickness, denseness, dimension bounds, gap widths, and sums.
//!
//! - [`trace`]: the map, its invariant, orbit classification, period-two curve.
//! - [`approximant`]: half-traces and rigorous band edges.
//! - [`cantor`]: thickness, denseness, box counting.
//! - [`gaps`]: gap labels and tracks across couplings.
//! - [`sumset`]: Minkowski sums and the Gap Lemma.
//! - [`oracle`]: finite chains solved by Sturm bisection.
//! - [`config`], [`io`]: run parameters and JSON/CSV encodings.

pub mod approximant;
pub mod cantor;
pub mod config;
pub mod gaps;
pub mod interval;
pub mod io;
pub mod oracle;
pub mod sumset;
pub mod trace;

pub use approximant::{band_cover, band_covers, BandCover, BandError, BandSolver};
pub use cantor::{box_dimension, dimension_bounds, thickness, CantorError, CantorStats};
pub use config::{OutputFormat, SpectralConfig};
pub use gaps::{label_gaps, track_gap, GapLabel, GapTrack, TrackError};
pub use interval::{Interval, IntervalSet};
pub use oracle::{chain_eigenvalues, potential, Boundary, ChainSpectrum, OracleError};
pub use sumset::{gap_lemma_check, is_interval, minkowski_sum, GapLemmaOutcome, SumsetError};
pub use trace::{classify_orbit, TraceError, TraceState, Verdict};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error(transparent)]
    Band(#[from] BandError),
    #[error(transparent)]
    Cantor(#[from] CantorError),
    #[error(transparent)]
    Track(#[from] TrackError),
    #[error(transparent)]
    Sumset(#[from] SumsetError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Config(#[from] config::ConfigError),
    #[error(transparent)]
    Io(#[from] io::IoError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/introduction.md")]
mod book_introduction {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/trace-map.md")]
mod book_trace_map {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/band-covers.md")]
mod book_band_covers {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/cantor-metrics.md")]
mod book_cantor_metrics {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/gaps.md")]
mod book_gaps {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/sumsets.md")]
mod book_sumsets {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/finite-chains.md")]
mod book_finite_chains {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/command-line.md")]
mod book_command_line {}
