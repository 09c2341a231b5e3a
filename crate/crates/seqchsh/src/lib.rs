//! Sequential CHSH violations from a single entangled pair.
//!
//! One Alice and a line of `n` Bobs share one two-qubit state. Bob `k`
//! measures his half with a deliberately unsharp instrument, forwards the
//! post-measurement state to Bob `k+1`, and the pair (Alice, Bob `k`) is
//! scored by the CHSH functional `S`. A sharp measurement would spend all
//! the entanglement on the first Bob; keeping each sharpness `γ_k` just
//! large enough to clear the classical bound `S > 2` lets every Bob in the
//! line violate it, at the price of Alice angles `θ` that shrink
//! double-exponentially with `n`.
//!
//! ## Layout
//!
//! - [`linalg`]: exact 2×2/4×4 complex and 3×3 real matrix kernels
//!   (Kronecker products, PSD square roots, a cyclic Jacobi eigensolver).
//! - [`quantum`]: states, effects, instruments, the averaged update
//!   channel, Born-rule distributions, CHSH evaluation, correlation
//!   spectra, and the residual-channel decomposition.
//! - [`strategy`]: the planner and scorer: sharpness recursion, analytic
//!   CHSH values, violation counting, angle search, and the sequential
//!   simulation oracle.
//! - [`bounds`]: polynomial envelopes, coefficient recursions, and the
//!   double-exponential `d`-sequences with their closed forms.
//! - [`verify`]: seeded cross-validation suites run by `seqchsh verify`.
//! - [`cli`]: plan documents, CSV emitters, and the command entry points
//!   behind the `seqchsh` binary.
//!
//! ## Numerical contract
//!
//! Everything is plain `f64`, deterministic, and thread-safe (pure
//! functions over immutable values). Recursions that suffer catastrophic
//! cancellation in their textbook form (the sharpness recursion's
//! `2^{k-1} - cosθ·Π` numerator) are evaluated in rearranged forms built
//! from `ln_1p`/`exp_m1` so they stay accurate down to the subnormal
//! floor. Quantities that overflow `f64` (the `d`-sequences) live in a
//! base-2 log domain.

pub mod bounds;
pub mod cli;
pub mod guide;
pub mod linalg;
pub mod quantum;
pub mod strategy;
pub mod verify;

use thiserror::Error;

/// Unified error type for every fallible operation in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A matrix expected to be positive semi-definite has an eigenvalue
    /// below the tolerance floor.
    #[error("matrix is not positive semi-definite (eigenvalue {0:e})")]
    NotPsd(f64),
    /// The Jacobi eigensolver did not reach its off-diagonal tolerance
    /// within the sweep limit.
    #[error("eigensolver did not converge (off-diagonal norm {0:e})")]
    NoConvergence(f64),
    /// An argument fell outside its documented domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// An effect pair does not form a measurement (does not sum to the
    /// identity), or a Kraus set is not a channel.
    #[error("invalid instrument: {0}")]
    InvalidInstrument(String),
    /// A Pauli correlation came out with a non-negligible imaginary part;
    /// the input is not a valid state.
    #[error("correlation entry has imaginary part {0:e}")]
    NonRealCorrelation(f64),
    /// The Kraus set handed to the residual decomposition does not
    /// implement the claimed effect.
    #[error("instrument does not implement the effect (completeness deviation {0:e})")]
    NotImplementing(f64),
    /// The input state violates the planner's sufficient condition
    /// (largest correlation-spectrum eigenvalue 1, second one positive).
    #[error("planner hypothesis violated: {0}")]
    HypothesisViolated(String),
    /// No angle representable in double precision certifies the requested
    /// violation count.
    #[error("no feasible angle above the double-precision floor for n = {0}")]
    InfeasibleAtPrecision(usize),
    /// A cross-check between two independent computation paths failed:
    /// either a `verify` suite or the simulator's analytic self-check.
    #[error("self-check failed: {0}")]
    Verification(String),
    /// Underlying I/O failure (CLI file handling).
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
