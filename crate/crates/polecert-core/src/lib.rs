//! Prescribed-decay partial pole placement for scalar neutral delay
//! differential equations of the form
//!
//! ```text
//!     d/dt [ y(t) + α y(t−τ) ] = −a y(t) − β y(t−τ),
//! ```
//!
//! whose characteristic function is the degree-three quasipolynomial
//! `Δ(s) = s + a + e^{−τs} (α s + β)`.
//!
//! The crate synthesizes delayed P and PD feedback gains that place two or
//! three prescribed real spectral values, certifies that the rightmost
//! assigned value dominates the rest of the spectrum, maps the spectrum
//! numerically by argument-principle root counting, derives explicit
//! exponential decay envelopes, and simulates the closed-loop (optionally
//! nonlinear Hopfield) plant to confirm the prescribed decay.
//!
//! Modules, in dependency order:
//!
//! * [`quasipoly`] — evaluation kernel: Δ, Δ′, the integral functions F₁/F₂
//!   behind the closed-form assignment, and the scalar dominance criteria.
//! * [`spectrum`] — winding-number root counting, root search with Newton
//!   polishing, and dominance certificates.
//! * [`placement`] — gain assignment, critical-delay solvers, region
//!   classification of the two-root family, remaining-spectrum
//!   characterization, and exponential-envelope constants.
//! * [`sim`] — method-of-steps RK4 integration of the linear neutral and
//!   nonlinear Hopfield closed loops, with decay-rate estimation.

pub mod placement;
pub mod quasipoly;
pub mod sim;
pub mod spectrum;

pub use num_complex::Complex64;

use spectrum::Rectangle;

/// Crate-wide error type. Message texts for contract errors are stable and
/// matched by callers (the CLI maps them onto process exit codes).
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// A precondition on user-supplied data failed.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// No positive delay makes the prescribed spectrum consistent with a
    /// stable plant coefficient (requires s₁ < 0).
    #[error("no stabilizing τ* exists")]
    NoStabilizingTau,
    /// The plant cannot realize the prescribed dominant decay rate.
    #[error("prescribed rate unreachable: require s₁ < μ−ν")]
    RateUnreachable,
    /// The two-root spectrum characterization was called in a region where a
    /// third real root coexists.
    #[error("third real root present — use three-root characterization")]
    ThirdRealRootPresent,
    /// A quasipolynomial root sits on (or within resolution of) the counting
    /// contour even after dilation retries.
    #[error("root on boundary of {rect}")]
    RootOnBoundary { rect: Rectangle },
    /// Quadrisection could not isolate roots within the depth limit.
    #[error("max subdivision depth exceeded at cell {cell}")]
    SubdivisionDepthExceeded { cell: Rectangle },
    /// The integrator step does not resolve the delay.
    #[error("step must resolve the delay: require h ≤ τ/16 (h = {h}, τ = {tau})")]
    StepTooLarge { h: f64, tau: f64 },
    /// The decay-fit window holds fewer than three delay intervals, or the
    /// signal is below the numerical floor.
    #[error("window too short / signal at floor")]
    WindowTooShort,
    /// An internal numerical routine failed to meet its own contract.
    #[error("solver failure: {0}")]
    Solver(String),
}

pub type Result<T> = std::result::Result<T, Error>;
