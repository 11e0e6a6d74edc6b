use thiserror::Error;

/// Errors raised by the spectral routines.
///
/// Variants carry enough context to tell which precondition failed; the CLI
/// maps them onto exit codes (configuration, certification, numerics).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("Moebius pole: |cz + d| = {0:e} is below tolerance")]
    Pole(f64),
    #[error("matrix is not elliptic: |tr| = {0} (need < 2 - 1e-9)")]
    NotElliptic(f64),
    #[error("matrix is not in SU(1,1): defect {0:e}")]
    NotSu11(f64),
    #[error("point {0} is not inside the open unit disk")]
    OutsideDisk(f64),
    #[error("invalid word: {0}")]
    InvalidWord(String),
    #[error("window [{lo}, {hi}] is too small (need hi - lo >= 4)")]
    WindowTooSmall { lo: i64, hi: i64 },
    #[error("vector support touches the window boundary")]
    SupportTouchesBoundary,
    #[error("spectral parameter z = 0 is not allowed")]
    ZeroSpectralParameter,
    #[error("two-step transfer matrices need an even index, got {0}")]
    OddIndex(i64),
    #[error("spectral parameter is off the unit circle (|z| - 1 = {0:e})")]
    OffCircle(f64),
    #[error("tau = {tau} is outside the spectrum (Delta = {discriminant})")]
    OutsideBand { tau: f64, discriminant: f64 },
    #[error("tau = {tau} is within {distance:e} of a band edge")]
    NearEdge { tau: f64, distance: f64 },
    #[error("grid of {grid} points is too coarse: {detail}")]
    GridTooCoarse { grid: usize, detail: String },
    #[error("root bracketing failed for level {level}: {detail}")]
    RootBracketFailure { level: f64, detail: String },
    #[error("quadrature did not converge (last change {0:e})")]
    QuadratureNotConverged(f64),
    #[error("arc of length {0} violates Leb(A) < 1/2")]
    ArcTooLong(f64),
    #[error("gap opening failed; deepest closed gap near tau = {tau} (excess {excess:e})")]
    GapOpeningFailed { tau: f64, excess: f64 },
    #[error("cover certification failed: tau = {0} lies in every member spectrum")]
    CoverCertificationFailed(f64),
    #[error("n = {n} is too small (need n > 4 * l * n' = {bound})")]
    NTooSmall { n: usize, bound: usize },
    #[error("estimated eta = {0:e} is not positive")]
    EtaNonPositive(f64),
    #[error("schedule infeasible: {0}")]
    ScheduleInfeasible(String),
    #[error("degenerate coin at position {0}: q11 or q22 vanishes")]
    DegenerateCoin(i64),
    #[error("coin at position {0} is not unitary")]
    NonUnitaryCoin(i64),
    #[error("word is not walk-shaped: alpha_{0} != 0")]
    NotWalkShaped(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
