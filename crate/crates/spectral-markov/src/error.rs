use thiserror::Error;

/// Errors surfaced by model constructors, evaluators and simulators.
#[derive(Debug, Error)]
pub enum Error {
    #[error("quadrature order must be at least 1, got {0}")]
    QuadratureOrder(usize),

    #[error("Jacobi exponent {name} must be > -1, got {value}")]
    JacobiExponent { name: &'static str, value: f64 },

    #[error("Krawtchouk degree {n} exceeds lattice size {cap}")]
    KrawtchoukDegree { n: u32, cap: u32 },

    #[error("parameter nu = {nu} outside the valid range ({requirement})")]
    NuRange { nu: f64, requirement: &'static str },

    #[error("ell must be a positive integer, got {0}")]
    EllRange(u32),

    #[error("evaluation point y = {0} is a pole of the operator coefficients")]
    PoleAt(f64),

    #[error("S(y) is singular at y = {y} (entry {index})")]
    SingularS { y: f64, index: usize },

    #[error("recurrence denominator vanishes at n = {n} (diagonal entry {index})")]
    RecurrenceDenominator { n: u32, index: usize },

    #[error("nonpositive jump rate at level {level}: lambda = {lambda}, mu = {mu}")]
    NonpositiveRate { level: u32, lambda: f64, mu: f64 },

    #[error("generator truncation needs at least 2 levels, got {0}")]
    TooFewLevels(usize),

    #[error("state ({level}, {phase}) outside truncation ({levels} levels, {phases} phases)")]
    StateOutsideTruncation {
        level: u32,
        phase: u32,
        levels: usize,
        phases: usize,
    },

    #[error(
        "quadrature did not stabilize under order doubling (drift {drift:.3e} > {tolerance:.3e})"
    )]
    QuadratureUnstable { drift: f64, tolerance: f64 },

    #[error(
        "spectral series needs more than {cap} terms for t = {t}, tol = {tol}; \
         increase t or loosen tol"
    )]
    SeriesTruncation { cap: usize, t: f64, tol: f64 },

    #[error("time step dt = {dt} too large: jump probability {p:.3} > 0.5 at y = {y:.4}")]
    DtTooLarge { dt: f64, p: f64, y: f64 },

    #[error("boundary test undecided: partial integrals decay too close to the margin (ratio {ratio:.4})")]
    BoundaryUndecided { ratio: f64 },

    #[error("{context}: built model disagrees with the conjugated operator (max residual {residual:.3e})")]
    ModelCertification { context: &'static str, residual: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
