use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid size {size}: {reason}")]
    InvalidGridSize { size: usize, reason: &'static str },

    #[error("tail tolerance {0:e} outside (0, 1e-4]")]
    InvalidTailTolerance(f64),

    #[error("invalid weight function: {0}")]
    InvalidWeight(String),

    #[error("degenerate weight function: W(w) = {0:e}")]
    DegenerateWeight(f64),

    #[error("weight norm not converged under grid doubling: {coarse} vs {fine}")]
    NormNotConverged { coarse: f64, fine: f64 },

    #[error(
        "no synthesis window up to {max_cutoff} cells reaches tail tolerance {tail_tol:e}; \
         smallest achievable deficit {achievable:e}"
    )]
    TruncationFailed {
        max_cutoff: usize,
        tail_tol: f64,
        achievable: f64,
    },

    #[error("coin amplitudes not normalized: |alpha|^2 + |beta|^2 = {0}")]
    CoinNotNormalized(f64),

    #[error("coin angle {theta} is within 1e-6 of a multiple of pi/2; no limit density")]
    DegenerateAngle { theta: f64 },

    #[error("x = {x} outside the open support (-{half_width}, {half_width})")]
    OutsideSupport { x: f64, half_width: f64 },

    #[error("eigenvector normalization N(k) underflows at k = {k}")]
    EigenvectorUnderflow { k: f64 },

    #[error("tilt coefficient {lambda} makes the density negative (|lambda|*|c| = {bound})")]
    InvalidTilt { lambda: f64, bound: f64 },

    #[error("F is not normalized: integral of F^2 is {0}, expected 2*pi")]
    NotNormalized(f64),

    #[error("quadrature did not converge: estimate {value}, error estimate {error:e}")]
    Quadrature { value: f64, error: f64 },

    #[error("rate fit needs at least 3 step counts, got {0}")]
    TooFewPoints(usize),

    #[error("degenerate rate fit: non-positive error {error:e} at t = {t}")]
    DegenerateFit { t: u64, error: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
