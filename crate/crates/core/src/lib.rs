//! Numerical laboratory for the discrete-time two-state quantum walk on ℤ.
//!
//! * [`walk`]: exact amplitude evolution on a finite window.
//! * [`initial`]: non-localized initial states synthesized from a periodic
//!   weight function.
//! * [`limit`]: spectral functions of the walk and its limit densities on
//!   `(−|cos θ|, |cos θ|)`.
//! * [`moments`]: moments of `X_t / t` by simulation, by quadrature of the
//!   limit density, and by the momentum-space integral.
//! * [`diagnostics`]: Kolmogorov-Smirnov distances, density overlays and
//!   convergence-rate fits.

// Negated float comparisons are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod error;
pub mod initial;
pub mod limit;
pub mod moments;
pub mod quad;
pub mod special;
pub mod walk;

pub use error::{Error, Result};
pub use initial::{synthesize_initial, weight_norm, InitCoin, Tabulated, TruncationReport, WeightKind, WeightSpec};
pub use limit::{DensityKind, SpectralContext, TiltedDensity, TwoPointLaw};
pub use walk::{CoinAngle, ProbabilityDistribution, Spinor, WalkState};
