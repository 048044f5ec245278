//! Non-localized initial states synthesized from a periodic weight `w(k)`.
//!
//! Convention: the initial amplitudes are
//!
//! ```text
//! ψ_0(x) = (2π W)^{-1/2} · g(x) · (α, β),   g(x) = ∫_{-π}^{π} w(k) e^{ikx} dk,
//! ```
//!
//! with `W = ∫ w(k)² dk`, so that the Fourier transform
//! `Ψ̂_0(k) = Σ_x e^{-ikx} ψ_0(x)` equals `√(2π/W) · w(k) · (α, β)`.
//! `g` is computed by one inverse FFT over a uniform `k`-grid, then truncated
//! to the smallest symmetric window whose outside mass is below a tolerance
//! and renormalized.

use crate::error::{Error, Result};
use crate::quad;
use crate::walk::{CoinAngle, Spinor, WalkState};
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI, TAU};

pub const DEFAULT_GRID_SIZE: usize = 1 << 18;
pub const DEFAULT_TAIL_TOL: f64 = 1e-10;

/// Below this `|sin θ|` the built-in seeds are unbounded.
const MIN_ABS_SIN: f64 = 1e-6;

/// Initial coin state `α|0⟩ + β|1⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitCoin {
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl InitCoin {
    pub const NORM_TOL: f64 = 1e-12;

    pub fn new(alpha: Complex64, beta: Complex64) -> Result<Self> {
        Self::with_tolerance(alpha, beta, Self::NORM_TOL)
    }

    pub fn with_tolerance(alpha: Complex64, beta: Complex64, tol: f64) -> Result<Self> {
        let norm = alpha.norm_sqr() + beta.norm_sqr();
        if !norm.is_finite() || (norm - 1.0).abs() > tol {
            return Err(Error::CoinNotNormalized(norm));
        }
        Ok(InitCoin { alpha, beta })
    }

    /// `(1/√2, i/√2)`, the coin for which every limit density is untilted.
    pub fn symmetric() -> Self {
        InitCoin {
            alpha: Complex64::new(FRAC_1_SQRT_2, 0.0),
            beta: Complex64::new(0.0, FRAC_1_SQRT_2),
        }
    }

    /// `(1, 0)`
    pub fn up() -> Self {
        InitCoin {
            alpha: Complex64::new(1.0, 0.0),
            beta: Complex64::new(0.0, 0.0),
        }
    }

    pub fn spinor(&self) -> Spinor {
        Spinor::new(self.alpha, self.beta)
    }
}

/// A weight function sampled on a uniform grid `k_j = −π + 2πj/n` and
/// linearly interpolated (periodically) in between.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tabulated {
    samples: Vec<f64>,
}

impl Tabulated {
    pub const MIN_SAMPLES: usize = 16;

    pub fn new(samples: Vec<f64>) -> Result<Self> {
        if samples.len() < Self::MIN_SAMPLES {
            return Err(Error::InvalidWeight(format!(
                "tabulated weight needs at least {} samples, got {}",
                Self::MIN_SAMPLES,
                samples.len()
            )));
        }
        if let Some(bad) = samples.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidWeight(format!(
                "tabulated weight contains non-finite sample {bad}"
            )));
        }
        Ok(Tabulated { samples })
    }

    /// Builds from `(k, w)` pairs, checking that the `k` column is the
    /// uniform grid over `[−π, π)`.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        let n = pairs.len();
        for (j, &(k, _)) in pairs.iter().enumerate() {
            let expected = -PI + TAU * j as f64 / n as f64;
            if (k - expected).abs() > 1e-9 {
                return Err(Error::InvalidWeight(format!(
                    "row {j}: k = {k} is not on the uniform grid over [-pi, pi) (expected {expected})"
                )));
            }
        }
        Tabulated::new(pairs.iter().map(|p| p.1).collect())
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    fn eval(&self, k: f64) -> f64 {
        let n = self.samples.len();
        let pos = (k + PI) / TAU * n as f64;
        let i = (pos.floor() as usize).min(n - 1);
        let frac = pos - i as f64;
        let (a, b) = (self.samples[i], self.samples[(i + 1) % n]);
        a + (b - a) * frac
    }

    /// Exact `∫ w²` of the piecewise-linear interpolant.
    fn norm(&self) -> f64 {
        let n = self.samples.len();
        let h = TAU / n as f64;
        (0..n)
            .map(|i| {
                let (a, b) = (self.samples[i], self.samples[(i + 1) % n]);
                h / 3.0 * (a * a + a * b + b * b)
            })
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightKind {
    /// `w = 1`: the walk started at the origin.
    Unit,
    /// `sin k / (1 − c² sin² k)`
    Semicircle,
    /// `1 / √(1 − c² sin² k)`
    Arcsine,
    /// `√(|sin k| / (1 − c² sin² k)^{3/2}) · exp(−c² cos² k / (4σ² (1 − c² sin² k)))`
    Gaussian { sigma: f64 },
    /// `√(|sin k| / (1 − c² sin² k)^{3/2})`
    Uniform,
    Tabulated(Tabulated),
}

impl WeightKind {
    pub fn name(&self) -> &'static str {
        match self {
            WeightKind::Unit => "unit",
            WeightKind::Semicircle => "semicircle",
            WeightKind::Arcsine => "arcsine",
            WeightKind::Gaussian { .. } => "gaussian",
            WeightKind::Uniform => "uniform",
            WeightKind::Tabulated(_) => "tabulated",
        }
    }
}

/// A weight function together with the coin angle its closed form uses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightSpec {
    pub kind: WeightKind,
    pub theta: CoinAngle,
}

impl WeightSpec {
    pub fn new(kind: WeightKind, theta: CoinAngle) -> Result<Self> {
        match &kind {
            WeightKind::Gaussian { sigma } if !(sigma.is_finite() && *sigma > 0.0) => {
                return Err(Error::InvalidWeight(format!(
                    "gaussian sigma must be positive, got {sigma}"
                )));
            }
            WeightKind::Semicircle
            | WeightKind::Arcsine
            | WeightKind::Gaussian { .. }
            | WeightKind::Uniform
                if theta.s().abs() < MIN_ABS_SIN =>
            {
                return Err(Error::InvalidWeight(format!(
                    "{} seed is unbounded at theta = {}",
                    kind.name(),
                    theta.0
                )));
            }
            _ => {}
        }
        Ok(WeightSpec { kind, theta })
    }

    pub fn unit(theta: CoinAngle) -> Self {
        WeightSpec {
            kind: WeightKind::Unit,
            theta,
        }
    }

    /// Evaluates `w(k)`; `k` is reduced into `[−π, π)` first.
    pub fn eval(&self, k: f64) -> f64 {
        let k = reduce_angle(k);
        let c = self.theta.c();
        let sin_k = k.sin();
        let d = 1.0 - c * c * sin_k * sin_k;
        match &self.kind {
            WeightKind::Unit => 1.0,
            WeightKind::Semicircle => sin_k / d,
            WeightKind::Arcsine => 1.0 / d.sqrt(),
            WeightKind::Gaussian { sigma } => {
                let cos_k = k.cos();
                let envelope = (-(c * c * cos_k * cos_k) / (4.0 * sigma * sigma * d)).exp();
                (sin_k.abs() / d.powf(1.5)).sqrt() * envelope
            }
            WeightKind::Uniform => (sin_k.abs() / d.powf(1.5)).sqrt(),
            WeightKind::Tabulated(t) => t.eval(k),
        }
    }

    pub fn is_unit(&self) -> bool {
        matches!(self.kind, WeightKind::Unit)
    }
}

/// Reduces an angle into `[−π, π)`.
pub fn reduce_angle(k: f64) -> f64 {
    if (-PI..PI).contains(&k) {
        return k;
    }
    let r = k - TAU * ((k + PI) / TAU).floor();
    // rounding can land exactly on π
    if r >= PI {
        r - TAU
    } else {
        r
    }
}

fn check_power_of_two(size: usize, min: usize) -> Result<()> {
    if size < min {
        return Err(Error::InvalidGridSize {
            size,
            reason: if min == 64 {
                "must be at least 64"
            } else {
                "must be at least 256"
            },
        });
    }
    if !size.is_power_of_two() {
        return Err(Error::InvalidGridSize {
            size,
            reason: "must be a power of two",
        });
    }
    Ok(())
}

/// `W(w) = ∫_{-π}^{π} w(k)² dk`.
///
/// Built-in weights use composite Simpson on the four quarter periods (the
/// seeds have `|sin k|` kinks at `0` and `±π`), evaluated at `grid_size` and
/// `2 · grid_size` points; the two must agree to 1e-9 relative. Tabulated
/// weights are integrated exactly.
pub fn weight_norm(w: &WeightSpec, grid_size: usize) -> Result<f64> {
    check_power_of_two(grid_size, 64)?;
    let norm = match &w.kind {
        WeightKind::Unit => TAU,
        WeightKind::Tabulated(t) => t.norm(),
        _ => {
            let breaks = [-PI, -FRAC_PI_2, 0.0, FRAC_PI_2, PI];
            let f = |k: f64| {
                let v = w.eval(k);
                v * v
            };
            let coarse = quad::simpson_split(f, &breaks, grid_size / 4);
            let fine = quad::simpson_split(f, &breaks, grid_size / 2);
            if !((fine - coarse).abs() <= 1e-9 * fine.abs()) {
                return Err(Error::NormNotConverged { coarse, fine });
            }
            fine
        }
    };
    if !(norm > 1e-14) || !norm.is_finite() {
        return Err(Error::DegenerateWeight(norm));
    }
    Ok(norm)
}

/// `g(x) = ∫ w(k) e^{ikx} dk` for `x ∈ [−n/2, n/2)`, by the `n`-point
/// periodic trapezoid rule (one inverse FFT).
#[derive(Debug, Clone)]
pub struct FourierProfile {
    grid_size: usize,
    values: Vec<Complex64>,
}

impl FourierProfile {
    pub fn compute(w: &WeightSpec, grid_size: usize) -> Result<Self> {
        check_power_of_two(grid_size, 64)?;
        let n = grid_size;
        let mut buf: Vec<Complex64> = (0..n)
            .map(|j| Complex64::new(w.eval(-PI + TAU * j as f64 / n as f64), 0.0))
            .collect();
        FftPlanner::new().plan_fft_inverse(n).process(&mut buf);

        // k_j = −π + 2πj/n gives e^{i k_j x} = (−1)^x e^{2πi jx/n}.
        let scale = TAU / n as f64;
        let half = (n / 2) as i64;
        let values = (-half..half)
            .map(|x| {
                let v = buf[x.rem_euclid(n as i64) as usize] * scale;
                if x.rem_euclid(2) == 1 {
                    -v
                } else {
                    v
                }
            })
            .collect();
        Ok(FourierProfile {
            grid_size: n,
            values,
        })
    }

    pub fn grid_size(&self) -> usize {
        self.grid_size
    }

    /// `g(x)`; zero outside `[−n/2, n/2)`.
    pub fn at(&self, x: i64) -> Complex64 {
        let i = x + (self.grid_size / 2) as i64;
        if i < 0 || i as usize >= self.values.len() {
            return Complex64::new(0.0, 0.0);
        }
        self.values[i as usize]
    }

    /// All `(x, g(x))`, ascending in `x`.
    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let half = (self.grid_size / 2) as i64;
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &v)| (i as i64 - half, v))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationReport {
    /// Synthesis window is `[−cutoff, cutoff]`.
    pub cutoff: usize,
    /// Mass outside the window before renormalization.
    pub deficit: f64,
    pub grid_size: usize,
    pub renormalized: bool,
    /// Numerical `W(w)` used for the normalization.
    pub weight_norm: f64,
}

/// Builds `ψ_0` from `w` and the coin.
///
/// The unit weight yields the localized state at the origin exactly. All
/// other weights are synthesized by [`FourierProfile`], truncated to the
/// smallest `[−X0, X0]` leaving less than `tail_tol` mass outside, and
/// renormalized to unit mass.
pub fn synthesize_initial(
    w: &WeightSpec,
    coin: InitCoin,
    grid_size: usize,
    tail_tol: f64,
) -> Result<(WalkState, TruncationReport)> {
    check_power_of_two(grid_size, 256)?;
    if !(tail_tol > 0.0 && tail_tol <= 1e-4) {
        return Err(Error::InvalidTailTolerance(tail_tol));
    }
    if w.is_unit() {
        return Ok((
            WalkState::localized(coin.spinor()),
            TruncationReport {
                cutoff: 0,
                deficit: 0.0,
                grid_size,
                renormalized: false,
                weight_norm: TAU,
            },
        ));
    }

    let norm = weight_norm(w, grid_size)?;
    let profile = FourierProfile::compute(w, grid_size)?;
    let mass = |x: i64| profile.at(x).norm_sqr() / (TAU * norm);

    let max_cutoff = grid_size / 2 - 1;
    let mut inside = mass(0);
    let mut cutoff = 0usize;
    while 1.0 - inside >= tail_tol {
        if cutoff == max_cutoff {
            return Err(Error::TruncationFailed {
                max_cutoff,
                tail_tol,
                achievable: (1.0 - inside).max(0.0),
            });
        }
        cutoff += 1;
        inside += mass(cutoff as i64) + mass(-(cutoff as i64));
    }
    let deficit = (1.0 - inside).max(0.0);

    let scale = 1.0 / (TAU * norm * inside).sqrt();
    let amplitudes = (-(cutoff as i64)..=cutoff as i64)
        .map(|x| coin.spinor().scale(profile.at(x) * scale))
        .collect();
    Ok((
        WalkState::new(0, -(cutoff as i64), amplitudes),
        TruncationReport {
            cutoff,
            deficit,
            grid_size,
            renormalized: true,
            weight_norm: norm,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::erf;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_3, FRAC_PI_4};

    fn spec(kind: WeightKind, theta: f64) -> WeightSpec {
        WeightSpec::new(kind, CoinAngle(theta)).unwrap()
    }

    fn seeds(theta: f64) -> Vec<WeightSpec> {
        let sigma = 0.25 * theta.cos().abs();
        vec![
            spec(WeightKind::Semicircle, theta),
            spec(WeightKind::Arcsine, theta),
            spec(WeightKind::Gaussian { sigma }, theta),
            spec(WeightKind::Uniform, theta),
        ]
    }

    #[test]
    fn weight_eval_examples() {
        assert_abs_diff_eq!(
            spec(WeightKind::Semicircle, FRAC_PI_4).eval(FRAC_PI_2),
            2.0,
            epsilon = 1e-14
        );
        for theta in [0.3, FRAC_PI_4, 2.0] {
            assert_eq!(spec(WeightKind::Arcsine, theta).eval(0.0), 1.0);
            assert_eq!(spec(WeightKind::Uniform, theta).eval(0.0), 0.0);
        }
        assert_eq!(WeightSpec::unit(CoinAngle(0.0)).eval(1.3), 1.0);
    }

    #[test]
    fn eval_is_periodic() {
        for w in seeds(1.1) {
            for k in [-3.0, -1.0, 0.2, 2.9] {
                assert_abs_diff_eq!(w.eval(k), w.eval(k + TAU), epsilon = 1e-13);
                assert_abs_diff_eq!(w.eval(k), w.eval(k - 3.0 * TAU), epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn reduce_angle_range() {
        for k in [-10.0, -PI, 0.0, PI, 7.5, 1e3] {
            let r = reduce_angle(k);
            assert!((-PI..PI).contains(&r), "{k} -> {r}");
            assert_abs_diff_eq!((r - k).rem_euclid(TAU).min(TAU - (r - k).rem_euclid(TAU)), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!(WeightSpec::new(WeightKind::Gaussian { sigma: 0.0 }, CoinAngle(1.0)).is_err());
        assert!(WeightSpec::new(WeightKind::Gaussian { sigma: -1.0 }, CoinAngle(1.0)).is_err());
        assert!(WeightSpec::new(WeightKind::Semicircle, CoinAngle(0.0)).is_err());
        assert!(WeightSpec::new(WeightKind::Unit, CoinAngle(0.0)).is_ok());
        assert!(Tabulated::new(vec![1.0; 15]).is_err());
        assert!(Tabulated::new(vec![f64::NAN; 16]).is_err());
    }

    #[test]
    fn closed_form_norms() {
        let (s, c) = (FRAC_PI_4.sin(), FRAC_PI_4.cos());
        let w = |kind| weight_norm(&spec(kind, FRAC_PI_4), DEFAULT_GRID_SIZE).unwrap();
        assert_abs_diff_eq!(w(WeightKind::Semicircle), PI / s.powi(3), epsilon = 1e-9);
        assert_abs_diff_eq!(w(WeightKind::Semicircle), 8.885765876, epsilon = 1e-9);
        assert_abs_diff_eq!(w(WeightKind::Arcsine), TAU / s, epsilon = 1e-9);
        assert_abs_diff_eq!(w(WeightKind::Uniform), 8.0, epsilon = 1e-9);
        let sigma = 0.3;
        let gauss = 2.0 * TAU.sqrt() * sigma / (c * s * s) * erf(c / (2f64.sqrt() * sigma));
        assert_abs_diff_eq!(w(WeightKind::Gaussian { sigma }), gauss, epsilon = 1e-9);
        assert_eq!(w(WeightKind::Unit), TAU);
    }

    #[test]
    fn norm_agrees_with_adaptive_oracle() {
        for theta in [0.4, FRAC_PI_3, 2.5] {
            for w in seeds(theta) {
                let oracle = quad::adaptive_with_breaks(
                    |k| w.eval(k).powi(2),
                    &[-PI, -FRAC_PI_2, 0.0, FRAC_PI_2, PI],
                    1e-13,
                )
                .unwrap()
                .value;
                let got = weight_norm(&w, 4096).unwrap();
                assert!((got - oracle).abs() < 1e-10 * oracle, "{:?}: {got} vs {oracle}", w.kind);
            }
        }
    }

    #[test]
    fn norm_grid_validation() {
        let w = WeightSpec::unit(CoinAngle(1.0));
        assert!(matches!(weight_norm(&w, 32), Err(Error::InvalidGridSize { .. })));
        assert!(matches!(weight_norm(&w, 100), Err(Error::InvalidGridSize { .. })));
        let zero = WeightSpec::new(WeightKind::Tabulated(Tabulated::new(vec![0.0; 16]).unwrap()), CoinAngle(1.0)).unwrap();
        assert!(matches!(weight_norm(&zero, 64), Err(Error::DegenerateWeight(_))));
    }

    #[test]
    fn tabulated_interpolates_and_integrates_exactly() {
        let n = 64;
        let pairs: Vec<(f64, f64)> = (0..n)
            .map(|j| {
                let k = -PI + TAU * j as f64 / n as f64;
                (k, 1.0 + 0.5 * k.cos())
            })
            .collect();
        let t = Tabulated::from_pairs(&pairs).unwrap();
        let w = WeightSpec::new(WeightKind::Tabulated(t), CoinAngle(1.0)).unwrap();
        assert_abs_diff_eq!(w.eval(pairs[5].0), pairs[5].1, epsilon = 1e-14);
        let mid = 0.5 * (pairs[5].0 + pairs[6].0);
        assert_abs_diff_eq!(w.eval(mid), 0.5 * (pairs[5].1 + pairs[6].1), epsilon = 1e-14);
        // Simpson is exact on the piecewise quadratic w² when panels align with nodes.
        let oracle: f64 = (0..n)
            .map(|i| {
                let (a, b) = (-PI + TAU * i as f64 / n as f64, -PI + TAU * (i + 1) as f64 / n as f64);
                quad::simpson(|k| w.eval(k).powi(2), a, b, 2)
            })
            .sum();
        assert_abs_diff_eq!(weight_norm(&w, 64).unwrap(), oracle, epsilon = 1e-12);

        let mut shifted = pairs.clone();
        shifted[3].0 += 1e-3;
        assert!(Tabulated::from_pairs(&shifted).is_err());
    }

    #[test]
    fn unit_weight_is_localized() {
        let coin = InitCoin::new(Complex64::new(0.6, 0.0), Complex64::new(0.0, -0.8)).unwrap();
        let (state, report) =
            synthesize_initial(&WeightSpec::unit(CoinAngle(1.0)), coin, 1024, 1e-10).unwrap();
        assert_eq!(state, WalkState::localized(coin.spinor()));
        assert_eq!(report.cutoff, 0);
        assert_eq!(report.deficit, 0.0);
    }

    #[test]
    fn synthesis_argument_validation() {
        let w = spec(WeightKind::Arcsine, 1.0);
        let coin = InitCoin::up();
        assert!(matches!(synthesize_initial(&w, coin, 128, 1e-10), Err(Error::InvalidGridSize { .. })));
        assert!(matches!(synthesize_initial(&w, coin, 1000, 1e-10), Err(Error::InvalidGridSize { .. })));
        assert!(matches!(synthesize_initial(&w, coin, 1024, 0.0), Err(Error::InvalidTailTolerance(_))));
        assert!(matches!(synthesize_initial(&w, coin, 1024, 1e-3), Err(Error::InvalidTailTolerance(_))));
    }

    #[test]
    fn truncation_failure_reports_achievable_deficit() {
        // The uniform seed's profile decays like |x|^{-3/2}; 1024 cells cannot hold all but 1e-10.
        let w = spec(WeightKind::Uniform, FRAC_PI_4);
        match synthesize_initial(&w, InitCoin::up(), 1024, 1e-10) {
            Err(Error::TruncationFailed { max_cutoff, achievable, .. }) => {
                assert_eq!(max_cutoff, 511);
                assert!(achievable > 1e-10 && achievable < 1e-2);
            }
            other => panic!("expected truncation failure, got {other:?}"),
        }
    }

    #[test]
    fn synthesized_state_is_normalized() {
        for theta in [FRAC_PI_4, 2.0] {
            for w in seeds(theta) {
                let (state, report) =
                    synthesize_initial(&w, InitCoin::symmetric(), 1 << 16, 1e-8).unwrap();
                assert_abs_diff_eq!(state.total_mass(), 1.0, epsilon = 1e-14);
                assert!(report.deficit < 1e-8);
                assert!(report.renormalized);
                assert_eq!(state.window(), (-(report.cutoff as i64), report.cutoff as i64));
            }
        }
    }

    #[test]
    fn profile_symmetry() {
        let odd = FourierProfile::compute(&spec(WeightKind::Semicircle, 0.9), 4096).unwrap();
        let even = FourierProfile::compute(&spec(WeightKind::Arcsine, 0.9), 4096).unwrap();
        let scale = odd.iter().map(|(_, v)| v.norm()).fold(0.0, f64::max);
        for x in 0..2000 {
            let (p, m) = (odd.at(x), odd.at(-x));
            assert!(p.re.abs() < 1e-14 * scale, "x = {x}: {p}");
            assert!((p + m).norm() < 1e-14 * scale);
            let (p, m) = (even.at(x), even.at(-x));
            assert!(p.im.abs() < 1e-14 * scale);
            assert!((p - m).norm() < 1e-14 * scale);
        }
    }

    #[test]
    fn forward_transform_recovers_normalized_weight() {
        // By Parseval the mean-square error of the truncated transform over
        // the grid equals the discarded mass.
        let n = 1 << 12;
        for w in [spec(WeightKind::Semicircle, FRAC_PI_4), spec(WeightKind::Arcsine, FRAC_PI_3)] {
            let (state, report) = synthesize_initial(&w, InitCoin::up(), n, 1e-10).unwrap();
            let f_scale = (TAU / report.weight_norm).sqrt();
            let mut mean_sq = 0.0;
            for j in 0..n {
                let k = -PI + TAU * j as f64 / n as f64;
                let hat: Complex64 = (state.window().0..=state.window().1)
                    .map(|x| Complex64::from_polar(1.0, -k * x as f64) * state.amplitude_at(x).a0)
                    .sum();
                let err = (hat - f_scale * w.eval(k)).norm_sqr();
                assert!(err < 1e-8, "{:?} k = {k}: {hat}", w.kind);
                mean_sq += err / n as f64;
            }
            assert!(mean_sq <= 1.5 * report.deficit + 1e-20, "{:?}: {mean_sq:e} vs {:e}", w.kind, report.deficit);
        }
        // Kinked seeds: the untruncated profile inverts exactly.
        for w in [spec(WeightKind::Uniform, FRAC_PI_4), spec(WeightKind::Gaussian { sigma: 0.2 }, 1.0)] {
            let profile = FourierProfile::compute(&w, 512).unwrap();
            for j in (0..512).step_by(13) {
                let k = -PI + TAU * j as f64 / 512.0;
                let hat: Complex64 = profile
                    .iter()
                    .map(|(x, g)| Complex64::from_polar(1.0, -k * x as f64) * g)
                    .sum::<Complex64>()
                    / TAU;
                assert!((hat - w.eval(k)).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn doubling_grid_leaves_amplitudes_unchanged() {
        let coin = InitCoin::symmetric();
        for (w, tol) in [
            (spec(WeightKind::Semicircle, FRAC_PI_4), DEFAULT_TAIL_TOL),
            (spec(WeightKind::Arcsine, FRAC_PI_4), DEFAULT_TAIL_TOL),
            (spec(WeightKind::Gaussian { sigma: 0.25 * FRAC_PI_4.cos() }, FRAC_PI_4), DEFAULT_TAIL_TOL),
            (spec(WeightKind::Uniform, FRAC_PI_4), 1e-8),
        ] {
            let (a, ra) = synthesize_initial(&w, coin, DEFAULT_GRID_SIZE, tol).unwrap();
            let (b, rb) = synthesize_initial(&w, coin, 2 * DEFAULT_GRID_SIZE, tol).unwrap();
            // Aliasing can move the cutoff by a few cells for slowly decaying profiles.
            let (lo, hi) = (ra.cutoff.min(rb.cutoff), ra.cutoff.max(rb.cutoff));
            assert!((hi - lo) as f64 <= 0.05 * hi as f64, "{:?}: {lo} vs {hi}", w.kind);
            let lo = lo as i64;
            let worst = (-lo..=lo)
                .map(|x| {
                    let (p, q) = (a.amplitude_at(x), b.amplitude_at(x));
                    (p.a0 - q.a0).norm().max((p.a1 - q.a1).norm())
                })
                .fold(0.0, f64::max);
            assert!(worst < 1e-8, "{:?}: {worst:e}", w.kind);
        }
    }

    #[test]
    fn coin_validation() {
        assert!(InitCoin::new(Complex64::new(1.0, 0.0), Complex64::new(0.1, 0.0)).is_err());
        let s = InitCoin::symmetric();
        assert_abs_diff_eq!(s.alpha.norm_sqr() + s.beta.norm_sqr(), 1.0, epsilon = 1e-15);
    }
}
