//! Spectral functions of the walk and its long-time limit densities.
//!
//! With `c = cos θ`, `s = sin θ`, the rescaled position `X_t / t` converges
//! weakly to a law supported on `(−|c|, |c|)`. For an initial state with
//! Fourier transform `F(k)·(α, β)` the density is
//! `f1(x)·η1(x) + f2(x)·η2(x)`, where `η1`, `η2` sample `F²` at the four
//! momenta mapped to `x` by the group velocity `h`. The built-in seeds give
//! closed forms (Konno, semicircle, arcsine, truncated Gaussian, uniform),
//! each multiplied by the linear tilt `1 − λx`.

use crate::error::{Error, Result};
use crate::initial::{reduce_angle, weight_norm, InitCoin, WeightKind, WeightSpec};
use crate::quad;
use crate::special::erf;
use crate::walk::{CoinAngle, Spinor};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI, TAU};

/// Smallest `min(|c|, |s|)` for which limit laws are evaluated.
pub const MIN_TRIG: f64 = 1e-6;

const KAPPA_SLACK: f64 = 1e-12;
const CDF_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralContext {
    theta: CoinAngle,
    c: f64,
    s: f64,
}

impl SpectralContext {
    pub fn new(theta: CoinAngle) -> Result<Self> {
        let (c, s) = (theta.c(), theta.s());
        if c.abs().min(s.abs()) < MIN_TRIG {
            return Err(Error::DegenerateAngle { theta: theta.0 });
        }
        Ok(SpectralContext { theta, c, s })
    }

    pub fn theta(&self) -> CoinAngle {
        self.theta
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    /// `|c|`, the half-width of every limit law's support.
    pub fn half_width(&self) -> f64 {
        self.c.abs()
    }

    fn root(&self, k: f64) -> f64 {
        let sk = k.sin();
        (1.0 - self.c * self.c * sk * sk).sqrt()
    }

    /// Group velocity `h(k) = c cos k / √(1 − c² sin² k)`.
    pub fn dispersion_h(&self, k: f64) -> f64 {
        self.c * k.cos() / self.root(k)
    }

    /// Inverse of `h` on `[0, π]`: `κ(x) = arccos(|s| x / (c √(1 − x²)))`.
    pub fn kappa(&self, x: f64) -> Result<f64> {
        self.check_support(x)?;
        Ok(self.kappa_unchecked(x))
    }

    fn kappa_unchecked(&self, x: f64) -> f64 {
        let arg = self.s.abs() * x / (self.c * (1.0 - x * x).sqrt());
        debug_assert!(arg.abs() <= 1.0 + KAPPA_SLACK || !arg.is_finite());
        arg.clamp(-1.0, 1.0).acos()
    }

    fn check_support(&self, x: f64) -> Result<()> {
        if x.is_nan() || x.abs() >= self.half_width() {
            return Err(Error::OutsideSupport {
                x,
                half_width: self.half_width(),
            });
        }
        Ok(())
    }

    /// `N(k) = 1 + s² + c² cos 2k + 2c cos k √(1 − c² sin² k)`, evaluated as
    /// the equivalent `s² + (c cos k + √(1 − c² sin² k))²`, which has no
    /// cancellation.
    pub fn norm_n(&self, k: f64) -> f64 {
        let b = self.c * k.cos() + self.root(k);
        self.s * self.s + b * b
    }

    /// Unit eigenvector `v(k)` of `Û(k)` on the branch with velocity `h(k)`.
    pub fn eigenvector_v(&self, k: f64) -> Result<Spinor> {
        let n = self.norm_n(k);
        if !(n > 1e-14) {
            return Err(Error::EigenvectorUnderflow { k });
        }
        let inv = 1.0 / n.sqrt();
        Ok(Spinor::new(
            Complex64::from_polar(self.s * inv, k),
            Complex64::new(-(self.c * k.cos() + self.root(k)) * inv, 0.0),
        ))
    }

    /// `Û(k) = diag(e^{ik}, e^{−ik}) · U`.
    pub fn u_hat(&self, k: f64) -> [[Complex64; 2]; 2] {
        let (p, m) = (Complex64::from_polar(1.0, k), Complex64::from_polar(1.0, -k));
        [[p * self.c, p * self.s], [m * self.s, -m * self.c]]
    }

    /// `‖Û v − ⟨v, Û v⟩ v‖` for `v = v(k)`.
    pub fn eigen_residual(&self, k: f64) -> Result<f64> {
        let v = self.eigenvector_v(k)?;
        let u = self.u_hat(k);
        let uv = Spinor::new(u[0][0] * v.a0 + u[0][1] * v.a1, u[1][0] * v.a0 + u[1][1] * v.a1);
        let mu = v.inner(&uv);
        Ok(((uv.a0 - mu * v.a0).norm_sqr() + (uv.a1 - mu * v.a1).norm_sqr()).sqrt())
    }

    /// `λ = |α|² − |β|² + 2 s Re(α β̄) / c`.
    pub fn tilt_coefficient(&self, coin: &InitCoin) -> f64 {
        coin.alpha.norm_sqr() - coin.beta.norm_sqr()
            + 2.0 * self.s * (coin.alpha * coin.beta.conj()).re / self.c
    }

    /// `f1(x; α, β) = |s| / (π (1 − x²) √(c² − x²)) · (1 − λ x)`.
    pub fn f1(&self, x: f64, coin: &InitCoin) -> Result<f64> {
        self.check_support(x)?;
        Ok(self.f1_times_root(x, coin) / (self.c * self.c - x * x).sqrt())
    }

    // f1(x) · √(c² − x²)
    fn f1_times_root(&self, x: f64, coin: &InitCoin) -> f64 {
        self.s.abs() / (PI * (1.0 - x * x)) * (1.0 - self.tilt_coefficient(coin) * x)
    }

    /// `f2(x; α, β) = −s Im(α β̄) / (|c| π (1 − x²))`.
    pub fn f2(&self, x: f64, coin: &InitCoin) -> Result<f64> {
        self.check_support(x)?;
        Ok(self.f2_unchecked(x, coin))
    }

    fn f2_unchecked(&self, x: f64, coin: &InitCoin) -> f64 {
        -self.s * (coin.alpha * coin.beta.conj()).im / (self.c.abs() * PI * (1.0 - x * x))
    }
}

/// A weight function rescaled to `F = √(2π / W) · w`, so that `∫ F² = 2π`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedWeight {
    spec: WeightSpec,
    scale: f64,
    norm: f64,
}

impl NormalizedWeight {
    /// Normalizes with `W` from [`weight_norm`] and then checks `∫ F² = 2π`
    /// to 1e-6 with an independent adaptive quadrature.
    pub fn new(spec: WeightSpec, grid_size: usize) -> Result<Self> {
        let norm = weight_norm(&spec, grid_size)?;
        let scale = (TAU / norm).sqrt();
        let check = quad::adaptive_with_breaks(
            |k| (scale * spec.eval(k)).powi(2),
            &[-PI, -FRAC_PI_2, 0.0, FRAC_PI_2, PI],
            1e-9,
        )?
        .value;
        if (check - TAU).abs() > 1e-6 * TAU {
            return Err(Error::NotNormalized(check));
        }
        Ok(NormalizedWeight { spec, scale, norm })
    }

    pub fn spec(&self) -> &WeightSpec {
        &self.spec
    }

    /// `W(w)` used for the scaling.
    pub fn weight_norm(&self) -> f64 {
        self.norm
    }

    /// `F(k)`
    pub fn eval(&self, k: f64) -> f64 {
        self.scale * self.spec.eval(reduce_angle(k))
    }
}

/// `η1(x), η2(x)` sampled from `F` at `±κ`, `κ − π`, `π − κ`.
fn etas(f: &NormalizedWeight, kappa: f64) -> (f64, f64) {
    let p = f.eval(kappa).powi(2);
    let m = f.eval(-kappa).powi(2);
    let pm = f.eval(kappa - PI).powi(2);
    let mp = f.eval(PI - kappa).powi(2);
    (0.25 * (p + m + pm + mp), 0.5 * (p - m + pm - mp))
}

/// General limit density `f1 η1 + f2 η2` for an arbitrary normalized `F`.
pub fn general_density(
    f: &NormalizedWeight,
    ctx: &SpectralContext,
    coin: &InitCoin,
    x: f64,
) -> Result<f64> {
    let kappa = ctx.kappa(x)?;
    let (eta1, eta2) = etas(f, kappa);
    Ok(ctx.f1(x, coin)? * eta1 + ctx.f2(x, coin)? * eta2)
}

/// `f1(x) · F(κ(x))²`, the reduced density valid when
/// `|F(k − π)| = |F(−k)| = |F(k)|`.
pub fn reduced_density(
    f: &NormalizedWeight,
    ctx: &SpectralContext,
    coin: &InitCoin,
    x: f64,
) -> Result<f64> {
    let kappa = ctx.kappa(x)?;
    Ok(ctx.f1(x, coin)? * f.eval(kappa).powi(2))
}

#[derive(Debug, Clone, PartialEq)]
pub enum DensityKind {
    /// Limit of the walk started at the origin.
    Konno,
    Semicircle,
    Arcsine,
    TruncGaussian { sigma: f64 },
    Uniform,
    General(NormalizedWeight),
}

impl DensityKind {
    pub fn name(&self) -> &'static str {
        match self {
            DensityKind::Konno => "konno",
            DensityKind::Semicircle => "semicircle",
            DensityKind::Arcsine => "arcsine",
            DensityKind::TruncGaussian { .. } => "gaussian",
            DensityKind::Uniform => "uniform",
            DensityKind::General(_) => "general",
        }
    }

    /// Closed form produced by a built-in seed, or `None` for tabulated
    /// weights.
    pub fn closed_form_for(kind: &WeightKind) -> Option<DensityKind> {
        match kind {
            WeightKind::Unit => Some(DensityKind::Konno),
            WeightKind::Semicircle => Some(DensityKind::Semicircle),
            WeightKind::Arcsine => Some(DensityKind::Arcsine),
            WeightKind::Gaussian { sigma } => Some(DensityKind::TruncGaussian { sigma: *sigma }),
            WeightKind::Uniform => Some(DensityKind::Uniform),
            WeightKind::Tabulated(_) => None,
        }
    }
}

/// A limit law on `(−|c|, |c|)` including its tilt `1 − λx`.
#[derive(Debug, Clone, PartialEq)]
pub struct TiltedDensity {
    kind: DensityKind,
    context: SpectralContext,
    coin: InitCoin,
    lambda: f64,
}

impl TiltedDensity {
    pub fn new(kind: DensityKind, context: SpectralContext, coin: InitCoin) -> Result<Self> {
        if let DensityKind::TruncGaussian { sigma } = kind {
            if !(sigma > 0.0 && sigma.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "gaussian sigma must be positive, got {sigma}"
                )));
            }
        }
        let lambda = context.tilt_coefficient(&coin);
        let bound = lambda.abs() * context.half_width();
        if bound > 1.0 + 1e-12 {
            return Err(Error::InvalidTilt { lambda, bound });
        }
        Ok(TiltedDensity {
            kind,
            context,
            coin,
            lambda,
        })
    }

    /// Closed form when the weight is a built-in seed for the same angle,
    /// otherwise the general density built from the normalized weight.
    pub fn for_weight(
        spec: &WeightSpec,
        context: SpectralContext,
        coin: InitCoin,
        grid_size: usize,
    ) -> Result<Self> {
        match DensityKind::closed_form_for(&spec.kind) {
            Some(kind) if spec.theta == context.theta() => TiltedDensity::new(kind, context, coin),
            _ => TiltedDensity::general(spec, context, coin, grid_size),
        }
    }

    pub fn general(
        spec: &WeightSpec,
        context: SpectralContext,
        coin: InitCoin,
        grid_size: usize,
    ) -> Result<Self> {
        let f = NormalizedWeight::new(spec.clone(), grid_size)?;
        TiltedDensity::new(DensityKind::General(f), context, coin)
    }

    pub fn kind(&self) -> &DensityKind {
        &self.kind
    }

    pub fn context(&self) -> &SpectralContext {
        &self.context
    }

    pub fn coin(&self) -> &InitCoin {
        &self.coin
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn half_width(&self) -> f64 {
        self.context.half_width()
    }

    /// Density at `x`; fails outside the open support.
    pub fn density(&self, x: f64) -> Result<f64> {
        self.context.check_support(x)?;
        let root = (self.context.c * self.context.c - x * x).sqrt();
        Ok(self.density_times_root(x, root) / root)
    }

    /// Density at `x`, zero outside the open support.
    pub fn pdf(&self, x: f64) -> f64 {
        self.density(x).unwrap_or(0.0)
    }

    // density(x) · √(c² − x²), with the root supplied by the caller so the
    // endpoint substitution x = |c| sin u can pass |c| cos u without
    // cancellation.
    fn density_times_root(&self, x: f64, root: f64) -> f64 {
        let ctx = &self.context;
        let c2 = ctx.c * ctx.c;
        let tilt = 1.0 - self.lambda * x;
        match &self.kind {
            DensityKind::Konno => ctx.f1_times_root(x, &self.coin),
            DensityKind::Semicircle => 2.0 / (PI * c2) * root * root * tilt,
            DensityKind::Arcsine => tilt / PI,
            DensityKind::TruncGaussian { sigma } => {
                let z = (TAU.sqrt() * sigma * erf(ctx.half_width() / (2f64.sqrt() * sigma))).recip();
                z * (-x * x / (2.0 * sigma * sigma)).exp() * root * tilt
            }
            DensityKind::Uniform => root * tilt / (2.0 * ctx.half_width()),
            DensityKind::General(f) => {
                let (eta1, eta2) = etas(f, ctx.kappa_unchecked(x));
                ctx.f1_times_root(x, &self.coin) * eta1
                    + ctx.f2_unchecked(x, &self.coin) * root * eta2
            }
        }
    }

    /// Integrand in `u` after `x = |c| sin u`: `density(x) · |c| cos u`.
    pub fn substituted(&self, u: f64) -> f64 {
        let a = self.half_width();
        let x = a * u.sin();
        let root = a * u.cos();
        if root <= 0.0 {
            return 0.0;
        }
        self.density_times_root(x, root)
    }

    fn u_of(&self, x: f64) -> f64 {
        (x / self.half_width()).clamp(-1.0, 1.0).asin()
    }

    /// `∫_{−|c|}^{x} density`, clamped to `[0, 1]`.
    pub fn cdf(&self, x: f64) -> f64 {
        let a = self.half_width();
        if x <= -a {
            return 0.0;
        }
        if x >= a {
            return 1.0;
        }
        let u = self.u_of(x);
        quad::adaptive(|u| self.substituted(u), -FRAC_PI_2, u, CDF_TOL)
            .map(|r| r.value)
            .unwrap_or(f64::NAN)
            .clamp(0.0, 1.0)
    }

    /// CDF at every point of an ascending slice, accumulated piecewise so
    /// the result is monotone.
    pub fn cdf_sorted(&self, xs: &[f64]) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(xs.len());
        let mut acc = 0.0;
        let mut u_prev = -FRAC_PI_2;
        for &x in xs {
            let u = self.u_of(x);
            if u > u_prev {
                acc += quad::adaptive(|u| self.substituted(u), u_prev, u, CDF_TOL)?.value;
                u_prev = u;
            }
            out.push(acc.clamp(0.0, 1.0));
        }
        Ok(out)
    }

    /// Total mass over the support, by adaptive quadrature.
    pub fn normalization(&self) -> Result<f64> {
        Ok(quad::adaptive_with_breaks(
            |u| self.substituted(u),
            &[-FRAC_PI_2, 0.0, FRAC_PI_2],
            CDF_TOL,
        )?
        .value)
    }
}

/// Two atoms at `−1` and `+1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoPointLaw {
    pub p_minus: f64,
    pub p_plus: f64,
}

/// Limit law at `θ = 0`: mass `|α|²` at `−1` and `|β|²` at `+1`.
pub fn boolean_law(coin: &InitCoin) -> TwoPointLaw {
    TwoPointLaw {
        p_minus: coin.alpha.norm_sqr(),
        p_plus: coin.beta.norm_sqr(),
    }
}
