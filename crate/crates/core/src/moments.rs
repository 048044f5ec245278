//! Moments `E[(X_t/t)^r]` by three independent routes.
//!
//! * simulation: [`empirical_moment`] of an evolved distribution;
//! * position space: [`xspace_moment`], quadrature of a limit density after
//!   `x = |c| sin u`;
//! * momentum space: [`kspace_moment`], the integral over `k ∈ [0, π]` of
//!   `h(k)^r` weighted by the overlaps of `Ψ̂_0(±k)` with the two eigenbranches
//!   of `Û(k)`.
//!
//! The last two agree exactly in the limit (they are related by the change of
//! variables `x = h(k)`), and the first converges to them as `t → ∞`.

use crate::error::{Error, Result};
use crate::initial::InitCoin;
use crate::limit::{NormalizedWeight, SpectralContext, TiltedDensity};
use crate::quad;
use crate::walk::{ProbabilityDistribution, Spinor};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI, TAU};

pub const DEFAULT_MAX_ORDER: u32 = 8;
pub const DEFAULT_KSPACE_GRID: usize = 1 << 15;

const XSPACE_TOL: f64 = 1e-12;

/// `Σ_x (x/t)^r ℙ(X_t = x)`.
pub fn empirical_moment(dist: &ProbabilityDistribution, r: u32) -> Result<f64> {
    if dist.time == 0 {
        return Err(Error::InvalidArgument(
            "empirical moments of X_t/t need t >= 1".into(),
        ));
    }
    let t = dist.time as f64;
    Ok(dist
        .iter()
        .map(|(x, p)| (x as f64 / t).powi(r as i32) * p)
        .sum())
}

/// `∫ x^r density(x) dx` over the support.
pub fn xspace_moment(density: &TiltedDensity, r: u32) -> Result<f64> {
    let a = density.half_width();
    Ok(quad::adaptive_with_breaks(
        |u| (a * u.sin()).powi(r as i32) * density.substituted(u),
        &[-FRAC_PI_2, 0.0, FRAC_PI_2],
        XSPACE_TOL,
    )?
    .value)
}

// |⟨a|b⟩|²
fn overlap(a: &Spinor, b: &Spinor) -> f64 {
    a.inner(b).norm_sqr()
}

/// The two bracketed terms of the momentum-space integrand at `k`:
/// the `h(k)` branch and the `−h(k)` branch (which enters with `(−1)^r`).
fn branch_weights(
    f: &NormalizedWeight,
    ctx: &SpectralContext,
    coin: &InitCoin,
    k: f64,
) -> Result<(f64, f64)> {
    let psi = |k: f64| coin.spinor().scale(Complex64::from(f.eval(k)));
    let (plus, minus) = (psi(k), psi(-k));
    let same = overlap(&ctx.eigenvector_v(k)?, &plus) + overlap(&ctx.eigenvector_v(-k)?, &minus);
    let flipped = overlap(&ctx.eigenvector_v(PI - k)?.conj(), &plus)
        + overlap(&ctx.eigenvector_v(PI + k)?.conj(), &minus);
    Ok((same, flipped))
}

/// Momentum-space moments for every order in `orders` in one sweep, by
/// composite Simpson on `[0, π/2] ∪ [π/2, π]` with `grid_size / 4` intervals
/// per half (the same node spacing as [`crate::initial::weight_norm`]).
pub fn kspace_moments(
    f: &NormalizedWeight,
    ctx: &SpectralContext,
    coin: &InitCoin,
    orders: &[u32],
    grid_size: usize,
) -> Result<Vec<f64>> {
    if grid_size < 64 || !grid_size.is_power_of_two() {
        return Err(Error::InvalidGridSize {
            size: grid_size,
            reason: "must be a power of two >= 64",
        });
    }
    let per_half = grid_size / 4;
    let h = FRAC_PI_2 / per_half as f64;
    let mut sums = vec![0.0; orders.len()];
    for half in 0..2 {
        let start = half as f64 * FRAC_PI_2;
        for i in 0..=per_half {
            let k = start + h * i as f64;
            let w = if i == 0 || i == per_half {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            let (same, flipped) = branch_weights(f, ctx, coin, k)?;
            let vel = ctx.dispersion_h(k);
            for (sum, &r) in sums.iter_mut().zip(orders) {
                let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
                *sum += w * vel.powi(r as i32) * (same + sign * flipped);
            }
        }
    }
    Ok(sums.into_iter().map(|s| s * h / 3.0 / TAU).collect())
}

pub fn kspace_moment(
    f: &NormalizedWeight,
    ctx: &SpectralContext,
    coin: &InitCoin,
    r: u32,
    grid_size: usize,
) -> Result<f64> {
    Ok(kspace_moments(f, ctx, coin, &[r], grid_size)?[0])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub order: u32,
    pub t: u64,
    pub simulated: f64,
    pub xspace: f64,
    pub kspace: f64,
    pub diff_sim_xspace: f64,
    pub diff_sim_kspace: f64,
    pub diff_xspace_kspace: f64,
}

impl MomentReport {
    pub fn new(order: u32, t: u64, simulated: f64, xspace: f64, kspace: f64) -> Self {
        MomentReport {
            order,
            t,
            simulated,
            xspace,
            kspace,
            diff_sim_xspace: (simulated - xspace).abs(),
            diff_sim_kspace: (simulated - kspace).abs(),
            diff_xspace_kspace: (xspace - kspace).abs(),
        }
    }
}

/// One report row per order for a simulated distribution.
pub fn moment_reports(
    dist: &ProbabilityDistribution,
    density: &TiltedDensity,
    f: &NormalizedWeight,
    orders: &[u32],
    grid_size: usize,
) -> Result<Vec<MomentReport>> {
    let kspace = kspace_moments(f, density.context(), density.coin(), orders, grid_size)?;
    orders
        .iter()
        .zip(kspace)
        .map(|(&r, k)| {
            Ok(MomentReport::new(
                r,
                dist.time,
                empirical_moment(dist, r)?,
                xspace_moment(density, r)?,
                k,
            ))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::initial::{Tabulated, WeightKind, WeightSpec};
    use crate::limit::DensityKind;
    use crate::walk::{evolve, CoinAngle, WalkState};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

    fn ctx(theta: f64) -> SpectralContext {
        SpectralContext::new(CoinAngle(theta)).unwrap()
    }

    // Midpoint rule in u with many nodes; independent of the Gauss-Kronrod path.
    fn riemann_moment(density: &TiltedDensity, r: u32, n: usize) -> f64 {
        let a = density.half_width();
        let h = PI / n as f64;
        (0..n)
            .map(|i| {
                let u = -FRAC_PI_2 + h * (i as f64 + 0.5);
                (a * u.sin()).powi(r as i32) * density.substituted(u) * h
            })
            .sum()
    }

    #[test]
    fn empirical_examples() {
        let d = ProbabilityDistribution { time: 3, origin_offset: -1, probs: vec![0.25, 0.5, 0.25] };
        assert_abs_diff_eq!(empirical_moment(&d, 0).unwrap(), 1.0, epsilon = 1e-15);

        let coin = InitCoin::symmetric();
        let d = evolve(&WalkState::localized(coin.spinor()), CoinAngle(0.0), 25).distribution();
        assert_abs_diff_eq!(empirical_moment(&d, 2).unwrap(), 1.0, epsilon = 1e-15);

        let d = evolve(&WalkState::localized(InitCoin::up().spinor()), CoinAngle(FRAC_PI_4), 1).distribution();
        assert_abs_diff_eq!(empirical_moment(&d, 1).unwrap(), 0.0, epsilon = 1e-15);

        let d0 = WalkState::localized(coin.spinor()).distribution();
        assert!(empirical_moment(&d0, 1).is_err());
    }

    #[test]
    fn xspace_known_second_moments() {
        let h = ctx(FRAC_PI_4);
        let c2 = h.c() * h.c();
        let coin = InitCoin::symmetric();
        for (kind, want) in [
            (DensityKind::Semicircle, c2 / 4.0),
            (DensityKind::Arcsine, c2 / 2.0),
            (DensityKind::Uniform, c2 / 3.0),
        ] {
            let d = TiltedDensity::new(kind, h, coin).unwrap();
            let got = xspace_moment(&d, 2).unwrap();
            assert_abs_diff_eq!(got, want, epsilon = 1e-12);
            assert_abs_diff_eq!(riemann_moment(&d, 2, 200_000), want, epsilon = 1e-9);
            assert_abs_diff_eq!(xspace_moment(&d, 0).unwrap(), 1.0, epsilon = 1e-9);
        }
        assert_abs_diff_eq!(
            xspace_moment(&TiltedDensity::new(DensityKind::Semicircle, h, coin).unwrap(), 2).unwrap(),
            0.125,
            epsilon = 1e-12
        );
    }

    #[test]
    fn konno_mean_matches_riemann_oracle() {
        for theta in [FRAC_PI_4, 1.0, 2.2] {
            let h = ctx(theta);
            for coin in [
                InitCoin::up(),
                InitCoin::new(Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)).unwrap(),
                InitCoin::new(Complex64::new(FRAC_1_SQRT_2, 0.0), Complex64::new(FRAC_1_SQRT_2, 0.0)).unwrap(),
            ] {
                let d = TiltedDensity::new(DensityKind::Konno, h, coin).unwrap();
                let oracle = riemann_moment(&d, 1, 400_000);
                let got = xspace_moment(&d, 1).unwrap();
                assert_abs_diff_eq!(got, oracle, epsilon = 1e-9);
                // closed form of the same integral
                assert_abs_diff_eq!(got, -d.lambda() * (1.0 - h.s().abs()), epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn kspace_normalization_and_symmetry() {
        let h = ctx(FRAC_PI_4);
        for kind in [
            WeightKind::Unit,
            WeightKind::Semicircle,
            WeightKind::Arcsine,
            WeightKind::Gaussian { sigma: 0.2 },
            WeightKind::Uniform,
        ] {
            let f = NormalizedWeight::new(WeightSpec::new(kind, CoinAngle(FRAC_PI_4)).unwrap(), 1 << 14).unwrap();
            let m = kspace_moments(&f, &h, &InitCoin::symmetric(), &[0, 1, 3], 1 << 14).unwrap();
            assert_abs_diff_eq!(m[0], 1.0, epsilon = 1e-8);
            assert_abs_diff_eq!(m[1], 0.0, epsilon = 1e-9);
            assert_abs_diff_eq!(m[2], 0.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn kspace_agrees_with_xspace_for_nonsymmetric_weight() {
        // Exercises the η2 / f2 part of the general density, which the
        // built-in seeds never reach.
        let n = 512;
        let samples: Vec<f64> = (0..n)
            .map(|j| {
                let k = -PI + TAU * j as f64 / n as f64;
                1.0 + 0.5 * k.sin() + 0.3 * (2.0 * k).cos() + 0.2 * (3.0 * k).sin() + 0.1 * k.cos()
            })
            .collect();
        for theta in [FRAC_PI_4, 1.0, 2.1] {
            let spec = WeightSpec::new(WeightKind::Tabulated(Tabulated::new(samples.clone()).unwrap()), CoinAngle(theta)).unwrap();
            let h = ctx(theta);
            let coin = InitCoin::new(Complex64::from_polar(0.6, 1.0), Complex64::from_polar(0.8, -0.4)).unwrap();
            let f = NormalizedWeight::new(spec.clone(), 1024).unwrap();
            let d = TiltedDensity::general(&spec, h, coin, 1024).unwrap();
            // The linear interpolant has kinks at every node, so Simpson is
            // only second order here: align the grid with the nodes.
            let ks = kspace_moments(&f, &h, &coin, &[0, 1, 2, 3], 1 << 16).unwrap();
            for (r, k) in ks.iter().enumerate() {
                let x = xspace_moment(&d, r as u32).unwrap();
                assert!((x - k).abs() < 1e-6, "θ={theta} r={r}: x {x} vs k {k}");
            }
        }
    }

    #[test]
    fn report_diffs() {
        let r = MomentReport::new(2, 100, 0.3, 0.25, 0.2500000001);
        assert_abs_diff_eq!(r.diff_sim_xspace, 0.05, epsilon = 1e-15);
        assert_abs_diff_eq!(r.diff_xspace_kspace, 1e-10, epsilon = 1e-15);
    }
}
