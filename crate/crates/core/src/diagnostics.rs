//! Agreement between finite-time distributions and limit laws.

use crate::error::{Error, Result};
use crate::limit::{TiltedDensity, TwoPointLaw};
use crate::moments::{empirical_moment, xspace_moment};
use crate::walk::{evolve_in_place, CoinAngle, ProbabilityDistribution, WalkState};
use serde::{Deserialize, Serialize};

/// Below this mass a parity class counts as unoccupied.
pub const PARITY_THRESHOLD: f64 = 1e-6;

/// Kolmogorov-Smirnov distance between the law of `X_t / t` and a limit law.
///
/// The empirical CDF is right-continuous and jumps only at occupied sites;
/// the supremum is taken over those jump points, so exact-zero cells never
/// change the result.
pub fn ks_distance(dist: &ProbabilityDistribution, density: &TiltedDensity) -> Result<f64> {
    if dist.time == 0 {
        return Err(Error::InvalidArgument(
            "KS distance of X_t/t needs t >= 1".into(),
        ));
    }
    let t = dist.time as f64;
    let (ys, ecdf): (Vec<f64>, Vec<f64>) = dist
        .iter()
        .filter(|&(_, p)| p > 0.0)
        .scan(0.0, |acc, (x, p)| {
            *acc += p;
            Some((x as f64 / t, *acc))
        })
        .unzip();
    let cdf = density.cdf_sorted(&ys)?;
    Ok(ecdf
        .iter()
        .zip(&cdf)
        .map(|(e, f)| (e - f).abs())
        .fold(0.0, f64::max)
        .clamp(0.0, 1.0))
}

/// Atom-wise distance to a two-point law at `±1`: the largest of the two
/// atom errors and the mass found anywhere else.
pub fn two_point_distance(dist: &ProbabilityDistribution, law: &TwoPointLaw) -> f64 {
    let t = dist.time as i64;
    let minus = dist.prob_at(-t);
    let plus = dist.prob_at(t);
    let elsewhere: f64 = dist
        .iter()
        .filter(|&(x, _)| x != t && x != -t)
        .map(|(_, p)| p)
        .sum();
    (minus - law.p_minus)
        .abs()
        .max((plus - law.p_plus).abs())
        .max(elsewhere)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverlayRow {
    /// Bin center in rescaled units `x / t`.
    pub x: f64,
    pub simulated: f64,
    pub limit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityOverlay {
    /// Spacing of occupied sites in rescaled units: `2/t` when only one
    /// parity class carries mass, `1/t` otherwise.
    pub site_spacing: f64,
    /// Bin width actually used, a whole multiple of `site_spacing`.
    pub bin_width: f64,
    pub rows: Vec<OverlayRow>,
}

impl DensityOverlay {
    /// `Σ simulated · bin_width`
    pub fn integral(&self) -> f64 {
        self.rows.iter().map(|r| r.simulated).sum::<f64>() * self.bin_width
    }
}

/// Rescaled histogram of `X_t / t` next to the limit density.
///
/// Bins hold a whole number of occupied sites; `bin_width` is rounded to the
/// nearest such multiple (at least one site).
pub fn density_overlay(
    dist: &ProbabilityDistribution,
    density: &TiltedDensity,
    bin_width: f64,
) -> Result<DensityOverlay> {
    if dist.time == 0 {
        return Err(Error::InvalidArgument("overlay needs t >= 1".into()));
    }
    let t = dist.time as f64;
    if !(bin_width >= 2.0 / t - 1e-12) {
        return Err(Error::InvalidArgument(format!(
            "bin width {bin_width} below the minimum 2/t = {}",
            2.0 / t
        )));
    }

    let (even, odd) = dist.parity_masses();
    let stride: i64 = if even.min(odd) < PARITY_THRESHOLD { 2 } else { 1 };
    let sites_per_bin = ((bin_width * t / stride as f64).round() as i64).max(1);
    let span = sites_per_bin * stride;

    let left = dist.origin_offset;
    let first = match stride {
        2 => {
            let occupied_parity = if even >= odd { 0 } else { 1 };
            if left.rem_euclid(2) == occupied_parity {
                left
            } else {
                left - 1
            }
        }
        _ => left,
    };
    let right = dist.origin_offset + dist.probs.len() as i64 - 1;
    let bins = ((right - first) / span + 1).max(0) as usize;

    let mut mass = vec![0.0; bins];
    for (x, p) in dist.iter() {
        mass[((x - first) / span) as usize] += p;
    }

    let width = span as f64 / t;
    let rows = mass
        .into_iter()
        .enumerate()
        .map(|(b, m)| {
            let lo = first + b as i64 * span;
            let center = (lo as f64 + (sites_per_bin - 1) as f64 * stride as f64 / 2.0) / t;
            OverlayRow {
                x: center,
                simulated: m / width,
                limit: density.pdf(center),
            }
        })
        .collect();
    Ok(DensityOverlay {
        site_spacing: stride as f64 / t,
        bin_width: width,
        rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentError {
    pub t: u64,
    pub order: u32,
    pub error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    /// Slope of `log(error)` against `log(t)`.
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fit in log space.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub t_values: Vec<u64>,
    pub ks: Vec<f64>,
    pub moment_errors: Vec<MomentError>,
    pub rate: Option<RateFit>,
}

/// Least-squares fit of `log(error) = slope · log(t) + intercept`.
pub fn fit_power_law(points: &[(u64, f64)]) -> Result<RateFit> {
    if points.len() < 3 {
        return Err(Error::TooFewPoints(points.len()));
    }
    if let Some(&(t, error)) = points.iter().find(|&&(t, e)| !(e > 0.0) || t == 0) {
        return Err(Error::DegenerateFit { t, error });
    }
    let n = points.len() as f64;
    let (xs, ys): (Vec<f64>, Vec<f64>) = points
        .iter()
        .map(|&(t, e)| ((t as f64).ln(), e.ln()))
        .unzip();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument(
            "rate fit needs distinct step counts".into(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - slope * x - intercept).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(RateFit {
        slope,
        intercept,
        residual,
    })
}

/// Fits the decay of the second-moment error over the report's step counts.
pub fn rate_fit(report: &ConvergenceReport) -> Result<RateFit> {
    let points: Vec<(u64, f64)> = report
        .moment_errors
        .iter()
        .filter(|m| m.order == 2)
        .map(|m| (m.t, m.error))
        .collect();
    fit_power_law(&points)
}

/// Evolves `initial` through the ascending `t_values`, recording the KS
/// distance and the moment errors against `density` at each, then fits the
/// error decay when there are at least three step counts.
pub fn convergence_study(
    initial: &WalkState,
    theta: CoinAngle,
    density: &TiltedDensity,
    t_values: &[u64],
    orders: &[u32],
) -> Result<ConvergenceReport> {
    if t_values.is_empty() || t_values.windows(2).any(|w| w[1] <= w[0]) || t_values[0] == 0 {
        return Err(Error::InvalidArgument(
            "step counts must be positive and strictly ascending".into(),
        ));
    }
    let limits: Vec<f64> = orders
        .iter()
        .map(|&r| xspace_moment(density, r))
        .collect::<Result<_>>()?;

    let mut state = initial.clone();
    let mut ks = Vec::with_capacity(t_values.len());
    let mut moment_errors = Vec::new();
    let start = state.time;
    for &t in t_values {
        let steps = t - (state.time - start);
        evolve_in_place(&mut state, theta, steps);
        let dist = state.distribution();
        ks.push(ks_distance(&dist, density)?);
        for (&r, &limit) in orders.iter().zip(&limits) {
            moment_errors.push(MomentError {
                t: dist.time,
                order: r,
                error: (empirical_moment(&dist, r)? - limit).abs(),
            });
        }
    }
    let mut report = ConvergenceReport {
        t_values: t_values.to_vec(),
        ks,
        moment_errors,
        rate: None,
    };
    if t_values.len() >= 3 && orders.contains(&2) {
        report.rate = rate_fit(&report).ok();
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::initial::InitCoin;
    use crate::limit::{boolean_law, DensityKind, SpectralContext};
    use crate::walk::{evolve, WalkState};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_4;

    fn uniform(theta: f64) -> TiltedDensity {
        TiltedDensity::new(
            DensityKind::Uniform,
            SpectralContext::new(CoinAngle(theta)).unwrap(),
            InitCoin::symmetric(),
        )
        .unwrap()
    }

    #[test]
    fn ks_of_discretized_limit_is_small() {
        // Lattice distribution whose cell masses are exact CDF increments.
        let d = uniform(FRAC_PI_4);
        let t = 1000u64;
        let a = d.half_width();
        let n = t as i64;
        let probs: Vec<f64> = (-n..=n)
            .map(|x| {
                let y = x as f64 / t as f64;
                d.cdf(y + 0.5 / t as f64) - d.cdf(y - 0.5 / t as f64)
            })
            .collect();
        let dist = ProbabilityDistribution { time: t, origin_offset: -n, probs };
        let ks = ks_distance(&dist, &d).unwrap();
        assert!(ks <= 1.0 / t as f64 + 1e-9, "{ks}");
        assert!(a > 0.0);
    }

    #[test]
    fn ks_ignores_zero_margins() {
        let s = evolve(&WalkState::localized(InitCoin::symmetric().spinor()), CoinAngle(FRAC_PI_4), 200);
        let d = TiltedDensity::new(
            DensityKind::Konno,
            SpectralContext::new(CoinAngle(FRAC_PI_4)).unwrap(),
            InitCoin::symmetric(),
        )
        .unwrap();
        let dist = s.distribution();
        let mut padded = dist.clone();
        padded.origin_offset -= 7;
        padded.probs.splice(0..0, std::iter::repeat_n(0.0, 7));
        padded.probs.extend(std::iter::repeat_n(0.0, 11));
        let (a, b) = (ks_distance(&dist, &d).unwrap(), ks_distance(&padded, &d).unwrap());
        assert_eq!(a, b);
        assert!(a > 0.0 && a < 0.1);
    }

    #[test]
    fn two_point_law_matches_theta_zero_walk() {
        let coin = InitCoin::symmetric();
        let dist = evolve(&WalkState::localized(coin.spinor()), CoinAngle(0.0), 50).distribution();
        assert_eq!(two_point_distance(&dist, &boolean_law(&coin)), 0.0);
        let wrong = TwoPointLaw { p_minus: 1.0, p_plus: 0.0 };
        assert_abs_diff_eq!(two_point_distance(&dist, &wrong), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn overlay_parity_and_normalization() {
        let theta = CoinAngle(FRAC_PI_4);
        let t = 301;
        let dist = evolve(&WalkState::localized(InitCoin::symmetric().spinor()), theta, t).distribution();
        let d = TiltedDensity::new(
            DensityKind::Konno,
            SpectralContext::new(theta).unwrap(),
            InitCoin::symmetric(),
        )
        .unwrap();
        let o = density_overlay(&dist, &d, 2.0 / t as f64).unwrap();
        assert_abs_diff_eq!(o.site_spacing, 2.0 / t as f64, epsilon = 1e-15);
        assert_abs_diff_eq!(o.bin_width, 2.0 / t as f64, epsilon = 1e-15);
        assert_abs_diff_eq!(o.integral(), 1.0, epsilon = 1e-9);
        // one occupied site per bin, centered on it
        for row in &o.rows {
            let x = (row.x * t as f64).round() as i64;
            assert_eq!((x + t as i64).rem_euclid(2), 0);
            assert_abs_diff_eq!(row.simulated, dist.prob_at(x) * t as f64 / 2.0, epsilon = 1e-12);
        }

        let wide = density_overlay(&dist, &d, 0.05).unwrap();
        assert_abs_diff_eq!(wide.integral(), 1.0, epsilon = 1e-9);
        assert!(density_overlay(&dist, &d, 1.0 / t as f64).is_err());
    }

    #[test]
    fn overlay_uses_both_parities_when_occupied() {
        let t = 10;
        let probs = vec![0.05; 20];
        let dist = ProbabilityDistribution { time: t, origin_offset: -10, probs };
        let o = density_overlay(&dist, &uniform(1.0), 0.2).unwrap();
        assert_abs_diff_eq!(o.site_spacing, 0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(o.bin_width, 0.2, epsilon = 1e-15);
        assert_eq!(o.rows.len(), 10);
        assert_abs_diff_eq!(o.integral(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn power_law_fits() {
        let ts = [100u64, 200, 400, 800, 1600];
        let inv: Vec<(u64, f64)> = ts.iter().map(|&t| (t, 3.0 / t as f64)).collect();
        let fit = fit_power_law(&inv).unwrap();
        assert_abs_diff_eq!(fit.slope, -1.0, epsilon = 1e-12);
        assert!(fit.residual < 1e-12);
        let sqrt: Vec<(u64, f64)> = ts.iter().map(|&t| (t, 0.7 / (t as f64).sqrt())).collect();
        assert_abs_diff_eq!(fit_power_law(&sqrt).unwrap().slope, -0.5, epsilon = 1e-12);
    }

    #[test]
    fn rate_fit_errors() {
        assert!(matches!(fit_power_law(&[(1, 1.0), (2, 0.5)]), Err(Error::TooFewPoints(2))));
        assert!(matches!(
            fit_power_law(&[(1, 1.0), (2, 0.0), (4, 0.1)]),
            Err(Error::DegenerateFit { t: 2, .. })
        ));
        let report = ConvergenceReport {
            t_values: vec![10, 20, 40],
            ks: vec![0.1, 0.05, 0.02],
            moment_errors: [10u64, 20, 40]
                .iter()
                .map(|&t| MomentError { t, order: 2, error: 1.0 / t as f64 })
                .collect(),
            rate: None,
        };
        assert_abs_diff_eq!(rate_fit(&report).unwrap().slope, -1.0, epsilon = 1e-12);
    }

    #[test]
    fn convergence_study_on_konno_walk() {
        let theta = CoinAngle(FRAC_PI_4);
        let coin = InitCoin::symmetric();
        let d = TiltedDensity::new(DensityKind::Konno, SpectralContext::new(theta).unwrap(), coin).unwrap();
        let report = convergence_study(
            &WalkState::localized(coin.spinor()),
            theta,
            &d,
            &[100, 200, 400, 800],
            &[1, 2],
        )
        .unwrap();
        assert_eq!(report.ks.len(), 4);
        assert!(report.ks.iter().all(|k| (0.0..=1.0).contains(k)));
        assert!(report.ks[3] < report.ks[0]);
        let fit = report.rate.expect("four points give a fit");
        assert!(fit.slope < 0.0, "{fit:?}");
        assert!(convergence_study(&WalkState::localized(coin.spinor()), theta, &d, &[10, 5], &[2]).is_err());
    }
}
