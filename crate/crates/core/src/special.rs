//! Error function.

/// Gauss error function `erf(x) = 2/√π ∫_0^x e^{−t²} dt`.
pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    // erf(x) = 2/√π · e^{−x²} · Σ_n 2^n x^{2n+1} / (1·3·…·(2n+1)).
    // All terms are positive, so the sum has no cancellation.
    fn erf_series(x: f64) -> f64 {
        let mut term = x;
        let mut sum = x;
        let mut n = 0u32;
        while term > 1e-18 * sum || n < 10 {
            n += 1;
            term *= 2.0 * x * x / (2 * n + 1) as f64;
            sum += term;
        }
        2.0 / std::f64::consts::PI.sqrt() * (-x * x).exp() * sum
    }

    #[test]
    fn agrees_with_series_oracle() {
        for i in 0..=600 {
            let x = i as f64 * 0.01;
            let want = erf_series(x);
            assert!((erf(x) - want).abs() < 1e-12, "x = {x}: {} vs {want}", erf(x));
            assert!((erf(-x) + want).abs() < 1e-12);
        }
    }

    #[test]
    fn reference_values() {
        assert_eq!(erf(0.0), 0.0);
        assert!((erf(0.5) - 0.5204998778).abs() < 1e-10);
        for x in [8.0, 12.0, 20.0] {
            assert!((erf(x) - 1.0).abs() < 1e-12);
        }
    }
}
