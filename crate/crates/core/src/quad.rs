//! Quadrature rules used throughout the crate.
//!
//! Two families are provided. [`adaptive`] is a globally adaptive 15-point
//! Gauss-Kronrod scheme (the QUADPACK QAG strategy), used wherever an
//! integrand is smooth after a change of variables. [`simpson`] is a composite
//! Simpson rule on a uniform grid with optional breakpoints, used where the
//! integrand is smooth on known sub-intervals but has kinks at their ends.

use crate::error::{Error, Result};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

const MAX_INTERVALS: usize = 50_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub abs_error: f64,
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

// Max-heap on the error estimate.
impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Single 15-point Gauss-Kronrod panel with the QUADPACK error heuristic.
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);

    let mut kronrod = f_center * WGK[7];
    let mut gauss = f_center * WG[3];
    let mut res_abs = (f_center * WGK[7]).abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];

    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = 0.5 * kronrod;
    let mut res_asc = WGK[7] * (f_center - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let value = kronrod * half;
    res_abs *= half.abs();
    res_asc *= half.abs();

    let mut error = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }

    Panel { a, b, value, error }
}

/// Globally adaptive Gauss-Kronrod integration of `f` over `[a, b]`.
///
/// Bisects the panel with the largest error estimate until the summed
/// estimate drops below `abs_tol`. Fails with [`Error::Quadrature`] when the
/// subdivision budget runs out or the integrand produces non-finite values.
pub fn adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64) -> Result<Integral> {
    adaptive_with_breaks(f, &[a, b], abs_tol)
}

/// Like [`adaptive`] but seeds the panel list with the given sorted
/// breakpoints (first and last are the integration limits).
pub fn adaptive_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    breaks: &[f64],
    abs_tol: f64,
) -> Result<Integral> {
    if breaks.len() < 2 {
        return Err(Error::InvalidArgument(
            "quadrature needs at least two breakpoints".into(),
        ));
    }
    let mut panels: BinaryHeap<Panel> = breaks
        .windows(2)
        .filter(|w| w[1] != w[0])
        .map(|w| gk15(&f, w[0], w[1]))
        .collect();
    if panels.is_empty() {
        return Ok(Integral {
            value: 0.0,
            abs_error: 0.0,
            intervals: 0,
        });
    }

    // Running sums drift; they only gate the exact re-summation.
    let mut run_value: f64 = panels.iter().map(|p| p.value).sum();
    let mut run_error: f64 = panels.iter().map(|p| p.error).sum();
    loop {
        if !run_value.is_finite() || !run_error.is_finite() {
            return Err(Error::Quadrature {
                value: run_value,
                error: run_error,
            });
        }
        let threshold = |v: f64| abs_tol.max(50.0 * f64::EPSILON * v.abs());
        if run_error <= 2.0 * threshold(run_value) || panels.len() >= MAX_INTERVALS {
            let value: f64 = panels.iter().map(|p| p.value).sum();
            let error: f64 = panels.iter().map(|p| p.error).sum();
            if error <= threshold(value) {
                return Ok(Integral {
                    value,
                    abs_error: error,
                    intervals: panels.len(),
                });
            }
            if panels.len() >= MAX_INTERVALS {
                return Err(Error::Quadrature { value, error });
            }
            run_value = value;
            run_error = error;
        }

        let p = panels.pop().expect("non-empty panel list");
        let mid = 0.5 * (p.a + p.b);
        if mid <= p.a.min(p.b) || mid >= p.a.max(p.b) {
            // panel cannot be split further in floating point
            return Err(Error::Quadrature {
                value: run_value,
                error: run_error,
            });
        }
        let (left, right) = (gk15(&f, p.a, mid), gk15(&f, mid, p.b));
        run_value += left.value + right.value - p.value;
        run_error += left.error + right.error - p.error;
        panels.push(left);
        panels.push(right);
    }
}

/// Composite Simpson rule over `[a, b]` with `intervals` (even, > 0)
/// uniform sub-intervals.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, intervals: usize) -> f64 {
    assert!(
        intervals > 0 && intervals.is_multiple_of(2),
        "Simpson needs an even number of intervals"
    );
    let h = (b - a) / intervals as f64;
    let mut odd = 0.0;
    let mut even = 0.0;
    for i in 1..intervals {
        let v = f(a + h * i as f64);
        if i % 2 == 1 {
            odd += v;
        } else {
            even += v;
        }
    }
    h / 3.0 * (f(a) + f(b) + 4.0 * odd + 2.0 * even)
}

/// Composite Simpson over consecutive sub-intervals delimited by `breaks`,
/// with `intervals_each` (even) uniform sub-intervals per piece.
pub fn simpson_split<F: Fn(f64) -> f64>(f: F, breaks: &[f64], intervals_each: usize) -> f64 {
    breaks
        .windows(2)
        .map(|w| simpson(&f, w[0], w[1], intervals_each))
        .sum()
}
