//! Exact amplitude evolution of the two-state walk on a finite window of ℤ.
//!
//! The state at time `t` is stored densely: an integer offset for the
//! leftmost cell plus one [`Spinor`] per consecutive lattice site. Each step
//! applies the coin and then shifts the `|0⟩` component one site to the left
//! and the `|1⟩` component one site to the right, so the window grows by one
//! cell on each side.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

/// Amplitude pair over the coin basis `|0⟩`, `|1⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Spinor {
    pub a0: Complex64,
    pub a1: Complex64,
}

impl Spinor {
    pub const ZERO: Spinor = Spinor {
        a0: Complex64::new(0.0, 0.0),
        a1: Complex64::new(0.0, 0.0),
    };

    pub fn new(a0: Complex64, a1: Complex64) -> Self {
        Spinor { a0, a1 }
    }

    /// `|a0|² + |a1|²`
    #[inline]
    pub fn norm_sqr(&self) -> f64 {
        self.a0.norm_sqr() + self.a1.norm_sqr()
    }

    /// `⟨self|other⟩`, antilinear in `self`.
    #[inline]
    pub fn inner(&self, other: &Spinor) -> Complex64 {
        self.a0.conj() * other.a0 + self.a1.conj() * other.a1
    }

    pub fn conj(&self) -> Spinor {
        Spinor::new(self.a0.conj(), self.a1.conj())
    }

    pub fn scale(&self, z: Complex64) -> Spinor {
        Spinor::new(self.a0 * z, self.a1 * z)
    }

    pub fn is_zero(&self) -> bool {
        self.a0 == Complex64::new(0.0, 0.0) && self.a1 == Complex64::new(0.0, 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.a0.is_finite() && self.a1.is_finite()
    }
}

/// Coin angle θ in radians. Stored as given; `cos θ` and `sin θ` are derived
/// on demand.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CoinAngle(pub f64);

impl CoinAngle {
    pub const HADAMARD: CoinAngle = CoinAngle(std::f64::consts::FRAC_PI_4);

    #[inline]
    pub fn radians(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn c(self) -> f64 {
        self.0.cos()
    }

    #[inline]
    pub fn s(self) -> f64 {
        self.0.sin()
    }

    /// True when θ is within `tol` of a multiple of π/2, where the walk is a
    /// pure shift or a pure swap.
    pub fn is_trivial(self, tol: f64) -> bool {
        self.c().abs().min(self.s().abs()) < tol
    }
}

impl From<f64> for CoinAngle {
    fn from(theta: f64) -> Self {
        CoinAngle(theta)
    }
}

/// The coin `U = [[cos θ, sin θ], [sin θ, −cos θ]]` as a complex matrix.
pub fn coin_matrix(theta: CoinAngle) -> [[Complex64; 2]; 2] {
    let (c, s) = (Complex64::from(theta.c()), Complex64::from(theta.s()));
    [[c, s], [s, -c]]
}

#[derive(Debug, Clone, PartialEq)]
pub struct WalkState {
    pub time: u64,
    /// Lattice position of `amplitudes[0]`.
    pub origin_offset: i64,
    pub amplitudes: Vec<Spinor>,
}

impl WalkState {
    pub fn new(time: u64, origin_offset: i64, amplitudes: Vec<Spinor>) -> Self {
        WalkState {
            time,
            origin_offset,
            amplitudes,
        }
    }

    /// Single occupied cell at the origin.
    pub fn localized(spinor: Spinor) -> Self {
        WalkState::new(0, 0, vec![spinor])
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    /// Inclusive position range `(leftmost, rightmost)` of the window.
    pub fn window(&self) -> (i64, i64) {
        (
            self.origin_offset,
            self.origin_offset + self.amplitudes.len() as i64 - 1,
        )
    }

    pub fn amplitude_at(&self, x: i64) -> Spinor {
        let i = x - self.origin_offset;
        if i < 0 {
            return Spinor::ZERO;
        }
        self.amplitudes
            .get(i as usize)
            .copied()
            .unwrap_or(Spinor::ZERO)
    }

    pub fn total_mass(&self) -> f64 {
        self.amplitudes.iter().map(Spinor::norm_sqr).sum()
    }

    /// Removes exactly-zero cells from both ends of the window.
    pub fn trim_zero_margins(&mut self) {
        let Some(first) = self.amplitudes.iter().position(|a| !a.is_zero()) else {
            self.amplitudes.clear();
            return;
        };
        let last = self
            .amplitudes
            .iter()
            .rposition(|a| !a.is_zero())
            .expect("a non-zero cell exists");
        self.amplitudes.truncate(last + 1);
        self.amplitudes.drain(..first);
        self.origin_offset += first as i64;
    }

    pub fn distribution(&self) -> ProbabilityDistribution {
        distribution(self)
    }
}

/// One application of the walk operator.
pub fn step(state: &WalkState, theta: CoinAngle) -> WalkState {
    let mut next = Vec::with_capacity(state.amplitudes.len() + 2);
    step_into(&state.amplitudes, &mut next, theta.c(), theta.s());
    WalkState {
        time: state.time + 1,
        origin_offset: state.origin_offset - 1,
        amplitudes: next,
    }
}

/// `step` applied `steps` times, reusing two buffers.
pub fn evolve(state: &WalkState, theta: CoinAngle, steps: u64) -> WalkState {
    let mut current = state.clone();
    evolve_in_place(&mut current, theta, steps);
    current
}

pub fn evolve_in_place(state: &mut WalkState, theta: CoinAngle, steps: u64) {
    if steps == 0 {
        return;
    }
    let (c, s) = (theta.c(), theta.s());
    let mut scratch = Vec::with_capacity(state.amplitudes.len() + 2 * steps as usize);
    state
        .amplitudes
        .reserve(2 * steps as usize);
    for _ in 0..steps {
        step_into(&state.amplitudes, &mut scratch, c, s);
        std::mem::swap(&mut state.amplitudes, &mut scratch);
    }
    state.time += steps;
    state.origin_offset -= steps as i64;
}

// New cell i sits at position offset - 1 + i. Its |0⟩ part is the projected
// coin output of old cell i (one site to the right), its |1⟩ part that of old
// cell i - 2 (one site to the left).
fn step_into(old: &[Spinor], new: &mut Vec<Spinor>, c: f64, s: f64) {
    new.clear();
    new.resize(old.len() + 2, Spinor::ZERO);
    for (j, a) in old.iter().enumerate() {
        new[j].a0 = a.a0 * c + a.a1 * s;
        new[j + 2].a1 = a.a0 * s - a.a1 * c;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityDistribution {
    pub time: u64,
    pub origin_offset: i64,
    pub probs: Vec<f64>,
}

impl ProbabilityDistribution {
    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn prob_at(&self, x: i64) -> f64 {
        let i = x - self.origin_offset;
        if i < 0 {
            return 0.0;
        }
        self.probs.get(i as usize).copied().unwrap_or(0.0)
    }

    /// `(position, probability)` for every cell of the window.
    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .map(move |(i, &p)| (self.origin_offset + i as i64, p))
    }

    /// Mass on even and odd positions respectively.
    pub fn parity_masses(&self) -> (f64, f64) {
        self.iter().fold((0.0, 0.0), |(even, odd), (x, p)| {
            if x.rem_euclid(2) == 0 {
                (even + p, odd)
            } else {
                (even, odd + p)
            }
        })
    }
}

/// Position distribution `ℙ(X_t = x) = |a0(x)|² + |a1(x)|²`.
pub fn distribution(state: &WalkState) -> ProbabilityDistribution {
    ProbabilityDistribution {
        time: state.time,
        origin_offset: state.origin_offset,
        probs: state.amplitudes.iter().map(Spinor::norm_sqr).collect(),
    }
}

/// Snaps θ to the nearest multiple of π/2 when it is within `tol`, so that
/// degenerate walks built from user input evolve exactly.
pub fn snap_trivial_angle(theta: CoinAngle, tol: f64) -> CoinAngle {
    let quarter = (theta.0 / FRAC_PI_2).round();
    if (theta.0 - quarter * FRAC_PI_2).abs() < tol {
        CoinAngle(quarter * FRAC_PI_2)
    } else {
        theta
    }
}
