use serde::Serialize;

use crate::error::{Error, Result};

/// The four moments `λ1 > λ2 > λ3 > λ4` of a generic `so(4)` rigid body.
///
/// Pairwise sums `λi + λj` are strictly positive, so the body frame angular
/// velocity and momentum determine each other.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InertiaSpectrum {
    lambda: [f64; 4],
}

impl InertiaSpectrum {
    pub fn new(l1: f64, l2: f64, l3: f64, l4: f64) -> Result<Self> {
        Self::from_array([l1, l2, l3, l4])
    }

    pub fn from_array(lambda: [f64; 4]) -> Result<Self> {
        if lambda.iter().any(|l| !l.is_finite()) {
            return Err(Error::InvalidSpectrum(format!("non-finite moment in {lambda:?}")));
        }
        if !(lambda[0] > lambda[1] && lambda[1] > lambda[2] && lambda[2] > lambda[3]) {
            return Err(Error::InvalidSpectrum(format!(
                "moments must be strictly decreasing, got {lambda:?}"
            )));
        }
        for i in 0..4 {
            for j in (i + 1)..4 {
                if lambda[i] + lambda[j] <= 0.0 {
                    return Err(Error::InvalidSpectrum(format!(
                        "pair sum lambda{} + lambda{} = {} is not positive",
                        i + 1,
                        j + 1,
                        lambda[i] + lambda[j]
                    )));
                }
            }
        }
        Ok(Self { lambda })
    }

    /// The test spectrum `(4, 3, 2, 1)` used throughout the docs.
    pub fn reference() -> Self {
        Self { lambda: [4.0, 3.0, 2.0, 1.0] }
    }

    pub fn as_array(&self) -> [f64; 4] {
        self.lambda
    }

    /// One-based access: `l(1)` is `λ1`.
    #[inline]
    pub fn l(&self, i: usize) -> f64 {
        self.lambda[i - 1]
    }

    /// `λi + λj`, one-based.
    #[inline]
    pub fn sum(&self, i: usize, j: usize) -> f64 {
        self.l(i) + self.l(j)
    }

    /// `λi - λj`, one-based.
    #[inline]
    pub fn diff(&self, i: usize, j: usize) -> f64 {
        self.l(i) - self.l(j)
    }

    /// `λi² - λj²`, one-based.
    #[inline]
    pub fn sq_diff(&self, i: usize, j: usize) -> f64 {
        self.l(i) * self.l(i) - self.l(j) * self.l(j)
    }

    /// `λ1 + λ2 + λ3 + λ4`.
    pub fn total(&self) -> f64 {
        self.lambda.iter().sum()
    }

    /// Pair sums attached to the coordinates `(x1, x2, x3, y1, y2, y3)`:
    /// `(λ2+λ3, λ1+λ3, λ1+λ2, λ1+λ4, λ2+λ4, λ3+λ4)`.
    pub fn coordinate_pair_sums(&self) -> [f64; 6] {
        [
            self.sum(2, 3),
            self.sum(1, 3),
            self.sum(1, 2),
            self.sum(1, 4),
            self.sum(2, 4),
            self.sum(3, 4),
        ]
    }

    /// `λ1² + λ4² - λ2² - λ3²`; its sign splits the Lyapunov analysis of the
    /// bifurcating equilibria into two cases.
    pub fn square_sum_gap(&self) -> f64 {
        let s = |i| self.l(i) * self.l(i);
        s(1) + s(4) - s(2) - s(3)
    }

    /// `λ1 λ4 - λ2 λ3`; it vanishes exactly in the degenerate spectral case.
    pub fn product_gap(&self) -> f64 {
        self.l(1) * self.l(4) - self.l(2) * self.l(3)
    }
}
