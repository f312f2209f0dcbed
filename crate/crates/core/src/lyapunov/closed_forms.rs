//! Closed-form minors and multipliers, kept apart from the numeric pipeline so
//! the two can be compared.

use super::p_interval::PCoefficients;
use crate::inertia::InertiaSpectrum;

/// Multipliers making `M1(a,b)` critical for `G3 + m C1 + n C2`.
pub fn g3_multipliers(lam: &InertiaSpectrum, a: f64, b: f64) -> (f64, f64) {
    let m = 2.0 * a * a / (lam.sq_diff(2, 3) * (a * a - b * b));
    (m, -m * b / a)
}

/// Leading minors of the `G3` Hessian at `M1(a,b)` on `(x2, x3, y2, y3)`.
pub fn g3_minors(lam: &InertiaSpectrum, a: f64, b: f64) -> [f64; 4] {
    let (a2, b2) = (a * a, b * b);
    let d = |i, j| lam.sq_diff(i, j);
    let num = a2 * d(1, 2) + b2 * d(2, 3);
    let ab = a2 - b2;
    [
        2.0 * num / (d(1, 3) * d(2, 3) * ab),
        4.0 * a2 * num / (d(1, 3) * d(2, 3).powi(2) * ab * ab),
        8.0 * a2 * a2 * d(1, 2) / (d(1, 3) * d(2, 3).powi(3) * ab * ab),
        16.0 * a2 * a2 * d(1, 2) * d(2, 4) / (d(1, 3) * d(3, 4) * d(2, 3).powi(4) * ab * ab),
    ]
}

/// Leading minors of the `F^p` Hessian at `M1(b,a)` on `(x2, x3, y2, y3)`.
pub fn bifurcation_minors(lam: &InertiaSpectrum, a: f64, b: f64, p: f64) -> [f64; 4] {
    let c = PCoefficients::new(lam, a, b);
    let s = |i, j| lam.sum(i, j);
    let dl = |i, j| lam.diff(i, j);
    let ab = a * a - b * b;
    let (d1p, d2p, g) = (c.d1_prime(p), c.d2_prime(p), c.g(p));
    [
        d1p / (s(1, 3) * s(1, 4) * s(2, 3) * s(3, 4) * ab),
        d1p * d2p
            / (s(1, 2) * (s(1, 3) * s(1, 4) * s(2, 3) * s(3, 4)).powi(2) * ab * ab),
        -d2p * g * dl(1, 2) * dl(3, 4)
            / (s(1, 2) * (s(1, 3) * s(1, 4) * s(2, 3)).powi(3) * s(2, 4) * s(3, 4).powi(2) * ab * ab),
        dl(1, 2) * dl(1, 3) * dl(2, 4) * dl(3, 4) * g * g
            / (s(1, 2)
                * s(1, 3).powi(3)
                * (s(1, 4) * s(2, 3)).powi(4)
                * s(2, 4)
                * s(3, 4).powi(3)
                * ab
                * ab),
    ]
}

/// `g(p1)` in factored form.
pub fn g_at_p1(lam: &InertiaSpectrum, a: f64, b: f64) -> f64 {
    let c = PCoefficients::new(lam, a, b);
    let (a2, b2) = (a * a, b * b);
    let gap = c.s1 / c.t1 - b2 / a2;
    b2 * lam.diff(2, 4) * lam.sq_diff(2, 4) * lam.sq_diff(3, 4) * lam.total().powi(2) * (a2 - b2)
        / (a2 * lam.sum(1, 2) * lam.sq_diff(1, 2) * gap * gap)
}

/// `g(p2)` in factored form.
pub fn g_at_p2(lam: &InertiaSpectrum, a: f64, b: f64) -> f64 {
    let c = PCoefficients::new(lam, a, b);
    let (a2, b2) = (a * a, b * b);
    let gap = c.s2 / c.t2 - b2 / a2;
    b2 * lam.diff(2, 4) * lam.sq_diff(3, 4).powi(2) * lam.total().powi(2) * (a2 - b2)
        / (a2 * lam.sum(1, 2) * lam.sq_diff(1, 3) * gap * gap)
}

/// `p1 - p2` in factored form.
pub fn p1_minus_p2(lam: &InertiaSpectrum, a: f64, b: f64) -> f64 {
    let c = PCoefficients::new(lam, a, b);
    let (a2, b2) = (a * a, b * b);
    let r = b2 / a2;
    lam.diff(2, 3) * lam.diff(2, 4) * lam.sq_diff(3, 4) * lam.total() * (a2 - b2)
        / (a2
            * lam.sq_diff(1, 2)
            * lam.sq_diff(1, 3)
            * lam.sum(1, 2)
            * (c.s1 / c.t1 - r)
            * (c.s2 / c.t2 - r))
}
