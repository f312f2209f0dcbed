use nalgebra::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::inertia::InertiaSpectrum;
use crate::linalg::sort_complex;
use crate::roots::{solve_quadratic, solve_quadratic_with_discriminant, QuadraticRoots};

/// `f̃(t) = S̃ t² + T̃ t + Ũ` and its roots `0 < α1 < α2 <= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FTildeData {
    pub s_tilde: f64,
    pub t_tilde: f64,
    pub u_tilde: f64,
    pub alpha1: f64,
    pub alpha2: f64,
}

impl FTildeData {
    pub fn eval(&self, t: f64) -> f64 {
        (self.s_tilde * t + self.t_tilde) * t + self.u_tilde
    }

    pub fn discriminant(&self) -> f64 {
        self.t_tilde * self.t_tilde - 4.0 * self.s_tilde * self.u_tilde
    }
}

pub fn f_tilde(lam: &InertiaSpectrum) -> FTildeData {
    let d = |i, j| lam.sq_diff(i, j);
    let s_tilde = d(1, 4) * d(1, 4);
    let u_tilde = d(2, 3) * d(2, 3);
    let t_tilde = -2.0 * (d(1, 2) * d(3, 4) + d(1, 3) * d(2, 4));
    let (alpha1, alpha2) = match solve_quadratic(s_tilde, t_tilde, u_tilde) {
        QuadraticRoots::Real { lo, hi } => (lo, hi),
        // Discriminant is 16 (λ1²-λ2²)(λ1²-λ3²)(λ2²-λ4²)(λ3²-λ4²) > 0.
        QuadraticRoots::Complex { re, .. } => (re, re),
    };
    FTildeData { s_tilde, t_tilde, u_tilde, alpha1, alpha2 }
}

/// Characteristic data `u t⁴ + v t² + w` of the linearization at `M1(b,a)`
/// restricted to the orbit, with the auxiliary quantities `S, T, E1, E2`
/// and the discriminant `Δ` of `u s² + v s + w` in closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CharQuartic {
    pub u: f64,
    pub v: f64,
    pub w: f64,
    pub s: f64,
    pub t: f64,
    pub e1: f64,
    pub e2: f64,
    pub delta: f64,
}

impl CharQuartic {
    /// `S / T`; lies in `[α1, α2]`.
    pub fn s_over_t(&self) -> f64 {
        self.s / self.t
    }

    /// `v² - 4uw`, the discriminant computed from the coefficients.
    pub fn delta_from_coefficients(&self) -> f64 {
        self.v * self.v - 4.0 * self.u * self.w
    }

    /// Roots of `u s² + v s + w`.
    pub fn s_roots(&self) -> [Complex<f64>; 2] {
        if self.w == 0.0 {
            return [Complex::new(0.0, 0.0), Complex::new(-self.v / self.u, 0.0)];
        }
        // The closed-form Δ carries the exact sign (it vanishes identically
        // when λ1λ4 = λ2λ3), so it is used in place of v² - 4uw.
        match solve_quadratic_with_discriminant(self.u, self.v, self.w, self.delta) {
            QuadraticRoots::Real { lo, hi } => [Complex::new(lo, 0.0), Complex::new(hi, 0.0)],
            QuadraticRoots::Complex { re, im } => [Complex::new(re, im), Complex::new(re, -im)],
        }
    }

    /// The four roots `t = ±√s`, sorted by real then imaginary part.
    pub fn roots(&self) -> [Complex<f64>; 4] {
        let [s1, s2] = self.s_roots();
        let (t1, t2) = (s1.sqrt(), s2.sqrt());
        let mut out = [t1, -t1, t2, -t2];
        sort_complex(&mut out);
        out
    }
}

/// Closed-form characteristic data at `M1(b,a)` on the orbit of `(a, b)`.
pub fn char_quartic(lam: &InertiaSpectrum, a: f64, b: f64) -> Result<CharQuartic> {
    if !(a.is_finite() && b.is_finite()) || a == 0.0 || a.abs() == b.abs() {
        return Err(Error::DegenerateParameters(format!(
            "characteristic quartic needs a != 0 and a != ±b, got a = {a}, b = {b}"
        )));
    }
    let l = |i| lam.l(i);
    let s14 = lam.sum(1, 4);
    let s23 = lam.sum(2, 3);
    let (a2, b2) = (a * a, b * b);

    let u = lam.sum(1, 2) * lam.sum(1, 3) * s14.powi(4) * s23.powi(4) * lam.sum(2, 4) * lam.sum(3, 4);
    let bracket = s23 * s23 * a2 - s14 * s14 * b2;
    let w = lam.diff(1, 2) * lam.diff(1, 3) * lam.diff(2, 4) * lam.diff(3, 4) * bracket * bracket;
    let e2 = -(l(2) * l(2) + l(1) * l(4)) * (l(3) * l(3) + l(1) * l(4)) + l(2) * l(3) * s14 * s14;
    let e1 = (l(1) * l(1) + l(2) * l(3)) * (l(4) * l(4) + l(2) * l(3)) - l(1) * l(4) * s23 * s23;
    let s = s23 * s23 * e2;
    let t = s14 * s14 * e1;
    // v = -2 (λ1+λ4)² (λ2+λ3)² a² T (S/T - b²/a²), without the division.
    let v = -2.0 * s14 * s14 * s23 * s23 * (a2 * s - b2 * t);
    let ft = f_tilde(lam);
    let delta = 4.0 * s14.powi(6) * s23.powi(6) * lam.product_gap().powi(2) * a2 * a2 * ft.eval(b2 / a2);
    Ok(CharQuartic { u, v, w, s, t, e1, e2, delta })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_f_tilde() {
        let ft = f_tilde(&InertiaSpectrum::reference());
        assert_eq!((ft.s_tilde, ft.u_tilde, ft.t_tilde), (225.0, 25.0, -234.0));
        let d = 32256.0_f64.sqrt();
        assert!((ft.alpha1 - (234.0 - d) / 450.0).abs() < 1e-15);
        assert!((ft.alpha2 - (234.0 + d) / 450.0).abs() < 1e-15);
        assert!((ft.alpha1 - 0.1209).abs() < 1e-4 && (ft.alpha2 - 0.9191).abs() < 1e-4);
    }

    #[test]
    fn discriminant_factorization() {
        let lam = InertiaSpectrum::new(5.0, 2.5, 1.0, -0.3).unwrap();
        let ft = f_tilde(&lam);
        let d = |i, j| lam.sq_diff(i, j);
        let factored = 16.0 * d(1, 2) * d(1, 3) * d(2, 4) * d(3, 4);
        assert!((ft.discriminant() - factored).abs() <= 1e-12 * factored);
    }

    #[test]
    fn alpha2_is_one_when_square_sums_balance() {
        // 8² + 1² = 7² + 4²
        let lam = InertiaSpectrum::new(8.0, 7.0, 4.0, 1.0).unwrap();
        let ft = f_tilde(&lam);
        assert_eq!(ft.eval(1.0), 0.0);
        assert!((ft.alpha2 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn reference_notations() {
        let q = char_quartic(&InertiaSpectrum::reference(), 3.0, 1.0).unwrap();
        assert_eq!((q.e1, q.e2, q.s, q.t), (54.0, 46.0, 1150.0, 1350.0));
        assert!((q.s_over_t() - 23.0 / 27.0).abs() < 1e-15);
        let ft = f_tilde(&InertiaSpectrum::reference());
        assert!(ft.alpha1 <= q.s_over_t() && q.s_over_t() <= ft.alpha2);
    }

    #[test]
    fn w_vanishes_on_its_locus() {
        // (λ2+λ3)² a² = (λ1+λ4)² b² with λ = (6, 3, 2, 1): b/a = 5/7.
        let lam = InertiaSpectrum::new(6.0, 3.0, 2.0, 1.0).unwrap();
        let q = char_quartic(&lam, 7.0, 5.0).unwrap();
        assert_eq!(q.w, 0.0);
        assert!(char_quartic(&lam, 7.0, 4.0).unwrap().w > 0.0);
    }

    #[test]
    fn rejects_degenerate_parameters() {
        let lam = InertiaSpectrum::reference();
        assert!(char_quartic(&lam, 0.0, 1.0).is_err());
        assert!(char_quartic(&lam, 1.0, -1.0).is_err());
    }

    #[test]
    fn roots_solve_the_quartic() {
        let q = char_quartic(&InertiaSpectrum::reference(), 1.0, 0.6).unwrap();
        for t in q.roots() {
            let t2 = t * t;
            let p = t2 * t2 * q.u + t2 * q.v + q.w;
            assert!(p.norm() <= 1e-10 * (q.u * t2.norm() * t2.norm() + q.v.abs() * t2.norm() + q.w));
        }
    }
}
