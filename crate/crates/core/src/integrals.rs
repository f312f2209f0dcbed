//! The conserved quantities of the `so(4)` free rigid body.
//!
//! Every integral here is a quadratic form that is diagonal in the
//! coordinates except for the Pfaffian Casimir `C2 = x·y`, so all of them
//! (and their linear combinations) are represented by [`QuadraticForm`].

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::Matrix6;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::inertia::InertiaSpectrum;
use crate::state::So4State;

/// `Σ diag[k] z[k]² + cross · Σ x[i] y[i]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct QuadraticForm {
    pub diag: [f64; 6],
    pub cross: f64,
}

impl QuadraticForm {
    pub fn value(&self, m: &So4State) -> f64 {
        let diag: f64 = (0..6).map(|k| self.diag[k] * m[k] * m[k]).sum();
        let xy: f64 = (0..3).map(|i| m[i] * m[i + 3]).sum();
        diag + self.cross * xy
    }

    pub fn gradient(&self, m: &So4State) -> So4State {
        let swapped = m.swapped();
        m.map(|k, v| 2.0 * self.diag[k] * v + self.cross * swapped[k])
    }

    /// The (constant) Hessian.
    pub fn hessian(&self) -> Matrix6<f64> {
        let mut h = Matrix6::zeros();
        for k in 0..6 {
            h[(k, k)] = 2.0 * self.diag[k];
        }
        for i in 0..3 {
            h[(i, i + 3)] = self.cross;
            h[(i + 3, i)] = self.cross;
        }
        h
    }

    /// Sum of the magnitudes of the terms in [`value`](Self::value); the
    /// tolerance scale for identities between forms.
    pub fn magnitude(&self, m: &So4State) -> f64 {
        let diag: f64 = (0..6).map(|k| (self.diag[k] * m[k] * m[k]).abs()).sum();
        let xy: f64 = (0..3).map(|i| (m[i] * m[i + 3]).abs()).sum();
        diag + self.cross.abs() * xy
    }
}

impl Add for QuadraticForm {
    type Output = QuadraticForm;
    fn add(self, rhs: QuadraticForm) -> QuadraticForm {
        let mut diag = self.diag;
        for (d, r) in diag.iter_mut().zip(rhs.diag) {
            *d += r;
        }
        QuadraticForm { diag, cross: self.cross + rhs.cross }
    }
}

impl Sub for QuadraticForm {
    type Output = QuadraticForm;
    fn sub(self, rhs: QuadraticForm) -> QuadraticForm {
        self + rhs * -1.0
    }
}

impl Mul<f64> for QuadraticForm {
    type Output = QuadraticForm;
    fn mul(self, k: f64) -> QuadraticForm {
        QuadraticForm { diag: self.diag.map(|d| d * k), cross: self.cross * k }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum IntegralId {
    H,
    C1,
    C2,
    I,
    G1,
    G2,
    G3,
    G4,
}

impl IntegralId {
    pub const ALL: [IntegralId; 8] = [
        IntegralId::H,
        IntegralId::C1,
        IntegralId::C2,
        IntegralId::I,
        IntegralId::G1,
        IntegralId::G2,
        IntegralId::G3,
        IntegralId::G4,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            IntegralId::H => "H",
            IntegralId::C1 => "C1",
            IntegralId::C2 => "C2",
            IntegralId::I => "I",
            IntegralId::G1 => "G1",
            IntegralId::G2 => "G2",
            IntegralId::G3 => "G3",
            IntegralId::G4 => "G4",
        }
    }

    pub fn form(&self, lam: &InertiaSpectrum) -> QuadraticForm {
        let sq = |i: usize| lam.l(i) * lam.l(i);
        let d = |i: usize, j: usize| lam.sq_diff(i, j);
        let diag = match self {
            IntegralId::H => lam.coordinate_pair_sums().map(|s| 0.5 / s),
            IntegralId::C1 => [0.5; 6],
            IntegralId::C2 => return QuadraticForm { diag: [0.0; 6], cross: 1.0 },
            IntegralId::I => [
                sq(2) + sq(3),
                sq(1) + sq(3),
                sq(1) + sq(2),
                sq(1) + sq(4),
                sq(2) + sq(4),
                sq(3) + sq(4),
            ],
            IntegralId::G1 => [0.0, 1.0 / d(1, 3), 1.0 / d(1, 2), 1.0 / d(1, 4), 0.0, 0.0],
            IntegralId::G2 => [1.0 / d(2, 3), 0.0, 1.0 / d(2, 1), 0.0, 1.0 / d(2, 4), 0.0],
            IntegralId::G3 => [1.0 / d(3, 2), 1.0 / d(3, 1), 0.0, 0.0, 0.0, 1.0 / d(3, 4)],
            IntegralId::G4 => [0.0, 0.0, 0.0, 1.0 / d(4, 1), 1.0 / d(4, 2), 1.0 / d(4, 3)],
        };
        QuadraticForm { diag, cross: 0.0 }
    }
}

impl fmt::Display for IntegralId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for IntegralId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        IntegralId::ALL
            .into_iter()
            .find(|id| id.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown integral {s:?}")))
    }
}

pub fn integral_value(id: IntegralId, m: &So4State, lam: &InertiaSpectrum) -> f64 {
    id.form(lam).value(m)
}

pub fn integral_gradient(id: IntegralId, m: &So4State, lam: &InertiaSpectrum) -> So4State {
    id.form(lam).gradient(m)
}

/// `½ Tr(M [A, B])` for coordinate gradients `a`, `b`.
pub fn bracket_of_gradients(m: &So4State, a: &So4State, b: &So4State) -> f64 {
    let (mm, ma, mb) = (m.to_matrix(), a.to_matrix(), b.to_matrix());
    0.5 * (mm * (ma * mb - mb * ma)).trace()
}

/// Minus Lie–Poisson bracket `{F, G}(M) = ½ Tr(M [∇F, ∇G])`.
pub fn poisson_bracket(f: IntegralId, g: IntegralId, m: &So4State, lam: &InertiaSpectrum) -> f64 {
    bracket_of_gradients(m, &integral_gradient(f, m, lam), &integral_gradient(g, m, lam))
}

/// Tolerance scale for a bracket: `‖M‖ ‖∇F‖ ‖∇G‖`.
pub fn bracket_scale(m: &So4State, a: &So4State, b: &So4State) -> f64 {
    m.norm() * a.norm() * b.norm()
}

/// Coefficients with `G_k = μ1 H + μ2 I + m' C1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PopovDecomposition {
    pub mu1: f64,
    pub mu2: f64,
    pub m_prime: f64,
}

impl PopovDecomposition {
    pub fn form(&self, lam: &InertiaSpectrum) -> QuadraticForm {
        IntegralId::H.form(lam) * self.mu1
            + IntegralId::I.form(lam) * self.mu2
            + IntegralId::C1.form(lam) * self.m_prime
    }
}

/// Decomposition coefficients of `G_k`, `k ∈ 1..=4`.
///
/// For `G3` the `μ2` denominator uses `(λ3 - λ4)`, the same factor as its
/// `μ1` and `m'`. The variant with `(λ2 - λ4)` in that slot does not satisfy
/// the identity; a unit test below keeps that on record.
pub fn popov_decomposition(k: u8, lam: &InertiaSpectrum) -> Result<PopovDecomposition> {
    let l = |i: usize| lam.l(i);
    let s = lam.total();
    let (mu1, mu2, m_prime) = match k {
        1 => {
            let den = s * lam.diff(1, 2) * lam.diff(1, 3) * lam.diff(1, 4);
            let (a, b, c) = (l(2), l(3), l(4));
            (
                2.0 * lam.sum(2, 3) * lam.sum(2, 4) * lam.sum(3, 4) / den,
                1.0 / den,
                -2.0 * (a * a + b * b + c * c + a * b + a * c + b * c) / den,
            )
        }
        2 => {
            let den = s * lam.diff(1, 2) * lam.diff(2, 3) * lam.diff(2, 4);
            let (a, b, c) = (l(1), l(3), l(4));
            (
                -2.0 * lam.sum(1, 3) * lam.sum(1, 4) * lam.sum(3, 4) / den,
                -1.0 / den,
                2.0 * (a * a + b * b + c * c + a * b + a * c + b * c) / den,
            )
        }
        3 => {
            let den = s * lam.diff(1, 3) * lam.diff(2, 3) * lam.diff(3, 4);
            let (a, b, c) = (l(1), l(2), l(4));
            (
                2.0 * lam.sum(1, 2) * lam.sum(1, 4) * lam.sum(2, 4) / den,
                1.0 / den,
                -2.0 * (a * a + b * b + c * c + a * b + a * c + b * c) / den,
            )
        }
        4 => {
            let den = s * lam.diff(1, 4) * lam.diff(2, 4) * lam.diff(3, 4);
            let (a, b, c) = (l(1), l(2), l(3));
            (
                -2.0 * lam.sum(1, 2) * lam.sum(1, 3) * lam.sum(2, 3) / den,
                -1.0 / den,
                2.0 * (a * a + b * b + c * c + a * b + a * c + b * c) / den,
            )
        }
        _ => return Err(Error::InvalidArgument(format!("Popov index {k} not in 1..=4"))),
    };
    Ok(PopovDecomposition { mu1, mu2, m_prime })
}

/// The Popov integral `G_k` as an [`IntegralId`].
pub fn popov_id(k: u8) -> Result<IntegralId> {
    match k {
        1 => Ok(IntegralId::G1),
        2 => Ok(IntegralId::G2),
        3 => Ok(IntegralId::G3),
        4 => Ok(IntegralId::G4),
        _ => Err(Error::InvalidArgument(format!("Popov index {k} not in 1..=4"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tolerance::{close, IDENTITY_REL};

    fn lam() -> InertiaSpectrum {
        InertiaSpectrum::reference()
    }

    #[test]
    fn value_examples() {
        let ones = So4State([1.0; 6]);
        assert_eq!(integral_value(IntegralId::C1, &ones, &lam()), 3.0);
        let m = So4State::new(1.0, 2.0, 3.0, 3.0, 2.0, 1.0);
        assert_eq!(integral_value(IntegralId::C2, &m, &lam()), 10.0);
        let e1 = So4State::unit(0);
        assert_eq!(integral_value(IntegralId::I, &e1, &lam()), 13.0);
    }

    #[test]
    fn gradient_examples() {
        let m = So4State::new(0.3, -1.0, 2.0, 0.5, 0.0, -4.0);
        assert_eq!(integral_gradient(IntegralId::C1, &m, &lam()), m);
        assert_eq!(integral_gradient(IntegralId::C2, &m, &lam()), m.swapped());
        let g = integral_gradient(IntegralId::H, &So4State([1.0; 6]), &lam());
        let expected = [1.0 / 5.0, 1.0 / 6.0, 1.0 / 7.0, 1.0 / 5.0, 1.0 / 4.0, 1.0 / 3.0];
        for k in 0..6 {
            assert!((g[k] - expected[k]).abs() < 1e-16);
        }
    }

    #[test]
    fn hamiltonian_is_quarter_trace() {
        let m = So4State::new(0.3, -1.0, 2.0, 0.5, 0.7, -4.0);
        let omega = crate::body::omega_from_m(&m, &lam());
        let h = -0.25 * (m.to_matrix() * omega.to_matrix()).trace();
        assert!((h - integral_value(IntegralId::H, &m, &lam())).abs() < 1e-14);
    }

    #[test]
    fn casimir_brackets_vanish() {
        let m = So4State::new(0.3, -1.0, 2.0, 0.5, 0.7, -4.0);
        for g in IntegralId::ALL {
            for c in [IntegralId::C1, IntegralId::C2] {
                assert!(poisson_bracket(c, g, &m, &lam()).abs() < 1e-13);
            }
        }
        assert_eq!(poisson_bracket(IntegralId::H, IntegralId::H, &m, &lam()), 0.0);
    }

    #[test]
    fn g1_mu2_reference_value() {
        let p = popov_decomposition(1, &lam()).unwrap();
        assert!((p.mu2 - 1.0 / 60.0).abs() < 1e-17);
    }

    #[test]
    fn g3_and_g1_mu2_have_opposite_sign_patterns_to_g2_g4() {
        let mu2: Vec<f64> = (1..=4).map(|k| popov_decomposition(k, &lam()).unwrap().mu2).collect();
        assert!(mu2[0] > 0.0 && mu2[2] > 0.0);
        assert!(mu2[1] < 0.0 && mu2[3] < 0.0);
    }

    #[test]
    fn g3_with_printed_mixed_denominator_fails_identity() {
        let l = lam();
        let good = popov_decomposition(3, &l).unwrap();
        let mixed_den = l.total() * l.diff(1, 3) * l.diff(2, 3) * l.diff(2, 4);
        let mixed = PopovDecomposition { mu2: 1.0 / mixed_den, ..good };
        let m = So4State::new(0.4, 1.1, -0.2, 0.9, -0.6, 1.3);
        let g3 = IntegralId::G3.form(&l);
        let scale = g3.magnitude(&m) + good.form(&l).magnitude(&m);
        assert!(close(g3.value(&m), good.form(&l).value(&m), scale, IDENTITY_REL));
        assert!(!close(g3.value(&m), mixed.form(&l).value(&m), scale, 1e-3));
    }

    #[test]
    fn popov_index_out_of_range() {
        assert!(popov_decomposition(0, &lam()).is_err());
        assert!(popov_decomposition(5, &lam()).is_err());
    }

    #[test]
    fn parse_ids() {
        assert_eq!("g3".parse::<IntegralId>().unwrap(), IntegralId::G3);
        assert!("C3".parse::<IntegralId>().is_err());
    }
}
