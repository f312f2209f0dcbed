//! Angular velocity and the Euler equations `Ṁ = [M, Ω]`.

use nalgebra::Matrix6;

use crate::inertia::InertiaSpectrum;
use crate::state::{So4State, X1, X2, X3, Y1, Y2, Y3};

/// `Ω` from `M`: every coordinate divided by its pair sum, `m_ij = (λi + λj) ω_ij`.
pub fn omega_from_m(m: &So4State, lam: &InertiaSpectrum) -> So4State {
    let sums = lam.coordinate_pair_sums();
    m.map(|i, v| v / sums[i])
}

/// One bilinear term `coef · z[i] · z[j]` of a component of the vector field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BilinearTerm {
    pub coef: f64,
    pub i: usize,
    pub j: usize,
}

/// The six components of the vector field, two bilinear terms each.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldCoefficients {
    pub terms: [[BilinearTerm; 2]; 6],
}

impl FieldCoefficients {
    pub fn new(lam: &InertiaSpectrum) -> Self {
        let r = |i: usize, j: usize| 1.0 / lam.sum(i, j);
        let t = |coef: f64, i: usize, j: usize| BilinearTerm { coef, i, j };
        FieldCoefficients {
            terms: [
                [t(r(1, 2) - r(1, 3), X2, X3), t(r(3, 4) - r(2, 4), Y2, Y3)],
                [t(r(2, 3) - r(1, 2), X1, X3), t(r(1, 4) - r(3, 4), Y1, Y3)],
                [t(r(1, 3) - r(2, 3), X1, X2), t(r(2, 4) - r(1, 4), Y1, Y2)],
                [t(r(3, 4) - r(1, 3), X2, Y3), t(r(1, 2) - r(2, 4), X3, Y2)],
                [t(r(2, 3) - r(3, 4), X1, Y3), t(r(1, 4) - r(1, 2), X3, Y1)],
                [t(r(2, 4) - r(2, 3), X1, Y2), t(r(1, 3) - r(1, 4), X2, Y1)],
            ],
        }
    }

    pub fn eval(&self, m: &So4State) -> So4State {
        let mut out = So4State::ZERO;
        for (k, pair) in self.terms.iter().enumerate() {
            out[k] = pair.iter().map(|t| t.coef * m[t.i] * m[t.j]).sum();
        }
        out
    }

    pub fn jacobian(&self, m: &So4State) -> Matrix6<f64> {
        let mut jac = Matrix6::zeros();
        for (k, pair) in self.terms.iter().enumerate() {
            for t in pair {
                jac[(k, t.i)] += t.coef * m[t.j];
                jac[(k, t.j)] += t.coef * m[t.i];
            }
        }
        jac
    }
}

/// `Ṁ` in coordinates.
pub fn vector_field(m: &So4State, lam: &InertiaSpectrum) -> So4State {
    FieldCoefficients::new(lam).eval(m)
}
