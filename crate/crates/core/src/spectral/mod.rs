//! Linearization on the orbit and the spectral classification of the
//! bifurcating equilibria `M1(b,a)`, `M1(-b,-a)`.

mod classify;
mod quartic;

pub use classify::{
    classify_eigenstructure, classify_eigenstructure_with_tol, classify_spectral,
    classify_spectral_with, numeric_verdict, BoundaryHint, Eigenstructure, RatioRegion,
    SpectralCase, SpectralVerdict, Stability,
};
pub use quartic::{char_quartic, f_tilde, CharQuartic, FTildeData};

use nalgebra::{Complex, Matrix4, Matrix6};
use serde::Serialize;

use crate::body::FieldCoefficients;
use crate::equilibria::{Equilibrium, EquilibriumFamily, WeylImage};
use crate::error::Result;
use crate::inertia::InertiaSpectrum;
use crate::linalg::{compress, eigenvalues4, orbit_tangent_basis};
use crate::serde_helpers::complex_slice;
use crate::state::So4State;

/// Jacobian of the vector field at `m`.
pub fn linearize(m: &So4State, lam: &InertiaSpectrum) -> Matrix6<f64> {
    FieldCoefficients::new(lam).jacobian(m)
}

/// `J` on the orthonormal basis of `W = ker dC1(M) ∩ ker dC2(M)` from
/// [`orbit_tangent_basis`]. At an equilibrium `J` maps into `W`, so the
/// eigenvalues of the 4×4 are those of the linearization on the orbit.
pub fn restrict_to_orbit(jac: &Matrix6<f64>, m: &So4State) -> Result<Matrix4<f64>> {
    let basis = orbit_tangent_basis(m)?;
    Ok(compress(jac, &basis))
}

/// Numerically computed eigenvalues of the restricted linearization at `m`,
/// sorted by real then imaginary part.
pub fn numeric_spectrum(m: &So4State, lam: &InertiaSpectrum) -> Result<[Complex<f64>; 4]> {
    let r = restrict_to_orbit(&linearize(m, lam), m)?;
    eigenvalues4(&r)
}

/// The bifurcating point `M1(b,a)`: `x1 = b`, `y1 = a`.
pub fn bifurcating_state(a: f64, b: f64) -> So4State {
    So4State::new(b, 0.0, 0.0, a, 0.0, 0.0)
}

/// Spectral picture of one Cartan point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumSpectrum {
    pub label: String,
    pub family: EquilibriumFamily,
    pub weyl: Option<WeylImage>,
    pub state: So4State,
    #[serde(serialize_with = "complex_slice")]
    pub eigenvalues: [Complex<f64>; 4],
    pub eigenstructure: Option<Eigenstructure>,
    pub stability: Stability,
    pub max_real_part: f64,
    /// Closed-form analysis, present for the bifurcating points.
    pub spectral: Option<SpectralVerdict>,
}

/// Numeric eigenvalues for any Cartan point; the bifurcating points
/// `M1(b,a)`, `M1(-b,-a)` also get the closed-form verdict, which decides
/// stability there.
pub fn classify_equilibrium(eq: &Equilibrium, lam: &InertiaSpectrum) -> Result<EquilibriumSpectrum> {
    let eigenvalues = numeric_spectrum(&eq.state, lam)?;
    let (stability, eigenstructure, spectral) = if eq.family == EquilibriumFamily::T1 && !eq.is_slot_major() {
        // The x1 slot holds b and the y1 slot a.
        let v = classify_spectral(lam, eq.b, eq.a)?;
        (v.verdict, Some(v.eigenstructure), Some(v))
    } else {
        let size = eigenvalues.iter().map(|z| z.norm()).fold(f64::MIN_POSITIVE, f64::max);
        (numeric_verdict(&eigenvalues, size), classify_eigenstructure(&eigenvalues).ok(), None)
    };
    Ok(EquilibriumSpectrum {
        label: eq.label(),
        family: eq.family,
        weyl: eq.weyl,
        state: eq.state,
        eigenvalues,
        eigenstructure,
        stability,
        max_real_part: eigenvalues.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max),
        spectral,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrals::{integral_gradient, IntegralId};
    use crate::linalg::eigenvalues6;

    #[test]
    fn reference_orbit_classification() {
        let lam = InertiaSpectrum::reference();
        let orbit = crate::equilibria::OrbitParams::new(5.0, 3.0).unwrap();
        let kinds: Vec<_> = crate::equilibria::cartan_equilibria(&orbit)
            .iter()
            .map(|eq| classify_equilibrium(eq, &lam).unwrap())
            .map(|c| (c.eigenstructure.unwrap(), c.stability, c.spectral.is_some()))
            .collect();
        use Eigenstructure::*;
        use Stability::*;
        let cc = (CenterCenter, SpectrallyStable, false);
        let cs = (CenterSaddle, SpectrallyUnstable, false);
        let ss = (SaddleSaddle, SpectrallyUnstable, true);
        assert_eq!(kinds, [cc, cc, ss, ss, cs, cs, cs, cs, cc, cc, cc, cc]);
    }

    #[test]
    fn zero_state_linearizes_to_zero() {
        assert_eq!(linearize(&So4State::ZERO, &InertiaSpectrum::reference()), Matrix6::zeros());
    }

    #[test]
    fn casimir_gradients_against_the_jacobian() {
        // Differentiating ∇C·X = 0 gives Jᵀ∇C = -Hess(C) X, which vanishes
        // at equilibria.
        let lam = InertiaSpectrum::new(5.0, 2.5, 1.0, -0.3).unwrap();
        let m = So4State::new(0.3, -1.2, 0.7, 2.0, -0.4, 0.9);
        let j = linearize(&m, &lam);
        let x = crate::body::vector_field(&m, &lam).to_vector();
        for id in [IntegralId::C1, IntegralId::C2] {
            let g = integral_gradient(id, &m, &lam).to_vector();
            let lhs = j.transpose() * g;
            let rhs = -(id.form(&lam).hessian() * x);
            assert!((lhs - rhs).norm() <= 1e-12 * g.norm() * j.norm());
        }
        let eq = bifurcating_state(3.0, 1.0);
        let j = linearize(&eq, &lam);
        for id in [IntegralId::C1, IntegralId::C2] {
            let g = integral_gradient(id, &eq, &lam).to_vector();
            assert!((g.transpose() * j).norm() <= 1e-12 * g.norm() * j.norm());
        }
    }

    #[test]
    fn full_jacobian_has_two_zero_eigenvalues_at_equilibrium() {
        let lam = InertiaSpectrum::reference();
        let m = bifurcating_state(3.0, 1.0);
        let ev = eigenvalues6(&linearize(&m, &lam)).unwrap();
        let zeros = ev.iter().filter(|z| z.norm() < 1e-12).count();
        assert!(zeros >= 2, "{ev:?}");
    }

    #[test]
    fn restriction_is_traceless_at_equilibria() {
        let lam = InertiaSpectrum::reference();
        let orbit = crate::equilibria::OrbitParams::new(5.0, 3.0).unwrap();
        for e in crate::equilibria::cartan_equilibria(&orbit) {
            let r = restrict_to_orbit(&linearize(&e.state, &lam), &e.state).unwrap();
            assert!(r.trace().abs() < 1e-10);
        }
    }

    #[test]
    fn restriction_rejects_singular_orbit() {
        let m = So4State::new(1.0, 0.0, 0.0, 1.0, 0.0, 0.0);
        let j = linearize(&m, &InertiaSpectrum::reference());
        assert!(restrict_to_orbit(&j, &m).is_err());
    }

    #[test]
    fn reference_eigenvalues_match_quartic() {
        let lam = InertiaSpectrum::reference();
        let numeric = numeric_spectrum(&bifurcating_state(3.0, 1.0), &lam).unwrap();
        let closed = char_quartic(&lam, 3.0, 1.0).unwrap().roots();
        assert!(crate::linalg::spectrum_distance(&numeric, &closed) <= 1e-8 * closed[0].norm());
    }
}
