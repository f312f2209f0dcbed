//! Energy–Casimir certificates: a conserved `F = base + m C1 + n C2` with a
//! critical point at the equilibrium and a definite Hessian on
//! `W = ker dC1 ∩ ker dC2` proves nonlinear stability.

mod certify;
pub mod closed_forms;
mod p_interval;

pub use certify::{
    certify_bifurcation, certify_bifurcation_at, certify_bifurcation_with, certify_center_center,
    certify_equilibrium,
    BifurcationOptions, LyapunovWitness, NonlinearVerdict, StabilityCertificate,
};
pub use p_interval::{p_interval, p_interval_with, PCase, PCoefficients, PIntervalReport};

use std::fmt;

use nalgebra::Matrix4;
use serde::Serialize;

use crate::equilibria::Equilibrium;
use crate::error::{Error, Result};
use crate::inertia::InertiaSpectrum;
use crate::integrals::{IntegralId, QuadraticForm};
use crate::linalg::{compress, leading_minors, orbit_tangent_basis, symmetric_eigenvalues};
use crate::tolerance::HESSIAN_DEGENERATE_REL;

/// Gradient residual accepted by [`restricted_hessian`], relative to the
/// size of the Hessian times the size of the state.
const CRITICAL_POINT_REL: f64 = 1e-11;

/// The conserved function the multipliers are added to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum CandidateBase {
    G1,
    G2,
    G3,
    G4,
    H,
    I,
    /// `H + κ p I` with `κ = 1 / (2 (λ1+λ3)(λ1+λ4)(λ3+λ4))`.
    HPlusScaledI { p: f64 },
}

impl CandidateBase {
    pub fn form(&self, lam: &InertiaSpectrum) -> QuadraticForm {
        match *self {
            CandidateBase::G1 => IntegralId::G1.form(lam),
            CandidateBase::G2 => IntegralId::G2.form(lam),
            CandidateBase::G3 => IntegralId::G3.form(lam),
            CandidateBase::G4 => IntegralId::G4.form(lam),
            CandidateBase::H => IntegralId::H.form(lam),
            CandidateBase::I => IntegralId::I.form(lam),
            CandidateBase::HPlusScaledI { p } => {
                IntegralId::H.form(lam) + IntegralId::I.form(lam) * (scaled_i_coefficient(lam) * p)
            }
        }
    }
}

impl fmt::Display for CandidateBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CandidateBase::HPlusScaledI { p } => write!(f, "H+kpI(p={p})"),
            other => write!(f, "{other:?}"),
        }
    }
}

impl TryFrom<IntegralId> for CandidateBase {
    type Error = Error;

    fn try_from(id: IntegralId) -> Result<Self> {
        Ok(match id {
            IntegralId::G1 => CandidateBase::G1,
            IntegralId::G2 => CandidateBase::G2,
            IntegralId::G3 => CandidateBase::G3,
            IntegralId::G4 => CandidateBase::G4,
            IntegralId::H => CandidateBase::H,
            IntegralId::I => CandidateBase::I,
            IntegralId::C1 | IntegralId::C2 => {
                return Err(Error::UnsupportedBase(format!("{id} is a Casimir")))
            }
        })
    }
}

/// `κ = μ2 / μ1` of `G2`.
pub fn scaled_i_coefficient(lam: &InertiaSpectrum) -> f64 {
    1.0 / (2.0 * lam.sum(1, 3) * lam.sum(1, 4) * lam.sum(3, 4))
}

/// `F = base + m C1 + n C2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LyapunovCandidate {
    pub base: CandidateBase,
    pub m: f64,
    pub n: f64,
}

impl LyapunovCandidate {
    pub fn form(&self, lam: &InertiaSpectrum) -> QuadraticForm {
        self.base.form(lam) + IntegralId::C1.form(lam) * self.m + IntegralId::C2.form(lam) * self.n
    }

    /// Largest gradient component of `F` at `eq`.
    pub fn gradient_residual(&self, eq: &Equilibrium, lam: &InertiaSpectrum) -> f64 {
        self.form(lam).gradient(&eq.state).max_abs()
    }
}

/// Solves `dF(eq) = 0` for `(m, n)`.
///
/// On the active pair `(x_k, y_k) = (α, β)` of a Cartan point the base
/// gradient is `(2 d_x α + c β, 2 d_y β + c α)` and the Casimir gradients are
/// `(α, β)` and `(β, α)`, so the condition is the 2×2 system
/// `[[α, β], [β, α]] (m, n) = -(base gradient)`. All other gradient
/// components vanish identically.
pub fn solve_multipliers(base: CandidateBase, eq: &Equilibrium, lam: &InertiaSpectrum) -> Result<(f64, f64)> {
    let (ix, iy) = eq.family.active_coordinates().ok_or_else(|| {
        Error::InvalidArgument(format!("{:?} is not a Cartan family", eq.family))
    })?;
    let (alpha, beta) = (eq.state[ix], eq.state[iy]);
    let det = alpha * alpha - beta * beta;
    if det.abs() <= 1e-14 * (alpha * alpha + beta * beta) {
        return Err(Error::SingularOrbit { c1: 0.5 * (alpha * alpha + beta * beta), c2: alpha * beta });
    }
    let form = base.form(lam);
    let gx = 2.0 * form.diag[ix] * alpha + form.cross * beta;
    let gy = 2.0 * form.diag[iy] * beta + form.cross * alpha;
    let m = -(alpha * gx - beta * gy) / det;
    let n = -(alpha * gy - beta * gx) / det;
    Ok((m, n))
}

/// Solves the multipliers and returns the candidate.
pub fn critical_candidate(base: CandidateBase, eq: &Equilibrium, lam: &InertiaSpectrum) -> Result<LyapunovCandidate> {
    let (m, n) = solve_multipliers(base, eq, lam)?;
    Ok(LyapunovCandidate { base, m, n })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Definiteness {
    PositiveDefinite,
    NegativeDefinite,
    Indefinite,
    Degenerate,
}

impl Definiteness {
    pub fn is_definite(&self) -> bool {
        matches!(self, Definiteness::PositiveDefinite | Definiteness::NegativeDefinite)
    }
}

/// Hessian of `F` restricted to `W`, on the basis of
/// [`orbit_tangent_basis`]. At a `t1` point this is `(x2, x3, y2, y3)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HessianCertificate {
    /// Leading principal minors `D1..D4`.
    pub minors: [f64; 4],
    /// Ascending.
    pub eigenvalues: [f64; 4],
    /// Decided from the eigenvalues.
    pub definiteness: Definiteness,
    /// Whether Sylvester's criterion on `minors` reaches the same tag.
    pub sylvester_agrees: bool,
    #[serde(skip)]
    pub matrix: Matrix4<f64>,
}

impl HessianCertificate {
    /// `sqrt(max |e| / min |e|)`: to second order, level sets of a definite
    /// form confine an offset `δ` to `‖δ‖ · confinement_factor()`.
    pub fn confinement_factor(&self) -> f64 {
        let abs = self.eigenvalues.map(f64::abs);
        let hi = abs.iter().cloned().fold(0.0, f64::max);
        let lo = abs.iter().cloned().fold(f64::INFINITY, f64::min);
        (hi / lo).sqrt()
    }
}

pub fn restricted_hessian(
    cand: &LyapunovCandidate,
    eq: &Equilibrium,
    lam: &InertiaSpectrum,
) -> Result<HessianCertificate> {
    let form = cand.form(lam);
    let hess = form.hessian();
    let residual = form.gradient(&eq.state).max_abs();
    let scale = hess.abs().max() * eq.state.max_abs();
    if residual > CRITICAL_POINT_REL * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::InvalidArgument(format!(
            "equilibrium is not a critical point of the candidate (gradient residual {residual:e})"
        )));
    }
    let basis = orbit_tangent_basis(&eq.state)?;
    let r = compress(&hess, &basis);
    let matrix = (r + r.transpose()) * 0.5;
    Ok(certificate_from_matrix(matrix))
}

pub(crate) fn certificate_from_matrix(matrix: Matrix4<f64>) -> HessianCertificate {
    let eigenvalues = symmetric_eigenvalues(&matrix);
    let minors = leading_minors(&matrix);
    let size = eigenvalues.iter().map(|e| e.abs()).fold(0.0, f64::max);
    let definiteness = by_eigenvalues(&eigenvalues, size);
    let sylvester_agrees = same_class(by_minors(&minors), definiteness);
    HessianCertificate { minors, eigenvalues, definiteness, sylvester_agrees, matrix }
}

fn by_eigenvalues(eig: &[f64; 4], size: f64) -> Definiteness {
    if size == 0.0 || eig.iter().any(|e| e.abs() <= HESSIAN_DEGENERATE_REL * size) {
        Definiteness::Degenerate
    } else if eig.iter().all(|&e| e > 0.0) {
        Definiteness::PositiveDefinite
    } else if eig.iter().all(|&e| e < 0.0) {
        Definiteness::NegativeDefinite
    } else {
        Definiteness::Indefinite
    }
}

/// Sylvester's criterion as a pure sign test. No relative threshold is
/// applied: `D4` is the product of all four eigenvalues, so any cut-off
/// against `size⁴` would misreport well-separated but ill-conditioned
/// Hessians as degenerate.
fn by_minors(minors: &[f64; 4]) -> Definiteness {
    if minors.iter().any(|&d| d == 0.0) {
        Definiteness::Degenerate
    } else if minors.iter().all(|&d| d > 0.0) {
        Definiteness::PositiveDefinite
    } else if minors.iter().enumerate().all(|(k, &d)| if k % 2 == 0 { d < 0.0 } else { d > 0.0 }) {
        Definiteness::NegativeDefinite
    } else {
        Definiteness::Indefinite
    }
}

/// Both tests must agree on whether the matrix is positive definite,
/// negative definite or neither.
fn same_class(a: Definiteness, b: Definiteness) -> bool {
    match (a, b) {
        (Definiteness::PositiveDefinite, Definiteness::PositiveDefinite)
        | (Definiteness::NegativeDefinite, Definiteness::NegativeDefinite) => true,
        (x, y) => !x.is_definite() && !y.is_definite(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibria::{cartan_point, EquilibriumFamily, OrbitParams, WeylImage};

    fn reference_point(family: EquilibriumFamily, weyl: WeylImage) -> Equilibrium {
        cartan_point(&OrbitParams::new(5.0, 3.0).unwrap(), family, weyl).unwrap()
    }

    #[test]
    fn casimir_bases_are_rejected() {
        assert!(CandidateBase::try_from(IntegralId::C1).is_err());
        assert!(CandidateBase::try_from(IntegralId::C2).is_err());
        assert_eq!(CandidateBase::try_from(IntegralId::G3).unwrap(), CandidateBase::G3);
    }

    #[test]
    fn multipliers_make_a_critical_point() {
        let lam = InertiaSpectrum::reference();
        for (base, family) in [
            (CandidateBase::G3, EquilibriumFamily::T1),
            (CandidateBase::G1, EquilibriumFamily::T3),
            (CandidateBase::G4, EquilibriumFamily::T3),
            (CandidateBase::HPlusScaledI { p: 0.7 }, EquilibriumFamily::T1),
        ] {
            for weyl in WeylImage::ALL {
                let eq = reference_point(family, weyl);
                let cand = critical_candidate(base, &eq, &lam).unwrap();
                assert!(cand.gradient_residual(&eq, &lam) <= 1e-12, "{base} {eq}");
            }
        }
    }

    #[test]
    fn g3_multipliers_match_closed_form() {
        let lam = InertiaSpectrum::reference();
        let eq = reference_point(EquilibriumFamily::T1, WeylImage::Identity);
        let (m, n) = solve_multipliers(CandidateBase::G3, &eq, &lam).unwrap();
        let (mc, nc) = closed_forms::g3_multipliers(&lam, 3.0, 1.0);
        assert!((m - mc).abs() < 1e-14 && (n - nc).abs() < 1e-14);
    }

    #[test]
    fn hessian_requires_critical_point() {
        let lam = InertiaSpectrum::reference();
        let eq = reference_point(EquilibriumFamily::T1, WeylImage::Identity);
        let cand = LyapunovCandidate { base: CandidateBase::G3, m: 0.0, n: 0.0 };
        assert!(restricted_hessian(&cand, &eq, &lam).is_err());
    }

    #[test]
    fn sylvester_and_eigenvalues_agree_on_examples() {
        let pd = certificate_from_matrix(Matrix4::from_diagonal(&nalgebra::Vector4::new(1.0, 2.0, 3.0, 4.0)));
        assert_eq!(pd.definiteness, Definiteness::PositiveDefinite);
        assert!(pd.sylvester_agrees);
        let nd = certificate_from_matrix(-Matrix4::identity());
        assert_eq!(nd.definiteness, Definiteness::NegativeDefinite);
        assert!(nd.sylvester_agrees);
        let ind = certificate_from_matrix(Matrix4::from_diagonal(&nalgebra::Vector4::new(1.0, -2.0, 3.0, 4.0)));
        assert_eq!(ind.definiteness, Definiteness::Indefinite);
        assert!(ind.sylvester_agrees);
        let deg = certificate_from_matrix(Matrix4::from_diagonal(&nalgebra::Vector4::new(1.0, 0.0, 3.0, 4.0)));
        assert_eq!(deg.definiteness, Definiteness::Degenerate);
        assert!(deg.sylvester_agrees);
    }

    #[test]
    fn i_based_candidate_is_indefinite() {
        let lam = InertiaSpectrum::reference();
        let eq = reference_point(EquilibriumFamily::T1, WeylImage::Identity);
        let cand = critical_candidate(CandidateBase::I, &eq, &lam).unwrap();
        assert_eq!(restricted_hessian(&cand, &eq, &lam).unwrap().definiteness, Definiteness::Indefinite);
    }
}
