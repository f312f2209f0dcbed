use nalgebra::Complex;
use serde::Serialize;

use super::p_interval::{p_interval_with, PIntervalReport};
use super::{critical_candidate, restricted_hessian, CandidateBase, HessianCertificate};
use crate::equilibria::{Equilibrium, EquilibriumFamily};
use crate::error::{Error, Result};
use crate::inertia::InertiaSpectrum;
use crate::serde_helpers::complex_slice;
use crate::spectral::{
    classify_eigenstructure, classify_spectral_with, numeric_spectrum, numeric_verdict,
    BoundaryHint, Eigenstructure, RatioRegion, SpectralVerdict, Stability,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum NonlinearVerdict {
    NonlinearlyStable,
    Unstable,
    Undecidable,
}

/// The function that proves stability: `base + m C1 + n C2` with a definite
/// restricted Hessian. `p` is set for the `H + κ p I` family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LyapunovWitness {
    pub base: CandidateBase,
    pub m: f64,
    pub n: f64,
    pub p: Option<f64>,
    pub hessian: HessianCertificate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityCertificate {
    pub equilibrium: String,
    pub family: EquilibriumFamily,
    pub state: crate::state::So4State,
    pub verdict: NonlinearVerdict,
    /// Eigenvalues of the restricted linearization, computed numerically.
    #[serde(serialize_with = "complex_slice")]
    pub eigenvalues: [Complex<f64>; 4],
    pub eigenstructure: Option<Eigenstructure>,
    /// Closed-form classification; set for the bifurcating points.
    pub spectral: Option<SpectralVerdict>,
    pub witness: Option<LyapunovWitness>,
    pub p_interval: Option<PIntervalReport>,
    pub note: Option<String>,
}

fn witness(base: CandidateBase, p: Option<f64>, eq: &Equilibrium, lam: &InertiaSpectrum) -> Result<LyapunovWitness> {
    let cand = critical_candidate(base, eq, lam)?;
    let hessian = restricted_hessian(&cand, eq, lam)?;
    Ok(LyapunovWitness { base, m: cand.m, n: cand.n, p, hessian })
}

/// Certificates for the center-center points: `G3` at `M1(±a,±b)`, `G1` at
/// `M3(±a,±b)` and `G4` at `M3(±b,±a)`, where `|a| > |b|`.
pub fn certify_center_center(eq: &Equilibrium, lam: &InertiaSpectrum) -> Result<StabilityCertificate> {
    let base = match (eq.family, eq.is_slot_major()) {
        (EquilibriumFamily::T1, true) => CandidateBase::G3,
        (EquilibriumFamily::T3, true) => CandidateBase::G1,
        (EquilibriumFamily::T3, false) => CandidateBase::G4,
        _ => {
            return Err(Error::NotCertifiable(format!(
                "{eq} is not one of the center-center points covered by G1, G3, G4"
            )))
        }
    };
    let w = witness(base, None, eq, lam)?;
    if !w.hessian.definiteness.is_definite() {
        return Err(Error::CertificationFailed(format!(
            "{base} Hessian at {eq} is {:?}",
            w.hessian.definiteness
        )));
    }
    let eigenvalues = numeric_spectrum(&eq.state, lam)?;
    Ok(StabilityCertificate {
        equilibrium: eq.label(),
        family: eq.family,
        state: eq.state,
        verdict: NonlinearVerdict::NonlinearlyStable,
        eigenvalues,
        eigenstructure: classify_eigenstructure(&eigenvalues).ok(),
        spectral: None,
        witness: Some(w),
        p_interval: None,
        note: None,
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct BifurcationOptions {
    /// Use this `p` instead of the midpoint of the feasible interval. It must
    /// lie inside the interval.
    pub p_override: Option<f64>,
    pub boundary: Option<BoundaryHint>,
}

/// Stability of `M1(b,a)` on the orbit of `(a, b)`, `b²/a² ∈ [0, 1)`.
pub fn certify_bifurcation(lam: &InertiaSpectrum, a: f64, b: f64) -> Result<StabilityCertificate> {
    certify_bifurcation_with(lam, a, b, &BifurcationOptions::default())
}

pub fn certify_bifurcation_with(
    lam: &InertiaSpectrum,
    a: f64,
    b: f64,
    opts: &BifurcationOptions,
) -> Result<StabilityCertificate> {
    let mut eq = Equilibrium::cartan(EquilibriumFamily::T1, b, a)?;
    eq.weyl = Some(crate::equilibria::WeylImage::Swapped);
    certify_bifurcating_point(&eq, lam, a, b, opts)
}

/// Same as [`certify_bifurcation`] for an explicit `M1(b,a)` or `M1(-b,-a)`.
pub fn certify_bifurcation_at(eq: &Equilibrium, lam: &InertiaSpectrum, opts: &BifurcationOptions) -> Result<StabilityCertificate> {
    if eq.family != EquilibriumFamily::T1 || eq.is_slot_major() {
        return Err(Error::NotCertifiable(format!("{eq} is not a bifurcating point M1(b,a) or M1(-b,-a)")));
    }
    // The x1 slot holds ±b and the y1 slot ±a; only a², b² and the sign-free
    // multipliers enter.
    certify_bifurcating_point(eq, lam, eq.b.abs(), eq.a.abs(), opts)
}

/// Picks the method for any Cartan point: the center-center certificates,
/// the `H + κ p I` family at the bifurcating points, and a spectral verdict
/// alone where no Lyapunov function applies.
pub fn certify_equilibrium(eq: &Equilibrium, lam: &InertiaSpectrum, opts: &BifurcationOptions) -> Result<StabilityCertificate> {
    match (eq.family, eq.is_slot_major()) {
        (EquilibriumFamily::T1, false) => certify_bifurcation_at(eq, lam, opts),
        (EquilibriumFamily::T1, true) | (EquilibriumFamily::T3, _) => certify_center_center(eq, lam),
        _ => spectral_only(eq, lam),
    }
}

fn spectral_only(eq: &Equilibrium, lam: &InertiaSpectrum) -> Result<StabilityCertificate> {
    let eigenvalues = numeric_spectrum(&eq.state, lam)?;
    let size = eigenvalues.iter().map(|z| z.norm()).fold(f64::MIN_POSITIVE, f64::max);
    let (verdict, note) = match numeric_verdict(&eigenvalues, size) {
        Stability::SpectrallyUnstable => {
            (NonlinearVerdict::Unstable, "spectrally unstable: an eigenvalue has positive real part")
        }
        Stability::SpectrallyStable => {
            (NonlinearVerdict::Undecidable, "spectrally stable; no Lyapunov function available")
        }
    };
    Ok(StabilityCertificate {
        equilibrium: eq.label(),
        family: eq.family,
        state: eq.state,
        verdict,
        eigenvalues,
        eigenstructure: classify_eigenstructure(&eigenvalues).ok(),
        spectral: None,
        witness: None,
        p_interval: None,
        note: Some(note.to_string()),
    })
}

fn certify_bifurcating_point(
    eq: &Equilibrium,
    lam: &InertiaSpectrum,
    a: f64,
    b: f64,
    opts: &BifurcationOptions,
) -> Result<StabilityCertificate> {
    let spectral = classify_spectral_with(lam, a, b, opts.boundary)?;
    let eigenvalues = numeric_spectrum(&eq.state, lam)?;
    let mut cert = StabilityCertificate {
        equilibrium: eq.label(),
        family: eq.family,
        state: eq.state,
        verdict: NonlinearVerdict::Unstable,
        eigenvalues,
        eigenstructure: Some(spectral.eigenstructure),
        spectral: None,
        witness: None,
        p_interval: None,
        note: None,
    };
    let above = matches!(spectral.region, RatioRegion::AboveAlpha2);
    let at = matches!(spectral.region, RatioRegion::AtAlpha2);
    let certifiable = lam.square_sum_gap() != 0.0 && (above || at);

    if !certifiable {
        if spectral.verdict == Stability::SpectrallyUnstable {
            cert.note = Some("spectrally unstable: an eigenvalue has positive real part".to_string());
        } else {
            // Only reachable through w = 0 above a degenerate threshold.
            cert.verdict = NonlinearVerdict::Undecidable;
            cert.note = Some("degenerate linearization; not certified".to_string());
        }
        cert.spectral = Some(spectral);
        return Ok(cert);
    }

    let hint = at.then_some(BoundaryHint::Alpha2);
    let interval = p_interval_with(lam, a, b, hint)?;
    cert.p_interval = Some(interval);
    let Some((lo, hi)) = interval.feasible else {
        cert.verdict = NonlinearVerdict::Undecidable;
        cert.note = Some(
            "Unstable per cited result; not certifiable by {H, I, C1, C2}".to_string(),
        );
        cert.spectral = Some(spectral);
        return Ok(cert);
    };
    let p = match opts.p_override {
        Some(p) if p > lo && p < hi => p,
        Some(p) => {
            return Err(Error::InvalidArgument(format!("p = {p} is outside the feasible interval ({lo}, {hi})")))
        }
        None => 0.5 * (lo + hi),
    };
    let w = witness(CandidateBase::HPlusScaledI { p }, Some(p), eq, lam)?;
    if !w.hessian.definiteness.is_definite() {
        return Err(Error::CertificationFailed(format!(
            "F^p Hessian at {eq} with p = {p} is {:?}",
            w.hessian.definiteness
        )));
    }
    cert.verdict = NonlinearVerdict::NonlinearlyStable;
    cert.witness = Some(w);
    cert.spectral = Some(spectral);
    Ok(cert)
}
