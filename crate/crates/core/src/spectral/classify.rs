use nalgebra::Complex;
use serde::Serialize;

use super::quartic::{char_quartic, f_tilde};
use super::{bifurcating_state, linearize, restrict_to_orbit};
use crate::error::{Error, Result};
use crate::inertia::InertiaSpectrum;
use crate::linalg::eigenvalues4;
use crate::serde_helpers::complex_slice;
use crate::tolerance::{BOUNDARY_ABS, EIGEN_PAIRING_ABS, NUMERIC_UNSTABLE_REL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Stability {
    SpectrallyStable,
    SpectrallyUnstable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Eigenstructure {
    SaddleSaddle,
    FocusFocus,
    CenterCenter,
    CenterSaddle,
    DegenerateDoubleReal,
    DegenerateZero,
    DoubleImaginary,
}

/// `CaseI`: `λ1λ4 != λ2λ3`; `CaseII`: `λ1λ4 = λ2λ3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SpectralCase {
    CaseI,
    CaseII,
}

impl SpectralCase {
    pub fn of(lam: &InertiaSpectrum) -> Self {
        let l = lam.as_array();
        let scale = (l[0] * l[3]).abs() + (l[1] * l[2]).abs();
        if lam.product_gap().abs() <= 1e-12 * scale {
            SpectralCase::CaseII
        } else {
            SpectralCase::CaseI
        }
    }
}

/// Position of `r = b²/a²` relative to the roots of `f̃`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum RatioRegion {
    BelowAlpha1,
    AtAlpha1,
    BetweenAlphas,
    AtAlpha2,
    AboveAlpha2,
}

/// Lets a caller that built `r` exactly on a threshold say so, instead of
/// relying on the absolute tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum BoundaryHint {
    Alpha1,
    Alpha2,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralVerdict {
    pub verdict: Stability,
    pub eigenstructure: Eigenstructure,
    /// Roots of the characteristic quartic, sorted by real then imaginary part.
    #[serde(serialize_with = "complex_slice")]
    pub eigenvalues: [Complex<f64>; 4],
    /// Eigenvalues of the restricted linearization, computed numerically.
    #[serde(serialize_with = "complex_slice")]
    pub numeric_eigenvalues: [Complex<f64>; 4],
    /// Whether the max-real-part sign test on `numeric_eigenvalues` gives
    /// the same verdict.
    pub numeric_agrees: bool,
    pub case: SpectralCase,
    pub region: RatioRegion,
    pub r: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub warning: Option<String>,
}

impl SpectralVerdict {
    pub fn max_real_part(&self) -> f64 {
        self.eigenvalues.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn numeric_max_real_part(&self) -> f64 {
        self.numeric_eigenvalues.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Spectral classification of `M1(b,a)` (and, by symmetry, `M1(-b,-a)`) on
/// the orbit of `(a, b)`.
pub fn classify_spectral(lam: &InertiaSpectrum, a: f64, b: f64) -> Result<SpectralVerdict> {
    classify_spectral_with(lam, a, b, None)
}

pub fn classify_spectral_with(
    lam: &InertiaSpectrum,
    a: f64,
    b: f64,
    hint: Option<BoundaryHint>,
) -> Result<SpectralVerdict> {
    if !(a.is_finite() && b.is_finite()) || a == 0.0 {
        return Err(Error::RatioOutOfRange(f64::NAN));
    }
    let r = b * b / (a * a);
    if !(0.0..1.0).contains(&r) {
        return Err(Error::RatioOutOfRange(r));
    }
    let ft = f_tilde(lam);
    let quartic = char_quartic(lam, a, b)?;
    let case = SpectralCase::of(lam);
    let region = region_of(r, ft.alpha1, ft.alpha2, hint);

    let s23 = lam.sum(2, 3);
    let s14 = lam.sum(1, 4);
    let (wa, wb) = (s23 * s23 * a * a, s14 * s14 * b * b);
    let w_zero = (wa - wb).abs() <= BOUNDARY_ABS * (wa + wb);

    let mut warning = None;
    let (verdict, eigenstructure) = match case {
        SpectralCase::CaseI => match region {
            _ if w_zero => {
                warning = Some("w = 0: zero eigenvalue pair on the orbit".to_string());
                let v = if quartic.v < 0.0 { Stability::SpectrallyUnstable } else { Stability::SpectrallyStable };
                (v, Eigenstructure::DegenerateZero)
            }
            RatioRegion::BelowAlpha1 => (Stability::SpectrallyUnstable, Eigenstructure::SaddleSaddle),
            RatioRegion::AtAlpha1 => (Stability::SpectrallyUnstable, Eigenstructure::DegenerateDoubleReal),
            RatioRegion::BetweenAlphas => (Stability::SpectrallyUnstable, Eigenstructure::FocusFocus),
            RatioRegion::AtAlpha2 => (Stability::SpectrallyStable, Eigenstructure::DoubleImaginary),
            RatioRegion::AboveAlpha2 => (Stability::SpectrallyStable, Eigenstructure::CenterCenter),
        },
        SpectralCase::CaseII => match region {
            RatioRegion::AtAlpha2 => {
                warning = Some(
                    "zero eigenvalue of multiplicity 4; a nilpotent block is not excluded".to_string(),
                );
                (Stability::SpectrallyStable, Eigenstructure::DegenerateZero)
            }
            RatioRegion::AboveAlpha2 => (Stability::SpectrallyStable, Eigenstructure::DoubleImaginary),
            _ => (Stability::SpectrallyUnstable, Eigenstructure::DegenerateDoubleReal),
        },
    };

    let m = bifurcating_state(a, b);
    let restricted = restrict_to_orbit(&linearize(&m, lam), &m)?;
    let numeric_eigenvalues = eigenvalues4(&restricted)?;
    let numeric_agrees = numeric_verdict(&numeric_eigenvalues, restricted.norm()) == verdict;

    Ok(SpectralVerdict {
        verdict,
        eigenstructure,
        eigenvalues: quartic.roots(),
        numeric_eigenvalues,
        numeric_agrees,
        case,
        region,
        r,
        alpha1: ft.alpha1,
        alpha2: ft.alpha2,
        warning,
    })
}

fn region_of(r: f64, alpha1: f64, alpha2: f64, hint: Option<BoundaryHint>) -> RatioRegion {
    match hint {
        Some(BoundaryHint::Alpha1) => return RatioRegion::AtAlpha1,
        Some(BoundaryHint::Alpha2) => return RatioRegion::AtAlpha2,
        None => {}
    }
    if (r - alpha1).abs() <= BOUNDARY_ABS {
        RatioRegion::AtAlpha1
    } else if (r - alpha2).abs() <= BOUNDARY_ABS {
        RatioRegion::AtAlpha2
    } else if r < alpha1 {
        RatioRegion::BelowAlpha1
    } else if r < alpha2 {
        RatioRegion::BetweenAlphas
    } else {
        RatioRegion::AboveAlpha2
    }
}

/// Sign test on numerically computed eigenvalues: unstable iff some real part
/// exceeds `1e-6 · scale`, where `scale` is the size of the matrix they came
/// from.
pub fn numeric_verdict(eigs: &[Complex<f64>], scale: f64) -> Stability {
    let max_re = eigs.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    if max_re > NUMERIC_UNSTABLE_REL * scale {
        Stability::SpectrallyUnstable
    } else {
        Stability::SpectrallyStable
    }
}

/// Eigenstructure of a 4-D linear Hamiltonian spectrum, with pairing
/// tolerance `1e-8 · max(1, max |λ|)`.
pub fn classify_eigenstructure(eigs: &[Complex<f64>; 4]) -> Result<Eigenstructure> {
    let size = eigs.iter().map(|z| z.norm()).fold(1.0, f64::max);
    classify_eigenstructure_with_tol(eigs, EIGEN_PAIRING_ABS * size)
}

pub fn classify_eigenstructure_with_tol(eigs: &[Complex<f64>; 4], tol: f64) -> Result<Eigenstructure> {
    let has = |target: Complex<f64>| eigs.iter().any(|z| (z - target).norm() <= tol);
    if !eigs.iter().all(|z| z.re.is_finite() && z.im.is_finite() && has(-z) && has(z.conj())) {
        return Err(Error::NotHamiltonianSpectrum);
    }
    if eigs.iter().any(|z| z.norm() <= tol) {
        return Ok(Eigenstructure::DegenerateZero);
    }
    let real: Vec<f64> = eigs.iter().filter(|z| z.im.abs() <= tol).map(|z| z.re.abs()).collect();
    let imag: Vec<f64> = eigs.iter().filter(|z| z.re.abs() <= tol).map(|z| z.im.abs()).collect();
    let spread = |v: &[f64]| {
        let max = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = v.iter().cloned().fold(f64::INFINITY, f64::min);
        max - min
    };
    Ok(match (real.len(), imag.len()) {
        (4, 0) if spread(&real) <= tol => Eigenstructure::DegenerateDoubleReal,
        (4, 0) => Eigenstructure::SaddleSaddle,
        (0, 4) if spread(&imag) <= tol => Eigenstructure::DoubleImaginary,
        (0, 4) => Eigenstructure::CenterCenter,
        (2, 2) => Eigenstructure::CenterSaddle,
        (0, 0) => Eigenstructure::FocusFocus,
        _ => return Err(Error::NotHamiltonianSpectrum),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn eigenstructure_examples() {
        let cases = [
            ([c(-3., 0.), c(-2., 0.), c(2., 0.), c(3., 0.)], Eigenstructure::SaddleSaddle),
            ([c(0., -3.), c(0., -2.), c(0., 2.), c(0., 3.)], Eigenstructure::CenterCenter),
            ([c(-1., -2.), c(-1., 2.), c(1., -2.), c(1., 2.)], Eigenstructure::FocusFocus),
            ([c(-1., 0.), c(1., 0.), c(0., 2.), c(0., -2.)], Eigenstructure::CenterSaddle),
            ([c(-1., 0.), c(-1., 0.), c(1., 0.), c(1., 0.)], Eigenstructure::DegenerateDoubleReal),
            ([c(0., 1.), c(0., 1.), c(0., -1.), c(0., -1.)], Eigenstructure::DoubleImaginary),
            ([c(0., 0.), c(0., 0.), c(0., 1.), c(0., -1.)], Eigenstructure::DegenerateZero),
        ];
        for (eigs, want) in cases {
            assert_eq!(classify_eigenstructure(&eigs).unwrap(), want, "{eigs:?}");
        }
    }

    #[test]
    fn eigenstructure_rejects_unpaired_spectrum() {
        let eigs = [c(1., 0.), c(2., 0.), c(-1., 0.), c(-1.5, 0.)];
        assert!(classify_eigenstructure(&eigs).is_err());
    }

    #[test]
    fn reference_saddle_saddle() {
        let v = classify_spectral(&InertiaSpectrum::reference(), 3.0, 1.0).unwrap();
        assert_eq!(v.verdict, Stability::SpectrallyUnstable);
        assert_eq!(v.eigenstructure, Eigenstructure::SaddleSaddle);
        assert!(v.numeric_agrees);
        assert!(v.eigenvalues.iter().all(|z| z.im == 0.0));
    }

    #[test]
    fn reference_center_center() {
        let v = classify_spectral(&InertiaSpectrum::reference(), 1.0, 0.95_f64.sqrt()).unwrap();
        assert_eq!(v.verdict, Stability::SpectrallyStable);
        assert_eq!(v.eigenstructure, Eigenstructure::CenterCenter);
        assert!(v.numeric_agrees);
        assert!(v.numeric_eigenvalues.iter().all(|z| z.re.abs() < 1e-9));
    }

    #[test]
    fn reference_focus_focus() {
        let v = classify_spectral(&InertiaSpectrum::reference(), 1.0, 0.5_f64.sqrt()).unwrap();
        assert_eq!(v.eigenstructure, Eigenstructure::FocusFocus);
        assert_eq!(classify_eigenstructure(&v.numeric_eigenvalues).unwrap(), Eigenstructure::FocusFocus);
        assert!(v.numeric_agrees);
    }

    #[test]
    fn case_two_regions() {
        let lam = InertiaSpectrum::new(6.0, 3.0, 2.0, 1.0).unwrap();
        assert_eq!(SpectralCase::of(&lam), SpectralCase::CaseII);
        let alpha2 = 25.0 / 49.0;
        let below = classify_spectral(&lam, 1.0, 0.3_f64.sqrt()).unwrap();
        assert_eq!(below.eigenstructure, Eigenstructure::DegenerateDoubleReal);
        assert!(below.numeric_agrees);
        let above = classify_spectral(&lam, 1.0, 0.8_f64.sqrt()).unwrap();
        assert_eq!(above.eigenstructure, Eigenstructure::DoubleImaginary);
        assert!(above.numeric_agrees);
        let at = classify_spectral_with(&lam, 7.0, 5.0, Some(BoundaryHint::Alpha2)).unwrap();
        assert!((at.r - alpha2).abs() < 1e-15);
        assert_eq!(at.verdict, Stability::SpectrallyStable);
        assert_eq!(at.eigenstructure, Eigenstructure::DegenerateZero);
        assert!(at.warning.is_some());
    }

    #[test]
    fn rejects_ratio_outside_unit_interval() {
        let lam = InertiaSpectrum::reference();
        assert!(classify_spectral(&lam, 1.0, 1.0).is_err());
        assert!(classify_spectral(&lam, 1.0, 2.0).is_err());
        assert!(classify_spectral(&lam, 0.0, 0.0).is_err());
    }
}
