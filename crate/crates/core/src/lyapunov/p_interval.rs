use serde::Serialize;

use crate::error::{Error, Result};
use crate::inertia::InertiaSpectrum;
use crate::roots::solve_quadratic_with_discriminant;
use crate::spectral::{f_tilde, BoundaryHint};
use crate::tolerance::BOUNDARY_ABS;

/// `CaseI`: `λ1²+λ4² < λ2²+λ3²`; `CaseII`: `λ1²+λ4² > λ2²+λ3²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum PCase {
    CaseI,
    CaseII,
}

/// Coefficients of `D1'(p)`, `D2'(p)` and `g(p) = S3 p² + T3 p + U3` for
/// `F^p` at `M1(b,a)`. The primed single-letter fields are `s1p` etc.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PCoefficients {
    pub a: f64,
    pub b: f64,
    pub s1: f64,
    pub t1: f64,
    pub s1p: f64,
    pub t1p: f64,
    pub s2: f64,
    pub t2: f64,
    pub s2p: f64,
    pub t2p: f64,
    pub s3: f64,
    pub t3: f64,
    pub u3: f64,
    /// `Δ3` from its factored form.
    pub delta3: f64,
}

impl PCoefficients {
    pub fn new(lam: &InertiaSpectrum, a: f64, b: f64) -> Self {
        let s = |i, j| lam.sum(i, j);
        let d = |i, j| lam.diff(i, j);
        let q = |i, j| lam.sq_diff(i, j);
        let (a2, b2) = (a * a, b * b);
        let t3_inner = s(2, 3) * (s(1, 2) * s(2, 4) + s(1, 3) * s(3, 4)) * a2
            - s(1, 4) * (s(1, 2) * s(1, 3) + s(2, 4) * s(3, 4)) * b2;
        let delta3 = lam.total().powi(2) * s(2, 3).powi(2) * a2 * a2 * f_tilde(lam).eval(b2 / a2);
        PCoefficients {
            a,
            b,
            s1: s(2, 3) * q(3, 4),
            t1: s(2, 3) * q(1, 2),
            s1p: -s(2, 3) * q(3, 4),
            t1p: d(1, 2) * s(1, 4) * s(3, 4),
            s2: s(1, 2) * s(2, 3) * q(2, 4),
            t2: s(1, 2) * s(2, 3) * q(1, 3),
            s2p: -s(1, 3) * s(2, 3) * s(3, 4) * d(2, 4),
            t2p: s(1, 3) * s(1, 4) * s(3, 4) * d(1, 3),
            s3: s(1, 2) * s(2, 4) * s(2, 3).powi(2) * (a2 - b2),
            t3: -s(2, 3) * t3_inner,
            u3: s(1, 3) * s(3, 4) * (s(2, 3).powi(2) * a2 - s(1, 4).powi(2) * b2),
            delta3,
        }
    }

    fn a2b2(&self) -> (f64, f64) {
        (self.a * self.a, self.b * self.b)
    }

    pub fn d1_prime(&self, p: f64) -> f64 {
        let (a2, b2) = self.a2b2();
        (self.s1 * a2 - self.t1 * b2) * p + self.s1p * a2 + self.t1p * b2
    }

    pub fn d2_prime(&self, p: f64) -> f64 {
        let (a2, b2) = self.a2b2();
        (self.s2 * a2 - self.t2 * b2) * p + self.s2p * a2 + self.t2p * b2
    }

    pub fn g(&self, p: f64) -> f64 {
        (self.s3 * p + self.t3) * p + self.u3
    }

    /// Root of `D1'`.
    pub fn p1(&self) -> f64 {
        let (a2, b2) = self.a2b2();
        -(self.s1p * a2 + self.t1p * b2) / (self.s1 * a2 - self.t1 * b2)
    }

    /// Root of `D2'`.
    pub fn p2(&self) -> f64 {
        let (a2, b2) = self.a2b2();
        -(self.s2p * a2 + self.t2p * b2) / (self.s2 * a2 - self.t2 * b2)
    }

    /// Minimum point `-T3 / (2 S3)` of `g`.
    pub fn vertex(&self) -> f64 {
        -self.t3 / (2.0 * self.s3)
    }

    pub fn delta3_from_coefficients(&self) -> f64 {
        self.t3 * self.t3 - 4.0 * self.s3 * self.u3
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PIntervalReport {
    pub case: PCase,
    pub r: f64,
    pub alpha2: f64,
    pub coefficients: PCoefficients,
    pub p1: f64,
    pub p2: f64,
    /// Roots of `g`, `p3 <= p4`. They coincide at `r = α2`.
    pub p3: f64,
    pub p4: f64,
    pub vertex: f64,
    pub g_p1: f64,
    pub g_p2: f64,
    /// `p2 < p1 < p3 < p4` (Case I) or `p3 < p4 < p2 < p1` (Case II).
    pub ordering_holds: bool,
    /// `p1 < vertex` (Case I) or `p2 > vertex` (Case II).
    pub vertex_bound_holds: bool,
    /// The open interval `(p3, p4)` of `p` with a definite Hessian; `None`
    /// at `r = α2`.
    pub feasible: Option<(f64, f64)>,
}

impl PIntervalReport {
    pub fn midpoint(&self) -> Option<f64> {
        self.feasible.map(|(lo, hi)| 0.5 * (lo + hi))
    }
}

pub fn p_interval(lam: &InertiaSpectrum, a: f64, b: f64) -> Result<PIntervalReport> {
    p_interval_with(lam, a, b, None)
}

/// `hint = Some(BoundaryHint::Alpha2)` declares `r = α2` exactly.
pub fn p_interval_with(
    lam: &InertiaSpectrum,
    a: f64,
    b: f64,
    hint: Option<BoundaryHint>,
) -> Result<PIntervalReport> {
    if !(a.is_finite() && b.is_finite()) || a == 0.0 {
        return Err(Error::RatioOutOfRange(f64::NAN));
    }
    let r = b * b / (a * a);
    if !(0.0..1.0).contains(&r) {
        return Err(Error::RatioOutOfRange(r));
    }
    let gap = lam.square_sum_gap();
    if gap == 0.0 {
        return Err(Error::DegenerateParameters(
            "λ1² + λ4² = λ2² + λ3²: α2 = 1 and no ratio is certifiable".to_string(),
        ));
    }
    let alpha2 = f_tilde(lam).alpha2;
    let at_boundary = match hint {
        Some(BoundaryHint::Alpha2) => true,
        Some(BoundaryHint::Alpha1) => {
            return Err(Error::InvalidArgument("the p-interval is defined for r >= α2".to_string()))
        }
        None => (r - alpha2).abs() <= BOUNDARY_ABS,
    };
    if !at_boundary && r < alpha2 {
        return Err(Error::RatioOutOfRange(r));
    }
    let case = if gap < 0.0 { PCase::CaseI } else { PCase::CaseII };

    let c = PCoefficients::new(lam, a, b);
    let disc = if at_boundary { 0.0 } else { c.delta3 };
    let (p3, p4) = solve_quadratic_with_discriminant(c.s3, c.t3, c.u3, disc)
        .real()
        .ok_or_else(|| Error::DegenerateParameters(format!("g has no real roots at r = {r}")))?;
    let (p1, p2, vertex) = (c.p1(), c.p2(), c.vertex());
    let ordering_holds = match case {
        PCase::CaseI => p2 < p1 && p1 < p3 && p3 <= p4,
        PCase::CaseII => p3 <= p4 && p4 < p2 && p2 < p1,
    };
    let vertex_bound_holds = match case {
        PCase::CaseI => p1 < vertex,
        PCase::CaseII => p2 > vertex,
    };
    let feasible = (!at_boundary && p3 < p4).then_some((p3, p4));
    Ok(PIntervalReport {
        case,
        r,
        alpha2,
        coefficients: c,
        p1,
        p2,
        p3,
        p4,
        vertex,
        g_p1: c.g(p1),
        g_p2: c.g(p2),
        ordering_holds,
        vertex_bound_holds,
        feasible,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transcription_reference_values() {
        // λ = (4, 3, 2, 1), a = 1, b² = 0.95, coefficients expanded by hand.
        let c = PCoefficients::new(&InertiaSpectrum::reference(), 1.0, 0.95_f64.sqrt());
        assert_eq!((c.s1, c.t1, c.s1p), (15.0, 35.0, -15.0));
        assert_eq!(c.t1p, 1.0 * 5.0 * 3.0);
        assert_eq!((c.s2, c.t2), (7.0 * 5.0 * 8.0, 7.0 * 5.0 * 12.0));
        assert_eq!((c.s2p, c.t2p), (-6.0 * 5.0 * 3.0 * 2.0, 6.0 * 5.0 * 3.0 * 2.0));
        let a2mb2 = 1.0 - 0.95;
        assert!((c.s3 - 7.0 * 4.0 * 25.0 * a2mb2).abs() < 1e-12);
        let t3 = -5.0 * (5.0 * (28.0 + 18.0) - 5.0 * (42.0 + 12.0) * 0.95);
        assert!((c.t3 - t3).abs() < 1e-12);
        assert!((c.u3 - 18.0 * (25.0 - 25.0 * 0.95)).abs() < 1e-12);
    }

    #[test]
    fn delta3_identity() {
        for (lam, a, b) in [
            (InertiaSpectrum::reference(), 1.0, 0.95_f64.sqrt()),
            (InertiaSpectrum::new(4.0, 3.8, 3.5, 1.0).unwrap(), 2.0, 1.9),
            (InertiaSpectrum::new(3.0, 1.0, 0.2, -0.1).unwrap(), 0.7, 0.5),
        ] {
            let c = PCoefficients::new(&lam, a, b);
            let direct = c.delta3_from_coefficients();
            let scale = c.t3 * c.t3 + (4.0 * c.s3 * c.u3).abs();
            assert!((direct - c.delta3).abs() <= 1e-12 * scale, "{direct} vs {}", c.delta3);
        }
    }

    #[test]
    fn printed_t3_breaks_delta3_identity() {
        let lam = InertiaSpectrum::reference();
        let c = PCoefficients::new(&lam, 1.0, 0.95_f64.sqrt());
        let printed = 2.0 * c.t3;
        let direct = printed * printed - 4.0 * c.s3 * c.u3;
        assert!((direct - c.delta3).abs() > 1e-3 * c.delta3.abs());
    }

    #[test]
    fn case_two_reference_ordering() {
        let rep = p_interval(&InertiaSpectrum::reference(), 1.0, 0.95_f64.sqrt()).unwrap();
        assert_eq!(rep.case, PCase::CaseII);
        assert!(rep.ordering_holds && rep.vertex_bound_holds);
        assert!(rep.g_p1 > 0.0 && rep.g_p2 > 0.0);
        let p = rep.midpoint().unwrap();
        let c = rep.coefficients;
        assert!(c.d1_prime(p) > 0.0 && c.d2_prime(p) > 0.0 && c.g(p) < 0.0);
    }

    #[test]
    fn case_one_ordering() {
        let lam = InertiaSpectrum::new(4.0, 3.8, 3.5, 1.0).unwrap();
        let alpha2 = f_tilde(&lam).alpha2;
        let r: f64 = 0.5 * (alpha2 + 1.0);
        let rep = p_interval(&lam, 1.0, r.sqrt()).unwrap();
        assert_eq!(rep.case, PCase::CaseI);
        assert!(rep.ordering_holds && rep.vertex_bound_holds);
        assert!(rep.feasible.is_some());
    }

    #[test]
    fn empty_at_alpha2_and_rejected_below() {
        let lam = InertiaSpectrum::reference();
        let alpha2 = f_tilde(&lam).alpha2;
        let rep = p_interval_with(&lam, 1.0, alpha2.sqrt(), Some(BoundaryHint::Alpha2)).unwrap();
        assert!(rep.feasible.is_none());
        assert!(rep.coefficients.delta3.abs() <= 1e-9 * rep.coefficients.t3.powi(2));
        assert!(p_interval(&lam, 1.0, 0.5).is_err());
    }
}
