//! The equilibrium set `E = t1 ∪ t2 ∪ t3 ∪ s+ ∪ s-` and the twelve Cartan
//! equilibria on a regular adjoint orbit.

use std::fmt;

use serde::Serialize;

use crate::body::vector_field;
use crate::error::{Error, Result};
use crate::inertia::InertiaSpectrum;
use crate::linalg::distance_to_span;
use crate::state::So4State;
use crate::tolerance::EQUILIBRIUM_TOL;

/// Casimir levels `(c1, c2)` of a regular adjoint orbit: `c1 > 0`, `c1 > |c2|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrbitParams {
    c1: f64,
    c2: f64,
}

impl OrbitParams {
    pub fn new(c1: f64, c2: f64) -> Result<Self> {
        if !(c1.is_finite() && c2.is_finite() && c1 > 0.0 && c1 > c2.abs()) {
            return Err(Error::SingularOrbit { c1, c2 });
        }
        Ok(OrbitParams { c1, c2 })
    }

    /// The orbit through the Cartan point with parameters `(a, b)`.
    pub fn from_ab(a: f64, b: f64) -> Result<Self> {
        Self::new(0.5 * (a * a + b * b), a * b)
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }

    pub fn c2(&self) -> f64 {
        self.c2
    }

    /// Conditions under which the stability results degenerate; `b = 0`
    /// (i.e. `c2 = 0`) puts `b²/a²` on the boundary `0`.
    pub fn flags(&self) -> Vec<OrbitFlag> {
        let mut flags = Vec::new();
        if self.c2 == 0.0 {
            flags.push(OrbitFlag::BZero);
        }
        flags
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OrbitFlag {
    /// `c2 = 0`, hence `b = 0`.
    BZero,
}

/// `(a, b)` with `½(a² + b²) = c1` and `ab = c2`; `a > |b|`.
pub fn ab_from_orbit(orbit: &OrbitParams) -> (f64, f64) {
    let p = (orbit.c1 + orbit.c2).sqrt();
    let q = (orbit.c1 - orbit.c2).sqrt();
    let r = std::f64::consts::FRAC_1_SQRT_2;
    (r * (p + q), r * (p - q))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum EquilibriumFamily {
    T1,
    T2,
    T3,
    SPlus,
    SMinus,
}

impl EquilibriumFamily {
    pub const CARTAN: [EquilibriumFamily; 3] =
        [EquilibriumFamily::T1, EquilibriumFamily::T2, EquilibriumFamily::T3];

    /// Coordinate indices `(x_k, y_k)` spanning a Cartan family.
    pub fn active_coordinates(&self) -> Option<(usize, usize)> {
        match self {
            EquilibriumFamily::T1 => Some((0, 3)),
            EquilibriumFamily::T2 => Some((1, 4)),
            EquilibriumFamily::T3 => Some((2, 5)),
            _ => None,
        }
    }

    pub fn index(&self) -> Option<usize> {
        match self {
            EquilibriumFamily::T1 => Some(1),
            EquilibriumFamily::T2 => Some(2),
            EquilibriumFamily::T3 => Some(3),
            _ => None,
        }
    }
}

/// Position of a Cartan point inside its Weyl group orbit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum WeylImage {
    /// `M(a, b)`
    Identity,
    /// `M(-a, -b)`
    Negated,
    /// `M(b, a)`
    Swapped,
    /// `M(-b, -a)`
    SwappedNegated,
}

impl WeylImage {
    pub const ALL: [WeylImage; 4] =
        [WeylImage::Identity, WeylImage::Negated, WeylImage::Swapped, WeylImage::SwappedNegated];

    pub fn apply(&self, a: f64, b: f64) -> (f64, f64) {
        match self {
            WeylImage::Identity => (a, b),
            WeylImage::Negated => (-a, -b),
            WeylImage::Swapped => (b, a),
            WeylImage::SwappedNegated => (-b, -a),
        }
    }

    fn slot_label(&self) -> &'static str {
        match self {
            WeylImage::Identity => "a,b",
            WeylImage::Negated => "-a,-b",
            WeylImage::Swapped => "b,a",
            WeylImage::SwappedNegated => "-b,-a",
        }
    }
}

/// A classified equilibrium: the state is `a` on `x_k` and `b` on `y_k` for
/// family `t_k`, zero elsewhere. For the twelve Cartan points `weyl` records
/// which image of the orbit's `(a, b)` it is.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Equilibrium {
    pub family: EquilibriumFamily,
    pub a: f64,
    pub b: f64,
    pub state: So4State,
    pub weyl: Option<WeylImage>,
}

impl Equilibrium {
    pub fn cartan(family: EquilibriumFamily, a: f64, b: f64) -> Result<Self> {
        let (ix, iy) = family.active_coordinates().ok_or_else(|| {
            Error::InvalidArgument(format!("{family:?} is not a Cartan family"))
        })?;
        let mut state = So4State::ZERO;
        state[ix] = a;
        state[iy] = b;
        Ok(Equilibrium { family, a, b, state, weyl: None })
    }

    /// `|x_k| > |y_k|`: the larger parameter sits in the `x_k` slot.
    pub fn is_slot_major(&self) -> bool {
        self.a.abs() > self.b.abs()
    }

    /// Short name such as `M1(b,a)`.
    pub fn label(&self) -> String {
        match (self.family.index(), self.weyl) {
            (Some(k), Some(w)) => format!("M{k}({})", w.slot_label()),
            (Some(k), None) => format!("M{k}({},{})", self.a, self.b),
            (None, _) => format!("{:?}", self.family),
        }
    }
}

impl fmt::Display for Equilibrium {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// The four Weyl images of `(a, b)` in each of `t1`, `t2`, `t3`, in that order.
pub fn cartan_equilibria(orbit: &OrbitParams) -> Vec<Equilibrium> {
    let (a, b) = ab_from_orbit(orbit);
    let mut out = Vec::with_capacity(12);
    for family in EquilibriumFamily::CARTAN {
        for weyl in WeylImage::ALL {
            let (p, q) = weyl.apply(a, b);
            let mut e = Equilibrium::cartan(family, p, q).expect("Cartan family");
            e.weyl = Some(weyl);
            out.push(e);
        }
    }
    out
}

/// Looks up one of the twelve points.
pub fn cartan_point(orbit: &OrbitParams, family: EquilibriumFamily, weyl: WeylImage) -> Result<Equilibrium> {
    let (a, b) = ab_from_orbit(orbit);
    let (p, q) = weyl.apply(a, b);
    let mut e = Equilibrium::cartan(family, p, q)?;
    e.weyl = Some(weyl);
    Ok(e)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SFamilySign {
    Plus,
    Minus,
}

impl SFamilySign {
    fn sign(&self) -> f64 {
        match self {
            SFamilySign::Plus => 1.0,
            SFamilySign::Minus => -1.0,
        }
    }
}

/// Spanning vectors of `s±`:
/// `E1/(λ1+λ4) ± E4/(λ2+λ3)`, `E2/(λ2+λ4) ± E5/(λ1+λ3)`, `E3/(λ3+λ4) ± E6/(λ1+λ2)`.
pub fn s_family_basis(sign: SFamilySign, lam: &InertiaSpectrum) -> [So4State; 3] {
    let s = sign.sign();
    let mut basis = [So4State::ZERO; 3];
    let pairs = [((1, 4), (2, 3)), ((2, 4), (1, 3)), ((3, 4), (1, 2))];
    for (k, ((i, j), (p, q))) in pairs.into_iter().enumerate() {
        basis[k][k] = 1.0 / lam.sum(i, j);
        basis[k][k + 3] = s / lam.sum(p, q);
    }
    basis
}

/// `‖X(M)‖∞ <= tol · max(1, ‖M‖²)`.
pub fn is_equilibrium(m: &So4State, lam: &InertiaSpectrum, tol: f64) -> bool {
    vector_field(m, lam).max_abs() <= tol * m.norm_squared().max(1.0)
}

/// [`is_equilibrium`] at the default tolerance.
pub fn is_equilibrium_default(m: &So4State, lam: &InertiaSpectrum) -> bool {
    is_equilibrium(m, lam, EQUILIBRIUM_TOL)
}

/// Distance from `m` to each component of `E`, smallest first.
pub fn distances_to_equilibrium_set(m: &So4State, lam: &InertiaSpectrum) -> Vec<(EquilibriumFamily, f64)> {
    let mut out = Vec::with_capacity(5);
    for family in EquilibriumFamily::CARTAN {
        let (ix, iy) = family.active_coordinates().unwrap();
        let d = (0..6).filter(|&k| k != ix && k != iy).map(|k| m[k] * m[k]).sum::<f64>().sqrt();
        out.push((family, d));
    }
    out.push((EquilibriumFamily::SPlus, distance_to_span(m, &s_family_basis(SFamilySign::Plus, lam))));
    out.push((EquilibriumFamily::SMinus, distance_to_span(m, &s_family_basis(SFamilySign::Minus, lam))));
    out.sort_by(|a, b| a.1.total_cmp(&b.1));
    out
}
