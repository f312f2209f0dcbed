//! Tolerances and the single scaling rule used for identity checks.
//!
//! Every identity `lhs == rhs` is checked as
//!
//! ```text
//! |lhs - rhs| <= rel * scale
//! ```
//!
//! where `scale` is the sum of the magnitudes of the terms that were added
//! to form `lhs - rhs` (so cancellation does not make the check stricter than
//! the arithmetic allows). For a bracket `½ Tr(M [A, B])` the scale is
//! `|M| |A| |B|`, which bounds every partial product. A zero scale falls
//! back to an absolute comparison against `rel`.

/// Relative tolerance for algebraic identities in double precision.
pub const IDENTITY_REL: f64 = 1e-10;

/// Relative tolerance on `‖X(M)‖∞ / max(1, ‖M‖²)` for equilibrium membership.
pub const EQUILIBRIUM_TOL: f64 = 1e-10;

/// Absolute tolerance on `r - α_k` for boundary membership of `r = b²/a²`.
pub const BOUNDARY_ABS: f64 = 1e-9;

/// Absolute pairing tolerance for eigenvalues, applied after scaling by
/// `max(1, max |λ|)`.
pub const EIGEN_PAIRING_ABS: f64 = 1e-8;

/// Relative threshold on a real part before an eigenvalue counts as
/// unstable when reading a numerically computed spectrum. Double roots split
/// by `O(√ε)` under perturbation, hence the looser value.
pub const NUMERIC_UNSTABLE_REL: f64 = 1e-6;

/// Relative threshold on `|det|` for a degenerate restricted Hessian.
pub const HESSIAN_DEGENERATE_REL: f64 = 1e-12;

/// `|lhs - rhs| <= rel * scale`, with `scale` clamped away from zero.
pub fn close(lhs: f64, rhs: f64, scale: f64, rel: f64) -> bool {
    (lhs - rhs).abs() <= rel * scale.abs().max(1.0e-300) || lhs == rhs
}

/// `|lhs - rhs| / scale`, the quantity bounded by [`close`].
pub fn scaled_error(lhs: f64, rhs: f64, scale: f64) -> f64 {
    if lhs == rhs {
        return 0.0;
    }
    (lhs - rhs).abs() / scale.abs().max(1.0e-300)
}

/// Symmetric relative difference `|a - b| / max(|a|, |b|)`; zero when both are zero.
pub fn relative_difference(a: f64, b: f64) -> f64 {
    let m = a.abs().max(b.abs());
    if m == 0.0 {
        0.0
    } else {
        (a - b).abs() / m
    }
}
