//! Real quadratic roots without catastrophic cancellation.

/// Roots of `a t² + b t + c` with `a ≠ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QuadraticRoots {
    /// Two real roots, `lo <= hi`.
    Real { lo: f64, hi: f64 },
    /// A conjugate pair `re ± i·im` with `im > 0`.
    Complex { re: f64, im: f64 },
}

impl QuadraticRoots {
    pub fn real(&self) -> Option<(f64, f64)> {
        match *self {
            QuadraticRoots::Real { lo, hi } => Some((lo, hi)),
            QuadraticRoots::Complex { .. } => None,
        }
    }
}

/// Solves `a t² + b t + c = 0` for `a ≠ 0`.
///
/// The larger-magnitude root is computed as `q / a` with
/// `q = -(b + sign(b) √Δ) / 2`; its partner comes from the product `c / q`.
/// A discriminant within rounding of zero is clamped to a double root.
pub fn solve_quadratic(a: f64, b: f64, c: f64) -> QuadraticRoots {
    solve_quadratic_with_discriminant(a, b, c, b * b - 4.0 * a * c)
}

/// Same as [`solve_quadratic`], with the discriminant supplied by the caller
/// (typically a factored closed form whose sign is more reliable than
/// `b² - 4ac` near a double root).
pub fn solve_quadratic_with_discriminant(a: f64, b: f64, c: f64, disc: f64) -> QuadraticRoots {
    debug_assert!(a != 0.0, "leading coefficient must be nonzero");
    let scale = (b * b).max((4.0 * a * c).abs());
    if disc < 0.0 && disc.abs() > 4.0 * f64::EPSILON * scale {
        return QuadraticRoots::Complex {
            re: -b / (2.0 * a),
            im: (-disc).sqrt() / (2.0 * a.abs()),
        };
    }
    let sqrt_disc = disc.max(0.0).sqrt();
    let q = -0.5 * (b + b.signum() * sqrt_disc);
    let (r1, r2) = if q == 0.0 {
        // b = 0 and Δ = 0, so c = 0 as well.
        (0.0, 0.0)
    } else {
        (q / a, c / q)
    };
    QuadraticRoots::Real { lo: r1.min(r2), hi: r1.max(r2) }
}
