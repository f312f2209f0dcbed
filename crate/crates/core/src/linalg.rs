//! Small dense helpers: the orbit tangent basis, minors and eigenvalues.

use nalgebra::{Complex, Matrix4, Matrix6, Matrix6x4, SMatrix, Vector6};

use crate::error::{Error, Result};
use crate::state::So4State;

/// Relative size below which a Gram–Schmidt residual counts as zero.
const GS_DROP: f64 = 1e-6;

/// Orthonormal basis of `W = ker dC1(M) ∩ ker dC2(M)` as the columns of a 6×4
/// matrix.
///
/// Construction: orthonormalize `∇C1 = M`, `∇C2 = (y, x)`, then extend with
/// the coordinate directions `x1, …, y3` in order, dropping those already in
/// the span; the four extension vectors are the basis. At a Cartan point of
/// family `t_k` this reproduces the four inactive coordinate directions in
/// index order. The result depends only on `M`, bit for bit.
pub fn orbit_tangent_basis(m: &So4State) -> Result<Matrix6x4<f64>> {
    let g1 = m.to_vector();
    let g2 = m.swapped().to_vector();
    let n1 = g1.norm();
    if n1 == 0.0 {
        return Err(Error::DependentCasimirGradients);
    }
    let q1 = g1 / n1;
    let r2 = g2 - q1 * q1.dot(&g2);
    let r2 = r2 - q1 * q1.dot(&r2);
    if r2.norm() <= 1e-10 * g2.norm() {
        return Err(Error::DependentCasimirGradients);
    }
    let q2 = r2.normalize();

    let mut spanned = vec![q1, q2];
    let mut ext: Vec<Vector6<f64>> = Vec::with_capacity(4);
    for j in 0..6 {
        if ext.len() == 4 {
            break;
        }
        if let Some(v) = orthogonal_residual(&Vector6::ith(j, 1.0), &spanned) {
            spanned.push(v);
            ext.push(v);
        }
    }
    if ext.len() < 4 {
        // Sequential order left a near-dependent direction; pick by largest residual.
        spanned.truncate(2);
        ext.clear();
        let mut used = [false; 6];
        while ext.len() < 4 {
            let mut best: Option<(usize, f64)> = None;
            for (j, taken) in used.iter().enumerate() {
                if *taken {
                    continue;
                }
                let mut r = Vector6::ith(j, 1.0);
                for q in &spanned {
                    r -= q * q.dot(&r);
                }
                let nr = r.norm();
                if best.is_none_or(|(_, b)| nr > b) {
                    best = Some((j, nr));
                }
            }
            let (j, _) = best.ok_or(Error::DependentCasimirGradients)?;
            used[j] = true;
            let v = orthogonal_residual_unchecked(&Vector6::ith(j, 1.0), &spanned);
            spanned.push(v);
            ext.push(v);
        }
    }
    Ok(Matrix6x4::from_columns(&ext))
}

fn orthogonal_residual(v: &Vector6<f64>, basis: &[Vector6<f64>]) -> Option<Vector6<f64>> {
    let r = project_out_twice(v, basis);
    (r.norm() > GS_DROP).then(|| r.normalize())
}

fn orthogonal_residual_unchecked(v: &Vector6<f64>, basis: &[Vector6<f64>]) -> Vector6<f64> {
    project_out_twice(v, basis).normalize()
}

fn project_out_twice(v: &Vector6<f64>, basis: &[Vector6<f64>]) -> Vector6<f64> {
    let mut r = *v;
    for _ in 0..2 {
        for q in basis {
            r -= q * q.dot(&r);
        }
    }
    r
}

/// `Qᵀ A Q` for a 6×6 `A` on a basis `Q` of `W`.
pub fn compress(a: &Matrix6<f64>, basis: &Matrix6x4<f64>) -> Matrix4<f64> {
    basis.transpose() * a * basis
}

/// Determinants of the upper-left 1×1 through 4×4 blocks.
pub fn leading_minors(a: &Matrix4<f64>) -> [f64; 4] {
    [
        a[(0, 0)],
        a.fixed_view::<2, 2>(0, 0).determinant(),
        a.fixed_view::<3, 3>(0, 0).determinant(),
        a.determinant(),
    ]
}

/// Eigenvalues of a symmetric 4×4 matrix, ascending.
pub fn symmetric_eigenvalues(a: &Matrix4<f64>) -> [f64; 4] {
    let mut ev: Vec<f64> = a.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    [ev[0], ev[1], ev[2], ev[3]]
}

/// Eigenvalues of a general real square matrix, sorted by real then
/// imaginary part.
///
/// Delegates to `faer`: the nalgebra Schur iteration fails to deflate
/// focus-focus quadruples `±A ± iB`, where all four eigenvalues share one
/// modulus.
pub fn eigenvalues<const N: usize>(a: &SMatrix<f64, N, N>) -> Result<[Complex<f64>; N]> {
    let m = faer::Mat::<f64>::from_fn(N, N, |i, j| a[(i, j)]);
    let ev = m.eigenvalues().map_err(|_| Error::EigenSolverFailed)?;
    if ev.len() != N || ev.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::EigenSolverFailed);
    }
    let mut out: [Complex<f64>; N] = std::array::from_fn(|i| Complex::new(ev[i].re, ev[i].im));
    sort_complex(&mut out);
    Ok(out)
}

pub fn eigenvalues4(a: &Matrix4<f64>) -> Result<[Complex<f64>; 4]> {
    eigenvalues(a)
}

pub fn eigenvalues6(a: &Matrix6<f64>) -> Result<[Complex<f64>; 6]> {
    eigenvalues(a)
}

/// Order-independent distance between two spectra: the smallest, over all
/// pairings, of the largest paired difference. Sorting alone cannot be used
/// because round-off in a vanishing real part flips the order of conjugates.
pub fn spectrum_distance(a: &[Complex<f64>], b: &[Complex<f64>]) -> f64 {
    fn best(a: &[Complex<f64>], b: &mut Vec<Complex<f64>>) -> f64 {
        let Some((first, rest)) = a.split_first() else { return 0.0 };
        let mut out = f64::INFINITY;
        for i in 0..b.len() {
            let z = b.swap_remove(i);
            let d = (first - z).norm();
            if d < out {
                out = out.min(d.max(best(rest, b)));
            }
            b.push(z);
            let last = b.len() - 1;
            b.swap(i, last);
        }
        out
    }
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    best(a, &mut b.to_vec())
}

pub fn sort_complex(v: &mut [Complex<f64>]) {
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

/// Euclidean distance from `v` to the span of `vectors` (Gram–Schmidt projection).
pub fn distance_to_span(v: &So4State, vectors: &[So4State]) -> f64 {
    let mut basis: Vec<Vector6<f64>> = Vec::new();
    for w in vectors {
        let r = project_out_twice(&w.to_vector(), &basis);
        if r.norm() > 1e-14 * w.norm().max(1e-300) {
            basis.push(r.normalize());
        }
    }
    project_out_twice(&v.to_vector(), &basis).norm()
}
