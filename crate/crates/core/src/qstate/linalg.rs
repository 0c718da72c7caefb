//! Small dense helpers shared by the state algebra and the optimizers.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub(crate) const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Hermitian eigendecomposition with eigenvalues sorted in decreasing order.
/// The input is symmetrized first so tiny anti-Hermitian noise is ignored.
pub fn eigh(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    let h = (m + m.adjoint()) * c(0.5, 0.0);
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, k| eig.eigenvectors[(r, order[k])]);
    (values, vectors)
}

/// Eigenvalues of a Hermitian matrix, decreasing.
pub fn eigvalsh(m: &CMatrix) -> Vec<f64> {
    let h = (m + m.adjoint()) * c(0.5, 0.0);
    let mut v: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// Shannon entropy (bits) of a spectrum; non-positive entries contribute 0.
pub fn entropy_of_spectrum(values: &[f64]) -> f64 {
    // `+ 0.0` turns a `-0.0` sum into `0.0`.
    values.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.log2()).sum::<f64>() + 0.0
}

/// Binary entropy in bits.
pub fn binary_entropy(x: f64) -> f64 {
    entropy_of_spectrum(&[x, 1.0 - x])
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

/// Real inner product `Re tr(a† b)` used on complex parameter matrices.
pub fn real_inner(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.re * y.re + x.im * y.im).sum()
}

/// Orthonormal factor of the polar decomposition, `X (X†X)^{-1/2}`.
/// Returns `None` when `X` is (numerically) rank deficient.
pub fn polar(x: &CMatrix) -> Option<CMatrix> {
    let gram = x.adjoint() * x;
    let (vals, vecs) = eigh(&gram);
    let floor = 1e-14 * vals.first().copied().unwrap_or(0.0).max(1e-300);
    if vals.iter().any(|&v| v <= floor) {
        return None;
    }
    let inv_sqrt = DMatrix::from_diagonal(&DVector::from_iterator(
        vals.len(),
        vals.iter().map(|&v| c(1.0 / v.sqrt(), 0.0)),
    ));
    Some(x * (&vecs * inv_sqrt * vecs.adjoint()))
}

/// Largest entry-wise deviation of `V†V` from the identity.
pub fn isometry_defect(v: &CMatrix) -> f64 {
    let g = v.adjoint() * v;
    max_abs_diff(&g, &CMatrix::identity(v.ncols(), v.ncols()))
}

/// Entropy of `M M†` (equivalently `M† M`) in bits, computed on the smaller side.
pub fn gram_entropy(m: &CMatrix) -> f64 {
    let g = if m.nrows() <= m.ncols() { m * m.adjoint() } else { m.adjoint() * m };
    entropy_of_spectrum(&eigvalsh(&g))
}

/// Entropy `-Σ μ log2 μ` of the spectrum of `M M†` together with the matrix `Z`
/// such that `2 Z` is the real gradient, with respect to `M`, of
/// `tr F(M M†)` where `F'(μ) = -(log2 μ + shift)`.
///
/// `shift = 1/ln 2` differentiates the entropy itself; other shifts absorb
/// normalization terms (for example `-log2 p` for `p·S(ρ/p)`).
pub fn gram_entropy_with_grad(m: &CMatrix, shift: f64) -> (f64, CMatrix) {
    let rows_side = m.nrows() <= m.ncols();
    let g = if rows_side { m * m.adjoint() } else { m.adjoint() * m };
    let (vals, vecs) = eigh(&g);
    let mut h = CMatrix::zeros(vals.len(), vals.len());
    for (k, &mu) in vals.iter().enumerate() {
        if mu <= 0.0 {
            continue;
        }
        let w = -(mu.log2() + shift);
        let col = vecs.column(k);
        h += (col * col.adjoint()) * c(w, 0.0);
    }
    let z = if rows_side { h * m } else { m * h };
    (entropy_of_spectrum(&vals), z)
}
