//! Small dense complex linear algebra shared by the evolution and spectrum
//! code.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Eigen-decomposition of a Hermitian matrix with eigenvalues ascending and
/// eigenvectors in matching column order.
pub fn eigh(h: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = SymmetricEigen::new(h.clone());
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(h.nrows(), h.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Ascending eigenvalues of a Hermitian matrix. Real matrices take a cheaper
/// real-symmetric path.
pub fn eigvalsh(h: &CMatrix) -> Vec<f64> {
    let mut values: Vec<f64> = if h.iter().all(|z| z.im == 0.0) {
        h.map(|z| z.re).symmetric_eigenvalues().iter().copied().collect()
    } else {
        h.clone().symmetric_eigenvalues().iter().copied().collect()
    };
    values.sort_by(f64::total_cmp);
    values
}

/// `exp(-i·h·t)` for Hermitian `h`, via its eigen-decomposition.
pub fn propagator(h: &CMatrix, t: f64) -> CMatrix {
    let (values, vectors) = eigh(h);
    let phases = DVector::from_iterator(values.len(), values.iter().map(|e| (-I * e * t).exp()));
    let mut scaled = vectors.clone();
    for (mut col, phase) in scaled.column_iter_mut().zip(phases.iter()) {
        col *= *phase;
    }
    scaled * vectors.adjoint()
}

/// `exp(-i·diag(d)·t)` as a dense matrix.
pub fn diagonal_propagator(d: &[f64], t: f64) -> CMatrix {
    CMatrix::from_diagonal(&DVector::from_iterator(d.len(), d.iter().map(|e| (-I * e * t).exp())))
}

/// Largest elementwise modulus of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Spectral norm of a general complex matrix.
pub fn operator_norm(a: &CMatrix) -> f64 {
    let gram = a.adjoint() * a;
    eigvalsh(&gram).last().copied().unwrap_or(0.0).max(0.0).sqrt()
}

pub fn is_unitary(u: &CMatrix, tol: f64) -> bool {
    let n = u.nrows();
    max_abs_diff(&(u.adjoint() * u), &CMatrix::identity(n, n)) <= tol
}
