//! Small dense helpers for Hermitian matrices.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Eigendecomposition of a Hermitian matrix: `(eigenvalues, eigenvectors)`
/// with columns of the returned matrix being the eigenvectors, eigenvalues
/// ascending.
pub fn eigh(h: &DMatrix<Complex64>) -> (Vec<f64>, DMatrix<Complex64>) {
    debug_assert!(is_hermitian(h, 1e-9), "eigh called on a non-Hermitian matrix");
    let se = h.clone().symmetric_eigen();
    // nalgebra does not sort; sort ascending for a stable convention.
    let n = h.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].partial_cmp(&se.eigenvalues[b]).unwrap());
    let values: Vec<f64> = order.iter().map(|&a| se.eigenvalues[a]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (col, &a) in order.iter().enumerate() {
        vectors.set_column(col, &se.eigenvectors.column(a));
    }
    (values, vectors)
}

/// `exp(-i * scale * h)` for Hermitian `h`, via eigendecomposition.
pub fn exp_i_hermitian(h: &DMatrix<Complex64>, scale: f64) -> DMatrix<Complex64> {
    let (values, vectors) = eigh(h);
    let n = h.nrows();
    let phases = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        n,
        values.iter().map(|&w| Complex64::from_polar(1.0, -scale * w)),
    ));
    &vectors * phases * vectors.adjoint()
}

pub fn is_hermitian(m: &DMatrix<Complex64>, tol: f64) -> bool {
    if m.nrows() != m.ncols() {
        return false;
    }
    let diff = m - m.adjoint();
    diff.iter().all(|z| z.norm() < tol)
}

/// Max-norm distance of `U^dagger U` from the identity.
pub fn unitarity_defect(u: &DMatrix<Complex64>) -> f64 {
    let mut g = u.adjoint() * u;
    for d in 0..g.nrows() {
        g[(d, d)] -= Complex64::ONE;
    }
    g.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_of_pauli_x_matches_closed_form() {
        let h = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::ZERO,
                Complex64::ONE,
                Complex64::ONE,
                Complex64::ZERO,
            ],
        );
        let t = 0.37;
        let u = exp_i_hermitian(&h, t);
        // exp(-i t X) = cos(t) I - i sin(t) X
        assert!((u[(0, 0)] - Complex64::new(t.cos(), 0.0)).norm() < 1e-12);
        assert!((u[(0, 1)] - Complex64::new(0.0, -t.sin())).norm() < 1e-12);
        assert!(unitarity_defect(&u) < 1e-12);
    }

    #[test]
    fn eigh_sorts_ascending() {
        let h = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(2.0, 0.0),
                Complex64::ZERO,
                Complex64::ZERO,
                Complex64::new(-1.0, 0.0),
            ],
        );
        let (w, _) = eigh(&h);
        assert!(w[0] < w[1]);
        assert!((w[0] + 1.0).abs() < 1e-12 && (w[1] - 2.0).abs() < 1e-12);
    }
}
