//! Dense diagonalization oracle for small circuits.

use crate::error::Error;
use crate::hamiltonian::{Csr, CsrStorage, SparseHermitian};
use crate::Result;
use nalgebra::DMatrix;
use num_complex::Complex64;

pub fn to_dense_real(csr: &Csr<f64>) -> DMatrix<f64> {
    let n = csr.dim;
    let mut m = DMatrix::<f64>::zeros(n, n);
    for r in 0..n {
        for k in csr.row_ptr[r]..csr.row_ptr[r + 1] {
            m[(r, csr.cols[k] as usize)] = csr.vals[k];
        }
    }
    m
}

/// Eigendecomposition with ascending eigenvalues.
pub fn eigh_sorted(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = m.clone().symmetric_eigen();
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::<f64>::zeros(n, n);
    for (new, &old) in order.iter().enumerate() {
        vectors.set_column(new, &eig.eigenvectors.column(old));
    }
    (values, vectors)
}

/// Spectrum and eigenvectors of a complex Hermitian CSR via the real
/// embedding [[A, -B], [B, A]]; each complex eigenvalue appears twice in the
/// embedding, so every other level is reported.
pub fn eigh_complex_embedded(csr: &Csr<Complex64>) -> (Vec<f64>, Vec<Vec<Complex64>>) {
    let n = csr.dim;
    let mut m = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for r in 0..n {
        for k in csr.row_ptr[r]..csr.row_ptr[r + 1] {
            let c = csr.cols[k] as usize;
            let v = csr.vals[k];
            m[(r, c)] = v.re;
            m[(n + r, n + c)] = v.re;
            m[(r, n + c)] = -v.im;
            m[(n + r, c)] = v.im;
        }
    }
    let (values, vectors) = eigh_sorted(&m);
    let mut out_vals = Vec::with_capacity(n);
    let mut out_vecs = Vec::with_capacity(n);
    for k in (0..2 * n).step_by(2) {
        out_vals.push(values[k]);
        let col = vectors.column(k);
        let mut v: Vec<Complex64> = (0..n)
            .map(|i| Complex64::new(col[i], col[n + i]))
            .collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            v.iter_mut().for_each(|z| *z /= norm);
        }
        out_vecs.push(v);
    }
    (out_vals, out_vecs)
}

/// Full spectrum of the assembled matrix, inert configurations included.
pub fn dense_spectrum(h: &SparseHermitian) -> Result<Vec<f64>> {
    if h.dim() > super::DENSE_FALLBACK_DIM {
        return Err(Error::DimensionGuard {
            dim: h.dim() as u128,
            max: super::DENSE_FALLBACK_DIM,
        });
    }
    match h.storage() {
        CsrStorage::Real(csr) => Ok(eigh_sorted(&to_dense_real(csr)).0),
        CsrStorage::Complex(csr) => Ok(eigh_complex_embedded(csr).0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_complex_matches_hand_solution() {
        // H = [[1, -i], [i, 1]]: eigenvalues 0 and 2.
        let csr = Csr {
            dim: 2,
            row_ptr: vec![0, 2, 4],
            cols: vec![0, 1, 0, 1],
            vals: vec![
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, -1.0),
                Complex64::new(0.0, 1.0),
                Complex64::new(1.0, 0.0),
            ],
        };
        let (vals, vecs) = eigh_complex_embedded(&csr);
        assert!((vals[0] - 0.0).abs() < 1e-12);
        assert!((vals[1] - 2.0).abs() < 1e-12);
        // Ground vector satisfies H v = 0: v ~ (1, -i)/sqrt(2) up to phase.
        let v = &vecs[0];
        let hv0 = v[0] - Complex64::i() * v[1];
        let hv1 = Complex64::i() * v[0] + v[1];
        assert!(hv0.norm() < 1e-12 && hv1.norm() < 1e-12);
    }
}
