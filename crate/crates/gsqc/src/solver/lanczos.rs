//! Thick-restart Lanczos for the lowest eigenpairs of a real symmetric CSR
//! matrix, with locked-vector deflation so degenerate levels are found one
//! copy at a time.

use crate::error::Error;
use crate::hamiltonian::Csr;
use crate::Result;
use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub struct Eigenpair {
    pub value: f64,
    pub vector: Vec<f64>,
    pub residual: f64,
    pub matvecs: usize,
}

const BASIS_CAP: usize = 100;
const RESTART_KEEP: usize = 14;
const BREAKDOWN: f64 = 1e-13;

/// Smallest eigenpair of `h` restricted to the orthogonal complement of
/// `locked`.
pub fn smallest_deflated(
    h: &Csr<f64>,
    locked: &[Vec<f64>],
    tol: f64,
    max_matvecs: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Eigenpair> {
    let n = h.dim;
    let free_dim = n - locked.len();
    if free_dim == 0 {
        return Err(Error::Parameter("matrix fully deflated".into()));
    }
    let m_cap = BASIS_CAP.min(free_dim);
    let keep = RESTART_KEEP.min(m_cap.saturating_sub(2)).max(1);

    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m_cap + 1);
    let mut t = DMatrix::<f64>::zeros(m_cap + 1, m_cap + 1);
    let mut matvecs = 0usize;

    let mut v0 = random_vector(n, rng);
    orthogonalize(&mut v0, locked, &basis);
    normalize(&mut v0)
        .ok_or_else(|| Error::Parameter("deflated start vector vanished".into()))?;
    basis.push(v0);

    let mut best: Option<(f64, Vec<f64>, f64)> = None;

    while matvecs < max_matvecs {
        // Extend the basis to the cap.
        while basis.len() < m_cap && matvecs < max_matvecs {
            let j = basis.len() - 1;
            let mut w = vec![0.0; n];
            h.matvec(&basis[j], &mut w);
            matvecs += 1;
            // Two-pass Gram-Schmidt; the first-pass coefficients against the
            // current basis are the projected-matrix column.
            let mut coeffs = vec![0.0; basis.len()];
            for pass in 0..2 {
                for l in locked {
                    let c = dot(&w, l);
                    axpy(&mut w, -c, l);
                }
                for (i, b) in basis.iter().enumerate() {
                    let c = dot(&w, b);
                    coeffs[i] += c;
                    axpy(&mut w, -c, b);
                }
                if pass == 0 {
                    for (i, c) in coeffs.iter().enumerate() {
                        t[(i, j)] = *c;
                        t[(j, i)] = *c;
                    }
                }
            }
            for (i, c) in coeffs.iter().enumerate() {
                t[(i, j)] = *c;
                t[(j, i)] = *c;
            }
            let beta = norm(&w);
            if beta < BREAKDOWN {
                // Invariant subspace: restart from a fresh random direction.
                let mut fresh = random_vector(n, rng);
                orthogonalize(&mut fresh, locked, &basis);
                if normalize(&mut fresh).is_none() {
                    break;
                }
                basis.push(fresh);
            } else {
                t[(basis.len(), j)] = beta;
                t[(j, basis.len())] = beta;
                scale(&mut w, 1.0 / beta);
                basis.push(w);
            }
        }

        // Rayleigh-Ritz over the full current basis.
        let m = basis.len();
        let block = t.view((0, 0), (m, m)).into_owned();
        let eig = block.symmetric_eigen();
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let idx = order[0];
        let theta = eig.eigenvalues[idx];
        let y = eig.eigenvectors.column(idx);
        let mut u = vec![0.0; n];
        for (i, b) in basis.iter().enumerate() {
            axpy(&mut u, y[i], b);
        }
        // Ritz vectors can erode locked-orthogonality in finite precision.
        orthogonalize(&mut u, locked, &[]);
        let _ = normalize(&mut u);
        let mut hu = vec![0.0; n];
        h.matvec(&u, &mut hu);
        matvecs += 1;
        let mut res2 = 0.0;
        for i in 0..n {
            let r = hu[i] - theta * u[i];
            res2 += r * r;
        }
        let residual = res2.sqrt();
        if best.as_ref().is_none_or(|(_, _, r)| residual < *r) {
            best = Some((theta, u.clone(), residual));
        }
        if residual <= tol {
            return Ok(Eigenpair {
                value: theta,
                vector: u,
                residual,
                matvecs,
            });
        }

        // Thick restart: keep the lowest Ritz vectors plus the residual
        // direction carried by the last basis vector.
        let p = keep.min(m.saturating_sub(1)).max(1);
        let beta_last = t[(m, m - 1)];
        let mut new_basis: Vec<Vec<f64>> = Vec::with_capacity(m_cap + 1);
        let mut s = vec![0.0; p];
        for (rank, &oi) in order.iter().take(p).enumerate() {
            let yv = eig.eigenvectors.column(oi);
            let mut uv = vec![0.0; n];
            for (i, b) in basis.iter().enumerate() {
                axpy(&mut uv, yv[i], b);
            }
            s[rank] = beta_last * yv[m - 1];
            new_basis.push(uv);
        }
        // Residual direction: the would-be next Lanczos vector survives in
        // the last computed w only when beta was healthy; rebuild it from
        // scratch otherwise.
        let mut q = vec![0.0; n];
        h.matvec(&new_basis[0], &mut q);
        matvecs += 1;
        let th0 = eig.eigenvalues[order[0]];
        for i in 0..n {
            q[i] -= th0 * new_basis[0][i];
        }
        orthogonalize(&mut q, locked, &new_basis);
        if normalize(&mut q).is_none() {
            q = random_vector(n, rng);
            orthogonalize(&mut q, locked, &new_basis);
            if normalize(&mut q).is_none() {
                break;
            }
        }
        // Re-orthonormalize the kept Ritz vectors among themselves.
        let mut cleaned: Vec<Vec<f64>> = Vec::with_capacity(p + 1);
        for mut uv in new_basis {
            orthogonalize(&mut uv, locked, &cleaned);
            if normalize(&mut uv).is_some() {
                cleaned.push(uv);
            }
        }
        let pk = cleaned.len();
        t.fill(0.0);
        for i in 0..pk {
            t[(i, i)] = eig.eigenvalues[order[i]];
            t[(i, pk)] = s[i];
            t[(pk, i)] = s[i];
        }
        cleaned.push(q);
        basis = cleaned;
    }

    let residual = best.map(|(_, _, r)| r).unwrap_or(f64::NAN);
    Err(Error::NoConvergence {
        iterations: matvecs,
        residual,
        tolerance: tol,
    })
}

fn random_vector(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0f64)).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    if a == 0.0 {
        return;
    }
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

fn scale(v: &mut [f64], s: f64) {
    v.iter_mut().for_each(|x| *x *= s);
}

fn norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

fn normalize(v: &mut [f64]) -> Option<f64> {
    let n = norm(v);
    if n < BREAKDOWN {
        return None;
    }
    scale(v, 1.0 / n);
    Some(n)
}

fn orthogonalize(v: &mut [f64], locked: &[Vec<f64>], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for l in locked {
            let c = dot(v, l);
            axpy(v, -c, l);
        }
        for b in basis {
            let c = dot(v, b);
            axpy(v, -c, b);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn diag_csr(values: &[f64]) -> Csr<f64> {
        let n = values.len();
        Csr {
            dim: n,
            row_ptr: (0..=n).collect(),
            cols: (0..n as u32).collect(),
            vals: values.to_vec(),
        }
    }

    #[test]
    fn finds_smallest_of_diagonal() {
        let h = diag_csr(&[3.0, 0.5, 2.0, 10.0, 0.9]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = smallest_deflated(&h, &[], 1e-10, 10_000, &mut rng).unwrap();
        assert!((p.value - 0.5).abs() < 1e-9);
        assert!(p.vector[1].abs() > 0.999);
    }

    #[test]
    fn deflation_finds_second() {
        let h = diag_csr(&[3.0, 0.5, 2.0, 10.0, 0.9]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p0 = smallest_deflated(&h, &[], 1e-10, 10_000, &mut rng).unwrap();
        let p1 = smallest_deflated(&h, &[p0.vector.clone()], 1e-10, 10_000, &mut rng).unwrap();
        assert!((p1.value - 0.9).abs() < 1e-9);
    }

    #[test]
    fn handles_degenerate_levels() {
        let h = diag_csr(&[1.0, 0.25, 0.25, 5.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p0 = smallest_deflated(&h, &[], 1e-10, 10_000, &mut rng).unwrap();
        let p1 = smallest_deflated(&h, &[p0.vector.clone()], 1e-10, 10_000, &mut rng).unwrap();
        assert!((p0.value - 0.25).abs() < 1e-9);
        assert!((p1.value - 0.25).abs() < 1e-9);
        let overlap: f64 = p0.vector.iter().zip(&p1.vector).map(|(a, b)| a * b).sum();
        assert!(overlap.abs() < 1e-8);
    }
}
