//! Mixed-radix indexing of the one-electron-per-qubit product basis.
//!
//! Each qubit contributes a digit ranging over its 2 * n_rows dot sites
//! (site = 2 * row + dot). Qubit 0 is the most significant digit.

use crate::circuit::CircuitGraph;
use crate::error::Error;
use crate::Result;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisIndexer {
    site_counts: Vec<usize>,
    strides: Vec<usize>,
    dim: usize,
}

impl BasisIndexer {
    pub fn for_circuit(circuit: &CircuitGraph, max_dim: usize) -> Result<Self> {
        let site_counts: Vec<usize> = circuit.qubits.iter().map(|q| q.n_sites()).collect();
        Self::from_site_counts(site_counts, max_dim)
    }

    pub fn from_site_counts(site_counts: Vec<usize>, max_dim: usize) -> Result<Self> {
        if site_counts.is_empty() {
            return Err(Error::Circuit("no qubits".into()));
        }
        let mut dim: u128 = 1;
        for &s in &site_counts {
            dim = dim.saturating_mul(s as u128);
            if dim > max_dim as u128 {
                return Err(Error::DimensionGuard { dim, max: max_dim });
            }
        }
        let mut strides = vec![1usize; site_counts.len()];
        for i in (0..site_counts.len() - 1).rev() {
            strides[i] = strides[i + 1] * site_counts[i + 1];
        }
        Ok(BasisIndexer {
            site_counts,
            strides,
            dim: dim as usize,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_qubits(&self) -> usize {
        self.site_counts.len()
    }

    pub fn site_count(&self, qubit: usize) -> usize {
        self.site_counts[qubit]
    }

    pub fn stride(&self, qubit: usize) -> usize {
        self.strides[qubit]
    }

    /// Site index of (row, dot).
    pub fn site(row: usize, dot: usize) -> usize {
        2 * row + dot
    }

    /// The given qubit's site in a flat configuration index.
    pub fn position(&self, index: usize, qubit: usize) -> usize {
        (index / self.strides[qubit]) % self.site_counts[qubit]
    }

    pub fn encode(&self, positions: &[usize]) -> usize {
        debug_assert_eq!(positions.len(), self.site_counts.len());
        positions
            .iter()
            .zip(&self.strides)
            .map(|(p, s)| p * s)
            .sum()
    }

    pub fn decode(&self, index: usize, positions: &mut [usize]) {
        for q in 0..self.site_counts.len() {
            positions[q] = self.position(index, q);
        }
    }

    /// Visit every flat index whose digits at `qubits` are all zero.
    /// Callers add local site offsets via the strides.
    pub fn for_each_complement_base(&self, qubits: &[usize], mut f: impl FnMut(usize)) {
        let others: Vec<usize> = (0..self.n_qubits()).filter(|q| !qubits.contains(q)).collect();
        let mut digits = vec![0usize; others.len()];
        loop {
            let base: usize = digits
                .iter()
                .zip(&others)
                .map(|(d, &q)| d * self.strides[q])
                .sum();
            f(base);
            // Odometer increment over the complement digits.
            let mut k = others.len();
            loop {
                if k == 0 {
                    return;
                }
                k -= 1;
                digits[k] += 1;
                if digits[k] < self.site_counts[others[k]] {
                    break;
                }
                digits[k] = 0;
            }
        }
    }
}
