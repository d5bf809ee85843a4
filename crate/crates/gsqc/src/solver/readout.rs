//! Measurement statistics over final rows: the probability that every
//! electron sits on its column's last row, and the conditional distribution
//! over dot labels there.

use crate::circuit::CircuitGraph;
use crate::error::Error;
use crate::hamiltonian::{BasisIndexer, StateVector};
use crate::solver::GroundStateResult;
use crate::Result;
use num_complex::Complex64;

/// Conditional probability below this counts as "no readout".
pub const NO_READOUT_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct FinalRowReadout {
    /// Probability that all electrons sit on final rows.
    pub p_all_final: f64,
    /// Conditional distribution over bit strings, qubit 0 in the highest
    /// bit. Only entries above floating noise are kept.
    pub conditional: Vec<(u64, f64)>,
    /// Conditional joint amplitudes behind the distribution, same order.
    pub amplitudes: Vec<(u64, Complex64)>,
    /// Per-qubit conditional final-row dot probabilities.
    pub marginals: Vec<[f64; 2]>,
    /// Set when `p_all_final` is below [`NO_READOUT_TOL`]: the circuit is
    /// unsatisfiable or under-boosted.
    pub no_readout: bool,
    n_qubits: usize,
}

impl FinalRowReadout {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn probability_of(&self, bits: u64) -> f64 {
        self.conditional
            .iter()
            .find(|(b, _)| *b == bits)
            .map(|(_, p)| *p)
            .unwrap_or(0.0)
    }

    /// Marginalize the conditional distribution onto the first `n_bits`
    /// qubits (the data qubits of a compiled instance).
    pub fn data_marginal(&self, n_bits: usize) -> Vec<(u64, f64)> {
        assert!(n_bits <= self.n_qubits);
        let shift = self.n_qubits - n_bits;
        let mut acc: Vec<(u64, f64)> = Vec::new();
        for (bits, p) in &self.conditional {
            let key = bits >> shift;
            match acc.iter_mut().find(|(b, _)| *b == key) {
                Some((_, q)) => *q += p,
                None => acc.push((key, *p)),
            }
        }
        acc.sort_by_key(|(b, _)| *b);
        acc
    }

    pub fn render_bits(&self, bits: u64) -> String {
        render_bits(bits, self.n_qubits)
    }
}

pub fn render_bits(bits: u64, width: usize) -> String {
    (0..width)
        .map(|i| {
            if (bits >> (width - 1 - i)) & 1 == 1 {
                '1'
            } else {
                '0'
            }
        })
        .collect()
}

/// Readout of an arbitrary state vector over the circuit's basis.
pub fn readout_from_state(state: &StateVector, circuit: &CircuitGraph) -> Result<FinalRowReadout> {
    let ix = BasisIndexer::for_circuit(circuit, crate::DEFAULT_MAX_DIMENSION)?;
    if state.len() != ix.dim() {
        return Err(Error::Parameter(format!(
            "state length {} does not match circuit dimension {}",
            state.len(),
            ix.dim()
        )));
    }
    let nq = circuit.n_qubits();
    if nq > 32 {
        return Err(Error::Unsupported("readout beyond 32 qubits".into()));
    }
    let final_rows: Vec<usize> = circuit.qubits.iter().map(|q| q.n_rows() - 1).collect();
    let mut p_all = 0.0;
    let mut raw: Vec<(u64, Complex64)> = Vec::new();
    let mut positions = vec![0usize; nq];
    for dots in 0..(1u64 << nq) {
        for q in 0..nq {
            let dot = ((dots >> (nq - 1 - q)) & 1) as usize;
            positions[q] = BasisIndexer::site(final_rows[q], dot);
        }
        let amp = state.get(ix.encode(&positions));
        let w = amp.norm_sqr();
        p_all += w;
        if w > 0.0 {
            raw.push((dots, amp));
        }
    }
    let no_readout = p_all < NO_READOUT_TOL;
    let mut conditional = Vec::new();
    let mut amplitudes = Vec::new();
    let mut marginals = vec![[0.0f64; 2]; nq];
    if !no_readout {
        let norm = p_all.sqrt();
        for (bits, amp) in raw {
            let p = amp.norm_sqr() / p_all;
            if p <= 1e-300 {
                continue;
            }
            conditional.push((bits, p));
            amplitudes.push((bits, amp / norm));
            for q in 0..nq {
                let dot = ((bits >> (nq - 1 - q)) & 1) as usize;
                marginals[q][dot] += p;
            }
        }
        conditional.sort_by_key(|(b, _)| *b);
        amplitudes.sort_by_key(|(b, _)| *b);
    }
    Ok(FinalRowReadout {
        p_all_final: p_all,
        conditional,
        amplitudes,
        marginals,
        no_readout,
        n_qubits: nq,
    })
}

/// Readout of a solved ground state.
pub fn final_row_readout(
    result: &GroundStateResult,
    circuit: &CircuitGraph,
) -> Result<FinalRowReadout> {
    readout_from_state(&result.ground, circuit)
}

/// Conditional state of a qubit subset given all electrons on final rows:
/// the dominant eigenvector of the reduced density matrix, with its purity.
#[derive(Clone, Debug)]
pub struct ReducedState {
    /// Qubits the amplitudes refer to, in the requested order.
    pub subset: Vec<usize>,
    /// 2^subset amplitude table; index bits follow the subset order with
    /// the first subset qubit in the highest bit.
    pub amplitudes: Vec<Complex64>,
    /// Tr(rho^2) of the reduced state; 1 means the subset factorizes.
    pub purity: f64,
}

pub fn conditional_state(
    result: &GroundStateResult,
    circuit: &CircuitGraph,
    subset: &[usize],
) -> Result<ReducedState> {
    conditional_state_of(&result.ground, circuit, subset)
}

pub fn conditional_state_of(
    state: &StateVector,
    circuit: &CircuitGraph,
    subset: &[usize],
) -> Result<ReducedState> {
    if subset.is_empty() {
        return Err(Error::Parameter("empty qubit subset".into()));
    }
    let nq = circuit.n_qubits();
    for &q in subset {
        if q >= nq {
            return Err(Error::Parameter(format!("subset names missing qubit {q}")));
        }
    }
    let readout = readout_from_state(state, circuit)?;
    if readout.no_readout {
        return Err(Error::Soundness(
            "no readout: all-final probability below tolerance".into(),
        ));
    }
    let s = subset.len();
    let sd = 1usize << s;
    let mut rho = vec![Complex64::default(); sd * sd];
    let sub_bits = |bits: u64| -> usize {
        let mut out = 0usize;
        for (pos, &q) in subset.iter().enumerate() {
            let b = ((bits >> (nq - 1 - q)) & 1) as usize;
            out |= b << (s - 1 - pos);
        }
        out
    };
    let comp_bits = |bits: u64| -> u64 {
        let mut out = 0u64;
        for q in 0..nq {
            if !subset.contains(&q) {
                out = (out << 1) | ((bits >> (nq - 1 - q)) & 1);
            }
        }
        out
    };
    for (b1, a1) in &readout.amplitudes {
        for (b2, a2) in &readout.amplitudes {
            if comp_bits(*b1) == comp_bits(*b2) {
                rho[sub_bits(*b1) * sd + sub_bits(*b2)] += a1 * a2.conj();
            }
        }
    }
    // Hermitian PSD rho: dominant eigenvector via the real embedding.
    let csr = dense_from_vec(&rho, sd);
    let (values, vectors) = super::dense::eigh_complex_embedded(&csr);
    let top = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap();
    let purity: f64 = values.iter().map(|v| v * v).sum();
    Ok(ReducedState {
        subset: subset.to_vec(),
        amplitudes: vectors[top].clone(),
        purity,
    })
}

fn dense_from_vec(m: &[Complex64], n: usize) -> crate::hamiltonian::Csr<Complex64> {
    let mut row_ptr = vec![0usize];
    let mut cols = Vec::new();
    let mut vals = Vec::new();
    for r in 0..n {
        for c in 0..n {
            let v = m[r * n + c];
            if v.norm_sqr() > 0.0 {
                cols.push(c as u32);
                vals.push(v);
            }
        }
        row_ptr.push(cols.len());
    }
    crate::hamiltonian::Csr {
        dim: n,
        row_ptr,
        cols,
        vals,
    }
}
