//! Analytic zero-energy history state, built by ordered application of
//! transfer factors: every Hamiltonian term annihilates it, so it is the
//! exact ground state whenever the ground level is unique.

use crate::circuit::{CircuitGraph, FactorStep, GateSpec};
use crate::error::Error;
use crate::hamiltonian::{BasisIndexer, StateVector};
use crate::Result;
use num_complex::Complex64;

/// Construct the history state: the boundary product state, then one factor
/// `1 + (row-raising transfer)` per gate in topological order. Boosts carry
/// weight lambda on the next row, projections pass and amplify only their
/// dot, and CNOT factors advance the target only together with or after the
/// control. Returned normalized.
pub fn history_state(circuit: &CircuitGraph) -> Result<StateVector> {
    circuit.ensure_valid()?;
    let ix = BasisIndexer::for_circuit(circuit, crate::DEFAULT_MAX_DIMENSION)?;
    let order = circuit
        .factor_order()
        .ok_or_else(|| Error::Circuit("cyclic link ordering".into()))?;
    let nq = circuit.n_qubits();
    let dim = ix.dim();
    let mut psi = vec![Complex64::default(); dim];

    // Boundary product state on row 0 of every column.
    let spinors: Vec<[Complex64; 2]> = circuit
        .qubits
        .iter()
        .map(|q| q.boundary.ground_spinor())
        .collect();
    let mut positions = vec![0usize; nq];
    for dots in 0..(1usize << nq) {
        let mut amp = Complex64::new(1.0, 0.0);
        for q in 0..nq {
            let dot = (dots >> q) & 1;
            positions[q] = dot;
            amp *= spinors[q][dot];
        }
        if amp.norm_sqr() > 0.0 {
            psi[ix.encode(&positions)] += amp;
        }
    }

    for step in order {
        match step {
            FactorStep::Gate {
                qubit,
                transition,
                gate,
            } => {
                let u = transfer_matrix(&gate)?;
                raise(&mut psi, &ix, qubit, transition, &u);
            }
            FactorStep::Link { index } => {
                let l = circuit.links[index];
                apply_cnot_factor(&mut psi, &ix, l);
            }
        }
    }

    let mut state = StateVector::Complex(psi).demote_if_real();
    if state.norm() == 0.0 {
        return Err(Error::Circuit("history state vanished".into()));
    }
    state.normalize();
    Ok(state)
}

/// Row-to-row transfer weight of a gate's ground-state factor.
fn transfer_matrix(gate: &GateSpec) -> Result<[[Complex64; 2]; 2]> {
    Ok(match gate {
        GateSpec::Unitary(u) => u.0,
        GateSpec::Boost { lambda } => {
            let l = Complex64::new(*lambda, 0.0);
            [[l, Complex64::default()], [Complex64::default(), l]]
        }
        GateSpec::Projection { bit, lambda } => {
            let mut m = [[Complex64::default(); 2]; 2];
            m[*bit as usize][*bit as usize] = Complex64::new(*lambda, 0.0);
            m
        }
        GateSpec::ScheduleBoost { lambda_prime } => {
            // h'(B, lambda') boosts the previous row: the next row carries
            // weight 1 / lambda'.
            let w = Complex64::new(1.0 / *lambda_prime, 0.0);
            [[w, Complex64::default()], [Complex64::default(), w]]
        }
    })
}

/// psi += sum_{g,g'} U[g][g'] shift((t, g') -> (t+1, g)) psi.
///
/// Sources live on row t and targets on row t + 1, so in-place accumulation
/// cannot feed back into a source.
fn raise(
    psi: &mut [Complex64],
    ix: &BasisIndexer,
    qubit: usize,
    transition: usize,
    u: &[[Complex64; 2]; 2],
) {
    let stride = ix.stride(qubit);
    let t = transition;
    for src_dot in 0..2 {
        let src_site = BasisIndexer::site(t, src_dot);
        for dst_dot in 0..2 {
            let w = u[dst_dot][src_dot];
            if w.norm_sqr() == 0.0 {
                continue;
            }
            let shift = (BasisIndexer::site(t + 1, dst_dot) - src_site) * stride;
            for i in 0..psi.len() {
                if ix.position(i, qubit) == src_site {
                    let v = psi[i];
                    if v.norm_sqr() > 0.0 {
                        psi[i + shift] += w * v;
                    }
                }
            }
        }
    }
}

/// The composite CNOT factor: the control advances alone, or together with
/// the target receiving I (control dot 0) or NOT (control dot 1).
fn apply_cnot_factor(psi: &mut [Complex64], ix: &BasisIndexer, l: crate::circuit::CnotLink) {
    let cs = ix.stride(l.control_qubit);
    let ts = ix.stride(l.target_qubit);
    let (ct, tt) = (l.control_transition, l.target_transition);
    let not = crate::circuit::Unitary2::not().0;
    let identity = crate::circuit::Unitary2::identity().0;
    let snapshot_len = psi.len();
    for i in 0..snapshot_len {
        let cpos = ix.position(i, l.control_qubit);
        let (gamma, csite) = if cpos == BasisIndexer::site(ct, 0) {
            (0usize, cpos)
        } else if cpos == BasisIndexer::site(ct, 1) {
            (1usize, cpos)
        } else {
            continue;
        };
        let v = psi[i];
        if v.norm_sqr() == 0.0 {
            continue;
        }
        let cshift = (BasisIndexer::site(ct + 1, gamma) - csite) * cs;
        // Control advances, target waits.
        psi[i + cshift] += v;
        // Both advance.
        let tpos = ix.position(i, l.target_qubit);
        for src_dot in 0..2 {
            if tpos != BasisIndexer::site(tt, src_dot) {
                continue;
            }
            let u = if gamma == 0 { &identity } else { &not };
            for dst_dot in 0..2 {
                let w = u[dst_dot][src_dot];
                if w.norm_sqr() == 0.0 {
                    continue;
                }
                let tshift = (BasisIndexer::site(tt + 1, dst_dot) - tpos) * ts;
                psi[i + cshift + tshift] += w * v;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{BoundarySpec, CircuitBuilder, QubitColumn};
    use crate::hamiltonian::assemble_default;

    #[test]
    fn two_row_identity_gives_equal_weights() {
        let q = QubitColumn::new(2, BoundarySpec::plus_state(), vec![GateSpec::identity()])
            .unwrap();
        let psi = history_state(&CircuitGraph::single(q)).unwrap();
        for i in 0..4 {
            assert!((psi.abs2(i) - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn cnot_history_matches_term_expansion() {
        // Control |0>+|1>, target |0>, one CNOT: six history terms of equal
        // weight: both waiting (2 dots), control advanced (2), both advanced
        // (|00> and |11> on the advanced rows).
        let mut b = CircuitBuilder::new();
        let q0 = b.add_qubit(BoundarySpec::plus_state());
        let q1 = b.add_qubit(BoundarySpec::zero_state());
        b.push_cnot(q0, q1);
        let c = b.finish();
        let psi = history_state(&c).unwrap();
        let ix = BasisIndexer::for_circuit(&c, usize::MAX).unwrap();
        let amp = |c_site: usize, t_site: usize| psi.get(ix.encode(&[c_site, t_site]));
        let w = 1.0 / (6.0f64).sqrt() / (1.0f64).sqrt();
        // (|00>+|01>)|0>: control row 0 (dots 0,1), target row 0 dot 0.
        for c_site in [0, 1] {
            assert!((amp(c_site, 0).re - w).abs() < 1e-9);
        }
        // Control advanced to row 1.
        for c_site in [2, 3] {
            assert!((amp(c_site, 0).re - w).abs() < 1e-9);
        }
        // Both advanced: CNOT applied.
        assert!((amp(2, 2).re - w).abs() < 1e-9);
        assert!((amp(3, 3).re - w).abs() < 1e-9);
        assert!(amp(2, 3).norm() < 1e-12);
        assert!(amp(3, 2).norm() < 1e-12);
        // Zero energy.
        let h = assemble_default(&c).unwrap();
        assert!(h.matvec(&psi).unwrap().norm() < 1e-12);
    }

    #[test]
    fn annihilated_on_projection_and_boost_circuit() {
        let mut b = CircuitBuilder::new();
        let q0 = b.add_qubit(BoundarySpec::plus_state());
        let q1 = b.add_qubit(BoundarySpec::zero_state());
        b.push_gate(q0, GateSpec::identity());
        b.push_gate(q1, GateSpec::identity());
        b.push_cnot(q0, q1);
        b.push_gate(q0, GateSpec::Boost { lambda: 5.0 });
        b.push_gate(q1, GateSpec::Projection { bit: 0, lambda: 5.0 });
        let c = b.finish();
        let h = assemble_default(&c).unwrap();
        let psi = history_state(&c).unwrap();
        assert!(psi.is_real());
        let hpsi = h.matvec(&psi).unwrap();
        assert!(hpsi.norm() < 1e-9, "residual {}", hpsi.norm());
    }

    #[test]
    fn boost_amplifies_final_row_componentwise() {
        let lambda = 4.0;
        let q = QubitColumn::new(
            3,
            BoundarySpec::plus_state(),
            vec![GateSpec::identity(), GateSpec::Boost { lambda }],
        )
        .unwrap();
        let c = CircuitGraph::single(q);
        let psi = history_state(&c).unwrap();
        for dot in 0..2 {
            let prev = psi.get(BasisIndexer::site(1, dot));
            let last = psi.get(BasisIndexer::site(2, dot));
            assert!((last - lambda * prev).norm() < 1e-12);
        }
    }
}
