//! Teleportation splicing: keeps every column short so the spectral gap of
//! an arbitrary circuit stays polynomial in the amplifying factor.
//!
//! A box splices a column D into D | (A, B): A and B are Bell-paired (H on
//! A, then CNOT A -> B), D's state is consumed by CNOT(D -> A) and H on D,
//! and projections h(|0>, lambda) on D and A post-select the correction-free
//! branch, leaving D's state on B. Each box adds exactly two columns.

use super::{
    BoundarySpec, CircuitBuilder, CircuitGraph, FactorStep, GateSpec, TerminalKind, Transition,
    Unitary2,
};
use crate::error::Error;
use crate::Result;

/// Bookkeeping from a splicing pass.
#[derive(Clone, Debug)]
pub struct TeleportTrace {
    /// Number of boxes spliced in.
    pub boxes: usize,
    /// For each original qubit, the column that carries its final state.
    pub final_column_of: Vec<usize>,
}

/// Splice a teleportation box between any two interactions on a qubit, and
/// after the last interaction of a qubit that continues. Requires a uniform
/// amplifying factor across the circuit's existing terminals.
pub fn insert_teleportation(circuit: &CircuitGraph) -> Result<CircuitGraph> {
    insert_teleportation_traced(circuit).map(|(c, _)| c)
}

/// As [`insert_teleportation`], also reporting box count and where each
/// original qubit's state ends up.
pub fn insert_teleportation_traced(
    circuit: &CircuitGraph,
) -> Result<(CircuitGraph, TeleportTrace)> {
    circuit.ensure_valid()?;
    let lambda = uniform_lambda(circuit)?;
    let order = circuit
        .factor_order()
        .ok_or_else(|| Error::Circuit("cyclic link ordering".into()))?;

    let n_orig = circuit.n_qubits();
    let total_links: Vec<usize> = (0..n_orig).map(|q| circuit.links_of(q).len()).collect();

    let mut b = CircuitBuilder::new();
    for q in &circuit.qubits {
        b.add_qubit(q.boundary);
    }
    let mut current: Vec<usize> = (0..n_orig).collect();
    let mut links_done = vec![0usize; n_orig];
    let mut boxes = 0usize;

    let mut splice = |b: &mut CircuitBuilder, current: &mut Vec<usize>, q: usize| {
        let d = current[q];
        let a = b.add_qubit(BoundarySpec::zero_state());
        let fresh = b.add_qubit(BoundarySpec::zero_state());
        b.push_gate(a, GateSpec::Unitary(Unitary2::hadamard()));
        b.push_cnot(a, fresh);
        b.push_cnot(d, a);
        b.push_gate(d, GateSpec::Unitary(Unitary2::hadamard()));
        b.push_gate(d, GateSpec::Projection { bit: 0, lambda });
        b.push_gate(a, GateSpec::Projection { bit: 0, lambda });
        current[q] = fresh;
    };

    for step in order {
        match step {
            FactorStep::Gate { qubit, gate, .. } => {
                b.push_gate(current[qubit], gate);
            }
            FactorStep::Link { index } => {
                let l = circuit.links[index];
                b.push_cnot(current[l.control_qubit], current[l.target_qubit]);
                for q in [l.control_qubit, l.target_qubit] {
                    links_done[q] += 1;
                    let more_links = links_done[q] < total_links[q];
                    let continues_out = links_done[q] == total_links[q]
                        && circuit.qubits[q].terminal() == TerminalKind::Continues;
                    if more_links || continues_out {
                        splice(&mut b, &mut current, q);
                        boxes += 1;
                    }
                }
            }
        }
    }

    let out = b.finish();
    out.ensure_valid()?;
    let trace = TeleportTrace {
        boxes,
        final_column_of: current,
    };
    Ok((out, trace))
}

fn uniform_lambda(circuit: &CircuitGraph) -> Result<f64> {
    let mut lambda = None;
    for q in &circuit.qubits {
        if let Some(l) = q.terminal_lambda() {
            match lambda {
                None => lambda = Some(l),
                Some(prev) if (prev - l).abs() > 1e-12 => {
                    return Err(Error::Unsupported(format!(
                        "teleportation splicing expects one amplifying factor, found {prev} and {l}"
                    )));
                }
                _ => {}
            }
        }
    }
    lambda.ok_or_else(|| {
        Error::Unsupported("circuit has no boost/projection terminal to set the box scale".into())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{compile_filters, FilterBox, FilterMode};

    fn cnot_pair(lambda: f64) -> CircuitGraph {
        let mut b = CircuitBuilder::new();
        let q0 = b.add_qubit(BoundarySpec::plus_state());
        let q1 = b.add_qubit(BoundarySpec::zero_state());
        b.push_gate(q0, GateSpec::identity());
        b.push_gate(q1, GateSpec::identity());
        b.push_cnot(q0, q1);
        b.push_gate(q0, GateSpec::Boost { lambda });
        b.push_gate(q1, GateSpec::Boost { lambda });
        b.finish()
    }

    #[test]
    fn single_interactions_unchanged() {
        let c = cnot_pair(5.0);
        let (t, trace) = insert_teleportation_traced(&c).unwrap();
        assert_eq!(trace.boxes, 0);
        assert_eq!(t.n_qubits(), 2);
    }

    #[test]
    fn two_chained_cnots_split_once() {
        // One qubit controls two CNOTs onto separate ancilla columns.
        let mut b = CircuitBuilder::new();
        let d = b.add_qubit(BoundarySpec::plus_state());
        let a0 = b.add_qubit(BoundarySpec::zero_state());
        let a1 = b.add_qubit(BoundarySpec::zero_state());
        b.push_gate(d, GateSpec::identity());
        b.push_cnot(d, a0);
        b.push_cnot(d, a1);
        for q in [d, a0, a1] {
            b.push_gate(q, GateSpec::Boost { lambda: 4.0 });
        }
        let c = b.finish();
        let (t, trace) = insert_teleportation_traced(&c).unwrap();
        assert_eq!(trace.boxes, 1);
        assert_eq!(t.n_qubits(), 5);
        assert!(t.validate().is_ok());
        // The data qubit's state ends on the fresh carrier.
        assert_eq!(trace.final_column_of[d], 4);
    }

    #[test]
    fn ec_box_with_continuing_data_needs_ten_boxes() {
        let fb = FilterBox::exact_cover(1, 2, 3, 5.0).unwrap();
        let mut c = compile_filters(3, &[fb], FilterMode::Compact, None).unwrap();
        // Data qubits face later clauses: strip their boost terminals.
        for q in 0..3 {
            assert!(matches!(
                c.qubits[q].transitions.pop(),
                Some(Transition::Gate(GateSpec::Boost { .. }))
            ));
        }
        let before = c.n_qubits();
        let (t, trace) = insert_teleportation_traced(&c).unwrap();
        assert_eq!(trace.boxes, 10);
        assert_eq!(t.n_qubits(), before + 20);
    }

    #[test]
    fn no_column_exceeds_eight_rows() {
        let fb = FilterBox::exact_cover(1, 2, 3, 5.0).unwrap();
        let c = compile_filters(3, &[fb], FilterMode::Teleport, None).unwrap();
        for q in &c.qubits {
            assert!(
                q.n_rows() <= 8,
                "column {} has {} rows",
                q.id,
                q.n_rows()
            );
        }
    }

    #[test]
    fn chained_clauses_teleport_count() {
        use crate::sat::ExactCoverInstance;
        let inst = ExactCoverInstance::new(4, vec![[1, 2, 3], [2, 3, 4]]).unwrap();
        let compact = crate::circuit::chain_filters(&inst, &[0, 1], 5.0, FilterMode::Compact).unwrap();
        let (t, trace) = insert_teleportation_traced(&compact).unwrap();
        assert_eq!(t.n_qubits(), compact.n_qubits() + 2 * trace.boxes);
        for q in &t.qubits {
            assert!(q.n_rows() <= 8);
        }
    }

    #[test]
    fn mixed_lambdas_rejected() {
        let mut c = cnot_pair(5.0);
        c.qubits[1].transitions.pop();
        c.qubits[1].transitions.push(Transition::Gate(GateSpec::Boost {
            lambda: 7.0,
        }));
        assert!(matches!(
            insert_teleportation(&c),
            Err(Error::Unsupported(_))
        ));
    }
}
