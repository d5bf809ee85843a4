//! Clause filter boxes and their compilation into circuits.
//!
//! A filter box couples data qubits to fresh ancillas via CNOTs and ends the
//! ancillas with projection Hamiltonians, so that the ground state on final
//! rows retains exactly the clause-satisfying components. Data qubits either
//! end with a boost (no later clause) or continue into the next box.

use super::{
    BoundarySpec, CircuitBuilder, CircuitGraph, GateSpec, TerminalKind, Unitary2,
};
use crate::error::Error;
use crate::sat::ExactCoverInstance;
use crate::Result;

use std::f64::consts::FRAC_PI_4;

/// Clause kinds with GSQC filter realizations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FilterKind {
    /// Clause `i = 0`: one CNOT onto an ancilla projected to |0>.
    Eq0,
    /// Clause `i = 1`: one CNOT onto an ancilla projected to |1>.
    Eq1,
    /// Clause `i + j = 1`: two CNOTs onto an ancilla projected to |1>.
    Sum1,
    /// Exact Cover clause `i + j + k = 1`: parity ancilla projected to |1>
    /// plus a Margolus (simplified Toffoli) ancilla projected to |0>.
    ExactCover,
}

/// A clause filter: data qubit ids (1-based, as in instance files) plus the
/// amplifying factor for the box's terminals.
#[derive(Clone, Debug, PartialEq)]
pub struct FilterBox {
    pub kind: FilterKind,
    pub data: Vec<usize>,
    pub lambda: f64,
}

impl FilterBox {
    pub fn eq0(data: usize, lambda: f64) -> Result<Self> {
        FilterBox::build(FilterKind::Eq0, vec![data], lambda)
    }

    pub fn eq1(data: usize, lambda: f64) -> Result<Self> {
        FilterBox::build(FilterKind::Eq1, vec![data], lambda)
    }

    pub fn sum1(data_i: usize, data_j: usize, lambda: f64) -> Result<Self> {
        FilterBox::build(FilterKind::Sum1, vec![data_i, data_j], lambda)
    }

    pub fn exact_cover(i: usize, j: usize, k: usize, lambda: f64) -> Result<Self> {
        FilterBox::build(FilterKind::ExactCover, vec![i, j, k], lambda)
    }

    fn build(kind: FilterKind, data: Vec<usize>, lambda: f64) -> Result<Self> {
        if !(lambda >= 1.0) {
            return Err(Error::Parameter(format!("lambda = {lambda} must be >= 1")));
        }
        for (n, d) in data.iter().enumerate() {
            if *d == 0 {
                return Err(Error::Parameter("data qubit ids are 1-based".into()));
            }
            if data[..n].contains(d) {
                return Err(Error::Parameter(format!(
                    "duplicate data qubit {d} in filter clause"
                )));
            }
        }
        Ok(FilterBox { kind, data, lambda })
    }

    pub fn n_ancillas(&self) -> usize {
        match self.kind {
            FilterKind::Eq0 | FilterKind::Eq1 | FilterKind::Sum1 => 1,
            FilterKind::ExactCover => 2,
        }
    }
}

/// How data qubits cross box boundaries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FilterMode {
    /// The same column is extended through every box it participates in.
    Compact,
    /// Compact compilation followed by teleportation splicing.
    Teleport,
}

/// Compile filter boxes over `n_data` data qubits into a circuit.
///
/// Data qubits are initialized to |0> + |1> via h0 = E(I - sigma_x) unless
/// custom boundaries are supplied. Every fresh column opens with one identity
/// transition so that the adiabatic schedule's first-transition replacement
/// is well defined on it. Data qubits facing later clauses continue in the
/// same column; qubits with no further clause end with a boost.
pub fn compile_filters(
    n_data: usize,
    boxes: &[FilterBox],
    mode: FilterMode,
    data_boundaries: Option<&[BoundarySpec]>,
) -> Result<CircuitGraph> {
    if n_data == 0 {
        return Err(Error::Parameter("need at least one data qubit".into()));
    }
    if let Some(bounds) = data_boundaries {
        if bounds.len() != n_data {
            return Err(Error::Parameter(format!(
                "{} boundaries supplied for {n_data} data qubits",
                bounds.len()
            )));
        }
    }
    for fb in boxes {
        for &d in &fb.data {
            if d > n_data {
                return Err(Error::Parameter(format!(
                    "filter references qubit {d} beyond the {n_data} data qubits"
                )));
            }
        }
    }

    let mut b = CircuitBuilder::new();
    for i in 0..n_data {
        let boundary = data_boundaries
            .map(|bounds| bounds[i])
            .unwrap_or_else(BoundarySpec::plus_state);
        let q = b.add_qubit(boundary);
        b.push_gate(q, GateSpec::identity());
    }

    // Last box index touching each data qubit, for terminal placement.
    let mut last_box = vec![None; n_data];
    for (bi, fb) in boxes.iter().enumerate() {
        for &d in &fb.data {
            last_box[d - 1] = Some(bi);
        }
    }

    for fb in boxes {
        emit_box(&mut b, fb)?;
    }

    for (i, last) in last_box.iter().enumerate() {
        let lambda = last
            .map(|bi| boxes[bi].lambda)
            .unwrap_or_else(|| boxes.first().map(|fb| fb.lambda).unwrap_or(1.0));
        b.push_gate(i, GateSpec::Boost { lambda });
    }

    let circuit = b.finish();
    circuit.ensure_valid()?;
    match mode {
        FilterMode::Compact => Ok(circuit),
        FilterMode::Teleport => super::insert_teleportation(&circuit),
    }
}

fn emit_box(b: &mut CircuitBuilder, fb: &FilterBox) -> Result<()> {
    let lam = fb.lambda;
    match fb.kind {
        FilterKind::Eq0 | FilterKind::Eq1 => {
            let d = fb.data[0] - 1;
            let anc = b.add_qubit(BoundarySpec::zero_state());
            b.push_gate(anc, GateSpec::identity());
            b.push_cnot(d, anc);
            let bit = if fb.kind == FilterKind::Eq0 { 0 } else { 1 };
            b.push_gate(anc, GateSpec::Projection { bit, lambda: lam });
        }
        FilterKind::Sum1 => {
            let (i, j) = (fb.data[0] - 1, fb.data[1] - 1);
            let anc = b.add_qubit(BoundarySpec::zero_state());
            b.push_gate(anc, GateSpec::identity());
            b.push_cnot(i, anc);
            b.push_cnot(j, anc);
            b.push_gate(anc, GateSpec::Projection { bit: 1, lambda: lam });
        }
        FilterKind::ExactCover => {
            let (i, j, k) = (fb.data[0] - 1, fb.data[1] - 1, fb.data[2] - 1);
            // Parity ancilla: CNOTs from i, j, k; satisfying states leave it
            // at |1>.
            let a1 = b.add_qubit(BoundarySpec::zero_state());
            b.push_gate(a1, GateSpec::identity());
            b.push_cnot(i, a1);
            b.push_cnot(j, a1);
            b.push_cnot(k, a1);
            // Margolus ancilla: flipped exactly when j and k are both 1,
            // rejecting |111> that the parity check alone lets through.
            let a2 = b.add_qubit(BoundarySpec::zero_state());
            b.push_gate(a2, GateSpec::identity());
            b.push_gate(a2, GateSpec::Unitary(Unitary2::y_rotation(FRAC_PI_4)));
            b.push_cnot(k, a2);
            b.push_gate(a2, GateSpec::Unitary(Unitary2::y_rotation(FRAC_PI_4)));
            b.push_cnot(j, a2);
            b.push_gate(a2, GateSpec::Unitary(Unitary2::y_rotation(-FRAC_PI_4)));
            b.push_cnot(k, a2);
            b.push_gate(a2, GateSpec::Unitary(Unitary2::y_rotation(-FRAC_PI_4)));
            b.push_gate(a1, GateSpec::Projection { bit: 1, lambda: lam });
            b.push_gate(a2, GateSpec::Projection { bit: 0, lambda: lam });
        }
    }
    Ok(())
}

/// Compile an Exact Cover instance: one filter box per clause, in the given
/// order. `order[n]` is the index of the clause compiled n-th.
pub fn chain_filters(
    instance: &ExactCoverInstance,
    order: &[usize],
    lambda: f64,
    mode: FilterMode,
) -> Result<CircuitGraph> {
    if order.len() != instance.clauses.len() {
        return Err(Error::Parameter(format!(
            "order has {} entries for {} clauses",
            order.len(),
            instance.clauses.len()
        )));
    }
    let mut seen = vec![false; instance.clauses.len()];
    for &ci in order {
        if ci >= instance.clauses.len() || seen[ci] {
            return Err(Error::Parameter(format!(
                "order is not a permutation of 0..{}",
                instance.clauses.len()
            )));
        }
        seen[ci] = true;
    }
    let boxes: Vec<FilterBox> = order
        .iter()
        .map(|&ci| {
            let [i, j, k] = instance.clauses[ci];
            FilterBox::exact_cover(i, j, k, lambda)
        })
        .collect::<Result<_>>()?;
    compile_filters(instance.n_bits, &boxes, mode, None)
}

/// Column count audit used by tests: data columns plus ancillas per box.
pub fn expected_compact_qubits(n_data: usize, boxes: &[FilterBox]) -> usize {
    n_data + boxes.iter().map(|b| b.n_ancillas()).sum::<usize>()
}
