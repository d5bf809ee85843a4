//! Named calibration circuits for scaling sweeps: each has a known
//! lambda-exponent for its gap.

use super::{BoundarySpec, CircuitBuilder, CircuitGraph, GateSpec, QubitColumn, Unitary2};

/// Boost-ended single qubit; gap scales as eps / lambda^2 for lambda >> n.
pub fn boost_qubit(n_rows: usize, lambda: f64) -> CircuitGraph {
    let mut gates = vec![GateSpec::identity(); n_rows - 2];
    gates.push(GateSpec::Boost { lambda });
    CircuitGraph::single(QubitColumn::new(n_rows, BoundarySpec::plus_state(), gates).unwrap())
}

/// Six-row projection-ended qubit with the tilted boundary
/// 10 eps (I + alpha sigma_z - sqrt(1 - alpha^2) sigma_x). At alpha = 0 the
/// gap is lambda-independent; at small projected fraction it falls as
/// eps / lambda^2 until the crossover.
pub fn projection_qubit(alpha: f64, lambda: f64) -> CircuitGraph {
    let mut gates = vec![GateSpec::identity(); 4];
    gates.push(GateSpec::Projection { bit: 0, lambda });
    CircuitGraph::single(
        QubitColumn::new(6, BoundarySpec::tilted(alpha).unwrap(), gates).unwrap(),
    )
}

/// Two qubits coupled by one CNOT, control boost-ended; the target ends
/// with a boost or, when `projection_target`, with h(|0>, lambda). Gap
/// scales as eps / lambda^4 either way.
pub fn cnot_pair(lambda: f64, projection_target: bool) -> CircuitGraph {
    let mut b = CircuitBuilder::new();
    let control = b.add_qubit(BoundarySpec::plus_state());
    let target = b.add_qubit(BoundarySpec::zero_state());
    b.push_gate(control, GateSpec::identity());
    b.push_gate(target, GateSpec::identity());
    b.push_cnot(control, target);
    b.push_gate(control, GateSpec::Boost { lambda });
    if projection_target {
        b.push_gate(target, GateSpec::Projection { bit: 0, lambda });
    } else {
        b.push_gate(target, GateSpec::Boost { lambda });
    }
    b.finish()
}

/// The ten-qubit teleported CNOT: a box on the upstream and downstream part
/// of each side, so no column exceeds length 8 and min 1/x = 1/lambda^4,
/// giving gap ~ eps / lambda^8. Too large to diagonalize; used symbolically.
pub fn teleported_cnot(lambda: f64) -> CircuitGraph {
    let mut b = CircuitBuilder::new();
    let h = GateSpec::Unitary(Unitary2::hadamard());
    let p0 = GateSpec::Projection { bit: 0, lambda };

    // Upstream segment and teleport-in per side; the carriers then share
    // the main CNOT before teleporting out to boosted final segments.
    let mut carriers = [0usize; 2];
    for carrier_slot in carriers.iter_mut() {
        let seg0 = b.add_qubit(BoundarySpec::plus_state());
        b.push_gate(seg0, GateSpec::identity());
        let a1 = b.add_qubit(BoundarySpec::zero_state());
        let carrier = b.add_qubit(BoundarySpec::zero_state());
        b.push_gate(a1, h);
        b.push_cnot(a1, carrier);
        b.push_cnot(seg0, a1);
        b.push_gate(seg0, h);
        b.push_gate(seg0, p0);
        b.push_gate(a1, p0);
        *carrier_slot = carrier;
    }
    b.push_cnot(carriers[0], carriers[1]);
    for carrier in carriers {
        let a2 = b.add_qubit(BoundarySpec::zero_state());
        let fin = b.add_qubit(BoundarySpec::zero_state());
        b.push_gate(a2, h);
        b.push_cnot(a2, fin);
        b.push_cnot(carrier, a2);
        b.push_gate(carrier, h);
        b.push_gate(carrier, p0);
        b.push_gate(a2, p0);
        b.push_gate(fin, GateSpec::Boost { lambda });
    }
    b.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn teleported_cnot_shape() {
        let c = teleported_cnot(5.0);
        assert_eq!(c.n_qubits(), 10);
        assert!(c.validate().is_ok());
        for q in &c.qubits {
            assert!(q.n_rows() <= 8, "qubit {} has {} rows", q.id, q.n_rows());
        }
    }

    #[test]
    fn calibration_circuits_validate() {
        assert!(boost_qubit(6, 10.0).validate().is_ok());
        assert!(projection_qubit(0.9, 10.0).validate().is_ok());
        assert!(cnot_pair(10.0, false).validate().is_ok());
        assert!(cnot_pair(10.0, true).validate().is_ok());
    }
}
