//! GSQC circuit representation: qubit columns of dot rows, gate specs,
//! CNOT links, boundary conditions, and the compilation helpers that turn
//! clause filters into full circuits.

pub mod calibration;
mod filters;
mod teleport;
mod textio;

pub use filters::{chain_filters, compile_filters, FilterBox, FilterKind, FilterMode};
pub use teleport::{insert_teleportation, insert_teleportation_traced, TeleportTrace};
pub use textio::{parse_circuit, write_circuit};

use crate::error::Error;
use crate::Result;
use num_complex::Complex64;

const UNITARITY_TOL: f64 = 1e-12;
const AXIS_NORM_TOL: f64 = 1e-12;

/// A 2x2 unitary acting on the dot pair of one row transition.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Unitary2(pub [[Complex64; 2]; 2]);

impl Unitary2 {
    pub fn new(m: [[Complex64; 2]; 2]) -> Result<Self> {
        let u = Unitary2(m);
        if !u.is_unitary() {
            return Err(Error::Circuit("gate matrix is not unitary".into()));
        }
        Ok(u)
    }

    pub fn identity() -> Self {
        Unitary2([
            [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        ])
    }

    pub fn hadamard() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Unitary2([
            [Complex64::new(s, 0.0), Complex64::new(s, 0.0)],
            [Complex64::new(s, 0.0), Complex64::new(-s, 0.0)],
        ])
    }

    /// The NOT matrix N (sigma_x).
    pub fn not() -> Self {
        Unitary2([
            [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
            [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        ])
    }

    /// R_y(theta): rotation by theta/2 in the real plane, so that
    /// `y_rotation(PI/4)` squared rotates by PI/4.
    pub fn y_rotation(theta: f64) -> Self {
        let (s, c) = (theta / 2.0).sin_cos();
        Unitary2([
            [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
            [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
        ])
    }

    pub fn is_unitary(&self) -> bool {
        let m = &self.0;
        let mut dev: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let mut s = Complex64::new(0.0, 0.0);
                for k in 0..2 {
                    s += m[k][i].conj() * m[k][j];
                }
                let target = if i == j { 1.0 } else { 0.0 };
                dev = dev.max((s - target).norm());
            }
        }
        dev <= UNITARITY_TOL
    }

    pub fn is_identity(&self) -> bool {
        let m = &self.0;
        (m[0][0] - 1.0).norm() <= UNITARITY_TOL
            && (m[1][1] - 1.0).norm() <= UNITARITY_TOL
            && m[0][1].norm() <= UNITARITY_TOL
            && m[1][0].norm() <= UNITARITY_TOL
    }

    pub fn is_real(&self) -> bool {
        self.0.iter().flatten().all(|z| z.im.abs() <= UNITARITY_TOL)
    }

    pub fn dagger(&self) -> Self {
        let m = &self.0;
        Unitary2([
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ])
    }
}

/// Boundary Hamiltonian h0 = E (I + sum_i a_i sigma_i) applied to row 0.
/// Its null spinor fixes the qubit's input state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundarySpec {
    /// E, in multiples of epsilon.
    pub strength: f64,
    /// (a_x, a_y, a_z), unit norm.
    pub axis: [f64; 3],
}

impl BoundarySpec {
    pub fn new(strength: f64, axis: [f64; 3]) -> Result<Self> {
        if !(strength > 0.0) {
            return Err(Error::Circuit("boundary strength must be positive".into()));
        }
        let n2: f64 = axis.iter().map(|a| a * a).sum();
        if (n2 - 1.0).abs() > AXIS_NORM_TOL {
            return Err(Error::Circuit(format!(
                "boundary axis must be unit norm (|a|^2 = {n2})"
            )));
        }
        Ok(BoundarySpec { strength, axis })
    }

    /// Boundary preparing the real spinor (a, b) on row 0 (not both zero).
    pub fn preparing(spinor: [f64; 2]) -> Self {
        let n = (spinor[0] * spinor[0] + spinor[1] * spinor[1]).sqrt();
        assert!(n > 0.0, "spinor must be nonzero");
        let (a, b) = (spinor[0] / n, spinor[1] / n);
        BoundarySpec {
            strength: crate::DEFAULT_BOUNDARY_STRENGTH,
            axis: [-2.0 * a * b, 0.0, b * b - a * a],
        }
    }

    /// E (I - sigma_x): prepares |0> + |1>.
    pub fn plus_state() -> Self {
        BoundarySpec {
            strength: crate::DEFAULT_BOUNDARY_STRENGTH,
            axis: [-1.0, 0.0, 0.0],
        }
    }

    /// E (I - sigma_z): prepares |0>.
    pub fn zero_state() -> Self {
        BoundarySpec {
            strength: crate::DEFAULT_BOUNDARY_STRENGTH,
            axis: [0.0, 0.0, -1.0],
        }
    }

    /// E (I + sigma_z): prepares |1>.
    pub fn one_state() -> Self {
        BoundarySpec {
            strength: crate::DEFAULT_BOUNDARY_STRENGTH,
            axis: [0.0, 0.0, 1.0],
        }
    }

    /// 10 eps (I + alpha sigma_z - sqrt(1 - alpha^2) sigma_x): prepares
    /// a|0> + b|1> with a/b = sqrt((1 - alpha) / (1 + alpha)).
    pub fn tilted(alpha: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&alpha) {
            return Err(Error::Parameter(format!("alpha {alpha} outside [-1, 1]")));
        }
        BoundarySpec::new(
            crate::DEFAULT_BOUNDARY_STRENGTH,
            [-(1.0 - alpha * alpha).sqrt(), 0.0, alpha],
        )
    }

    /// The 2x2 matrix E (I + a . sigma) in the dot basis.
    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        let e = self.strength;
        let [ax, ay, az] = self.axis;
        [
            [
                Complex64::new(e * (1.0 + az), 0.0),
                Complex64::new(e * ax, -e * ay),
            ],
            [
                Complex64::new(e * ax, e * ay),
                Complex64::new(e * (1.0 - az), 0.0),
            ],
        ]
    }

    /// Normalized null spinor of I + a . sigma: the prepared row-0 state.
    pub fn ground_spinor(&self) -> [Complex64; 2] {
        let [ax, ay, az] = self.axis;
        // (I + a.sigma) has eigenvalues 0 and 2; the null spinor is the
        // -1 eigenvector of a.sigma.
        let v = if az <= 0.0 {
            [
                Complex64::new(1.0 - az, 0.0),
                Complex64::new(-ax, -ay),
            ]
        } else {
            [
                Complex64::new(-ax, ay),
                Complex64::new(1.0 + az, 0.0),
            ]
        };
        let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
        [v[0] / n, v[1] / n]
    }

    pub fn is_real(&self) -> bool {
        self.axis[1].abs() <= AXIS_NORM_TOL
    }
}

/// One single-qubit Hamiltonian attached to a row transition.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GateSpec {
    Unitary(Unitary2),
    /// h(B, lambda): passes both dots, amplifying the next row by lambda.
    Boost { lambda: f64 },
    /// h(|bit>, lambda): passes only the given dot, amplifying it by lambda.
    Projection { bit: u8, lambda: f64 },
    /// h'(B, lambda'): the schedule variant that boosts the *previous* row,
    /// used on first transitions during adiabatic preparation. Equals h(I)
    /// at lambda' = 1.
    ScheduleBoost { lambda_prime: f64 },
}

impl GateSpec {
    pub fn identity() -> Self {
        GateSpec::Unitary(Unitary2::identity())
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            GateSpec::Unitary(u) => {
                if !u.is_unitary() {
                    return Err(Error::Circuit("gate matrix is not unitary".into()));
                }
            }
            GateSpec::Boost { lambda } | GateSpec::Projection { lambda, .. } => {
                if !(*lambda >= 1.0) {
                    return Err(Error::Circuit(format!(
                        "amplifying factor lambda = {lambda} must be >= 1"
                    )));
                }
                if let GateSpec::Projection { bit, .. } = self {
                    if *bit > 1 {
                        return Err(Error::Circuit("projection bit must be 0 or 1".into()));
                    }
                }
            }
            GateSpec::ScheduleBoost { lambda_prime } => {
                if !(*lambda_prime >= 1.0) {
                    return Err(Error::Circuit(format!(
                        "schedule boost lambda' = {lambda_prime} must be >= 1"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn is_real(&self) -> bool {
        match self {
            GateSpec::Unitary(u) => u.is_real(),
            _ => true,
        }
    }
}

/// What a row transition carries: a single-qubit gate or one side of a link.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Transition {
    Gate(GateSpec),
    /// This transition is the control hop of `links[index]`.
    ControlOf(usize),
    /// This transition is the target hop of `links[index]`.
    TargetOf(usize),
}

/// Terminal classification of a column, derived from its last transition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TerminalKind {
    BoostEnded,
    ProjectionEnded,
    Continues,
}

/// A qubit: a column of `n_rows` rows, each a pair of dots, holding exactly
/// one electron. Transition `t` connects rows `t` and `t + 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct QubitColumn {
    pub id: usize,
    pub boundary: BoundarySpec,
    pub transitions: Vec<Transition>,
}

impl QubitColumn {
    /// Build a column from plain gates (no link sides).
    pub fn new(n_rows: usize, boundary: BoundarySpec, gates: Vec<GateSpec>) -> Result<Self> {
        if n_rows < 2 {
            return Err(Error::Circuit("a column needs at least 2 rows".into()));
        }
        if gates.len() != n_rows - 1 {
            return Err(Error::Circuit(format!(
                "{} gates do not cover the {} transitions of a {}-row column",
                gates.len(),
                n_rows - 1,
                n_rows
            )));
        }
        for g in &gates {
            g.validate()?;
        }
        Ok(QubitColumn {
            id: 0,
            boundary,
            transitions: gates.into_iter().map(Transition::Gate).collect(),
        })
    }

    pub fn n_rows(&self) -> usize {
        self.transitions.len() + 1
    }

    /// Number of dot sites, 2 per row.
    pub fn n_sites(&self) -> usize {
        2 * self.n_rows()
    }

    pub fn terminal(&self) -> TerminalKind {
        match self.transitions.last() {
            Some(Transition::Gate(GateSpec::Boost { .. })) => TerminalKind::BoostEnded,
            Some(Transition::Gate(GateSpec::Projection { .. })) => TerminalKind::ProjectionEnded,
            _ => TerminalKind::Continues,
        }
    }

    /// The lambda of the terminal boost/projection, if any.
    pub fn terminal_lambda(&self) -> Option<f64> {
        match self.transitions.last() {
            Some(Transition::Gate(GateSpec::Boost { lambda })) => Some(*lambda),
            Some(Transition::Gate(GateSpec::Projection { lambda, .. })) => Some(*lambda),
            _ => None,
        }
    }

    /// For a projection-ended column, the final-row dot the projection does
    /// not feed. No Hamiltonian term touches it, so the site is inert.
    pub fn inert_final_site(&self) -> Option<usize> {
        match self.transitions.last() {
            Some(Transition::Gate(GateSpec::Projection { bit, .. })) => {
                Some(2 * (self.n_rows() - 1) + (1 - *bit) as usize)
            }
            _ => None,
        }
    }
}

/// A CNOT interaction: the control hop on one column gated against the
/// target hop (identity or NOT) on another. Transition indices are 0-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CnotLink {
    pub control_qubit: usize,
    pub control_transition: usize,
    pub target_qubit: usize,
    pub target_transition: usize,
}

/// A full GSQC circuit: qubit columns plus CNOT links, with a global energy
/// unit. Immutable after construction.
#[derive(Clone, Debug, PartialEq)]
pub struct CircuitGraph {
    pub qubits: Vec<QubitColumn>,
    pub links: Vec<CnotLink>,
    pub epsilon: f64,
}

impl CircuitGraph {
    /// Single-column circuit.
    pub fn single(column: QubitColumn) -> Self {
        let mut column = column;
        column.id = 0;
        CircuitGraph {
            qubits: vec![column],
            links: Vec::new(),
            epsilon: crate::EPSILON,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.qubits.len()
    }

    /// Product of per-qubit site counts, guarded against overflow.
    pub fn dimension(&self, max_dim: usize) -> Result<usize> {
        let mut d: u128 = 1;
        for q in &self.qubits {
            d = d.saturating_mul(q.n_sites() as u128);
            if d > max_dim as u128 {
                return Err(Error::DimensionGuard { dim: d, max: max_dim });
            }
        }
        Ok(d as usize)
    }

    pub fn is_real(&self) -> bool {
        self.qubits.iter().all(|q| {
            q.boundary.is_real()
                && q.transitions.iter().all(|t| match t {
                    Transition::Gate(g) => g.is_real(),
                    _ => true,
                })
        })
    }

    /// All inert sites as (qubit, site) pairs.
    pub fn inert_sites(&self) -> Vec<(usize, usize)> {
        self.qubits
            .iter()
            .enumerate()
            .filter_map(|(i, q)| q.inert_final_site().map(|s| (i, s)))
            .collect()
    }

    /// Links in which the given qubit participates, in transition order,
    /// as (link index, this qubit's transition, is_control).
    pub fn links_of(&self, qubit: usize) -> Vec<(usize, usize, bool)> {
        let mut out = Vec::new();
        for (t, tr) in self.qubits[qubit].transitions.iter().enumerate() {
            match tr {
                Transition::ControlOf(li) => out.push((*li, t, true)),
                Transition::TargetOf(li) => out.push((*li, t, false)),
                Transition::Gate(_) => {}
            }
        }
        out
    }

    /// Structural validation. Collects every violation rather than stopping
    /// at the first.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        if self.epsilon <= 0.0 {
            violations.push("energy unit epsilon must be positive".to_string());
        }
        for (qi, q) in self.qubits.iter().enumerate() {
            if q.id != qi {
                violations.push(format!("qubit {qi} carries id {}", q.id));
            }
            if q.n_rows() < 2 {
                violations.push(format!("qubit {qi} has fewer than 2 rows"));
            }
            if let Err(e) = BoundarySpec::new(q.boundary.strength, q.boundary.axis) {
                violations.push(format!("qubit {qi}: {e}"));
            }
            let last = q.transitions.len().saturating_sub(1);
            for (t, tr) in q.transitions.iter().enumerate() {
                match tr {
                    Transition::Gate(g) => {
                        if let Err(e) = g.validate() {
                            violations.push(format!("qubit {qi} transition {t}: {e}"));
                        }
                        match g {
                            GateSpec::Boost { .. } | GateSpec::Projection { .. } if t != last => {
                                violations.push(format!(
                                    "qubit {qi}: boost/projection at interior transition {t}"
                                ));
                            }
                            GateSpec::ScheduleBoost { .. } if t != 0 => {
                                violations.push(format!(
                                    "qubit {qi}: schedule boost away from the first transition"
                                ));
                            }
                            _ => {}
                        }
                    }
                    Transition::ControlOf(li) | Transition::TargetOf(li) => {
                        match self.links.get(*li) {
                            None => violations
                                .push(format!("qubit {qi} transition {t} references missing link {li}")),
                            Some(l) => {
                                let (want_q, want_t) = if matches!(tr, Transition::ControlOf(_)) {
                                    (l.control_qubit, l.control_transition)
                                } else {
                                    (l.target_qubit, l.target_transition)
                                };
                                if want_q != qi || want_t != t {
                                    violations.push(format!(
                                        "qubit {qi} transition {t} disagrees with link {li}"
                                    ));
                                }
                            }
                        }
                    }
                }
            }
        }
        for (li, l) in self.links.iter().enumerate() {
            if l.control_qubit == l.target_qubit {
                violations.push(format!("link {li}: control and target coincide"));
            }
            for &(q, t, side) in &[
                (l.control_qubit, l.control_transition, true),
                (l.target_qubit, l.target_transition, false),
            ] {
                match self.qubits.get(q).and_then(|c| c.transitions.get(t)) {
                    Some(Transition::ControlOf(i)) if side && *i == li => {}
                    Some(Transition::TargetOf(i)) if !side && *i == li => {}
                    Some(_) => violations.push(format!(
                        "link {li}: qubit {q} transition {t} is not marked as its {} side",
                        if side { "control" } else { "target" }
                    )),
                    None => violations.push(format!(
                        "link {li} references row {} of qubit {q} beyond its column",
                        t + 1
                    )),
                }
            }
        }
        let acyclic = violations.is_empty() && self.factor_order().is_some();
        if violations.is_empty() && !acyclic {
            violations.push("control-precedes-target ordering contains a cycle".to_string());
        }
        let dimension = self.dimension(usize::MAX).ok();
        ValidationReport {
            dimension,
            per_qubit_rows: self.qubits.iter().map(|q| q.n_rows()).collect(),
            terminals: self.qubits.iter().map(|q| q.terminal()).collect(),
            acyclic,
            violations,
        }
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let report = self.validate();
        if report.violations.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(report.violations))
        }
    }

    /// A topological order over ground-state factors: per-qubit transitions
    /// in row order, with each link emitted once, after both sides' earlier
    /// transitions. Returns None when the link ordering is cyclic.
    pub fn factor_order(&self) -> Option<Vec<FactorStep>> {
        let nq = self.qubits.len();
        let mut done = vec![0usize; nq];
        let mut emitted = vec![false; self.links.len()];
        let mut order = Vec::new();
        loop {
            let mut progressed = false;
            for qi in 0..nq {
                while done[qi] < self.qubits[qi].transitions.len() {
                    match self.qubits[qi].transitions[done[qi]] {
                        Transition::Gate(g) => {
                            order.push(FactorStep::Gate {
                                qubit: qi,
                                transition: done[qi],
                                gate: g,
                            });
                            done[qi] += 1;
                            progressed = true;
                        }
                        Transition::ControlOf(li) | Transition::TargetOf(li) => {
                            if emitted[li] {
                                done[qi] += 1;
                                progressed = true;
                                continue;
                            }
                            let l = &self.links[li];
                            if done[l.control_qubit] == l.control_transition
                                && done[l.target_qubit] == l.target_transition
                            {
                                order.push(FactorStep::Link { index: li });
                                emitted[li] = true;
                                // Both sides advance past the link; the loop
                                // re-checks this qubit and the partner later.
                                done[qi] += 1;
                                progressed = true;
                            } else {
                                break;
                            }
                        }
                    }
                }
            }
            if !progressed {
                break;
            }
        }
        let complete = done
            .iter()
            .zip(&self.qubits)
            .all(|(d, q)| *d == q.transitions.len());
        complete.then_some(order)
    }
}

/// One step in the ground-state factor ordering.
#[derive(Clone, Copy, Debug)]
pub enum FactorStep {
    Gate {
        qubit: usize,
        transition: usize,
        gate: GateSpec,
    },
    Link {
        index: usize,
    },
}

/// Outcome of structural validation.
#[derive(Clone, Debug)]
pub struct ValidationReport {
    /// Product of site counts; None when it overflows u128 bookkeeping.
    pub dimension: Option<usize>,
    pub per_qubit_rows: Vec<usize>,
    pub terminals: Vec<TerminalKind>,
    pub acyclic: bool,
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Collapse runs of consecutive identity gates to a single transition.
/// Gap and final-row readout are preserved up to re-indexing of interior
/// rows; link references are remapped.
pub fn compact_rows(circuit: &CircuitGraph) -> CircuitGraph {
    let mut qubits = Vec::with_capacity(circuit.qubits.len());
    for q in &circuit.qubits {
        let mut transitions: Vec<Transition> = Vec::with_capacity(q.transitions.len());
        for tr in &q.transitions {
            let is_identity = matches!(tr, Transition::Gate(GateSpec::Unitary(u)) if u.is_identity());
            if is_identity {
                if let Some(Transition::Gate(GateSpec::Unitary(prev))) = transitions.last() {
                    if prev.is_identity() {
                        continue;
                    }
                }
            }
            transitions.push(*tr);
        }
        qubits.push(QubitColumn {
            id: q.id,
            boundary: q.boundary,
            transitions,
        });
    }
    // Remap link transition indices to the compacted columns.
    let mut links = circuit.links.clone();
    for (qi, q) in circuit.qubits.iter().enumerate() {
        let mut new_index = vec![0usize; q.transitions.len()];
        let mut kept: isize = -1;
        let mut prev_identity = false;
        for (t, tr) in q.transitions.iter().enumerate() {
            let is_identity = matches!(tr, Transition::Gate(GateSpec::Unitary(u)) if u.is_identity());
            if !(is_identity && prev_identity) {
                kept += 1;
            }
            new_index[t] = kept as usize;
            prev_identity = is_identity;
        }
        for l in links.iter_mut() {
            if l.control_qubit == qi {
                l.control_transition = new_index[l.control_transition];
            }
            if l.target_qubit == qi {
                l.target_transition = new_index[l.target_transition];
            }
        }
    }
    CircuitGraph {
        qubits,
        links,
        epsilon: circuit.epsilon,
    }
}

/// Incremental circuit builder that keeps columns and links consistent.
#[derive(Default)]
pub struct CircuitBuilder {
    qubits: Vec<QubitColumn>,
    links: Vec<CnotLink>,
}

impl CircuitBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_qubit(&mut self, boundary: BoundarySpec) -> usize {
        let id = self.qubits.len();
        self.qubits.push(QubitColumn {
            id,
            boundary,
            transitions: Vec::new(),
        });
        id
    }

    pub fn push_gate(&mut self, qubit: usize, gate: GateSpec) {
        self.qubits[qubit].transitions.push(Transition::Gate(gate));
    }

    /// Append one CNOT, consuming the next transition on both columns.
    pub fn push_cnot(&mut self, control: usize, target: usize) -> usize {
        let li = self.links.len();
        let ct = self.qubits[control].transitions.len();
        let tt = self.qubits[target].transitions.len();
        self.qubits[control]
            .transitions
            .push(Transition::ControlOf(li));
        self.qubits[target].transitions.push(Transition::TargetOf(li));
        self.links.push(CnotLink {
            control_qubit: control,
            control_transition: ct,
            target_qubit: target,
            target_transition: tt,
        });
        li
    }

    pub fn n_transitions(&self, qubit: usize) -> usize {
        self.qubits[qubit].transitions.len()
    }

    pub fn finish(self) -> CircuitGraph {
        CircuitGraph {
            qubits: self.qubits,
            links: self.links,
            epsilon: crate::EPSILON,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn new_qubit_arity_check() {
        let gates = vec![GateSpec::identity(); 4];
        let err = QubitColumn::new(6, BoundarySpec::plus_state(), gates).unwrap_err();
        assert!(matches!(err, Error::Circuit(_)));
    }

    #[test]
    fn new_qubit_fig2_shape() {
        let mut gates = vec![GateSpec::identity(); 4];
        gates.push(GateSpec::Projection { bit: 0, lambda: 5.0 });
        let q = QubitColumn::new(6, BoundarySpec::tilted(0.0).unwrap(), gates).unwrap();
        assert_eq!(q.n_rows(), 6);
        assert_eq!(q.n_sites(), 12);
        assert_eq!(q.terminal(), TerminalKind::ProjectionEnded);
        assert_eq!(q.inert_final_site(), Some(11));
    }

    #[test]
    fn minimal_two_row_column() {
        let q = QubitColumn::new(2, BoundarySpec::plus_state(), vec![GateSpec::identity()]).unwrap();
        assert_eq!(q.n_sites(), 4);
        assert_eq!(q.terminal(), TerminalKind::Continues);
    }

    #[test]
    fn rejects_small_lambda() {
        let gates = vec![GateSpec::Boost { lambda: 0.5 }];
        assert!(QubitColumn::new(2, BoundarySpec::plus_state(), gates).is_err());
    }

    #[test]
    fn boundary_preparing_matches_tilted() {
        for alpha in [0.0, 0.9, 0.99] {
            let a = ((1.0 - alpha) / 2.0_f64).sqrt();
            let b = ((1.0 + alpha) / 2.0_f64).sqrt();
            let from_spinor = BoundarySpec::preparing([a, b]);
            let tilted = BoundarySpec::tilted(alpha).unwrap();
            for i in 0..3 {
                assert!((from_spinor.axis[i] - tilted.axis[i]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn ground_spinor_annihilated() {
        for axis in [
            [-1.0, 0.0, 0.0],
            [0.0, 0.0, -1.0],
            [0.0, 0.0, 1.0],
            [0.6, 0.0, -0.8],
            [0.0, 1.0, 0.0],
        ] {
            let b = BoundarySpec::new(10.0, axis).unwrap();
            let m = b.matrix();
            let s = b.ground_spinor();
            for row in 0..2 {
                let v = m[row][0] * s[0] + m[row][1] * s[1];
                assert!(v.norm() < 1e-12, "axis {axis:?} row {row}: |v| = {}", v.norm());
            }
        }
    }

    #[test]
    fn validation_catches_bad_link_row() {
        let mut b = CircuitBuilder::new();
        let q0 = b.add_qubit(BoundarySpec::plus_state());
        let q1 = b.add_qubit(BoundarySpec::zero_state());
        b.push_gate(q0, GateSpec::identity());
        b.push_cnot(q0, q1);
        let mut c = b.finish();
        c.links[0].target_transition = 7;
        let report = c.validate();
        assert!(!report.is_ok());
    }

    #[test]
    fn validation_catches_cycle() {
        // Two CNOTs between the same pair with crossed ordering: q0 controls
        // q1 at its later transition but targets it at its earlier one.
        let mut b = CircuitBuilder::new();
        let q0 = b.add_qubit(BoundarySpec::plus_state());
        let q1 = b.add_qubit(BoundarySpec::zero_state());
        b.push_cnot(q0, q1);
        b.push_cnot(q1, q0);
        let mut c = b.finish();
        // Swap the two links' transition assignments on q0 to create a cycle.
        c.qubits[0].transitions.swap(0, 1);
        let l0 = c.links[0];
        let l1 = c.links[1];
        c.links[0] = CnotLink {
            control_transition: 1,
            ..l0
        };
        c.links[1] = CnotLink {
            target_transition: 0,
            ..l1
        };
        let report = c.validate();
        assert!(!report.is_ok());
    }

    #[test]
    fn compact_rows_collapses_identity_runs() {
        let mut gates = vec![GateSpec::identity(); 3];
        gates.push(GateSpec::Projection { bit: 0, lambda: 3.0 });
        let q = QubitColumn::new(5, BoundarySpec::plus_state(), gates).unwrap();
        let c = compact_rows(&CircuitGraph::single(q));
        assert_eq!(c.qubits[0].n_rows(), 3);
        assert_eq!(c.qubits[0].transitions.len(), 2);
    }

    #[test]
    fn compact_rows_remaps_links() {
        let mut b = CircuitBuilder::new();
        let q0 = b.add_qubit(BoundarySpec::plus_state());
        let q1 = b.add_qubit(BoundarySpec::zero_state());
        for _ in 0..3 {
            b.push_gate(q0, GateSpec::identity());
        }
        b.push_gate(q1, GateSpec::identity());
        b.push_cnot(q0, q1);
        b.push_gate(q0, GateSpec::Boost { lambda: 2.0 });
        b.push_gate(q1, GateSpec::Projection { bit: 0, lambda: 2.0 });
        let c = b.finish();
        let cc = compact_rows(&c);
        assert!(cc.validate().is_ok());
        assert_eq!(cc.links[0].control_transition, 1);
        assert_eq!(cc.qubits[0].transitions.len(), 3);
    }

    #[test]
    fn compact_rows_leaves_no_identity_runs_untouched() {
        let q = QubitColumn::new(
            3,
            BoundarySpec::plus_state(),
            vec![
                GateSpec::Unitary(Unitary2::hadamard()),
                GateSpec::Boost { lambda: 2.0 },
            ],
        )
        .unwrap();
        let c = CircuitGraph::single(q);
        assert_eq!(compact_rows(&c), c);
    }

    #[test]
    fn margolus_rotation_convention() {
        let r = Unitary2::y_rotation(std::f64::consts::FRAC_PI_4);
        let sq = r.0;
        // R(pi/4)^2 rotates by pi/4.
        let mut prod = [[Complex64::new(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    prod[i][j] += sq[i][k] * sq[k][j];
                }
            }
        }
        let c = (std::f64::consts::FRAC_PI_4).cos();
        assert!((prod[0][0].re - c).abs() < 1e-12);
        assert!((prod[0][1].re + (std::f64::consts::FRAC_PI_4).sin()).abs() < 1e-12);
    }
}
