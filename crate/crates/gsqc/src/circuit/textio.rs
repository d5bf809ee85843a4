//! Line-based circuit description format, round-trippable for circuits in
//! the named gate set {I, H, N, R+, R-, boost, project, sboost}.
//!
//! ```text
//! # gsqc circuit v1
//! epsilon 1
//! qubit 0 rows 4
//!   boundary 10 -1 0 0
//!   gate I
//!   gate link
//!   gate boost 5
//! qubit 1 rows 4
//!   boundary 10 0 0 -1
//!   gate I
//!   gate link
//!   gate project 0 5
//! link 0 1 1 1
//! ```
//!
//! `gate link` marks a transition carried by a CNOT; each `link` line names
//! control qubit, control transition, target qubit, target transition
//! (0-based transitions). Blank lines and `#` comments are ignored.

use super::{BoundarySpec, CircuitGraph, CnotLink, GateSpec, QubitColumn, Transition, Unitary2};
use crate::error::Error;
use crate::Result;

const MAX_QUBITS: usize = 4096;
const MAX_ROWS: usize = 65536;

/// Render a circuit in the text format. Fails on unitaries outside the named
/// gate set.
pub fn write_circuit(circuit: &CircuitGraph) -> Result<String> {
    let mut out = String::from("# gsqc circuit v1\n");
    out.push_str(&format!("epsilon {}\n", circuit.epsilon));
    for q in &circuit.qubits {
        out.push_str(&format!("qubit {} rows {}\n", q.id, q.n_rows()));
        let [ax, ay, az] = q.boundary.axis;
        out.push_str(&format!(
            "  boundary {} {} {} {}\n",
            q.boundary.strength, ax, ay, az
        ));
        for tr in &q.transitions {
            let spec = match tr {
                Transition::ControlOf(_) | Transition::TargetOf(_) => "link".to_string(),
                Transition::Gate(g) => gate_name(g)?,
            };
            out.push_str(&format!("  gate {spec}\n"));
        }
    }
    for l in &circuit.links {
        out.push_str(&format!(
            "link {} {} {} {}\n",
            l.control_qubit, l.control_transition, l.target_qubit, l.target_transition
        ));
    }
    Ok(out)
}

fn gate_name(g: &GateSpec) -> Result<String> {
    Ok(match g {
        GateSpec::Unitary(u) => {
            if u.is_identity() {
                "I".to_string()
            } else if close(u, &Unitary2::hadamard()) {
                "H".to_string()
            } else if close(u, &Unitary2::not()) {
                "N".to_string()
            } else if close(u, &Unitary2::y_rotation(std::f64::consts::FRAC_PI_4)) {
                "R+".to_string()
            } else if close(u, &Unitary2::y_rotation(-std::f64::consts::FRAC_PI_4)) {
                "R-".to_string()
            } else {
                return Err(Error::Unsupported(
                    "circuit files carry only the named gate set {I, H, N, R+, R-}".into(),
                ));
            }
        }
        GateSpec::Boost { lambda } => format!("boost {lambda}"),
        GateSpec::Projection { bit, lambda } => format!("project {bit} {lambda}"),
        GateSpec::ScheduleBoost { lambda_prime } => format!("sboost {lambda_prime}"),
    })
}

fn close(a: &Unitary2, b: &Unitary2) -> bool {
    a.0.iter()
        .flatten()
        .zip(b.0.iter().flatten())
        .all(|(x, y)| (x - y).norm() <= 1e-12)
}

enum Slot {
    Gate(GateSpec),
    LinkPlaceholder,
}

/// Parse the text format back into a circuit. Structural validation runs on
/// the result; the parser itself rejects malformed input without panicking.
pub fn parse_circuit(text: &str) -> Result<CircuitGraph> {
    let mut epsilon = crate::EPSILON;
    let mut qubits: Vec<(usize, usize, Option<BoundarySpec>, Vec<Slot>)> = Vec::new();
    let mut links: Vec<CnotLink> = Vec::new();

    let err = |line: usize, message: &str| Error::Parse {
        line,
        message: message.to_string(),
    };

    for (ln, raw) in text.lines().enumerate() {
        let line_no = ln + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let mut tok = line.split_whitespace();
        let Some(head) = tok.next() else { continue };
        match head {
            "epsilon" => {
                epsilon = parse_f64(tok.next(), line_no)?;
                if !(epsilon > 0.0) {
                    return Err(err(line_no, "epsilon must be positive"));
                }
            }
            "qubit" => {
                let id = parse_usize(tok.next(), line_no)?;
                if tok.next() != Some("rows") {
                    return Err(err(line_no, "expected `qubit <id> rows <n>`"));
                }
                let rows = parse_usize(tok.next(), line_no)?;
                if rows < 2 || rows > MAX_ROWS {
                    return Err(err(line_no, "row count out of range"));
                }
                if qubits.len() >= MAX_QUBITS {
                    return Err(err(line_no, "too many qubits"));
                }
                if id != qubits.len() {
                    return Err(err(line_no, "qubit ids must be consecutive from 0"));
                }
                qubits.push((id, rows, None, Vec::new()));
            }
            "boundary" => {
                let Some(q) = qubits.last_mut() else {
                    return Err(err(line_no, "boundary before any qubit"));
                };
                let e = parse_f64(tok.next(), line_no)?;
                let ax = parse_f64(tok.next(), line_no)?;
                let ay = parse_f64(tok.next(), line_no)?;
                let az = parse_f64(tok.next(), line_no)?;
                q.2 = Some(BoundarySpec::new(e, [ax, ay, az]).map_err(|e| Error::Parse {
                    line: line_no,
                    message: e.to_string(),
                })?);
            }
            "gate" => {
                let Some(q) = qubits.last_mut() else {
                    return Err(err(line_no, "gate before any qubit"));
                };
                if q.3.len() + 1 >= q.1 {
                    return Err(err(line_no, "more gates than transitions"));
                }
                let slot = match tok.next() {
                    Some("I") => Slot::Gate(GateSpec::identity()),
                    Some("H") => Slot::Gate(GateSpec::Unitary(Unitary2::hadamard())),
                    Some("N") => Slot::Gate(GateSpec::Unitary(Unitary2::not())),
                    Some("R+") => Slot::Gate(GateSpec::Unitary(Unitary2::y_rotation(
                        std::f64::consts::FRAC_PI_4,
                    ))),
                    Some("R-") => Slot::Gate(GateSpec::Unitary(Unitary2::y_rotation(
                        -std::f64::consts::FRAC_PI_4,
                    ))),
                    Some("boost") => Slot::Gate(GateSpec::Boost {
                        lambda: parse_f64(tok.next(), line_no)?,
                    }),
                    Some("project") => {
                        let bit = parse_usize(tok.next(), line_no)?;
                        if bit > 1 {
                            return Err(err(line_no, "projection bit must be 0 or 1"));
                        }
                        Slot::Gate(GateSpec::Projection {
                            bit: bit as u8,
                            lambda: parse_f64(tok.next(), line_no)?,
                        })
                    }
                    Some("sboost") => Slot::Gate(GateSpec::ScheduleBoost {
                        lambda_prime: parse_f64(tok.next(), line_no)?,
                    }),
                    Some("link") => Slot::LinkPlaceholder,
                    _ => return Err(err(line_no, "unknown gate")),
                };
                q.3.push(slot);
            }
            "link" => {
                links.push(CnotLink {
                    control_qubit: parse_usize(tok.next(), line_no)?,
                    control_transition: parse_usize(tok.next(), line_no)?,
                    target_qubit: parse_usize(tok.next(), line_no)?,
                    target_transition: parse_usize(tok.next(), line_no)?,
                });
            }
            _ => return Err(err(line_no, "unknown directive")),
        }
        if tok.next().is_some() {
            return Err(err(line_no, "trailing tokens"));
        }
    }

    let mut columns = Vec::with_capacity(qubits.len());
    for (id, rows, boundary, slots) in qubits {
        let boundary =
            boundary.ok_or_else(|| err(0, &format!("qubit {id} is missing its boundary")))?;
        if slots.len() != rows - 1 {
            return Err(Error::Parse {
                line: 0,
                message: format!(
                    "qubit {id}: {} gates do not cover {} transitions",
                    slots.len(),
                    rows - 1
                ),
            });
        }
        let mut transitions = Vec::with_capacity(slots.len());
        for (t, slot) in slots.into_iter().enumerate() {
            transitions.push(match slot {
                Slot::Gate(g) => Transition::Gate(g),
                Slot::LinkPlaceholder => {
                    let found = links.iter().position(|l| {
                        (l.control_qubit == id && l.control_transition == t)
                            || (l.target_qubit == id && l.target_transition == t)
                    });
                    match found {
                        Some(li) => {
                            let l = &links[li];
                            if l.control_qubit == id && l.control_transition == t {
                                Transition::ControlOf(li)
                            } else {
                                Transition::TargetOf(li)
                            }
                        }
                        None => {
                            return Err(Error::Parse {
                                line: 0,
                                message: format!(
                                    "qubit {id} transition {t} marked `link` but no link line names it"
                                ),
                            })
                        }
                    }
                }
            });
        }
        columns.push(QubitColumn {
            id,
            boundary,
            transitions,
        });
    }

    let circuit = CircuitGraph {
        qubits: columns,
        links,
        epsilon,
    };
    circuit.ensure_valid()?;
    Ok(circuit)
}

fn parse_f64(tok: Option<&str>, line: usize) -> Result<f64> {
    let v = tok
        .ok_or_else(|| Error::Parse {
            line,
            message: "missing number".into(),
        })?
        .parse::<f64>()
        .map_err(|_| Error::Parse {
            line,
            message: "bad number".into(),
        })?;
    if !v.is_finite() {
        return Err(Error::Parse {
            line,
            message: "number must be finite".into(),
        });
    }
    Ok(v)
}

fn parse_usize(tok: Option<&str>, line: usize) -> Result<usize> {
    tok.ok_or_else(|| Error::Parse {
        line,
        message: "missing integer".into(),
    })?
    .parse::<usize>()
    .map_err(|_| Error::Parse {
        line,
        message: "bad integer".into(),
    })
}
