//! Symbolic gap estimation: the 1/x counting rule and the closed-form
//! filter gap bound.
//!
//! For each qubit, 1/x estimates the ground-state weight available to a
//! low-lying excitation stuck on the qubit's top rows: the qubit forgoes its
//! own terminal amplification (boost always; projection only under the
//! modified small-fraction rule), and for every interaction partner B it
//! picks up B's upstream-to-final amplitude ratio. Holding B upstream of the
//! shared interaction forgoes B's terminal amplification and that of every
//! qubit whose target hop is gated by one of B's control hops at or after
//! the dividing row. The predicted gap is eps (1/x)_min^2.

use crate::circuit::{CircuitGraph, GateSpec, TerminalKind, Transition};
use crate::error::Error;
use crate::Result;
use std::collections::BTreeMap;

/// Amplitudes (a, b) of the state a|bit> + b|other> entering a projection;
/// the projected fraction is f = |a| / sqrt(|a|^2 + |b|^2).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProjectionFraction {
    a: f64,
    b: f64,
}

impl ProjectionFraction {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if a == 0.0 && b == 0.0 {
            return Err(Error::Parameter("amplitudes (a, b) both zero".into()));
        }
        Ok(ProjectionFraction {
            a: a.abs(),
            b: b.abs(),
        })
    }

    /// Fraction 1 (nothing filtered away).
    pub fn full() -> Self {
        ProjectionFraction { a: 1.0, b: 0.0 }
    }

    /// Oracle-derived: a clause keeping S_next of S_prev satisfying states
    /// projects the fraction sqrt(S_next / S_prev).
    pub fn from_count_ratio(s_prev: u64, s_next: u64) -> Result<Self> {
        if s_prev == 0 || s_next > s_prev {
            return Err(Error::Parameter(format!(
                "need S_prev >= S_next >= 0 with S_prev > 0, got ({s_prev}, {s_next})"
            )));
        }
        Ok(ProjectionFraction {
            a: (s_next as f64).sqrt(),
            b: ((s_prev - s_next) as f64).sqrt(),
        })
    }

    pub fn fraction(&self) -> f64 {
        self.a / (self.a * self.a + self.b * self.b).sqrt()
    }

    /// The crossover boost factor sqrt(|a|^2 + |b|^2) / |a|.
    pub fn crossover_lambda(&self) -> f64 {
        1.0 / self.fraction()
    }
}

/// Per-qubit fractions for projection terminals. Missing entries default to
/// fraction 1 unless constructed strict.
#[derive(Clone, Debug, Default)]
pub struct FractionMap {
    entries: BTreeMap<usize, ProjectionFraction>,
    strict: bool,
}

impl FractionMap {
    pub fn strict() -> Self {
        FractionMap {
            entries: BTreeMap::new(),
            strict: true,
        }
    }

    pub fn insert(&mut self, qubit: usize, f: ProjectionFraction) {
        self.entries.insert(qubit, f);
    }

    fn get(&self, qubit: usize) -> Result<ProjectionFraction> {
        match self.entries.get(&qubit) {
            Some(f) => Ok(*f),
            None if self.strict => Err(Error::Parameter(format!(
                "no projection fraction supplied for qubit {qubit}"
            ))),
            None => Ok(ProjectionFraction::full()),
        }
    }
}

/// Which variant of the counting rule to apply.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CountingRule {
    /// Projections assumed to pass an appreciable fraction: the qubit's own
    /// projection terminal contributes nothing.
    Baseline,
    /// Small-fraction variant: the qubit's own projection contributes
    /// 1/min(lambda, 1/f), and forgone projection terminals weigh lambda f.
    Modified,
}

/// One multiplicative contribution to 1/x.
#[derive(Clone, Debug)]
pub struct Factor {
    pub description: String,
    pub value: f64,
    pub lambda_exponent: i32,
}

/// The 1/x estimate of one qubit.
#[derive(Clone, Debug)]
pub struct InverseX {
    pub qubit: usize,
    pub value: f64,
    pub lambda_exponent: i32,
    pub factors: Vec<Factor>,
}

/// Estimator confidence; chained small-fraction projections on one column
/// have no worked precedent and are flagged rather than guessed at.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Confidence {
    Normal,
    Low,
}

/// Gap prediction for a whole circuit.
#[derive(Clone, Debug)]
pub struct GapEstimate {
    pub per_qubit: Vec<InverseX>,
    pub min_inverse_x: f64,
    pub min_qubit: usize,
    /// eps (1/x)_min^2.
    pub gap_scale: f64,
    /// Power of lambda in the predicted gap at the evaluated lambda.
    pub lambda_exponent: i32,
    /// T ~ 1/gap^2.
    pub time_cost_scale: f64,
    pub confidence: Confidence,
}

/// Terminal amplification forgone when a qubit cannot reach its final row.
fn forgone_amplitude(
    circuit: &CircuitGraph,
    qubit: usize,
    fractions: &FractionMap,
    lambda: f64,
    rule: CountingRule,
) -> Result<Option<(f64, i32)>> {
    Ok(match circuit.qubits[qubit].terminal() {
        TerminalKind::BoostEnded => Some((lambda, -1)),
        TerminalKind::ProjectionEnded => match rule {
            CountingRule::Baseline => Some((lambda, -1)),
            CountingRule::Modified => {
                let f = fractions.get(qubit)?.fraction();
                Some((lambda * f, -1))
            }
        },
        TerminalKind::Continues => None,
    })
}

/// Amplitude ratio of B's upstream part (relative to its transition
/// `division`) over the circuit's final-row configuration, excluding the
/// qubit under estimation.
fn upstream_ratio(
    circuit: &CircuitGraph,
    b: usize,
    division: usize,
    exclude: usize,
    fractions: &FractionMap,
    lambda: f64,
    rule: CountingRule,
    factors: &mut Vec<Factor>,
) -> Result<(f64, i32)> {
    let mut value = 1.0;
    let mut exponent = 0;
    if let Some((amp, exp)) = forgone_amplitude(circuit, b, fractions, lambda, rule)? {
        value /= amp;
        exponent += exp;
        factors.push(Factor {
            description: format!("forgoes final row of qubit {b}"),
            value: 1.0 / amp,
            lambda_exponent: exp,
        });
    }
    for (li, t, is_control) in circuit.links_of(b) {
        if !is_control || t < division {
            continue;
        }
        let target = circuit.links[li].target_qubit;
        if target == exclude {
            continue;
        }
        if let Some((amp, exp)) = forgone_amplitude(circuit, target, fractions, lambda, rule)? {
            value /= amp;
            exponent += exp;
            factors.push(Factor {
                description: format!("blocks qubit {target} behind link {li}"),
                value: 1.0 / amp,
                lambda_exponent: exp,
            });
        }
    }
    Ok((value, exponent))
}

/// The 1/x parameter of one qubit under the counting rule, with the
/// contributing factors recorded.
pub fn estimate_inverse_x(
    circuit: &CircuitGraph,
    qubit: usize,
    fractions: &FractionMap,
    lambda: f64,
    rule: CountingRule,
) -> Result<InverseX> {
    circuit.ensure_valid()?;
    if qubit >= circuit.n_qubits() {
        return Err(Error::Parameter(format!(
            "qubit {qubit} not in the circuit"
        )));
    }
    if !(lambda >= 1.0) {
        return Err(Error::Parameter(format!("lambda = {lambda} must be >= 1")));
    }
    let mut value = 1.0;
    let mut exponent = 0i32;
    let mut factors = Vec::new();
    match circuit.qubits[qubit].terminal() {
        TerminalKind::BoostEnded => {
            value /= lambda;
            exponent -= 1;
            factors.push(Factor {
                description: "own boost terminal".into(),
                value: 1.0 / lambda,
                lambda_exponent: -1,
            });
        }
        TerminalKind::ProjectionEnded => {
            if rule == CountingRule::Modified {
                let inv_f = fractions.get(qubit)?.crossover_lambda();
                let m = lambda.min(inv_f);
                let exp = if lambda < inv_f { -1 } else { 0 };
                value /= m;
                exponent += exp;
                factors.push(Factor {
                    description: "own projection terminal, min(lambda, 1/f)".into(),
                    value: 1.0 / m,
                    lambda_exponent: exp,
                });
            }
        }
        TerminalKind::Continues => {}
    }
    for (li, _, is_control) in circuit.links_of(qubit) {
        let link = circuit.links[li];
        let (partner, division) = if is_control {
            (link.target_qubit, link.target_transition)
        } else {
            (link.control_qubit, link.control_transition)
        };
        let (v, e) = upstream_ratio(
            circuit, partner, division, qubit, fractions, lambda, rule, &mut factors,
        )?;
        value *= v;
        exponent += e;
    }
    Ok(InverseX {
        qubit,
        value,
        lambda_exponent: exponent,
        factors,
    })
}

/// Evaluate every qubit and report the minimum, the predicted gap scale
/// eps (1/x)_min^2, and its lambda exponent.
pub fn predict_gap(
    circuit: &CircuitGraph,
    fractions: &FractionMap,
    lambda: f64,
    rule: CountingRule,
) -> Result<GapEstimate> {
    let mut per_qubit = Vec::with_capacity(circuit.n_qubits());
    for q in 0..circuit.n_qubits() {
        per_qubit.push(estimate_inverse_x(circuit, q, fractions, lambda, rule)?);
    }
    let min = per_qubit
        .iter()
        .min_by(|a, b| a.value.total_cmp(&b.value))
        .expect("nonempty circuit");
    let gap_scale = crate::EPSILON * min.value * min.value;
    let mut confidence = Confidence::Normal;
    for (qi, q) in circuit.qubits.iter().enumerate() {
        let projections = q
            .transitions
            .iter()
            .filter(|t| matches!(t, Transition::Gate(GateSpec::Projection { .. })))
            .count();
        if projections >= 2
            && rule == CountingRule::Modified
            && fractions.get(qi)?.fraction() < 1.0 - 1e-9
        {
            confidence = Confidence::Low;
        }
    }
    Ok(GapEstimate {
        min_inverse_x: min.value,
        min_qubit: min.qubit,
        lambda_exponent: 2 * min.lambda_exponent,
        time_cost_scale: 1.0 / (gap_scale * gap_scale),
        gap_scale,
        per_qubit,
        confidence,
    })
}

/// Gap bound of the (j+1)-th filter in a teleported chain:
/// min(eps / lambda^8, eps S_{j+1} / (lambda^4 S_j)). A blocked filter
/// (S_{j+1} = 0) closes the gap entirely.
pub fn filter_gap_formula(lambda: f64, s_j: u64, s_j1: u64, epsilon: f64) -> Result<f64> {
    if s_j == 0 {
        return Err(Error::Parameter("S_j must be positive".into()));
    }
    if s_j1 > s_j {
        return Err(Error::Parameter(format!(
            "S_{{j+1}} = {s_j1} exceeds S_j = {s_j}"
        )));
    }
    if !(lambda >= 1.0) {
        return Err(Error::Parameter(format!("lambda = {lambda} must be >= 1")));
    }
    if s_j1 == 0 {
        return Ok(0.0);
    }
    let l4 = lambda.powi(4);
    Ok((epsilon / (l4 * l4)).min(epsilon * s_j1 as f64 / (l4 * s_j as f64)))
}

/// Least-squares power-law fit in log-log coordinates.
#[derive(Clone, Copy, Debug)]
pub struct PowerLawFit {
    pub exponent: f64,
    /// Multiplier A in y = A x^exponent.
    pub amplitude: f64,
    /// RMS residual of log y around the fit.
    pub residual: f64,
}

pub fn fit_power_law(points: &[(f64, f64)]) -> Result<PowerLawFit> {
    if points.len() < 3 {
        return Err(Error::Parameter(format!(
            "power-law fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    for &(x, y) in points {
        if !(x > 0.0 && y > 0.0) {
            return Err(Error::Parameter(format!(
                "power-law fit needs positive data, got ({x}, {y})"
            )));
        }
    }
    let n = points.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(x, y) in points {
        let (lx, ly) = (x.ln(), y.ln());
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-300 {
        return Err(Error::Parameter("degenerate abscissae".into()));
    }
    let exponent = (n * sxy - sx * sy) / denom;
    let intercept = (sy - exponent * sx) / n;
    let mut ss = 0.0;
    for &(x, y) in points {
        let r = y.ln() - (intercept + exponent * x.ln());
        ss += r * r;
    }
    Ok(PowerLawFit {
        exponent,
        amplitude: intercept.exp(),
        residual: (ss / n).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::calibration;

    #[test]
    fn single_boost_qubit_scales_inverse_square() {
        let c = calibration::boost_qubit(6, 10.0);
        let est = predict_gap(&c, &FractionMap::default(), 10.0, CountingRule::Baseline).unwrap();
        assert_eq!(est.lambda_exponent, -2);
        assert!((est.min_inverse_x - 0.1).abs() < 1e-12);
    }

    #[test]
    fn single_projection_qubit_is_lambda_free() {
        let c = calibration::projection_qubit(0.0, 10.0);
        for rule in [CountingRule::Baseline, CountingRule::Modified] {
            let est = predict_gap(&c, &FractionMap::default(), 10.0, rule).unwrap();
            assert_eq!(est.lambda_exponent, 0, "rule {rule:?}");
            assert!((est.min_inverse_x - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn small_fraction_projection_crosses_over() {
        let c = calibration::projection_qubit(0.99, 10.0);
        let mut fractions = FractionMap::default();
        // a/b for alpha = 0.99.
        let ab = ((1.0 - 0.99f64) / (1.0 + 0.99)).sqrt();
        fractions.insert(0, ProjectionFraction::new(ab, 1.0).unwrap());
        // Below the crossover: exponent -2.
        let est = predict_gap(&c, &fractions, 10.0, CountingRule::Modified).unwrap();
        assert_eq!(est.lambda_exponent, -2);
        // Above: saturated, exponent 0, scale eps f^2...
        let est = predict_gap(&c, &fractions, 100.0, CountingRule::Modified).unwrap();
        assert_eq!(est.lambda_exponent, 0);
        let f = ProjectionFraction::new(ab, 1.0).unwrap().fraction();
        assert!((est.gap_scale - f * f).abs() < 1e-12);
    }

    #[test]
    fn cnot_pair_scales_inverse_fourth() {
        for projection_target in [false, true] {
            let c = calibration::cnot_pair(10.0, projection_target);
            let est =
                predict_gap(&c, &FractionMap::default(), 10.0, CountingRule::Baseline).unwrap();
            assert_eq!(est.lambda_exponent, -4, "projection {projection_target}");
        }
    }

    #[test]
    fn teleported_cnot_reaches_inverse_eighth() {
        let c = calibration::teleported_cnot(10.0);
        let est = predict_gap(&c, &FractionMap::default(), 10.0, CountingRule::Baseline).unwrap();
        assert_eq!(est.lambda_exponent, -8);
        assert!((est.min_inverse_x - 1e-4).abs() < 1e-15);
        // The modified rule with full fractions agrees exactly.
        let est2 = predict_gap(&c, &FractionMap::default(), 10.0, CountingRule::Modified).unwrap();
        assert_eq!(est2.lambda_exponent, est.lambda_exponent);
        for (a, b) in est.per_qubit.iter().zip(&est2.per_qubit) {
            assert!((a.value - b.value).abs() <= 1e-12 * a.value.abs());
        }
    }

    #[test]
    fn sat_ancilla_rule_matches_ledger_formula() {
        // A final-segment ancilla: target of one CNOT from a carrier that
        // also controls a teleport-out link; modified rule with fraction
        // sqrt(S1/S0) gives 1/x = 1/(lambda^2 min(lambda, sqrt(S0/S1))).
        use crate::circuit::{BoundarySpec, CircuitBuilder, GateSpec};
        let lambda = 10.0;
        let mut b = CircuitBuilder::new();
        let carrier = b.add_qubit(BoundarySpec::plus_state());
        let anc = b.add_qubit(BoundarySpec::zero_state());
        let next_a = b.add_qubit(BoundarySpec::zero_state());
        b.push_gate(carrier, GateSpec::identity());
        b.push_gate(anc, GateSpec::identity());
        b.push_cnot(carrier, anc);
        b.push_cnot(carrier, next_a);
        b.push_gate(carrier, GateSpec::Projection { bit: 0, lambda });
        b.push_gate(anc, GateSpec::Projection { bit: 1, lambda });
        b.push_gate(next_a, GateSpec::Projection { bit: 0, lambda });
        let c = b.finish();

        let (s0, s1) = (8u64, 3u64);
        let mut fractions = FractionMap::default();
        fractions.insert(anc, ProjectionFraction::from_count_ratio(s0, s1).unwrap());
        let est = estimate_inverse_x(&c, anc, &fractions, lambda, CountingRule::Modified).unwrap();
        let expect = 1.0 / (lambda * lambda * lambda.min((s0 as f64 / s1 as f64).sqrt()));
        assert!(
            (est.value - expect).abs() < 1e-12,
            "got {} want {expect}",
            est.value
        );
    }

    #[test]
    fn modified_with_full_fractions_reduces_to_baseline() {
        let c = calibration::cnot_pair(7.0, true);
        let base = predict_gap(&c, &FractionMap::default(), 7.0, CountingRule::Baseline).unwrap();
        let modi = predict_gap(&c, &FractionMap::default(), 7.0, CountingRule::Modified).unwrap();
        for (a, b) in base.per_qubit.iter().zip(&modi.per_qubit) {
            assert!((a.value - b.value).abs() <= 1e-12);
        }
    }

    #[test]
    fn strict_fractions_demand_entries() {
        let c = calibration::projection_qubit(0.9, 5.0);
        let err = predict_gap(&c, &FractionMap::strict(), 5.0, CountingRule::Modified);
        assert!(err.is_err());
    }

    #[test]
    fn filter_gap_formula_cases() {
        let eps = 1.0;
        // S0/S1 = 8/3 at lambda 10: the lambda^-8 branch wins.
        let g = filter_gap_formula(10.0, 8, 3, eps).unwrap();
        assert!((g - 1e-8).abs() < 1e-20);
        // Grover regime S_{j+1}/S_j = 2^-N with lambda = 2^{N/2}.
        let n = 8u32;
        let lam = 2f64.powf(n as f64 / 2.0);
        let g = filter_gap_formula(lam, 1 << n, 1, eps).unwrap();
        assert!(g <= eps * 2f64.powi(-(n as i32)));
        assert!((g - eps * 2f64.powi(-4 * n as i32)).abs() < 1e-30);
        // No filtering, no boost.
        let g = filter_gap_formula(1.0, 5, 5, eps).unwrap();
        assert!((g - eps).abs() < 1e-15);
        // Blocked filter.
        assert_eq!(filter_gap_formula(3.0, 5, 0, eps).unwrap(), 0.0);
        // Guards.
        assert!(filter_gap_formula(3.0, 0, 0, eps).is_err());
        assert!(filter_gap_formula(3.0, 3, 5, eps).is_err());
        assert!(filter_gap_formula(0.5, 5, 3, eps).is_err());
    }

    #[test]
    fn filter_gap_formula_monotone() {
        let eps = 1.0;
        let mut prev = f64::INFINITY;
        for lam in [1.0, 2.0, 4.0, 8.0, 16.0] {
            let g = filter_gap_formula(lam, 16, 4, eps).unwrap();
            assert!(g <= prev);
            prev = g;
        }
        let mut prev = f64::INFINITY;
        for s1 in [16, 8, 4, 2, 1] {
            let g = filter_gap_formula(3.0, 16, s1, eps).unwrap();
            assert!(g <= prev);
            prev = g;
        }
    }

    #[test]
    fn power_law_fit_recovers_exact_slopes() {
        let pts: Vec<(f64, f64)> = (1..8)
            .map(|k| {
                let x = 1.5f64.powi(k);
                (x, 3.0 * x.powi(-2))
            })
            .collect();
        let fit = fit_power_law(&pts).unwrap();
        assert!((fit.exponent + 2.0).abs() < 1e-12);
        assert!((fit.amplitude - 3.0).abs() < 1e-10);
        assert!(fit.residual < 1e-12);

        let flat: Vec<(f64, f64)> = (1..6).map(|k| (k as f64, 0.7)).collect();
        let fit = fit_power_law(&flat).unwrap();
        assert!(fit.exponent.abs() < 1e-12);
    }

    #[test]
    fn power_law_fit_guards() {
        assert!(fit_power_law(&[(1.0, 1.0), (2.0, 0.5)]).is_err());
        assert!(fit_power_law(&[(1.0, 1.0), (2.0, 0.5), (3.0, -0.1)]).is_err());
    }
}
