//! Static gap tracing along the adiabatic preparation schedule: stage 2
//! turns 1/lambda' from ~0 to 1 with all terminals at lambda = 1; stage 3
//! turns 1/lambda from 1 down to 1/sqrt(D N).

use crate::circuit::CircuitGraph;
use crate::error::Error;
use crate::hamiltonian::assemble_scheduled;
use crate::solver::{final_row_readout, lowest_two};
use crate::Result;

#[derive(Clone, Copy, Debug)]
pub struct ScheduleRow {
    pub stage: u8,
    /// 1/lambda' (stage 2) or 1/lambda (stage 3).
    pub parameter: f64,
    pub e0: f64,
    pub e1: f64,
    pub gap: f64,
    pub p_all_final: f64,
    pub iterations: usize,
    pub residual: f64,
}

#[derive(Clone, Debug, Default)]
pub struct ScheduleTrace {
    pub rows: Vec<ScheduleRow>,
}

impl ScheduleTrace {
    pub fn stage_rows(&self, stage: u8) -> impl Iterator<Item = &ScheduleRow> {
        self.rows.iter().filter(move |r| r.stage == stage)
    }

    /// Largest relative gap increase along stage 3 (0 when monotone
    /// non-increasing).
    pub fn stage3_max_increase(&self) -> f64 {
        let gaps: Vec<f64> = self.stage_rows(3).map(|r| r.gap).collect();
        gaps.windows(2)
            .map(|w| (w[1] - w[0]) / w[0].max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max)
    }
}

/// Solver knobs shared by sweep drivers.
#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
    pub max_dim: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: super::SOLVER_TOL,
            max_iter: super::SOLVER_MAX_ITER,
            seed: 1,
            max_dim: crate::DEFAULT_MAX_DIMENSION,
        }
    }
}

/// Eigensolve the scheduled Hamiltonian at every stage-2 and stage-3 point.
///
/// Stage-2 points are 1/lambda' values, nondecreasing within [0, 1].
/// Stage-3 points are 1/lambda values, nonincreasing from 1 toward
/// 1/sqrt(D N), which must stay within (0, 1].
pub fn gap_along_schedule(
    circuit: &CircuitGraph,
    stage2: &[f64],
    stage3: &[f64],
    d_param: f64,
    n_bits: usize,
    opts: &SolveOptions,
) -> Result<ScheduleTrace> {
    if !(d_param > 0.0) || n_bits == 0 {
        return Err(Error::Parameter("need D > 0 and N >= 1".into()));
    }
    let floor = 1.0 / (d_param * n_bits as f64).sqrt();
    for w in stage2.windows(2) {
        if w[1] < w[0] {
            return Err(Error::Parameter("stage-2 points must be nondecreasing".into()));
        }
    }
    for &p in stage2 {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Parameter(format!("stage-2 point {p} outside [0, 1]")));
        }
    }
    for w in stage3.windows(2) {
        if w[1] > w[0] {
            return Err(Error::Parameter("stage-3 points must be nonincreasing".into()));
        }
    }
    for &p in stage3 {
        if !(p > 0.0 && p <= 1.0) || p < floor - 1e-12 {
            return Err(Error::Parameter(format!(
                "stage-3 point {p} outside [1/sqrt(DN) = {floor:.6}, 1]"
            )));
        }
    }

    let mut trace = ScheduleTrace::default();
    for (stage, points) in [(2u8, stage2), (3u8, stage3)] {
        for &p in points {
            let (inv_lp, inv_ls) = if stage == 2 { (p, 1.0) } else { (1.0, p) };
            let h = assemble_scheduled(circuit, inv_lp, inv_ls, opts.max_dim)?;
            let r = lowest_two(&h, opts.tol, opts.max_iter, opts.seed)?;
            let readout = final_row_readout(&r, circuit)?;
            trace.rows.push(ScheduleRow {
                stage,
                parameter: p,
                e0: r.e0,
                e1: r.e1,
                gap: r.gap,
                p_all_final: readout.p_all_final,
                iterations: r.iterations,
                residual: r.residual_e0.max(r.residual_e1),
            });
        }
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{compile_filters, FilterBox, FilterMode};

    #[test]
    fn endpoint_matches_production_circuit() {
        let fb = FilterBox::sum1(1, 2, 4.0).unwrap();
        let c = compile_filters(2, &[fb], FilterMode::Compact, None).unwrap();
        let opts = SolveOptions::default();
        let trace = gap_along_schedule(&c, &[], &[1.0, 0.25], 8.0, 2, &opts).unwrap();
        let h = crate::hamiltonian::assemble_default(&c).unwrap();
        let r = lowest_two(&h, opts.tol, opts.max_iter, opts.seed).unwrap();
        let end = trace.rows.last().unwrap();
        assert!((end.gap - r.gap).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_point_lists() {
        let fb = FilterBox::sum1(1, 2, 4.0).unwrap();
        let c = compile_filters(2, &[fb], FilterMode::Compact, None).unwrap();
        let opts = SolveOptions::default();
        assert!(gap_along_schedule(&c, &[0.5, 0.2], &[], 8.0, 2, &opts).is_err());
        assert!(gap_along_schedule(&c, &[], &[0.5, 1.0], 8.0, 2, &opts).is_err());
        assert!(gap_along_schedule(&c, &[], &[0.1], 8.0, 2, &opts).is_err());
    }
}
