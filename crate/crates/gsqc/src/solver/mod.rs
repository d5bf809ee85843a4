//! Ground-state and gap computation: dense oracle, deflated iterative
//! solver, the analytic history-state construction, measurement readout,
//! and adiabatic schedule traces.

mod dense;
mod history;
mod lanczos;
mod readout;
mod schedule;

pub use dense::dense_spectrum;
pub use history::history_state;
pub use readout::{
    conditional_state, conditional_state_of, final_row_readout, readout_from_state, render_bits,
    FinalRowReadout, ReducedState, NO_READOUT_TOL,
};
pub use schedule::{gap_along_schedule, ScheduleRow, ScheduleTrace, SolveOptions};

pub use crate::hamiltonian::StateVector;

use crate::error::Error;
use crate::hamiltonian::{CsrStorage, SparseHermitian};
use crate::Result;
use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;

/// Largest live dimension handled by the dense fallback.
pub const DENSE_FALLBACK_DIM: usize = 4096;

/// Levels closer than this (in units of epsilon) count as one degenerate
/// cluster.
pub const DEGENERACY_TOL: f64 = 1e-8;

/// Default residual tolerance for eigensolves.
pub const SOLVER_TOL: f64 = 1e-10;

/// Default matvec budget per eigenpair.
pub const SOLVER_MAX_ITER: usize = 200_000;

/// Largest degenerate cluster the solver resolves level by level.
const MAX_CLUSTER: usize = 8;

/// Lowest eigenpair(s) of an assembled Hamiltonian.
///
/// Configurations with an electron on an inert projection dot span exact
/// zero modes that carry no information; the solve runs on the live
/// subspace, whose nonzero spectrum is identical, and the ground vector is
/// reported in the full basis with zeros there. When the live E0 level is
/// itself degenerate, `gap` is the distance from E0 to the first level
/// above the whole cluster and `degeneracy` reports the cluster size.
#[derive(Clone, Debug)]
pub struct GroundStateResult {
    pub e0: f64,
    pub e1: f64,
    pub gap: f64,
    pub ground: StateVector,
    pub residual_e0: f64,
    pub residual_e1: f64,
    pub degeneracy: usize,
    pub iterations: usize,
    pub live_dim: usize,
}

/// Compute (E0, E1) and the ground vector. Dense solve for live dimensions
/// up to [`DENSE_FALLBACK_DIM`], deflated thick-restart Lanczos beyond.
pub fn lowest_two(
    h: &SparseHermitian,
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> Result<GroundStateResult> {
    let (live, live_map) = h.live_submatrix();
    let live_dim = live_map.len();
    if live_dim == 0 {
        return Err(Error::Circuit("no live configurations".into()));
    }
    match &live {
        CsrStorage::Real(csr) => {
            if live_dim <= DENSE_FALLBACK_DIM {
                let dense = dense::to_dense_real(csr);
                let (values, vectors) = dense::eigh_sorted(&dense);
                let take = cluster_span(&values);
                let levels: Vec<(f64, Vec<f64>)> = (0..take)
                    .map(|k| (values[k], vectors.column(k).iter().copied().collect()))
                    .collect();
                build_result(h, &live_map, levels, &values, 0, live_dim)
            } else {
                let mut rng = <ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
                let mut found: Vec<(f64, Vec<f64>)> = Vec::new();
                let mut locked: Vec<Vec<f64>> = Vec::new();
                let mut matvecs = 0usize;
                loop {
                    let pair = lanczos::smallest_deflated(csr, &locked, tol, max_iter, &mut rng)?;
                    matvecs += pair.matvecs;
                    found.push((pair.value, pair.vector.clone()));
                    locked.push(pair.vector);
                    let e0 = found[0].0;
                    let last = found.last().unwrap().0;
                    if (found.len() >= 2 && last > e0 + DEGENERACY_TOL)
                        || found.len() >= MAX_CLUSTER + 1
                        || found.len() == live_dim
                    {
                        break;
                    }
                }
                let values: Vec<f64> = found.iter().map(|(v, _)| *v).collect();
                build_result(h, &live_map, found, &values, matvecs, live_dim)
            }
        }
        CsrStorage::Complex(csr) => {
            if live_dim > DENSE_FALLBACK_DIM {
                return Err(Error::Unsupported(format!(
                    "complex-Hermitian circuits are solved densely; live dimension {live_dim} exceeds {DENSE_FALLBACK_DIM}"
                )));
            }
            let (values, vectors) = dense::eigh_complex_embedded(csr);
            let take = cluster_span(&values);
            let levels: Vec<(f64, Vec<Complex64>)> =
                (0..take).map(|k| (values[k], vectors[k].clone())).collect();
            build_result_complex(h, &live_map, levels, &values, live_dim)
        }
    }
}

/// How many levels from the bottom we need to expose the cluster and the
/// first level above it.
fn cluster_span(values: &[f64]) -> usize {
    if values.is_empty() {
        return 0;
    }
    let e0 = values[0];
    let cluster = values
        .iter()
        .take_while(|v| **v <= e0 + DEGENERACY_TOL)
        .count();
    (cluster + 1).min(values.len())
}

fn embed_real(full_dim: usize, live_map: &[u32], v: &[f64]) -> StateVector {
    let mut out = vec![0.0; full_dim];
    for (li, &fi) in live_map.iter().enumerate() {
        out[fi as usize] = v[li];
    }
    StateVector::Real(out)
}

fn build_result(
    h: &SparseHermitian,
    live_map: &[u32],
    levels: Vec<(f64, Vec<f64>)>,
    values: &[f64],
    iterations: usize,
    live_dim: usize,
) -> Result<GroundStateResult> {
    let e0 = values[0];
    let degeneracy = values
        .iter()
        .take_while(|v| **v <= e0 + DEGENERACY_TOL)
        .count();
    let (e1, top_vec) = if degeneracy < levels.len() {
        (values[degeneracy], Some(&levels[degeneracy].1))
    } else {
        (e0, None)
    };
    let ground = embed_real(h.dim(), live_map, &levels[0].1);
    let residual_e0 = h.residual(&ground, e0)?;
    let residual_e1 = match top_vec {
        Some(v) => h.residual(&embed_real(h.dim(), live_map, v), e1)?,
        None => 0.0,
    };
    Ok(GroundStateResult {
        e0,
        e1,
        gap: e1 - e0,
        ground,
        residual_e0,
        residual_e1,
        degeneracy,
        iterations,
        live_dim,
    })
}

fn build_result_complex(
    h: &SparseHermitian,
    live_map: &[u32],
    levels: Vec<(f64, Vec<Complex64>)>,
    values: &[f64],
    live_dim: usize,
) -> Result<GroundStateResult> {
    let e0 = values[0];
    let degeneracy = values
        .iter()
        .take_while(|v| **v <= e0 + DEGENERACY_TOL)
        .count();
    let e1 = if degeneracy < values.len() {
        values[degeneracy]
    } else {
        e0
    };
    let mut full = vec![Complex64::default(); h.dim()];
    for (li, &fi) in live_map.iter().enumerate() {
        full[fi as usize] = levels[0].1[li];
    }
    let ground = StateVector::Complex(full);
    let residual_e0 = h.residual(&ground, e0)?;
    let residual_e1 = if degeneracy < levels.len() {
        let mut v = vec![Complex64::default(); h.dim()];
        for (li, &fi) in live_map.iter().enumerate() {
            v[fi as usize] = levels[degeneracy].1[li];
        }
        h.residual(&StateVector::Complex(v), e1)?
    } else {
        0.0
    };
    Ok(GroundStateResult {
        e0,
        e1,
        gap: e1 - e0,
        ground,
        residual_e0,
        residual_e1,
        degeneracy,
        iterations: 0,
        live_dim,
    })
}
