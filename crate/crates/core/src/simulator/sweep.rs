use rayon::prelude::*;
use serde::Serialize;

use super::engine::{run, SimError};
use super::scenario::Scenario;
use crate::offload::{Scheme, BITS_PER_GB};

/// Delays closer than this are ties when picking the best scheme.
pub const TIE_TOLERANCE_S: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub n_bits: f64,
    pub c_gflo: f64,
    pub scheme: Scheme,
    pub mean_delay_s: f64,
    /// Best scheme of the (n_bits, c_gflo) cell.
    pub argmin_scheme: Scheme,
}

/// Picks the scheme with the smallest delay. Near-ties go to the simpler
/// scheme: ground, then one-hop, then adaptive.
pub fn argmin_scheme(cells: &[(Scheme, f64)]) -> Option<Scheme> {
    let best = cells.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
    [Scheme::Ground, Scheme::OneHop, Scheme::Adaptive]
        .into_iter()
        .find(|s| cells.iter().any(|&(cs, d)| cs == *s && d <= best + TIE_TOLERANCE_S))
}

fn pool(jobs: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new().num_threads(jobs).build().expect("thread pool")
}

/// Runs an independent simulation for every (data size, compute, scheme)
/// combination. Rows are ordered by data size, then compute, then scheme
/// as given. `jobs = 0` uses all cores.
pub fn sweep(base: &Scenario, n_gb: &[f64], c_gflo: &[f64], schemes: &[Scheme], jobs: usize) -> Result<Vec<SweepRow>, SimError> {
    let cells: Vec<(f64, f64, Scheme)> = n_gb
        .iter()
        .flat_map(|&n| c_gflo.iter().flat_map(move |&c| schemes.iter().map(move |&s| (n, c, s))))
        .collect();
    let delays: Vec<f64> = pool(jobs).install(|| {
        cells
            .par_iter()
            .map(|&(n, c, s)| run(&base.with_task_shape(n, c).with_scheme(s)).map(|r| r.mean_delay_s))
            .collect::<Result<_, _>>()
    })?;
    let mut rows = Vec::with_capacity(cells.len());
    for (chunk_cells, chunk_delays) in cells.chunks(schemes.len().max(1)).zip(delays.chunks(schemes.len().max(1))) {
        let pairs: Vec<(Scheme, f64)> = chunk_cells.iter().map(|c| c.2).zip(chunk_delays.iter().copied()).collect();
        let best = argmin_scheme(&pairs).expect("non-empty cell");
        for (&(n, c, s), &d) in chunk_cells.iter().zip(chunk_delays) {
            rows.push(SweepRow { n_bits: n * BITS_PER_GB, c_gflo: c, scheme: s, mean_delay_s: d, argmin_scheme: best });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlatformRow {
    pub capability_gflops: f64,
    pub adaptive_delay_s: f64,
    pub ground_delay_s: f64,
    pub onehop_delay_s: f64,
    pub impr_vs_ground_pct: f64,
    pub impr_vs_onehop_pct: f64,
}

/// Relative improvement in percent; +100 means half the delay.
pub fn improvement_pct(baseline: f64, adaptive: f64) -> f64 {
    (baseline / adaptive - 1.0) * 100.0
}

/// Improvement of the adaptive scheme over both baselines for each
/// satellite compute capability, at the scenario's table task shape.
pub fn platform_table(base: &Scenario, capabilities: &[f64], jobs: usize) -> Result<Vec<PlatformRow>, SimError> {
    let shaped = base.with_task_shape(base.grid.table_data_in_gb, base.grid.table_compute_gflo);
    let cells: Vec<(f64, Scheme)> = capabilities
        .iter()
        .flat_map(|&c| [Scheme::Adaptive, Scheme::Ground, Scheme::OneHop].map(|s| (c, s)))
        .collect();
    let delays: Vec<f64> = pool(jobs).install(|| {
        cells
            .par_iter()
            .map(|&(cap, s)| {
                let mut sc = shaped.with_scheme(s);
                sc.compute.satellite_gflops = cap;
                run(&sc).map(|r| r.mean_delay_s)
            })
            .collect::<Result<_, _>>()
    })?;
    Ok(capabilities
        .iter()
        .zip(delays.chunks(3))
        .map(|(&cap, d)| PlatformRow {
            capability_gflops: cap,
            adaptive_delay_s: d[0],
            ground_delay_s: d[1],
            onehop_delay_s: d[2],
            impr_vs_ground_pct: improvement_pct(d[1], d[0]),
            impr_vs_onehop_pct: improvement_pct(d[2], d[0]),
        })
        .collect())
}
