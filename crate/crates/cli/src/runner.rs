//! Parallel sweep execution.
//!
//! Cells are computed on a dedicated rayon pool and collected back in job
//! order, so the records (and any file written from them) are identical for
//! every worker count.

use hankel_nuclear_core::experiments::{
    assemble_two_pole, single_pole_cell, two_pole_cell, two_pole_jobs, GridSpec, SweepRecord,
};
use hankel_nuclear_core::solver::SolverConfig;
use hankel_nuclear_core::{Error, Result};
use rayon::prelude::*;

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    if workers == 0 {
        return Err(Error::InvalidParameter {
            name: "workers",
            reason: "must be at least 1".into(),
        });
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidParameter {
            name: "workers",
            reason: e.to_string(),
        })
}

pub fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Full `(h1, h2)` grid, `h1`-major ascending. Only the upper triangle is
/// solved; the lower triangle is its mirror image.
pub fn two_pole_sweep(
    n: usize,
    grid: &GridSpec,
    cfg: &SolverConfig,
    workers: usize,
) -> Result<Vec<SweepRecord>> {
    grid.validate()?;
    cfg.validate()?;
    let values = grid.values();
    let jobs = two_pole_jobs(values.len());
    let upper = pool(workers)?.install(|| {
        jobs.par_iter()
            .map(|&(i, j)| two_pole_cell(n, values[i], values[j], cfg))
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(assemble_two_pole(values.len(), &upper))
}

pub fn single_pole_sweep(
    n: usize,
    h_values: &[f64],
    cfg: &SolverConfig,
    workers: usize,
) -> Result<Vec<SweepRecord>> {
    cfg.validate()?;
    pool(workers)?.install(|| {
        h_values
            .par_iter()
            .map(|&h| single_pole_cell(n, h, cfg))
            .collect()
    })
}
