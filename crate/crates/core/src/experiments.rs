//! Recovery experiments over grids of real poles.
//!
//! A cell `(h1, h2)` pins the first `n` samples of the impulse response
//! `h1^k + h2^k`, completes the Hankel matrix, and compares the result with
//! the true `G0`. Single-pole cells use `h^k` alone.
//!
//! The sweep functions here run sequentially; the companion crate fans the
//! same [`two_pole_jobs`] out over worker threads and hands the results back
//! to [`assemble_two_pole`], so the output never depends on scheduling.

use alloc::format;
use alloc::vec::Vec;

use crate::hankel::{check_dim, materialize, nuclear_norm, HankelSpec};
use crate::num::powi;
use crate::solver::{complete, SolverConfig};
use crate::{Error, Result};

/// One grid cell of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRecord {
    pub h1: f64,
    pub h2: f64,
    pub nuc_g0: f64,
    pub nuc_ghat: f64,
    /// `nuc_g0 - nuc_ghat`.
    pub diff: f64,
    pub recovered: bool,
    pub iterations: usize,
}

impl SweepRecord {
    /// The same cell with the poles exchanged.
    pub fn mirrored(&self) -> Self {
        SweepRecord {
            h1: self.h2,
            h2: self.h1,
            ..*self
        }
    }
}

/// Pole grid `min, min + step, …` up to and including `max` when it is hit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl GridSpec {
    /// `-0.94 : 0.05 : 0.94`, 38 values ending at `0.91`.
    pub const STANDARD: GridSpec = GridSpec {
        min: -0.94,
        max: 0.94,
        step: 0.05,
    };

    pub fn validate(&self) -> Result<()> {
        if !(self.step.is_finite() && self.step > 0.0) {
            return Err(Error::InvalidParameter {
                name: "step",
                reason: format!("must be positive, got {}", self.step),
            });
        }
        if !(self.min.is_finite() && self.max.is_finite() && self.min <= self.max) {
            return Err(Error::InvalidParameter {
                name: "grid bounds",
                reason: format!("need min <= max, got [{}, {}]", self.min, self.max),
            });
        }
        for h in [self.min, self.max] {
            if h.abs() >= 1.0 {
                return Err(Error::UnstablePole { h });
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        ((self.max - self.min) / self.step + 1e-9) as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Values computed as `min + i * step` so that no rounding accumulates.
    pub fn values(&self) -> Vec<f64> {
        (0..self.len())
            .map(|i| self.min + i as f64 * self.step)
            .collect()
    }
}

/// `[h^0, h^1, …, h^{len-1}]`.
pub fn single_pole_response(h: f64, len: usize) -> Vec<f64> {
    (0..len).map(|k| powi(h, k)).collect()
}

/// `[h1^k + h2^k]` for `k < len`.
pub fn two_pole_response(h1: f64, h2: f64, len: usize) -> Vec<f64> {
    (0..len).map(|k| powi(h1, k) + powi(h2, k)).collect()
}

fn check_pole(h: f64) -> Result<()> {
    if !h.is_finite() {
        return Err(Error::NonFinite { what: "pole" });
    }
    if h.abs() >= 1.0 {
        return Err(Error::UnstablePole { h });
    }
    Ok(())
}

/// Completes the Hankel matrix whose full anti-diagonal profile is
/// `truth` from its first `n` entries, and scores the result.
fn score(n: usize, h1: f64, h2: f64, truth: Vec<f64>, cfg: &SolverConfig) -> Result<SweepRecord> {
    let g0 = HankelSpec::new(n, truth)?;
    let result = complete(g0.pinned(), cfg)?;
    let nuc_g0 = nuclear_norm(&materialize(&g0))?;
    let nuc_ghat = result.nuclear_norm_hat;
    Ok(SweepRecord {
        h1,
        h2,
        nuc_g0,
        nuc_ghat,
        diff: nuc_g0 - nuc_ghat,
        recovered: result.recovers(&g0, cfg.recovery_tol),
        iterations: result.iterations,
    })
}

/// Single-pole cell; the record has `h2 = h1`.
pub fn single_pole_cell(n: usize, h: f64, cfg: &SolverConfig) -> Result<SweepRecord> {
    let run = || {
        check_dim(n)?;
        check_pole(h)?;
        score(n, h, h, single_pole_response(h, 2 * n - 1), cfg)
    };
    run().map_err(|e| e.at_cell(h, h))
}

/// Two-pole cell with impulse response `h1^k + h2^k`.
pub fn two_pole_cell(n: usize, h1: f64, h2: f64, cfg: &SolverConfig) -> Result<SweepRecord> {
    let run = || {
        check_dim(n)?;
        check_pole(h1)?;
        check_pole(h2)?;
        score(n, h1, h2, two_pole_response(h1, h2, 2 * n - 1), cfg)
    };
    run().map_err(|e| e.at_cell(h1, h2))
}

pub fn single_pole_sweep(
    n: usize,
    h_values: &[f64],
    cfg: &SolverConfig,
) -> Result<Vec<SweepRecord>> {
    h_values
        .iter()
        .map(|&h| single_pole_cell(n, h, cfg))
        .collect()
}

/// Grid index pairs `(i, j)` with `i ≤ j`, row-major; the lower triangle
/// follows by exchanging the poles.
pub fn two_pole_jobs(grid_len: usize) -> Vec<(usize, usize)> {
    let mut jobs = Vec::with_capacity(grid_len * (grid_len + 1) / 2);
    for i in 0..grid_len {
        for j in i..grid_len {
            jobs.push((i, j));
        }
    }
    jobs
}

/// Expands upper-triangle results (in [`two_pole_jobs`] order) into the full
/// grid, `h1`-major with ascending `h1` then `h2`.
pub fn assemble_two_pole(grid_len: usize, upper: &[SweepRecord]) -> Vec<SweepRecord> {
    assert_eq!(upper.len(), grid_len * (grid_len + 1) / 2);
    let jobs = two_pole_jobs(grid_len);
    let mut slots: Vec<Option<SweepRecord>> = alloc::vec![None; grid_len * grid_len];
    for (&(i, j), record) in jobs.iter().zip(upper) {
        slots[i * grid_len + j] = Some(*record);
        slots[j * grid_len + i] = Some(record.mirrored());
    }
    slots
        .into_iter()
        .map(|r| r.expect("every cell covered by the upper triangle"))
        .collect()
}

pub fn two_pole_sweep(n: usize, grid: &GridSpec, cfg: &SolverConfig) -> Result<Vec<SweepRecord>> {
    grid.validate()?;
    check_dim(n)?;
    cfg.validate()?;
    let values = grid.values();
    let upper = two_pole_jobs(values.len())
        .into_iter()
        .map(|(i, j)| two_pole_cell(n, values[i], values[j], cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble_two_pole(values.len(), &upper))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSummary {
    pub cells: usize,
    pub recovered: usize,
    pub max_diff: f64,
    pub min_diff: f64,
}

impl SweepSummary {
    pub fn of(records: &[SweepRecord]) -> Self {
        SweepSummary {
            cells: records.len(),
            recovered: records.iter().filter(|r| r.recovered).count(),
            max_diff: records
                .iter()
                .map(|r| r.diff)
                .fold(f64::NEG_INFINITY, f64::max),
            min_diff: records.iter().map(|r| r.diff).fold(f64::INFINITY, f64::min),
        }
    }

    pub fn recovered_fraction(&self) -> f64 {
        if self.cells == 0 {
            0.0
        } else {
            self.recovered as f64 / self.cells as f64
        }
    }
}

/// `diff` values on a rectangular `(h1, h2)` grid: row `r` is `h1 = rows[r]`,
/// column `c` is `h2 = cols[c]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffGrid {
    pub rows: Vec<f64>,
    pub cols: Vec<f64>,
    pub cells: Vec<f64>,
}

impl DiffGrid {
    /// Arranges records into a grid. Row and column labels are the distinct
    /// `h1` and `h2` values in ascending order; every combination must be
    /// present exactly once.
    pub fn from_records(records: &[SweepRecord]) -> Result<Self> {
        let rows = distinct_sorted(records.iter().map(|r| r.h1));
        let cols = distinct_sorted(records.iter().map(|r| r.h2));
        let mut cells: Vec<Option<f64>> = alloc::vec![None; rows.len() * cols.len()];
        for r in records {
            let i = rows.iter().position(|&v| v == r.h1).expect("label present");
            let j = cols.iter().position(|&v| v == r.h2).expect("label present");
            cells[i * cols.len() + j] = Some(r.diff);
        }
        let missing: Vec<usize> = cells
            .iter()
            .enumerate()
            .filter_map(|(k, c)| c.is_none().then_some(k))
            .collect();
        if let Some(&first) = missing.first() {
            return Err(Error::IncompleteGrid {
                missing: missing.len(),
                first_h1: rows[first / cols.len()],
                first_h2: cols[first % cols.len()],
            });
        }
        Ok(DiffGrid {
            cells: cells.into_iter().map(|c| c.unwrap_or_default()).collect(),
            rows,
            cols,
        })
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.cells[row * self.cols.len() + col]
    }

    /// Largest `|diff(h1, h2) - diff(h2, h1)|`; requires a square grid.
    pub fn transpose_asymmetry(&self) -> f64 {
        assert_eq!(self.rows.len(), self.cols.len());
        let n = self.rows.len();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }
}

fn distinct_sorted(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = values.collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}
