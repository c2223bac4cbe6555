//! Nuclear-norm completion of a Hankel matrix from its pinned
//! anti-diagonals.
//!
//! The problem `min ‖G‖_*` over Hankel `G` with anti-diagonals `0..n` fixed
//! is split as `min ‖Z‖_*` subject to `Z = A(x)`, where `x` is the full
//! anti-diagonal vector and `A` materializes it. Scaled-form ADMM then
//! alternates a singular value thresholding step on `Z`, an anti-diagonal
//! averaging step on the free part of `x`, and a dual update on `U`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::hankel::{
    antidiag_average, check_dim, materialize, nuclear_norm, numerical_rank, svt, HankelSpec,
};
use crate::matrix::Matrix;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub rho: f64,
    pub eps_abs: f64,
    pub eps_rel: f64,
    pub max_iter: usize,
    /// Largest `‖Ĝ - G0‖_F / ‖G0‖_F` still counted as exact recovery.
    pub recovery_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            rho: 1.0,
            eps_abs: 1e-10,
            eps_rel: 1e-10,
            max_iter: 100_000,
            recovery_tol: 1e-5,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("rho", self.rho),
            ("eps_abs", self.eps_abs),
            ("eps_rel", self.eps_rel),
            ("recovery_tol", self.recovery_tol),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be positive and finite, got {value}"),
                });
            }
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter {
                name: "max_iter",
                reason: "must be at least 1".into(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverResult {
    pub completed: HankelSpec,
    /// `‖Ĝ‖_*` of the materialized completion.
    pub nuclear_norm_hat: f64,
    pub iterations: usize,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub converged: bool,
}

impl SolverResult {
    /// `‖Ĝ - G0‖_F / ‖G0‖_F`.
    pub fn relative_error(&self, reference: &HankelSpec) -> f64 {
        let g0 = materialize(reference);
        let err = (&materialize(&self.completed) - &g0).frobenius_norm();
        let scale = g0.frobenius_norm();
        if scale == 0.0 {
            err
        } else {
            err / scale
        }
    }

    pub fn recovers(&self, reference: &HankelSpec, tol: f64) -> bool {
        self.relative_error(reference) <= tol
    }
}

fn check_pinned(pinned: &[f64]) -> Result<usize> {
    let n = pinned.len();
    check_dim(n)?;
    if pinned.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            what: "pinned values",
        });
    }
    Ok(n)
}

/// Solves the completion problem for the pinned anti-diagonals
/// `pinned[0..n]` of an `n x n` Hankel matrix.
///
/// The pinned entries of every iterate, and of the returned
/// [`HankelSpec`], are copies of the input values.
pub fn complete(pinned: &[f64], cfg: &SolverConfig) -> Result<SolverResult> {
    let n = check_pinned(pinned)?;
    cfg.validate()?;

    let mut x = vec![0.0; 2 * n - 1];
    x[..n].copy_from_slice(pinned);
    let mut ax = hankel_from(n, &x);
    let mut u = Matrix::zeros(n);
    let tau = 1.0 / cfg.rho;
    let abs_floor = cfg.eps_abs * n as f64;

    let mut primal = f64::INFINITY;
    let mut dual = f64::INFINITY;
    let mut iterations = 0;
    let mut converged = false;

    while iterations < cfg.max_iter {
        iterations += 1;

        let z = svt(&(&ax + &u), tau)?;

        let target = antidiag_average(&(&z - &u))?;
        x[n..].copy_from_slice(target.free());
        let ax_new = hankel_from(n, &x);

        let r = &ax_new - &z;
        u.add_scaled(1.0, &r);

        primal = r.frobenius_norm();
        dual = cfg.rho * (&ax_new - &ax).frobenius_norm();
        ax = ax_new;

        let eps_primal = abs_floor + cfg.eps_rel * ax.frobenius_norm().max(z.frobenius_norm());
        let eps_dual = abs_floor + cfg.eps_rel * cfg.rho * u.frobenius_norm();
        if primal <= eps_primal && dual <= eps_dual {
            converged = true;
            break;
        }
    }

    let completed = HankelSpec::new(n, x)?;
    let nuclear_norm_hat = nuclear_norm(&ax)?;
    Ok(SolverResult {
        completed,
        nuclear_norm_hat,
        iterations,
        primal_residual: primal,
        dual_residual: dual,
        converged,
    })
}

fn hankel_from(n: usize, antidiag: &[f64]) -> Matrix {
    Matrix::from_fn(n, |i, j| antidiag[i + j])
}

/// Axis-aligned scan range for the brute-force oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleGrid {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl OracleGrid {
    /// `[-2, 2]` with step `1e-4` for `n = 2` and `1e-2` for `n = 3`.
    pub fn default_for(n: usize) -> Self {
        OracleGrid {
            lo: -2.0,
            hi: 2.0,
            step: if n <= 2 { 1e-4 } else { 1e-2 },
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.step.is_finite() && self.step > 0.0) {
            return Err(Error::InvalidParameter {
                name: "step",
                reason: format!("must be positive and finite, got {}", self.step),
            });
        }
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo <= self.hi) {
            return Err(Error::InvalidParameter {
                name: "grid bounds",
                reason: format!("need finite lo <= hi, got [{}, {}]", self.lo, self.hi),
            });
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        ((self.hi - self.lo) / self.step + 1e-9) as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn value(&self, i: usize) -> f64 {
        self.lo + i as f64 * self.step
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|i| self.value(i))
    }
}

fn check_oracle_input(pinned: &[f64], grid: &OracleGrid) -> Result<usize> {
    let n = check_pinned(pinned)?;
    if n > 3 {
        return Err(Error::UnsupportedSize { n });
    }
    grid.validate()?;
    Ok(n)
}

/// Nuclear norm with the free anti-diagonals set to `free`.
fn objective(pinned: &[f64], free: &[f64]) -> Result<f64> {
    let n = pinned.len();
    let mut antidiag = Vec::with_capacity(2 * n - 1);
    antidiag.extend_from_slice(pinned);
    antidiag.extend_from_slice(free);
    nuclear_norm(&hankel_from(n, &antidiag))
}

/// Grid argmin of `f` over `grid^dims`, ties broken toward the first point.
fn scan(dims: usize, grid: &OracleGrid, f: impl FnMut(&[f64]) -> Result<f64>) -> Result<Vec<f64>> {
    Ok(scan_indices(dims, grid, f)?
        .into_iter()
        .map(|i| grid.value(i))
        .collect())
}

/// Like [`scan`], returning grid indices instead of values.
fn scan_indices(
    dims: usize,
    grid: &OracleGrid,
    mut f: impl FnMut(&[f64]) -> Result<f64>,
) -> Result<Vec<usize>> {
    let len = grid.len();
    let mut best = f64::INFINITY;
    let mut best_index = vec![0; dims];
    let mut index = vec![0; dims];
    let mut point = vec![0.0; dims];
    let total = len.pow(dims as u32);
    for flat in 0..total {
        let mut rest = flat;
        for (slot, idx) in point.iter_mut().zip(index.iter_mut()).rev() {
            *idx = rest % len;
            *slot = grid.value(*idx);
            rest /= len;
        }
        let value = f(&point)?;
        if value < best {
            best = value;
            best_index.copy_from_slice(&index);
        }
    }
    Ok(best_index)
}

/// Cap on re-centred refinement windows in [`oracle_complete`].
const MAX_REFINEMENTS: usize = 1000;

/// Brute-force minimizer of the nuclear norm over the free anti-diagonals,
/// for `n ≤ 3`.
///
/// A full scan of `grid` is followed by refinement: the box `±1` step
/// around the current argmin is scanned at `1/100` of the step, and the box
/// is re-centred on its argmin until that argmin is interior to the box.
pub fn oracle_complete(pinned: &[f64], grid: &OracleGrid) -> Result<HankelSpec> {
    let n = check_oracle_input(pinned, grid)?;
    let dims = n - 1;

    let mut center = scan(dims, grid, |free| objective(pinned, free))?;
    let window = OracleGrid {
        lo: -grid.step,
        hi: grid.step,
        step: grid.step / 100.0,
    };
    let last = window.len() - 1;
    for _ in 0..MAX_REFINEMENTS {
        let offset = scan_indices(dims, &window, |delta| {
            let shifted: Vec<f64> = center.iter().zip(delta).map(|(c, d)| c + d).collect();
            objective(pinned, &shifted)
        })?;
        for (c, &i) in center.iter_mut().zip(&offset) {
            *c += window.value(i);
        }
        if offset.iter().all(|&i| i != 0 && i != last) {
            break;
        }
    }

    let mut antidiag = pinned.to_vec();
    antidiag.extend_from_slice(&center);
    HankelSpec::new(n, antidiag)
}

/// Nuclear norm along a one-dimensional scan (`n = 2` only), for unimodality
/// checks on the oracle.
pub fn oracle_profile(pinned: &[f64], grid: &OracleGrid) -> Result<Vec<(f64, f64)>> {
    let n = check_oracle_input(pinned, grid)?;
    if n != 2 {
        return Err(Error::UnsupportedSize { n });
    }
    grid.values()
        .map(|v| objective(pinned, &[v]).map(|f| (v, f)))
        .collect()
}

pub const RANK_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct RankPoint {
    pub free: Vec<f64>,
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankLandscape {
    pub points: Vec<RankPoint>,
    pub min_rank: usize,
}

impl RankLandscape {
    pub fn minimizers(&self) -> impl Iterator<Item = &RankPoint> + '_ {
        self.points.iter().filter(move |p| p.rank == self.min_rank)
    }
}

/// Numerical rank (singular values above `1e-8 σ_max`) at every grid point
/// of the free anti-diagonals, `n ≤ 3`.
pub fn rank_landscape(pinned: &[f64], grid: &OracleGrid) -> Result<RankLandscape> {
    let n = check_oracle_input(pinned, grid)?;
    let dims = n - 1;
    let len = grid.len();
    let total = len.pow(dims as u32);
    let mut points = Vec::with_capacity(total);
    let mut min_rank = usize::MAX;
    for flat in 0..total {
        let mut free = vec![0.0; dims];
        let mut rest = flat;
        for slot in free.iter_mut().rev() {
            *slot = grid.value(rest % len);
            rest /= len;
        }
        let mut antidiag = pinned.to_vec();
        antidiag.extend_from_slice(&free);
        let rank = numerical_rank(&hankel_from(n, &antidiag), RANK_TOL)?;
        min_rank = min_rank.min(rank);
        points.push(RankPoint { free, rank });
    }
    Ok(RankLandscape { points, min_rank })
}
