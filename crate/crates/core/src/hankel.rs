//! Hankel parametrization and the spectral functions built on it.
//!
//! An `n x n` Hankel matrix is stored as its `2n - 1` anti-diagonal values,
//! indexed by `k = i + j` (0-based row and column). The observation pattern
//! pins anti-diagonals `0..n` and leaves `n..2n-1` free.

use alloc::vec;
use alloc::vec::Vec;

use crate::eigen::{symmetric_eigen, symmetric_eigenvalues};
use crate::matrix::Matrix;
use crate::{Error, Result};

pub const MIN_DIM: usize = 2;
pub const MAX_DIM: usize = 256;

pub(crate) fn check_dim(n: usize) -> Result<()> {
    if (MIN_DIM..=MAX_DIM).contains(&n) {
        Ok(())
    } else {
        Err(Error::Dimension {
            n,
            min: MIN_DIM,
            max: MAX_DIM,
        })
    }
}

/// A Hankel matrix given by its anti-diagonal profile.
#[derive(Debug, Clone, PartialEq)]
pub struct HankelSpec {
    n: usize,
    antidiag: Vec<f64>,
}

impl HankelSpec {
    pub fn new(n: usize, antidiag: Vec<f64>) -> Result<Self> {
        check_dim(n)?;
        if antidiag.len() != 2 * n - 1 {
            return Err(Error::Length {
                expected: 2 * n - 1,
                got: antidiag.len(),
            });
        }
        Ok(HankelSpec { n, antidiag })
    }

    /// Anti-diagonal `k` set to `f(k)`.
    pub fn from_fn(n: usize, f: impl FnMut(usize) -> f64) -> Result<Self> {
        check_dim(n)?;
        Ok(HankelSpec {
            n,
            antidiag: (0..2 * n - 1).map(f).collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn antidiag(&self) -> &[f64] {
        &self.antidiag
    }

    /// Number of pinned anti-diagonals; always `n`.
    pub fn known_count(&self) -> usize {
        self.n
    }

    /// Anti-diagonals `0..n`, fixed by the observations.
    pub fn pinned(&self) -> &[f64] {
        &self.antidiag[..self.n]
    }

    /// Anti-diagonals `n..2n-1`, the completion unknowns.
    pub fn free(&self) -> &[f64] {
        &self.antidiag[self.n..]
    }

    pub fn materialize(&self) -> Matrix {
        materialize(self)
    }
}

/// Dense symmetric matrix with `M[i][j] = antidiag[i + j]`.
pub fn materialize(spec: &HankelSpec) -> Matrix {
    Matrix::from_fn(spec.n, |i, j| spec.antidiag[i + j])
}

/// Orthogonal (Frobenius) projection onto the Hankel subspace: each
/// anti-diagonal value becomes the mean of `M` over that anti-diagonal.
pub fn antidiag_average(m: &Matrix) -> Result<HankelSpec> {
    let n = m.dim();
    check_dim(n)?;
    // incremental mean: exact when an anti-diagonal is already constant
    let mut means = vec![0.0; 2 * n - 1];
    let mut seen = vec![0usize; 2 * n - 1];
    for i in 0..n {
        for (j, v) in m.row(i).iter().enumerate() {
            let k = i + j;
            seen[k] += 1;
            means[k] += (v - means[k]) / seen[k] as f64;
        }
    }
    Ok(HankelSpec { n, antidiag: means })
}

/// Number of entries on anti-diagonal `k` of an `n x n` matrix.
pub fn antidiag_len(n: usize, k: usize) -> usize {
    if k < n {
        k + 1
    } else {
        2 * n - 1 - k
    }
}

/// Free anti-diagonal deviations `v_1..v_{n-1}`; the induced matrix is
/// `H = Σ v_i G_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviationVector {
    v: Vec<f64>,
}

impl DeviationVector {
    pub fn new(v: Vec<f64>) -> Result<Self> {
        check_dim(v.len() + 1)?;
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite { what: "deviation" });
        }
        Ok(DeviationVector { v })
    }

    pub fn zero(n: usize) -> Result<Self> {
        Self::new(vec![0.0; n.saturating_sub(1)])
    }

    pub fn values(&self) -> &[f64] {
        &self.v
    }

    pub fn n(&self) -> usize {
        self.v.len() + 1
    }

    pub fn is_zero(&self) -> bool {
        self.v.iter().all(|&x| x == 0.0)
    }

    pub fn to_spec(&self) -> HankelSpec {
        let n = self.n();
        let mut antidiag = vec![0.0; 2 * n - 1];
        antidiag[n..].copy_from_slice(&self.v);
        HankelSpec { n, antidiag }
    }

    pub fn materialize(&self) -> Matrix {
        materialize(&self.to_spec())
    }
}

/// `G_i`: ones on anti-diagonal `k = n - 1 + i`, zeros elsewhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasisMatrix {
    n: usize,
    i: usize,
}

impl BasisMatrix {
    pub fn new(n: usize, i: usize) -> Result<Self> {
        check_dim(n)?;
        if i == 0 || i >= n {
            return Err(Error::InvalidParameter {
                name: "basis index",
                reason: alloc::format!("must lie in [1, {}], got {i}", n - 1),
            });
        }
        Ok(BasisMatrix { n, i })
    }

    /// `G_1, …, G_{n-1}`.
    pub fn all(n: usize) -> Result<Vec<Self>> {
        check_dim(n)?;
        Ok((1..n).map(|i| BasisMatrix { n, i }).collect())
    }

    pub fn index(&self) -> usize {
        self.i
    }

    pub fn antidiag_index(&self) -> usize {
        self.n - 1 + self.i
    }

    pub fn to_matrix(&self) -> Matrix {
        let k = self.antidiag_index();
        Matrix::from_fn(self.n, |r, c| if r + c == k { 1.0 } else { 0.0 })
    }

    /// `trace(G_i X)`, the sum of `X` over the basis anti-diagonal.
    pub fn trace_against(&self, x: &Matrix) -> f64 {
        let k = self.antidiag_index();
        (k + 1 - self.n..self.n).map(|r| x[(r, k - r)]).sum()
    }
}

/// Sum of singular values; for symmetric input, the sum of `|λ|`.
pub fn nuclear_norm(m: &Matrix) -> Result<f64> {
    Ok(symmetric_eigenvalues(m)?.iter().map(|l| l.abs()).sum())
}

/// Largest singular value; for symmetric input, `max |λ|`.
pub fn spectral_norm(m: &Matrix) -> Result<f64> {
    Ok(symmetric_eigenvalues(m)?
        .iter()
        .fold(0.0, |acc: f64, l| acc.max(l.abs())))
}

/// Proximal operator of `tau * ‖·‖_*` on symmetric matrices: eigenvalues
/// shrink toward zero by `tau`, eigenvectors are kept.
pub fn svt(m: &Matrix, tau: f64) -> Result<Matrix> {
    if !(tau.is_finite() && tau > 0.0) {
        return Err(Error::InvalidParameter {
            name: "tau",
            reason: alloc::format!("must be positive and finite, got {tau}"),
        });
    }
    let eig = symmetric_eigen(m)?;
    let mut out = eig.reconstruct_with(|l| soft_threshold(l, tau));
    out.symmetrize();
    Ok(out)
}

fn soft_threshold(x: f64, tau: f64) -> f64 {
    if x > tau {
        x - tau
    } else if x < -tau {
        x + tau
    } else {
        0.0
    }
}

/// `V sign(Λ) Vᵀ`: a contraction `D` with `trace(D M) = ‖M‖_*`.
pub fn dual_element(m: &Matrix) -> Result<Matrix> {
    let eig = symmetric_eigen(m)?;
    Ok(eig.reconstruct_with(|l| {
        if l > 0.0 {
            1.0
        } else if l < 0.0 {
            -1.0
        } else {
            0.0
        }
    }))
}

/// Count of `|λ| > rel_tol * max |λ|`.
pub fn numerical_rank(m: &Matrix, rel_tol: f64) -> Result<usize> {
    let values = symmetric_eigenvalues(m)?;
    let top = values.iter().fold(0.0, |acc: f64, l| acc.max(l.abs()));
    if top == 0.0 {
        return Ok(0);
    }
    Ok(values.iter().filter(|l| l.abs() > rel_tol * top).count())
}
