//! Cyclic Jacobi eigendecomposition for dense symmetric matrices.
//!
//! Jacobi rotations are slower than tridiagonal QL for large matrices but
//! give eigenvalues with small relative error and orthogonal eigenvectors to
//! working precision, which is what the certificate residual checks need.

use alloc::vec::Vec;

use crate::matrix::Matrix;
use crate::num::{hypot, sqrt};
use crate::{Error, Result};

const MAX_SWEEPS: usize = 64;

/// Input asymmetry tolerated before the solver refuses the matrix, relative
/// to its largest entry. Products like `QHQ` are symmetric only up to
/// rounding.
const SYMMETRY_TOL: f64 = 1e-8;

/// `A = V diag(values) Vᵀ`, eigenvalues ascending, eigenvector `k` in column `k`.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

impl SymmetricEigen {
    /// `V diag(f(λ)) Vᵀ`.
    pub fn reconstruct_with(&self, mut f: impl FnMut(f64) -> f64) -> Matrix {
        let n = self.values.len();
        let mut out = Matrix::zeros(n);
        for (k, &lambda) in self.values.iter().enumerate() {
            let w = f(lambda);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vik = w * self.vectors[(i, k)];
                if vik == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += vik * self.vectors[(j, k)];
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> Matrix {
        self.reconstruct_with(|l| l)
    }
}

pub fn symmetric_eigen(a: &Matrix) -> Result<SymmetricEigen> {
    let n = a.dim();
    if !a.is_finite() {
        return Err(Error::NonFinite { what: "matrix" });
    }
    let asym = a.asymmetry();
    if asym > SYMMETRY_TOL * a.max_abs().max(1.0) {
        return Err(Error::NotSymmetric { asymmetry: asym });
    }

    let mut m = a.clone();
    m.symmetrize();
    let mut v = Matrix::identity(n);

    let scale = m.frobenius_norm();
    if scale == 0.0 {
        return Ok(SymmetricEigen {
            values: alloc::vec![0.0; n],
            vectors: v,
        });
    }

    let mut converged = false;
    for sweep in 0..MAX_SWEEPS {
        let off = off_diagonal_norm(&m);
        if off == 0.0 || off <= 0.1 * f64::EPSILON * scale {
            converged = true;
            break;
        }
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = m[(p, p)];
                let aqq = m[(q, q)];
                let g = 100.0 * apq.abs();
                if sweep > 3 && app.abs() + g == app.abs() && aqq.abs() + g == aqq.abs() {
                    m[(p, q)] = 0.0;
                    m[(q, p)] = 0.0;
                    continue;
                }
                rotate(&mut m, &mut v, p, q);
            }
        }
    }
    if !converged {
        return Err(Error::NonConvergence { rows: n, cols: n });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].total_cmp(&m[(j, j)]));
    let values = order.iter().map(|&k| m[(k, k)]).collect();
    let vectors = Matrix::from_fn(n, |i, k| v[(i, order[k])]);
    Ok(SymmetricEigen { values, vectors })
}

/// Eigenvalues only; same algorithm, eigenvectors discarded.
pub fn symmetric_eigenvalues(a: &Matrix) -> Result<Vec<f64>> {
    symmetric_eigen(a).map(|e| e.values)
}

fn off_diagonal_norm(m: &Matrix) -> f64 {
    let n = m.dim();
    let mut acc = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            acc += m[(i, j)] * m[(i, j)];
        }
    }
    sqrt(2.0 * acc)
}

/// One Jacobi rotation annihilating `m[p][q]`.
fn rotate(m: &mut Matrix, v: &mut Matrix, p: usize, q: usize) {
    let n = m.dim();
    let apq = m[(p, q)];
    let diff = m[(q, q)] - m[(p, p)];
    let t = if diff.abs() + 100.0 * apq.abs() == diff.abs() {
        apq / diff
    } else {
        let theta = 0.5 * diff / apq;
        let t = 1.0 / (theta.abs() + hypot(1.0, theta));
        if theta < 0.0 {
            -t
        } else {
            t
        }
    };
    let c = 1.0 / hypot(1.0, t);
    let s = t * c;
    let tau = s / (1.0 + c);

    m[(p, p)] -= t * apq;
    m[(q, q)] += t * apq;
    m[(p, q)] = 0.0;
    m[(q, p)] = 0.0;
    for r in 0..n {
        if r == p || r == q {
            continue;
        }
        let arp = m[(r, p)];
        let arq = m[(r, q)];
        let new_rp = arp - s * (arq + tau * arp);
        let new_rq = arq + s * (arp - tau * arq);
        m[(r, p)] = new_rp;
        m[(p, r)] = new_rp;
        m[(r, q)] = new_rq;
        m[(q, r)] = new_rq;
    }
    for r in 0..n {
        let vrp = v[(r, p)];
        let vrq = v[(r, q)];
        v[(r, p)] = vrp - s * (vrq + tau * vrp);
        v[(r, q)] = vrq + s * (vrp - tau * vrq);
    }
}
