//! Dual certificate for a single stable real pole.
//!
//! For `G0 = 𝐡𝐡ᵀ` with `𝐡 = [1, h, …, h^{n-1}]`, the construction goes
//! through the rank-one projector `P = G0 / r²`, its complement `Q`, a
//! Hankel matrix `Δ` that annihilates `𝐡`, the split `Q = Q₁ + Q₂` with
//! `r²(Q₁ - Q₂) = Δ`, and finally `M₀ = -hⁿ(Q₁ - Q₂)`. Every identity the
//! construction relies on is checked numerically and reported as a residual;
//! what counts as "small enough" is decided by [`Thresholds`].

use alloc::vec::Vec;

use crate::hankel::{check_dim, nuclear_norm, spectral_norm, BasisMatrix, DeviationVector};
use crate::matrix::Matrix;
use crate::num::{powi, sqrt};
use crate::{Error, Result};

/// Pole, dimension and the quantities derived from them.
#[derive(Debug, Clone)]
pub struct CertificateContext {
    h: f64,
    n: usize,
    hvec: Vec<f64>,
    r2: f64,
    s: f64,
    p: Matrix,
    q: Matrix,
}

impl CertificateContext {
    pub fn new(h: f64, n: usize) -> Result<Self> {
        if !h.is_finite() {
            return Err(Error::NonFinite { what: "pole" });
        }
        if h.abs() >= 1.0 {
            return Err(Error::UnstablePole { h });
        }
        check_dim(n)?;

        let mut hvec = Vec::with_capacity(n);
        let mut power = 1.0;
        for _ in 0..n {
            hvec.push(power);
            power *= h;
        }
        let r2: f64 = hvec.iter().map(|x| x * x).sum();
        // h + h³ + … + h^{2n-3}
        let s: f64 = hvec[..n - 1].iter().map(|x| x * x * h).sum();

        let p = Matrix::outer(&hvec, &hvec).scale(1.0 / r2);
        let q = &Matrix::identity(n) - &p;
        Ok(CertificateContext {
            h,
            n,
            hvec,
            r2,
            s,
            p,
            q,
        })
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn hvec(&self) -> &[f64] {
        &self.hvec
    }

    /// `‖𝐡‖₂²`.
    pub fn r2(&self) -> f64 {
        self.r2
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn p(&self) -> &Matrix {
        &self.p
    }

    pub fn q(&self) -> &Matrix {
        &self.q
    }

    /// `G0 = 𝐡𝐡ᵀ`.
    pub fn g0(&self) -> Matrix {
        Matrix::outer(&self.hvec, &self.hvec)
    }

    /// `|h|ⁿ`, the spectral norm `M₀` must attain.
    pub fn m0_norm_target(&self) -> f64 {
        powi(self.h.abs(), self.n)
    }

    /// Frobenius residuals of `P² = P`, `Q² = Q`, `PQ = 0`, `P + Q = I`.
    pub fn projector_residuals(&self) -> [f64; 4] {
        let id = Matrix::identity(self.n);
        [
            (&(&self.p * &self.p) - &self.p).frobenius_norm(),
            (&(&self.q * &self.q) - &self.q).frobenius_norm(),
            (&self.p * &self.q).frobenius_norm(),
            (&(&self.p + &self.q) - &id).frobenius_norm(),
        ]
    }
}

pub fn build_context(h: f64, n: usize) -> Result<CertificateContext> {
    CertificateContext::new(h, n)
}

/// `Δ = r²(Q₁ - Q₂)`, a Hankel matrix whose anti-diagonal `k = i + j`
/// (0-based) holds `-h^{n+k}` for `k ≤ n - 2`, `s` for `k = n - 1` and
/// `-h^{k-n}` for `k ≥ n`.
pub fn build_delta(ctx: &CertificateContext) -> Matrix {
    let n = ctx.n;
    let profile: Vec<f64> = (0..2 * n - 1)
        .map(|k| {
            if k + 1 < n {
                -powi(ctx.h, n + k)
            } else if k + 1 == n {
                ctx.s
            } else {
                -powi(ctx.h, k - n)
            }
        })
        .collect();
    Matrix::from_fn(n, |i, j| profile[i + j])
}

/// Solves `Q₁ + Q₂ = Q`, `r²(Q₁ - Q₂) = Δ` for the pair.
pub fn split_projectors(ctx: &CertificateContext, delta: &Matrix) -> (Matrix, Matrix) {
    let d = delta.scale(1.0 / ctx.r2);
    let q1 = (&ctx.q + &d).scale(0.5);
    let q2 = (&ctx.q - &d).scale(0.5);
    (q1, q2)
}

/// `M₀ = -hⁿ Δ / r²`.
pub fn build_m0(ctx: &CertificateContext, delta: &Matrix) -> Matrix {
    delta.scale(-powi(ctx.h, ctx.n) / ctx.r2)
}

/// Residuals of the four projector identities, each a Frobenius norm divided
/// by `max(1, ‖Q‖_F²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactResiduals {
    /// `(Q₁+Q₂)² = (Q₁-Q₂)²`
    pub square_equality: f64,
    /// `(Q₁+Q₂)(Q₁-Q₂) = (Q₁-Q₂)(Q₁+Q₂)`
    pub commutation: f64,
    /// `Q₁Q₂ = Q₂Q₁ = 0`
    pub orthogonality: f64,
    /// `Q₁² = Q₁`, `Q₂² = Q₂`
    pub idempotence: f64,
}

impl FactResiduals {
    pub fn as_array(&self) -> [f64; 4] {
        [
            self.square_equality,
            self.commutation,
            self.orthogonality,
            self.idempotence,
        ]
    }

    pub fn max(&self) -> f64 {
        self.as_array().into_iter().fold(0.0, f64::max)
    }
}

pub fn verify_facts(ctx: &CertificateContext, q1: &Matrix, q2: &Matrix) -> FactResiduals {
    let norm = ctx.q.frobenius_norm_sq().max(1.0);
    let sum = q1 + q2;
    let diff = q1 - q2;

    let square_equality = (&(&sum * &sum) - &(&diff * &diff)).frobenius_norm();
    let commutation = (&(&sum * &diff) - &(&diff * &sum)).frobenius_norm();
    let orthogonality = (q1 * q2).frobenius_norm().max((q2 * q1).frobenius_norm());
    let idempotence = (&(q1 * q1) - q1)
        .frobenius_norm()
        .max((&(q2 * q2) - q2).frobenius_norm());

    FactResiduals {
        square_equality: square_equality / norm,
        commutation: commutation / norm,
        orthogonality: orthogonality / norm,
        idempotence: idempotence / norm,
    }
}

/// Per-basis-matrix values of `trace(Q G_i Q M₀ - G_i P)`, computed by dense
/// products, next to the reduced form `trace(G_i (M₀ - P))`.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceResiduals {
    pub direct: Vec<f64>,
    pub reduced: Vec<f64>,
}

impl TraceResiduals {
    /// `|trace(Q G_i Q M₀ - G_i P)|` for `i = 1..n-1`.
    pub fn residuals(&self) -> impl Iterator<Item = f64> + '_ {
        self.direct.iter().map(|v| v.abs())
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals().fold(0.0, f64::max)
    }

    /// Largest gap between the direct and reduced evaluations.
    pub fn max_disagreement(&self) -> f64 {
        self.direct
            .iter()
            .zip(&self.reduced)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

pub fn verify_trace_conditions(ctx: &CertificateContext, m0: &Matrix) -> TraceResiduals {
    let q = &ctx.q;
    let p = &ctx.p;
    let m0_minus_p = m0 - p;
    let basis = (1..ctx.n).map(|i| BasisMatrix::new(ctx.n, i).expect("index in range"));

    let mut direct = Vec::with_capacity(ctx.n - 1);
    let mut reduced = Vec::with_capacity(ctx.n - 1);
    for g in basis {
        let gi = g.to_matrix();
        let qgqm = &(&(q * &gi) * q) * m0;
        direct.push(qgqm.trace() - gi.trace_product(p));
        reduced.push(g.trace_against(&m0_minus_p));
    }
    TraceResiduals { direct, reduced }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lemma1Verdict {
    /// Strict inequality for a nonzero deviation.
    Holds,
    /// Nonzero deviation without strict inequality.
    Fails,
    /// Zero deviation; both sides are zero.
    Vacuous,
}

/// Both sides of `|trace(PH)| < ‖QHQ‖_*` for one deviation `H`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma1Check {
    pub lhs: f64,
    pub rhs: f64,
    pub verdict: Lemma1Verdict,
    pub qhq_frobenius: f64,
    pub h_frobenius: f64,
}

impl Lemma1Check {
    pub fn holds(&self) -> bool {
        self.verdict == Lemma1Verdict::Holds
    }

    pub fn margin(&self) -> f64 {
        self.rhs - self.lhs
    }
}

fn sandwich(q: &Matrix, h: &Matrix) -> Matrix {
    let mut qhq = &(q * h) * q;
    qhq.symmetrize();
    qhq
}

fn check_sizes(ctx: &CertificateContext, dev: &DeviationVector) -> Result<()> {
    if dev.n() != ctx.n {
        return Err(Error::Length {
            expected: ctx.n - 1,
            got: dev.values().len(),
        });
    }
    Ok(())
}

pub fn lemma1_condition(ctx: &CertificateContext, dev: &DeviationVector) -> Result<Lemma1Check> {
    check_sizes(ctx, dev)?;
    let h = dev.materialize();
    let qhq = sandwich(&ctx.q, &h);
    let lhs = ctx.p.trace_product(&h).abs();
    let rhs = nuclear_norm(&qhq)?;
    let verdict = if dev.is_zero() {
        Lemma1Verdict::Vacuous
    } else if lhs < rhs {
        Lemma1Verdict::Holds
    } else {
        Lemma1Verdict::Fails
    };
    Ok(Lemma1Check {
        lhs,
        rhs,
        verdict,
        qhq_frobenius: qhq.frobenius_norm(),
        h_frobenius: h.frobenius_norm(),
    })
}

/// `M₁ = M₀ + δ QHQ` with the quantities that certify it.
#[derive(Debug, Clone)]
pub struct M1Certificate {
    pub m1: Matrix,
    pub delta: f64,
    pub m1_spectral_norm: f64,
    /// `trace(QHQ M₁ - H P)` evaluated directly.
    pub trace_value: f64,
    /// `‖QHQ‖_F²`; the trace value must equal `delta` times this.
    pub qhq_frobenius_sq: f64,
}

impl M1Certificate {
    pub fn expected_trace(&self) -> f64 {
        self.delta * self.qhq_frobenius_sq
    }

    pub fn trace_relative_error(&self) -> f64 {
        let expected = self.expected_trace();
        (self.trace_value - expected).abs() / expected.abs()
    }
}

/// Perturbs `M₀` along `QHQ` by half of the spectral slack `1 - ‖M₀‖₂`,
/// i.e. `δ = (1 - ‖M₀‖₂) / (2 ‖QHQ‖₂)`.
pub fn build_m1(
    ctx: &CertificateContext,
    m0: &Matrix,
    dev: &DeviationVector,
) -> Result<M1Certificate> {
    check_sizes(ctx, dev)?;
    if dev.is_zero() {
        return Err(Error::DegenerateDeviation);
    }
    let h = dev.materialize();
    let qhq = sandwich(&ctx.q, &h);
    let qhq_spectral = spectral_norm(&qhq)?;
    if qhq_spectral == 0.0 {
        return Err(Error::DegenerateDeviation);
    }
    let slack = 1.0 - spectral_norm(m0)?;
    let delta = slack / (2.0 * qhq_spectral);

    let mut m1 = m0.clone();
    m1.add_scaled(delta, &qhq);
    let m1_spectral_norm = spectral_norm(&m1)?;
    let trace_value = qhq.trace_product(&m1) - h.trace_product(&ctx.p);

    Ok(M1Certificate {
        m1,
        delta,
        m1_spectral_norm,
        trace_value,
        qhq_frobenius_sq: qhq.frobenius_norm_sq(),
    })
}

/// Residuals of the whole construction at one `(h, n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CertificateResiduals {
    pub facts: FactResiduals,
    pub trace: TraceResiduals,
    /// `‖Q₁ + Q₂ - Q‖_F`.
    pub split_sum: f64,
    /// `‖r²(Q₁ - Q₂) - Δ‖_F`.
    pub split_difference: f64,
    /// `‖Δ𝐡‖₂ / (r² ‖𝐡‖₂)`.
    pub null_space: f64,
    pub m0_spectral_norm: f64,
    /// `|‖M₀‖₂ - |h|ⁿ|`.
    pub m0_spectral_error: f64,
    /// Largest `|M₀ - P|` over anti-diagonals `k ≥ n`.
    pub lower_antidiag_gap: f64,
}

#[derive(Debug, Clone)]
pub struct CertificateSet {
    pub context: CertificateContext,
    pub delta: Matrix,
    pub q1: Matrix,
    pub q2: Matrix,
    pub m0: Matrix,
    pub residuals: CertificateResiduals,
}

/// Builds every piece of the construction at `(h, n)` and measures it.
pub fn certify(h: f64, n: usize) -> Result<CertificateSet> {
    let context = build_context(h, n)?;
    let delta = build_delta(&context);
    let (q1, q2) = split_projectors(&context, &delta);
    let m0 = build_m0(&context, &delta);

    let facts = verify_facts(&context, &q1, &q2);
    let trace = verify_trace_conditions(&context, &m0);
    let split_sum = (&(&q1 + &q2) - context.q()).frobenius_norm();
    let split_difference = (&(&q1 - &q2).scale(context.r2) - &delta).frobenius_norm();

    let hnorm = sqrt(context.r2);
    let dh = delta.mul_vec(&context.hvec);
    let null_space = sqrt(dh.iter().map(|x| x * x).sum::<f64>()) / (context.r2 * hnorm);

    let m0_spectral_norm = spectral_norm(&m0)?;
    let m0_spectral_error = (m0_spectral_norm - context.m0_norm_target()).abs();

    let mut lower_antidiag_gap: f64 = 0.0;
    for k in n..2 * n - 1 {
        // anti-diagonal k touches (n-1, k-n+1)
        let (i, j) = (n - 1, k - n + 1);
        lower_antidiag_gap = lower_antidiag_gap.max((m0[(i, j)] - context.p[(i, j)]).abs());
    }

    Ok(CertificateSet {
        residuals: CertificateResiduals {
            facts,
            trace,
            split_sum,
            split_difference,
            null_space,
            m0_spectral_norm,
            m0_spectral_error,
            lower_antidiag_gap,
        },
        context,
        delta,
        q1,
        q2,
        m0,
    })
}

/// Pass/fail bounds for [`CertificateResiduals`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    /// Normalized identity residuals (facts, split, null space).
    pub identity: f64,
    /// `|‖M₀‖₂ - |h|ⁿ|`.
    pub spectral: f64,
    /// `|trace(Q G_i Q M₀ - G_i P)|`.
    pub trace: f64,
    /// Direct versus reduced trace evaluation.
    pub reduction: f64,
}

impl Thresholds {
    /// `1e-12` for small well-conditioned cases, `1e-10` once `n > 10` or
    /// `|h| ≥ 0.9`, `1e-8` beyond `n = 64`.
    pub fn for_case(h: f64, n: usize) -> Self {
        let identity = if n > 64 {
            1e-8
        } else if n > 10 || h.abs() >= 0.9 {
            1e-10
        } else {
            1e-12
        };
        Thresholds {
            identity,
            spectral: 1e-10,
            trace: identity.max(1e-10),
            reduction: 1e-12,
        }
    }
}

impl CertificateSet {
    /// Named residuals with the bound each must meet.
    pub fn checks(&self, t: &Thresholds) -> [(&'static str, f64, f64); 10] {
        let r = &self.residuals;
        let scale = self.context.r2.max(1.0);
        [
            ("fact1_square_equality", r.facts.square_equality, t.identity),
            ("fact2_commutation", r.facts.commutation, t.identity),
            ("fact3_orthogonality", r.facts.orthogonality, t.identity),
            ("fact4_idempotence", r.facts.idempotence, t.identity),
            ("split_sum", r.split_sum, t.identity),
            ("split_difference", r.split_difference / scale, t.identity),
            ("null_space", r.null_space, t.identity),
            ("m0_spectral_error", r.m0_spectral_error, t.spectral),
            ("trace_condition_max", r.trace.max_residual(), t.trace),
            (
                "trace_reduction_gap",
                r.trace.max_disagreement(),
                t.reduction,
            ),
        ]
    }

    /// Checks whose residual exceeds its bound.
    pub fn failures(&self, t: &Thresholds) -> Vec<(&'static str, f64, f64)> {
        self.checks(t)
            .into_iter()
            .filter(|(_, value, bound)| value.is_nan() || value > bound)
            .collect()
    }
}
