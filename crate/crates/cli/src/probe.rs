//! Seeded random probing of the certificate with unit-norm deviations.

use hankel_nuclear_core::certificate::{build_m1, lemma1_condition, CertificateSet};
use hankel_nuclear_core::hankel::DeviationVector;
use hankel_nuclear_core::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Uniform entries in `[-1, 1)`, rescaled to unit Euclidean norm.
pub fn random_unit_deviation(rng: &mut impl Rng, n: usize) -> Result<DeviationVector> {
    loop {
        let v: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            return DeviationVector::new(v.into_iter().map(|x| x / norm).collect());
        }
    }
}

/// Worst cases over a batch of deviations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeSummary {
    pub trials: usize,
    /// Draws where `|trace(PH)| < ‖QHQ‖_*` did not hold strictly.
    pub lemma_failures: usize,
    pub min_lemma_margin: f64,
    /// Draws with `‖QHQ‖_F <= 1e-10 ‖H‖_F`.
    pub null_space_hits: usize,
    pub max_m1_spectral_norm: f64,
    pub max_m1_trace_error: f64,
}

impl ProbeSummary {
    pub fn all_hold(&self) -> bool {
        self.lemma_failures == 0 && self.null_space_hits == 0 && self.max_m1_spectral_norm <= 1.0
    }
}

pub fn probe(set: &CertificateSet, trials: usize, seed: u64) -> Result<ProbeSummary> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = ProbeSummary {
        trials,
        lemma_failures: 0,
        min_lemma_margin: f64::INFINITY,
        null_space_hits: 0,
        max_m1_spectral_norm: 0.0,
        max_m1_trace_error: 0.0,
    };
    let n = set.context.n();
    for _ in 0..trials {
        let dev = random_unit_deviation(&mut rng, n)?;
        let c = lemma1_condition(&set.context, &dev)?;
        if !c.holds() {
            s.lemma_failures += 1;
        }
        s.min_lemma_margin = s.min_lemma_margin.min(c.margin());
        if c.qhq_frobenius <= 1e-10 * c.h_frobenius {
            s.null_space_hits += 1;
        }
        let m1 = build_m1(&set.context, &set.m0, &dev)?;
        s.max_m1_spectral_norm = s.max_m1_spectral_norm.max(m1.m1_spectral_norm);
        s.max_m1_trace_error = s.max_m1_trace_error.max(m1.trace_relative_error());
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use hankel_nuclear_core::certificate::certify;

    #[test]
    fn deviations_have_unit_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for n in 2..12 {
            let d = random_unit_deviation(&mut rng, n).unwrap();
            let norm = d.values().iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!((norm - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn probe_is_reproducible() {
        let set = certify(0.5, 4).unwrap();
        let a = probe(&set, 50, 9).unwrap();
        assert_eq!(a, probe(&set, 50, 9).unwrap());
        assert!(a.all_hold());
    }
}
