//! Finite-shot sampling of computational-basis outcomes.
//!
//! Draws use `ChaCha8Rng::seed_from_u64(seed)` and a sequence of conditional
//! binomial draws, so counts for a given `(z, shots, seed)` are reproducible
//! across platforms.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};
use crate::model::ProbabilityVector;

/// Tolerance on negative or non-normalized probabilities accepted for sampling.
pub const SAMPLING_TOL: f64 = 1e-10;

/// Multinomial draw of `shots` outcomes from `z`.
pub fn sample_counts(z: &ProbabilityVector, shots: u64, seed: u64) -> Result<Vec<u64>> {
    if shots == 0 {
        return Err(Error::InvalidParameter {
            name: "shots",
            reason: "must be at least 1".into(),
        });
    }
    if z.is_empty() {
        return Err(Error::LengthMismatch {
            expected: 1,
            found: 0,
        });
    }
    z.check_physical(SAMPLING_TOL)?;
    let probs: Vec<f64> = z.as_slice().iter().map(|p| p.max(0.0)).collect();
    let total: f64 = probs.iter().sum();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; probs.len()];
    let mut remaining_shots = shots;
    let mut remaining_mass = total;
    let last = probs.len() - 1;
    for (k, &p) in probs.iter().enumerate() {
        if remaining_shots == 0 {
            break;
        }
        if k == last {
            counts[k] = remaining_shots;
            break;
        }
        let q = if remaining_mass > 0.0 {
            (p / remaining_mass).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let draw = Binomial::new(remaining_shots, q)
            .map_err(|e| Error::InvalidParameter {
                name: "z",
                reason: e.to_string(),
            })?
            .sample(&mut rng);
        counts[k] = draw;
        remaining_shots -= draw;
        remaining_mass -= p;
    }
    Ok(counts)
}

/// Relative frequencies `counts / sum(counts)`.
pub fn frequencies(counts: &[u64]) -> Result<ProbabilityVector> {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(Error::InvalidParameter {
            name: "counts",
            reason: "total count is zero".into(),
        });
    }
    Ok(ProbabilityVector(
        counts.iter().map(|&c| c as f64 / total as f64).collect(),
    ))
}
