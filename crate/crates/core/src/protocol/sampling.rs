use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Click tallies for one phase setting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetectionCounts {
    pub n_c: u64,
    pub n_ac: u64,
    /// 1 or 2.
    pub setting: u8,
}

impl DetectionCounts {
    pub fn trials(&self) -> u64 {
        self.n_c + self.n_ac
    }

    /// Add-one smoothed estimate of p_ac, (n_ac + 1) / (N + 2).
    pub fn smoothed_p_ac(&self) -> f64 {
        (self.n_ac as f64 + 1.0) / (self.trials() as f64 + 2.0)
    }
}

/// SplitMix64 finalizer applied to `master + (index + 1)·φ`, where φ is the
/// 64-bit golden-ratio increment. Stream `index` of a run always gets the
/// same seed regardless of which thread evaluates it.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Draws n_c ~ Binomial(N, p_c) from a ChaCha8 stream seeded with `seed`.
pub fn sample_counts(p_c: f64, trials: u64, seed: u64) -> Result<DetectionCounts> {
    if trials == 0 {
        return Err(Error::ZeroTrials);
    }
    if !(-1e-12..=1.0 + 1e-12).contains(&p_c) {
        return Err(Error::InvalidParameter {
            name: "p_c",
            value: p_c,
            reason: "must be a probability",
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_c = Binomial::new(trials, p_c.clamp(0.0, 1.0))
        .expect("probability already validated")
        .sample(&mut rng);
    Ok(DetectionCounts {
        n_c,
        n_ac: trials - n_c,
        setting: 1,
    })
}

/// δp = (n_ac - n_c) / N.
pub fn delta_p(counts: &DetectionCounts) -> Result<f64> {
    let n = counts.trials();
    if n == 0 {
        return Err(Error::ZeroTrials);
    }
    Ok((counts.n_ac as f64 - counts.n_c as f64) / n as f64)
}
