use crate::C64;
use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

/// Receiver noise level and master seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseConfig {
    /// Per-resource-element SNR of a unit-gain reference path at 1 m;
    /// `None` disables noise.
    pub snr_db: Option<f64>,
    pub rng_seed: u64,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        NoiseConfig {
            snr_db: Some(20.0),
            rng_seed: 1,
        }
    }
}

impl NoiseConfig {
    pub fn noiseless() -> Self {
        NoiseConfig {
            snr_db: None,
            rng_seed: 0,
        }
    }

    /// Noise draw for one independent stream of this seed.
    pub fn spec(&self, stream: u64) -> NoiseSpec {
        NoiseSpec {
            snr_db: self.snr_db,
            seed: self.rng_seed,
            stream,
        }
    }
}

/// One reproducible noise realization: `(seed, stream)` fixes every sample.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseSpec {
    pub snr_db: Option<f64>,
    pub seed: u64,
    pub stream: u64,
}

impl NoiseSpec {
    pub fn noiseless() -> Self {
        NoiseSpec {
            snr_db: None,
            seed: 0,
            stream: 0,
        }
    }

    /// Per-entry complex variance for a given reference power, zero if disabled.
    pub fn variance(&self, reference_power: f64) -> f64 {
        match self.snr_db {
            Some(snr) => reference_power / 10f64.powf(snr / 10.0),
            None => 0.0,
        }
    }
}

/// Adds circular complex Gaussian noise of the given variance, drawn in
/// memory order from the ChaCha stream `(seed, stream)`.
pub fn add_awgn(m: &mut Array2<C64>, variance: f64, seed: u64, stream: u64) {
    if variance <= 0.0 {
        return;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let s = (variance / 2.0).sqrt();
    let draw = |rng: &mut ChaCha8Rng| -> f64 { StandardNormal.sample(rng) };
    if let Some(data) = m.as_slice_memory_order_mut() {
        for z in data {
            *z += C64::new(s * draw(&mut rng), s * draw(&mut rng));
        }
    } else {
        for z in m.iter_mut() {
            *z += C64::new(s * draw(&mut rng), s * draw(&mut rng));
        }
    }
}
