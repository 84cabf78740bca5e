use crate::{Error, Result, C64};
use std::f64::consts::PI;

/// DFT codebook entry `f_q[n] = e^{j2πqn/Q}`.
pub fn dft_beam_vector(q: usize, num_beams: usize, n: usize) -> Result<Vec<C64>> {
    if q >= num_beams {
        return Err(Error::param(format!("beam {q} outside codebook of {num_beams}")));
    }
    Ok((0..n)
        .map(|i| {
            // (q·i mod Q) keeps the phase argument small for long arrays.
            let k = (q * i) % num_beams;
            C64::from_polar(1.0, 2.0 * PI * k as f64 / num_beams as f64)
        })
        .collect())
}

/// Nominal spatial frequency of beam `q`, `2q/Q` wrapped into `[-1, 1)`.
pub fn beam_spatial_frequency(q: usize, num_beams: usize) -> f64 {
    let u = 2.0 * q as f64 / num_beams as f64;
    if u < 1.0 {
        u
    } else {
        u - 2.0
    }
}

/// Codebook angle label of beam `q` from broadside, assuming half-wavelength spacing.
///
/// Beam `Q/2` sits on the `2q/Q = 1` boundary and maps to +90°.
pub fn beam_angle(q: usize, num_beams: usize) -> f64 {
    assert!(q < num_beams, "beam {q} outside codebook of {num_beams}");
    let u = 2.0 * q as f64 / num_beams as f64;
    if u <= 1.0 {
        u.asin()
    } else {
        (u - 2.0).asin()
    }
}

/// ULA response `β[n] = e^{-j(2πd/λ)·n·sinθ}`.
pub fn steering_vector(theta: f64, n: usize, d: f64, lambda: f64) -> Vec<C64> {
    let k = -2.0 * PI * d / lambda * theta.sin();
    (0..n).map(|i| C64::from_polar(1.0, k * i as f64)).collect()
}

/// Array gain `βᵀ·f`, a plain transpose without conjugation.
pub fn array_response(steering: &[C64], beam: &[C64]) -> C64 {
    steering.iter().zip(beam).map(|(b, f)| b * f).sum()
}

/// Beam whose angle label is closest to `theta`, ties to the lower index.
pub fn nearest_beam_by_angle(theta: f64, num_beams: usize) -> usize {
    let mut best = 0;
    let mut best_err = f64::INFINITY;
    for q in 0..num_beams {
        let e = (beam_angle(q, num_beams) - theta).abs();
        if e < best_err {
            best = q;
            best_err = e;
        }
    }
    best
}

/// Beam whose physical main lobe points closest to `theta` for element
/// spacing `d_over_lambda`, compared in cyclic spatial frequency.
pub fn nearest_beam_by_pointing(theta: f64, num_beams: usize, d_over_lambda: f64) -> usize {
    let u = 2.0 * d_over_lambda * theta.sin();
    let mut best = 0;
    let mut best_err = f64::INFINITY;
    for q in 0..num_beams {
        let diff = (u - beam_spatial_frequency(q, num_beams)).rem_euclid(2.0);
        let e = diff.min(2.0 - diff);
        if e < best_err - 1e-12 {
            best = q;
            best_err = e;
        }
    }
    best
}

/// Precomputed DFT codebook for an `n`-element array.
#[derive(Clone, Debug)]
pub struct Codebook {
    beams: Vec<Vec<C64>>,
}

impl Codebook {
    pub fn new(num_beams: usize, n: usize) -> Self {
        Codebook {
            beams: (0..num_beams)
                .map(|q| dft_beam_vector(q, num_beams, n).expect("q in range"))
                .collect(),
        }
    }

    pub fn num_beams(&self) -> usize {
        self.beams.len()
    }

    pub fn beam(&self, q: usize) -> &[C64] {
        &self.beams[q]
    }

    /// `βᵀ(θ)·f_q` for every beam.
    pub fn gains(&self, steering: &[C64]) -> Vec<C64> {
        self.beams.iter().map(|f| array_response(steering, f)).collect()
    }
}
