//! Brute-force time-domain echo synthesis used to verify the closed form.

use super::synth::{echo_gain, EchoPath};
use crate::waveform::{dft_beam_vector, steering_vector, FrameSpec, OfdmConfig};
use crate::{Error, Result, C64, SPEED_OF_LIGHT};
use ndarray::{Array2, ShapeBuilder};
use std::f64::consts::PI;

pub struct TimeDomainReference {
    /// Beam-combined received stream, cyclic prefixes included.
    pub samples: Vec<C64>,
    /// CP-stripped, unitary-DFT grid comparable to the closed-form echo.
    pub grid: Array2<C64>,
}

fn unitary_dft(x: &[C64], sign: f64) -> Vec<C64> {
    let n = x.len();
    let scale = 1.0 / (n as f64).sqrt();
    (0..n)
        .map(|k| {
            x.iter()
                .enumerate()
                .map(|(i, v)| v * C64::from_polar(1.0, sign * 2.0 * PI * ((i * k) % n) as f64 / n as f64))
                .sum::<C64>()
                * scale
        })
        .collect()
}

/// Per-antenna simulation: each element radiates its beam-weighted OFDM
/// stream, every path delays it by an integer number of samples and applies
/// a per-symbol Doppler phase, each receive element is weighted by the
/// current receive beam, and the combined stream is demodulated.
pub fn time_domain_reference_synthesis(
    frame: &FrameSpec,
    echoes: &[EchoPath],
    cfg: &OfdmConfig,
    rx_schedule: &[usize],
) -> Result<TimeDomainReference> {
    let n = cfg.num_subcarriers;
    let cp = cfg.cp_samples()?;
    let sym_len = n + cp;
    let m_symb = frame.num_symbols();
    let fs = cfg.sample_rate();
    let lambda = cfg.wavelength();
    let num_beams = frame.num_beams;
    if frame.beam_schedule.iter().chain(rx_schedule).any(|&b| b >= num_beams) {
        return Err(Error::param(format!("beam outside codebook of {num_beams}")));
    }

    // Transmitted OFDM symbols with CP, before beam weighting.
    let symbols: Vec<Vec<C64>> = (0..m_symb)
        .map(|m| {
            let col: Vec<C64> = frame.grid.column(m).to_vec();
            let body = unitary_dft(&col, 1.0);
            body[n - cp..].iter().chain(&body).copied().collect()
        })
        .collect();
    let tx_beams: Vec<Vec<C64>> = (0..num_beams)
        .map(|q| dft_beam_vector(q, num_beams, cfg.num_tx_elements))
        .collect::<Result<_>>()?;
    let rx_beams: Vec<Vec<C64>> = (0..num_beams)
        .map(|q| dft_beam_vector(q, num_beams, cfg.num_rx_elements))
        .collect::<Result<_>>()?;

    let total = m_symb * sym_len;
    let tx_at = |t: usize, i: usize| -> C64 {
        let m = i / sym_len;
        tx_beams[frame.beam_schedule[m]][t] * symbols[m][i % sym_len]
    };

    let mut rx = vec![vec![C64::new(0.0, 0.0); total]; cfg.num_rx_elements];
    for e in echoes {
        let delay = 2.0 * e.path.geometric_length_m / SPEED_OF_LIGHT * fs;
        let d = delay.round();
        if (delay - d).abs() > 1e-6 {
            return Err(Error::param(format!("delay of {delay} samples is off the sample grid")));
        }
        let d = d as usize;
        if d > cp {
            return Err(Error::Precondition(format!("delay {d} exceeds the {cp}-sample prefix")));
        }
        let th = e.path.angle_rad;
        let b_tx = steering_vector(th, cfg.num_tx_elements, cfg.antenna_spacing_m, lambda);
        let b_rx = steering_vector(th, cfg.num_rx_elements, cfg.antenna_spacing_m, lambda);
        let alpha = echo_gain(&e.path, e.rcs_m2, lambda);
        let nu = 2.0 * e.path.doppler_hz;
        for i in d..total {
            let src = i - d;
            let m_tx = src / sym_len;
            let hop = C64::from_polar(1.0, 2.0 * PI * nu * m_tx as f64 * cfg.symbol_duration_s);
            let radiated: C64 = (0..cfg.num_tx_elements).map(|t| b_tx[t] * tx_at(t, src)).sum();
            let s = alpha * hop * radiated;
            for (r, chan) in rx.iter_mut().enumerate() {
                chan[i] += b_rx[r] * s;
            }
        }
    }

    let samples: Vec<C64> = (0..total)
        .map(|i| {
            let w = &rx_beams[rx_schedule[i / sym_len]];
            (0..cfg.num_rx_elements).map(|r| w[r] * rx[r][i]).sum()
        })
        .collect();

    let mut grid = Array2::<C64>::zeros((n, m_symb).f());
    for m in 0..m_symb {
        let start = m * sym_len + cp;
        let spec = unitary_dft(&samples[start..start + n], -1.0);
        grid.column_mut(m).iter_mut().zip(spec).for_each(|(g, v)| *g = v);
    }
    Ok(TimeDomainReference { samples, grid })
}
