use super::noise::{add_awgn, NoiseSpec};
use super::paths::PathParams;
use crate::waveform::{steering_vector, Codebook, FrameSpec, OfdmConfig};
use crate::{Error, Result, C64, SPEED_OF_LIGHT};
use ndarray::{Array2, ShapeBuilder};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ObservationKind {
    BsEcho,
    UeDownlink,
}

/// Received time-frequency grid `Y`, `N_sc × M_symb`, column-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelObservation {
    pub matrix: Array2<C64>,
    pub kind: ObservationKind,
}

/// A monostatic return: one propagation path to a target of given RCS.
#[derive(Clone, Debug, PartialEq)]
pub struct EchoPath {
    pub path: PathParams,
    pub rcs_m2: f64,
}

/// Round-trip echo amplitude `√σ·λ/((4π)^{3/2} r²)` from the one-way gain,
/// with blockage and reflection applied on both legs.
pub fn echo_gain(path: &PathParams, rcs_m2: f64, wavelength: f64) -> C64 {
    let a = path.complex_gain;
    a * a * ((4.0 * PI * rcs_m2).sqrt() / wavelength)
}

/// Echo power of a unit-RCS target at 1 m.
pub fn echo_reference_power(wavelength: f64) -> f64 {
    (wavelength / (4.0 * PI).powf(1.5)).powi(2)
}

/// Downlink power of a free-space path at 1 m.
pub fn downlink_reference_power(wavelength: f64) -> f64 {
    (wavelength / (4.0 * PI)).powi(2)
}

/// One closed-form term: delay phasor over subcarriers and per-symbol gain.
struct Term {
    delay_phasor: Vec<C64>,
    symbol_gain: Vec<C64>,
}

fn delay_phasor(tau: f64, cfg: &OfdmConfig) -> Vec<C64> {
    let step = tau * cfg.subcarrier_spacing_hz;
    (0..cfg.num_subcarriers)
        .map(|n| C64::from_polar(1.0, -2.0 * PI * (step * n as f64).fract()))
        .collect()
}

fn doppler_phase(nu: f64, m: usize, cfg: &OfdmConfig) -> C64 {
    C64::from_polar(1.0, 2.0 * PI * (nu * m as f64 * cfg.symbol_duration_s).fract())
}

fn check_delay(tau: f64, cfg: &OfdmConfig) -> Result<()> {
    if tau >= cfg.cp_duration_s {
        return Err(Error::Precondition(format!(
            "path delay {tau:e} s is not shorter than the cyclic prefix {:e} s",
            cfg.cp_duration_s
        )));
    }
    Ok(())
}

fn check_frame(frame: &FrameSpec, cfg: &OfdmConfig) -> Result<()> {
    if frame.grid.dim() != (cfg.num_subcarriers, cfg.symbols_per_frame)
        || frame.beam_schedule.len() != cfg.symbols_per_frame
    {
        return Err(Error::param(format!(
            "frame {:?} does not match {} x {} numerology",
            frame.grid.dim(),
            cfg.num_subcarriers,
            cfg.symbols_per_frame
        )));
    }
    Ok(())
}

/// `Y[n,m] = b[n,m]·Σ_k g_k[m]·d_k[n]`, plus noise.
fn assemble(
    frame: &FrameSpec,
    terms: &[Term],
    kind: ObservationKind,
    variance: f64,
    noise: &NoiseSpec,
) -> ChannelObservation {
    let (n_sc, m_symb) = frame.grid.dim();
    let mut y = Array2::<C64>::zeros((n_sc, m_symb).f());
    for m in 0..m_symb {
        let mut col = y.column_mut(m);
        let col = col.as_slice_mut().expect("column-major");
        for t in terms {
            let g = t.symbol_gain[m];
            for (c, d) in col.iter_mut().zip(&t.delay_phasor) {
                *c += g * d;
            }
        }
        let b = frame.grid.column(m);
        for (c, s) in col.iter_mut().zip(b.iter()) {
            *c *= s;
        }
    }
    add_awgn(&mut y, variance, noise.seed, noise.stream);
    ChannelObservation { matrix: y, kind }
}

/// Monostatic echo received at the base station with receive beams
/// `rx_schedule`.
pub fn monostatic_echo_matrix(
    frame: &FrameSpec,
    echoes: &[EchoPath],
    cfg: &OfdmConfig,
    rx_schedule: &[usize],
    noise: &NoiseSpec,
) -> Result<ChannelObservation> {
    check_frame(frame, cfg)?;
    if rx_schedule.len() != frame.beam_schedule.len() {
        return Err(Error::param("receive schedule length differs from the frame"));
    }
    let lambda = cfg.wavelength();
    let q = frame.num_beams;
    if rx_schedule.iter().any(|&b| b >= q) {
        return Err(Error::param(format!("receive beam outside codebook of {q}")));
    }
    let cb_tx = Codebook::new(q, cfg.num_tx_elements);
    let cb_rx = Codebook::new(q, cfg.num_rx_elements);
    let mut terms = Vec::with_capacity(echoes.len());
    for e in echoes {
        let tau = 2.0 * e.path.geometric_length_m / SPEED_OF_LIGHT;
        check_delay(tau, cfg)?;
        let nu = 2.0 * e.path.doppler_hz;
        let th = e.path.angle_rad;
        let d = cfg.antenna_spacing_m;
        let g_tx = cb_tx.gains(&steering_vector(th, cfg.num_tx_elements, d, lambda));
        let g_rx = cb_rx.gains(&steering_vector(th, cfg.num_rx_elements, d, lambda));
        let alpha = echo_gain(&e.path, e.rcs_m2, lambda);
        let symbol_gain = (0..cfg.symbols_per_frame)
            .map(|m| alpha * g_rx[rx_schedule[m]] * g_tx[frame.beam_schedule[m]] * doppler_phase(nu, m, cfg))
            .collect();
        terms.push(Term {
            delay_phasor: delay_phasor(tau, cfg),
            symbol_gain,
        });
    }
    let variance = noise.variance(echo_reference_power(lambda));
    Ok(assemble(frame, &terms, ObservationKind::BsEcho, variance, noise))
}

/// Grid received by a single-antenna UE.
pub fn downlink_observation(
    frame: &FrameSpec,
    paths: &[PathParams],
    cfg: &OfdmConfig,
    noise: &NoiseSpec,
) -> Result<ChannelObservation> {
    check_frame(frame, cfg)?;
    let lambda = cfg.wavelength();
    let cb = Codebook::new(frame.num_beams, cfg.num_tx_elements);
    let mut terms = Vec::with_capacity(paths.len());
    for p in paths {
        let tau = p.geometric_length_m / SPEED_OF_LIGHT;
        check_delay(tau, cfg)?;
        let g_tx = cb.gains(&steering_vector(
            p.angle_rad,
            cfg.num_tx_elements,
            cfg.antenna_spacing_m,
            lambda,
        ));
        let symbol_gain = (0..cfg.symbols_per_frame)
            .map(|m| p.complex_gain * g_tx[frame.beam_schedule[m]] * doppler_phase(p.doppler_hz, m, cfg))
            .collect();
        terms.push(Term {
            delay_phasor: delay_phasor(tau, cfg),
            symbol_gain,
        });
    }
    let variance = noise.variance(downlink_reference_power(lambda));
    Ok(assemble(frame, &terms, ObservationKind::UeDownlink, variance, noise))
}
