use super::{known_sequence, map_qpsk, OfdmConfig, SensingFrameSpec};
use crate::{Error, Result, C64};
use ndarray::{Array2, ShapeBuilder};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrameKind {
    Sensing,
    Isac,
}

/// A transmitted OFDM frame.
#[derive(Clone, Debug)]
pub struct FrameSpec {
    pub kind: FrameKind,
    /// `b[n, m]`, `N_sc × M_symb`, column-major so each symbol is contiguous.
    pub grid: Array2<C64>,
    /// Transmit beam index per symbol.
    pub beam_schedule: Vec<usize>,
    /// Size of the DFT codebook the schedule indexes.
    pub num_beams: usize,
    pub payload_bits: Option<Vec<u8>>,
}

impl FrameSpec {
    pub fn num_subcarriers(&self) -> usize {
        self.grid.nrows()
    }

    pub fn num_symbols(&self) -> usize {
        self.grid.ncols()
    }

    /// Data symbols carried by an ISAC frame, in placement order.
    pub fn data_symbols(&self) -> Vec<C64> {
        let n_data = self.payload_bits.as_ref().map_or(0, |b| b.len() / 2);
        let n_sc = self.num_subcarriers();
        (0..n_data).map(|k| self.grid[[k % n_sc, k / n_sc]]).collect()
    }
}

fn known_grid(cfg: &OfdmConfig, root: u64) -> Result<Array2<C64>> {
    let seq = known_sequence(cfg.num_subcarriers, root)?;
    let mut grid = Array2::zeros((cfg.num_subcarriers, cfg.symbols_per_frame).f());
    for mut col in grid.columns_mut() {
        col.iter_mut().zip(&seq).for_each(|(g, s)| *g = *s);
    }
    Ok(grid)
}

/// Beam-swept frame of known symbols.
pub fn build_sensing_frame(cfg: &OfdmConfig, sf: &SensingFrameSpec) -> Result<FrameSpec> {
    let beam_schedule = sf.beam_schedule(cfg.symbols_per_frame)?;
    Ok(FrameSpec {
        kind: FrameKind::Sensing,
        grid: known_grid(cfg, sf.zc_root)?,
        beam_schedule,
        num_beams: sf.num_beams,
        payload_bits: None,
    })
}

/// Fixed-beam frame carrying `payload` as QPSK, subcarrier index fastest;
/// remaining resource elements keep the known sequence.
pub fn build_isac_frame(cfg: &OfdmConfig, sf: &SensingFrameSpec, payload: &[u8], beam: usize) -> Result<FrameSpec> {
    if beam >= sf.num_beams {
        return Err(Error::param(format!(
            "beam {beam} outside codebook of {}",
            sf.num_beams
        )));
    }
    let capacity = 2 * cfg.num_subcarriers * cfg.symbols_per_frame;
    if payload.len() > capacity {
        return Err(Error::param(format!(
            "payload of {} bits exceeds frame capacity {capacity}",
            payload.len()
        )));
    }
    let mut grid = known_grid(cfg, sf.zc_root)?;
    let n_sc = cfg.num_subcarriers;
    for (k, s) in map_qpsk(payload)?.into_iter().enumerate() {
        grid[[k % n_sc, k / n_sc]] = s;
    }
    Ok(FrameSpec {
        kind: FrameKind::Isac,
        grid,
        beam_schedule: vec![beam; cfg.symbols_per_frame],
        num_beams: sf.num_beams,
        payload_bits: Some(payload.to_vec()),
    })
}
