use crate::channel::ChannelObservation;
use crate::waveform::FrameSpec;
use crate::{Error, Result, C64};
use ndarray::{s, Array2, ShapeBuilder};

/// `H = Y ⊘ b`, element-wise.
pub fn equalize_known_data(obs: &ChannelObservation, frame: &FrameSpec) -> Result<Array2<C64>> {
    if obs.matrix.dim() != frame.grid.dim() {
        return Err(Error::param("observation and frame dimensions differ"));
    }
    if frame.grid.iter().any(|b| b.norm_sqr() == 0.0) {
        return Err(Error::param("known symbol grid contains a zero entry"));
    }
    let mut h = obs.matrix.clone();
    h.zip_mut_with(&frame.grid, |y, b| *y /= b);
    Ok(h)
}

/// `Q` consecutive `N_sc × M_q` beam slices; trailing symbols are dropped.
pub fn slice_beams(h: &Array2<C64>, mq: usize, q: usize) -> Result<Vec<Array2<C64>>> {
    if mq == 0 || q == 0 || q * mq > h.ncols() {
        return Err(Error::param(format!(
            "{q} slices of {mq} symbols do not fit {} columns",
            h.ncols()
        )));
    }
    Ok((0..q)
        .map(|k| {
            let view = h.slice(s![.., k * mq..(k + 1) * mq]);
            let mut out = Array2::zeros(view.raw_dim().f());
            out.assign(&view);
            out
        })
        .collect())
}
