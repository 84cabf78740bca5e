use crate::{Error, Result, C64};
use ndarray::Array2;
use rustfft::FftPlanner;

/// `|IDFT_n ∘ DFT_m (H)|²`, rows = range bins, columns = Doppler bins.
pub fn range_doppler_map(h: &Array2<C64>, n_idft: usize, n_dopp: usize) -> Result<Array2<f64>> {
    let (n_sc, m) = h.dim();
    if m < 2 {
        return Err(Error::param("range-Doppler processing needs at least two symbols"));
    }
    if n_idft < n_sc || n_dopp < m {
        return Err(Error::param("transform lengths shorter than the input"));
    }
    let mut planner = FftPlanner::new();
    let ifft = planner.plan_fft_inverse(n_idft);
    let fft = planner.plan_fft_forward(n_dopp);
    let mut rows = Array2::<C64>::zeros((n_idft, n_dopp));
    let mut buf = vec![C64::new(0.0, 0.0); n_idft];
    for (k, col) in h.columns().into_iter().enumerate() {
        buf.fill(C64::new(0.0, 0.0));
        buf.iter_mut().zip(col.iter()).for_each(|(b, v)| *b = *v);
        ifft.process(&mut buf);
        rows.column_mut(k).iter_mut().zip(&buf).for_each(|(r, v)| *r = *v);
    }
    for mut row in rows.rows_mut() {
        let s = row.as_slice_mut().expect("row-major");
        fft.process(s);
    }
    Ok(rows.mapv(|z| z.norm_sqr()))
}

/// Doppler frequency of a bin, negative for the upper half.
pub fn doppler_from_bin(bin: usize, n_dopp: usize, symbol_duration_s: f64) -> f64 {
    let k = if bin < n_dopp.div_ceil(2) {
        bin as f64
    } else {
        bin as f64 - n_dopp as f64
    };
    k / (n_dopp as f64 * symbol_duration_s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn argmax2(p: &Array2<f64>) -> (usize, usize) {
        let mut best = ((0, 0), f64::NEG_INFINITY);
        for ((i, j), v) in p.indexed_iter() {
            if *v > best.1 {
                best = ((i, j), *v);
            }
        }
        best.0
    }

    #[test]
    fn static_and_moving_peaks() {
        let (n_sc, m, t) = (32, 20, 16e-6);
        let make = |k_r: usize, nu: f64| {
            Array2::from_shape_fn((n_sc, m), |(n, s)| {
                C64::from_polar(1.0, -2.0 * PI * (k_r * n) as f64 / n_sc as f64)
                    * C64::from_polar(1.0, 2.0 * PI * nu * s as f64 * t)
            })
        };
        let p = range_doppler_map(&make(5, 0.0), n_sc, m).unwrap();
        assert_eq!(argmax2(&p), (5, 0));
        let nu = 3.0 / (m as f64 * t);
        let p = range_doppler_map(&make(7, nu), n_sc, m).unwrap();
        assert_eq!(argmax2(&p), (7, 3));
        assert!((doppler_from_bin(3, m, t) - nu).abs() < 1e-6);
        assert!(doppler_from_bin(m - 1, m, t) < 0.0);
        assert!(range_doppler_map(&make(1, 0.0).slice(ndarray::s![.., ..1]).to_owned(), 32, 4).is_err());
    }

    #[test]
    fn default_velocity_resolution() {
        let cfg = crate::waveform::OfdmConfig::default();
        let dv = cfg.wavelength() / (2.0 * cfg.frame_duration_s());
        assert!((dv - 0.332).abs() < 1e-3, "{dv}");
    }
}
