use crate::{Error, Result, C64, SPEED_OF_LIGHT};
use ndarray::Array2;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

/// Reusable unnormalized inverse FFT for one zero-padded length.
#[derive(Clone)]
pub struct PeriodogramPlan {
    n_idft: usize,
    ifft: Arc<dyn Fft<f64>>,
}

impl PeriodogramPlan {
    pub fn new(n_idft: usize) -> Self {
        PeriodogramPlan {
            n_idft,
            ifft: FftPlanner::new().plan_fft_inverse(n_idft),
        }
    }

    pub fn n_idft(&self) -> usize {
        self.n_idft
    }

    /// `P[i] = Σ_m |IDFT(H[:,m])[i]|² / (N_sc·M_q)`.
    pub fn apply(&self, hq: &Array2<C64>) -> Result<Vec<f64>> {
        let (n_sc, mq) = hq.dim();
        if self.n_idft < n_sc {
            return Err(Error::param(format!(
                "n_idft {} shorter than {n_sc} subcarriers",
                self.n_idft
            )));
        }
        let mut p = vec![0.0; self.n_idft];
        let mut buf = vec![C64::new(0.0, 0.0); self.n_idft];
        let scale = 1.0 / (n_sc * mq) as f64;
        for col in hq.columns() {
            buf.fill(C64::new(0.0, 0.0));
            buf.iter_mut().zip(col.iter()).for_each(|(b, h)| *b = *h);
            self.ifft.process(&mut buf);
            p.iter_mut().zip(&buf).for_each(|(acc, z)| *acc += z.norm_sqr() * scale);
        }
        Ok(p)
    }
}

/// Zero-padded periodogram of one beam slice.
pub fn periodogram_range(hq: &Array2<C64>, n_idft: usize) -> Result<Vec<f64>> {
    PeriodogramPlan::new(n_idft).apply(hq)
}

/// Monostatic range of an IDFT bin, `bin·c/(2·Δf·N_IDFT)`.
pub fn range_from_bin(bin: usize, delta_f: f64, n_idft: usize) -> f64 {
    bin as f64 * SPEED_OF_LIGHT / (2.0 * delta_f * n_idft as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn ones_concentrate_in_bin_zero() {
        let h = Array2::from_elem((4, 1), C64::new(1.0, 0.0));
        let p = periodogram_range(&h, 4).unwrap();
        for (a, b) in p.iter().zip([4.0, 0.0, 0.0, 0.0]) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(periodogram_range(&h, 3).is_err());
    }

    #[test]
    fn matches_brute_force_dft_and_peaks_on_bin() {
        let (n_sc, n_idft, k) = (16, 64, 9);
        let tau_df = k as f64 / n_idft as f64;
        let h = Array2::from_shape_fn((n_sc, 2), |(n, m)| {
            C64::from_polar(1.0 + m as f64, -2.0 * PI * tau_df * n as f64)
        });
        let p = periodogram_range(&h, n_idft).unwrap();
        for (i, &got) in p.iter().enumerate() {
            let mut want = 0.0;
            for m in 0..2 {
                let z: C64 = (0..n_sc)
                    .map(|n| h[[n, m]] * C64::from_polar(1.0, 2.0 * PI * (n * i) as f64 / n_idft as f64))
                    .sum();
                want += z.norm_sqr() / (n_sc * 2) as f64;
            }
            assert!((got - want).abs() < 1e-9 * want.max(1.0));
        }
        let argmax = (0..n_idft).max_by(|&a, &b| p[a].total_cmp(&p[b])).unwrap();
        assert_eq!(argmax, k);
    }

    #[test]
    fn range_bins() {
        assert_eq!(range_from_bin(0, 78.125e3, 1024), 0.0);
        assert!((range_from_bin(2, 78.125e3, 1024) - 3.75).abs() < 1e-12);
        assert!((range_from_bin(1, 78.125e3, 1024) - 1.875).abs() < 1e-12);
    }

    #[test]
    fn scaling_is_quadratic() {
        let h = Array2::from_shape_fn((8, 3), |(n, m)| C64::new(n as f64 * 0.1, m as f64 - 1.0));
        let g = C64::new(0.3, -2.0);
        let a = periodogram_range(&h, 16).unwrap();
        let b = periodogram_range(&h.mapv(|z| z * g), 16).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((y - x * g.norm_sqr()).abs() < 1e-10 * (1.0 + y));
        }
    }
}
