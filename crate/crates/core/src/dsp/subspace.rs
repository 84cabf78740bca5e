//! Delay-domain MUSIC and Capon spectra.
//!
//! Both spectra are reciprocals of a quadratic form `xᴴ·A·x` in the delay
//! steering vector `x_n(τ) = e^{-j2πnτΔf}`. Writing `A = Σ_r a_rᴴ a_r`, the
//! form equals `c_0 + 2·Re Σ_{k≥1} c_k z^k` with `z = e^{j2πτΔf}` and
//! `c_k = Σ_r Σ_n a_r[n]·conj(a_r[n+k])`, so each grid point costs `O(L)`.

use super::{DelayGrid, ModelOrder, MusicConfig};
use crate::linalg::{cholesky_lower, hermitian_defect, hermitian_eigen, lower_triangular_inverse};
use crate::{Error, Result, C64, SPEED_OF_LIGHT};
use ndarray::Array2;
use rustfft::FftPlanner;
use std::f64::consts::PI;

/// Unit phasors `z_u = e^{j2πτ_uΔf}` over a monostatic range grid, `τ = 2r/c`.
#[derive(Clone, Debug)]
pub struct DelaySteering {
    z: Vec<C64>,
}

impl DelaySteering {
    pub fn new(grid: &DelayGrid, delta_f: f64) -> Self {
        DelaySteering {
            z: grid
                .ranges()
                .into_iter()
                .map(|r| C64::from_polar(1.0, 2.0 * PI * (2.0 * r / SPEED_OF_LIGHT * delta_f).fract()))
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    /// `xᴴ·A·x` on every grid point from the coefficients of `A`.
    pub fn evaluate(&self, coeffs: &[C64]) -> Vec<f64> {
        self.z.iter().map(|&z| eval_quadratic_form(coeffs, z)).collect()
    }
}

/// Coefficients `c_k`, `k = 0..L-1`, of `Σ_r |Σ_n a_r[n]·z^{-n}|²`.
///
/// Rows may be shorter than `l`; missing trailing entries are zero.
pub fn quadratic_form_coeffs<'a, I>(rows: I, l: usize) -> Vec<C64>
where
    I: IntoIterator<Item = &'a [C64]>,
{
    let nfft = (2 * l).max(2).next_power_of_two();
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(nfft);
    let inv = planner.plan_fft_inverse(nfft);
    let mut power = vec![0.0f64; nfft];
    let mut buf = vec![C64::new(0.0, 0.0); nfft];
    for row in rows {
        buf.fill(C64::new(0.0, 0.0));
        buf[..row.len()].copy_from_slice(row);
        fwd.process(&mut buf);
        power.iter_mut().zip(&buf).for_each(|(p, a)| *p += a.norm_sqr());
    }
    let mut ac: Vec<C64> = power.iter().map(|&p| C64::new(p, 0.0)).collect();
    inv.process(&mut ac);
    let scale = 1.0 / nfft as f64;
    ac[..l].iter().map(|v| v.conj() * scale).collect()
}

/// `c_0 + 2·Re Σ_{k≥1} c_k z^k` by Horner's rule.
pub fn eval_quadratic_form(coeffs: &[C64], z: C64) -> f64 {
    let mut acc = C64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        acc = acc * z + c;
    }
    2.0 * acc.re - coeffs[0].re
}

fn reciprocal(q: f64) -> f64 {
    1.0 / q.max(f64::MIN_POSITIVE)
}

fn check_square(r: &Array2<C64>) -> Result<usize> {
    let l = r.nrows();
    if l < 2 || r.ncols() != l {
        return Err(Error::param(format!(
            "covariance must be square with L >= 2, got {:?}",
            r.dim()
        )));
    }
    Ok(l)
}

/// Signal-subspace dimension for ascending eigenvalues.
pub(crate) fn signal_dimension(values: &[f64], order: ModelOrder) -> Result<usize> {
    let l = values.len();
    match order {
        ModelOrder::Fixed(k) if k >= l => Err(Error::param(format!("model order {k} must be below L = {l}"))),
        ModelOrder::Fixed(k) => Ok(k),
        ModelOrder::Auto => {
            let top = values.last().copied().unwrap_or(0.0);
            let n = values.iter().filter(|&&v| v > 1e-2 * top).count();
            Ok(n.min(l - 1))
        }
    }
}

/// MUSIC pseudo-spectrum `1/(xᴴ·E_n·E_nᴴ·x)` over the configured grid.
pub fn music_spectrum(r: &Array2<C64>, cfg: &MusicConfig, delta_f: f64) -> Result<Vec<f64>> {
    music_with_steering(r, cfg.model_order, &DelaySteering::new(&cfg.delay_grid, delta_f))
}

pub(crate) fn music_with_steering(r: &Array2<C64>, order: ModelOrder, steering: &DelaySteering) -> Result<Vec<f64>> {
    let l = check_square(r)?;
    let scale = r.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if hermitian_defect(r) > 1e-10 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::param("covariance is not Hermitian"));
    }
    let eig = hermitian_eigen(r);
    let ns = signal_dimension(&eig.values, order)?;
    let noise: Vec<Vec<C64>> = eig.vectors[..l - ns]
        .iter()
        .map(|v| v.iter().map(|z| z.conj()).collect())
        .collect();
    let coeffs = quadratic_form_coeffs(noise.iter().map(|v| v.as_slice()), l);
    Ok(steering.evaluate(&coeffs).into_iter().map(reciprocal).collect())
}

/// Capon spectrum `1/(xᴴ·R_dl⁻¹·x)` with `R_dl = R + ε·(tr R/L)·I`.
pub fn capon_spectrum(r: &Array2<C64>, cfg: &MusicConfig, delta_f: f64) -> Result<Vec<f64>> {
    capon_with_steering(r, cfg.diagonal_loading, &DelaySteering::new(&cfg.delay_grid, delta_f))
}

pub(crate) fn capon_with_steering(r: &Array2<C64>, loading: f64, steering: &DelaySteering) -> Result<Vec<f64>> {
    let l = check_square(r)?;
    let trace: f64 = (0..l).map(|i| r[[i, i]].re).sum();
    if !(trace > 0.0) {
        return Err(Error::param("capon needs a covariance with positive trace"));
    }
    if !(loading >= 0.0) {
        return Err(Error::param("diagonal loading must be non-negative"));
    }
    let mut rdl = r.clone();
    let delta = loading * trace / l as f64;
    for i in 0..l {
        rdl[[i, i]] += delta;
    }
    // R⁻¹ = Wᴴ·W with W = G⁻¹ lower triangular, so row i of W has i+1 entries.
    let g = cholesky_lower(&rdl)?;
    let w = lower_triangular_inverse(&g, l);
    let coeffs = quadratic_form_coeffs((0..l).map(|i| &w[i * l..i * l + i + 1]), l);
    Ok(steering.evaluate(&coeffs).into_iter().map(reciprocal).collect())
}
