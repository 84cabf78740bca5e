use crate::{Error, Result, C64};
use ndarray::Array2;

/// Smoothing window `L = ⌊ρ·N_sc⌋`.
pub fn smoothing_length(n_sc: usize, rho: f64) -> Result<usize> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::param(format!("smoothing constant {rho} outside (0, 1)")));
    }
    let l = (rho * n_sc as f64).floor() as usize;
    if l < 2 || l > n_sc {
        return Err(Error::param(format!(
            "smoothing window {l} invalid for {n_sc} subcarriers"
        )));
    }
    Ok(l)
}

/// Forward smoothed covariance over every length-`L` subcarrier window of
/// every symbol, normalized by the snapshot count `N_sub·M_q`.
///
/// Uses the sliding-window recursion
/// `R[i][j] = R[i-1][j-1] - h[i-1]h*[j-1] + h[N_sub+i-1]h*[N_sub+j-1]`
/// along each diagonal; the result is exactly Hermitian.
pub fn mssp_covariance_forward(hq: &Array2<C64>, rho: f64) -> Result<Array2<C64>> {
    let (n_sc, mq) = hq.dim();
    let l = smoothing_length(n_sc, rho)?;
    let n_sub = n_sc - l + 1;
    let cols: Vec<Vec<C64>> = hq.columns().into_iter().map(|c| c.to_vec()).collect();

    // diag[i*l + d] holds R[i][i+d].
    let mut diag = vec![C64::new(0.0, 0.0); l * l];
    for h in &cols {
        let row0 = &mut diag[..l];
        for s in 0..n_sub {
            let hs = h[s];
            for (r, v) in row0.iter_mut().zip(&h[s..s + l]) {
                *r += hs * v.conj();
            }
        }
    }
    for i in 1..l {
        let (prev, cur) = diag.split_at_mut(i * l);
        let prev = &prev[(i - 1) * l..];
        let width = l - i;
        cur[..width].copy_from_slice(&prev[..width]);
        for h in &cols {
            let out = h[i - 1];
            let inc = h[n_sub + i - 1];
            let tail_out = &h[i - 1..i - 1 + width];
            let tail_in = &h[n_sub + i - 1..n_sub + i - 1 + width];
            for ((c, a), b) in cur[..width].iter_mut().zip(tail_out).zip(tail_in) {
                *c += inc * b.conj() - out * a.conj();
            }
        }
    }

    let scale = 1.0 / (n_sub * mq) as f64;
    let mut r = Array2::<C64>::zeros((l, l));
    for i in 0..l {
        for d in 0..l - i {
            let v = diag[i * l + d] * scale;
            if d == 0 {
                r[[i, i]] = C64::new(v.re, 0.0);
            } else {
                r[[i, i + d]] = v;
                r[[i + d, i]] = v.conj();
            }
        }
    }
    Ok(r)
}

/// Forward-backward average `(R + J·conj(R)·J)/2` of the smoothed covariance.
pub fn mssp_fbcm_covariance(hq: &Array2<C64>, rho: f64) -> Result<Array2<C64>> {
    let f = mssp_covariance_forward(hq, rho)?;
    let l = f.nrows();
    Ok(Array2::from_shape_fn((l, l), |(i, j)| {
        (f[[i, j]] + f[[l - 1 - i, l - 1 - j]].conj()) * 0.5
    }))
}
