//! Dense Hermitian kernels on row-major complex matrices.

use crate::{Error, Result, C64};
use ndarray::Array2;

const ZERO: C64 = C64::new(0.0, 0.0);

/// Largest entrywise deviation from Hermitian symmetry.
pub fn hermitian_defect(a: &Array2<C64>) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((a[[i, j]] - a[[j, i]].conj()).norm());
        }
    }
    worst
}

/// Lower factor `G` of `A = G·Gᴴ`, row-major, strictly-upper part zero.
pub fn cholesky_lower(a: &Array2<C64>) -> Result<Vec<C64>> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::param("cholesky of non-square matrix"));
    }
    let mut g = vec![ZERO; n * n];
    for i in 0..n {
        for j in 0..=i {
            g[i * n + j] = a[[i, j]];
        }
    }
    let mut pivot_row = vec![ZERO; n];
    for j in 0..n {
        let rowj = &g[j * n..j * n + j];
        let d = g[j * n + j].re - rowj.iter().map(|z| z.norm_sqr()).sum::<f64>();
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::param(format!("matrix not positive definite at pivot {j}")));
        }
        let d = d.sqrt();
        pivot_row[..j].copy_from_slice(rowj);
        g[j * n + j] = C64::new(d, 0.0);
        let inv = 1.0 / d;
        for i in (j + 1)..n {
            let rowi = &mut g[i * n..i * n + j + 1];
            let mut s = rowi[j];
            for (x, p) in rowi[..j].iter().zip(&pivot_row[..j]) {
                s -= x * p.conj();
            }
            rowi[j] = s * inv;
        }
    }
    Ok(g)
}

/// Inverse of a row-major lower-triangular matrix with positive real diagonal.
pub fn lower_triangular_inverse(g: &[C64], n: usize) -> Vec<C64> {
    let mut w = vec![ZERO; n * n];
    let mut acc = vec![ZERO; n];
    for i in 0..n {
        let gi = &g[i * n..i * n + n];
        let inv = 1.0 / gi[i].re;
        acc[..=i].fill(ZERO);
        for k in 0..i {
            let gik = gi[k];
            let wk = &w[k * n..k * n + k + 1];
            for (a, b) in acc[..=k].iter_mut().zip(wk) {
                *a += gik * b;
            }
        }
        let wi = &mut w[i * n..i * n + i + 1];
        for j in 0..i {
            wi[j] = -acc[j] * inv;
        }
        wi[i] = C64::new(inv, 0.0);
    }
    w
}

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending.
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// `vectors[k]` is the unit eigenvector for `values[k]`.
    pub vectors: Vec<Vec<C64>>,
}

pub fn hermitian_eigen(a: &Array2<C64>) -> HermitianEigen {
    let n = a.nrows();
    let m = nalgebra::DMatrix::<C64>::from_fn(n, n, |i, j| a[[i, j]]);
    let eig = m.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[x].total_cmp(&eig.eigenvalues[y]));
    HermitianEigen {
        values: order.iter().map(|&k| eig.eigenvalues[k]).collect(),
        vectors: order
            .iter()
            .map(|&k| eig.eigenvectors.column(k).iter().copied().collect())
            .collect(),
    }
}
