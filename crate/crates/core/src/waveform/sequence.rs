use crate::{Error, Result, C64};
use std::f64::consts::PI;

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn largest_prime_at_most(n: usize) -> Option<usize> {
    let is_prime = |k: usize| k >= 2 && (2..).take_while(|d| d * d <= k).all(|d| !k.is_multiple_of(d));
    (2..=n).rev().find(|&k| is_prime(k))
}

/// Zadoff-Chu sequence of the given root and length.
pub fn generate_zc_sequence(root: u64, length: usize) -> Result<Vec<C64>> {
    let n_len = length as u64;
    if length == 0 || root == 0 || root >= n_len {
        return Err(Error::param(format!("zc root {root} must lie in (0, {length})")));
    }
    if gcd(root, n_len) != 1 {
        return Err(Error::param(format!("zc root {root} not coprime with length {length}")));
    }
    // Phase index is reduced modulo 2N in integers so large n keeps full precision.
    let modulus = 2 * n_len as u128;
    let odd = n_len % 2 == 1;
    Ok((0..n_len as u128)
        .map(|n| {
            let quad = if odd { n * (n + 1) } else { n * n };
            let k = (root as u128 * quad) % modulus;
            C64::from_polar(1.0, -PI * k as f64 / n_len as f64)
        })
        .collect())
}

/// Known per-symbol sequence on `n_sc` subcarriers: the ZC sequence of the
/// largest prime length not above `n_sc`, cyclically extended.
pub fn known_sequence(n_sc: usize, root: u64) -> Result<Vec<C64>> {
    let len =
        largest_prime_at_most(n_sc).ok_or_else(|| Error::param(format!("no prime length fits {n_sc} subcarriers")))?;
    let zc = generate_zc_sequence(root, len)?;
    Ok((0..n_sc).map(|n| zc[n % len]).collect())
}

/// Gray-mapped unit-energy QPSK, two bits per symbol.
pub fn map_qpsk(bits: &[u8]) -> Result<Vec<C64>> {
    if !bits.len().is_multiple_of(2) {
        return Err(Error::param(format!(
            "qpsk needs an even bit count, got {}",
            bits.len()
        )));
    }
    let a = std::f64::consts::FRAC_1_SQRT_2;
    bits.chunks(2)
        .map(|p| match (p[0], p[1]) {
            (0, 0) => Ok(C64::new(a, a)),
            (0, 1) => Ok(C64::new(-a, a)),
            (1, 1) => Ok(C64::new(-a, -a)),
            (1, 0) => Ok(C64::new(a, -a)),
            _ => Err(Error::param("bits must be 0 or 1")),
        })
        .collect()
}

/// Hard-decision inverse of [`map_qpsk`].
pub fn demap_qpsk(symbols: &[C64]) -> Vec<u8> {
    symbols
        .iter()
        .flat_map(|s| [u8::from(s.im < 0.0), u8::from(s.re < 0.0)])
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_examples() {
        let x = generate_zc_sequence(1, 3).unwrap();
        let w = C64::from_polar(1.0, -2.0 * PI / 3.0);
        assert!((x[0] - 1.0).norm() < 1e-15);
        assert!((x[1] - w).norm() < 1e-15);
        assert!((x[2] - 1.0).norm() < 1e-14);
        let y = generate_zc_sequence(1, 4).unwrap();
        assert!((y[2] + 1.0).norm() < 1e-15);
    }

    #[test]
    fn invalid_roots() {
        assert!(generate_zc_sequence(2, 4).is_err());
        assert!(generate_zc_sequence(0, 7).is_err());
        assert!(generate_zc_sequence(3, 0).is_err());
    }

    #[test]
    fn prime_lengths() {
        assert_eq!(largest_prime_at_most(1024), Some(1021));
        assert_eq!(largest_prime_at_most(64), Some(61));
        assert_eq!(largest_prime_at_most(1), None);
    }

    #[test]
    fn zc_cyclic_autocorrelation_is_ideal_at_prime_length() {
        let n = 1021;
        let x = generate_zc_sequence(25, n).unwrap();
        let zero: f64 = x.iter().map(|v| v.norm_sqr()).sum();
        for lag in 1..n {
            let c: C64 = (0..n).map(|i| x[i] * x[(i + lag) % n].conj()).sum();
            assert!(c.norm() <= 1e-9 * zero, "lag {lag}: {}", c.norm());
        }
    }

    #[test]
    fn qpsk_mapping_and_round_trip() {
        let a = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(map_qpsk(&[0, 0]).unwrap()[0], C64::new(a, a));
        assert_eq!(map_qpsk(&[1, 1]).unwrap()[0], C64::new(-a, -a));
        assert!(map_qpsk(&[1]).is_err());
        let bits = [0, 0, 0, 1, 1, 1, 1, 0];
        assert_eq!(demap_qpsk(&map_qpsk(&bits).unwrap()), bits);
    }
}
