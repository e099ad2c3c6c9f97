//! In-place discrete Fourier transform for arbitrary lengths.
//!
//! Power-of-two lengths use an iterative radix-2 kernel; all other lengths go
//! through Bluestein's chirp-z reduction onto a power-of-two convolution.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

/// Computes `X_k = Σ_j x_j e^{sign·i2πjk/n}` in place (unnormalized).
pub fn dft_in_place(data: &mut [Complex64], sign: f64) {
    let n = data.len();
    if n <= 1 {
        return;
    }
    if n.is_power_of_two() {
        radix2(data, sign);
    } else {
        bluestein(data, sign);
    }
}

fn twiddles(n: usize, sign: f64) -> Vec<Complex64> {
    (0..n / 2)
        .map(|k| {
            let a = sign * 2.0 * PI * k as f64 / n as f64;
            Complex64::new(a.cos(), a.sin())
        })
        .collect()
}

fn radix2(data: &mut [Complex64], sign: f64) {
    let n = data.len();
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            data.swap(i, j);
        }
    }
    let tw = twiddles(n, sign);
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let stride = n / len;
        for start in (0..n).step_by(len) {
            for k in 0..half {
                let w = tw[k * stride];
                let a = data[start + k];
                let b = data[start + k + half] * w;
                data[start + k] = a + b;
                data[start + k + half] = a - b;
            }
        }
        len <<= 1;
    }
}

fn bluestein(data: &mut [Complex64], sign: f64) {
    let n = data.len();
    let m = (2 * n - 1).next_power_of_two();
    // chirp c_j = e^{sign·iπ j²/n}; j² is reduced mod 2n to keep the phase small.
    let chirp: Vec<Complex64> = (0..n)
        .map(|j| {
            let j2 = ((j as u128 * j as u128) % (2 * n as u128)) as f64;
            let a = sign * PI * j2 / n as f64;
            Complex64::new(a.cos(), a.sin())
        })
        .collect();
    let mut a = vec![Complex64::new(0.0, 0.0); m];
    for j in 0..n {
        a[j] = data[j] * chirp[j];
    }
    let mut b = vec![Complex64::new(0.0, 0.0); m];
    b[0] = chirp[0].conj();
    for j in 1..n {
        b[j] = chirp[j].conj();
        b[m - j] = chirp[j].conj();
    }
    radix2(&mut a, -1.0);
    radix2(&mut b, -1.0);
    for (x, y) in a.iter_mut().zip(b.iter()) {
        *x *= *y;
    }
    radix2(&mut a, 1.0);
    let scale = 1.0 / m as f64;
    for k in 0..n {
        data[k] = a[k] * scale * chirp[k];
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive(x: &[Complex64], sign: f64) -> Vec<Complex64> {
        let n = x.len();
        (0..n)
            .map(|k| {
                x.iter().enumerate().fold(Complex64::new(0.0, 0.0), |acc, (j, v)| {
                    let a = sign * 2.0 * PI * ((j * k) % n) as f64 / n as f64;
                    acc + v * Complex64::new(a.cos(), a.sin())
                })
            })
            .collect()
    }

    fn sample(n: usize) -> Vec<Complex64> {
        (0..n)
            .map(|j| Complex64::new((j as f64 * 0.37).sin() + 0.1 * j as f64, (j as f64 * 1.3).cos()))
            .collect()
    }

    #[test]
    fn matches_naive_dft_for_assorted_lengths() {
        for &n in &[2usize, 6, 8, 10, 12, 30, 64, 100, 128, 250] {
            for &sign in &[1.0, -1.0] {
                let x = sample(n);
                let mut y = x.clone();
                dft_in_place(&mut y, sign);
                let r = naive(&x, sign);
                let scale = r.iter().map(|v| v.norm()).fold(0.0, f64::max);
                for (a, b) in y.iter().zip(r.iter()) {
                    assert!((a - b).norm() <= 1e-12 * scale, "n={n} sign={sign}");
                }
            }
        }
    }

    #[test]
    fn forward_then_backward_is_n_times_identity() {
        for &n in &[16usize, 18, 1000] {
            let x = sample(n);
            let mut y = x.clone();
            dft_in_place(&mut y, 1.0);
            dft_in_place(&mut y, -1.0);
            for (a, b) in y.iter().zip(x.iter()) {
                assert!((a / n as f64 - b).norm() < 1e-12);
            }
        }
    }
}
