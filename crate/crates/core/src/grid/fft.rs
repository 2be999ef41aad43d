//! Complex discrete Fourier transforms of fixed length.
//!
//! Power-of-two lengths use an iterative radix-2 Cooley-Tukey transform;
//! other lengths fall back to a direct `O(N²)` sum over a precomputed table of
//! roots of unity. Neither direction is normalized.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

#[derive(Debug, Clone)]
enum Plan {
    Radix2 {
        /// `e^{−2πi j/N}` for `j < N/2`.
        twiddles: Vec<Complex64>,
        bitrev: Vec<usize>,
    },
    Direct {
        /// `e^{−2πi j/N}` for `j < N`.
        roots: Vec<Complex64>,
    },
}

/// A reusable transform plan for sequences of length `n`.
#[derive(Debug, Clone)]
pub struct Fft {
    n: usize,
    plan: Plan,
}

fn root(j: usize, n: usize) -> Complex64 {
    let angle = -2.0 * PI * (j as f64) / (n as f64);
    Complex64::new(libm::cos(angle), libm::sin(angle))
}

impl Fft {
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "transform length must be positive");
        let plan = if n.is_power_of_two() {
            let bits = n.trailing_zeros();
            let bitrev = (0..n)
                .map(|i| if bits == 0 { 0 } else { i.reverse_bits() >> (usize::BITS - bits) })
                .collect();
            Plan::Radix2 {
                twiddles: (0..n / 2).map(|j| root(j, n)).collect(),
                bitrev,
            }
        } else {
            Plan::Direct {
                roots: (0..n).map(|j| root(j, n)).collect(),
            }
        };
        Fft { n, plan }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// In place `X_k = Σ_j x_j e^{−2πi jk/N}`.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.run(data, false);
    }

    /// In place `x_j = Σ_k X_k e^{+2πi jk/N}` (no `1/N` factor).
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.run(data, true);
    }

    fn run(&self, data: &mut [Complex64], inverse: bool) {
        assert_eq!(data.len(), self.n, "buffer length does not match the plan");
        match &self.plan {
            Plan::Radix2 { twiddles, bitrev } => {
                for (i, &r) in bitrev.iter().enumerate() {
                    if i < r {
                        data.swap(i, r);
                    }
                }
                let n = self.n;
                let mut len = 2;
                while len <= n {
                    let half = len / 2;
                    let stride = n / len;
                    for chunk in data.chunks_exact_mut(len) {
                        let (lo, hi) = chunk.split_at_mut(half);
                        for (j, (a, b)) in lo.iter_mut().zip(hi.iter_mut()).enumerate() {
                            let w = twiddles[j * stride];
                            let w = if inverse { w.conj() } else { w };
                            let t = *b * w;
                            *b = *a - t;
                            *a += t;
                        }
                    }
                    len <<= 1;
                }
            }
            Plan::Direct { roots } => {
                let n = self.n;
                let mut out = vec![Complex64::new(0.0, 0.0); n];
                for (k, slot) in out.iter_mut().enumerate() {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (j, x) in data.iter().enumerate() {
                        let w = roots[(j * k) % n];
                        acc += *x * if inverse { w.conj() } else { w };
                    }
                    *slot = acc;
                }
                data.copy_from_slice(&out);
            }
        }
    }
}
