//! Node generators for uniform averages over the unit ball of `C^n`.
//!
//! All generators use the same collapsed-simplex chart. For `s in [0,1]^n`
//! and angles `theta in [0, 2pi)^n`, put
//! `t_1 = s_1`, `t_j = s_j (1 - t_1 - ... - t_{j-1})`, `xi_j = sqrt(t_j) e^{i theta_j}`.
//! Uniform measure on the ball corresponds to independent
//! `s_j ~ Beta(1, n - j + 1)` (1-based `j`) and uniform angles.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

/// Mixes `(seed, index)` into a well-spread 64-bit value.
pub fn splitmix64(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Pairwise (tree) sum with a fixed split, so the rounding pattern depends
/// only on the length of the input.
pub fn pairwise_sum(v: &[C64]) -> C64 {
    const LEAF: usize = 32;
    if v.len() <= LEAF {
        return v.iter().fold(C64::new(0.0, 0.0), |a, b| a + b);
    }
    let mid = v.len() / 2;
    pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
}

pub fn pairwise_sum_real(v: &[f64]) -> f64 {
    const LEAF: usize = 32;
    if v.len() <= LEAF {
        return v.iter().sum();
    }
    let mid = v.len() / 2;
    pairwise_sum_real(&v[..mid]) + pairwise_sum_real(&v[mid..])
}

const PRIMES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// Van der Corput radical inverse of `i` in base `b`.
pub fn radical_inverse(mut i: u64, b: u64) -> f64 {
    let inv = 1.0 / b as f64;
    let mut f = inv;
    let mut acc = 0.0;
    while i > 0 {
        acc += (i % b) as f64 * f;
        i /= b;
        f *= inv;
    }
    acc
}

/// Point `i` of the Halton sequence in `dim` dimensions.
pub fn halton(i: u64, dim: usize, out: &mut [f64]) {
    assert!(dim <= PRIMES.len(), "Halton dimension too large");
    for (k, o) in out.iter_mut().take(dim).enumerate() {
        *o = radical_inverse(i, PRIMES[k]);
    }
}

/// Maps a point of `[0,1)^{2n}` to the unit ball of `C^n`, preserving the
/// uniform law. The first `n` coordinates drive the moduli, the rest the angles.
pub fn cube_to_ball(u: &[f64], out: &mut [C64]) {
    let n = out.len();
    let mut remaining = 1.0;
    for j in 0..n {
        let b = (n - j) as f64;
        let s = 1.0 - (1.0 - u[j]).powf(1.0 / b);
        let t = s * remaining;
        remaining -= t;
        let theta = 2.0 * PI * u[n + j];
        out[j] = C64::from_polar(t.max(0.0).sqrt(), theta);
    }
}

/// Gauss–Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre_unit(q: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(q >= 1);
    let mut x = vec![0.0; q];
    let mut w = vec![0.0; q];
    for k in 0..q.div_ceil(2) {
        let mut r = (PI * (k as f64 + 0.75) / (q as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, r);
            for m in 2..=q {
                let p2 = ((2 * m - 1) as f64 * r * p1 - (m - 1) as f64 * p0) / m as f64;
                p0 = p1;
                p1 = p2;
            }
            if q == 1 {
                p0 = 1.0;
                p1 = r;
            }
            dp = q as f64 * (r * p1 - p0) / (r * r - 1.0);
            let step = p1 / dp;
            r -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let weight = 2.0 / ((1.0 - r * r) * dp * dp);
        x[k] = 0.5 * (1.0 - r);
        w[k] = 0.5 * weight;
        x[q - 1 - k] = 0.5 * (1.0 + r);
        w[q - 1 - k] = 0.5 * weight;
    }
    (x, w)
}

/// Tensor rule for uniform averages on the ball: `q` Gauss–Legendre nodes
/// per modulus coordinate and `2q` offset trapezoid nodes per angle.
/// Returns flat points (stride `n`) and weights summing to 1.
pub fn polar_product(n: usize, q: usize) -> (Vec<C64>, Vec<f64>) {
    let (gx, gw) = gauss_legendre_unit(q);
    let m = 2 * q;
    let per_dim = q * m;
    let total = per_dim.pow(n as u32);
    let mut pts = Vec::with_capacity(total * n);
    let mut wts = Vec::with_capacity(total);
    let mut digits = vec![0usize; n];
    for _ in 0..total {
        let mut remaining = 1.0;
        let mut weight = 1.0;
        for j in 0..n {
            let a = digits[j] / m;
            let b = digits[j] % m;
            let s = gx[a];
            let exponent = (n - j - 1) as i32;
            weight *= gw[a] * (n - j) as f64 * (1.0 - s).powi(exponent) / m as f64;
            let t = s * remaining;
            remaining -= t;
            let theta = 2.0 * PI * (b as f64 + 0.5) / m as f64;
            pts.push(C64::from_polar(t.sqrt(), theta));
        }
        wts.push(weight);
        for d in digits.iter_mut() {
            *d += 1;
            if *d < per_dim {
                break;
            }
            *d = 0;
        }
    }
    (pts, wts)
}

/// Largest `q` with `(2 q^2)^n <= budget`.
pub fn polar_order(n: usize, budget: usize) -> usize {
    let mut q = 1;
    while (2usize * (q + 1) * (q + 1)).checked_pow(n as u32).is_some_and(|v| v <= budget) {
        q += 1;
    }
    q
}
