//! Shared test oracles, independent of the library's implementation paths:
//! polynomial root finding by bracketing + deflation and by Durand–Kerner
//! iteration, the finite-h logarithmic-norm quotient, and seeded generators.

#![allow(dead_code)]

use num_complex::Complex64;
use pta_core::matrix::{induced_norm, Mat, PNorm};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_mat(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Mat {
    let data: Vec<f64> = (0..n * n).map(|_| rng.gen_range(-scale..=scale)).collect();
    Mat::new(n, n, data).unwrap()
}

pub fn random_symmetric(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Mat {
    let a = random_mat(rng, n, scale);
    let mut s = Mat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            s.set(i, j, 0.5 * (a.get(i, j) + a.get(j, i)));
        }
    }
    s
}

/// Finite-h quotient (‖I + hA‖_p − 1)/h from the limit definition of the
/// logarithmic norm.
pub fn log_norm_quotient(a: &Mat, p: PNorm, h: f64) -> f64 {
    let n = a.rows();
    let ipha = Mat::identity(n).add(&a.scale(h));
    (induced_norm(&ipha, p).unwrap() - 1.0) / h
}

/// Evaluate a monic polynomial with ascending real coefficients
/// (c[0] + c[1] x + … + x^n, the leading 1 implicit).
fn poly_eval(coeffs_ascending: &[f64], x: f64) -> f64 {
    let mut acc = 1.0;
    for &c in coeffs_ascending.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

fn poly_eval_complex(coeffs_ascending: &[Complex64], x: Complex64) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    for &c in coeffs_ascending.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// Deflate a monic polynomial by a real root r: returns the monic quotient's
/// ascending coefficients.
fn deflate(coeffs_ascending: &[f64], r: f64) -> Vec<f64> {
    let n = coeffs_ascending.len();
    // synthetic division in descending order
    let desc: Vec<f64> = std::iter::once(1.0)
        .chain(coeffs_ascending.iter().rev().copied())
        .collect();
    let mut out_desc = Vec::with_capacity(n);
    let mut acc = 0.0;
    for (i, &c) in desc.iter().enumerate() {
        acc = acc * r + c;
        if i < n {
            out_desc.push(acc);
        }
    }
    // out_desc is monic descending of degree n-1; convert to ascending sans leading 1
    out_desc.remove(0);
    out_desc.reverse();
    out_desc
}

fn quadratic_roots(c0: f64, c1: f64) -> Vec<Complex64> {
    // x^2 + c1 x + c0
    let disc = c1 * c1 / 4.0 - c0;
    if disc >= 0.0 {
        let r = disc.sqrt();
        let sign = if c1 >= 0.0 { 1.0 } else { -1.0 };
        let big = -(c1 / 2.0 + sign * r);
        let small = if big != 0.0 { c0 / big } else { -c1 / 2.0 + sign * r };
        vec![Complex64::new(big, 0.0), Complex64::new(small, 0.0)]
    } else {
        let im = (-disc).sqrt();
        vec![Complex64::new(-c1 / 2.0, im), Complex64::new(-c1 / 2.0, -im)]
    }
}

/// Roots of a monic polynomial by real-root bracketing (sign scan + bisection
/// inside the Cauchy bound) and deflation, finishing the final quadratic in
/// closed form. Handles the test polynomials, whose complex pairs only appear
/// in the terminal quadratic.
pub fn roots_by_bracketing(coeffs_ascending: &[f64]) -> Vec<Complex64> {
    let mut coeffs = coeffs_ascending.to_vec();
    let mut roots = Vec::new();
    while coeffs.len() > 2 {
        let bound = 1.0 + coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        let samples = 20_000;
        let mut bracket = None;
        let mut prev_x = -bound;
        let mut prev_f = poly_eval(&coeffs, prev_x);
        for i in 1..=samples {
            let x = -bound + 2.0 * bound * (i as f64) / (samples as f64);
            let f = poly_eval(&coeffs, x);
            if prev_f == 0.0 {
                bracket = Some((prev_x, prev_x));
                break;
            }
            if prev_f * f < 0.0 {
                bracket = Some((prev_x, x));
                break;
            }
            prev_x = x;
            prev_f = f;
        }
        let (mut lo, mut hi) = bracket.expect("odd-degree or bracketable polynomial");
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if poly_eval(&coeffs, lo) * poly_eval(&coeffs, mid) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo < 1e-14 * (1.0 + hi.abs()) {
                break;
            }
        }
        let r = 0.5 * (lo + hi);
        roots.push(Complex64::new(r, 0.0));
        coeffs = deflate(&coeffs, r);
    }
    match coeffs.len() {
        2 => roots.extend(quadratic_roots(coeffs[0], coeffs[1])),
        1 => roots.push(Complex64::new(-coeffs[0], 0.0)),
        _ => {}
    }
    roots
}

/// All complex roots of a monic polynomial by Durand–Kerner iteration; fully
/// independent of any eigenvalue machinery. Residuals are verified before the
/// roots are returned.
pub fn roots_durand_kerner(coeffs_ascending: &[f64]) -> Vec<Complex64> {
    let n = coeffs_ascending.len();
    let coeffs: Vec<Complex64> =
        coeffs_ascending.iter().map(|&c| Complex64::new(c, 0.0)).collect();
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..n).map(|i| seed.powu(i as u32 + 1)).collect();
    let scale = 1.0 + coeffs_ascending.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    for zi in z.iter_mut() {
        *zi *= scale;
    }
    for _ in 0..600 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if j != i {
                    denom *= z[i] - z[j];
                }
            }
            let step = poly_eval_complex(&coeffs, z[i]) / denom;
            z[i] -= step;
            moved = moved.max(step.norm());
        }
        if moved < 1e-14 * scale {
            break;
        }
    }
    for &zi in &z {
        let resid = poly_eval_complex(&coeffs, zi).norm();
        assert!(
            resid < 1e-6 * scale.powi(n as i32),
            "Durand-Kerner residual {resid:.3e} too large"
        );
    }
    z
}

/// Greedy-match two complex multisets and return the largest pairwise
/// distance, relative to the magnitude scale.
pub fn spectra_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut remaining: Vec<Complex64> = b.to_vec();
    let scale = a
        .iter()
        .chain(b.iter())
        .fold(1.0f64, |m, z| m.max(z.norm()));
    let mut worst = 0.0f64;
    for &za in a {
        let (idx, dist) = remaining
            .iter()
            .enumerate()
            .map(|(i, &zb)| (i, (za - zb).norm()))
            .min_by(|x, y| x.1.partial_cmp(&y.1).unwrap())
            .expect("nonempty");
        worst = worst.max(dist / scale);
        remaining.swap_remove(idx);
    }
    worst
}

/// Companion matrix (controllable canonical form) of a monic polynomial with
/// ascending coefficients c: last row is [−c0, −c1, …].
pub fn companion(coeffs_ascending: &[f64]) -> Mat {
    let n = coeffs_ascending.len();
    Mat::from_fn(n, n, |i, j| {
        if i + 1 == n {
            -coeffs_ascending[j]
        } else if j == i + 1 {
            1.0
        } else {
            0.0
        }
    })
    .unwrap()
}
