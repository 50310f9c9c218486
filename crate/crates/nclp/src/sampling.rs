//! Seeded random inputs for statistical checks.
//!
//! Streams are split with ChaCha8's counter-based stream mechanism: a base
//! seed fixes the generator and each trial index selects an independent
//! stream, so trials can fan out concurrently and still reproduce
//! bit-identically for a given `(seed, trial)` pair.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
pub use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::density::Density;
use crate::mat::CMat;

/// Uniform draw in `[0, 1)`.
pub fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    rng.gen()
}

/// Independent generator for one trial of one experiment.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Standard complex Gaussian entries (real and imaginary parts N(0, 1/2)).
pub fn gaussian_matrix(rng: &mut ChaCha8Rng, n: usize) -> CMat {
    CMat::from_fn(n, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    })
    .expect("gaussian entries are finite")
}

pub fn gaussian_hermitian(rng: &mut ChaCha8Rng, n: usize) -> CMat {
    let g = gaussian_matrix(rng, n);
    (&g + &g.adjoint()).scale_re(0.5)
}

/// Haar-ish random unitary from the QR sign-fixed Gram-Schmidt of a Gaussian.
pub fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> CMat {
    let g = gaussian_matrix(rng, n);
    let mut cols: Vec<Vec<Complex64>> = (0..n).map(|j| (0..n).map(|i| g[(i, j)]).collect()).collect();
    for j in 0..n {
        for k in 0..j {
            let proj: Complex64 = (0..n).map(|i| cols[k][i].conj() * cols[j][i]).sum();
            let prev = cols[k].clone();
            for (z, c) in cols[j].iter_mut().zip(&prev) {
                *z -= proj * c;
            }
        }
        let norm: f64 = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in cols[j].iter_mut() {
            *z /= norm;
        }
    }
    CMat::from_fn(n, |i, j| cols[j][i]).expect("orthonormalized columns are finite")
}

/// Random density with condition number at most `cond_max`: Haar-ish basis,
/// log-uniform spectrum in `[1, cond_max]`, sorted ascending.
pub fn random_density(rng: &mut ChaCha8Rng, n: usize, cond_max: f64) -> Density {
    let basis = random_unitary(rng, n);
    let mut values: Vec<f64> = (0..n)
        .map(|_| (rng.gen::<f64>() * cond_max.ln()).exp())
        .collect();
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    // pin the spread so the realized condition number is representative
    values[0] = 1.0;
    if n > 1 {
        let last = values.len() - 1;
        values[last] = values[last].max(1.0);
    }
    Density::from_parts(values, basis).expect("constructed spectrum is positive ascending")
}

/// Positive sequence, log-uniform in `[1, spread]`.
pub fn positive_sequence(rng: &mut ChaCha8Rng, n: usize, spread: f64) -> Vec<f64> {
    (0..n).map(|_| (rng.gen::<f64>() * spread.ln()).exp()).collect()
}

/// Nondecreasing positive sequence (sorted log-uniform draw).
pub fn nondecreasing_sequence(rng: &mut ChaCha8Rng, n: usize, spread: f64) -> Vec<f64> {
    let mut v = positive_sequence(rng, n, spread);
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}
