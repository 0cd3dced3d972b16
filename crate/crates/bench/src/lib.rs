//! Shared fixtures for the selection benchmarks.

use simplesel::harness::{sample, Dist};
use simplesel::raster::{add_salt_pepper, gradient, Raster};
use simplesel::MersenneTwister;

/// Uniform data of length `n`, reproducible from `seed`.
pub fn uniform(n: usize, seed: u32) -> Vec<f64> {
    let mut rng = MersenneTwister::new(seed);
    sample(Dist::Uniform, n, &mut rng).expect("uniform is always valid")
}

/// Lognormal(0, 1) data, the skewed input used for the medcouple.
pub fn lognormal(n: usize, seed: u32) -> Vec<f64> {
    let mut rng = MersenneTwister::new(seed);
    sample(Dist::LogNormal { mu: 0.0, sigma: 1.0 }, n, &mut rng).expect("lognormal(0, 1) is valid")
}

/// Value and weight columns with weights in [0, 1).
pub fn weighted(n: usize, seed: u32) -> (Vec<f64>, Vec<f64>) {
    let mut rng = MersenneTwister::new(seed);
    let v = sample(Dist::Uniform, n, &mut rng).unwrap();
    let w = sample(Dist::Uniform, n, &mut rng).unwrap();
    (v, w)
}

/// Gradient image with salt-and-pepper noise at rate 0.2.
pub fn noisy_image(side: usize, channels: usize, seed: u32) -> Raster {
    let mut rng = MersenneTwister::new(seed);
    add_salt_pepper(&gradient(side, side, channels), 0.2, &mut rng).expect("valid noise rate")
}

/// Reference k-th smallest by full sort.
pub fn sort_select(data: &mut [f64], k: usize) -> f64 {
    data.sort_unstable_by(f64::total_cmp);
    data[k - 1]
}
