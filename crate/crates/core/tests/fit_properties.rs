// Copyright 2026 The commhash Authors
// SPDX-License-Identifier: Apache-2.0

use commhash::bench::linear_fit;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

/// Recovered coefficients stay within 3σ of truth under uniform noise.
#[test]
fn fit_recovers_noisy_line() {
    let (s, c, eps) = (0.008, -0.733, 0.05);
    let xs: Vec<f64> = (2..=14).map(|e| f64::from(1u32 << e)).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sigma = eps / 3f64.sqrt();
    let sd_slope = sigma / sxx.sqrt();
    let sd_intercept = sigma * (1.0 / n + mx * mx / sxx).sqrt();

    let mut rng = ChaCha20Rng::seed_from_u64(300);
    for _ in 0..100 {
        let pts: Vec<(f64, f64)> = xs.iter().map(|&x| (x, s * x + c + rng.gen_range(-eps..eps))).collect();
        let fit = linear_fit(&pts).unwrap();
        assert!((fit.slope - s).abs() <= 3.0 * sd_slope, "slope {}", fit.slope);
        assert!((fit.intercept - c).abs() <= 3.0 * sd_intercept, "intercept {}", fit.intercept);
        assert!((0.0..=1.0).contains(&fit.r_squared));
    }
}
