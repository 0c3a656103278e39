//! Seeded workloads shared by the benchmarks.

use overlap_boost::{ClassLabel, Dataset};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `n` cases of `n_attr` attributes in `[0, 1]`, labelled by a noisy
/// linear rule so that the classes overlap near the boundary.
pub fn noisy_linear(n: usize, n_attr: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cases = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let x: Vec<f64> = (0..n_attr).map(|_| rng.random::<f64>()).collect();
        let s: f64 = x.iter().enumerate().map(|(i, v)| v * (i as f64 + 1.0)).sum::<f64>() / n_attr as f64;
        let noisy = s + rng.random_range(-0.15..0.15);
        labels.push(ClassLabel::from(if noisy > (n_attr as f64 + 1.0) / 4.0 { "hi" } else { "lo" }));
        cases.push(x);
    }
    Dataset::new((0..n_attr).map(|i| format!("x{i}")).collect(), cases, labels).expect("consistent shape")
}

/// Polylines with coordinates on a fine grid, for envelope construction.
pub fn polylines(n: usize, n_attr: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| (0..n_attr).map(|_| rng.random_range(0..1000) as f64 / 999.0).collect()).collect()
}
