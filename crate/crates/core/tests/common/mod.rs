#![allow(dead_code)]

use harmonic_census::theorem::critical_values_closed_form;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Log-uniform `a` in `(1, n(n+1))`, at relative distance at least `margin`
/// from every critical value.
pub fn non_critical_a(rng: &mut ChaCha8Rng, n: u32, margin: f64) -> f64 {
    let table = critical_values_closed_form(n).unwrap();
    let hi = f64::from(n * (n + 1)).ln();
    loop {
        let a = rng.gen_range(0.0..hi).exp();
        if a > 1.0 + margin && table.critical_values().all(|c| (a - c).abs() > margin * c) {
            return a;
        }
    }
}

/// One parameter in each open interval between consecutive critical values,
/// the last interval capped at `n(n+1)`.
pub fn interval_samples(n: u32) -> Vec<f64> {
    let table = critical_values_closed_form(n).unwrap();
    let mut edges = vec![1.0];
    edges.extend(table.critical_values());
    edges.push(f64::from(n * (n + 1)));
    edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
}
