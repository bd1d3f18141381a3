#![allow(dead_code)]

use hwm_core::{random_valid_datum, Datum, SearchOptions, Spin, Tolerances};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn tol() -> Tolerances<f64> {
    Tolerances::default()
}

pub fn zhat() -> Spin {
    Spin::real([0.0, 0.0, 1.0])
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seeded valid datum with `n` poles.
pub fn datum(n: usize, seed: u64) -> Datum {
    random_valid_datum(n, &mut rng(seed), &SearchOptions::default()).expect("search converges")
}

/// `‖a − b‖ / max(1, ‖b‖)` for anything reducible to a max-norm.
pub fn rel(diff: f64, scale: f64) -> f64 {
    diff / scale.max(1.0)
}

pub fn report(id: u32, name: &str, pass: bool, detail: String) {
    println!(
        "criterion {id:>2} {name}: {} ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
}
