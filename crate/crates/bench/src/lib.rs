//! Seeded instance generators shared by the benchmarks.

use apfourier::rng::StreamRng;
use apfourier::{APSeries, CoeffSeq, Complex64, FrequencySeq};

/// Random nondecreasing frequencies in `[0, span)` with unit-disc coefficients.
pub fn random_series(n: usize, span: f64, seed: u64) -> APSeries {
    let mut rng = StreamRng::new(seed, 0);
    let mut lambda: Vec<f64> = (0..n).map(|_| rng.uniform(0.0, span)).collect();
    lambda.sort_by(f64::total_cmp);
    let a: Vec<Complex64> = (0..n)
        .map(|_| Complex64::from_polar(rng.unit(), rng.uniform(0.0, std::f64::consts::TAU)))
        .collect();
    APSeries::from_parts(&lambda, &a).expect("valid instance")
}

/// Frequencies on a grid of eighths, so ties and unit differences occur.
pub fn lattice_frequencies(n: usize, seed: u64) -> FrequencySeq {
    let mut rng = StreamRng::new(seed, 1);
    let mut v: Vec<f64> = (0..n).map(|_| (rng.next_u64() % (8 * n as u64)) as f64 / 8.0).collect();
    v.sort_by(f64::total_cmp);
    FrequencySeq::explicit(v).expect("valid frequencies")
}

pub fn random_coeffs(n: usize, seed: u64) -> CoeffSeq {
    let mut rng = StreamRng::new(seed, 2);
    CoeffSeq::new(
        (0..n)
            .map(|_| Complex64::new(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)) / (1.0 + (n as f64).ln()))
            .collect(),
    )
}
