//! Partial sums of trigonometric, Dirichlet and dilated series, maximal
//! functions, and the sawtooth examples.
//!
//! Within one evaluation point terms are always added in ascending index
//! order; parallel work is split across grid points only, so results do not
//! depend on the number of workers.

use std::f64::consts::PI;
use std::io::{self, Write};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::series::{APSeries, CoeffSeq, DilatedSeries, SampleGrid};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn check_len(n: usize, len: usize) -> Result<()> {
    if n > len {
        Err(Error::Index { index: n, len })
    } else {
        Ok(())
    }
}

/// `sum_{k=1}^{n} a_k e^{i lambda_k t}`; `n = 0` gives 0.
pub fn partial_sum(series: &APSeries, n: usize, t: f64) -> Result<Complex64> {
    check_len(n, series.len())?;
    Ok(partial_sum_unchecked(series.lambdas(), series.coeffs(), n, t))
}

#[inline]
pub(crate) fn partial_sum_unchecked(lambda: &[f64], a: &[Complex64], n: usize, t: f64) -> Complex64 {
    let mut acc = ZERO;
    for (&l, &c) in lambda[..n].iter().zip(&a[..n]) {
        acc += c * Complex64::cis(l * t);
    }
    acc
}

/// `max_{1<=N<=n_max} |S_N(t)|` and `S_{n_max}(t)` in one prefix pass.
#[inline]
pub(crate) fn prefix_max(lambda: &[f64], a: &[Complex64], n_max: usize, t: f64) -> (f64, Complex64) {
    let mut acc = ZERO;
    let mut best = 0.0f64;
    for (&l, &c) in lambda[..n_max].iter().zip(&a[..n_max]) {
        acc += c * Complex64::cis(l * t);
        best = best.max(acc.norm());
    }
    (best, acc)
}

/// Pointwise maximal function of the partial sums on a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaximalField {
    pub grid: SampleGrid,
    pub max_abs: Vec<f64>,
    pub final_sum: Vec<Complex64>,
    pub n_max: usize,
}

impl MaximalField {
    /// CSV rows `t,re,im,maxabs` with a header line.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "t,re,im,maxabs")?;
        for (i, (m, s)) in self.max_abs.iter().zip(&self.final_sum).enumerate() {
            writeln!(w, "{},{},{},{}", self.grid.at(i), s.re, s.im, m)?;
        }
        Ok(())
    }

    pub fn sup(&self) -> f64 {
        self.max_abs.iter().copied().fold(0.0, f64::max)
    }
}

/// Maximal field over `N = 1..=n_max`: cost O(n_max * grid.count), one pass per point.
pub fn maximal_field(series: &APSeries, grid: &SampleGrid, n_max: usize) -> Result<MaximalField> {
    if grid.count == 0 {
        return Err(Error::Empty("grid".into()));
    }
    if n_max == 0 {
        return Err(Error::range("n_max", 0.0, "must be at least 1"));
    }
    check_len(n_max, series.len())?;
    let (lambda, a) = (series.lambdas(), series.coeffs());
    let (max_abs, final_sum): (Vec<f64>, Vec<Complex64>) = (0..grid.count)
        .into_par_iter()
        .map(|i| prefix_max(lambda, a, n_max, grid.at(i)))
        .unzip();
    Ok(MaximalField {
        grid: *grid,
        max_abs,
        final_sum,
        n_max,
    })
}

/// `sum_{k=1}^{n} a_k k^{it}`, i.e. frequencies `ln k`.
pub fn dirichlet_partial_sum(coeff: &CoeffSeq, n: usize, t: f64) -> Result<Complex64> {
    check_len(n, coeff.len())?;
    Ok(dirichlet_unchecked(coeff.values(), n, t))
}

#[inline]
pub(crate) fn dirichlet_unchecked(a: &[Complex64], n: usize, t: f64) -> Complex64 {
    let mut acc = ZERO;
    for (k, &c) in a[..n].iter().enumerate() {
        acc += c * Complex64::cis(t * ((k + 1) as f64).ln());
    }
    acc
}

/// Value of a truncated dilated series with the l1 tail bound of the inner truncation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DilatedValue {
    pub value: Complex64,
    /// `(sum_{k<=n} |alpha_k|) * (sum_{j>J} |beta_j|)`
    pub tail_bound: f64,
}

/// `sum_{k=1}^{n} alpha_k D_J(lambda_k t)` with `D_J` the inner series cut at `J = inner_trunc`.
pub fn dilated_eval(ds: &DilatedSeries, n: usize, t: f64, inner_trunc: usize) -> Result<DilatedValue> {
    check_len(n, ds.outer_len())?;
    check_len(inner_trunc, ds.inner().len())?;
    let value = dilated_unchecked(ds, n, inner_trunc, t);
    let outer_l1: f64 = ds.outer_coeff().values()[..n].iter().map(|a| a.norm()).sum();
    let tail: f64 = ds.inner().coeffs()[inner_trunc..].iter().map(|b| b.norm()).sum();
    Ok(DilatedValue {
        value,
        tail_bound: outer_l1 * tail,
    })
}

fn dilated_unchecked(ds: &DilatedSeries, n: usize, inner_trunc: usize, t: f64) -> Complex64 {
    let (mu, beta) = (ds.inner().lambdas(), ds.inner().coeffs());
    let mut acc = ZERO;
    for (&l, &alpha) in ds.outer_freq().values()[..n].iter().zip(&ds.outer_coeff().values()[..n]) {
        acc += alpha * partial_sum_unchecked(mu, beta, inner_trunc, l * t);
    }
    acc
}

/// `max_{N<=n_max} |sum_{k<=N} alpha_k D_J(lambda_k t)|`.
fn dilated_prefix_max(ds: &DilatedSeries, n_max: usize, inner_trunc: usize, t: f64) -> f64 {
    let (mu, beta) = (ds.inner().lambdas(), ds.inner().coeffs());
    let mut acc = ZERO;
    let mut best = 0.0f64;
    for (&l, &alpha) in ds.outer_freq().values()[..n_max]
        .iter()
        .zip(&ds.outer_coeff().values()[..n_max])
    {
        acc += alpha * partial_sum_unchecked(mu, beta, inner_trunc, l * t);
        best = best.max(acc.norm());
    }
    best
}

/// Anything whose squared modulus can be sampled pointwise.
pub trait Signal: Sync {
    fn modulus_sq(&self, t: f64) -> f64;
}

impl Signal for APSeries {
    fn modulus_sq(&self, t: f64) -> f64 {
        partial_sum_unchecked(self.lambdas(), self.coeffs(), self.len(), t).norm_sqr()
    }
}

/// Wraps a complex-valued closure.
pub struct FnSignal<F>(pub F);

impl<F: Fn(f64) -> Complex64 + Sync> Signal for FnSignal<F> {
    fn modulus_sq(&self, t: f64) -> f64 {
        (self.0)(t).norm_sqr()
    }
}

/// `t -> sup_{N<=n_max} |S_N(t)|`, evaluated on demand.
pub struct MaximalSignal<'a> {
    pub series: &'a APSeries,
    pub n_max: usize,
}

impl<'a> MaximalSignal<'a> {
    pub fn new(series: &'a APSeries, n_max: usize) -> Result<Self> {
        if n_max == 0 {
            return Err(Error::range("n_max", 0.0, "must be at least 1"));
        }
        check_len(n_max, series.len())?;
        Ok(Self { series, n_max })
    }
}

impl Signal for MaximalSignal<'_> {
    fn modulus_sq(&self, t: f64) -> f64 {
        let (m, _) = prefix_max(self.series.lambdas(), self.series.coeffs(), self.n_max, t);
        m * m
    }
}

/// `t -> sup_{N<=n_max} |sum_{k<=N} alpha_k D_J(lambda_k t)|`.
pub struct DilatedMaximalSignal<'a> {
    pub series: &'a DilatedSeries,
    pub n_max: usize,
    pub inner_trunc: usize,
}

impl<'a> DilatedMaximalSignal<'a> {
    pub fn new(series: &'a DilatedSeries, n_max: usize, inner_trunc: usize) -> Result<Self> {
        if n_max == 0 {
            return Err(Error::range("n_max", 0.0, "must be at least 1"));
        }
        check_len(n_max, series.outer_len())?;
        check_len(inner_trunc, series.inner().len())?;
        Ok(Self {
            series,
            n_max,
            inner_trunc,
        })
    }
}

impl Signal for DilatedMaximalSignal<'_> {
    fn modulus_sq(&self, t: f64) -> f64 {
        let m = dilated_prefix_max(self.series, self.n_max, self.inner_trunc, t);
        m * m
    }
}

/// `x - floor(x) - 1/2`, in `[-1/2, 1/2)`.
pub fn sawtooth_psi(x: f64) -> f64 {
    x - x.floor() - 0.5
}

/// `sum_{j=1}^{j_max} sin(2 pi j x) / j`, the sine series exactly as it is
/// usually quoted next to the sawtooth. Its limit is `pi * (1/2 - {x})`, i.e.
/// `-pi * sawtooth_psi(x)` away from the integers.
pub fn sine_series_partial(x: f64, j_max: usize) -> f64 {
    let mut acc = 0.0;
    for j in 1..=j_max {
        let jf = j as f64;
        acc += (2.0 * PI * jf * x).sin() / jf;
    }
    acc
}

/// Sine series normalized to converge to `sawtooth_psi`:
/// `-(1/pi) sum_{j=1}^{j_max} sin(2 pi j x) / j`.
pub fn psi_series_partial(x: f64, j_max: usize) -> f64 {
    -sine_series_partial(x, j_max) / PI
}

/// True when `alpha` lies in `(1/2, 1]`, the range where `Phi_alpha` is known to converge a.e.
pub fn alpha_in_range(alpha: f64) -> bool {
    alpha > 0.5 && alpha <= 1.0
}

/// `Phi_alpha(x) = sum_{k=1}^{k_max} psi(k x) / k^alpha`.
///
/// Any finite `alpha` is accepted; callers may warn with [`alpha_in_range`].
pub fn phi_alpha(x: f64, alpha: f64, k_max: usize) -> f64 {
    let mut acc = 0.0;
    for k in 1..=k_max {
        let kf = k as f64;
        acc += sawtooth_psi(kf * x) / kf.powf(alpha);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::StreamRng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn partial_sum_examples() {
        let s = APSeries::from_parts(&[1.0], &[c(1.0, 0.0)]).unwrap();
        assert_eq!(partial_sum(&s, 1, 0.0).unwrap(), c(1.0, 0.0));
        assert_eq!(partial_sum(&s, 0, 3.0).unwrap(), c(0.0, 0.0));
        assert!(partial_sum(&s, 2, 0.0).is_err());

        let s = APSeries::from_parts(&[1.0, 2.0], &[c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!(partial_sum(&s, 2, PI).unwrap().norm() < 1e-15);
    }

    #[test]
    fn partial_sum_matches_term_oracle() {
        // Term-by-term oracle from explicit cos/sin of the phases.
        let s = APSeries::from_parts(&[1.0, 2.0, 3.0], &[c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0)]).unwrap();
        let t = 0.7f64;
        let oracle = c((0.7f64).cos(), (0.7f64).sin())
            + c(0.0, 1.0) * c((1.4f64).cos(), (1.4f64).sin())
            - c((2.1f64).cos(), (2.1f64).sin());
        let v = partial_sum(&s, 3, t).unwrap();
        assert!((v - oracle).norm() < 1e-12, "{v} vs {oracle}");
    }

    #[test]
    fn prefix_consistency_is_exact() {
        let mut rng = StreamRng::new(3, 0);
        let lambda: Vec<f64> = (1..=50).map(|k| k as f64 * 0.37).collect();
        let a: Vec<Complex64> = (0..50).map(|_| rng.complex(1.0)).collect();
        let s = APSeries::from_parts(&lambda, &a).unwrap();
        for n in 1..=50 {
            let t = 1.234;
            let lhs = partial_sum(&s, n, t).unwrap();
            let rhs = partial_sum(&s, n - 1, t).unwrap() + a[n - 1] * Complex64::cis(lambda[n - 1] * t);
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn maximal_field_examples() {
        let grid = SampleGrid::new(0.0, 10.0, 0.1).unwrap();
        let s = APSeries::from_parts(&[2.5], &[c(0.0, 3.0)]).unwrap();
        let f = maximal_field(&s, &grid, 1).unwrap();
        assert!(f.max_abs.iter().all(|&m| (m - 3.0).abs() < 1e-15));

        let s = APSeries::from_parts(&[1.0, 1.0], &[c(1.0, 0.0), c(-1.0, 0.0)]).unwrap();
        let f = maximal_field(&s, &grid, 2).unwrap();
        assert!(f.max_abs.iter().all(|&m| (m - 1.0).abs() < 1e-15));
        assert!(f.final_sum.iter().all(|z| z.norm() == 0.0));

        assert!(maximal_field(&s, &grid, 3).is_err());
        assert!(maximal_field(&s, &grid, 0).is_err());
    }

    #[test]
    fn maximal_field_matches_brute_force() {
        let mut rng = StreamRng::new(11, 0);
        let mut lambda: Vec<f64> = (0..64).map(|_| rng.uniform(0.0, 40.0)).collect();
        lambda.sort_by(f64::total_cmp);
        let a: Vec<Complex64> = (0..64).map(|_| rng.complex(1.0)).collect();
        let s = APSeries::from_parts(&lambda, &a).unwrap();
        let grid = SampleGrid::new(0.0, 10.0, 0.01).unwrap();
        let f = maximal_field(&s, &grid, 64).unwrap();
        for (i, t) in grid.points().enumerate() {
            // Every prefix recomputed from scratch.
            let brute = (1..=64)
                .map(|n| partial_sum(&s, n, t).unwrap().norm())
                .fold(0.0, f64::max);
            assert!((f.max_abs[i] - brute).abs() <= 1e-12 * brute.max(1.0));
            assert!(f.max_abs[i] >= f.final_sum[i].norm());
            assert!(f.max_abs[i] >= a[0].norm());
        }
    }

    #[test]
    fn maximal_field_csv() {
        let s = APSeries::from_parts(&[1.0], &[c(1.0, 0.0)]).unwrap();
        let f = maximal_field(&s, &SampleGrid::new(0.0, 0.5, 0.5).unwrap(), 1).unwrap();
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t,re,im,maxabs");
        assert_eq!(lines[1], "0,1,0,1");
        assert_eq!(lines.len(), 3);
    }

    #[test]
    fn dirichlet_examples() {
        let a = CoeffSeq::from_real(&[1.0]);
        assert_eq!(dirichlet_partial_sum(&a, 1, 17.0).unwrap(), c(1.0, 0.0));
        let a = CoeffSeq::from_real(&[0.0, 1.0]);
        let v = dirichlet_partial_sum(&a, 2, PI / 2f64.ln()).unwrap();
        assert!((v - c(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn dirichlet_agrees_with_log_frequencies() {
        let mut rng = StreamRng::new(5, 0);
        let a: Vec<Complex64> = (0..100).map(|_| rng.complex(1.0)).collect();
        let lambda: Vec<f64> = (1..=100).map(|k| (k as f64).ln()).collect();
        let s = APSeries::from_parts(&lambda, &a).unwrap();
        let coeff = CoeffSeq::new(a);
        for i in 0..=100 {
            let t = 0.1 * i as f64;
            let d = dirichlet_partial_sum(&coeff, 100, t).unwrap();
            let p = partial_sum(&s, 100, t).unwrap();
            assert!((d - p).norm() < 1e-12);
        }
    }

    #[test]
    fn dilated_examples() {
        let inner = APSeries::from_parts(&[1.0], &[c(1.0, 0.0)]).unwrap();
        let outer = APSeries::from_parts(&[2.0], &[c(1.0, 0.0)]).unwrap();
        let ds = DilatedSeries::from_series(outer, inner);
        let v = dilated_eval(&ds, 1, 0.3, 1).unwrap();
        assert!((v.value - Complex64::cis(0.6)).norm() < 1e-15);
        assert_eq!(v.tail_bound, 0.0);

        let inner = APSeries::from_parts(&[1.0, 2.0], &[c(1.0, 0.0), c(0.5, 0.0)]).unwrap();
        let outer = APSeries::from_parts(&[1.0, 2.0], &[c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        let ds = DilatedSeries::from_series(outer, inner);
        assert_eq!(dilated_eval(&ds, 2, 0.0, 2).unwrap().value, c(3.0, 0.0));
        let cut = dilated_eval(&ds, 2, 0.0, 1).unwrap();
        assert_eq!(cut.value, c(2.0, 0.0));
        assert_eq!(cut.tail_bound, 2.0 * 0.5);
        assert!(dilated_eval(&ds, 3, 0.0, 1).is_err());
        assert!(dilated_eval(&ds, 1, 0.0, 3).is_err());
    }

    #[test]
    fn dilated_matches_double_loop() {
        let mut rng = StreamRng::new(8, 0);
        let mu: Vec<f64> = (1..=6).map(|k| k as f64 + rng.uniform(0.0, 0.4)).collect();
        let beta: Vec<Complex64> = (0..6).map(|_| rng.complex(1.0)).collect();
        let lam: Vec<f64> = (1..=9).map(|k| 1.0 + 0.7 * k as f64).collect();
        let alpha: Vec<Complex64> = (0..9).map(|_| rng.complex(1.0)).collect();
        let ds = DilatedSeries::from_series(
            APSeries::from_parts(&lam, &alpha).unwrap(),
            APSeries::from_parts(&mu, &beta).unwrap(),
        );
        for &t in &[0.0, 0.37, 2.5, -4.0] {
            let mut oracle = c(0.0, 0.0);
            for k in 0..9 {
                for j in 0..4 {
                    oracle += alpha[k] * beta[j] * Complex64::cis(mu[j] * lam[k] * t);
                }
            }
            let v = dilated_eval(&ds, 9, t, 4).unwrap();
            assert!((v.value - oracle).norm() < 1e-12);
            // The truncated tail stays inside the reported bound.
            let full = dilated_eval(&ds, 9, t, 6).unwrap().value;
            assert!((full - v.value).norm() <= v.tail_bound + 1e-12);
        }
    }

    #[test]
    fn periodicity_for_integer_frequencies() {
        let mut rng = StreamRng::new(2, 0);
        let lambda: Vec<f64> = (1..=30).map(|k| k as f64).collect();
        let a: Vec<Complex64> = (0..30).map(|_| rng.complex(1.0)).collect();
        let s = APSeries::from_parts(&lambda, &a).unwrap();
        for i in 0..50 {
            let t = 0.13 * i as f64;
            let d = partial_sum(&s, 30, t).unwrap() - partial_sum(&s, 30, t + 2.0 * PI).unwrap();
            assert!(d.norm() < 1e-10);
        }
    }

    #[test]
    fn sawtooth_fixtures() {
        assert_eq!(sawtooth_psi(0.25), -0.25);
        assert_eq!(sawtooth_psi(3.0), -0.5);
        assert_eq!(sawtooth_psi(-0.25), 0.25);
    }

    #[test]
    fn sine_series_normalization() {
        for j in [1, 10, 1000] {
            assert!(psi_series_partial(0.5, j).abs() < 1e-12);
            assert_eq!(psi_series_partial(0.0, j), 0.0);
        }
        // The unnormalized series tends to pi/4 at x = 1/4, the normalized one to psi(1/4).
        let raw = sine_series_partial(0.25, 10_000);
        assert!((raw - PI / 4.0).abs() < 1e-3);
        assert!((psi_series_partial(0.25, 10_000) - sawtooth_psi(0.25)).abs() < 1e-2);
        assert!((raw - sawtooth_psi(0.25)).abs() > 1.0);
    }

    #[test]
    fn phi_alpha_examples() {
        assert_eq!(phi_alpha(0.5, 1.0, 4), -0.375);
        let alpha = 0.8;
        let closed: f64 = -(1..=50).map(|k| 0.5 / (k as f64).powf(alpha)).sum::<f64>();
        assert!((phi_alpha(3.0, alpha, 50) - closed).abs() < 1e-12);
        assert!(alpha_in_range(0.75) && alpha_in_range(1.0));
        assert!(!alpha_in_range(0.5) && !alpha_in_range(1.5));

        let x = 0.318_309_886;
        let mut oracle = 0.0;
        for k in 1..=1000usize {
            let kx = k as f64 * x;
            oracle += (kx - kx.floor() - 0.5) * (k as f64).powf(-0.75);
        }
        assert!((phi_alpha(x, 0.75, 1000) - oracle).abs() < 1e-12);
    }
}
