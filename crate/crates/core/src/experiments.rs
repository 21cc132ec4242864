//! Seeded Monte-Carlo studies: random Dirichlet polynomials with Rademacher
//! signs, the divergent-Wiener example with convergent Stepanov differences,
//! and empirical ratios for the maximal inequalities.
//!
//! Trial `r` draws from stream `r` of the run seed, so results are identical
//! for any number of worker threads.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::conditions::{block_sums, check_interpolation_pair, dyadic_blocks, power_sum, trend, Trend, INTERP_TOL};
use crate::error::{Error, Result};
use crate::evaluator::{DilatedMaximalSignal, MaximalSignal};
use crate::norms::{stepanov_norm, StepanovParams};
use crate::rng::StreamRng;
use crate::series::{validate, validate_dilated, APSeries, CoeffSeq, DilatedSeries, SampleGrid, Usage};

pub fn default_halasz_grid() -> SampleGrid {
    SampleGrid::new(0.0, 200.0, 0.005).expect("valid default grid")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialReport {
    pub seed: u64,
    pub trials: usize,
    pub grid: SampleGrid,
    pub n_values: Vec<usize>,
    /// Mean over trials of `max_grid |sum_{k<=n} eps_k k^{it}|`.
    pub estimates: Vec<f64>,
    /// `estimate * ln(n + 1) / n`
    pub ratios: Vec<f64>,
    /// Grid maxima per `n` (outer) and trial (inner).
    pub per_trial: Vec<Vec<f64>>,
    /// The grid maximum is a lower bound for the supremum over the real line.
    pub lower_bound_only: bool,
}

/// Rademacher signs `eps_1..eps_n` of one trial.
pub fn rademacher_signs(seed: u64, trial: u64, n: usize) -> Vec<f64> {
    let mut rng = StreamRng::new(seed, trial);
    (0..n).map(|_| rng.rademacher()).collect()
}

pub fn halasz_experiment(n_list: &[usize], trials: usize, grid: &SampleGrid, seed: u64) -> Result<TrialReport> {
    if trials == 0 {
        return Err(Error::range("trials", 0.0, "must be at least 1"));
    }
    if n_list.is_empty() {
        return Err(Error::Empty("n list".into()));
    }
    if let Some(&n) = n_list.iter().find(|&&n| n == 0) {
        return Err(Error::range("n", n as f64, "must be at least 1"));
    }
    let mut order: Vec<usize> = n_list.to_vec();
    order.sort_unstable();
    order.dedup();
    let n_max = *order.last().unwrap();
    let eps: Vec<Vec<f64>> = (0..trials).map(|r| rademacher_signs(seed, r as u64, n_max)).collect();
    let logs: Vec<f64> = (1..=n_max).map(|k| (k as f64).ln()).collect();
    let width = order.len();

    // Max is exact and order independent, so the parallel reduction is deterministic.
    let maxima = (0..grid.count)
        .into_par_iter()
        .fold(
            || vec![0.0f64; trials * width],
            |mut best, i| {
                let t = grid.at(i);
                let phases: Vec<Complex64> = logs.iter().map(|l| Complex64::cis(t * l)).collect();
                for (r, e) in eps.iter().enumerate() {
                    let mut acc = Complex64::new(0.0, 0.0);
                    let mut slot = 0;
                    for (k, (&s, &z)) in e.iter().zip(&phases).enumerate() {
                        acc += s * z;
                        if k + 1 == order[slot] {
                            let b = &mut best[r * width + slot];
                            *b = b.max(acc.norm());
                            slot += 1;
                            if slot == width {
                                break;
                            }
                        }
                    }
                }
                best
            },
        )
        .reduce(
            || vec![0.0f64; trials * width],
            |a, b| a.iter().zip(&b).map(|(x, y)| x.max(*y)).collect(),
        );

    let mut estimates = Vec::with_capacity(n_list.len());
    let mut ratios = Vec::with_capacity(n_list.len());
    let mut per_trial = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let slot = order.binary_search(&n).unwrap();
        let column: Vec<f64> = (0..trials).map(|r| maxima[r * width + slot]).collect();
        let mean = column.iter().sum::<f64>() / trials as f64;
        estimates.push(mean);
        ratios.push(mean * ((n + 1) as f64).ln() / n as f64);
        per_trial.push(column);
    }
    Ok(TrialReport {
        seed,
        trials,
        grid: *grid,
        n_values: n_list.to_vec(),
        estimates,
        ratios,
        per_trial,
        lower_bound_only: true,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Prop27Params {
    /// Largest `j` for which the Stepanov norm of `S_{2^{j+1}} - S_{2^j}` is estimated.
    pub max_block: u32,
    pub stepanov: StepanovParams,
}

impl Default for Prop27Params {
    fn default() -> Self {
        Self {
            max_block: 10,
            stepanov: StepanovParams {
                x_min: 0.0,
                x_max: 10.0,
                ..StepanovParams::default()
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WithinBlock {
    pub n: u32,
    /// `sum_{l=2^n}^{2^{n+1}} 1 / (l sqrt(ln(l+1)))`
    pub sum: f64,
    /// `2 / sqrt(n)`
    pub bound: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlockDifference {
    pub j: u32,
    /// Stepanov estimate of `S_{2^{j+1}} - S_{2^j}`.
    pub stepanov: f64,
    /// l1 norm of the coefficients in the difference, an upper bound for the sup norm.
    pub l1: f64,
    /// `2 / sqrt(j)` for `j >= 1`.
    pub bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prop27Report {
    pub seed: u64,
    pub n_max: usize,
    /// `B_n^2` over complete dyadic index blocks `2^n <= k < 2^{n+1}`.
    pub wiener_blocks: Vec<f64>,
    pub wiener_cumulative: Vec<f64>,
    /// `(total - cumulative at half) / total`
    pub last_half_fraction: f64,
    pub trend: Trend,
    pub within_block: Vec<WithinBlock>,
    pub within_block_holds: bool,
    pub differences: Vec<BlockDifference>,
    pub params: Prop27Params,
}

/// `a_n = eps_n / (n sqrt(ln(n+1)))`, `n = 1..=n_max`.
pub fn prop27_coefficients(n_max: usize, seed: u64) -> CoeffSeq {
    let eps = rademacher_signs(seed, 0, n_max);
    CoeffSeq::from_real(
        &eps.iter()
            .enumerate()
            .map(|(k, e)| {
                let n = (k + 1) as f64;
                e / (n * (n + 1.0).ln().sqrt())
            })
            .collect::<Vec<_>>(),
    )
}

/// Deterministic check of `sum_{l=2^n}^{2^{n+1}} 1/(l sqrt(ln(l+1))) <= 2/sqrt(n)` for `n = 1..=n_top`.
pub fn prop27_within_block(n_top: u32) -> Vec<WithinBlock> {
    (1..=n_top)
        .map(|n| {
            let lo = 1u64 << n;
            let sum: f64 = (lo..=2 * lo)
                .map(|l| {
                    let lf = l as f64;
                    1.0 / (lf * (lf + 1.0).ln().sqrt())
                })
                .sum();
            let bound = 2.0 / (n as f64).sqrt();
            WithinBlock {
                n,
                sum,
                bound,
                holds: sum <= bound,
            }
        })
        .collect()
}

pub fn prop27_experiment(n_max: usize, seed: u64, params: &Prop27Params) -> Result<Prop27Report> {
    if n_max < 1 << 10 {
        return Err(Error::range("n_max", n_max as f64, "must be at least 2^10"));
    }
    let coeff = prop27_coefficients(n_max, seed);
    let complete = (usize::BITS - 1 - (n_max + 1).leading_zeros()) as usize;
    let wiener_blocks: Vec<f64> = dyadic_blocks(&coeff)
        .into_iter()
        .take(complete)
        .map(|b| b * b)
        .collect();
    let mut acc = 0.0;
    let wiener_cumulative: Vec<f64> = wiener_blocks
        .iter()
        .map(|b| {
            acc += b;
            acc
        })
        .collect();
    let len = wiener_cumulative.len();
    let total = wiener_cumulative[len - 1];
    let last_half_fraction = (total - wiener_cumulative[len / 2 - 1]) / total;

    let within_block = prop27_within_block(16);
    let within_block_holds = within_block.iter().all(|w| w.holds);

    let lambda: Vec<f64> = (1..=n_max).map(|k| (k as f64).ln()).collect();
    let top = params.max_block.min(complete.saturating_sub(1) as u32);
    let differences = (0..=top)
        .map(|j| {
            let lo = 1usize << j;
            let hi = 2 * lo;
            let part = APSeries::from_parts(&lambda[lo..hi], &coeff.values()[lo..hi])?;
            let norm = stepanov_norm(&part, &params.stepanov)?;
            Ok(BlockDifference {
                j,
                stepanov: norm.value,
                l1: part.coeff().l1(),
                bound: (j >= 1).then(|| 2.0 / (j as f64).sqrt()),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(Prop27Report {
        seed,
        n_max,
        trend: trend(&wiener_cumulative),
        wiener_blocks,
        wiener_cumulative,
        last_half_fraction,
        within_block,
        within_block_holds,
        differences,
        params: *params,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Inequality {
    /// General frequencies, Wiener-type right-hand side.
    Gen,
    /// Dilated series with l1 inner coefficients.
    Dilated,
    /// Dilated series, `(p, q)` interpolation.
    Interp { p: f64, q: f64 },
}

impl Inequality {
    pub fn name(&self) -> &'static str {
        match self {
            Inequality::Gen => "gen",
            Inequality::Dilated => "dilated",
            Inequality::Interp { .. } => "interp",
        }
    }
}

/// Random instance generator. Frequencies are uniform on the given ranges
/// (then sorted), coefficients have uniform modulus below `coeff_max` and
/// uniform phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeneratorConfig {
    pub n: usize,
    pub freq_range: (f64, f64),
    pub coeff_max: f64,
    pub inner_n: usize,
    pub inner_freq_range: (f64, f64),
    pub stepanov: StepanovParams,
}

impl GeneratorConfig {
    pub fn for_inequality(ineq: Inequality) -> Self {
        let stepanov = StepanovParams {
            x_min: 0.0,
            x_max: 20.0,
            ..StepanovParams::default()
        };
        match ineq {
            Inequality::Gen => Self {
                n: 128,
                freq_range: (0.0, 32.0),
                coeff_max: 1.0,
                inner_n: 0,
                inner_freq_range: (1.0, 1.0),
                stepanov,
            },
            Inequality::Dilated | Inequality::Interp { .. } => Self {
                n: 32,
                freq_range: (1.0, 9.0),
                coeff_max: 1.0,
                inner_n: 8,
                inner_freq_range: (1.0, 5.0),
                stepanov,
            },
        }
    }
}

fn random_series(rng: &mut StreamRng, n: usize, range: (f64, f64), coeff_max: f64) -> Result<APSeries> {
    let mut lambda: Vec<f64> = (0..n).map(|_| rng.uniform(range.0, range.1)).collect();
    lambda.sort_by(f64::total_cmp);
    let a: Vec<Complex64> = (0..n).map(|_| rng.complex(coeff_max)).collect();
    APSeries::from_parts(&lambda, &a)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrialRatio {
    pub trial: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantReport {
    pub inequality: Inequality,
    pub seed: u64,
    pub generator: GeneratorConfig,
    pub trials: Vec<TrialRatio>,
    pub max_ratio: f64,
    /// LHS is a lower-bound estimate, so every ratio is conservative.
    pub lower_bound_only: bool,
}

fn finite_positive(what: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::Inadmissible(format!("{what} = {v}")))
    }
}

/// `(LHS, RHS)` for one series instance under the general-frequency inequality.
pub fn gen_sides(series: &APSeries, params: &StepanovParams) -> Result<(f64, f64)> {
    if let Some(d) = validate(series, Usage::Plain).first() {
        return Err(Error::Inadmissible(d.to_string()));
    }
    let rhs = finite_positive("rhs", power_sum(&block_sums(series)?, 2.0)?.sqrt())?;
    let lhs = stepanov_norm(&MaximalSignal::new(series, series.len())?, params)?.value;
    Ok((lhs, rhs))
}

/// `(LHS, RHS)` for a dilated instance; `Interp` uses the `(p, q)` right-hand side.
pub fn dilated_sides(ds: &DilatedSeries, ineq: Inequality, params: &StepanovParams) -> Result<(f64, f64)> {
    if let Some(d) = validate_dilated(ds).first() {
        return Err(Error::Inadmissible(d.to_string()));
    }
    let outer = block_sums(&ds.outer_series())?;
    let rhs = match ineq {
        Inequality::Interp { p, q } => {
            if !check_interpolation_pair(p, q, INTERP_TOL) {
                return Err(Error::Inadmissible(format!("(p, q) = ({p}, {q}) is not an interpolation pair")));
            }
            let inner = block_sums(ds.inner())?;
            power_sum(&outer, p)?.powf(1.0 / p) * power_sum(&inner, q)?.powf(1.0 / q)
        }
        _ => ds.inner().coeff().l1() * power_sum(&outer, 2.0)?.sqrt(),
    };
    let rhs = finite_positive("rhs", rhs)?;
    let signal = DilatedMaximalSignal::new(ds, ds.outer_len(), ds.inner().len())?;
    let lhs = stepanov_norm(&signal, params)?.value;
    Ok((lhs, rhs))
}

pub fn maximal_constant_estimate(
    gen: &GeneratorConfig,
    ineq: Inequality,
    trials: usize,
    seed: u64,
) -> Result<ConstantReport> {
    if trials == 0 {
        return Err(Error::range("trials", 0.0, "must be at least 1"));
    }
    let rows = (0..trials)
        .into_par_iter()
        .map(|r| {
            let mut rng = StreamRng::new(seed, r as u64);
            let (lhs, rhs) = match ineq {
                Inequality::Gen => {
                    let s = random_series(&mut rng, gen.n, gen.freq_range, gen.coeff_max)?;
                    gen_sides(&s, &gen.stepanov)?
                }
                _ => {
                    let outer = random_series(&mut rng, gen.n, gen.freq_range, gen.coeff_max)?;
                    let inner = random_series(&mut rng, gen.inner_n, gen.inner_freq_range, gen.coeff_max)?;
                    dilated_sides(&DilatedSeries::from_series(outer, inner), ineq, &gen.stepanov)?
                }
            };
            Ok(TrialRatio {
                trial: r,
                lhs,
                rhs,
                ratio: lhs / rhs,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_ratio = rows.iter().map(|t| t.ratio).fold(0.0, f64::max);
    Ok(ConstantReport {
        inequality: ineq,
        seed,
        generator: *gen,
        trials: rows,
        max_ratio,
        lower_bound_only: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn halasz_n_one() {
        let grid = SampleGrid::new(0.0, 5.0, 0.01).unwrap();
        let r = halasz_experiment(&[1], 8, &grid, 3).unwrap();
        assert_eq!(r.estimates, vec![1.0]);
        assert_eq!(r.ratios, vec![2f64.ln()]);
    }

    #[test]
    fn halasz_single_point_matches_mean_deviation() {
        let n = 10_000;
        let r = halasz_experiment(&[n], 400, &SampleGrid::point(0.0), 5).unwrap();
        let want = (2.0 * n as f64 / PI).sqrt();
        assert!((r.estimates[0] / want - 1.0).abs() < 0.1, "{} vs {want}", r.estimates[0]);
    }

    #[test]
    fn halasz_grid_superset_never_decreases() {
        let small = SampleGrid::new(0.0, 10.0, 0.02).unwrap();
        let large = SampleGrid::new(0.0, 20.0, 0.01).unwrap();
        let a = halasz_experiment(&[16, 64], 6, &small, 9).unwrap();
        let b = halasz_experiment(&[16, 64], 6, &large, 9).unwrap();
        for (x, y) in a.per_trial.iter().flatten().zip(b.per_trial.iter().flatten()) {
            assert!(y >= x);
        }
        let again = halasz_experiment(&[64, 16], 6, &small, 9).unwrap();
        assert_eq!(again.estimates, vec![a.estimates[1], a.estimates[0]]);
    }

    #[test]
    fn halasz_matches_direct_loop() {
        let grid = SampleGrid::new(0.0, 3.0, 0.25).unwrap();
        let r = halasz_experiment(&[5, 9], 3, &grid, 77).unwrap();
        for trial in 0..3 {
            let eps = rademacher_signs(77, trial as u64, 9);
            for (slot, &n) in [5usize, 9].iter().enumerate() {
                let mut best = 0.0f64;
                for t in grid.points() {
                    let s: Complex64 = (1..=n).map(|k| eps[k - 1] * Complex64::cis(t * (k as f64).ln())).sum();
                    best = best.max(s.norm());
                }
                assert!((r.per_trial[slot][trial] - best).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn within_block_bound_holds() {
        let w = prop27_within_block(16);
        assert_eq!(w.len(), 16);
        assert!(w.iter().all(|b| b.holds), "{w:?}");
    }

    #[test]
    fn prop27_small_run() {
        let params = Prop27Params {
            max_block: 4,
            stepanov: StepanovParams {
                x_min: 0.0,
                x_max: 2.0,
                ..StepanovParams::default()
            },
        };
        let a = prop27_experiment(1 << 10, 42, &params).unwrap();
        let b = prop27_experiment(1 << 10, 42, &params).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.wiener_blocks.len(), 10);
        for d in &a.differences {
            assert!(d.stepanov <= d.l1 * (1.0 + 1e-9));
            if let Some(bound) = d.bound {
                assert!(d.l1 <= bound);
            }
        }
        assert!(prop27_experiment(1000, 42, &params).is_err());
    }

    #[test]
    fn single_frequency_ratio_is_one() {
        let s = APSeries::from_parts(&[2.5], &[Complex64::new(0.3, -0.4)]).unwrap();
        let params = StepanovParams {
            x_max: 3.0,
            ..StepanovParams::default()
        };
        let (lhs, rhs) = gen_sides(&s, &params).unwrap();
        assert!((lhs - 0.5).abs() < 1e-12);
        assert!((rhs - 0.5).abs() < 1e-15);
    }

    #[test]
    fn constants_are_reproducible_and_validated() {
        let mut gen = GeneratorConfig::for_inequality(Inequality::Dilated);
        gen.n = 6;
        gen.inner_n = 3;
        gen.stepanov.x_max = 2.0;
        let a = maximal_constant_estimate(&gen, Inequality::Dilated, 4, 1).unwrap();
        let b = maximal_constant_estimate(&gen, Inequality::Dilated, 4, 1).unwrap();
        assert_eq!(a, b);
        assert!(a.trials.iter().all(|t| t.ratio.is_finite() && t.ratio > 0.0));
        let bad = maximal_constant_estimate(&gen, Inequality::Interp { p: 2.0, q: 2.0 }, 2, 1);
        assert!(matches!(bad, Err(Error::Inadmissible(_))));
        gen.freq_range = (0.0, 1.0);
        let low = maximal_constant_estimate(&gen, Inequality::Dilated, 2, 1);
        assert!(matches!(low, Err(Error::Inadmissible(_))));
    }
}
