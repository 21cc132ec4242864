//! Stepanov norm, Besicovitch semi-norm, Fourier coefficients and the Bessel check.
//!
//! The supremum over window positions in the Stepanov norm is taken over a
//! finite lattice, so every estimate is a lower bound and is flagged as such.
//! Window positions and samples live on lattices anchored at zero
//! (`x = j * x_step`, `t = i * h`), which makes the estimate exactly monotone
//! under enlarging the range or refining the window step.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::evaluator::{MaximalField, Signal};
use crate::quadrature::{exp_integral, integrate_fn, integrate_samples, Rule};
use crate::series::APSeries;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepanovParams {
    pub x_min: f64,
    pub x_max: f64,
    pub x_step: f64,
    pub t_step: f64,
    pub rule: Rule,
}

impl Default for StepanovParams {
    fn default() -> Self {
        Self {
            x_min: 0.0,
            x_max: 100.0,
            x_step: 0.05,
            t_step: 1e-3,
            rule: Rule::Simpson,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormEstimate {
    pub value: f64,
    pub lower_bound_only: bool,
    pub x_range: (f64, f64),
    /// Effective window step (a multiple of the sample step).
    pub x_step: f64,
    /// Effective sample step.
    pub t_step: f64,
    pub quadrature: Rule,
    /// Window start attaining the maximum.
    pub x_at_max: f64,
}

/// `(int_x^{x+1} |f|^2)^{1/2}` by a composite rule with step at most `t_step`.
pub fn window_l2<F>(f: F, x: f64, t_step: f64, rule: Rule) -> Result<f64>
where
    F: Fn(f64) -> Complex64,
{
    if !(t_step > 0.0 && t_step <= 0.5) {
        return Err(Error::range("t_step", t_step, "must lie in (0, 0.5]"));
    }
    let n = rule.intervals(1.0, t_step);
    let h = 1.0 / n as f64;
    let mut samples = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let v = f(x + i as f64 * h).norm_sqr();
        if !v.is_finite() {
            return Err(Error::invariant("field", format!("non-finite sample at t = {}", x + i as f64 * h)));
        }
        samples.push(v);
    }
    Ok(integrate_samples(&samples, h, rule).max(0.0).sqrt())
}

/// Lower-bound estimate of `sup_x (int_x^{x+1} |f|^2)^{1/2}` over the window lattice.
pub fn stepanov_norm<S: Signal + ?Sized>(signal: &S, params: &StepanovParams) -> Result<NormEstimate> {
    let p = params;
    if !(p.x_min.is_finite() && p.x_max.is_finite()) || p.x_max < p.x_min {
        return Err(Error::invariant("x_range", format!("invalid range [{}, {}]", p.x_min, p.x_max)));
    }
    if !(p.x_step > 0.0 && p.x_step <= 1.0) {
        return Err(Error::range("x_step", p.x_step, "must lie in (0, 1]"));
    }
    if !(p.t_step > 0.0 && p.t_step <= 0.5) {
        return Err(Error::range("t_step", p.t_step, "must lie in (0, 0.5]"));
    }
    let n_w = p.rule.intervals(1.0, p.t_step);
    let h = 1.0 / n_w as f64;
    let stride = ((p.x_step / h).round() as i64).max(1);
    let x_step = stride as f64 * h;
    let j_lo = (p.x_min / x_step - 1e-9).ceil() as i64;
    let j_hi = (p.x_max / x_step + 1e-9).floor() as i64;
    if j_hi < j_lo {
        return Err(Error::Empty("x grid".into()));
    }
    let i_lo = j_lo * stride;
    let i_hi = j_hi * stride + n_w as i64;
    let samples: Vec<f64> = (i_lo..=i_hi)
        .into_par_iter()
        .map(|i| signal.modulus_sq(i as f64 * h))
        .collect();
    if let Some(pos) = samples.iter().position(|v| !v.is_finite()) {
        return Err(Error::invariant(
            "field",
            format!("non-finite sample at t = {}", (i_lo + pos as i64) as f64 * h),
        ));
    }
    let mut best = f64::NEG_INFINITY;
    let mut at = 0.0;
    for j in j_lo..=j_hi {
        let start = ((j - j_lo) * stride) as usize;
        let v = integrate_samples(&samples[start..=start + n_w], h, p.rule);
        if v > best {
            best = v;
            at = j as f64 * x_step;
        }
    }
    Ok(NormEstimate {
        value: best.max(0.0).sqrt(),
        lower_bound_only: true,
        x_range: (p.x_min, p.x_max),
        x_step,
        t_step: h,
        quadrature: p.rule,
        x_at_max: at,
    })
}

/// Stepanov estimate from an already materialized maximal field.
///
/// The field's grid step must divide 1 (an even number of times for Simpson);
/// every window fully inside the grid is used.
pub fn stepanov_norm_of_field(field: &MaximalField, rule: Rule) -> Result<NormEstimate> {
    let h = field.grid.step;
    let n_w = (1.0 / h).round() as usize;
    if n_w == 0 || ((n_w as f64) * h - 1.0).abs() > 1e-9 {
        return Err(Error::range("grid.step", h, "must divide the unit window"));
    }
    if rule == Rule::Simpson && n_w % 2 == 1 {
        return Err(Error::range("grid.step", h, "simpson needs an even count per window"));
    }
    if field.max_abs.len() < n_w + 1 {
        return Err(Error::Empty("x grid (field shorter than one window)".into()));
    }
    let sq: Vec<f64> = field.max_abs.iter().map(|m| m * m).collect();
    let mut best = f64::NEG_INFINITY;
    let mut at = field.grid.t0;
    for start in 0..=(sq.len() - n_w - 1) {
        let v = integrate_samples(&sq[start..=start + n_w], h, rule);
        if v > best {
            best = v;
            at = field.grid.at(start);
        }
    }
    Ok(NormEstimate {
        value: best.max(0.0).sqrt(),
        lower_bound_only: true,
        x_range: (field.grid.t0, field.grid.at(sq.len() - n_w - 1)),
        x_step: h,
        t_step: h,
        quadrature: rule,
        x_at_max: at,
    })
}

/// Default horizon ladder `T in {10^2, 10^2.5, 10^3, 10^3.5, 10^4}`.
pub fn default_horizons() -> Vec<f64> {
    [2.0, 2.5, 3.0, 3.5, 4.0].iter().map(|e| 10f64.powf(*e)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BesicovitchEstimate {
    /// Max over the later half of the ladder (limsup proxy).
    pub value: f64,
    /// `(T, ((1/2T) int_{-T}^{T} |f|^2)^{1/2})` per horizon.
    pub trace: Vec<(f64, f64)>,
}

fn check_horizons(horizons: &[f64]) -> Result<()> {
    if horizons.is_empty() {
        return Err(Error::Empty("horizon list".into()));
    }
    for &t in horizons {
        if !(t >= 1.0 && t.is_finite()) {
            return Err(Error::range("T", t, "horizons must be >= 1"));
        }
    }
    if horizons.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invariant("T", "horizons must be increasing"));
    }
    Ok(())
}

fn limsup_proxy(trace: &[(f64, f64)]) -> f64 {
    let keep = trace.len().div_ceil(2);
    trace[trace.len() - keep..]
        .iter()
        .map(|&(_, v)| v)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Besicovitch semi-norm of a trigonometric sum over a horizon ladder.
///
/// Each quadratic mean is the composite rule with step at most `t_step`,
/// evaluated term pair by term pair in closed form.
pub fn besicovitch_seminorm(
    series: &APSeries,
    horizons: &[f64],
    t_step: f64,
    rule: Rule,
) -> Result<BesicovitchEstimate> {
    check_horizons(horizons)?;
    let (lambda, a) = (series.lambdas(), series.coeffs());
    let trace: Vec<(f64, f64)> = horizons
        .iter()
        .map(|&big_t| {
            let n = rule.intervals(2.0 * big_t, t_step);
            let mut acc = 0.0;
            for j in 0..lambda.len() {
                acc += a[j].norm_sqr() * exp_integral(0.0, -big_t, big_t, n, rule).re;
                for k in (j + 1)..lambda.len() {
                    // Pair (j,k) plus its conjugate (k,j).
                    let q = exp_integral(lambda[j] - lambda[k], -big_t, big_t, n, rule);
                    acc += 2.0 * (a[j] * a[k].conj() * q).re;
                }
            }
            (big_t, (acc / (2.0 * big_t)).max(0.0).sqrt())
        })
        .collect();
    Ok(BesicovitchEstimate {
        value: limsup_proxy(&trace),
        trace,
    })
}

/// Sampled counterpart of [`besicovitch_seminorm`] for any signal.
pub fn besicovitch_sampled<S: Signal + ?Sized>(
    signal: &S,
    horizons: &[f64],
    t_step: f64,
    rule: Rule,
) -> Result<BesicovitchEstimate> {
    check_horizons(horizons)?;
    let trace = horizons
        .iter()
        .map(|&big_t| {
            let n = rule.intervals(2.0 * big_t, t_step);
            let h = 2.0 * big_t / n as f64;
            let samples: Vec<f64> = (0..=n)
                .into_par_iter()
                .map(|i| signal.modulus_sq(-big_t + i as f64 * h))
                .collect();
            let mean = integrate_samples(&samples, h, rule) / (2.0 * big_t);
            (big_t, mean.max(0.0).sqrt())
        })
        .collect::<Vec<_>>();
    Ok(BesicovitchEstimate {
        value: limsup_proxy(&trace),
        trace,
    })
}

/// Sample step used for the coefficient integral: `min(1e-3, 0.1 / (1 + |lambda| + max |lambda_k|))`.
pub fn coefficient_step(series: &APSeries, lambda: f64) -> f64 {
    let top = series.lambdas().iter().fold(0.0f64, |m, l| m.max(l.abs()));
    (1e-3f64).min(0.1 / (1.0 + lambda.abs() + top))
}

/// `(1/2T) int_{-T}^{T} f(x) e^{-i lambda x} dx` for a trigonometric sum, Simpson rule.
pub fn fourier_coefficient(series: &APSeries, lambda: f64, horizon: f64) -> Result<Complex64> {
    if !(horizon >= 1.0 && horizon.is_finite()) {
        return Err(Error::range("t_horizon", horizon, "must be >= 1"));
    }
    let step = coefficient_step(series, lambda);
    let n = Rule::Simpson.intervals(2.0 * horizon, step);
    let mut acc = Complex64::new(0.0, 0.0);
    for (&l, &a) in series.lambdas().iter().zip(series.coeffs()) {
        acc += a * exp_integral(l - lambda, -horizon, horizon, n, Rule::Simpson);
    }
    Ok(acc / (2.0 * horizon))
}

/// Sampled coefficient integral for an arbitrary function.
pub fn fourier_coefficient_sampled<F>(f: F, lambda: f64, horizon: f64, t_step: f64, rule: Rule) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    if !(horizon >= 1.0 && horizon.is_finite()) {
        return Err(Error::range("t_horizon", horizon, "must be >= 1"));
    }
    let n = rule.intervals(2.0 * horizon, t_step);
    let v = integrate_fn(|x| f(x) * Complex64::cis(-lambda * x), -horizon, horizon, n, rule);
    Ok(v / (2.0 * horizon))
}

/// `sum_{lambda_j != lambda} |a_j| / (T |lambda_j - lambda|)`, the cross-term bound of the coefficient at horizon `T`.
pub fn coefficient_cross_bound(series: &APSeries, lambda: f64, horizon: f64) -> f64 {
    series
        .lambdas()
        .iter()
        .zip(series.coeffs())
        .filter(|(&l, _)| l != lambda)
        .map(|(&l, a)| a.norm() / (horizon * (l - lambda).abs()))
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BesselReport {
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub holds: bool,
}

/// Default relative tolerance absorbing the lower-bound bias of the Stepanov estimate.
pub const BESSEL_TOL: f64 = 5e-2;

/// `sum_k |f^(lambda_k)|^2 <= ||f||_{S^2}^2`, ties collapsed first.
pub fn bessel_check(series: &APSeries, horizon: f64, params: &StepanovParams, tol: f64) -> Result<BesselReport> {
    let distinct = series.collapse_ties();
    let mut lhs = 0.0;
    for &l in distinct.lambdas() {
        lhs += fourier_coefficient(&distinct, l, horizon)?.norm_sqr();
    }
    let rhs = stepanov_norm(&distinct, params)?.value.powi(2);
    let bound = rhs * (1.0 + tol);
    Ok(BesselReport {
        lhs,
        rhs,
        slack: bound - lhs,
        holds: lhs <= bound,
    })
}
