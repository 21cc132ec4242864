//! Frequency and coefficient sequences, series and sample grids.
//!
//! All sequences are finite truncations. Builtin frequency families keep
//! their closed form alongside the materialized values so a sequence can be
//! regenerated at any length.

use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::StreamRng;

/// Half-width of the jitter applied by [`FrequencyKind::Jittered`].
pub const JITTER_HALF_WIDTH: f64 = 0.49;

/// Closed-form family a frequency sequence was generated from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FrequencyKind {
    Explicit,
    /// `lambda_n = n`
    Identity,
    /// `lambda_n = log2(n)`
    Log2,
    /// `lambda_n = ln(n)`
    NaturalLog,
    /// `lambda_n = c * n + d`
    Affine { c: f64, d: f64 },
    /// `lambda_n = n + eps_n`, `eps_n` uniform on `(-0.49, 0.49)` from the seeded stream.
    Jittered { seed: u64 },
}

impl FrequencyKind {
    pub fn name(&self) -> &'static str {
        match self {
            FrequencyKind::Explicit => "explicit",
            FrequencyKind::Identity => "identity",
            FrequencyKind::Log2 => "log2",
            FrequencyKind::NaturalLog => "natural-log",
            FrequencyKind::Affine { .. } => "affine",
            FrequencyKind::Jittered { .. } => "jittered",
        }
    }
}

/// Nondecreasing sequence of real exponents `lambda_1 <= lambda_2 <= ...`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencySeq {
    kind: FrequencyKind,
    values: Vec<f64>,
}

impl FrequencySeq {
    /// Explicit list. Rejects non-finite values and decreasing steps.
    pub fn explicit(values: Vec<f64>) -> Result<Self> {
        check_frequencies(&values)?;
        Ok(Self {
            kind: FrequencyKind::Explicit,
            values,
        })
    }

    /// Materialize the first `n` terms (indices `1..=n`) of a builtin family.
    pub fn builtin(kind: FrequencyKind, n: usize) -> Result<Self> {
        let values: Vec<f64> = match kind {
            FrequencyKind::Explicit => {
                return Err(Error::invariant("kind", "explicit sequences need values"))
            }
            FrequencyKind::Identity => (1..=n).map(|k| k as f64).collect(),
            FrequencyKind::Log2 => (1..=n).map(|k| (k as f64).log2()).collect(),
            FrequencyKind::NaturalLog => (1..=n).map(|k| (k as f64).ln()).collect(),
            FrequencyKind::Affine { c, d } => (1..=n).map(|k| c * k as f64 + d).collect(),
            FrequencyKind::Jittered { seed } => {
                let mut rng = StreamRng::new(seed, 0);
                (1..=n)
                    .map(|k| k as f64 + rng.uniform(-JITTER_HALF_WIDTH, JITTER_HALF_WIDTH))
                    .collect()
            }
        };
        check_frequencies(&values)?;
        Ok(Self { kind, values })
    }

    pub fn kind(&self) -> FrequencyKind {
        self.kind
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Same values, tagged as an explicit list.
    pub fn to_explicit(&self) -> Self {
        Self {
            kind: FrequencyKind::Explicit,
            values: self.values.clone(),
        }
    }

    /// True when every consecutive step is strictly increasing.
    pub fn is_strictly_increasing(&self) -> bool {
        self.values.windows(2).all(|w| w[0] < w[1])
    }

    /// Common shift `lambda_k + c`.
    pub fn shifted(&self, c: f64) -> Result<Self> {
        Self::explicit(self.values.iter().map(|v| v + c).collect())
    }
}

fn check_frequencies(values: &[f64]) -> Result<()> {
    for (i, v) in values.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::invariant(
                format!("lambda[{}]", i + 1),
                "non-finite frequency",
            ));
        }
    }
    for (i, w) in values.windows(2).enumerate() {
        if w[1] < w[0] {
            return Err(Error::invariant(
                format!("lambda[{}]", i + 2),
                format!("frequencies not nondecreasing ({} after {})", w[1], w[0]),
            ));
        }
    }
    Ok(())
}

/// Complex coefficient sequence. Finiteness is reported by [`validate`], not enforced here.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CoeffSeq {
    values: Vec<Complex64>,
}

impl CoeffSeq {
    pub fn new(values: Vec<Complex64>) -> Self {
        Self { values }
    }

    pub fn from_real(values: &[f64]) -> Self {
        Self::new(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn l1(&self) -> f64 {
        self.values.iter().map(|a| a.norm()).sum()
    }

    pub fn l2(&self) -> f64 {
        self.values.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Generalized trigonometric series `sum_n a_n e^{i lambda_n t}`.
#[derive(Debug, Clone, PartialEq)]
pub struct APSeries {
    freq: FrequencySeq,
    coeff: CoeffSeq,
}

impl APSeries {
    pub fn new(freq: FrequencySeq, coeff: CoeffSeq) -> Result<Self> {
        if freq.len() != coeff.len() {
            return Err(Error::invariant(
                "coeff",
                format!(
                    "length mismatch: {} frequencies, {} coefficients",
                    freq.len(),
                    coeff.len()
                ),
            ));
        }
        Ok(Self { freq, coeff })
    }

    /// Convenience constructor from explicit slices.
    pub fn from_parts(lambda: &[f64], a: &[Complex64]) -> Result<Self> {
        Self::new(
            FrequencySeq::explicit(lambda.to_vec())?,
            CoeffSeq::new(a.to_vec()),
        )
    }

    pub fn freq(&self) -> &FrequencySeq {
        &self.freq
    }

    pub fn coeff(&self) -> &CoeffSeq {
        &self.coeff
    }

    pub fn lambdas(&self) -> &[f64] {
        self.freq.values()
    }

    pub fn coeffs(&self) -> &[Complex64] {
        self.coeff.values()
    }

    pub fn len(&self) -> usize {
        self.freq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freq.is_empty()
    }

    /// First `n` terms.
    pub fn truncated(&self, n: usize) -> Result<Self> {
        if n > self.len() {
            return Err(Error::Index {
                index: n,
                len: self.len(),
            });
        }
        Self::from_parts(&self.lambdas()[..n], &self.coeffs()[..n])
    }

    /// Same frequencies, coefficients multiplied by `c`.
    pub fn scaled(&self, c: Complex64) -> Self {
        Self {
            freq: self.freq.clone(),
            coeff: CoeffSeq::new(self.coeffs().iter().map(|a| a * c).collect()),
        }
    }

    /// Merge exactly tied frequencies by summing their coefficients.
    pub fn collapse_ties(&self) -> Self {
        let mut lambda: Vec<f64> = Vec::with_capacity(self.len());
        let mut a: Vec<Complex64> = Vec::with_capacity(self.len());
        for (&l, &c) in self.lambdas().iter().zip(self.coeffs()) {
            match lambda.last() {
                Some(&prev) if prev == l => *a.last_mut().unwrap() += c,
                _ => {
                    lambda.push(l);
                    a.push(c);
                }
            }
        }
        Self {
            freq: FrequencySeq {
                kind: FrequencyKind::Explicit,
                values: lambda,
            },
            coeff: CoeffSeq::new(a),
        }
    }
}

/// Series of dilates `sum_n alpha_n D(lambda_n t)` with `D(t) = sum_j beta_j e^{i mu_j t}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DilatedSeries {
    outer_coeff: CoeffSeq,
    outer_freq: FrequencySeq,
    inner: APSeries,
}

impl DilatedSeries {
    pub fn new(outer_coeff: CoeffSeq, outer_freq: FrequencySeq, inner: APSeries) -> Result<Self> {
        if outer_coeff.len() != outer_freq.len() {
            return Err(Error::invariant(
                "outer_coeff",
                format!(
                    "length mismatch: {} outer frequencies, {} outer coefficients",
                    outer_freq.len(),
                    outer_coeff.len()
                ),
            ));
        }
        Ok(Self {
            outer_coeff,
            outer_freq,
            inner,
        })
    }

    /// Build from an outer series (its coefficients are the `alpha_n`) and the inner series `D`.
    pub fn from_series(outer: APSeries, inner: APSeries) -> Self {
        Self {
            outer_coeff: outer.coeff,
            outer_freq: outer.freq,
            inner,
        }
    }

    pub fn outer_coeff(&self) -> &CoeffSeq {
        &self.outer_coeff
    }

    pub fn outer_freq(&self) -> &FrequencySeq {
        &self.outer_freq
    }

    pub fn inner(&self) -> &APSeries {
        &self.inner
    }

    /// The outer data viewed as a series, for block sums.
    pub fn outer_series(&self) -> APSeries {
        APSeries {
            freq: self.outer_freq.clone(),
            coeff: self.outer_coeff.clone(),
        }
    }

    pub fn outer_len(&self) -> usize {
        self.outer_freq.len()
    }
}

/// Uniform grid `t_i = t0 + i * step`, `i = 0..count`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampleGrid {
    pub t0: f64,
    pub t1: f64,
    pub step: f64,
    pub count: usize,
}

impl SampleGrid {
    pub fn new(t0: f64, t1: f64, step: f64) -> Result<Self> {
        if !(t0.is_finite() && t1.is_finite()) {
            return Err(Error::invariant("grid", "non-finite endpoint"));
        }
        if !(step.is_finite() && step > 0.0) {
            return Err(Error::range("grid.step", step, "must be positive"));
        }
        if t1 < t0 {
            return Err(Error::range("grid.t1", t1, "must not precede t0"));
        }
        let ratio = (t1 - t0) / step;
        // Absorb the rounding of ratios such as 10 / 0.01 = 999.9999999999999.
        let count = (ratio + 1e-9 * ratio.max(1.0)).floor() as usize + 1;
        Ok(Self {
            t0,
            t1,
            step,
            count,
        })
    }

    /// Single point grid at `t`.
    pub fn point(t: f64) -> Self {
        Self {
            t0: t,
            t1: t,
            step: 1.0,
            count: 1,
        }
    }

    pub fn at(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.step
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(move |i| self.at(i))
    }
}

/// Which hypotheses a series must satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Usage {
    Plain,
    DilationOuter,
    DilationInner,
}

/// A single invariant violation found by [`validate`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostic {
    pub field: String,
    pub index: Option<usize>,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.index {
            Some(i) => write!(f, "{}[{}]: {}", self.field, i, self.message),
            None => write!(f, "{}: {}", self.field, self.message),
        }
    }
}

/// Check every invariant for the stated usage; empty iff all hold.
///
/// Indices in diagnostics are 1-based, matching the series file records.
pub fn validate(series: &APSeries, usage: Usage) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let lambda = series.lambdas();
    let diag = |field: &str, index: Option<usize>, message: &str| Diagnostic {
        field: field.to_string(),
        index,
        message: message.to_string(),
    };
    if lambda.len() != series.coeffs().len() {
        out.push(diag("coeff", None, "length mismatch"));
    }
    let min = match usage {
        Usage::Plain => 0.0,
        Usage::DilationOuter | Usage::DilationInner => 1.0,
    };
    for (i, &l) in lambda.iter().enumerate() {
        if !l.is_finite() {
            out.push(diag("lambda", Some(i + 1), "non-finite frequency"));
        } else if l < min {
            let msg = if min == 0.0 {
                "negative frequency"
            } else {
                "frequency < 1"
            };
            out.push(diag("lambda", Some(i + 1), msg));
        }
    }
    for (i, w) in lambda.windows(2).enumerate() {
        if w[1] < w[0] {
            out.push(diag("lambda", Some(i + 2), "frequencies not nondecreasing"));
        }
    }
    for (i, a) in series.coeffs().iter().enumerate() {
        if !(a.re.is_finite() && a.im.is_finite()) {
            out.push(diag("coeff", Some(i + 1), "non-finite coefficient"));
        }
    }
    out
}

/// Diagnostics for both halves of a dilated series.
pub fn validate_dilated(ds: &DilatedSeries) -> Vec<Diagnostic> {
    let mut out: Vec<Diagnostic> = validate(&ds.outer_series(), Usage::DilationOuter)
        .into_iter()
        .map(|mut d| {
            d.field = format!("outer.{}", d.field);
            d
        })
        .collect();
    out.extend(
        validate(ds.inner(), Usage::DilationInner)
            .into_iter()
            .map(|mut d| {
                d.field = format!("inner.{}", d.field);
                d
            }),
    );
    out
}
