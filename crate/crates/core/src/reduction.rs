//! Frequency-to-Dirichlet reduction and the Abel dyadic decomposition of a
//! Dirichlet polynomial.
//!
//! The reduction works in base 2 (`u = floor(2^lambda)`, phases
//! `e^{it log2 u}`); the Abel decomposition works with `k^{it} = e^{it ln k}`.

use std::f64::consts::LN_2;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::series::{APSeries, CoeffSeq};

/// `2^lambda` is reduced only for `lambda` strictly below this bound.
pub const MAX_LAMBDA: f64 = 53.0;

/// Distance to an integer below which `2^lambda` is snapped before flooring.
pub const SNAP_TOL: f64 = 1e-9;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// `floor(2^lambda)`, snapping values within `SNAP_TOL` of an integer.
pub fn floor_pow2(lambda: f64) -> Result<u64> {
    if !(lambda.is_finite() && lambda < MAX_LAMBDA) {
        return Err(Error::Overflow {
            lambda,
            max_lambda: MAX_LAMBDA,
        });
    }
    if lambda < 0.0 {
        return Err(Error::range("lambda", lambda, "negative frequency"));
    }
    let x = lambda.exp2();
    let r = x.round();
    let u = if (x - r).abs() <= SNAP_TOL { r } else { x.floor() };
    Ok(u as u64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReducedSeries {
    /// Distinct values of `u`, strictly increasing.
    pub v: Vec<u64>,
    /// `b_{v_k}`, aligned with `v`; `b_n = 0` for `n` not in `v`.
    pub b: Vec<Complex64>,
    /// `u_l` for every original index `l`.
    pub mapping: Vec<u64>,
}

impl ReducedSeries {
    pub fn b_at(&self, n: u64) -> Complex64 {
        match self.v.binary_search(&n) {
            Ok(i) => self.b[i],
            Err(_) => ZERO,
        }
    }

    pub fn mass(&self) -> Complex64 {
        self.b.iter().sum()
    }

    /// The induced series `sum_k b_{v_k} e^{it log2 v_k}` as an explicit series.
    pub fn to_series(&self) -> Result<APSeries> {
        let lambda: Vec<f64> = self.v.iter().map(|&n| (n as f64).log2()).collect();
        APSeries::from_parts(&lambda, &self.b)
    }
}

pub fn reduce_to_dirichlet(series: &APSeries) -> Result<ReducedSeries> {
    let mapping = series
        .lambdas()
        .iter()
        .map(|&l| floor_pow2(l))
        .collect::<Result<Vec<u64>>>()?;
    let mut v: Vec<u64> = Vec::new();
    let mut b: Vec<Complex64> = Vec::new();
    for (&u, &a) in mapping.iter().zip(series.coeffs()) {
        match v.last() {
            Some(&last) if last == u => *b.last_mut().unwrap() += a,
            Some(&last) if last > u => {
                return Err(Error::invariant("lambda", "frequencies not nondecreasing"));
            }
            _ => {
                v.push(u);
                b.push(a);
            }
        }
    }
    Ok(ReducedSeries { v, b, mapping })
}

/// `|e^{it lambda} - e^{it log2 u}|`, computed as `2|sin(t (lambda - log2 u) / 2)|`.
pub fn phase_gap(lambda: f64, u: u64, t: f64) -> f64 {
    2.0 * (0.5 * t * (lambda - (u as f64).log2())).sin().abs()
}

/// Elementary bound `|t| / (u ln 2)` on the phase gap, from `0 <= lambda - log2 u < log2(1 + 1/u)`.
pub fn phase_gap_bound(u: u64, t: f64) -> f64 {
    t.abs() / (u as f64 * LN_2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Discrepancy {
    pub measured: f64,
    pub bound: f64,
    pub holds: bool,
}

/// Compare `sum_{k=p}^{q} a_k e^{it lambda_k}` with `sum_{n=u_p}^{u_q} b_n e^{it log2 n}` (0-based `p <= q`).
///
/// The bound adds the l1 mass of the two boundary groups `u = u_p`, `u = u_q`
/// and the exact phase gaps of the terms `p..=q`.
pub fn reduction_discrepancy(
    series: &APSeries,
    reduced: &ReducedSeries,
    t: f64,
    p: usize,
    q: usize,
) -> Result<Discrepancy> {
    let len = series.len();
    if q >= len {
        return Err(Error::Index { index: q, len });
    }
    if p > q {
        return Err(Error::Index { index: p, len: q + 1 });
    }
    if reduced.mapping.len() != len {
        return Err(Error::invariant("reduced", "mapping does not match the series length"));
    }
    let lambda = series.lambdas();
    let a = series.coeffs();
    let (up, uq) = (reduced.mapping[p], reduced.mapping[q]);

    let mut original = ZERO;
    let mut gaps = 0.0;
    for k in p..=q {
        original += a[k] * Complex64::cis(t * lambda[k]);
        gaps += a[k].norm() * phase_gap(lambda[k], reduced.mapping[k], t);
    }
    let mut induced = ZERO;
    let lo = reduced.v.partition_point(|&n| n < up);
    let hi = reduced.v.partition_point(|&n| n <= uq);
    for (&n, &bn) in reduced.v[lo..hi].iter().zip(&reduced.b[lo..hi]) {
        induced += bn * Complex64::cis(t * (n as f64).log2());
    }
    let boundary = |u: u64| -> f64 {
        reduced
            .mapping
            .iter()
            .zip(a)
            .filter(|(m, _)| **m == u)
            .map(|(_, c)| c.norm())
            .sum::<f64>()
    };
    let measured = (original - induced).norm();
    let bound = boundary(up) + boundary(uq) + gaps;
    let slack = 1e-12 * (1.0 + series.coeff().l1());
    Ok(Discrepancy {
        measured,
        bound,
        holds: measured <= bound + slack,
    })
}

/// Within-block prefix sums of one dyadic block `2^n <= k <= 2^{n+1} - 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AbelBlock {
    pub n: u32,
    /// `S_{k,n}` for `k = 2^n ..= 2^{n+1} - 1`.
    pub prefix: Vec<Complex64>,
    /// `sum_{j=2^n}^{2^{n+1}-1} |a_j|`
    pub l1: f64,
}

impl AbelBlock {
    pub fn first_k(&self) -> usize {
        1 << self.n
    }

    /// `S_{2^{n+1}-1, n}`, the coefficient that multiplies `2^{(n+1)it}`.
    pub fn carleson(&self) -> Complex64 {
        *self.prefix.last().unwrap()
    }

    /// `S_{k,n} / k`, the coefficients of the Dirichlet remainder term.
    pub fn dirichlet_term(&self) -> Vec<Complex64> {
        let k0 = self.first_k();
        self.prefix
            .iter()
            .enumerate()
            .map(|(i, s)| s / (k0 + i) as f64)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AbelDecomposition {
    pub blocks: Vec<AbelBlock>,
}

impl AbelDecomposition {
    pub fn carleson_terms(&self) -> Vec<Complex64> {
        self.blocks.iter().map(AbelBlock::carleson).collect()
    }

    /// Number of coefficients covered, `2^{n_blocks+1} - 1`.
    pub fn len(&self) -> usize {
        (1usize << self.blocks.len()) - 1
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }
}

/// Decompose the dyadic blocks `n = 0..=n_blocks` of a Dirichlet coefficient sequence.
pub fn abel_decompose(coeff: &CoeffSeq, n_blocks: u32) -> Result<AbelDecomposition> {
    if n_blocks >= 62 {
        return Err(Error::range("n_blocks", n_blocks as f64, "too many blocks"));
    }
    let need = (1usize << (n_blocks + 1)) - 1;
    if coeff.len() < need {
        return Err(Error::invariant(
            "coeff",
            format!("length {} shorter than 2^(n_blocks+1) - 1 = {need}", coeff.len()),
        ));
    }
    let a = coeff.values();
    let blocks = (0..=n_blocks)
        .map(|n| {
            let lo = 1usize << n;
            let mut acc = ZERO;
            let mut l1 = 0.0;
            let prefix = a[lo - 1..2 * lo - 1]
                .iter()
                .map(|&c| {
                    acc += c;
                    l1 += c.norm();
                    acc
                })
                .collect();
            AbelBlock { n, prefix, l1 }
        })
        .collect();
    Ok(AbelDecomposition { blocks })
}

/// `u_k(t) = e^{it ln k} (1 - e^{it ln(1+1/k)} + it/k)`, evaluated without cancellation.
pub fn uk(k: usize, t: f64) -> Complex64 {
    Complex64::cis(t * (k as f64).ln()) * uk_factor(k, t)
}

/// `1 - e^{it ln(1+1/k)} + it/k` as `2 sin^2(eps/2) + i (t/k - sin eps)`.
#[inline]
fn uk_factor(k: usize, t: f64) -> Complex64 {
    let kf = k as f64;
    let eps = t * (1.0 / kf).ln_1p();
    let half = (0.5 * eps).sin();
    Complex64::new(2.0 * half * half, t / kf - eps.sin())
}

/// Sum of the decomposition at `t`; equals the Dirichlet partial sum over the covered range.
pub fn abel_recompose(decomp: &AbelDecomposition, t: f64) -> Complex64 {
    let mut total = ZERO;
    for block in &decomp.blocks {
        let k0 = block.first_k();
        let mut acc = ZERO;
        for (i, &s) in block.prefix.iter().enumerate() {
            let k = k0 + i;
            let phase = Complex64::cis(t * (k as f64).ln());
            acc += s * phase * (uk_factor(k, t) - I * (t / k as f64));
        }
        acc += Complex64::cis((block.n + 1) as f64 * t * LN_2) * block.carleson();
        total += acc;
    }
    total
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UkProbe {
    /// Max over all probes of `|u_k(t)| k^2 / (t + t^2)`.
    pub max_ratio: f64,
    /// Per `k`, the max over `t` of the same ratio.
    pub per_k: Vec<(usize, f64)>,
    /// Ratio at the largest `k` is at most 1.5 times the ratio at the smallest.
    /// For fixed `t` the ratio tends to `sqrt(t^2 + t^4) / (2 (t + t^2))`.
    pub bounded: bool,
}

pub fn uk_bound_probe(ks: &[usize], ts: &[f64]) -> Result<UkProbe> {
    if ks.is_empty() || ts.is_empty() {
        return Err(Error::Empty("k or t probes".into()));
    }
    if let Some(&k) = ks.iter().find(|&&k| k < 2) {
        return Err(Error::range("k", k as f64, "must be >= 2"));
    }
    if let Some(&t) = ts.iter().find(|&&t| !(t > 0.0)) {
        return Err(Error::range("t", t, "must be > 0"));
    }
    let per_k: Vec<(usize, f64)> = ks
        .iter()
        .map(|&k| {
            let r = ts
                .iter()
                .map(|&t| uk(k, t).norm() * (k as f64).powi(2) / (t + t * t))
                .fold(0.0, f64::max);
            (k, r)
        })
        .collect();
    let max_ratio = per_k.iter().map(|p| p.1).fold(0.0, f64::max);
    let first = per_k.first().unwrap().1;
    let last = per_k.last().unwrap().1;
    Ok(UkProbe {
        max_ratio,
        per_k,
        bounded: max_ratio.is_finite() && last <= 1.5 * first,
    })
}
