//! Pairwise differences, the quadruple triangle-kernel sum, Sidon sets, the
//! Fejér density `tau` and the Bellman-Boas inequality.
//!
//! Pair and quadruple indices in this module are 0-based.

use std::collections::HashMap;
use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::{integrate_fn, Rule};
use crate::series::FrequencySeq;

/// Largest `N` accepted by the O(N^4) oracle.
pub const NAIVE_MAX_N: usize = 64;

/// Sorted multiset of the `N(N-1)` ordered differences `lambda_k - lambda_l`, `k != l`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DifferenceMultiset {
    pub diffs: Vec<f64>,
    /// `prefix_d[i] = sum_{j<i} diffs[j]`
    pub prefix_d: Vec<f64>,
    /// `prefix_d2[i] = sum_{j<i} diffs[j]^2`
    pub prefix_d2: Vec<f64>,
}

impl DifferenceMultiset {
    pub fn len(&self) -> usize {
        self.diffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diffs.is_empty()
    }
}

pub fn pairwise_differences(freq: &FrequencySeq) -> Result<DifferenceMultiset> {
    let l = freq.values();
    if l.len() < 2 {
        return Err(Error::Empty("need at least two frequencies".into()));
    }
    let mut diffs = Vec::with_capacity(l.len() * (l.len() - 1));
    for (k, &x) in l.iter().enumerate() {
        for (j, &y) in l.iter().enumerate() {
            if j != k {
                diffs.push(x - y);
            }
        }
    }
    diffs.sort_by(f64::total_cmp);
    let (prefix_d, prefix_d2) = prefix_sums(diffs.iter().copied());
    Ok(DifferenceMultiset {
        diffs,
        prefix_d,
        prefix_d2,
    })
}

fn prefix_sums(values: impl Iterator<Item = f64>) -> (Vec<f64>, Vec<f64>) {
    let (mut s1, mut s2) = (0.0, 0.0);
    let mut p1 = vec![0.0];
    let mut p2 = vec![0.0];
    for x in values {
        s1 += x;
        s2 += x * x;
        p1.push(s1);
        p2.push(s2);
    }
    (p1, p2)
}

/// Triangle kernel squared, `(1 - |x|)_+^2`.
#[inline]
pub fn kernel_sq(x: f64) -> f64 {
    let v = 1.0 - x.abs();
    if v > 0.0 {
        v * v
    } else {
        0.0
    }
}

/// `M = sum (1 - |(lambda_k - lambda_l) - (lambda_k' - lambda_l')|)_+^2` over
/// `k != l`, `k' != l'`, `(k, l) != (k', l')`, by direct enumeration.
pub fn quadruple_sum_naive(freq: &FrequencySeq) -> Result<f64> {
    let l = freq.values();
    let n = l.len();
    if n > NAIVE_MAX_N {
        return Err(Error::OracleTooLarge { n, max: NAIVE_MAX_N });
    }
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|k| (0..n).filter(move |&j| j != k).map(move |j| (k, j)))
        .collect();
    let mut total = 0.0;
    for &(k, j) in &pairs {
        let d = l[k] - l[j];
        for &(k2, j2) in &pairs {
            if (k, j) != (k2, j2) {
                total += kernel_sq(d - (l[k2] - l[j2]));
            }
        }
    }
    Ok(total)
}

/// Unit-width buckets `[A, A+1)` of sorted values, each with prefix sums of
/// the offsets `e = d - A`. Window sums then combine small numbers only.
struct Buckets {
    anchor: Vec<f64>,
    start: Vec<usize>,
    of: Vec<usize>,
    pe: Vec<Vec<f64>>,
    pe2: Vec<Vec<f64>>,
}

impl Buckets {
    fn new(sorted: &[f64]) -> Self {
        let mut anchor: Vec<f64> = Vec::new();
        let mut start = Vec::new();
        let mut of = Vec::with_capacity(sorted.len());
        for (i, &d) in sorted.iter().enumerate() {
            let a = d.floor();
            if anchor.last() != Some(&a) {
                anchor.push(a);
                start.push(i);
            }
            of.push(anchor.len() - 1);
        }
        let mut pe = Vec::with_capacity(anchor.len());
        let mut pe2 = Vec::with_capacity(anchor.len());
        for (b, &a) in anchor.iter().enumerate() {
            let end = start.get(b + 1).copied().unwrap_or(sorted.len());
            let (p1, p2) = prefix_sums(sorted[start[b]..end].iter().map(|d| d - a));
            pe.push(p1);
            pe2.push(p2);
        }
        Buckets {
            anchor,
            start,
            of,
            pe,
            pe2,
        }
    }

    /// Visit `(anchor, count, sum e, sum e^2)` for each bucket piece of `lo..hi`.
    fn for_each_piece(&self, lo: usize, hi: usize, mut f: impl FnMut(f64, f64, f64, f64)) {
        let mut i = lo;
        while i < hi {
            let b = self.of[i];
            let end = self.start.get(b + 1).copied().unwrap_or(usize::MAX).min(hi);
            let (s, e) = (i - self.start[b], end - self.start[b]);
            f(
                self.anchor[b],
                (end - i) as f64,
                self.pe[b][e] - self.pe[b][s],
                self.pe2[b][e] - self.pe2[b][s],
            );
            i = end;
        }
    }
}

/// Same functional as [`quadruple_sum_naive`] in O(N^2 log N).
///
/// For every difference `d_i`, exact ties contribute 1 each (minus the self
/// pair), and the strict windows `(d_i - 1, d_i)`, `(d_i, d_i + 1)` are summed
/// in closed form from bucketed prefix sums.
pub fn quadruple_sum_fast(freq: &FrequencySeq) -> Result<f64> {
    let dm = pairwise_differences(freq)?;
    Ok(quadruple_sum_sorted(&dm.diffs))
}

fn quadruple_sum_sorted(d: &[f64]) -> f64 {
    let buckets = Buckets::new(d);
    let per_i: Vec<f64> = d
        .par_iter()
        .map(|&x| {
            let tie_lo = d.partition_point(|&y| y < x);
            let tie_hi = d.partition_point(|&y| y <= x);
            let left_lo = d.partition_point(|&y| y <= x - 1.0);
            let right_hi = d.partition_point(|&y| y < x + 1.0);
            let mut acc = (tie_hi - tie_lo - 1) as f64;
            // Left: (1 - x + d_j)^2 = (c + e)^2 with c = 1 - x + A.
            buckets.for_each_piece(left_lo, tie_lo, |a, cnt, s1, s2| {
                let c = (1.0 + a) - x;
                acc += cnt * c * c + 2.0 * c * s1 + s2;
            });
            // Right: (1 + x - d_j)^2 = (c - e)^2 with c = 1 + x - A.
            buckets.for_each_piece(tie_hi, right_hi, |a, cnt, s1, s2| {
                let c = (1.0 + x) - a;
                acc += cnt * c * c - 2.0 * c * s1 + s2;
            });
            acc
        })
        .collect();
    per_i.iter().sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SidonWitness {
    /// Two index pairs `(k, l)` and `(k2, l2)` with equal sums `lambda_k + lambda_l`.
    pub first: (usize, usize),
    pub second: (usize, usize),
    pub sum: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SidonReport {
    pub is_sidon: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<SidonWitness>,
}

/// All sums `lambda_k + lambda_l`, `k <= l`, distinct?
pub fn sidon_check(freq: &FrequencySeq) -> Result<SidonReport> {
    let mut ints = Vec::with_capacity(freq.len());
    for (k, &v) in freq.values().iter().enumerate() {
        if v.fract() != 0.0 || v.abs() >= 2f64.powi(52) {
            return Err(Error::range(format!("lambda[{}]", k + 1), v, "not an integer"));
        }
        ints.push(v as i64);
    }
    if ints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invariant("lambda", "not strictly increasing"));
    }
    let mut seen: HashMap<i64, (usize, usize)> = HashMap::new();
    for k in 0..ints.len() {
        for l in k..ints.len() {
            let s = ints[k] + ints[l];
            if let Some(&first) = seen.get(&s) {
                return Ok(SidonReport {
                    is_sidon: false,
                    witness: Some(SidonWitness {
                        first,
                        second: (k, l),
                        sum: s,
                    }),
                });
            }
            seen.insert(s, (k, l));
        }
    }
    Ok(SidonReport {
        is_sidon: true,
        witness: None,
    })
}

/// `max_n #{k : n <= lambda_k < n + 1}`.
pub fn block_count_bound(freq: &FrequencySeq) -> usize {
    let mut best = 0;
    let mut run = 0;
    let mut current: Option<f64> = None;
    for &l in freq.values() {
        let n = l.floor();
        if current == Some(n) {
            run += 1;
        } else {
            current = Some(n);
            run = 1;
        }
        best = best.max(run);
    }
    best
}

/// Fejér density `tau(t) = (1 - cos t) / (pi t^2)`, written as `2 sin^2(t/2) / (pi t^2)`.
pub fn tau_density(t: f64) -> f64 {
    if t.abs() < 1e-6 {
        let t2 = t * t;
        (0.5 - t2 / 24.0) / PI
    } else {
        let s = (0.5 * t).sin();
        2.0 * s * s / (PI * t * t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TauTransform {
    pub x: f64,
    /// `int_{-T}^{T} cos(xt) tau(t) dt`
    pub value: f64,
    /// `int_{-T}^{T} sin(xt) tau(t) dt`, zero up to rounding.
    pub imag: f64,
    /// `(1 - |x|)_+`
    pub exact: f64,
    /// `2 / (pi T)`, the mass of `tau` outside `[-T, T]`.
    pub tail_bound: f64,
    pub horizon: f64,
    pub step: f64,
}

/// Simpson quadrature of `e^{ixt} tau(t)` on `[-T, T]`, one `2 pi` period at a
/// time, accumulating from the centre outward.
pub fn tau_fourier_numeric(x: f64, horizon: f64, step: f64) -> Result<TauTransform> {
    if !(horizon >= 1e3) {
        return Err(Error::range("horizon", horizon, "must be >= 1000"));
    }
    if !(step > 0.0 && step <= 0.5) {
        return Err(Error::range("step", step, "must lie in (0, 0.5]"));
    }
    let f = |t: f64| Complex64::cis(x * t) * tau_density(t);
    let periods = (horizon / TAU).ceil() as usize;
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..periods {
        let a = j as f64 * TAU;
        let b = ((j + 1) as f64 * TAU).min(horizon);
        let n = Rule::Simpson.intervals(b - a, step);
        acc += integrate_fn(f, a, b, n, Rule::Simpson);
        acc += integrate_fn(f, -b, -a, n, Rule::Simpson);
    }
    Ok(TauTransform {
        x,
        value: acc.re,
        imag: acc.im,
        exact: (1.0 - x.abs()).max(0.0),
        tail_bound: 2.0 / (PI * horizon),
        horizon,
        step,
    })
}

/// `<g_k conj(g_l), g_k' conj(g_l')>_tau = (1 - |(lambda_k - lambda_l) - (lambda_k' - lambda_l')|)_+`.
pub fn exp_quadruple_inner(freq: &FrequencySeq, k: usize, l: usize, k2: usize, l2: usize) -> Result<f64> {
    let v = freq.values();
    for &i in &[k, l, k2, l2] {
        if i >= v.len() {
            return Err(Error::Index { index: i, len: v.len() });
        }
    }
    let x = (v[k] - v[l]) - (v[k2] - v[l2]);
    Ok((1.0 - x.abs()).max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BellmanBoas {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

fn inner(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(a, b)| a * b.conj()).sum()
}

/// `sum_i |<x, y_i>|^2 <= ||x||^2 (max_i ||y_i||^2 + (sum_{i != j} |<y_i, y_j>|^2)^{1/2})`.
pub fn bellman_boas_check(x: &[Complex64], ys: &[Vec<Complex64>]) -> Result<BellmanBoas> {
    if ys.is_empty() {
        return Err(Error::Empty("no vectors y_i".into()));
    }
    if let Some((i, y)) = ys.iter().enumerate().find(|(_, y)| y.len() != x.len()) {
        return Err(Error::invariant(
            format!("y[{}]", i + 1),
            format!("dimension {} differs from {}", y.len(), x.len()),
        ));
    }
    let lhs: f64 = ys.iter().map(|y| inner(x, y).norm_sqr()).sum();
    let max_y = ys.iter().map(|y| inner(y, y).re).fold(0.0, f64::max);
    let mut cross = 0.0;
    for (i, yi) in ys.iter().enumerate() {
        for (j, yj) in ys.iter().enumerate() {
            if i != j {
                cross += inner(yi, yj).norm_sqr();
            }
        }
    }
    let rhs = inner(x, x).re * (max_y + cross.sqrt());
    Ok(BellmanBoas {
        lhs,
        rhs,
        holds: lhs <= rhs * (1.0 + 1e-12),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::StreamRng;
    use crate::series::FrequencyKind;

    fn seq(v: &[f64]) -> FrequencySeq {
        FrequencySeq::explicit(v.to_vec()).unwrap()
    }

    const MIAN_CHOWLA: [f64; 10] = [1.0, 2.0, 4.0, 8.0, 13.0, 21.0, 31.0, 45.0, 66.0, 81.0];

    #[test]
    fn differences() {
        assert_eq!(pairwise_differences(&seq(&[1.0, 2.0])).unwrap().diffs, vec![-1.0, 1.0]);
        let d = pairwise_differences(&seq(&[1.0, 2.0, 3.0])).unwrap();
        assert_eq!(d.diffs, vec![-2.0, -1.0, -1.0, 1.0, 1.0, 2.0]);
        assert_eq!(d.prefix_d[6], 0.0);
        assert_eq!(d.prefix_d2[6], 12.0);
        let d = pairwise_differences(&seq(&[1.0, 2.0, 4.0, 8.0, 13.0])).unwrap();
        assert_eq!(d.len(), 20);
        let mut pos: Vec<f64> = d.diffs.iter().copied().filter(|x| *x > 0.0).collect();
        pos.dedup();
        assert_eq!(pos.len(), 10);
        assert!(pairwise_differences(&seq(&[1.0])).is_err());
    }

    #[test]
    fn quadruple_fixtures() {
        for (l, m) in [(&[1.0, 2.0, 3.0][..], 4.0), (&[1.0, 2.0][..], 0.0), (&[0.0, 10.0, 20.0][..], 4.0)] {
            assert_eq!(quadruple_sum_naive(&seq(l)).unwrap(), m, "{l:?}");
            assert_eq!(quadruple_sum_fast(&seq(l)).unwrap(), m, "{l:?}");
        }
        assert_eq!(quadruple_sum_fast(&seq(&MIAN_CHOWLA)).unwrap(), 0.0);
        assert_eq!(quadruple_sum_naive(&seq(&MIAN_CHOWLA)).unwrap(), 0.0);
        let id = FrequencySeq::builtin(FrequencyKind::Identity, 30).unwrap();
        let (n, f) = (quadruple_sum_naive(&id).unwrap(), quadruple_sum_fast(&id).unwrap());
        assert!((n - f).abs() <= 1e-9 * n, "{n} {f}");
        assert!(quadruple_sum_naive(&FrequencySeq::builtin(FrequencyKind::Identity, 65).unwrap()).is_err());
    }

    #[test]
    fn quadruple_random_equivalence() {
        let mut rng = StreamRng::new(99, 0);
        for trial in 0..30 {
            let n = 2 + (rng.next_u64() % 39) as usize;
            let top = [3.0, 10.0, 100.0][trial % 3];
            let mut l: Vec<f64> = (0..n).map(|_| rng.uniform(0.0, top)).collect();
            l.sort_by(f64::total_cmp);
            let s = seq(&l);
            let (a, b) = (quadruple_sum_naive(&s).unwrap(), quadruple_sum_fast(&s).unwrap());
            assert!((a - b).abs() <= 1e-9 * a.max(1.0), "{a} {b}");
        }
    }

    #[test]
    fn sidon_examples() {
        assert!(sidon_check(&seq(&[1.0, 2.0, 4.0, 8.0, 13.0])).unwrap().is_sidon);
        assert!(sidon_check(&seq(&[1.0, 2.0, 5.0, 11.0, 22.0])).unwrap().is_sidon);
        assert!(sidon_check(&seq(&MIAN_CHOWLA)).unwrap().is_sidon);
        let r = sidon_check(&seq(&[1.0, 2.0, 3.0])).unwrap();
        assert!(!r.is_sidon);
        let w = r.witness.unwrap();
        assert_eq!(w.sum, 4);
        assert_eq!((w.first, w.second), ((0, 2), (1, 1)));
        assert!(sidon_check(&seq(&[1.0, 2.5])).is_err());
        assert!(sidon_check(&seq(&[1.0, 1.0])).is_err());
    }

    #[test]
    fn block_counts() {
        assert_eq!(block_count_bound(&seq(&[1.0, 1.5, 2.5])), 2);
        assert_eq!(block_count_bound(&FrequencySeq::builtin(FrequencyKind::Identity, 20).unwrap()), 1);
        assert_eq!(block_count_bound(&seq(&[1.0, 2.0, 4.0, 8.0, 13.0])), 1);
        assert_eq!(block_count_bound(&seq(&[])), 0);
    }

    #[test]
    fn tau_values() {
        assert_eq!(tau_density(0.0), 0.5 / PI);
        assert!((tau_density(PI) - 2.0 / PI.powi(3)).abs() < 1e-16);
        assert!(tau_density(TAU).abs() < 1e-32);
        let t: f64 = 2e-6;
        assert!((tau_density(t) - tau_density(0.999e-6)).abs() < 1e-12);
    }

    #[test]
    fn tau_transform() {
        for &x in &[0.0, 0.5, 2.0] {
            let r = tau_fourier_numeric(x, 1e4, 0.01).unwrap();
            assert!((r.value - r.exact).abs() <= 1e-3, "{r:?}");
            assert!(r.imag.abs() < 1e-12);
        }
        assert!(tau_fourier_numeric(0.0, 10.0, 0.01).is_err());
    }

    #[test]
    fn quadruple_inner() {
        let s = seq(&[1.0, 2.3, 3.0]);
        assert_eq!(exp_quadruple_inner(&s, 1, 0, 1, 0).unwrap(), 1.0);
        assert!((exp_quadruple_inner(&s, 1, 0, 2, 1).unwrap() - 0.4).abs() < 1e-12);
        let s = seq(&[0.0, 1.0, 3.0]);
        assert_eq!(exp_quadruple_inner(&s, 1, 0, 2, 1).unwrap(), 0.0);
        assert!(exp_quadruple_inner(&s, 3, 0, 0, 0).is_err());
    }

    fn unit(dim: usize, i: usize) -> Vec<Complex64> {
        let mut v = vec![Complex64::new(0.0, 0.0); dim];
        v[i] = Complex64::new(1.0, 0.0);
        v
    }

    #[test]
    fn bellman_boas_fixtures() {
        let r = bellman_boas_check(&unit(3, 0), &[unit(3, 0)]).unwrap();
        assert_eq!((r.lhs, r.rhs), (1.0, 1.0));
        assert!(r.holds);

        let x = vec![Complex64::new(1.0, 2.0), Complex64::new(-0.5, 0.0), Complex64::new(0.0, 3.0)];
        let basis: Vec<_> = (0..3).map(|i| unit(3, i)).collect();
        let r = bellman_boas_check(&x, &basis).unwrap();
        assert_eq!(r.lhs, r.rhs);
        assert!(bellman_boas_check(&x, &[unit(2, 0)]).is_err());
        assert!(bellman_boas_check(&x, &[]).is_err());
    }
}
