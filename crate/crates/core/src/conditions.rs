//! Block sums and the sufficient convergence conditions built on them.
//!
//! Blocks are half-open, `B_n = sum_{k : n <= lambda_k < n+1} |a_k|`, so every
//! coefficient lands in exactly one block. A closed-block convention would
//! double count boundary frequencies and changes any of the functionals by at
//! most a factor 4.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::series::{APSeries, CoeffSeq, DilatedSeries};

/// Fraction of the total that the last-half increment must exceed to be flagged as diverging.
pub const TREND_THRESHOLD: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct BlockSums {
    pub entries: BTreeMap<i64, f64>,
}

impl BlockSums {
    pub fn total(&self) -> f64 {
        self.entries.values().sum()
    }

    pub fn max_index(&self) -> Option<i64> {
        self.entries.keys().next_back().copied()
    }

    /// Cumulative `sum_{m <= n} B_m^p` for `n = 0..=max_index` (empty blocks contribute 0).
    pub fn cumulative_power(&self, p: f64) -> Vec<f64> {
        let Some(top) = self.max_index() else {
            return Vec::new();
        };
        let mut out = Vec::with_capacity(top as usize + 1);
        let mut acc = 0.0;
        for n in 0..=top {
            if let Some(b) = self.entries.get(&n) {
                acc += b.powf(p);
            }
            out.push(acc);
        }
        out
    }
}

/// Half-open block sums in one left-to-right pass over the (sorted) frequencies.
pub fn block_sums(series: &APSeries) -> Result<BlockSums> {
    let mut entries = BTreeMap::new();
    let mut current: Option<(i64, f64)> = None;
    for (k, (&l, a)) in series.lambdas().iter().zip(series.coeffs()).enumerate() {
        if l < 0.0 {
            return Err(Error::range(format!("lambda[{}]", k + 1), l, "negative frequency"));
        }
        let n = l.floor() as i64;
        current = match current {
            Some((m, acc)) if m == n => Some((m, acc + a.norm())),
            Some((m, acc)) => {
                entries.insert(m, acc);
                Some((n, a.norm()))
            }
            None => Some((n, a.norm())),
        };
    }
    if let Some((m, acc)) = current {
        entries.insert(m, acc);
    }
    Ok(BlockSums { entries })
}

/// `sum_n B_n^p` for `1 <= p <= 2`.
pub fn power_sum(bs: &BlockSums, p: f64) -> Result<f64> {
    if !(1.0..=2.0).contains(&p) {
        return Err(Error::range("p", p, "must lie in [1, 2]"));
    }
    Ok(bs.entries.values().map(|b| b.powf(p)).sum())
}

/// Dyadic-index Wiener sum `sum_n (sum_{k=2^n}^{2^{n+1}-1} |a_k|)^2`; a trailing partial block counts.
pub fn dyadic_wiener_sum(coeff: &CoeffSeq) -> f64 {
    dyadic_blocks(coeff).iter().map(|b| b * b).sum()
}

/// `sum_{k=2^n}^{2^{n+1}-1} |a_k|` per dyadic block `n = 0, 1, ...`.
pub fn dyadic_blocks(coeff: &CoeffSeq) -> Vec<f64> {
    let mut out = Vec::new();
    let a = coeff.values();
    let mut start = 1usize;
    while start <= a.len() {
        let end = (2 * start - 1).min(a.len());
        out.push(a[start - 1..end].iter().map(|c| c.norm()).sum());
        start *= 2;
    }
    out
}

/// `sum_{n=1}^{N} n |a_n|^2`.
pub fn hs_sum(coeff: &CoeffSeq) -> f64 {
    coeff
        .values()
        .iter()
        .enumerate()
        .map(|(k, a)| (k + 1) as f64 * a.norm_sqr())
        .sum()
}

fn hs_cumulative(coeff: &CoeffSeq) -> Vec<f64> {
    let mut acc = 0.0;
    coeff
        .values()
        .iter()
        .enumerate()
        .map(|(k, a)| {
            acc += (k + 1) as f64 * a.norm_sqr();
            acc
        })
        .collect()
}

/// True iff `1 <= p, q <= 2` and `|1/p + 1/q - 3/2| <= tol`.
pub fn check_interpolation_pair(p: f64, q: f64, tol: f64) -> bool {
    (1.0..=2.0).contains(&p) && (1.0..=2.0).contains(&q) && (1.0 / p + 1.0 / q - 1.5).abs() <= tol
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Trend {
    Converging,
    Diverging,
}

/// Advisory flag from a cumulative trace: diverging when the increment over
/// the second half exceeds 5% of the total.
pub fn trend(cumulative: &[f64]) -> Trend {
    let len = cumulative.len();
    if len < 2 {
        return Trend::Converging;
    }
    let total = cumulative[len - 1];
    let half = cumulative[len / 2 - 1];
    if total - half > TREND_THRESHOLD * total {
        Trend::Diverging
    } else {
        Trend::Converging
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionValue {
    pub value: f64,
    pub trend: Trend,
    /// Result the condition feeds.
    pub feeds: &'static str,
}

/// Extra right-hand sides for dilated input.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DilatedBounds {
    /// `sum_j |beta_j|`
    pub inner_l1: f64,
    /// `sum_n B_n(beta)^q`
    pub inner_wiener_q: f64,
    /// `(sum|beta|) (sum_n B_n(alpha)^2)^{1/2}`, l1 inner coefficients.
    pub rhs_inner_l1: f64,
    /// `(sum|alpha|) (sum_n B_n(beta)^2)^{1/2}`, l1 outer coefficients.
    pub rhs_outer_l1: f64,
    /// `(sum_n B_n(alpha)^p)^{1/p} (sum_n B_n(beta)^q)^{1/q}`
    pub rhs_interp: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub wiener_p2: f64,
    pub wiener_p: f64,
    pub hs: f64,
    pub interp_valid: bool,
    pub p: f64,
    pub q: f64,
    pub trend: BTreeMap<&'static str, Trend>,
    pub conditions: BTreeMap<&'static str, ConditionValue>,
    pub block_convention: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dilated: Option<DilatedBounds>,
}

/// Default tolerance for the `1/p + 1/q = 3/2` test.
pub const INTERP_TOL: f64 = 1e-6;

/// Evaluate every applicable condition on a plain series.
pub fn condition_report(series: &APSeries, p: f64, q: f64) -> Result<ConditionReport> {
    let bs = block_sums(series)?;
    let wiener_p2 = power_sum(&bs, 2.0)?;
    let wiener_p = power_sum(&bs, p)?;
    let hs = hs_sum(series.coeff());
    let mut conditions = BTreeMap::new();
    conditions.insert(
        "wiener_p2",
        ConditionValue {
            value: wiener_p2,
            trend: trend(&bs.cumulative_power(2.0)),
            feeds: "maximal inequality and a.e. convergence for general frequencies",
        },
    );
    conditions.insert(
        "wiener_p",
        ConditionValue {
            value: wiener_p,
            trend: trend(&bs.cumulative_power(p)),
            feeds: "outer condition of the (p,q) dilated-series inequality",
        },
    );
    conditions.insert(
        "hs",
        ConditionValue {
            value: hs,
            trend: trend(&hs_cumulative(series.coeff())),
            feeds: "a.e. convergence of Dirichlet series under sum n|a_n|^2 < inf",
        },
    );
    let trend_map = conditions.iter().map(|(k, v)| (*k, v.trend)).collect();
    Ok(ConditionReport {
        wiener_p2,
        wiener_p,
        hs,
        interp_valid: check_interpolation_pair(p, q, INTERP_TOL),
        p,
        q,
        trend: trend_map,
        conditions,
        block_convention: "half-open [n, n+1)",
        dilated: None,
    })
}

/// Conditions on the outer coefficients plus the dilated-series right-hand sides.
pub fn dilated_condition_report(ds: &DilatedSeries, p: f64, q: f64) -> Result<ConditionReport> {
    let mut report = condition_report(&ds.outer_series(), p, q)?;
    let outer = block_sums(&ds.outer_series())?;
    let inner = block_sums(ds.inner())?;
    let inner_wiener_q = power_sum(&inner, q)?;
    let inner_l1 = ds.inner().coeff().l1();
    let bounds = DilatedBounds {
        inner_l1,
        inner_wiener_q,
        rhs_inner_l1: inner_l1 * power_sum(&outer, 2.0)?.sqrt(),
        rhs_outer_l1: ds.outer_coeff().l1() * power_sum(&inner, 2.0)?.sqrt(),
        rhs_interp: power_sum(&outer, p)?.powf(1.0 / p) * inner_wiener_q.powf(1.0 / q),
    };
    report.conditions.insert(
        "inner_wiener_q",
        ConditionValue {
            value: inner_wiener_q,
            trend: trend(&inner.cumulative_power(q)),
            feeds: "inner condition of the (p,q) dilated-series inequality",
        },
    );
    report.trend = report.conditions.iter().map(|(k, v)| (*k, v.trend)).collect();
    report.dilated = Some(bounds);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::StreamRng;
    use crate::series::{FrequencyKind, FrequencySeq};
    use num_complex::Complex64;

    fn ones(n: usize) -> CoeffSeq {
        CoeffSeq::from_real(&vec![1.0; n])
    }

    fn dyadic_example() -> APSeries {
        APSeries::new(FrequencySeq::builtin(FrequencyKind::Log2, 8).unwrap(), ones(8)).unwrap()
    }

    #[test]
    fn block_sums_examples() {
        let bs = block_sums(&dyadic_example()).unwrap();
        let want: BTreeMap<i64, f64> = [(0, 1.0), (1, 2.0), (2, 4.0), (3, 1.0)].into_iter().collect();
        assert_eq!(bs.entries, want);

        let s = APSeries::from_parts(&[1.0, 1.999, 2.0], ones(3).values()).unwrap();
        let bs = block_sums(&s).unwrap();
        assert_eq!(bs.entries[&1], 2.0);
        assert_eq!(bs.entries[&2], 1.0);

        let empty = APSeries::from_parts(&[], &[]).unwrap();
        assert!(block_sums(&empty).unwrap().entries.is_empty());

        let neg = APSeries::from_parts(&[-0.5], ones(1).values()).unwrap();
        assert!(block_sums(&neg).is_err());
    }

    #[test]
    fn power_sum_examples() {
        let bs = block_sums(&dyadic_example()).unwrap();
        assert_eq!(power_sum(&bs, 2.0).unwrap(), 22.0);
        assert_eq!(power_sum(&bs, 1.0).unwrap(), 8.0);
        let single = BlockSums {
            entries: [(3, 0.7)].into_iter().collect(),
        };
        assert_eq!(power_sum(&single, 1.5).unwrap(), 0.7f64.powf(1.5));
        assert!(power_sum(&bs, 0.9).is_err());
        assert!(power_sum(&bs, 2.1).is_err());
    }

    #[test]
    fn hs_examples() {
        let a = CoeffSeq::from_real(&[1.0, 0.5, 1.0 / 3.0]);
        assert!((hs_sum(&a) - 11.0 / 6.0).abs() < 1e-15);
        assert_eq!(hs_sum(&CoeffSeq::from_real(&[0.0; 5])), 0.0);

        let mut v = vec![0.0; 64];
        let b = [0.3, -1.0, 0.25, 2.0, 0.5, 0.1, 0.9];
        for (j, bj) in b.iter().enumerate() {
            v[(1usize << j) - 1] = *bj;
        }
        let oracle: f64 = b.iter().enumerate().map(|(j, bj)| (1u64 << j) as f64 * bj * bj).sum();
        assert!((hs_sum(&CoeffSeq::from_real(&v)) - oracle).abs() < 1e-12);
    }

    #[test]
    fn interpolation_pairs() {
        assert!(check_interpolation_pair(4.0 / 3.0, 4.0 / 3.0, 1e-12));
        assert!(check_interpolation_pair(1.0, 2.0, 0.0));
        assert!(!check_interpolation_pair(2.0, 2.0, 1e-6));
        assert!(check_interpolation_pair(1.3333333, 1.3333333, 1e-6));
        assert!(!check_interpolation_pair(0.9, 3.0, 1.0));
    }

    #[test]
    fn partition_and_modulus_only() {
        let mut rng = StreamRng::new(17, 0);
        let mut lambda: Vec<f64> = (0..300).map(|_| rng.uniform(0.0, 40.0)).collect();
        lambda.sort_by(f64::total_cmp);
        let a: Vec<Complex64> = (0..300).map(|_| rng.complex(2.0)).collect();
        let s = APSeries::from_parts(&lambda, &a).unwrap();
        let bs = block_sums(&s).unwrap();
        let l1 = s.coeff().l1();
        assert!((bs.total() - l1).abs() <= 1e-12 * l1);

        let rotated: Vec<Complex64> = a
            .iter()
            .map(|c| c * Complex64::cis(rng.uniform(0.0, 6.3)))
            .collect();
        let r = APSeries::from_parts(&lambda, &rotated).unwrap();
        let rb = block_sums(&r).unwrap();
        // Rotation perturbs moduli by rounding only.
        for (x, y) in bs.entries.values().zip(rb.entries.values()) {
            assert!((x - y).abs() <= 1e-13 * x.max(1.0));
        }

        // Sign flips and conjugation keep moduli exact, so every value is bitwise equal.
        let flipped: Vec<Complex64> = a
            .iter()
            .enumerate()
            .map(|(k, c)| if k % 3 == 0 { -c.conj() } else { Complex64::new(-c.im, c.re) })
            .collect();
        let f = APSeries::from_parts(&lambda, &flipped).unwrap();
        let r1 = condition_report(&s, 1.5, 1.5).unwrap();
        let r2 = condition_report(&f, 1.5, 1.5).unwrap();
        assert_eq!(r1.wiener_p2.to_bits(), r2.wiener_p2.to_bits());
        assert_eq!(r1.wiener_p.to_bits(), r2.wiener_p.to_bits());
        assert_eq!(r1.hs.to_bits(), r2.hs.to_bits());
    }

    #[test]
    fn dyadic_endpoint_consistency() {
        let mut rng = StreamRng::new(23, 0);
        let n = (1 << 10) - 1;
        let a: Vec<Complex64> = (0..n).map(|_| rng.complex(1.0)).collect();
        let s = APSeries::new(FrequencySeq::builtin(FrequencyKind::Log2, n).unwrap(), CoeffSeq::new(a)).unwrap();
        let bs = block_sums(&s).unwrap();
        let blocks = dyadic_blocks(s.coeff());
        assert_eq!(bs.entries.len(), blocks.len());
        for (n, b) in blocks.iter().enumerate() {
            assert_eq!(bs.entries[&(n as i64)], *b);
        }
        assert_eq!(power_sum(&bs, 2.0).unwrap(), dyadic_wiener_sum(s.coeff()));
    }

    #[test]
    fn report_examples() {
        let n = 200;
        let a: Vec<f64> = (1..=n).map(|k| 1.0 / (k * k) as f64).collect();
        let s = APSeries::new(
            FrequencySeq::builtin(FrequencyKind::Identity, n).unwrap(),
            CoeffSeq::from_real(&a),
        )
        .unwrap();
        let r = condition_report(&s, 4.0 / 3.0, 4.0 / 3.0).unwrap();
        assert!(r.wiener_p2.is_finite() && r.hs.is_finite());
        assert!(r.trend.values().all(|t| *t == Trend::Converging));
        assert!(r.interp_valid);

        let zero = APSeries::new(
            FrequencySeq::builtin(FrequencyKind::Identity, 10).unwrap(),
            CoeffSeq::from_real(&[0.0; 10]),
        )
        .unwrap();
        let r = condition_report(&zero, 2.0, 2.0).unwrap();
        assert_eq!((r.wiener_p2, r.wiener_p, r.hs), (0.0, 0.0, 0.0));
        assert!(r.trend.values().all(|t| *t == Trend::Converging));
        assert!(!r.interp_valid);
    }

    #[test]
    fn rademacher_coefficients_diverge() {
        let n = 1 << 16;
        let mut rng = StreamRng::new(1, 0);
        let a: Vec<f64> = (1..=n)
            .map(|k| rng.rademacher() / (k as f64 * ((k + 1) as f64).ln().sqrt()))
            .collect();
        let s = APSeries::new(
            FrequencySeq::builtin(FrequencyKind::NaturalLog, n).unwrap(),
            CoeffSeq::from_real(&a),
        )
        .unwrap();
        let r = condition_report(&s, 2.0, 1.0).unwrap();
        assert_eq!(r.trend["wiener_p2"], Trend::Diverging);
    }

    #[test]
    fn appending_never_decreases() {
        let mut rng = StreamRng::new(29, 0);
        let mut lambda = Vec::new();
        let mut a = Vec::new();
        let mut prev = [0.0f64; 3];
        let mut l = 0.0;
        for _ in 0..200 {
            l += rng.uniform(0.0, 0.6);
            lambda.push(l);
            a.push(rng.complex(1.0));
            let s = APSeries::from_parts(&lambda, &a).unwrap();
            let bs = block_sums(&s).unwrap();
            for (i, p) in [1.0, 1.5, 2.0].iter().enumerate() {
                let v = power_sum(&bs, *p).unwrap();
                assert!(v >= prev[i]);
                prev[i] = v;
            }
        }
    }

    #[test]
    fn dilated_report_bounds() {
        let outer = APSeries::from_parts(&[1.0, 1.5, 2.5], ones(3).values()).unwrap();
        let inner = APSeries::from_parts(&[1.0, 2.0], &[Complex64::new(1.0, 0.0), Complex64::new(0.5, 0.0)]).unwrap();
        let ds = DilatedSeries::from_series(outer, inner);
        let r = dilated_condition_report(&ds, 1.0, 2.0).unwrap();
        let d = r.dilated.unwrap();
        // Outer blocks (2, 1), inner blocks (1, 0.5).
        assert_eq!(d.inner_l1, 1.5);
        assert!((d.rhs_inner_l1 - 1.5 * 5f64.sqrt()).abs() < 1e-15);
        assert!((d.rhs_outer_l1 - 3.0 * 1.25f64.sqrt()).abs() < 1e-15);
        assert!((d.rhs_interp - 3.0 * 1.25f64.sqrt()).abs() < 1e-15);
        assert!(r.interp_valid);
    }

    #[test]
    fn trend_rule() {
        assert_eq!(trend(&[]), Trend::Converging);
        assert_eq!(trend(&[5.0]), Trend::Converging);
        assert_eq!(trend(&[1.0, 1.0, 1.0, 1.01]), Trend::Converging);
        assert_eq!(trend(&[1.0, 1.0, 1.0, 1.2]), Trend::Diverging);
    }
}
