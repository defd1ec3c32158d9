//! Empirical distributions of power-gain samples.

use alloc::vec::Vec;

use crate::{Error, Result};

/// Right-continuous empirical CDF, `F(x) = #{v ≤ x} / n`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

/// Builds the CDF of `values`; NaNs are rejected.
pub fn build_cdf(values: &[f64]) -> Result<EmpiricalCdf> {
    if values.is_empty() {
        return Err(Error::EmptySamples);
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::invalid("values", "NaN sample"));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(EmpiricalCdf { sorted })
}

impl EmpiricalCdf {
    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn sorted_values(&self) -> &[f64] {
        &self.sorted
    }

    pub fn eval(&self, x: f64) -> f64 {
        let count = self.sorted.partition_point(|&v| v <= x);
        count as f64 / self.sorted.len() as f64
    }

    /// Lower quantile: the order statistic of rank `⌈pn⌉`, and the minimum
    /// for `p = 0`. `p` is clamped to `[0, 1]`.
    pub fn quantile(&self, p: f64) -> f64 {
        let n = self.sorted.len();
        let p = p.clamp(0.0, 1.0);
        let rank = (p * n as f64).ceil() as usize;
        self.sorted[rank.clamp(1, n) - 1]
    }

    /// `(value, F(value))` at each distinct sample, for plotting.
    pub fn steps(&self) -> Vec<(f64, f64)> {
        let n = self.sorted.len() as f64;
        let mut out: Vec<(f64, f64)> = Vec::new();
        for (i, &v) in self.sorted.iter().enumerate() {
            let f = (i + 1) as f64 / n;
            match out.last_mut() {
                Some(last) if last.0 == v => last.1 = f,
                _ => out.push((v, f)),
            }
        }
        out
    }

    /// Same distribution with every sample mapped through `f`, which must
    /// be non-decreasing (e.g. linear → dB).
    pub fn map_monotone(&self, f: impl Fn(f64) -> f64) -> EmpiricalCdf {
        EmpiricalCdf {
            sorted: self.sorted.iter().map(|&v| f(v)).collect(),
        }
    }
}

pub fn quantile(cdf: &EmpiricalCdf, p: f64) -> f64 {
    cdf.quantile(p)
}

/// Kolmogorov–Smirnov distance `sup_x |F_a(x) − F_b(x)|`.
pub fn ks_distance(a: &EmpiricalCdf, b: &EmpiricalCdf) -> f64 {
    // both CDFs are constant between consecutive points of the merged
    // support, so checking each support point suffices
    let (sa, sb) = (&a.sorted, &b.sorted);
    let (na, nb) = (sa.len() as f64, sb.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut best = 0.0_f64;
    while i < sa.len() || j < sb.len() {
        let x = match (sa.get(i), sb.get(j)) {
            (Some(&u), Some(&v)) => u.min(v),
            (Some(&u), None) => u,
            (None, Some(&v)) => v,
            (None, None) => unreachable!(),
        };
        while i < sa.len() && sa[i] <= x {
            i += 1;
        }
        while j < sb.len() && sb[j] <= x {
            j += 1;
        }
        best = best.max((i as f64 / na - j as f64 / nb).abs());
    }
    best
}

/// True when `quantile(a, p) ≥ quantile(b, p)` at every `p`.
pub fn quantile_dominance(a: &EmpiricalCdf, b: &EmpiricalCdf, ps: &[f64]) -> bool {
    ps.iter().all(|&p| a.quantile(p) >= b.quantile(p))
}

/// Probabilities of the quantile summary, in percent.
pub const SUMMARY_PERCENTILES: [u32; 7] = [1, 5, 10, 25, 50, 75, 90];

/// Quantiles at [`SUMMARY_PERCENTILES`].
pub fn summary_quantiles(cdf: &EmpiricalCdf) -> [(u32, f64); 7] {
    SUMMARY_PERCENTILES.map(|pct| (pct, cdf.quantile(pct as f64 / 100.0)))
}

/// Population variance.
pub fn variance(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn cdf_examples() {
        let c = build_cdf(&[3.0, 1.0, 2.0]).unwrap();
        assert!((c.eval(2.0) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(build_cdf(&[4.0; 5]).unwrap().eval(4.0), 1.0);
        assert_eq!(c.eval(1.0 - 1e-9), 0.0);
        assert_eq!(c.eval(f64::INFINITY), 1.0);
        assert!(build_cdf(&[]).is_err());
        assert!(build_cdf(&[1.0, f64::NAN]).is_err());
    }

    #[test]
    fn quantile_examples() {
        let c = build_cdf(&[4.0, 2.0, 3.0, 1.0]).unwrap();
        assert_eq!(quantile(&c, 0.5), 2.0);
        assert_eq!(quantile(&c, 0.0), 1.0);
        assert_eq!(quantile(&c, 1.0), 4.0);
        assert_eq!(quantile(&c, 0.26), 2.0);
    }

    #[test]
    fn ks_examples() {
        let a = build_cdf(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(ks_distance(&a, &a), 0.0);
        let far = build_cdf(&[10.0, 11.0]).unwrap();
        assert_eq!(ks_distance(&a, &far), 1.0);
        let shifted = build_cdf(&[101.0, 102.0, 103.0]).unwrap();
        assert_eq!(ks_distance(&shifted, &a), 1.0);
        let half = build_cdf(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        assert!((ks_distance(&a, &half) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn dominance_examples() {
        let ps = [0.01, 0.1, 0.5, 0.9];
        let b = build_cdf(&[1.0, 5.0, 2.0, 8.0]).unwrap();
        let a = build_cdf(&[2.0, 6.0, 3.0, 9.0]).unwrap();
        assert!(quantile_dominance(&a, &b, &ps));
        assert!(quantile_dominance(&b, &b, &ps));
        // crossing: a lower at the bottom, higher at the top
        let c = build_cdf(&[0.0, 5.0, 2.0, 20.0]).unwrap();
        assert!(!quantile_dominance(&c, &b, &[0.01]));
        assert!(quantile_dominance(&c, &b, &[0.9]));
    }

    #[test]
    fn steps_collapse_ties() {
        let c = build_cdf(&[1.0, 1.0, 2.0, 3.0]).unwrap();
        assert_eq!(c.steps(), vec![(1.0, 0.5), (2.0, 0.75), (3.0, 1.0)]);
    }

    #[test]
    fn summary_has_seven_levels() {
        let values: Vec<f64> = (1..=100).map(|v| v as f64).collect();
        let s = summary_quantiles(&build_cdf(&values).unwrap());
        assert_eq!(s[0], (1, 1.0));
        assert_eq!(s[4], (50, 50.0));
        assert_eq!(s[6], (90, 90.0));
    }
}
