//! Degree histograms, the limiting degree proportions `f_k`, and discrete
//! power-law fitting.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::graph::{DegreeKind, EvolvingGraph};

/// Minimum number of tail observations accepted by the power-law fit.
pub const MIN_TAIL_SAMPLES: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeHistogram {
    pub kind: DegreeKind,
    /// Number of vertices counted (sum of all counts).
    pub n: u64,
    /// Degree `k` -> number of vertices with degree `k`.
    pub counts: BTreeMap<usize, u64>,
}

impl DegreeHistogram {
    pub fn from_counts(kind: DegreeKind, counts: BTreeMap<usize, u64>) -> Self {
        let n = counts.values().sum();
        Self { kind, n, counts }
    }

    pub fn count(&self, k: usize) -> u64 {
        self.counts.get(&k).copied().unwrap_or(0)
    }

    /// `d_k / n`.
    pub fn proportion(&self, k: usize) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.count(k) as f64 / self.n as f64
        }
    }

    /// `sum_k k * d_k`.
    pub fn degree_sum(&self) -> u64 {
        self.counts.iter().map(|(&k, &c)| k as u64 * c).sum()
    }

    /// Adds the counts of `other` (same degree kind) into `self`.
    pub fn merge(&mut self, other: &DegreeHistogram) -> Result<()> {
        if self.kind != other.kind {
            return Err(Error::InvalidParameter(format!(
                "cannot pool {:?} and {:?} histograms",
                self.kind, other.kind
            )));
        }
        for (&k, &c) in &other.counts {
            *self.counts.entry(k).or_insert(0) += c;
        }
        self.n += other.n;
        Ok(())
    }

    /// Pools several histograms of the same kind.
    pub fn pooled<'a, I>(hists: I) -> Result<Option<DegreeHistogram>>
    where
        I: IntoIterator<Item = &'a DegreeHistogram>,
    {
        let mut it = hists.into_iter();
        let Some(first) = it.next() else {
            return Ok(None);
        };
        let mut acc = first.clone();
        for h in it {
            acc.merge(h)?;
        }
        Ok(Some(acc))
    }

    /// Two-column CSV `k,count`, ascending `k`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "k,count")?;
        for (k, c) in &self.counts {
            writeln!(w, "{k},{c}")?;
        }
        Ok(())
    }
}

pub fn degree_histogram(g: &EvolvingGraph, kind: DegreeKind) -> DegreeHistogram {
    let mut counts = BTreeMap::new();
    for rec in g.vertices() {
        *counts.entry(rec.degree(kind)).or_insert(0) += 1;
    }
    DegreeHistogram::from_counts(kind, counts)
}

/// Limiting proportion of vertices of degree `k`.
///
/// Solution of `(2 + xi + k + delta) f_k = (k - 1 + delta) f_{k-1} + (2 + xi) [k = m]`
/// with `f_j = 0` for `j < m`:
///
/// `f_m = (2 + xi) / (2 + xi + m + delta)` and, for `k >= m`,
/// `f_k = f_m * G(k + delta) G(m + 3 + xi + delta) / (G(k + 3 + xi + delta) G(m + delta))`,
/// evaluated in log space.
pub fn analytic_fk(k: usize, m: usize, xi: f64, delta: f64) -> Result<f64> {
    if m < 1 || !(xi.is_finite() && xi > 0.0) || !(delta.is_finite() && delta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "f_k needs m >= 1, xi > 0, delta > 0 (got m={m}, xi={xi}, delta={delta})"
        )));
    }
    if k < m {
        return Ok(0.0);
    }
    let (k, m) = (k as f64, m as f64);
    let head = (2.0 + xi) / (2.0 + xi + m + delta);
    let log_ratio =
        ln_gamma(k + delta) + ln_gamma(m + 3.0 + xi + delta) - ln_gamma(k + 3.0 + xi + delta) - ln_gamma(m + delta);
    Ok(head * log_ratio.exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub std_error: f64,
    pub k_min: usize,
    pub tail_samples: u64,
}

/// Number of terms summed directly before switching to Euler-Maclaurin.
const DIRECT_TERMS: usize = 256;

/// `(sum k^-a, sum k^-a ln k, sum k^-a ln^2 k)` over `k >= q`.
fn zeta_moments(a: f64, q: usize) -> [f64; 3] {
    let mut s = [0.0f64; 3];
    for k in q..q + DIRECT_TERMS {
        let kf = k as f64;
        let l = kf.ln();
        let p = kf.powf(-a);
        s[0] += p;
        s[1] += p * l;
        s[2] += p * l * l;
    }
    // tail from K: integral + f(K)/2 - f'(K)/12
    let kf = (q + DIRECT_TERMS) as f64;
    let l = kf.ln();
    let b = a - 1.0;
    let p = kf.powf(-a);
    let lead = kf.powf(-b);
    let integral = [
        lead / b,
        lead * (l / b + 1.0 / (b * b)),
        lead * (l * l / b + 2.0 * l / (b * b) + 2.0 / (b * b * b)),
    ];
    let f = [p, p * l, p * l * l];
    let dp = p / kf;
    let df = [-a * dp, dp * (1.0 - a * l), dp * (2.0 * l - a * l * l)];
    for j in 0..3 {
        s[j] += integral[j] + f[j] / 2.0 - df[j] / 12.0;
    }
    s
}

/// Discrete maximum-likelihood exponent of `P(k) ~ k^-alpha` over the
/// tail `k >= k_min`.
///
/// The estimate solves `E_alpha[ln k] = mean(ln k)` for the zeta
/// distribution truncated below at `k_min`; the standard error is
/// `1 / sqrt(N * Var_alpha[ln k])`.
pub fn fit_power_law_exponent(h: &DegreeHistogram, k_min: usize) -> Result<PowerLawFit> {
    if k_min < 1 {
        return Err(Error::InvalidParameter("k_min must be at least 1".into()));
    }
    let tail: Vec<(usize, u64)> = h
        .counts
        .range(k_min..)
        .filter(|(_, &c)| c > 0)
        .map(|(&k, &c)| (k, c))
        .collect();
    let samples: u64 = tail.iter().map(|&(_, c)| c).sum();
    if samples < MIN_TAIL_SAMPLES as u64 {
        return Err(Error::InsufficientTail {
            k_min,
            found: samples as usize,
            needed: MIN_TAIL_SAMPLES,
        });
    }
    if tail.len() < 2 {
        return Err(Error::DegenerateHistogram);
    }
    let mean_log = tail.iter().map(|&(k, c)| c as f64 * (k as f64).ln()).sum::<f64>() / samples as f64;
    let model_mean = |a: f64| {
        let s = zeta_moments(a, k_min);
        s[1] / s[0]
    };
    // model_mean decreases from +inf (a -> 1) towards ln k_min
    let (mut lo, mut hi) = (1.0 + 1e-6, 2.0);
    while model_mean(hi) > mean_log {
        lo = hi;
        hi *= 2.0;
        if hi > 1e3 {
            return Err(Error::DegenerateHistogram);
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if model_mean(mid) > mean_log {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    let exponent = 0.5 * (lo + hi);
    let s = zeta_moments(exponent, k_min);
    let var = s[2] / s[0] - (s[1] / s[0]).powi(2);
    Ok(PowerLawFit {
        exponent,
        std_error: 1.0 / (samples as f64 * var).sqrt(),
        k_min,
        tail_samples: samples,
    })
}
