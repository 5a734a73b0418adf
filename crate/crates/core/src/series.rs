//! Observations and the half-weighted empirical distribution function.

use crate::error::{Error, Result};

/// An ordered univariate series `x_1..x_n` together with its order statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    values: Vec<f64>,
    sorted: Vec<f64>,
}

impl TimeSeries {
    /// Builds a series, rejecting empty input and non-finite observations.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Data("empty series".into()));
        }
        if let Some(i) = values.iter().position(|x| !x.is_finite()) {
            return Err(Error::Data(format!(
                "non-finite observation {} at position {}",
                values[i],
                i + 1
            )));
        }
        let mut sorted = values.clone();
        sorted.sort_by(f64::total_cmp);
        Ok(Self { values, sorted })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false: a series holds at least one observation.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sorted_values(&self) -> &[f64] {
        &self.sorted
    }

    /// Observations `x_{u+1..=v}` (zero-based slice `u..v`).
    pub fn segment(&self, u: usize, v: usize) -> Result<&[f64]> {
        check_range(u, v, self.len())?;
        Ok(&self.values[u..v])
    }

    /// Left-continuous (type-1) empirical quantile: `sorted[ceil(p * n)]`,
    /// with the one-based index clamped to `[1, n]`.
    pub fn quantile(&self, p: f64) -> f64 {
        let n = self.len();
        let idx = (p * n as f64).ceil();
        let idx = if idx.is_nan() { 1 } else { (idx as i64).clamp(1, n as i64) as usize };
        self.sorted[idx - 1]
    }

    /// Mean of `x_{u+1..=v}`.
    pub fn mean(&self, u: usize, v: usize) -> Result<f64> {
        let seg = self.segment(u, v)?;
        Ok(seg.iter().sum::<f64>() / seg.len() as f64)
    }
}

pub(crate) fn check_range(u: usize, v: usize, n: usize) -> Result<()> {
    if u >= v {
        return Err(Error::Domain(format!("empty segment ({u}, {v}]")));
    }
    if v > n {
        return Err(Error::Domain(format!("segment ({u}, {v}] exceeds series length {n}")));
    }
    Ok(())
}

/// Empirical CDF of a contiguous block of observations, with ties counted at half weight.
#[derive(Debug, Clone, Copy)]
pub struct EmpiricalCdf<'a> {
    data: &'a [f64],
}

impl<'a> EmpiricalCdf<'a> {
    pub fn new(data: &'a [f64]) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::Domain("empirical CDF of an empty segment".into()));
        }
        Ok(Self { data })
    }

    /// Segment of `series` covering `x_{u+1..=v}`.
    pub fn of_segment(series: &'a TimeSeries, u: usize, v: usize) -> Result<Self> {
        Ok(Self { data: series.segment(u, v)? })
    }

    /// The segment length `v - u`.
    pub fn denominator(&self) -> usize {
        self.data.len()
    }

    /// Twice the tie-adjusted count: `2 * #{x < t} + #{x = t}`.
    pub fn doubled_count(&self, t: f64) -> usize {
        self.data
            .iter()
            .map(|&x| if x < t { 2 } else if x == t { 1 } else { 0 })
            .sum()
    }

    pub fn at(&self, t: f64) -> f64 {
        self.doubled_count(t) as f64 / (2 * self.data.len()) as f64
    }

    /// Binomial log-likelihood `len * [F log F + (1 - F) log(1 - F)]` at threshold `t`.
    pub fn loglik(&self, t: f64) -> f64 {
        let f = self.at(t);
        self.data.len() as f64 * (xlogx(f) + xlogx(1.0 - f))
    }
}

/// `x log x` with the limit convention `0 log 0 = 0`.
pub fn xlogx(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// `F̂(t)` over `x_{u+1..=v}`.
pub fn empirical_cdf_at(series: &TimeSeries, u: usize, v: usize, t: f64) -> Result<f64> {
    Ok(EmpiricalCdf::of_segment(series, u, v)?.at(t))
}

/// Segment log-likelihood at threshold `t`; lies in `[-(v - u) log 2, 0]`.
pub fn seg_loglik_at(series: &TimeSeries, u: usize, v: usize, t: f64) -> Result<f64> {
    Ok(EmpiricalCdf::of_segment(series, u, v)?.loglik(t))
}
