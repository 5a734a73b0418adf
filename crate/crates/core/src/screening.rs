//! Candidate screening with sliding-window two-sample Cramér–von Mises statistics,
//! and the screened Segment Neighbourhood baseline built on it.

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::search::{segment_neighbourhood_restricted, Segmentation};
use crate::segcost::SegmentCost;
use crate::series::TimeSeries;

/// Half-window `N_I` of the screening step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScreeningConfig {
    pub half_window: usize,
}

impl ScreeningConfig {
    pub fn new(half_window: usize) -> Result<Self> {
        if half_window == 0 {
            return Err(Error::Config("screening half-window must be at least 1".into()));
        }
        Ok(Self { half_window })
    }

    /// `N_I = ceil((log n)^{3/2} / 2)`, at least 1.
    pub fn default_for(n: usize) -> Self {
        let h = ((n as f64).ln().max(0.0).powf(1.5) / 2.0).ceil() as usize;
        Self { half_window: h.max(1) }
    }
}

/// Half-weighted ECDF of a sorted sample at `z`.
fn sorted_cdf(sorted: &[f64], z: f64) -> f64 {
    let below = sorted.partition_point(|&x| x < z);
    let upto = sorted.partition_point(|&x| x <= z);
    (below as f64 + 0.5 * (upto - below) as f64) / sorted.len() as f64
}

/// Two-sample statistic `N1 N2 / (N1 + N2)^2 * sum_z (F1(z) - F2(z))^2` over the pooled points.
pub fn cvm_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut sa = a.to_vec();
    let mut sb = b.to_vec();
    sa.sort_by(f64::total_cmp);
    sb.sort_by(f64::total_cmp);
    let sum: f64 = a
        .iter()
        .chain(b)
        .map(|&z| {
            let d = sorted_cdf(&sa, z) - sorted_cdf(&sb, z);
            d * d
        })
        .sum();
    let (n1, n2) = (a.len() as f64, b.len() as f64);
    n1 * n2 / ((n1 + n2) * (n1 + n2)) * sum
}

/// CvM statistic comparing `x_{c-h+1..=c}` with `x_{c+1..=c+h}`.
pub fn cvm_statistic(series: &TimeSeries, center: usize, half_window: usize) -> Result<f64> {
    let n = series.len();
    if half_window == 0 || center < half_window || center + half_window > n {
        return Err(Error::Domain(format!(
            "window of half-width {half_window} around {center} does not fit in a series of length {n}"
        )));
    }
    let x = series.values();
    Ok(cvm_two_sample(&x[center - half_window..center], &x[center..center + half_window]))
}

/// Positions `c` in `[N_I, n - N_I]` whose statistic is a local maximum within `N_I`.
///
/// On exact ties the leftmost position is kept.
pub fn screen_candidates(series: &TimeSeries, config: ScreeningConfig) -> Result<Vec<usize>> {
    let n = series.len();
    let h = config.half_window;
    if h == 0 {
        return Err(Error::Config("screening half-window must be at least 1".into()));
    }
    if n < 2 * h {
        warn!("series of length {n} is shorter than the screening window 2 * {h}; no candidates");
        return Ok(Vec::new());
    }
    let first = h;
    let last = n - h;
    let stats: Vec<f64> = (first..=last)
        .into_par_iter()
        .map(|c| cvm_statistic(series, c, h).expect("center within range"))
        .collect();
    let stat = |c: usize| stats[c - first];
    let kept = (first..=last)
        .filter(|&c| {
            let s = stat(c);
            let lo = c.saturating_sub(h).max(first);
            let hi = (c + h).min(last);
            (lo..c).all(|w| s > stat(w)) && (c + 1..=hi).all(|w| s >= stat(w))
        })
        .filter(|&c| c > 0 && c < n)
        .collect();
    Ok(kept)
}

/// Screened Segment Neighbourhood Search (NMCD+): changepoints restricted to
/// the screened candidates.
pub fn nmcd_plus<C: SegmentCost + ?Sized>(
    series: &TimeSeries,
    config: ScreeningConfig,
    model: &C,
    max_cpts: usize,
) -> Result<Vec<Segmentation>> {
    if model.len() != series.len() {
        return Err(Error::Domain("cost model and series lengths differ".into()));
    }
    let candidates = screen_candidates(series, config)?;
    segment_neighbourhood_restricted(model, max_cpts, &candidates)
}
