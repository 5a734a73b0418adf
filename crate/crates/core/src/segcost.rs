//! Segment cost models.
//!
//! Three models are provided, all nonnegative and subadditive:
//!
//! * [`CostKind::NonparametricFull`]: minus the binomial log-likelihood of the
//!   segment's empirical CDF, summed over every data point of the full series
//!   with weight `n / ((r - 0.5)(n - r + 0.5))` for rank `r`. `O(n)` per segment.
//! * [`CostKind::NonparametricQuantile`]: the same integrand evaluated at `K`
//!   empirical quantiles chosen densely in both tails, with equal weights
//!   `2 log(2n - 1) / K`. `O(K)` per segment.
//! * [`CostKind::GaussianPiecewiseLinear`]: residual sum of squares of the
//!   least-squares line through the segment. `O(1)` per segment.
//!
//! The nonparametric models precompute, for every distinct threshold, prefix
//! sums of `2 * 1{x < t} + 1{x = t}`. The segment log-likelihood at a threshold
//! then only needs the doubled count `a` and the length `L`:
//! `L [F log F + (1 - F) log(1 - F)] = (g(a) + g(2L - a) - g(2L)) / 2` with
//! `g(x) = x log x`, read from a table over the integers `0..=2n`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{check_range, TimeSeries};

/// The `K = ceil(4 log n)` default for the number of quantiles.
pub fn default_quantile_count(n: usize) -> usize {
    ((4.0 * (n as f64).ln()).ceil() as usize).clamp(1, n.max(1))
}

/// Thresholds for the `K`-term approximation of the weighted integral cost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantileGrid {
    /// Probability levels `p_1 < ... < p_K`, symmetric about 0.5.
    pub levels: Vec<f64>,
    /// Empirical quantiles of the full series at `levels` (duplicates kept).
    pub points: Vec<f64>,
    /// Equal weight `2 log(2n - 1) / K` applied to every term.
    pub weight: f64,
}

impl QuantileGrid {
    pub fn k(&self) -> usize {
        self.points.len()
    }
}

/// Probability levels `p_k = 1 / (1 + (2n - 1) exp(-log(2n - 1) (2k - 1) / K))`.
pub fn quantile_levels(n: usize, k: usize) -> Vec<f64> {
    let scale = (2 * n - 1) as f64;
    let c = scale.ln();
    (1..=k)
        .map(|i| {
            let x = (2 * i - 1) as f64 / k as f64;
            1.0 / (1.0 + scale * (-c * x).exp())
        })
        .collect()
}

pub fn build_quantile_grid(series: &TimeSeries, k: usize) -> Result<QuantileGrid> {
    let n = series.len();
    if k < 1 || k > n {
        return Err(Error::Config(format!("K = {k} must lie in [1, {n}]")));
    }
    let levels = quantile_levels(n, k);
    let points = levels.iter().map(|&p| series.quantile(p)).collect();
    let weight = 2.0 * ((2 * n - 1) as f64).ln() / k as f64;
    Ok(QuantileGrid { levels, points, weight })
}

/// Which segment cost to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CostKind {
    NonparametricFull,
    /// `K` quantile thresholds; `None` selects `ceil(4 log n)`.
    NonparametricQuantile(Option<usize>),
    GaussianPiecewiseLinear,
}

impl CostKind {
    pub fn default_min_seg_len(&self) -> usize {
        match self {
            CostKind::GaussianPiecewiseLinear => 2,
            _ => 1,
        }
    }
}

/// Anything that scores segments `x_{u+1..=v}` of a series of fixed length.
///
/// Solvers only rely on this trait, so tests can plug in arbitrary costs.
pub trait SegmentCost: Sync {
    /// Length `n` of the underlying series.
    fn len(&self) -> usize;

    /// Cost of `x_{u+1..=v}`; callers guarantee `u < v <= n`.
    fn cost(&self, u: usize, v: usize) -> f64;

    fn default_min_seg_len(&self) -> usize {
        1
    }
}

#[derive(Debug, Clone)]
struct CountTables {
    /// Number of distinct thresholds (columns).
    width: usize,
    /// Row `v` holds the doubled counts over `x_1..x_v`, `(n + 1) * width` entries.
    prefix: Vec<u32>,
    /// Per-column weight (threshold multiplicity times the model weight).
    weights: Vec<f64>,
    /// `g(i) = i log i` for `i in 0..=2n`.
    xlogx: Vec<f64>,
}

impl CountTables {
    /// Builds tables for thresholds given as `(value, weight)` pairs sorted by value.
    /// Equal thresholds are merged and their weights summed.
    fn new(values: &[f64], thresholds: impl IntoIterator<Item = (f64, f64)>) -> Self {
        let mut cols: Vec<(f64, f64)> = Vec::new();
        for (t, w) in thresholds {
            match cols.last_mut() {
                Some(last) if last.0 == t => last.1 += w,
                _ => cols.push((t, w)),
            }
        }
        let n = values.len();
        let width = cols.len();
        let mut prefix = vec![0u32; (n + 1) * width];
        for (j, &x) in values.iter().enumerate() {
            let (prev, next) = prefix.split_at_mut((j + 1) * width);
            let prev = &prev[j * width..];
            let next = &mut next[..width];
            for (c, &(t, _)) in cols.iter().enumerate() {
                let inc = if x < t {
                    2
                } else if x == t {
                    1
                } else {
                    0
                };
                next[c] = prev[c] + inc;
            }
        }
        let xlogx = (0..=2 * n)
            .map(|i| if i == 0 { 0.0 } else { i as f64 * (i as f64).ln() })
            .collect();
        Self {
            width,
            prefix,
            weights: cols.into_iter().map(|(_, w)| w).collect(),
            xlogx,
        }
    }

    fn cost(&self, u: usize, v: usize) -> f64 {
        let two_len = 2 * (v - u);
        let g_total = self.xlogx[two_len];
        let lo = &self.prefix[u * self.width..(u + 1) * self.width];
        let hi = &self.prefix[v * self.width..(v + 1) * self.width];
        let mut acc = 0.0;
        for ((&a_hi, &a_lo), &w) in hi.iter().zip(lo).zip(&self.weights) {
            let a = (a_hi - a_lo) as usize;
            // g(a) + g(2L - a) - g(2L) = 2 * loglik
            acc += w * (g_total - self.xlogx[a] - self.xlogx[two_len - a]);
        }
        (0.5 * acc).max(0.0)
    }
}

#[derive(Debug, Clone)]
struct LinearTables {
    /// Prefix sums of `y`, `i * y`, `y^2`, with `y` centred on the series mean
    /// and `i` the one-based index.
    sy: Vec<f64>,
    siy: Vec<f64>,
    syy: Vec<f64>,
}

impl LinearTables {
    fn new(values: &[f64]) -> Self {
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let mut sy = Vec::with_capacity(n + 1);
        let mut siy = Vec::with_capacity(n + 1);
        let mut syy = Vec::with_capacity(n + 1);
        let (mut a, mut b, mut c) = (0.0, 0.0, 0.0);
        sy.push(a);
        siy.push(b);
        syy.push(c);
        for (i, &x) in values.iter().enumerate() {
            let y = x - mean;
            a += y;
            b += (i + 1) as f64 * y;
            c += y * y;
            sy.push(a);
            siy.push(b);
            syy.push(c);
        }
        Self { sy, siy, syy }
    }

    fn cost(&self, u: usize, v: usize) -> f64 {
        let len = (v - u) as f64;
        if v - u < 3 {
            return 0.0;
        }
        let sy = self.sy[v] - self.sy[u];
        let siy = self.siy[v] - self.siy[u];
        let syy = self.syy[v] - self.syy[u];
        // indices u+1..=v centred on their mean (u + v + 1) / 2
        let centre = (u + v + 1) as f64 / 2.0;
        let sxy = siy - centre * sy;
        let sxx = len * (len * len - 1.0) / 12.0;
        let see = syy - sy * sy / len;
        (see - sxy * sxy / sxx).max(0.0)
    }
}

#[derive(Debug, Clone)]
enum Tables {
    Counts(CountTables),
    Linear(LinearTables),
}

/// A segment cost model with its prefix tables precomputed over one series.
///
/// Immutable after construction, so it can be shared across threads.
#[derive(Debug, Clone)]
pub struct CostModel {
    kind: CostKind,
    n: usize,
    grid: Option<QuantileGrid>,
    tables: Tables,
}

impl CostModel {
    pub fn new(series: &TimeSeries, kind: CostKind) -> Result<Self> {
        let n = series.len();
        let values = series.values();
        let (kind, grid, tables) = match kind {
            CostKind::NonparametricQuantile(k) => {
                let k = k.unwrap_or_else(|| default_quantile_count(n));
                let grid = build_quantile_grid(series, k)?;
                let mut pts = grid.points.clone();
                pts.sort_by(f64::total_cmp);
                let w = grid.weight;
                let tables = CountTables::new(values, pts.into_iter().map(|t| (t, w)));
                (CostKind::NonparametricQuantile(Some(k)), Some(grid), Tables::Counts(tables))
            }
            CostKind::NonparametricFull => {
                let nf = n as f64;
                let thresholds = series.sorted_values().iter().enumerate().map(|(i, &t)| {
                    let r = (i + 1) as f64;
                    (t, nf / ((r - 0.5) * (nf - r + 0.5)))
                });
                (kind, None, Tables::Counts(CountTables::new(values, thresholds)))
            }
            CostKind::GaussianPiecewiseLinear => (kind, None, Tables::Linear(LinearTables::new(values))),
        };
        Ok(Self { kind, n, grid, tables })
    }

    /// The resolved kind (an automatic `K` is replaced by its value).
    pub fn kind(&self) -> CostKind {
        self.kind
    }

    pub fn grid(&self) -> Option<&QuantileGrid> {
        self.grid.as_ref()
    }

    /// Number of distinct thresholds held in the count tables (0 for the linear model).
    pub fn threshold_columns(&self) -> usize {
        match &self.tables {
            Tables::Counts(t) => t.width,
            Tables::Linear(_) => 0,
        }
    }

    /// Checked segment cost of `x_{u+1..=v}`.
    pub fn segment_cost(&self, u: usize, v: usize) -> Result<f64> {
        check_range(u, v, self.n)?;
        Ok(self.cost(u, v))
    }
}

impl SegmentCost for CostModel {
    fn len(&self) -> usize {
        self.n
    }

    #[inline]
    fn cost(&self, u: usize, v: usize) -> f64 {
        match &self.tables {
            Tables::Counts(t) => t.cost(u, v),
            Tables::Linear(t) => t.cost(u, v),
        }
    }

    fn default_min_seg_len(&self) -> usize {
        self.kind.default_min_seg_len()
    }
}
