//! Simulation models, detection metrics and the benchmark runner.
//!
//! Replication `r` of a study draws from a ChaCha8 stream seeded with the
//! base seed and positioned on stream `r`, so replications are independent of
//! execution order and thread count.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal, StudentT};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::penalty::Penalty;
use crate::screening::{nmcd_plus, ScreeningConfig};
use crate::search::{pelt, segment_neighbourhood, sic_select, Segmentation};
use crate::segcost::{CostKind, CostModel, SegmentCost as _};
use crate::series::TimeSeries;

pub const MODEL1_FRACTIONS: [f64; 11] = [0.10, 0.13, 0.15, 0.23, 0.25, 0.40, 0.44, 0.65, 0.76, 0.78, 0.81];
pub const MODEL1_JUMPS: [f64; 11] = [2.01, -2.51, 1.51, -2.01, 2.51, -2.11, 1.05, 2.16, -1.56, 2.56, -2.11];
pub const MODEL2_FRACTIONS: [f64; 4] = [0.20, 0.40, 0.65, 0.85];
pub const MODEL2_JUMPS: [f64; 4] = [3.0, 0.0, -2.0, 0.0];
pub const MODEL2_SCALES: [f64; 4] = [1.0, 5.0, 1.0, 0.25];
pub const MODEL3_FRACTIONS: [f64; 3] = [0.20, 0.50, 0.75];

/// Noise distribution for Models 1 and 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ErrorDist {
    Normal,
    StudentT3,
    /// Chi-square with one degree of freedom, standardized to mean 0 and variance 1.
    StdChiSq1,
    /// Chi-square with three degrees of freedom, standardized.
    StdChiSq3,
}

impl ErrorDist {
    pub const NAMES: [&'static str; 4] = ["normal", "t3", "chisq1", "chisq3"];

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            ErrorDist::Normal => rng.sample(StandardNormal),
            ErrorDist::StudentT3 => StudentT::new(3.0).expect("valid dof").sample(rng),
            ErrorDist::StdChiSq1 => std_chisq(1.0, rng),
            ErrorDist::StdChiSq3 => std_chisq(3.0, rng),
        }
    }
}

fn std_chisq<R: Rng + ?Sized>(k: f64, rng: &mut R) -> f64 {
    let x: f64 = ChiSquared::new(k).expect("valid dof").sample(rng);
    (x - k) / (2.0 * k).sqrt()
}

impl FromStr for ErrorDist {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "normal" | "n01" | "gaussian" => Ok(ErrorDist::Normal),
            "t3" | "student-t3" | "studentt3" => Ok(ErrorDist::StudentT3),
            "chisq1" | "chi2-1" => Ok(ErrorDist::StdChiSq1),
            "chisq3" | "chi2-3" => Ok(ErrorDist::StdChiSq3),
            other => Err(Error::Config(format!(
                "unknown error distribution '{other}'; valid options: {}",
                Self::NAMES.join(", ")
            ))),
        }
    }
}

impl fmt::Display for ErrorDist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let i = match self {
            ErrorDist::Normal => 0,
            ErrorDist::StudentT3 => 1,
            ErrorDist::StdChiSq1 => 2,
            ErrorDist::StdChiSq3 => 3,
        };
        f.write_str(Self::NAMES[i])
    }
}

/// One simulation design.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimSpec {
    /// 1, 2 or 3.
    pub model_id: u8,
    pub n: usize,
    pub error_dist: ErrorDist,
    pub sigma: f64,
    pub seed: u64,
}

impl SimSpec {
    pub fn new(model_id: u8, n: usize, error_dist: ErrorDist, seed: u64) -> Self {
        Self { model_id, n, error_dist, sigma: 1.0, seed }
    }
}

/// Changepoint indices `floor(fraction * n)` for a model.
pub fn true_changepoints(model_id: u8, n: usize) -> Result<Vec<usize>> {
    let fractions: &[f64] = match model_id {
        1 => &MODEL1_FRACTIONS,
        2 => &MODEL2_FRACTIONS,
        3 => &MODEL3_FRACTIONS,
        other => {
            return Err(Error::Config(format!("unknown model {other}; valid options: 1, 2, 3")));
        }
    };
    // the small offset keeps products like 0.29 * 100 from flooring to 28
    let cps: Vec<usize> = fractions.iter().map(|f| (f * n as f64 + 1e-9).floor() as usize).collect();
    if cps.iter().any(|&c| c == 0 || c >= n) || cps.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config(format!(
            "n = {n} is too small: model {model_id} changepoints {cps:?} are not distinct interior indices"
        )));
    }
    Ok(cps)
}

fn replication_rng(seed: u64, rep: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(rep);
    rng
}

/// Draws the series for replication 0 of `spec`.
pub fn generate(spec: &SimSpec) -> Result<(TimeSeries, Vec<usize>)> {
    generate_replication(spec, 0)
}

/// Draws the series for replication `rep` of `spec`.
///
/// Observation `i` (one-based) lies after changepoint `tau` when `i > tau`.
pub fn generate_replication(spec: &SimSpec, rep: u64) -> Result<(TimeSeries, Vec<usize>)> {
    if !(spec.sigma.is_finite() && spec.sigma > 0.0) {
        return Err(Error::Config(format!("sigma must be positive, got {}", spec.sigma)));
    }
    let cps = true_changepoints(spec.model_id, spec.n)?;
    let mut rng = replication_rng(spec.seed, rep);
    let mut values = Vec::with_capacity(spec.n);
    let mut seg = 0usize;
    for i in 1..=spec.n {
        while seg < cps.len() && i > cps[seg] {
            seg += 1;
        }
        let x = match spec.model_id {
            1 => {
                let level: f64 = MODEL1_JUMPS[..seg].iter().sum();
                level + spec.sigma * spec.error_dist.sample(&mut rng)
            }
            2 => {
                let level: f64 = MODEL2_JUMPS[..seg].iter().sum();
                let scale: f64 = MODEL2_SCALES[..seg].iter().product();
                level + spec.sigma * spec.error_dist.sample(&mut rng) * scale
            }
            _ => {
                let e = match seg {
                    1 => std_chisq(3.0, &mut rng),
                    2 => std_chisq(1.0, &mut rng),
                    _ => rng.sample(StandardNormal),
                };
                spec.sigma * e
            }
        };
        values.push(x);
    }
    Ok((TimeSeries::new(values)?, cps))
}

/// Model 1's mean pattern repeated `blocks` times, each block of length
/// `block_len`, so the changepoint count grows linearly with `n`.
pub fn generate_tiled_model1(blocks: usize, block_len: usize, seed: u64) -> Result<(TimeSeries, Vec<usize>)> {
    let block_cps = true_changepoints(1, block_len)?;
    let mut rng = replication_rng(seed, 0);
    let mut values = Vec::with_capacity(blocks * block_len);
    let mut cps = Vec::new();
    for b in 0..blocks {
        let offset = b * block_len;
        if b > 0 {
            // Model 1 ends at level 1.5 and each block restarts at 0
            cps.push(offset);
        }
        cps.extend(block_cps.iter().map(|c| c + offset));
        let mut seg = 0;
        for i in 1..=block_len {
            while seg < block_cps.len() && i > block_cps[seg] {
                seg += 1;
            }
            let level: f64 = MODEL1_JUMPS[..seg].iter().sum();
            values.push(level + rng.sample::<f64, _>(StandardNormal));
        }
    }
    Ok((TimeSeries::new(values)?, cps))
}

/// True- and false-positive proportions of `est` against `truth`.
///
/// Estimates are matched one-to-one to true changepoints within `tolerance`,
/// nearest pairs first. With no true changepoints the true-positive rate is
/// 1 when nothing was estimated and NaN otherwise; with no estimates the
/// false-positive rate is 0.
pub fn tp_fp(truth: &[usize], est: &[usize], tolerance: usize) -> (f64, f64) {
    let mut pairs: Vec<(usize, usize, usize)> = Vec::new();
    for (i, &c) in truth.iter().enumerate() {
        for (j, &e) in est.iter().enumerate() {
            let d = c.abs_diff(e);
            if d <= tolerance {
                pairs.push((d, i, j));
            }
        }
    }
    pairs.sort_unstable();
    let mut used_t = vec![false; truth.len()];
    let mut used_e = vec![false; est.len()];
    let mut matched = 0usize;
    for (_, i, j) in pairs {
        if !used_t[i] && !used_e[j] {
            used_t[i] = true;
            used_e[j] = true;
            matched += 1;
        }
    }
    let tp = if truth.is_empty() {
        if est.is_empty() {
            1.0
        } else {
            f64::NAN
        }
    } else {
        matched as f64 / truth.len() as f64
    };
    let fp = if est.is_empty() { 0.0 } else { (est.len() - matched) as f64 / est.len() as f64 };
    (tp, fp)
}

/// Detection methods that can be benchmarked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    /// PELT with the `K`-quantile cost (NP-PELT+).
    NpPeltQuantile,
    /// PELT with the full empirical-CDF cost (NP-PELT).
    NpPeltFull,
    /// Segment Neighbourhood Search with the full cost, `m` chosen by penalty (NMCD).
    Nmcd,
    /// NMCD restricted to screened candidates (NMCD+).
    NmcdPlus,
    /// PELT with the piecewise-linear Gaussian cost.
    LinearPelt,
}

impl Method {
    pub const NAMES: [&'static str; 5] = ["np-pelt+", "np-pelt", "nmcd", "nmcd+", "linear-pelt"];

    fn index(&self) -> usize {
        match self {
            Method::NpPeltQuantile => 0,
            Method::NpPeltFull => 1,
            Method::Nmcd => 2,
            Method::NmcdPlus => 3,
            Method::LinearPelt => 4,
        }
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        let all = [Method::NpPeltQuantile, Method::NpPeltFull, Method::Nmcd, Method::NmcdPlus, Method::LinearPelt];
        all.into_iter().find(|m| Self::NAMES[m.index()] == t).ok_or_else(|| {
            Error::Config(format!("unknown method '{s}'; valid options: {}", Self::NAMES.join(", ")))
        })
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(Self::NAMES[self.index()])
    }
}

/// Tuning shared by all methods; fields a method does not use are ignored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BenchParams {
    /// Quantile count; `None` means `ceil(4 log n)`.
    pub k: Option<usize>,
    pub penalty: Penalty,
    /// Largest changepoint count searched by the Segment Neighbourhood methods.
    pub max_cpts: usize,
    /// Screening half-window; `None` means the default rule.
    pub half_window: Option<usize>,
    /// Matching tolerance for the metrics.
    pub tolerance: usize,
}

impl Default for BenchParams {
    fn default() -> Self {
        Self { k: None, penalty: Penalty::LogN(3.0), max_cpts: 20, half_window: None, tolerance: 0 }
    }
}

/// Runs one method on one series and returns the chosen segmentation.
pub fn detect(series: &TimeSeries, method: Method, params: &BenchParams) -> Result<Segmentation> {
    let n = series.len();
    let penalty = params.penalty.resolve(n);
    match method {
        Method::NpPeltQuantile => {
            let model = CostModel::new(series, CostKind::NonparametricQuantile(params.k))?;
            Ok(pelt(&model, penalty, 1)?.0)
        }
        Method::NpPeltFull => {
            let model = CostModel::new(series, CostKind::NonparametricFull)?;
            Ok(pelt(&model, penalty, 1)?.0)
        }
        Method::LinearPelt => {
            let model = CostModel::new(series, CostKind::GaussianPiecewiseLinear)?;
            Ok(pelt(&model, penalty, model.default_min_seg_len())?.0)
        }
        Method::Nmcd | Method::NmcdPlus => {
            let model = CostModel::new(series, CostKind::NonparametricFull)?;
            let max = params.max_cpts.min(n - 1);
            let path = if method == Method::Nmcd {
                segment_neighbourhood(&model, max)?
            } else {
                let cfg = match params.half_window {
                    Some(h) => ScreeningConfig::new(h)?,
                    None => ScreeningConfig::default_for(n),
                };
                nmcd_plus(series, cfg, &model, max)?
            };
            sic_select(&path, penalty)
                .cloned()
                .ok_or_else(|| Error::Data("segment neighbourhood search returned no segmentation".into()))
        }
    }
}

/// Outcome of a single replication.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepResult {
    pub rep: usize,
    pub true_positive_rate: f64,
    pub false_positive_rate: f64,
    /// Wall-clock seconds spent in cost precomputation and search.
    pub wall_time: f64,
    pub changepoints: Vec<usize>,
}

/// Mean and sample standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub sd: f64,
}

impl Summary {
    pub fn of(xs: impl IntoIterator<Item = f64>) -> Self {
        let xs: Vec<f64> = xs.into_iter().collect();
        let n = xs.len() as f64;
        if xs.is_empty() {
            return Self { mean: f64::NAN, sd: f64::NAN };
        }
        let mean = xs.iter().sum::<f64>() / n;
        let sd = if xs.len() > 1 {
            (xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Self { mean, sd }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub spec: SimSpec,
    pub method: Method,
    pub params: BenchParams,
    pub replications: Vec<RepResult>,
    pub true_positive_rate: Summary,
    pub false_positive_rate: Summary,
    pub wall_time: Summary,
}

impl BenchReport {
    /// Same report with timings zeroed, for comparing runs.
    pub fn without_timings(&self) -> Self {
        let mut r = self.clone();
        for rep in &mut r.replications {
            rep.wall_time = 0.0;
        }
        r.wall_time = Summary { mean: 0.0, sd: 0.0 };
        r
    }
}

/// Runs `reps` independent replications of `spec` with `method`.
pub fn run_benchmark(spec: &SimSpec, method: Method, reps: usize, params: &BenchParams) -> Result<BenchReport> {
    if reps == 0 {
        return Err(Error::Config("replication count must be at least 1".into()));
    }
    true_changepoints(spec.model_id, spec.n)?;
    let replications = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let (series, truth) = generate_replication(spec, rep as u64)?;
            let start = Instant::now();
            let seg = detect(&series, method, params)?;
            let wall_time = start.elapsed().as_secs_f64();
            let (tp, fp) = tp_fp(&truth, &seg.changepoints, params.tolerance);
            Ok(RepResult {
                rep,
                true_positive_rate: tp,
                false_positive_rate: fp,
                wall_time,
                changepoints: seg.changepoints,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BenchReport {
        spec: *spec,
        method,
        params: *params,
        true_positive_rate: Summary::of(replications.iter().map(|r| r.true_positive_rate)),
        false_positive_rate: Summary::of(replications.iter().map(|r| r.false_positive_rate)),
        wall_time: Summary::of(replications.iter().map(|r| r.wall_time)),
        replications,
    })
}
