//! Exact penalized and constrained partitioning solvers.
//!
//! All exact solvers share one tie-breaking order: lowest penalized cost, then
//! fewest changepoints, then the lexicographically smallest changepoint vector.
//! Penalized values are accumulated left to right as `sum(cost_i + penalty)`
//! in every solver, so exact float comparisons agree across them.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::segcost::SegmentCost;

/// Largest series length accepted by [`brute_force`].
pub const BRUTE_FORCE_MAX_N: usize = 16;

/// Condition attached to a result that was produced without running the search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolverWarning {
    /// The series is shorter than the minimum segment length.
    SeriesShorterThanMinSegment,
}

/// Changepoints `0 < tau_1 < ... < tau_m < n` with the unpenalized total cost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segmentation {
    pub changepoints: Vec<usize>,
    /// Sum of segment costs, penalty excluded.
    pub total_cost: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<SolverWarning>,
}

impl Segmentation {
    /// Number of changepoints `m`.
    pub fn m(&self) -> usize {
        self.changepoints.len()
    }

    /// Penalized cost `total_cost + m * penalty`.
    pub fn penalized_cost(&self, penalty: f64) -> f64 {
        self.total_cost + self.m() as f64 * penalty
    }

    /// Segment boundaries as `(start, end)` pairs covering `x_{start+1..=end}`.
    pub fn segments(&self, n: usize) -> Vec<(usize, usize)> {
        let mut bounds = Vec::with_capacity(self.changepoints.len() + 2);
        bounds.push(0);
        bounds.extend_from_slice(&self.changepoints);
        bounds.push(n);
        bounds.windows(2).map(|w| (w[0], w[1])).collect()
    }

    fn from_changepoints<C: SegmentCost + ?Sized>(model: &C, changepoints: Vec<usize>) -> Self {
        let total_cost = total_cost(model, &changepoints);
        Self { changepoints, total_cost, warning: None }
    }
}

/// Sum of segment costs for a changepoint vector, recomputed from the model.
pub fn total_cost<C: SegmentCost + ?Sized>(model: &C, changepoints: &[usize]) -> f64 {
    let n = model.len();
    let mut prev = 0;
    let mut acc = 0.0;
    for &t in changepoints.iter().chain(std::iter::once(&n)) {
        acc += model.cost(prev, t);
        prev = t;
    }
    acc
}

/// Diagnostics from one [`pelt`] or [`optimal_partitioning`] run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SolverTrace {
    /// Number of candidates evaluated at each step `v = 1..=n`.
    pub candidate_set_sizes: Vec<usize>,
    /// Optimal penalized cost of `x_{1..v}` for `v = 0..=n`, one penalty per
    /// segment. Prefixes that cannot be segmented hold `+inf`.
    pub f_values: Vec<f64>,
    /// Total number of candidates removed by the pruning rule.
    pub pruned: usize,
}

impl SolverTrace {
    pub fn mean_candidate_set_size(&self) -> f64 {
        if self.candidate_set_sizes.is_empty() {
            return 0.0;
        }
        self.candidate_set_sizes.iter().sum::<usize>() as f64 / self.candidate_set_sizes.len() as f64
    }
}

fn check_params(penalty: f64, min_seg_len: usize) -> Result<()> {
    if !(penalty.is_finite() && penalty >= 0.0) {
        return Err(Error::Config(format!("penalty must be finite and nonnegative, got {penalty}")));
    }
    if min_seg_len == 0 {
        return Err(Error::Config("minimum segment length must be at least 1".into()));
    }
    Ok(())
}

fn short_series<C: SegmentCost + ?Sized>(model: &C) -> Segmentation {
    Segmentation {
        changepoints: Vec::new(),
        total_cost: model.cost(0, model.len()),
        warning: Some(SolverWarning::SeriesShorterThanMinSegment),
    }
}

/// Backtracks the changepoint vector ending at `v` (exclusive of `0` and `v`).
fn backtrack(last: &[usize], mut v: usize) -> Vec<usize> {
    let mut out = Vec::new();
    while v > 0 {
        v = last[v];
        if v > 0 {
            out.push(v);
        }
    }
    out.reverse();
    out
}

/// Lexicographic order of `path(a) ++ [a]` against `path(b) ++ [b]`.
fn cmp_paths(last: &[usize], a: usize, b: usize) -> Ordering {
    let mut pa = backtrack(last, a);
    pa.push(a);
    let mut pb = backtrack(last, b);
    pb.push(b);
    pa.cmp(&pb)
}

#[derive(Clone, Copy)]
struct Best {
    value: f64,
    count: usize,
    u: usize,
}

fn partition<C: SegmentCost + ?Sized>(
    model: &C,
    penalty: f64,
    min_seg_len: usize,
    prune: bool,
) -> Result<(Segmentation, SolverTrace)> {
    check_params(penalty, min_seg_len)?;
    let n = model.len();
    if n < min_seg_len {
        return Ok((short_series(model), SolverTrace::default()));
    }

    let mut f = vec![f64::INFINITY; n + 1];
    let mut count = vec![0usize; n + 1];
    let mut last = vec![0usize; n + 1];
    f[0] = 0.0;

    // ascending; a candidate u is dropped once `v >= prune_at[u]`
    let mut candidates: Vec<usize> = vec![0];
    let mut prune_at = vec![usize::MAX; n + 1];
    let mut scratch: Vec<(usize, f64)> = Vec::new();
    let mut trace = SolverTrace {
        candidate_set_sizes: Vec::with_capacity(n),
        f_values: Vec::new(),
        pruned: 0,
    };

    for v in 1..=n {
        if prune {
            let before = candidates.len();
            candidates.retain(|&u| prune_at[u] > v);
            trace.pruned += before - candidates.len();
        }
        scratch.clear();
        let mut best: Option<Best> = None;
        for &u in &candidates {
            if v - u < min_seg_len {
                break;
            }
            let c = model.cost(u, v);
            scratch.push((u, c));
            let cand = Best { value: f[u] + (c + penalty), count: count[u] + 1, u };
            best = Some(match best {
                None => cand,
                Some(b) => {
                    let better = match cand.value.total_cmp(&b.value) {
                        Ordering::Less => true,
                        Ordering::Greater => false,
                        Ordering::Equal => match cand.count.cmp(&b.count) {
                            Ordering::Less => true,
                            Ordering::Greater => false,
                            Ordering::Equal => cmp_paths(&last, cand.u, b.u) == Ordering::Less,
                        },
                    };
                    if better {
                        cand
                    } else {
                        b
                    }
                }
            });
        }
        trace.candidate_set_sizes.push(scratch.len());
        let Some(b) = best else { continue };
        f[v] = b.value;
        count[v] = b.count;
        last[v] = b.u;

        if prune {
            // u can never again be optimal once f[u] + C(u, v) >= f[v]; v itself only
            // becomes available min_seg_len steps later, so removal is delayed until then.
            let tol = 1e-9 * (1.0 + f[v].abs());
            for &(u, c) in &scratch {
                if f[u] + c - f[v] > tol {
                    prune_at[u] = prune_at[u].min(v + min_seg_len);
                }
            }
        }
        candidates.push(v);
    }

    trace.f_values = f;
    let changepoints = backtrack(&last, n);
    Ok((Segmentation::from_changepoints(model, changepoints), trace))
}

/// PELT: optimal partitioning with lossless candidate pruning.
///
/// Minimizes `sum_i [cost(segment_i) + penalty]` over all segmentations whose
/// segments hold at least `min_seg_len` observations.
pub fn pelt<C: SegmentCost + ?Sized>(
    model: &C,
    penalty: f64,
    min_seg_len: usize,
) -> Result<(Segmentation, SolverTrace)> {
    partition(model, penalty, min_seg_len, true)
}

/// Unpruned `O(n^2)` optimal partitioning; same contract as [`pelt`].
pub fn optimal_partitioning<C: SegmentCost + ?Sized>(
    model: &C,
    penalty: f64,
    min_seg_len: usize,
) -> Result<Segmentation> {
    partition(model, penalty, min_seg_len, false).map(|(s, _)| s)
}

/// Same as [`optimal_partitioning`] but also returns the trace.
pub fn optimal_partitioning_traced<C: SegmentCost + ?Sized>(
    model: &C,
    penalty: f64,
    min_seg_len: usize,
) -> Result<(Segmentation, SolverTrace)> {
    partition(model, penalty, min_seg_len, false)
}

/// Exhaustive search over all `2^(n-1)` segmentations, for `n <= 16`.
pub fn brute_force<C: SegmentCost + ?Sized>(
    model: &C,
    penalty: f64,
    min_seg_len: usize,
) -> Result<Segmentation> {
    check_params(penalty, min_seg_len)?;
    let n = model.len();
    if n > BRUTE_FORCE_MAX_N {
        return Err(Error::Refused(format!(
            "brute force enumeration limited to n <= {BRUTE_FORCE_MAX_N}, got {n}"
        )));
    }
    if n < min_seg_len {
        return Ok(short_series(model));
    }
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut cps = Vec::with_capacity(n);
    for mask in 0u32..(1u32 << (n - 1)) {
        cps.clear();
        cps.extend((1..n).filter(|&i| mask >> (i - 1) & 1 == 1));
        let mut prev = 0;
        let mut value = 0.0;
        let mut feasible = true;
        for &t in cps.iter().chain(std::iter::once(&n)) {
            if t - prev < min_seg_len {
                feasible = false;
                break;
            }
            value += model.cost(prev, t) + penalty;
            prev = t;
        }
        if !feasible {
            continue;
        }
        let better = match &best {
            None => true,
            Some((bv, bc)) => match value.total_cmp(bv) {
                Ordering::Less => true,
                Ordering::Greater => false,
                Ordering::Equal => (cps.len(), &cps).cmp(&(bc.len(), bc)) == Ordering::Less,
            },
        };
        if better {
            best = Some((value, cps.clone()));
        }
    }
    let (_, cps) = best.expect("the single-segment partition is always feasible");
    Ok(Segmentation::from_changepoints(model, cps))
}

/// Segment Neighbourhood Search: the optimal segmentation for every changepoint
/// count `m = 0..=max_cpts`.
///
/// Counts that cannot be realized under the model's minimum segment length are
/// omitted, so the result may be shorter than `max_cpts + 1`.
pub fn segment_neighbourhood<C: SegmentCost + ?Sized>(model: &C, max_cpts: usize) -> Result<Vec<Segmentation>> {
    let n = model.len();
    if max_cpts >= n {
        return Err(Error::Config(format!("maximum changepoint count {max_cpts} must be below n = {n}")));
    }
    let all: Vec<usize> = (1..n).collect();
    segment_neighbourhood_restricted(model, max_cpts, &all)
}

/// Segment Neighbourhood Search with changepoints restricted to `candidates`
/// (strictly increasing positions in `1..n`).
pub fn segment_neighbourhood_restricted<C: SegmentCost + ?Sized>(
    model: &C,
    max_cpts: usize,
    candidates: &[usize],
) -> Result<Vec<Segmentation>> {
    let n = model.len();
    if candidates.windows(2).any(|w| w[0] >= w[1]) || candidates.iter().any(|&c| c == 0 || c >= n) {
        return Err(Error::Domain("candidate positions must be strictly increasing within 1..n".into()));
    }
    let min_len = model.default_min_seg_len();
    let mut pos = Vec::with_capacity(candidates.len() + 2);
    pos.push(0);
    pos.extend_from_slice(candidates);
    pos.push(n);
    let p = pos.len();

    // cost[i * p + j] for i < j, +inf when the segment is too short
    let cost: Vec<f64> = (0..p)
        .into_par_iter()
        .flat_map_iter(|i| {
            let pos = &pos;
            (0..p).map(move |j| {
                if j > i && pos[j] - pos[i] >= min_len {
                    model.cost(pos[i], pos[j])
                } else {
                    f64::INFINITY
                }
            })
        })
        .collect();

    let max_m = max_cpts.min(p - 2);
    let mut layers: Vec<Vec<f64>> = Vec::with_capacity(max_m + 1);
    let mut backs: Vec<Vec<usize>> = Vec::with_capacity(max_m + 1);
    layers.push((0..p).map(|j| cost[j]).collect());
    backs.push(vec![0; p]);
    for m in 1..=max_m {
        let prev = &layers[m - 1];
        let mut cur = vec![f64::INFINITY; p];
        let mut back = vec![0usize; p];
        for j in m + 1..p {
            let mut best: Option<(f64, usize)> = None;
            for i in m..j {
                let value = prev[i] + cost[i * p + j];
                if !value.is_finite() {
                    continue;
                }
                let better = match best {
                    None => true,
                    Some((bv, bi)) => match value.total_cmp(&bv) {
                        Ordering::Less => true,
                        Ordering::Greater => false,
                        Ordering::Equal => {
                            let path = |i: usize| {
                                let mut v = sn_backtrack(&backs, &pos, m - 1, i);
                                v.push(pos[i]);
                                v
                            };
                            path(i) < path(bi)
                        }
                    },
                };
                if better {
                    best = Some((value, i));
                }
            }
            if let Some((value, i)) = best {
                cur[j] = value;
                back[j] = i;
            }
        }
        layers.push(cur);
        backs.push(back);
    }

    let mut out = Vec::with_capacity(max_m + 1);
    for m in 0..=max_m {
        if !layers[m][p - 1].is_finite() {
            break;
        }
        let cps = sn_backtrack(&backs, &pos, m, p - 1);
        out.push(Segmentation::from_changepoints(model, cps));
    }
    Ok(out)
}

/// Changepoints of the best `m`-changepoint path ending at `pos[j]` (excluding `pos[j]`).
fn sn_backtrack(backs: &[Vec<usize>], pos: &[usize], m: usize, mut j: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(m);
    for layer in (1..=m).rev() {
        j = backs[layer][j];
        out.push(pos[j]);
    }
    out.reverse();
    out
}

/// Picks the entry minimizing `total_cost + m * penalty`; ties go to the smaller `m`.
pub fn sic_select(sn_result: &[Segmentation], penalty: f64) -> Option<&Segmentation> {
    sn_result.iter().fold(None, |best: Option<&Segmentation>, s| match best {
        Some(b) if b.penalized_cost(penalty) <= s.penalized_cost(penalty) => Some(b),
        _ => Some(s),
    })
}
