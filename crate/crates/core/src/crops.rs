//! Changepoints over a range of penalties, and elbow utilities for choosing
//! among the resulting segmentations.
//!
//! Penalties here are per changepoint: a segmentation with `m` changepoints
//! and unpenalized cost `Q` scores `Q + m * penalty`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::search::{pelt, Segmentation};
use crate::segcost::SegmentCost;

/// One penalty interval of the path and the segmentation optimal on it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathEntry {
    /// Inclusive lower end.
    pub penalty_lo: f64,
    /// Exclusive upper end, except for the last entry where it is inclusive.
    pub penalty_hi: f64,
    pub segmentation: Segmentation,
    pub unpenalized_cost: f64,
}

impl PathEntry {
    pub fn m(&self) -> usize {
        self.segmentation.m()
    }
}

/// Every optimal segmentation over `[xi_min, xi_max]`, ordered by increasing penalty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PenaltyPath {
    pub xi_min: f64,
    pub xi_max: f64,
    pub entries: Vec<PathEntry>,
    pub pelt_call_count: usize,
}

impl PenaltyPath {
    /// The entry whose interval contains `penalty`.
    pub fn entry_for(&self, penalty: f64) -> Option<&PathEntry> {
        if penalty < self.xi_min || penalty > self.xi_max {
            return None;
        }
        self.entries
            .iter()
            .find(|e| penalty >= e.penalty_lo && penalty < e.penalty_hi)
            .or_else(|| self.entries.last())
    }
}

/// CROPS with the model's default minimum segment length.
pub fn crops_sweep<C: SegmentCost + ?Sized>(model: &C, xi_min: f64, xi_max: f64) -> Result<PenaltyPath> {
    crops_sweep_with(model, xi_min, xi_max, model.default_min_seg_len())
}

/// Recovers all optimal PELT segmentations for penalties in `[xi_min, xi_max]`
/// using at most `m(xi_min) - m(xi_max) + 2` PELT runs.
pub fn crops_sweep_with<C: SegmentCost + ?Sized>(
    model: &C,
    xi_min: f64,
    xi_max: f64,
    min_seg_len: usize,
) -> Result<PenaltyPath> {
    if !(xi_min.is_finite() && xi_max.is_finite()) {
        return Err(Error::Config("penalty range must be finite".into()));
    }
    if xi_min < 0.0 {
        return Err(Error::Config(format!("xi_min = {xi_min} must be nonnegative")));
    }
    if xi_min > xi_max {
        return Err(Error::Config(format!("xi_min = {xi_min} exceeds xi_max = {xi_max}")));
    }

    let mut calls = 0usize;
    let mut found: BTreeMap<usize, Segmentation> = BTreeMap::new();
    let mut run = |xi: f64| -> Result<Segmentation> {
        calls += 1;
        // pelt charges one penalty per segment, which only adds a constant
        let (seg, _) = pelt(model, xi, min_seg_len)?;
        found.entry(seg.m()).or_insert_with(|| seg.clone());
        Ok(seg)
    };

    let low = run(xi_min)?;
    if xi_max > xi_min {
        let high = run(xi_max)?;
        let mut stack = vec![(low, high)];
        while let Some((a, b)) = stack.pop() {
            // with adjacent counts no other segmentation can be optimal in between
            if a.m() <= b.m() + 1 {
                continue;
            }
            let cross = (b.total_cost - a.total_cost) / (a.m() - b.m()) as f64;
            let mid = run(cross)?;
            // several lines can meet at `cross`, and ties then resolve either way;
            // only a count strictly inside (b.m, a.m) is new
            let settled = !(b.m() < mid.m() && mid.m() < a.m());
            if !settled {
                stack.push((a, mid.clone()));
                stack.push((mid, b));
            }
        }
    }

    let entries = lower_envelope(found.into_values().rev().collect(), xi_min, xi_max);
    Ok(PenaltyPath { xi_min, xi_max, entries, pelt_call_count: calls })
}

/// Clips the lower envelope of the lines `Q + m * xi` to `[lo, hi]`.
/// `segs` must be ordered by decreasing `m`.
fn lower_envelope(segs: Vec<Segmentation>, lo: f64, hi: f64) -> Vec<PathEntry> {
    // stack of (segmentation, start of its interval)
    let mut hull: Vec<(Segmentation, f64)> = Vec::new();
    for s in segs {
        loop {
            let Some((top, start)) = hull.last() else {
                hull.push((s, lo));
                break;
            };
            let cross = (s.total_cost - top.total_cost) / (top.m() - s.m()) as f64;
            if cross <= *start {
                hull.pop();
                continue;
            }
            if cross < hi {
                hull.push((s, cross));
            }
            break;
        }
    }
    let mut entries = Vec::with_capacity(hull.len());
    for i in 0..hull.len() {
        let end = hull.get(i + 1).map_or(hi, |h| h.1);
        let (seg, start) = &hull[i];
        entries.push(PathEntry {
            penalty_lo: *start,
            penalty_hi: end,
            unpenalized_cost: seg.total_cost,
            segmentation: seg.clone(),
        });
    }
    entries
}

/// Cost against changepoint count, sorted by `m` with strictly decreasing cost.
pub fn elbow_curve(path: &PenaltyPath) -> Vec<(usize, f64)> {
    let mut pts: Vec<(usize, f64)> = path.entries.iter().map(|e| (e.m(), e.unpenalized_cost)).collect();
    pts.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut out: Vec<(usize, f64)> = Vec::with_capacity(pts.len());
    for (m, c) in pts {
        match out.last() {
            Some(&(_, prev)) if c >= prev => {}
            _ => out.push((m, c)),
        }
    }
    out
}

/// Suggests the elbow of a cost curve: the interior point with the largest drop
/// in slope, normalized by the total cost range. Ties go to the smallest `m`.
pub fn suggest_elbow(curve: &[(usize, f64)]) -> Option<usize> {
    if curve.len() < 3 {
        return None;
    }
    let range = curve[0].1 - curve[curve.len() - 1].1;
    let scale = if range > 0.0 { range } else { 1.0 };
    let mut best: Option<(f64, usize)> = None;
    for w in curve.windows(3) {
        let (m0, c0) = w[0];
        let (m1, c1) = w[1];
        let (m2, c2) = w[2];
        let left = (c0 - c1) / (m1 - m0) as f64;
        let right = (c1 - c2) / (m2 - m1) as f64;
        let curvature = (left - right) / scale;
        if best.is_none_or(|(b, _)| curvature > b) {
            best = Some((curvature, m1));
        }
    }
    best.map(|(_, m)| m)
}
