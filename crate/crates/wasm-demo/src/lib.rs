//! Browser bindings. Each exported function wraps a plain Rust function that
//! returns JSON, so the logic is testable without a browser.

use npcpt_core::search::pelt;
use npcpt_core::simbench::{generate, ErrorDist, SimSpec};
use npcpt_core::{crops_sweep, elbow_curve, suggest_elbow, CostKind, CostModel, Penalty, SegmentCost, TimeSeries};
use serde::Serialize;
use wasm_bindgen::prelude::*;

#[derive(Serialize)]
struct Simulated {
    values: Vec<f64>,
    truth: Vec<usize>,
}

#[derive(Serialize)]
struct Segment {
    start: usize,
    end: usize,
    mean: f64,
}

#[derive(Serialize)]
struct Fit {
    penalty: f64,
    changepoints: Vec<usize>,
    segments: Vec<Segment>,
    total_cost: f64,
}

#[derive(Serialize)]
struct PathPoint {
    penalty_lo: f64,
    penalty_hi: f64,
    m: usize,
    cost: f64,
    changepoints: Vec<usize>,
}

#[derive(Serialize)]
struct Path {
    entries: Vec<PathPoint>,
    elbow: Vec<(usize, f64)>,
    suggested_m: Option<usize>,
    pelt_calls: usize,
}

fn cost_kind(name: &str) -> Result<CostKind, String> {
    match name {
        "np" => Ok(CostKind::NonparametricQuantile(None)),
        "np-full" => Ok(CostKind::NonparametricFull),
        "linear" => Ok(CostKind::GaussianPiecewiseLinear),
        other => Err(format!("unknown cost '{other}'; valid options: np, np-full, linear")),
    }
}

fn model_for(values: &[f64], cost: &str) -> Result<(TimeSeries, CostModel), String> {
    let series = TimeSeries::new(values.to_vec()).map_err(|e| e.to_string())?;
    let model = CostModel::new(&series, cost_kind(cost)?).map_err(|e| e.to_string())?;
    Ok((series, model))
}

fn to_json<T: Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

/// One draw of a simulation model as `{values, truth}`.
pub fn simulate_json(model_id: u8, n: usize, error: &str, seed: u64) -> Result<String, String> {
    let dist: ErrorDist = error.parse().map_err(|e: npcpt_core::Error| e.to_string())?;
    let (series, truth) = generate(&SimSpec::new(model_id, n, dist, seed)).map_err(|e| e.to_string())?;
    to_json(&Simulated { values: series.values().to_vec(), truth })
}

/// PELT at a single penalty (a number or `<c>logn`).
pub fn segment_json(values: &[f64], cost: &str, penalty: &str) -> Result<String, String> {
    let (series, model) = model_for(values, cost)?;
    let penalty = penalty.parse::<Penalty>().map_err(|e| e.to_string())?.resolve(series.len());
    let (seg, _) = pelt(&model, penalty, model.default_min_seg_len()).map_err(|e| e.to_string())?;
    let segments = seg
        .segments(series.len())
        .into_iter()
        .map(|(u, v)| Segment { start: u, end: v, mean: series.mean(u, v).unwrap_or(f64::NAN) })
        .collect();
    to_json(&Fit { penalty, changepoints: seg.changepoints, segments, total_cost: seg.total_cost })
}

/// Every optimal segmentation for penalties in `[lo, hi]`, with the elbow curve.
pub fn penalty_path_json(values: &[f64], cost: &str, lo: f64, hi: f64) -> Result<String, String> {
    let (_, model) = model_for(values, cost)?;
    let path = crops_sweep(&model, lo, hi).map_err(|e| e.to_string())?;
    let elbow = elbow_curve(&path);
    let suggested_m = suggest_elbow(&elbow);
    let entries = path
        .entries
        .iter()
        .map(|e| PathPoint {
            penalty_lo: e.penalty_lo,
            penalty_hi: e.penalty_hi,
            m: e.m(),
            cost: e.unpenalized_cost,
            changepoints: e.segmentation.changepoints.clone(),
        })
        .collect();
    to_json(&Path { entries, elbow, suggested_m, pelt_calls: path.pelt_call_count })
}

#[wasm_bindgen]
pub fn simulate(model_id: u8, n: usize, error: &str, seed: u64) -> Result<String, JsError> {
    simulate_json(model_id, n, error, seed).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn segment(values: &[f64], cost: &str, penalty: &str) -> Result<String, JsError> {
    segment_json(values, cost, penalty).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn penalty_path(values: &[f64], cost: &str, lo: f64, hi: f64) -> Result<String, JsError> {
    penalty_path_json(values, cost, lo, hi).map_err(|e| JsError::new(&e))
}
