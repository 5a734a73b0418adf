//! The `detect` command: one segmentation for a penalty, or a penalty path.

use std::fs;
use std::path::{Path, PathBuf};

use npcpt_core::search::pelt;
use npcpt_core::simbench::Method;
use npcpt_core::{crops_sweep, elbow_curve, suggest_elbow, CostKind, CostModel, Penalty, Segmentation, SegmentCost, TimeSeries};
use serde_json::{json, Map, Value};

use crate::error::{CliError, Result};
use crate::ingest::{ingest_csv, ColumnSpec, HeaderMode};
use crate::zones::{annotate_zones, ZoneConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum CostChoice {
    /// Quantile-grid nonparametric cost.
    Np,
    /// Nonparametric cost over every observed value.
    NpFull,
    /// Gaussian cost with a piecewise-linear mean.
    Linear,
}

/// `None` means `ceil(4 log n)`.
pub fn parse_k(s: &str) -> Result<Option<usize>> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(None);
    }
    match s.parse::<usize>() {
        Ok(k) if k >= 1 => Ok(Some(k)),
        _ => Err(CliError::Usage(format!("invalid K '{s}': expected 'auto' or a positive integer"))),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Selection {
    Penalty(Penalty),
    Crops(Penalty, Penalty),
}

#[derive(Debug, Clone)]
pub struct DetectOptions {
    pub input: PathBuf,
    pub column: ColumnSpec,
    pub header: HeaderMode,
    pub cost: CostChoice,
    pub k: Option<usize>,
    pub selection: Selection,
    pub max_hr: Option<f64>,
    pub out_dir: PathBuf,
}

/// Files written by a detect run.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectOutput {
    pub files: Vec<PathBuf>,
    pub summary: String,
}

fn method_name(cost: CostChoice) -> String {
    match cost {
        CostChoice::Np => Method::NpPeltQuantile,
        CostChoice::NpFull => Method::NpPeltFull,
        CostChoice::Linear => Method::LinearPelt,
    }
    .to_string()
}

/// Segment list with 1-based inclusive `start..=end` indices, matching the
/// convention that a changepoint is the last observation of its segment.
fn segments_json(
    seg: &Segmentation,
    series: &TimeSeries,
    model: &CostModel,
    zones: Option<&ZoneConfig>,
) -> Result<Vec<Value>> {
    let labels = zones.map(|z| annotate_zones(seg, series, z)).transpose()?;
    seg.segments(series.len())
        .into_iter()
        .enumerate()
        .map(|(i, (u, v))| {
            let mut m = Map::new();
            m.insert("start".into(), json!(u + 1));
            m.insert("end".into(), json!(v));
            m.insert("length".into(), json!(v - u));
            m.insert("mean".into(), json!(series.mean(u, v)?));
            m.insert("cost".into(), json!(model.cost(u, v)));
            if let Some(l) = &labels {
                m.insert("zone".into(), json!(l[i].to_string()));
            }
            Ok(Value::Object(m))
        })
        .collect()
}

fn header_fields(series: &TimeSeries, model: &CostModel, cost: CostChoice) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("n".into(), json!(series.len()));
    m.insert("method".into(), json!(method_name(cost)));
    if let Some(g) = model.grid() {
        m.insert("K".into(), json!(g.k()));
    }
    m
}

fn segmentation_json(
    seg: &Segmentation,
    series: &TimeSeries,
    model: &CostModel,
    cost: CostChoice,
    zones: Option<&ZoneConfig>,
) -> Result<Map<String, Value>> {
    let mut m = header_fields(series, model, cost);
    m.insert("changepoints".into(), json!(seg.changepoints));
    m.insert("segments".into(), Value::Array(segments_json(seg, series, model, zones)?));
    m.insert("total_cost".into(), json!(seg.total_cost));
    Ok(m)
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn to_pretty(v: &Value) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| CliError::Internal(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn resolve(p: Penalty, n: usize, what: &str) -> Result<f64> {
    let v = p.resolve(n);
    if v.is_finite() && v >= 0.0 {
        Ok(v)
    } else {
        Err(CliError::Usage(format!("{what} {p} resolves to {v} for n = {n}")))
    }
}

pub fn run_detect(opts: &DetectOptions) -> Result<DetectOutput> {
    let zones = opts.max_hr.map(ZoneConfig::new).transpose()?;
    let series = ingest_csv(&opts.input, &opts.column, opts.header)?;
    let n = series.len();
    let kind = match opts.cost {
        CostChoice::Np => CostKind::NonparametricQuantile(opts.k),
        CostChoice::NpFull => CostKind::NonparametricFull,
        CostChoice::Linear => CostKind::GaussianPiecewiseLinear,
    };
    if opts.k.is_some() && opts.cost != CostChoice::Np {
        return Err(CliError::Usage("--K only applies to --cost np".into()));
    }
    let model = CostModel::new(&series, kind)?;
    let stem = opts.input.file_stem().and_then(|s| s.to_str()).unwrap_or("series").to_string();
    fs::create_dir_all(&opts.out_dir).map_err(|e| CliError::Data(format!("{}: {e}", opts.out_dir.display())))?;
    let msl = model.default_min_seg_len();

    match opts.selection {
        Selection::Penalty(p) => {
            let penalty = resolve(p, n, "penalty")?;
            let (seg, _) = pelt(&model, penalty, msl)?;
            let mut m = segmentation_json(&seg, &series, &model, opts.cost, zones.as_ref())?;
            m.insert("penalty".into(), json!(penalty));
            let path = opts.out_dir.join(format!("{stem}.segmentation.json"));
            write(&path, &to_pretty(&Value::Object(m))?)?;
            Ok(DetectOutput {
                summary: format!("n = {n}, penalty = {penalty}, {} changepoints -> {}", seg.m(), path.display()),
                files: vec![path],
            })
        }
        Selection::Crops(lo, hi) => {
            let (lo, hi) = (resolve(lo, n, "crops minimum")?, resolve(hi, n, "crops maximum")?);
            let path = crops_sweep(&model, lo, hi)?;
            let curve = elbow_curve(&path);
            let suggested = suggest_elbow(&curve);
            let entries = path
                .entries
                .iter()
                .map(|e| {
                    let mut m = segmentation_json(&e.segmentation, &series, &model, opts.cost, zones.as_ref())?;
                    m.insert("penalty_interval".into(), json!([e.penalty_lo, e.penalty_hi]));
                    Ok(Value::Object(m))
                })
                .collect::<Result<Vec<_>>>()?;
            let mut top = header_fields(&series, &model, opts.cost);
            top.insert("penalty_interval".into(), json!([lo, hi]));
            top.insert("pelt_calls".into(), json!(path.pelt_call_count));
            top.insert("suggested_m".into(), json!(suggested));
            top.insert("path".into(), Value::Array(entries));
            let json_path = opts.out_dir.join(format!("{stem}.path.json"));
            write(&json_path, &to_pretty(&Value::Object(top))?)?;

            let mut csv = String::from("m,cost\n");
            for (m, c) in &curve {
                csv.push_str(&format!("{m},{}\n", json!(c)));
            }
            let csv_path = opts.out_dir.join(format!("{stem}.elbow.csv"));
            write(&csv_path, &csv)?;
            let suggestion = suggested.map_or("none".to_string(), |m| m.to_string());
            Ok(DetectOutput {
                summary: format!(
                    "n = {n}, {} segmentations on [{lo}, {hi}], suggested m = {suggestion} -> {}, {}",
                    path.entries.len(),
                    json_path.display(),
                    csv_path.display()
                ),
                files: vec![json_path, csv_path],
            })
        }
    }
}
