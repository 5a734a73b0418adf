//! The `bench` command: a simulation study described by a `key = value` file.

use std::fs;
use std::path::{Path, PathBuf};

use npcpt_core::simbench::{run_benchmark, BenchParams, BenchReport, ErrorDist, Method, SimSpec};
use npcpt_core::Penalty;
use serde_json::{json, Value};

use crate::detect::parse_k;
use crate::error::{CliError, Result};

pub const SEED_ENV: &str = "NPCPT_SEED";

const KEYS: [&str; 12] =
    ["model", "n", "error", "sigma", "method", "reps", "seed", "penalty", "K", "max_cpts", "half_window", "tolerance"];

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub spec: SimSpec,
    pub method: Method,
    pub reps: usize,
    pub params: BenchParams,
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str, line: usize) -> Result<T> {
    v.parse::<T>().map_err(|_| CliError::Usage(format!("line {line}: invalid value '{v}' for {key}")))
}

/// Parses a config. Blank lines and `#` comments are ignored; `model` is required.
pub fn parse_bench_config(text: &str) -> Result<BenchConfig> {
    let mut model: Option<u8> = None;
    let mut spec = SimSpec::new(1, 1000, ErrorDist::Normal, 2024);
    let mut method = Method::NpPeltQuantile;
    let mut reps = 100usize;
    let mut params = BenchParams::default();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (key, value) = body
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| CliError::Usage(format!("line {line}: expected key = value, got '{body}'")))?;
        match key {
            "model" => {
                let id: u8 = parse_num(key, value, line).ok().filter(|m| (1..=3).contains(m)).ok_or_else(|| {
                    CliError::Usage(format!("line {line}: invalid model '{value}'; valid options: 1, 2, 3"))
                })?;
                model = Some(id);
            }
            "n" => spec.n = parse_num(key, value, line)?,
            "error" => spec.error_dist = value.parse()?,
            "sigma" => spec.sigma = parse_num(key, value, line)?,
            "method" => method = value.parse()?,
            "reps" => reps = parse_num(key, value, line)?,
            "seed" => spec.seed = parse_num(key, value, line)?,
            "penalty" => params.penalty = value.parse::<Penalty>()?,
            "K" => params.k = parse_k(value)?,
            "max_cpts" => params.max_cpts = parse_num(key, value, line)?,
            "half_window" => {
                params.half_window = if value == "auto" { None } else { Some(parse_num(key, value, line)?) }
            }
            "tolerance" => params.tolerance = parse_num(key, value, line)?,
            other => {
                return Err(CliError::Usage(format!(
                    "line {line}: unknown key '{other}'; valid keys: {}",
                    KEYS.join(", ")
                )))
            }
        }
    }
    spec.model_id = model.ok_or_else(|| CliError::Usage("missing 'model' (valid options: 1, 2, 3)".into()))?;
    if reps == 0 {
        return Err(CliError::Usage("reps must be at least 1".into()));
    }
    if !(spec.sigma.is_finite() && spec.sigma > 0.0) {
        return Err(CliError::Usage(format!("sigma must be positive, got {}", spec.sigma)));
    }
    if spec.n < 2 {
        return Err(CliError::Usage(format!("n must be at least 2, got {}", spec.n)));
    }
    Ok(BenchConfig { spec, method, reps, params })
}

/// Seed precedence: command-line flag, then the environment variable, then the config file.
pub fn resolve_seed(flag: Option<u64>, env: Option<&str>, config: u64) -> Result<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match env {
        Some(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{SEED_ENV}='{v}' is not an unsigned integer"))),
        None => Ok(config),
    }
}

fn summary_json(cfg: &BenchConfig, report: &BenchReport) -> Value {
    let s = |x: &npcpt_core::simbench::Summary| json!({ "mean": x.mean, "sd": x.sd });
    json!({
        "model": cfg.spec.model_id,
        "n": cfg.spec.n,
        "error": cfg.spec.error_dist.to_string(),
        "sigma": cfg.spec.sigma,
        "method": cfg.method.to_string(),
        "reps": cfg.reps,
        "seed": cfg.spec.seed,
        "penalty": cfg.params.penalty.to_string(),
        "K": cfg.params.k,
        "max_cpts": cfg.params.max_cpts,
        "half_window": cfg.params.half_window,
        "tolerance": cfg.params.tolerance,
        "true_positive_rate": s(&report.true_positive_rate),
        "false_positive_rate": s(&report.false_positive_rate),
        "wall_time": s(&report.wall_time),
    })
}

pub struct BenchOutput {
    pub files: Vec<PathBuf>,
    pub summary: String,
}

pub fn run_bench(config_path: &Path, seed_flag: Option<u64>, out_dir: &Path) -> Result<BenchOutput> {
    let text = fs::read_to_string(config_path)
        .map_err(|e| CliError::Usage(format!("{}: {e}", config_path.display())))?;
    let mut cfg = parse_bench_config(&text)?;
    let env = std::env::var(SEED_ENV).ok();
    cfg.spec.seed = resolve_seed(seed_flag, env.as_deref(), cfg.spec.seed)?;
    let report = run_benchmark(&cfg.spec, cfg.method, cfg.reps, &cfg.params)?;

    fs::create_dir_all(out_dir).map_err(|e| CliError::Data(format!("{}: {e}", out_dir.display())))?;
    let stem = config_path.file_stem().and_then(|s| s.to_str()).unwrap_or("bench");
    let json_path = out_dir.join(format!("{stem}.summary.json"));
    let mut body = serde_json::to_string_pretty(&summary_json(&cfg, &report)).map_err(|e| CliError::Internal(e.to_string()))?;
    body.push('\n');
    fs::write(&json_path, body).map_err(|e| CliError::Data(format!("{}: {e}", json_path.display())))?;

    let csv_path = out_dir.join(format!("{stem}.reps.csv"));
    let mut w = csv::Writer::from_path(&csv_path).map_err(|e| CliError::Data(format!("{}: {e}", csv_path.display())))?;
    let io = |e: csv::Error| CliError::Data(format!("{}: {e}", csv_path.display()));
    w.write_record(["rep", "true_positive_rate", "false_positive_rate", "wall_time", "changepoints"]).map_err(io)?;
    for r in &report.replications {
        let cps: Vec<String> = r.changepoints.iter().map(usize::to_string).collect();
        w.write_record([
            r.rep.to_string(),
            r.true_positive_rate.to_string(),
            r.false_positive_rate.to_string(),
            r.wall_time.to_string(),
            cps.join(" "),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| CliError::Data(e.to_string()))?;

    Ok(BenchOutput {
        summary: format!(
            "model {} n = {} {} x{}: TP {:.3} ({:.3}), FP {:.3} ({:.3}), mean time {:.4}s",
            cfg.spec.model_id,
            cfg.spec.n,
            cfg.method,
            cfg.reps,
            report.true_positive_rate.mean,
            report.true_positive_rate.sd,
            report.false_positive_rate.mean,
            report.false_positive_rate.sd,
            report.wall_time.mean
        ),
        files: vec![json_path, csv_path],
    })
}
