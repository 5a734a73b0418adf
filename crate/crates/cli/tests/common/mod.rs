use std::path::{Path, PathBuf};

use serde_json::Value;

pub fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn is_num(v: &Value) -> bool {
    v.is_number()
}

fn is_uint(v: &Value) -> bool {
    v.as_u64().is_some()
}

/// Checks one segmentation object; `Err` names the first problem.
pub fn check_segmentation(v: &Value, interval: bool) -> Result<(), String> {
    let o = v.as_object().ok_or("segmentation is not an object")?;
    let n = o.get("n").and_then(Value::as_u64).ok_or("n missing")? as usize;
    if interval {
        let iv = o.get("penalty_interval").and_then(Value::as_array).ok_or("penalty_interval missing")?;
        if iv.len() != 2 || !iv.iter().all(is_num) {
            return Err("penalty_interval is not a pair of numbers".into());
        }
    } else if !o.get("penalty").is_some_and(is_num) {
        return Err("penalty missing".into());
    }
    if !o.get("method").is_some_and(Value::is_string) {
        return Err("method missing".into());
    }
    if !o.get("total_cost").is_some_and(is_num) {
        return Err("total_cost missing".into());
    }
    if let Some(k) = o.get("K") {
        if !is_uint(k) {
            return Err("K is not an integer".into());
        }
    }
    let cps: Vec<usize> = o
        .get("changepoints")
        .and_then(Value::as_array)
        .ok_or("changepoints missing")?
        .iter()
        .map(|c| c.as_u64().map(|c| c as usize).ok_or("changepoint is not an integer"))
        .collect::<Result<_, _>>()?;
    if !cps.windows(2).all(|w| w[0] < w[1]) || cps.iter().any(|&c| c == 0 || c >= n) {
        return Err(format!("changepoints {cps:?} not increasing within 1..{n}"));
    }
    let segs = o.get("segments").and_then(Value::as_array).ok_or("segments missing")?;
    if segs.len() != cps.len() + 1 {
        return Err("segment count does not match changepoints".into());
    }
    let mut expected_start = 1;
    for s in segs {
        let s = s.as_object().ok_or("segment is not an object")?;
        for key in ["start", "end"] {
            if !s.get(key).is_some_and(is_uint) {
                return Err(format!("segment {key} missing"));
            }
        }
        for key in ["mean", "cost"] {
            if !s.get(key).is_some_and(is_num) {
                return Err(format!("segment {key} missing"));
            }
        }
        if s["start"].as_u64() != Some(expected_start) {
            return Err("segments are not contiguous".into());
        }
        expected_start = s["end"].as_u64().unwrap() + 1;
        if let Some(z) = s.get("zone") {
            if !["peak", "anaerobic", "aerobic", "recovery"].contains(&z.as_str().unwrap_or("")) {
                return Err(format!("unknown zone {z}"));
            }
        }
    }
    if expected_start != n as u64 + 1 {
        return Err("segments do not cover the series".into());
    }
    Ok(())
}

pub fn check_elbow_csv(text: &str) -> Result<(), String> {
    let mut lines = text.lines();
    if lines.next() != Some("m,cost") {
        return Err("elbow header is not 'm,cost'".into());
    }
    let mut prev: Option<(u64, f64)> = None;
    for l in lines {
        let (m, c) = l.split_once(',').ok_or("malformed elbow row")?;
        let m: u64 = m.parse().map_err(|_| "m is not an integer")?;
        let c: f64 = c.parse().map_err(|_| "cost is not a number")?;
        if let Some((pm, pc)) = prev {
            if m <= pm || c >= pc {
                return Err("elbow rows not increasing in m with decreasing cost".into());
            }
        }
        prev = Some((m, c));
    }
    Ok(())
}
