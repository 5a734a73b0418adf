//! Heart-rate training zones for segment annotation.

use std::fmt;

use npcpt_core::{Segmentation, TimeSeries};
use serde::Serialize;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Zone {
    Peak,
    Anaerobic,
    Aerobic,
    Recovery,
}

impl fmt::Display for Zone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Zone::Peak => "peak",
            Zone::Anaerobic => "anaerobic",
            Zone::Aerobic => "aerobic",
            Zone::Recovery => "recovery",
        })
    }
}

/// Zone boundaries as fractions of the maximum heart rate. There is no
/// default `max_hr`; it has to come from the user.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZoneConfig {
    pub max_hr: f64,
    /// Lower bounds of peak, anaerobic and aerobic.
    pub thresholds: [f64; 3],
}

impl ZoneConfig {
    pub fn new(max_hr: f64) -> Result<Self> {
        Self::with_thresholds(max_hr, [0.90, 0.80, 0.70])
    }

    pub fn with_thresholds(max_hr: f64, thresholds: [f64; 3]) -> Result<Self> {
        if !(max_hr.is_finite() && max_hr > 0.0) {
            return Err(CliError::Usage(format!("max heart rate must be positive, got {max_hr}")));
        }
        let [a, b, c] = thresholds;
        if !(a < 1.0 && a > b && b > c && c > 0.0) {
            return Err(CliError::Usage(format!(
                "zone thresholds must be strictly descending within (0, 1), got {thresholds:?}"
            )));
        }
        Ok(Self { max_hr, thresholds })
    }

    /// The zone of a heart rate; a value on a boundary belongs to the higher zone.
    pub fn zone_of(&self, bpm: f64) -> Zone {
        let [peak, anaerobic, aerobic] = self.thresholds.map(|t| t * self.max_hr);
        if bpm >= peak {
            Zone::Peak
        } else if bpm >= anaerobic {
            Zone::Anaerobic
        } else if bpm >= aerobic {
            Zone::Aerobic
        } else {
            Zone::Recovery
        }
    }
}

/// Labels each segment by the zone of its mean.
pub fn annotate_zones(segmentation: &Segmentation, series: &TimeSeries, zones: &ZoneConfig) -> Result<Vec<Zone>> {
    segmentation
        .segments(series.len())
        .into_iter()
        .map(|(u, v)| Ok(zones.zone_of(series.mean(u, v)?)))
        .collect()
}
