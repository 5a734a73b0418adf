//! Command-line front end: CSV ingestion, detection, benchmarks and
//! heart-rate zone annotation.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.

pub mod app;
pub mod bench;
pub mod detect;
pub mod error;
pub mod ingest;
pub mod zones;

pub use app::run;
pub use error::CliError;
pub use ingest::{ingest_csv, ColumnSpec, HeaderMode};
pub use zones::{annotate_zones, Zone, ZoneConfig};
