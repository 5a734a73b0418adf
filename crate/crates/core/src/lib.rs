//! Nonparametric changepoint detection with penalized empirical-CDF costs.
//!
//! The pieces, bottom up:
//!
//! * [`series`]: observations and the half-weighted empirical CDF.
//! * [`segcost`]: segment costs (full and `K`-quantile nonparametric, piecewise linear).
//! * [`search`]: PELT, optimal partitioning, Segment Neighbourhood Search, brute force.
//! * [`screening`]: Cramér–von Mises candidate screening (the NMCD+ baseline).
//! * [`crops`]: all optimal segmentations over a penalty range, and elbow selection.
//! * [`simbench`]: simulation models, detection metrics and benchmarks.

pub mod crops;
pub mod error;
pub mod penalty;
pub mod screening;
pub mod search;
pub mod segcost;
pub mod series;
pub mod simbench;

pub use crops::{crops_sweep, elbow_curve, suggest_elbow, PenaltyPath};
pub use error::{Error, Result};
pub use penalty::Penalty;
pub use search::{brute_force, optimal_partitioning, pelt, segment_neighbourhood, sic_select, Segmentation, SolverTrace};
pub use segcost::{CostKind, CostModel, QuantileGrid, SegmentCost};
pub use series::TimeSeries;
