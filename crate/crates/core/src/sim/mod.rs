//! Sweeps over SNR, distance and launch power, and reach figures.

mod chain;
mod config;
mod registry;
mod result;
mod sweep;

pub use chain::{receive, transmit, ChannelSet};
pub use config::{parse_points, Axis, FormatOptions, LinkTemplate, SweepConfig};
pub use registry::{build_format, optimize_ring_ratio, RingRatioSearch, DEFAULT_RING_RATIO, FORMAT_IDS, RING_SEARCH_BLOCKS,
    RING_SEARCH_SEED,};
pub use result::{config_from_csv, SweepResult, SweepRow, CSV_HEADER};
pub use sweep::{
    awgn_sweep, compare_reach, fitted_optimum, launch_power_sweep, reach_at_threshold, reach_gain_percent, reach_sweep,
    run_sweep,
    ReachGain,
};
