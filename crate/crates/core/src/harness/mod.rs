//! Configuration, experiment drivers, Monte Carlo and brute-force oracles.

pub mod config;
mod mc;
mod oracle;
mod runs;

pub use config::{array_a_config, array_b_config, GridDeg, Resolved, RunConfig};
pub use mc::{draw_realization, draw_rng, monte_carlo_check, Histogram, McReport};
pub use oracle::{corner_oracle, ORACLE_MAX_ELEMENTS};
pub use runs::{
    backtrack_dir, power_db, run_backtrack, run_bounds, run_mc, run_sweep, write_resolved, BacktrackRun,
    BacktrackSummary, BoundsRun, BoundsSummary, SweepRow,
};
