//! Batch harness over `qclab-core`: experiment configuration, Monte Carlo
//! drivers, deterministic CSV/JSON output, and the CLI subcommand
//! implementations.

pub mod config;
pub mod formats;
pub mod output;
pub mod runs;

pub mod commands {
    pub mod audit;
    pub mod emulation;
    pub mod optimize;
    pub mod packing;
    pub mod scaling;
    pub mod sgp;
}

/// Exit status conventions: 0 all checks pass, 1 a check failed, 2 usage.
pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
