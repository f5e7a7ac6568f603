//! Library half of the `gippa` command-line harness.
//!
//! Commands are implemented here and re-used by the integration tests; the
//! binary in `main.rs` is a thin argument-parsing wrapper. Exit codes are
//! part of the interface:
//!
//! | code | meaning                                   |
//! |------|-------------------------------------------|
//! | 0    | success / converged                       |
//! | 1    | configuration or I/O error                |
//! | 2    | iteration cap reached without convergence |
//! | 3    | solver error                              |
//! | 4    | kernel construction hypothesis violated   |
//! | 5    | pair certified not monotone               |
//! | 6    | certification inconclusive                |

pub mod commands;
pub mod config;
pub mod csvio;
pub mod plot;
pub mod report;

/// Exit codes used across subcommands.
pub mod exit_codes {
    pub const OK: i32 = 0;
    pub const CONFIG_OR_IO: i32 = 1;
    pub const MAX_ITER: i32 = 2;
    pub const SOLVER_ERROR: i32 = 3;
    pub const HYPOTHESIS_VIOLATED: i32 = 4;
    pub const NOT_MONOTONE: i32 = 5;
    pub const INCONCLUSIVE: i32 = 6;
}

/// Format a float with 17 significant digits, enough for an exact `f64`
/// round trip through text.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}
