//! Batch front-end for the integrated-information engine: reads JSON system
//! specifications, validates them and writes JSON reports.

pub mod commands;
pub mod report;
pub mod spec;

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    Ok = 0,
    Validation = 1,
    Parse = 2,
    Resource = 3,
}

/// Default ceiling on the number of elements for exhaustive searches.
pub const DEFAULT_MAX_ELEMENTS: usize = 4;
