//! Instance families and exact measurement of welfare ratios.

mod instances;
mod ratios;
mod suite;

pub use instances::{
    generate, integer_weights, Family, InstanceSpec, Params, RationalParam, DEFAULT_M, DEFAULT_P,
};
pub use ratios::{measure_ratios, RatioReport, RatioValue};
pub use suite::{
    check_expectations, parse_suite, run_suite, EntryResult, Expect, SuiteEntry, SuiteReport,
    Summary,
};
