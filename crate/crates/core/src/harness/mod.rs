//! Sampling of the line and the executable verification suite.

mod exec;
mod sample;
mod suite;

pub use exec::Exec;
pub use sample::{sample_line, sample_wc, SampleSet, Strategy};
pub use suite::{continuity_proxy, run_suite, run_suite_with, Check, Fault, SuiteOptions, VerificationReport};
