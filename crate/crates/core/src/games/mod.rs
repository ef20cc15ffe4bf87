//! Zero-variance reachability game, exhaustive policy enumeration,
//! policy-class comparisons, and reduction instance generators.

mod enumerate;
mod generators;
mod reach;
mod separation;

pub use enumerate::{count_policies, enumerate_policies, enumerate_policies_with_cap, EnumeratedPolicy, DEFAULT_POLICY_CAP};
pub use generators::{gen_3sat, gen_subset_sum};
pub use reach::{zero_variance_values, GameResult};
pub use separation::{class_separation_report, ClassVerdict, SeparationOptions, SeparationReport, Verdict};
