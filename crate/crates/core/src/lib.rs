//! Differential, property-based testing of constraint propagators.
//!
//! A filter under test is compared against a trusted filter on randomly
//! generated instances. Trusted filters can be derived from nothing more
//! than a solution checker (see [`reference`]); failures are shrunk to
//! 1-minimal counterexamples. Stateful filters are exercised through random
//! search dives with push/pop backtracking (see [`stateful`]).
//!
//! ```
//! use propcheck::{assert_that, make_reference, Checker, ConsistencyLevel, GenConfig};
//!
//! let sum = Checker::sum_equals(3, 6);
//! let bounds = make_reference(ConsistencyLevel::BoundZ, sum.clone());
//! let arc = make_reference(ConsistencyLevel::Arc, sum);
//! let cfg = GenConfig { n_vars: 3, value_min: 0, value_max: 5, density: 0.5, ..GenConfig::default() };
//! assert_that(&arc).with_config(cfg).weaker_than(&bounds).unwrap();
//! ```

pub mod comparator;
pub mod documents;
pub mod domain;
pub mod error;
pub mod generator;
pub mod reference;
pub mod solver;
pub mod stateful;

pub use comparator::{
    assert_that, check, compare_once, identity_filter, run_campaign, stronger, AssertionError,
    CampaignKind, Comparison, ComparisonMode, Failure, FailureReason, Filter, FilterAssert,
    FnFilter, Side, TestReport,
};
pub use domain::{is_fixed, is_leaf, pointwise_equal, pointwise_subset, Assignment, Domain, FilterOutcome, Instance};
pub use error::{Error, Result};
pub use generator::{generate_instance, shrink, GenConfig, Rng, ShrinkResult, DEFAULT_SHRINK_BUDGET};
pub use reference::{
    arc_filter, bound_d_filter, bound_z_filter, make_reference, range_filter, solutions, Checker,
    ConsistencyLevel, EnumerationCap, ReferenceFilter,
};
pub use solver::{as_filter, as_filter_with_state, with_bug, BugId, Recipe};
pub use stateful::{
    apply_restriction, dive_campaign, dives, incremental_wrap, random_restriction, replay_transcript,
    BranchOp, DiveConfig, DiveMismatch, DiveRun, FilterWithState, IncrementalFiltering, Relation,
    Restriction,
};
