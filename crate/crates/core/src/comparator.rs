//! Differential campaigns between a trusted and a tested filter.

use std::fmt;

use crate::domain::{pointwise_equal, pointwise_subset, FilterOutcome, Instance};
use crate::error::{Error, Result};
use crate::generator::{generate_instance, shrink, GenConfig, Rng, DEFAULT_SHRINK_BUDGET};
use crate::stateful::BranchOp;

/// A static filtering algorithm: maps input domains to filtered domains.
///
/// Implementations must be deterministic and contracting (every output
/// domain is a subset of the corresponding input domain). The campaign
/// harness verifies the latter and reports violations as failures.
pub trait Filter {
    fn arity(&self) -> usize;

    /// `Err` is reserved for harness-level problems (resource limits, broken
    /// contracts); a constraint with no solution is `Ok(Inconsistent)`.
    fn apply(&self, instance: &Instance) -> Result<FilterOutcome>;
}

impl<F: Filter + ?Sized> Filter for &F {
    fn arity(&self) -> usize {
        (**self).arity()
    }

    fn apply(&self, instance: &Instance) -> Result<FilterOutcome> {
        (**self).apply(instance)
    }
}

impl<F: Filter + ?Sized> Filter for Box<F> {
    fn arity(&self) -> usize {
        (**self).arity()
    }

    fn apply(&self, instance: &Instance) -> Result<FilterOutcome> {
        (**self).apply(instance)
    }
}

/// A [`Filter`] backed by a closure.
pub struct FnFilter<F> {
    arity: usize,
    f: F,
}

impl<F> FnFilter<F>
where
    F: Fn(&Instance) -> FilterOutcome,
{
    pub fn new(arity: usize, f: F) -> Self {
        FnFilter { arity, f }
    }
}

impl<F> Filter for FnFilter<F>
where
    F: Fn(&Instance) -> FilterOutcome,
{
    fn arity(&self) -> usize {
        self.arity
    }

    fn apply(&self, instance: &Instance) -> Result<FilterOutcome> {
        Ok((self.f)(instance))
    }
}

/// The filter that removes nothing.
pub fn identity_filter(arity: usize) -> impl Filter {
    FnFilter::new(arity, |i: &Instance| FilterOutcome::from_instance(i.clone()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ComparisonMode {
    /// Outcomes must be pointwise equal (`check`).
    Equality,
    /// The tested outcome must be included in the trusted one (`stronger`).
    TestedSubsetOfTrusted,
}

impl ComparisonMode {
    fn holds(self, trusted: &FilterOutcome, tested: &FilterOutcome) -> Result<bool> {
        match self {
            ComparisonMode::Equality => pointwise_equal(tested, trusted),
            ComparisonMode::TestedSubsetOfTrusted => pointwise_subset(tested, trusted),
        }
    }
}

/// Kind of campaign that produced a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CampaignKind {
    Check,
    Stronger,
    Dives,
}

impl CampaignKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CampaignKind::Check => "check",
            CampaignKind::Stronger => "stronger",
            CampaignKind::Dives => "dives",
        }
    }
}

/// Which side of the comparison a finding concerns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Trusted,
    Tested,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Trusted => "trusted",
            Side::Tested => "tested",
        })
    }
}

/// Why a comparison failed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FailureReason {
    /// Only `side` claimed the instance has no solution.
    InconsistencyClaim(Side),
    /// Both filtered, but the domains of variable `var` violate the mode.
    DomainMismatch { var: usize },
    /// The filter returned a domain that is not a subset of its input domain.
    NotContracting { side: Side, var: usize },
    /// The filter returned a different number of domains than it was given.
    WrongArity { side: Side, got: usize },
    /// A `Filtered` outcome contained an empty domain.
    EmptyDomain { side: Side, var: usize },
}

impl FailureReason {
    pub fn is_contract_violation(&self) -> bool {
        matches!(
            self,
            FailureReason::NotContracting { .. }
                | FailureReason::WrongArity { .. }
                | FailureReason::EmptyDomain { .. }
        )
    }
}

impl fmt::Display for FailureReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FailureReason::InconsistencyClaim(side) => {
                write!(f, "only the {side} filter reported inconsistency")
            }
            FailureReason::DomainMismatch { var } => write!(f, "domains differ at variable {var}"),
            FailureReason::NotContracting { side, var } => write!(
                f,
                "contract violation: {side} filter added values to variable {var}"
            ),
            FailureReason::WrongArity { side, got } => write!(
                f,
                "contract violation: {side} filter returned {got} domains"
            ),
            FailureReason::EmptyDomain { side, var } => write!(
                f,
                "contract violation: {side} filter returned an empty domain for variable {var} instead of Inconsistent"
            ),
        }
    }
}

/// A failing comparison, already shrunk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub original: Instance,
    pub shrunk: Instance,
    pub trusted_outcome: FilterOutcome,
    pub tested_outcome: FilterOutcome,
    pub mode: ComparisonMode,
    pub reason: FailureReason,
    /// False if the shrink budget ran out before 1-minimality was reached.
    pub minimal: bool,
    /// Branching operations issued after setup (dive campaigns only).
    pub transcript: Option<Vec<BranchOp>>,
    /// Seed of the dives that failed on the root (dive campaigns only).
    pub dive_seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestReport {
    pub kind: CampaignKind,
    pub passed: bool,
    pub tests_run: usize,
    pub seed: u64,
    /// Instances re-drawn because their search space exceeded the cap.
    pub redraws: usize,
    pub failure: Option<Failure>,
}

impl fmt::Display for TestReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.failure {
            None => write!(
                f,
                "{} passed: {} tests, seed {}",
                self.kind.as_str(),
                self.tests_run,
                self.seed
            ),
            Some(fail) => {
                writeln!(
                    f,
                    "{} failed after {} tests (seed {}): {}",
                    self.kind.as_str(),
                    self.tests_run,
                    self.seed,
                    fail.reason
                )?;
                writeln!(f, "  original: {}", fail.original)?;
                writeln!(f, "  shrunk:   {}", fail.shrunk)?;
                writeln!(f, "  trusted:  {}", fail.trusted_outcome)?;
                write!(f, "  tested:   {}", fail.tested_outcome)?;
                if let Some(ops) = &fail.transcript {
                    write!(f, "\n  transcript: {} operations", ops.len())?;
                }
                Ok(())
            }
        }
    }
}

/// Structural checks on one outcome against its input.
pub(crate) fn contract_violation(
    side: Side,
    input: &Instance,
    outcome: &FilterOutcome,
    contracting: bool,
) -> Option<FailureReason> {
    let FilterOutcome::Filtered(out) = outcome else {
        return None;
    };
    if out.arity() != input.arity() {
        return Some(FailureReason::WrongArity {
            side,
            got: out.arity(),
        });
    }
    if let Some(var) = out.domains().iter().position(|d| d.is_empty()) {
        return Some(FailureReason::EmptyDomain { side, var });
    }
    if contracting {
        if let Some(var) = out
            .domains()
            .iter()
            .zip(input.domains())
            .position(|(o, i)| !o.is_subset_of(i))
        {
            return Some(FailureReason::NotContracting { side, var });
        }
    }
    None
}

/// Judges two outcomes under `mode`; `None` when they agree.
pub(crate) fn judge(
    mode: ComparisonMode,
    trusted: &FilterOutcome,
    tested: &FilterOutcome,
) -> Result<Option<FailureReason>> {
    if mode.holds(trusted, tested)? {
        return Ok(None);
    }
    Ok(Some(match (trusted, tested) {
        (FilterOutcome::Filtered(_), FilterOutcome::Inconsistent) => {
            FailureReason::InconsistencyClaim(Side::Tested)
        }
        (FilterOutcome::Inconsistent, FilterOutcome::Filtered(_)) => {
            FailureReason::InconsistencyClaim(Side::Trusted)
        }
        (FilterOutcome::Filtered(a), FilterOutcome::Filtered(b)) => {
            let var = a
                .domains()
                .iter()
                .zip(b.domains())
                .position(|(t, u)| match mode {
                    ComparisonMode::Equality => t != u,
                    ComparisonMode::TestedSubsetOfTrusted => !u.is_subset_of(t),
                })
                .unwrap_or(0);
            FailureReason::DomainMismatch { var }
        }
        (FilterOutcome::Inconsistent, FilterOutcome::Inconsistent) => {
            unreachable!("two inconsistent outcomes always agree")
        }
    }))
}

/// Result of comparing both filters on a single instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Comparison {
    pub trusted: FilterOutcome,
    pub tested: FilterOutcome,
    pub verdict: Option<FailureReason>,
}

/// Applies both filters to `instance` and judges the outcomes under `mode`.
pub fn compare_once(
    trusted: &dyn Filter,
    tested: &dyn Filter,
    mode: ComparisonMode,
    instance: &Instance,
) -> Result<Comparison> {
    let trusted_out = trusted.apply(instance)?;
    let tested_out = tested.apply(instance)?;
    let verdict = match contract_violation(Side::Trusted, instance, &trusted_out, true)
        .or_else(|| contract_violation(Side::Tested, instance, &tested_out, true))
    {
        Some(v) => Some(v),
        None => judge(mode, &trusted_out, &tested_out)?,
    };
    Ok(Comparison {
        trusted: trusted_out,
        tested: tested_out,
        verdict,
    })
}

/// Upper bound on consecutive re-draws of oversized instances.
const MAX_REDRAWS: usize = 10_000;

/// Draws the next instance whose search space fits within the cap.
pub(crate) fn draw_within_cap(rng: &mut Rng, cfg: &GenConfig, redraws: &mut usize) -> Result<Instance> {
    let mut attempts = 0;
    loop {
        let inst = generate_instance(rng, cfg);
        if cfg.cap.admits(inst.search_space_size()) {
            return Ok(inst);
        }
        *redraws += 1;
        attempts += 1;
        if attempts >= MAX_REDRAWS {
            return Err(Error::ResourceLimit {
                required: inst.search_space_size(),
                cap: cfg.cap.max_tuples(),
            });
        }
    }
}

fn check_arities(trusted: &dyn Filter, tested: &dyn Filter, cfg: &GenConfig) -> Result<()> {
    if trusted.arity() != tested.arity() {
        return Err(Error::contract(format!(
            "trusted filter has arity {}, tested filter has arity {}",
            trusted.arity(),
            tested.arity()
        )));
    }
    if cfg.n_vars != trusted.arity() {
        return Err(Error::contract(format!(
            "generator draws {} variables but the filters have arity {}",
            cfg.n_vars,
            trusted.arity()
        )));
    }
    Ok(())
}

/// Runs a static differential campaign under `mode`.
pub fn run_campaign(
    trusted: &dyn Filter,
    tested: &dyn Filter,
    mode: ComparisonMode,
    cfg: &GenConfig,
) -> Result<TestReport> {
    cfg.validate()?;
    check_arities(trusted, tested, cfg)?;
    let kind = match mode {
        ComparisonMode::Equality => CampaignKind::Check,
        ComparisonMode::TestedSubsetOfTrusted => CampaignKind::Stronger,
    };
    let mut rng = Rng::new(cfg.seed);
    let mut redraws = 0;
    for test in 0..cfg.n_tests {
        let instance = draw_within_cap(&mut rng, cfg, &mut redraws)?;
        if compare_once(trusted, tested, mode, &instance)?.verdict.is_none() {
            continue;
        }
        let failure = shrink_failure(trusted, tested, mode, instance)?;
        return Ok(TestReport {
            kind,
            passed: false,
            tests_run: test + 1,
            seed: cfg.seed,
            redraws,
            failure: Some(failure),
        });
    }
    Ok(TestReport {
        kind,
        passed: true,
        tests_run: cfg.n_tests,
        seed: cfg.seed,
        redraws,
        failure: None,
    })
}

fn shrink_failure(
    trusted: &dyn Filter,
    tested: &dyn Filter,
    mode: ComparisonMode,
    original: Instance,
) -> Result<Failure> {
    let mut error = None;
    let shrunk = shrink(&original, DEFAULT_SHRINK_BUDGET, |candidate| {
        match compare_once(trusted, tested, mode, candidate) {
            Ok(c) => c.verdict.is_some(),
            Err(e) => {
                error.get_or_insert(e);
                false
            }
        }
    });
    if let Some(e) = error {
        return Err(e);
    }
    let replay = compare_once(trusted, tested, mode, &shrunk.instance)?;
    Ok(Failure {
        original,
        shrunk: shrunk.instance,
        trusted_outcome: replay.trusted,
        tested_outcome: replay.tested,
        mode,
        reason: replay.verdict.expect("shrinking preserves the failure"),
        minimal: shrunk.minimal,
        transcript: None,
        dive_seed: None,
    })
}

/// Passes iff both filters agree exactly on every generated instance.
pub fn check(trusted: &dyn Filter, tested: &dyn Filter, cfg: &GenConfig) -> Result<TestReport> {
    run_campaign(trusted, tested, ComparisonMode::Equality, cfg)
}

/// Passes iff the tested filter prunes at least as much as the trusted one
/// on every generated instance. Equality counts as stronger.
pub fn stronger(trusted: &dyn Filter, tested: &dyn Filter, cfg: &GenConfig) -> Result<TestReport> {
    run_campaign(trusted, tested, ComparisonMode::TestedSubsetOfTrusted, cfg)
}

/// Failure of an assertion clause.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AssertionError {
    #[error("{clause} assertion failed\n{report}")]
    Failed {
        clause: &'static str,
        report: Box<TestReport>,
    },
    #[error("{clause} assertion could not run: {error}")]
    Aborted { clause: &'static str, error: Error },
}

impl AssertionError {
    pub fn report(&self) -> Option<&TestReport> {
        match self {
            AssertionError::Failed { report, .. } => Some(report),
            AssertionError::Aborted { .. } => None,
        }
    }
}

/// Fluent assertions over a tested filter.
///
/// ```
/// use propcheck::{assert_that, make_reference, Checker, ConsistencyLevel};
///
/// let arc = make_reference(ConsistencyLevel::Arc, Checker::all_different(3));
/// let bound_z = make_reference(ConsistencyLevel::BoundZ, Checker::all_different(3));
/// assert_that(&arc)
///     .with_config(propcheck::GenConfig { n_vars: 3, n_tests: 20, ..Default::default() })
///     .filter_as(&arc)?
///     .weaker_than(&bound_z)?;
/// # Ok::<(), propcheck::AssertionError>(())
/// ```
///
/// Despite its name, `weaker_than(t)` asserts the *trusted* filter `t` is
/// weaker than (or equal to) the tested one, i.e. `stronger(t, tested)`.
pub struct FilterAssert<'a> {
    tested: &'a dyn Filter,
    cfg: GenConfig,
}

pub fn assert_that(tested: &dyn Filter) -> FilterAssert<'_> {
    let cfg = GenConfig {
        n_vars: tested.arity(),
        ..GenConfig::default()
    };
    FilterAssert { tested, cfg }
}

impl<'a> FilterAssert<'a> {
    pub fn with_config(mut self, cfg: GenConfig) -> Self {
        self.cfg = cfg;
        self
    }

    fn clause(
        self,
        clause: &'static str,
        trusted: &dyn Filter,
        mode: ComparisonMode,
    ) -> std::result::Result<Self, AssertionError> {
        match run_campaign(trusted, self.tested, mode, &self.cfg) {
            Ok(report) if report.passed => Ok(self),
            Ok(report) => Err(AssertionError::Failed {
                clause,
                report: Box::new(report),
            }),
            Err(error) => Err(AssertionError::Aborted { clause, error }),
        }
    }

    /// Asserts `check(trusted, tested)` passes.
    pub fn filter_as(self, trusted: &dyn Filter) -> std::result::Result<Self, AssertionError> {
        self.clause("filterAs", trusted, ComparisonMode::Equality)
    }

    /// Asserts `stronger(trusted, tested)` passes.
    pub fn weaker_than(self, trusted: &dyn Filter) -> std::result::Result<Self, AssertionError> {
        self.clause("weakerThan", trusted, ComparisonMode::TestedSubsetOfTrusted)
    }
}
