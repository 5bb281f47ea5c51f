//! Testing of stateful (incremental) filters through search dives.
//!
//! A dive interleaves `Push` with a random domain restriction until a leaf
//! is reached (inconsistent, or every domain fixed), then pops a random
//! number of frames and starts the next dive from there. Both filters see
//! the exact same operation sequence and their outcomes are compared after
//! every single operation, so state-restoration bugs show up at the first
//! observable point.

use std::fmt;
use std::str::FromStr;

use log::warn;

use crate::comparator::{
    draw_within_cap, judge, CampaignKind, ComparisonMode, Failure,
    FailureReason, Filter, Side, TestReport,
};
use crate::domain::{is_leaf, FilterOutcome, Instance};
use crate::error::{Error, Result};
use crate::generator::{shrink, GenConfig, Rng, DEFAULT_SHRINK_BUDGET};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Eq,
    Ne,
    Lt,
    Gt,
}

impl Relation {
    pub const ALL: [Relation; 4] = [Relation::Eq, Relation::Ne, Relation::Lt, Relation::Gt];

    pub fn holds(self, value: i32, constant: i32) -> bool {
        match self {
            Relation::Eq => value == constant,
            Relation::Ne => value != constant,
            Relation::Lt => value < constant,
            Relation::Gt => value > constant,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Relation::Eq => "=",
            Relation::Ne => "!=",
            Relation::Lt => "<",
            Relation::Gt => ">",
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Relation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "=" | "==" => Ok(Relation::Eq),
            "!=" | "≠" => Ok(Relation::Ne),
            "<" => Ok(Relation::Lt),
            ">" => Ok(Relation::Gt),
            _ => Err(Error::Parse(format!("unknown relation `{s}`"))),
        }
    }
}

/// Restricts the domain of one variable by a relation with a constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Restriction {
    pub index: usize,
    pub relation: Relation,
    pub constant: i32,
}

impl fmt::Display for Restriction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{} {} {}", self.index, self.relation, self.constant)
    }
}

/// A move in the search tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BranchOp {
    Push,
    Pop,
    Restrict(Restriction),
}

impl fmt::Display for BranchOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BranchOp::Push => f.write_str("push"),
            BranchOp::Pop => f.write_str("pop"),
            BranchOp::Restrict(r) => write!(f, "restrict {r}"),
        }
    }
}

/// A filter that keeps state across a search.
///
/// `setup` is called exactly once, before any `branch_and_filter`. Both
/// return the domains after reaching the fixpoint.
pub trait FilterWithState {
    fn arity(&self) -> usize;

    fn setup(&mut self, root: &Instance) -> Result<FilterOutcome>;

    fn branch_and_filter(&mut self, op: &BranchOp) -> Result<FilterOutcome>;
}

impl<S: FilterWithState + ?Sized> FilterWithState for Box<S> {
    fn arity(&self) -> usize {
        (**self).arity()
    }

    fn setup(&mut self, root: &Instance) -> Result<FilterOutcome> {
        (**self).setup(root)
    }

    fn branch_and_filter(&mut self, op: &BranchOp) -> Result<FilterOutcome> {
        (**self).branch_and_filter(op)
    }
}

/// Applies `r` to `instance`; `None` if the restricted domain empties.
pub fn apply_restriction(instance: &Instance, r: &Restriction) -> Result<Option<Instance>> {
    if r.index >= instance.arity() {
        return Err(Error::contract(format!(
            "restriction on variable {} of an instance of arity {}",
            r.index,
            instance.arity()
        )));
    }
    let restricted = instance
        .domain(r.index)
        .retain(|v| r.relation.holds(v, r.constant));
    if restricted.is_empty() {
        return Ok(None);
    }
    Ok(Some(instance.with_domain(r.index, restricted)))
}

/// Draws a restriction: the variable uniformly among unfixed ones, then the
/// relation uniformly, then the constant uniformly from that variable's
/// current domain.
pub fn random_restriction(rng: &mut Rng, instance: &Instance) -> Result<Restriction> {
    let unfixed: Vec<usize> = (0..instance.arity())
        .filter(|&i| instance.domain(i).len() > 1)
        .collect();
    if unfixed.is_empty() {
        return Err(Error::contract("no unfixed variable to restrict"));
    }
    let index = unfixed[rng.below(unfixed.len() as u64) as usize];
    let relation = Relation::ALL[rng.below(4) as usize];
    let domain = instance.domain(index);
    let constant = domain.as_slice()[rng.below(domain.len() as u64) as usize];
    Ok(Restriction {
        index,
        relation,
        constant,
    })
}

/// Turns any static [`Filter`] into a [`FilterWithState`] by snapshotting
/// whole instances on `Push` and re-filtering after every restriction.
#[derive(Debug, Clone)]
pub struct IncrementalFiltering<F> {
    base: F,
    /// `None` until setup; the inner `None` marks an inconsistent state.
    current: Option<Option<Instance>>,
    stack: Vec<Option<Instance>>,
}

pub fn incremental_wrap<F: Filter>(base: F) -> IncrementalFiltering<F> {
    IncrementalFiltering {
        base,
        current: None,
        stack: Vec::new(),
    }
}

impl<F: Filter> IncrementalFiltering<F> {
    fn outcome(state: &Option<Instance>) -> FilterOutcome {
        match state {
            Some(inst) => FilterOutcome::Filtered(inst.clone()),
            None => FilterOutcome::Inconsistent,
        }
    }

    /// Number of open `Push` frames.
    pub fn depth(&self) -> usize {
        self.stack.len()
    }
}

impl<F: Filter> FilterWithState for IncrementalFiltering<F> {
    fn arity(&self) -> usize {
        self.base.arity()
    }

    fn setup(&mut self, root: &Instance) -> Result<FilterOutcome> {
        if self.current.is_some() {
            return Err(Error::contract("setup called twice"));
        }
        let out = self.base.apply(root)?;
        self.current = Some(out.instance().cloned());
        Ok(out)
    }

    fn branch_and_filter(&mut self, op: &BranchOp) -> Result<FilterOutcome> {
        let Some(current) = self.current.as_mut() else {
            return Err(Error::contract("branch_and_filter before setup"));
        };
        match op {
            BranchOp::Push => self.stack.push(current.clone()),
            BranchOp::Pop => {
                *current = self
                    .stack
                    .pop()
                    .ok_or_else(|| Error::contract("pop without a matching push"))?;
            }
            BranchOp::Restrict(r) => {
                if let Some(inst) = current {
                    *current = match apply_restriction(inst, r)? {
                        Some(restricted) => self.base.apply(&restricted)?.instance().cloned(),
                        None => None,
                    };
                }
            }
        }
        Ok(Self::outcome(current))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiveConfig {
    pub nb_dives: usize,
    /// Restrictions allowed in one dive before it is treated as a leaf.
    pub max_depth: usize,
    pub seed: u64,
}

impl Default for DiveConfig {
    fn default() -> Self {
        DiveConfig {
            nb_dives: 20,
            max_depth: 64,
            seed: 0,
        }
    }
}

impl DiveConfig {
    pub fn validate(&self) -> Result<()> {
        if self.nb_dives == 0 {
            return Err(Error::InvalidConfig("the number of dives must be at least 1".into()));
        }
        if self.max_depth == 0 {
            return Err(Error::InvalidConfig("the maximum dive depth must be at least 1".into()));
        }
        Ok(())
    }
}

/// Disagreement observed during a dive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiveMismatch {
    pub trusted: FilterOutcome,
    pub tested: FilterOutcome,
    pub reason: FailureReason,
}

/// What happened during one dive session.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DiveRun {
    pub dives_completed: usize,
    /// Operations issued after setup, up to and including a mismatching one.
    pub transcript: Vec<BranchOp>,
    pub mismatch: Option<DiveMismatch>,
}

struct Session<'a> {
    trusted: &'a mut dyn FilterWithState,
    tested: &'a mut dyn FilterWithState,
    mode: ComparisonMode,
    arity: usize,
    transcript: Vec<BranchOp>,
}

enum Step {
    Agreed(FilterOutcome),
    Mismatch(DiveMismatch),
}

impl Session<'_> {
    fn compare(&self, trusted: FilterOutcome, tested: FilterOutcome) -> Result<Step> {
        let mut reason = None;
        for (side, out) in [(Side::Trusted, &trusted), (Side::Tested, &tested)] {
            let Some(inst) = out.instance() else { continue };
            if inst.arity() != self.arity {
                return Err(Error::contract(format!(
                    "{side} filter returned {} domains, expected {}",
                    inst.arity(),
                    self.arity
                )));
            }
            if let Some(var) = inst.domains().iter().position(|d| d.is_empty()) {
                reason.get_or_insert(FailureReason::EmptyDomain { side, var });
            }
        }
        if reason.is_none() {
            reason = judge(self.mode, &trusted, &tested)?;
        }
        Ok(match reason {
            None => Step::Agreed(trusted),
            Some(reason) => Step::Mismatch(DiveMismatch {
                trusted,
                tested,
                reason,
            }),
        })
    }

    fn setup(&mut self, root: &Instance) -> Result<Step> {
        let t = self.trusted.setup(root)?;
        let u = self.tested.setup(root)?;
        self.compare(t, u)
    }

    fn issue(&mut self, op: BranchOp) -> Result<Step> {
        self.transcript.push(op);
        let t = self.trusted.branch_and_filter(&op)?;
        let u = self.tested.branch_and_filter(&op)?;
        self.compare(t, u)
    }
}

macro_rules! agreed {
    ($step:expr, $run:ident, $session:ident) => {
        match $step? {
            Step::Agreed(out) => out,
            Step::Mismatch(m) => {
                $run.mismatch = Some(m);
                $run.transcript = $session.transcript;
                return Ok($run);
            }
        }
    };
}

/// Runs the dive procedure on `root`, comparing both stateful filters after
/// every operation. Restrictions are drawn from the trusted side's domains.
///
/// Both filters must be fresh (not set up yet).
pub fn dives(
    root: &Instance,
    trusted: &mut dyn FilterWithState,
    tested: &mut dyn FilterWithState,
    mode: ComparisonMode,
    cfg: &DiveConfig,
) -> Result<DiveRun> {
    cfg.validate()?;
    let mut rng = Rng::new(cfg.seed);
    let mut run = DiveRun::default();
    let mut session = Session {
        trusted,
        tested,
        mode,
        arity: root.arity(),
        transcript: Vec::new(),
    };

    let mut current = agreed!(session.setup(root), run, session);
    let mut open_frames = 0usize;
    while run.dives_completed < cfg.nb_dives {
        let mut restrictions = 0;
        while !is_leaf(&current) && restrictions < cfg.max_depth {
            current = agreed!(session.issue(BranchOp::Push), run, session);
            open_frames += 1;
            let domains = current
                .instance()
                .ok_or_else(|| Error::contract("trusted filter changed state on push"))?;
            let r = random_restriction(&mut rng, domains)?;
            current = agreed!(session.issue(BranchOp::Restrict(r)), run, session);
            restrictions += 1;
        }
        if !is_leaf(&current) {
            warn!(
                "dive {} reached the depth limit of {} restrictions without a leaf",
                run.dives_completed, cfg.max_depth
            );
        }
        run.dives_completed += 1;
        if open_frames == 0 {
            continue;
        }
        let pops = if open_frames >= 2 {
            rng.range_inclusive(1, open_frames as u64 - 1) as usize
        } else {
            1
        };
        for _ in 0..pops {
            current = agreed!(session.issue(BranchOp::Pop), run, session);
            open_frames -= 1;
        }
    }
    run.transcript = session.transcript;
    Ok(run)
}

/// Replays a recorded transcript; returns the first mismatch, if any.
pub fn replay_transcript(
    root: &Instance,
    trusted: &mut dyn FilterWithState,
    tested: &mut dyn FilterWithState,
    mode: ComparisonMode,
    transcript: &[BranchOp],
) -> Result<Option<DiveMismatch>> {
    let mut session = Session {
        trusted,
        tested,
        mode,
        arity: root.arity(),
        transcript: Vec::new(),
    };
    if let Step::Mismatch(m) = session.setup(root)? {
        return Ok(Some(m));
    }
    for op in transcript {
        if let Step::Mismatch(m) = session.issue(*op)? {
            return Ok(Some(m));
        }
    }
    Ok(None)
}

/// Runs dives over `gen.n_tests` random roots, each with fresh filters from
/// the factories. The first failing root is shrunk; the reported transcript
/// belongs to the shrunk root.
pub fn dive_campaign<T, U>(
    mut make_trusted: impl FnMut() -> T,
    mut make_tested: impl FnMut() -> U,
    mode: ComparisonMode,
    gen: &GenConfig,
    dive: &DiveConfig,
) -> Result<TestReport>
where
    T: FilterWithState,
    U: FilterWithState,
{
    gen.validate()?;
    dive.validate()?;
    let (ta, ua) = (make_trusted().arity(), make_tested().arity());
    if ta != ua || ta != gen.n_vars {
        return Err(Error::contract(format!(
            "arity mismatch: trusted {ta}, tested {ua}, generator {}",
            gen.n_vars
        )));
    }

    let mut rng = Rng::new(gen.seed);
    let mut redraws = 0;
    for test in 0..gen.n_tests {
        let root = draw_within_cap(&mut rng, gen, &mut redraws)?;
        let cfg = DiveConfig {
            seed: rng.next_u64(),
            ..dive.clone()
        };
        let mut session = |inst: &Instance| {
            dives(inst, &mut make_trusted(), &mut make_tested(), mode, &cfg)
        };
        if session(&root)?.mismatch.is_none() {
            continue;
        }
        let mut error = None;
        let shrunk = shrink(&root, DEFAULT_SHRINK_BUDGET, |candidate| match session(candidate) {
            Ok(run) => run.mismatch.is_some(),
            Err(e) => {
                error.get_or_insert(e);
                false
            }
        });
        if let Some(e) = error {
            return Err(e);
        }
        let run = session(&shrunk.instance)?;
        let mismatch = run.mismatch.expect("shrinking preserves the failure");
        return Ok(TestReport {
            kind: CampaignKind::Dives,
            passed: false,
            tests_run: test + 1,
            seed: gen.seed,
            redraws,
            failure: Some(Failure {
                original: root,
                shrunk: shrunk.instance,
                trusted_outcome: mismatch.trusted,
                tested_outcome: mismatch.tested,
                mode,
                reason: mismatch.reason,
                minimal: shrunk.minimal,
                transcript: Some(run.transcript),
                dive_seed: Some(cfg.seed),
            }),
        });
    }
    Ok(TestReport {
        kind: CampaignKind::Dives,
        passed: true,
        tests_run: gen.n_tests,
        seed: gen.seed,
        redraws,
        failure: None,
    })
}
