//! Named propagator recipes, the injectable bug corpus, and the adapters that
//! expose a recipe as a [`Filter`] or a [`FilterWithState`].

use std::fmt;
use std::str::FromStr;

use super::{AllDifferentAc, AllDifferentFc, Propagator, Solver, Store, SumEqualsBc, VarId};
use crate::comparator::Filter;
use crate::domain::{FilterOutcome, Instance};
use crate::error::{Error, Result};
use crate::stateful::{BranchOp, FilterWithState, Relation};

/// Defects that can be injected into a recipe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum BugId {
    #[default]
    None,
    /// Swaps the two bound formulas of the sum propagator.
    SumReversedBound,
    /// Forward checking never prunes the last variable.
    AllDiffFcSkipLast,
    /// The count of fixed variables is not restored on backtrack.
    TrailNoRestore,
}

impl BugId {
    pub const ALL: [BugId; 4] = [
        BugId::None,
        BugId::SumReversedBound,
        BugId::AllDiffFcSkipLast,
        BugId::TrailNoRestore,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BugId::None => "NONE",
            BugId::SumReversedBound => "REVERSED_BOUND",
            BugId::AllDiffFcSkipLast => "FC_SKIP_LAST",
            BugId::TrailNoRestore => "TRAIL_NO_RESTORE",
        }
    }
}

impl fmt::Display for BugId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BugId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let name = s.trim().to_ascii_uppercase();
        let name = name.strip_prefix("BUG_").unwrap_or(&name);
        match name {
            "NONE" => Ok(BugId::None),
            "REVERSED_BOUND" | "SUM_REVERSED_BOUND" => Ok(BugId::SumReversedBound),
            "FC_SKIP_LAST" | "ALLDIFF_FC_SKIP_LAST" => Ok(BugId::AllDiffFcSkipLast),
            "TRAIL_NO_RESTORE" => Ok(BugId::TrailNoRestore),
            _ => Err(Error::Parse(format!(
                "unknown bug `{s}`; expected one of NONE, REVERSED_BOUND, FC_SKIP_LAST, TRAIL_NO_RESTORE"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PropagatorKind {
    SumBc { target: i64 },
    AllDiffFc,
    AllDiffAc,
}

/// A buildable propagator: its kind plus an optional injected defect.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Recipe {
    pub kind: PropagatorKind,
    pub bug: BugId,
}

impl Recipe {
    pub fn sum_equals_bc(target: i64) -> Self {
        Recipe {
            kind: PropagatorKind::SumBc { target },
            bug: BugId::None,
        }
    }

    pub fn all_different_fc() -> Self {
        Recipe {
            kind: PropagatorKind::AllDiffFc,
            bug: BugId::None,
        }
    }

    pub fn all_different_ac() -> Self {
        Recipe {
            kind: PropagatorKind::AllDiffAc,
            bug: BugId::None,
        }
    }

    /// Same as the free function [`with_bug`].
    pub fn with_bug(self, bug: BugId) -> Result<Self> {
        with_bug(bug, self)
    }

    /// Instantiates the propagator over `vars`.
    pub fn build(&self, store: &mut Store, vars: &[VarId]) -> Box<dyn Propagator> {
        let trailed = self.bug != BugId::TrailNoRestore;
        match self.kind {
            PropagatorKind::SumBc { target } => Box::new(SumEqualsBc::build(
                store,
                vars,
                target,
                self.bug == BugId::SumReversedBound,
                trailed,
            )),
            PropagatorKind::AllDiffFc => Box::new(AllDifferentFc::build(
                store,
                vars,
                self.bug == BugId::AllDiffFcSkipLast,
                trailed,
            )),
            PropagatorKind::AllDiffAc => Box::new(AllDifferentAc::build(store, vars, trailed)),
        }
    }

    fn name(&self) -> String {
        match self.kind {
            PropagatorKind::SumBc { target } => format!("sum-bc={target}"),
            PropagatorKind::AllDiffFc => "alldiff-fc".into(),
            PropagatorKind::AllDiffAc => "alldiff-ac".into(),
        }
    }
}

impl fmt::Display for Recipe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())?;
        if self.bug != BugId::None {
            write!(f, "+bug:{}", self.bug)?;
        }
        Ok(())
    }
}

/// Parses `sum-bc=<c>`, `alldiff-fc` or `alldiff-ac`, optionally followed by
/// `+bug:<BugId>`.
impl FromStr for Recipe {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (base, bug) = match s.split_once('+') {
            Some((base, suffix)) => {
                let id = suffix.strip_prefix("bug:").ok_or_else(|| {
                    Error::Parse(format!("expected `+bug:<id>` after the recipe name in `{s}`"))
                })?;
                (base, id.parse::<BugId>()?)
            }
            None => (s, BugId::None),
        };
        let recipe = match base.trim() {
            "alldiff-fc" => Recipe::all_different_fc(),
            "alldiff-ac" => Recipe::all_different_ac(),
            other => match other.strip_prefix("sum-bc=") {
                Some(c) => Recipe::sum_equals_bc(c.trim().parse().map_err(|_| {
                    Error::Parse(format!("invalid sum constant `{c}`"))
                })?),
                None if other == "sum-bc" => {
                    return Err(Error::Parse(
                        "`sum-bc` needs its constant here, as in `sum-bc=15`".into(),
                    ))
                }
                None => {
                    return Err(Error::Parse(format!(
                        "unknown recipe `{other}`; expected sum-bc=<c>, alldiff-fc or alldiff-ac"
                    )))
                }
            },
        };
        recipe.with_bug(bug)
    }
}

/// Injects `bug` into `recipe`. The sum bug needs the sum propagator and the
/// forward-checking bug needs forward checking; the trail bug fits any.
pub fn with_bug(bug: BugId, recipe: Recipe) -> Result<Recipe> {
    let compatible = match bug {
        BugId::None | BugId::TrailNoRestore => true,
        BugId::SumReversedBound => matches!(recipe.kind, PropagatorKind::SumBc { .. }),
        BugId::AllDiffFcSkipLast => recipe.kind == PropagatorKind::AllDiffFc,
    };
    if !compatible {
        return Err(Error::contract(format!("bug {bug} does not apply to {}", recipe.name())));
    }
    Ok(Recipe { bug, ..recipe })
}

fn read_back(solver: &Solver, vars: &[VarId]) -> FilterOutcome {
    let domains = vars.iter().map(|&x| solver.domain(x)).collect();
    FilterOutcome::Filtered(Instance::new(domains).expect("arity at least one"))
}

fn check_arity(expected: usize, instance: &Instance) -> Result<()> {
    if instance.arity() != expected {
        return Err(Error::contract(format!(
            "filter of arity {expected} applied to an instance of arity {}",
            instance.arity()
        )));
    }
    Ok(())
}

/// A recipe run by a fresh solver on every `apply`.
#[derive(Debug, Clone)]
pub struct SolverFilter {
    recipe: Recipe,
    arity: usize,
}

pub fn as_filter(recipe: Recipe, arity: usize) -> SolverFilter {
    SolverFilter { recipe, arity }
}

impl SolverFilter {
    pub fn recipe(&self) -> Recipe {
        self.recipe
    }
}

impl Filter for SolverFilter {
    fn arity(&self) -> usize {
        self.arity
    }

    fn apply(&self, instance: &Instance) -> Result<FilterOutcome> {
        check_arity(self.arity, instance)?;
        if instance.has_empty_domain() {
            return Ok(FilterOutcome::Inconsistent);
        }
        let mut solver = Solver::new();
        let vars: Vec<VarId> = instance.domains().iter().map(|d| solver.add_var(d)).collect();
        let p = self.recipe.build(solver.store_mut(), &vars);
        Ok(match solver.post(p) {
            Ok(()) => read_back(&solver, &vars),
            Err(_) => FilterOutcome::Inconsistent,
        })
    }
}

/// A recipe kept alive across a search: branching operations become trail
/// frames and domain restrictions followed by a fixpoint.
pub struct SolverFilterWithState {
    recipe: Recipe,
    arity: usize,
    solver: Option<Solver>,
    vars: Vec<VarId>,
    /// Trail depth at which the current state became inconsistent.
    failed_at: Option<usize>,
}

pub fn as_filter_with_state(recipe: Recipe, arity: usize) -> SolverFilterWithState {
    SolverFilterWithState {
        recipe,
        arity,
        solver: None,
        vars: Vec::new(),
        failed_at: None,
    }
}

impl SolverFilterWithState {
    fn outcome(&self) -> FilterOutcome {
        match (&self.solver, self.failed_at) {
            (Some(solver), None) => read_back(solver, &self.vars),
            _ => FilterOutcome::Inconsistent,
        }
    }
}

impl FilterWithState for SolverFilterWithState {
    fn arity(&self) -> usize {
        self.arity
    }

    fn setup(&mut self, root: &Instance) -> Result<FilterOutcome> {
        if self.solver.is_some() {
            return Err(Error::contract("setup called twice"));
        }
        check_arity(self.arity, root)?;
        let mut solver = Solver::new();
        self.vars = root.domains().iter().map(|d| solver.add_var(d)).collect();
        if root.has_empty_domain() {
            self.failed_at = Some(0);
        } else {
            let p = self.recipe.build(solver.store_mut(), &self.vars);
            if solver.post(p).is_err() {
                self.failed_at = Some(0);
            }
        }
        self.solver = Some(solver);
        Ok(self.outcome())
    }

    fn branch_and_filter(&mut self, op: &BranchOp) -> Result<FilterOutcome> {
        let solver = self
            .solver
            .as_mut()
            .ok_or_else(|| Error::contract("branch_and_filter before setup"))?;
        match op {
            BranchOp::Push => solver.push_state(),
            BranchOp::Pop => {
                solver.pop_state()?;
                if self.failed_at.is_some_and(|d| d > solver.depth()) {
                    self.failed_at = None;
                }
                if self.failed_at.is_none() {
                    solver.schedule_all();
                    if solver.fixpoint().is_err() {
                        self.failed_at = Some(solver.depth());
                    }
                }
            }
            BranchOp::Restrict(r) => {
                if r.index >= self.arity {
                    return Err(Error::contract(format!(
                        "restriction on variable {} of a filter of arity {}",
                        r.index, self.arity
                    )));
                }
                if self.failed_at.is_none() {
                    let x = self.vars[r.index];
                    let c = i64::from(r.constant);
                    let store = solver.store_mut();
                    let applied = match r.relation {
                        Relation::Eq => store.assign(x, r.constant),
                        Relation::Ne => store.remove(x, r.constant),
                        Relation::Lt => store.remove_above(x, c - 1),
                        Relation::Gt => store.remove_below(x, c + 1),
                    };
                    if applied.and_then(|_| solver.fixpoint()).is_err() {
                        self.failed_at = Some(solver.depth());
                    }
                }
            }
        }
        Ok(self.outcome())
    }
}
