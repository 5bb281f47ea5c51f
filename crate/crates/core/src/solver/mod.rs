//! A small trail-based constraint solver used to exercise the framework on
//! realistic, stateful propagators.
//!
//! Domains are undone value by value: every removal pushes an undo entry on
//! the trail and `pop_state` replays one frame of entries backwards.

mod alldiff;
mod recipe;
mod sum;

use std::collections::VecDeque;

use crate::domain::Domain;
use crate::error::{Error, Result};

pub use alldiff::{AllDifferentAc, AllDifferentFc};
pub use recipe::{as_filter, as_filter_with_state, with_bug, BugId, PropagatorKind, Recipe, SolverFilter, SolverFilterWithState};
pub use sum::SumEqualsBc;

/// Raised when a domain would become empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("inconsistency")]
pub struct Inconsistency;

pub type CpResult<T> = std::result::Result<T, Inconsistency>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(usize);

impl VarId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// Handle to a reversible integer living in the store.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RevInt(usize);

#[derive(Debug, Clone)]
struct TrailedVar {
    /// Initial values, sorted.
    values: Vec<i32>,
    present: Vec<bool>,
    size: usize,
    /// Positions of the current minimum and maximum in `values`.
    lo: usize,
    hi: usize,
}

impl TrailedVar {
    fn new(domain: &Domain) -> Self {
        let values = domain.as_slice().to_vec();
        TrailedVar {
            present: vec![true; values.len()],
            size: values.len(),
            lo: 0,
            hi: values.len().saturating_sub(1),
            values,
        }
    }

    fn position(&self, value: i32) -> Option<usize> {
        self.values
            .binary_search(&value)
            .ok()
            .filter(|&k| self.present[k])
    }

    fn remove_at(&mut self, k: usize) {
        debug_assert!(self.present[k] && self.size > 1);
        self.present[k] = false;
        self.size -= 1;
        if k == self.lo {
            while !self.present[self.lo] {
                self.lo += 1;
            }
        }
        if k == self.hi {
            while !self.present[self.hi] {
                self.hi -= 1;
            }
        }
    }

    fn restore_at(&mut self, k: usize) {
        self.present[k] = true;
        self.size += 1;
        self.lo = self.lo.min(k);
        self.hi = self.hi.max(k);
    }
}

#[derive(Debug, Clone, Copy)]
enum Entry {
    Removed { var: usize, pos: usize },
    Int { slot: usize, old: i64 },
}

#[derive(Debug, Clone, Default)]
struct Trail {
    entries: Vec<Entry>,
    frames: Vec<usize>,
}

/// Variable domains, reversible integers and the trail that restores them.
#[derive(Debug, Clone, Default)]
pub struct Store {
    vars: Vec<TrailedVar>,
    ints: Vec<i64>,
    trail: Trail,
    modified: Vec<VarId>,
    is_modified: Vec<bool>,
}

impl Store {
    pub fn new() -> Self {
        Store::default()
    }

    /// Adds a variable. An empty initial domain is accepted but makes the
    /// store inconsistent from the start.
    pub fn add_var(&mut self, domain: &Domain) -> VarId {
        self.vars.push(TrailedVar::new(domain));
        self.is_modified.push(false);
        VarId(self.vars.len() - 1)
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn size(&self, x: VarId) -> usize {
        self.vars[x.0].size
    }

    pub fn is_fixed(&self, x: VarId) -> bool {
        self.size(x) == 1
    }

    pub fn min(&self, x: VarId) -> i32 {
        let v = &self.vars[x.0];
        v.values[v.lo]
    }

    pub fn max(&self, x: VarId) -> i32 {
        let v = &self.vars[x.0];
        v.values[v.hi]
    }

    pub fn contains(&self, x: VarId, value: i32) -> bool {
        self.vars[x.0].position(value).is_some()
    }

    /// Current values in increasing order.
    pub fn values(&self, x: VarId) -> impl Iterator<Item = i32> + '_ {
        let v = &self.vars[x.0];
        v.values
            .iter()
            .zip(&v.present)
            .filter_map(|(&value, &p)| p.then_some(value))
    }

    pub fn domain(&self, x: VarId) -> Domain {
        Domain::from_sorted(self.values(x).collect())
    }

    fn touch(&mut self, x: VarId) {
        if !self.is_modified[x.0] {
            self.is_modified[x.0] = true;
            self.modified.push(x);
        }
    }

    fn drain_modified(&mut self) -> Vec<VarId> {
        for x in &self.modified {
            self.is_modified[x.0] = false;
        }
        std::mem::take(&mut self.modified)
    }

    fn remove_pos(&mut self, x: VarId, pos: usize) {
        self.vars[x.0].remove_at(pos);
        self.trail.entries.push(Entry::Removed { var: x.0, pos });
        self.touch(x);
    }

    /// Removes `value`; returns whether the domain changed.
    pub fn remove(&mut self, x: VarId, value: i32) -> CpResult<bool> {
        let Some(pos) = self.vars[x.0].position(value) else {
            return Ok(false);
        };
        if self.vars[x.0].size == 1 {
            return Err(Inconsistency);
        }
        self.remove_pos(x, pos);
        Ok(true)
    }

    /// Removes every value strictly below `bound`.
    pub fn remove_below(&mut self, x: VarId, bound: i64) -> CpResult<bool> {
        if i64::from(self.max(x)) < bound {
            return Err(Inconsistency);
        }
        let mut changed = false;
        while i64::from(self.min(x)) < bound {
            let pos = self.vars[x.0].lo;
            self.remove_pos(x, pos);
            changed = true;
        }
        Ok(changed)
    }

    /// Removes every value strictly above `bound`.
    pub fn remove_above(&mut self, x: VarId, bound: i64) -> CpResult<bool> {
        if i64::from(self.min(x)) > bound {
            return Err(Inconsistency);
        }
        let mut changed = false;
        while i64::from(self.max(x)) > bound {
            let pos = self.vars[x.0].hi;
            self.remove_pos(x, pos);
            changed = true;
        }
        Ok(changed)
    }

    /// Reduces the domain to `{value}`.
    pub fn assign(&mut self, x: VarId, value: i32) -> CpResult<bool> {
        if !self.contains(x, value) {
            return Err(Inconsistency);
        }
        let changed = self.size(x) > 1;
        self.remove_below(x, i64::from(value))?;
        self.remove_above(x, i64::from(value))?;
        Ok(changed)
    }

    pub fn new_int(&mut self, init: i64) -> RevInt {
        self.ints.push(init);
        RevInt(self.ints.len() - 1)
    }

    pub fn int(&self, r: RevInt) -> i64 {
        self.ints[r.0]
    }

    pub fn set_int(&mut self, r: RevInt, value: i64) {
        let old = self.ints[r.0];
        if old != value {
            self.trail.entries.push(Entry::Int { slot: r.0, old });
            self.ints[r.0] = value;
        }
    }

    pub fn push_state(&mut self) {
        self.trail.frames.push(self.trail.entries.len());
    }

    /// Undoes every change made since the matching `push_state`.
    pub fn pop_state(&mut self) -> Result<()> {
        let mark = self
            .trail
            .frames
            .pop()
            .ok_or_else(|| Error::contract("pop_state without an open frame"))?;
        while self.trail.entries.len() > mark {
            match self.trail.entries.pop().expect("above mark") {
                Entry::Removed { var, pos } => self.vars[var].restore_at(pos),
                Entry::Int { slot, old } => self.ints[slot] = old,
            }
        }
        self.drain_modified();
        Ok(())
    }

    /// Number of open frames.
    pub fn depth(&self) -> usize {
        self.trail.frames.len()
    }
}

/// A filtering procedure over some variables of a [`Store`].
///
/// `propagate` must only remove values. The solver calls it again whenever
/// another propagator changes one of the variables in `scope`.
pub trait Propagator {
    fn scope(&self) -> &[VarId];

    fn propagate(&mut self, store: &mut Store) -> CpResult<()>;
}

/// Order in which queued propagators run. The fixpoint does not depend on
/// it; only the amount of work does.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QueueOrder {
    #[default]
    Fifo,
    Lifo,
}

pub struct Solver {
    store: Store,
    propagators: Vec<Box<dyn Propagator>>,
    watchers: Vec<Vec<usize>>,
    queue: VecDeque<usize>,
    queued: Vec<bool>,
    order: QueueOrder,
}

impl Default for Solver {
    fn default() -> Self {
        Solver::new()
    }
}

impl Solver {
    pub fn new() -> Self {
        Solver::with_order(QueueOrder::Fifo)
    }

    pub fn with_order(order: QueueOrder) -> Self {
        Solver {
            store: Store::new(),
            propagators: Vec::new(),
            watchers: Vec::new(),
            queue: VecDeque::new(),
            queued: Vec::new(),
            order,
        }
    }

    pub fn store(&self) -> &Store {
        &self.store
    }

    pub fn store_mut(&mut self) -> &mut Store {
        &mut self.store
    }

    pub fn add_var(&mut self, domain: &Domain) -> VarId {
        self.watchers.push(Vec::new());
        self.store.add_var(domain)
    }

    pub fn domain(&self, x: VarId) -> Domain {
        self.store.domain(x)
    }

    fn enqueue(&mut self, p: usize) {
        if !self.queued[p] {
            self.queued[p] = true;
            self.queue.push_back(p);
        }
    }

    /// Registers `p` and propagates to the fixpoint.
    pub fn post(&mut self, p: Box<dyn Propagator>) -> CpResult<()> {
        let id = self.propagators.len();
        for x in p.scope() {
            self.watchers[x.0].push(id);
        }
        self.propagators.push(p);
        self.queued.push(false);
        self.enqueue(id);
        self.fixpoint()
    }

    /// Queues every propagator.
    pub fn schedule_all(&mut self) {
        for p in 0..self.propagators.len() {
            self.enqueue(p);
        }
    }

    fn schedule_watchers(&mut self, except: Option<usize>) {
        for x in self.store.drain_modified() {
            for k in 0..self.watchers[x.0].len() {
                let p = self.watchers[x.0][k];
                if Some(p) != except {
                    self.enqueue(p);
                }
            }
        }
    }

    /// Runs queued propagators until no domain changes.
    pub fn fixpoint(&mut self) -> CpResult<()> {
        self.schedule_watchers(None);
        loop {
            let next = match self.order {
                QueueOrder::Fifo => self.queue.pop_front(),
                QueueOrder::Lifo => self.queue.pop_back(),
            };
            let Some(p) = next else {
                return Ok(());
            };
            self.queued[p] = false;
            if let Err(e) = self.propagators[p].propagate(&mut self.store) {
                for q in self.queue.drain(..) {
                    self.queued[q] = false;
                }
                self.store.drain_modified();
                return Err(e);
            }
            self.schedule_watchers(Some(p));
        }
    }

    pub fn push_state(&mut self) {
        self.store.push_state();
    }

    pub fn pop_state(&mut self) -> Result<()> {
        self.store.pop_state()
    }

    pub fn depth(&self) -> usize {
        self.store.depth()
    }
}

/// A counter that is either restored by the trail or, when emulating a
/// state-management bug, silently kept across backtracking.
#[derive(Debug, Clone)]
pub(crate) enum Counter {
    Trailed(RevInt),
    Untrailed(i64),
}

impl Counter {
    pub(crate) fn new(store: &mut Store, init: i64, trailed: bool) -> Self {
        if trailed {
            Counter::Trailed(store.new_int(init))
        } else {
            Counter::Untrailed(init)
        }
    }

    pub(crate) fn get(&self, store: &Store) -> i64 {
        match self {
            Counter::Trailed(r) => store.int(*r),
            Counter::Untrailed(v) => *v,
        }
    }

    pub(crate) fn set(&mut self, store: &mut Store, value: i64) {
        match self {
            Counter::Trailed(r) => store.set_int(*r, value),
            Counter::Untrailed(v) => *v = value,
        }
    }
}

/// Keeps the fixed variables of a scope at the front of a permutation; only
/// the boundary is reversible.
#[derive(Debug, Clone)]
pub(crate) struct FixedPartition {
    pub(crate) order: Vec<usize>,
    pub(crate) n_fixed: Counter,
}

impl FixedPartition {
    pub(crate) fn new(store: &mut Store, len: usize, trailed: bool) -> Self {
        FixedPartition {
            order: (0..len).collect(),
            n_fixed: Counter::new(store, 0, trailed),
        }
    }

    /// Moves newly fixed variables into the fixed prefix. Returns the prefix
    /// length before and after; `order[before..after]` are the new ones.
    pub(crate) fn update(&mut self, store: &mut Store, vars: &[VarId]) -> (usize, usize) {
        let before = self.n_fixed.get(store) as usize;
        let mut nf = before;
        for k in before..self.order.len() {
            let i = self.order[k];
            if store.is_fixed(vars[i]) {
                self.order.swap(k, nf);
                nf += 1;
            }
        }
        self.n_fixed.set(store, nf as i64);
        (before, nf)
    }
}
