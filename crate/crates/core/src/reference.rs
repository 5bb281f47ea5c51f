//! Trusted reference filters derived from a feasibility checker.
//!
//! Every reference works by explicit enumeration, so they are only meant for
//! small instances. The four consistency levels are:
//!
//! * **arc** (generalized arc / domain consistency): every remaining value of
//!   every variable appears in some solution drawn from the actual domains.
//! * **bound-Z**: the minimum and maximum of every domain have a support in
//!   which the other variables range over their integer intervals
//!   `[min, max]`. Interior values are left untouched.
//! * **bound-D**: as bound-Z, but supports must take the other variables'
//!   values from their actual domains (holes respected).
//! * **range**: every value (not only the bounds) has a support over the other
//!   variables' integer intervals.
//!
//! The bound and range variants are greatest fixpoints: tightening one domain
//! shrinks the intervals other variables are supported by, so the pass is
//! repeated until nothing changes. Arc consistency is computed in one pass as
//! the union of all solutions.
//!
//! Every enumeration is guarded by an [`EnumerationCap`]. Exceeding it is a
//! hard [`Error::ResourceLimit`], never a silent truncation.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::comparator::Filter;
use crate::domain::{Assignment, Domain, FilterOutcome, Instance};
use crate::error::{Error, Result};

type Predicate = dyn Fn(&[i32]) -> bool + Send + Sync;

/// A predicate over complete assignments defining a constraint's semantics.
///
/// The predicate must be deterministic and free of side effects.
#[derive(Clone)]
pub struct Checker {
    name: String,
    arity: usize,
    predicate: Arc<Predicate>,
}

impl Checker {
    pub fn new(
        name: impl Into<String>,
        arity: usize,
        predicate: impl Fn(&[i32]) -> bool + Send + Sync + 'static,
    ) -> Self {
        Checker {
            name: name.into(),
            arity,
            predicate: Arc::new(predicate),
        }
    }

    /// All values pairwise distinct.
    pub fn all_different(arity: usize) -> Self {
        Checker::new("alldiff", arity, |x| {
            let mut seen = x.to_vec();
            seen.sort_unstable();
            seen.windows(2).all(|w| w[0] != w[1])
        })
    }

    /// Sum of the values equals `target`.
    pub fn sum_equals(arity: usize, target: i64) -> Self {
        Checker::new(format!("sum={target}"), arity, move |x| {
            x.iter().map(|&v| i64::from(v)).sum::<i64>() == target
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn accepts(&self, assignment: &[i32]) -> bool {
        (self.predicate)(assignment)
    }

    fn expect_arity(&self, instance: &Instance) -> Result<()> {
        if instance.arity() != self.arity {
            return Err(Error::contract(format!(
                "checker {} has arity {}, instance has arity {}",
                self.name,
                self.arity,
                instance.arity()
            )));
        }
        Ok(())
    }
}

impl fmt::Debug for Checker {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Checker")
            .field("name", &self.name)
            .field("arity", &self.arity)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConsistencyLevel {
    Arc,
    BoundZ,
    BoundD,
    Range,
}

impl ConsistencyLevel {
    pub const ALL: [ConsistencyLevel; 4] = [
        ConsistencyLevel::Arc,
        ConsistencyLevel::BoundZ,
        ConsistencyLevel::BoundD,
        ConsistencyLevel::Range,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ConsistencyLevel::Arc => "arc",
            ConsistencyLevel::BoundZ => "boundz",
            ConsistencyLevel::BoundD => "boundd",
            ConsistencyLevel::Range => "range",
        }
    }
}

impl fmt::Display for ConsistencyLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ConsistencyLevel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ConsistencyLevel::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| {
                Error::Parse(format!(
                    "unknown consistency level `{s}` (expected one of arc, boundz, boundd, range)"
                ))
            })
    }
}

/// Upper bound on the number of tuples a single enumeration may visit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationCap(u64);

impl EnumerationCap {
    pub const DEFAULT: EnumerationCap = EnumerationCap(1_000_000);

    pub fn new(max_tuples: u64) -> Result<Self> {
        if max_tuples == 0 {
            return Err(Error::InvalidConfig(
                "enumeration cap must be at least 1".into(),
            ));
        }
        Ok(EnumerationCap(max_tuples))
    }

    pub fn max_tuples(self) -> u64 {
        self.0
    }

    pub fn admits(self, tuples: u128) -> bool {
        tuples <= u128::from(self.0)
    }

    fn ensure(self, tuples: u128) -> Result<()> {
        if self.admits(tuples) {
            Ok(())
        } else {
            Err(Error::ResourceLimit {
                required: tuples,
                cap: self.0,
            })
        }
    }
}

impl Default for EnumerationCap {
    fn default() -> Self {
        EnumerationCap::DEFAULT
    }
}

/// One coordinate of an enumeration: explicit values or an integer interval.
#[derive(Debug, Clone, Copy)]
enum Axis<'a> {
    Values(&'a [i32]),
    Interval(i32, i32),
    Fixed(i32),
}

impl Axis<'_> {
    fn len(self) -> u64 {
        match self {
            Axis::Values(v) => v.len() as u64,
            Axis::Interval(lo, hi) if lo <= hi => (i64::from(hi) - i64::from(lo) + 1) as u64,
            Axis::Interval(..) => 0,
            Axis::Fixed(_) => 1,
        }
    }

    fn get(self, k: u64) -> i32 {
        match self {
            Axis::Values(v) => v[k as usize],
            Axis::Interval(lo, _) => (i64::from(lo) + k as i64) as i32,
            Axis::Fixed(v) => v,
        }
    }
}

fn space(axes: &[Axis<'_>]) -> u128 {
    axes.iter()
        .fold(1u128, |acc, a| acc.saturating_mul(u128::from(a.len())))
}

/// Visits the Cartesian product of `axes` in lexicographic order (last axis
/// fastest) until `visit` returns true. Returns whether it stopped early.
fn search(axes: &[Axis<'_>], mut visit: impl FnMut(&[i32], &[u64]) -> bool) -> bool {
    let lens: Vec<u64> = axes.iter().map(|a| a.len()).collect();
    if lens.contains(&0) {
        return false;
    }
    let mut idx = vec![0u64; axes.len()];
    let mut tuple: Vec<i32> = axes.iter().map(|a| a.get(0)).collect();
    loop {
        if visit(&tuple, &idx) {
            return true;
        }
        let mut k = axes.len();
        loop {
            if k == 0 {
                return false;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < lens[k] {
                tuple[k] = axes[k].get(idx[k]);
                break;
            }
            idx[k] = 0;
            tuple[k] = axes[k].get(0);
        }
    }
}

fn value_axes(instance: &Instance) -> Vec<Axis<'_>> {
    instance
        .domains()
        .iter()
        .map(|d| Axis::Values(d.as_slice()))
        .collect()
}

/// All members of the Cartesian product accepted by `checker`, in
/// lexicographic order.
pub fn solutions(checker: &Checker, instance: &Instance, cap: EnumerationCap) -> Result<Vec<Assignment>> {
    checker.expect_arity(instance)?;
    if instance.has_empty_domain() {
        return Ok(Vec::new());
    }
    let axes = value_axes(instance);
    cap.ensure(space(&axes))?;
    let mut out = Vec::new();
    search(&axes, |tuple, _| {
        if checker.accepts(tuple) {
            out.push(Assignment(tuple.to_vec()));
        }
        false
    });
    Ok(out)
}

/// Generalized arc consistency: each domain becomes the projection of the
/// solution set.
pub fn arc_filter(checker: &Checker, instance: &Instance, cap: EnumerationCap) -> Result<FilterOutcome> {
    checker.expect_arity(instance)?;
    if instance.has_empty_domain() {
        return Ok(FilterOutcome::Inconsistent);
    }
    let axes = value_axes(instance);
    cap.ensure(space(&axes))?;
    let mut supported: Vec<Vec<bool>> = instance
        .domains()
        .iter()
        .map(|d| vec![false; d.len()])
        .collect();
    let mut any = false;
    search(&axes, |tuple, idx| {
        if checker.accepts(tuple) {
            any = true;
            for (var, &k) in idx.iter().enumerate() {
                supported[var][k as usize] = true;
            }
        }
        false
    });
    if !any {
        return Ok(FilterOutcome::Inconsistent);
    }
    let domains = instance
        .domains()
        .iter()
        .zip(&supported)
        .map(|(d, s)| {
            Domain::from_sorted(
                d.iter()
                    .zip(s)
                    .filter_map(|(v, &keep)| keep.then_some(v))
                    .collect(),
            )
        })
        .collect();
    Ok(FilterOutcome::Filtered(Instance::new(domains)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SupportSpace {
    /// Other variables range over `[min, max]`.
    Interval,
    /// Other variables range over their actual domains.
    Domain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Pruning {
    BoundsOnly,
    AllValues,
}

struct SupportSearch<'a> {
    checker: &'a Checker,
    cap: EnumerationCap,
    space: SupportSpace,
}

impl SupportSearch<'_> {
    /// Returns the `candidates` of `var` that have a support, in the order they
    /// are tried. Stops once `want` supported values are found.
    fn supported_values(
        &self,
        domains: &[Vec<i32>],
        var: usize,
        candidates: impl Iterator<Item = i32>,
        want: usize,
    ) -> Result<Vec<i32>> {
        let mut axes: Vec<Axis<'_>> = domains
            .iter()
            .map(|d| match self.space {
                SupportSpace::Interval => Axis::Interval(d[0], d[d.len() - 1]),
                SupportSpace::Domain => Axis::Values(d),
            })
            .collect();
        axes[var] = Axis::Fixed(0);
        let others: u128 = axes
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != var)
            .fold(1u128, |acc, (_, a)| acc.saturating_mul(u128::from(a.len())));
        self.cap.ensure(others)?;

        let mut found = Vec::new();
        for v in candidates {
            axes[var] = Axis::Fixed(v);
            if search(&axes, |tuple, _| self.checker.accepts(tuple)) {
                found.push(v);
                if found.len() == want {
                    break;
                }
            }
        }
        Ok(found)
    }
}

fn support_filter(
    checker: &Checker,
    instance: &Instance,
    cap: EnumerationCap,
    space: SupportSpace,
    pruning: Pruning,
) -> Result<FilterOutcome> {
    checker.expect_arity(instance)?;
    if instance.has_empty_domain() {
        return Ok(FilterOutcome::Inconsistent);
    }
    let searcher = SupportSearch {
        checker,
        cap,
        space,
    };
    let mut domains: Vec<Vec<i32>> = instance
        .domains()
        .iter()
        .map(|d| d.as_slice().to_vec())
        .collect();

    loop {
        let mut changed = false;
        for var in 0..domains.len() {
            let current = domains[var].clone();
            let next: Vec<i32> = match pruning {
                Pruning::AllValues => {
                    searcher.supported_values(&domains, var, current.iter().copied(), usize::MAX)?
                }
                Pruning::BoundsOnly => {
                    let low = searcher.supported_values(&domains, var, current.iter().copied(), 1)?;
                    let Some(&lo) = low.first() else {
                        return Ok(FilterOutcome::Inconsistent);
                    };
                    let high = searcher.supported_values(
                        &domains,
                        var,
                        current.iter().rev().copied().take_while(|&v| v > lo),
                        1,
                    )?;
                    let hi = high.first().copied().unwrap_or(lo);
                    current.iter().copied().filter(|&v| lo <= v && v <= hi).collect()
                }
            };
            if next.is_empty() {
                return Ok(FilterOutcome::Inconsistent);
            }
            if next.len() != current.len() {
                domains[var] = next;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let domains = domains.into_iter().map(Domain::from_sorted).collect();
    Ok(FilterOutcome::Filtered(Instance::new(domains)?))
}

/// Bound consistency with interval supports.
pub fn bound_z_filter(checker: &Checker, instance: &Instance, cap: EnumerationCap) -> Result<FilterOutcome> {
    support_filter(checker, instance, cap, SupportSpace::Interval, Pruning::BoundsOnly)
}

/// Bound consistency with domain supports.
pub fn bound_d_filter(checker: &Checker, instance: &Instance, cap: EnumerationCap) -> Result<FilterOutcome> {
    support_filter(checker, instance, cap, SupportSpace::Domain, Pruning::BoundsOnly)
}

/// Range consistency: every value needs an interval support.
pub fn range_filter(checker: &Checker, instance: &Instance, cap: EnumerationCap) -> Result<FilterOutcome> {
    support_filter(checker, instance, cap, SupportSpace::Interval, Pruning::AllValues)
}

/// A trusted filter at a given consistency level, built from a checker.
#[derive(Debug, Clone)]
pub struct ReferenceFilter {
    level: ConsistencyLevel,
    checker: Checker,
    cap: EnumerationCap,
}

impl ReferenceFilter {
    pub fn new(level: ConsistencyLevel, checker: Checker) -> Self {
        ReferenceFilter {
            level,
            checker,
            cap: EnumerationCap::default(),
        }
    }

    pub fn with_cap(mut self, cap: EnumerationCap) -> Self {
        self.cap = cap;
        self
    }

    pub fn level(&self) -> ConsistencyLevel {
        self.level
    }

    pub fn checker(&self) -> &Checker {
        &self.checker
    }

    pub fn cap(&self) -> EnumerationCap {
        self.cap
    }
}

impl Filter for ReferenceFilter {
    fn arity(&self) -> usize {
        self.checker.arity()
    }

    fn apply(&self, instance: &Instance) -> Result<FilterOutcome> {
        match self.level {
            ConsistencyLevel::Arc => arc_filter(&self.checker, instance, self.cap),
            ConsistencyLevel::BoundZ => bound_z_filter(&self.checker, instance, self.cap),
            ConsistencyLevel::BoundD => bound_d_filter(&self.checker, instance, self.cap),
            ConsistencyLevel::Range => range_filter(&self.checker, instance, self.cap),
        }
    }
}

/// Builds the reference filter of `level` for `checker` with the default cap.
pub fn make_reference(level: ConsistencyLevel, checker: Checker) -> ReferenceFilter {
    ReferenceFilter::new(level, checker)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::pointwise_subset;
    use proptest::prelude::*;

    const CAP: EnumerationCap = EnumerationCap::DEFAULT;

    fn inst(values: &[&[i32]]) -> Instance {
        Instance::from_values(values.iter().map(|d| d.to_vec())).unwrap()
    }

    fn filtered(values: &[&[i32]]) -> FilterOutcome {
        FilterOutcome::Filtered(inst(values))
    }

    fn one_to_ten() -> Vec<i32> {
        (1..=10).collect()
    }

    #[test]
    fn solutions_examples() {
        let sols = solutions(&Checker::all_different(2), &inst(&[&[1, 2], &[1, 2]]), CAP).unwrap();
        assert_eq!(sols, vec![Assignment(vec![1, 2]), Assignment(vec![2, 1])]);

        let sols = solutions(&Checker::sum_equals(3, 15), &inst(&[&[5], &[5], &[5]]), CAP).unwrap();
        assert_eq!(sols, vec![Assignment(vec![5, 5, 5])]);

        let sols = solutions(&Checker::sum_equals(2, 0), &inst(&[&[1], &[]]), CAP).unwrap();
        assert!(sols.is_empty());
    }

    #[test]
    fn arc_examples() {
        let alldiff = Checker::all_different(3);
        let sum15 = Checker::sum_equals(3, 15);
        assert_eq!(
            arc_filter(&alldiff, &inst(&[&[1, 2], &[1, 2], &[1, 2, 3]]), CAP).unwrap(),
            filtered(&[&[1, 2], &[1, 2], &[3]])
        );
        assert_eq!(
            arc_filter(&sum15, &inst(&[&[1, 9], &[1, 9], &[1, 9]]), CAP).unwrap(),
            FilterOutcome::Inconsistent
        );
        assert_eq!(
            arc_filter(&sum15, &inst(&[&[6, 7], &[6, 7], &[1, 2, 9]]), CAP).unwrap(),
            filtered(&[&[6, 7], &[6, 7], &[1, 2]])
        );
    }

    #[test]
    fn bound_z_examples() {
        let sum15 = Checker::sum_equals(3, 15);
        let ten = one_to_ten();
        assert_eq!(
            bound_z_filter(&sum15, &inst(&[&ten, &[2, 3], &[2, 3]]), CAP).unwrap(),
            filtered(&[&[9, 10], &[2, 3], &[2, 3]])
        );
        assert_eq!(
            bound_z_filter(&sum15, &inst(&[&[5], &[5], &[5]]), CAP).unwrap(),
            filtered(&[&[5], &[5], &[5]])
        );
        assert_eq!(
            bound_z_filter(&Checker::all_different(3), &inst(&[&[1, 2], &[1, 2], &[1, 2]]), CAP).unwrap(),
            FilterOutcome::Inconsistent
        );
    }

    #[test]
    fn bound_z_keeps_unsupported_interior() {
        // x0 = 1 has no support at all, but bound-Z only inspects the bounds.
        let sum4 = Checker::sum_equals(2, 4);
        assert_eq!(
            bound_z_filter(&sum4, &inst(&[&[0, 1, 4], &[0, 4]]), CAP).unwrap(),
            filtered(&[&[0, 1, 4], &[0, 4]])
        );
        assert_eq!(
            arc_filter(&sum4, &inst(&[&[0, 1, 4], &[0, 4]]), CAP).unwrap(),
            filtered(&[&[0, 4], &[0, 4]])
        );
    }

    #[test]
    fn bound_d_examples() {
        let sum15 = Checker::sum_equals(3, 15);
        assert_eq!(
            bound_d_filter(&sum15, &inst(&[&[1, 10], &[2, 3], &[2, 3]]), CAP).unwrap(),
            filtered(&[&[10], &[2, 3], &[2, 3]])
        );
        assert_eq!(
            bound_d_filter(&Checker::all_different(3), &inst(&[&[1, 2], &[1, 2], &[1, 2, 3]]), CAP).unwrap(),
            filtered(&[&[1, 2], &[1, 2], &[3]])
        );
        let anything = Checker::new("true", 2, |_| true);
        let i = inst(&[&[-4, 0, 9], &[3]]);
        assert_eq!(bound_d_filter(&anything, &i, CAP).unwrap(), FilterOutcome::Filtered(i));
    }

    #[test]
    fn range_examples() {
        assert_eq!(
            range_filter(&Checker::all_different(3), &inst(&[&[1, 2], &[1, 2], &[1, 2, 3]]), CAP).unwrap(),
            filtered(&[&[1, 2], &[1, 2], &[3]])
        );
        let ten = one_to_ten();
        assert_eq!(
            range_filter(&Checker::sum_equals(3, 15), &inst(&[&ten, &[2, 3], &[2, 3]]), CAP).unwrap(),
            filtered(&[&[9, 10], &[2, 3], &[2, 3]])
        );
        let zero = Checker::new("v=0", 1, |x| x[0] == 0);
        assert_eq!(
            range_filter(&zero, &inst(&[&[-1, 0, 1]]), CAP).unwrap(),
            filtered(&[&[0]])
        );
    }

    #[test]
    fn make_reference_examples() {
        let arc = make_reference(ConsistencyLevel::Arc, Checker::all_different(3));
        assert_eq!(
            arc.apply(&inst(&[&[1, 2], &[1, 2], &[1, 2, 3]])).unwrap(),
            filtered(&[&[1, 2], &[1, 2], &[3]])
        );
        let bz = make_reference(ConsistencyLevel::BoundZ, Checker::sum_equals(3, 15));
        assert_eq!(bz.apply(&inst(&[&[5], &[5], &[5]])).unwrap(), filtered(&[&[5], &[5], &[5]]));
        let range = make_reference(ConsistencyLevel::Range, Checker::all_different(1));
        assert_eq!(range.apply(&inst(&[&[7]])).unwrap(), filtered(&[&[7]]));
    }

    #[test]
    fn empty_input_domain_is_inconsistent_at_every_level() {
        let i = inst(&[&[1], &[]]);
        for level in ConsistencyLevel::ALL {
            let f = make_reference(level, Checker::all_different(2));
            assert_eq!(f.apply(&i).unwrap(), FilterOutcome::Inconsistent, "{level}");
        }
    }

    #[test]
    fn cap_is_a_hard_error() {
        let cap = EnumerationCap::new(3).unwrap();
        let i = inst(&[&[1, 2], &[1, 2]]);
        let err = arc_filter(&Checker::all_different(2), &i, cap).unwrap_err();
        assert_eq!(err, Error::ResourceLimit { required: 4, cap: 3 });
        assert!(solutions(&Checker::all_different(2), &i, cap).is_err());
        // Interval supports enumerate [1, 5] for the other variable.
        let wide = inst(&[&[1, 5], &[1, 5]]);
        assert!(matches!(
            bound_z_filter(&Checker::all_different(2), &wide, cap),
            Err(Error::ResourceLimit { required: 5, .. })
        ));
        assert!(EnumerationCap::new(0).is_err());
    }

    #[test]
    fn arity_mismatch_is_rejected() {
        let err = arc_filter(&Checker::all_different(3), &inst(&[&[1]]), CAP).unwrap_err();
        assert!(matches!(err, Error::Contract(_)));
    }

    #[test]
    fn level_parsing() {
        for level in ConsistencyLevel::ALL {
            assert_eq!(level.as_str().parse::<ConsistencyLevel>().unwrap(), level);
        }
        assert!("gac".parse::<ConsistencyLevel>().is_err());
    }

    fn instance_strategy() -> impl Strategy<Value = Instance> {
        prop::collection::vec(prop::collection::btree_set(-3i32..=3, 1..=4), 1..=3)
            .prop_map(|ds| Instance::from_values(ds).unwrap())
    }

    fn checkers(arity: usize) -> Vec<Checker> {
        vec![
            Checker::all_different(arity),
            Checker::sum_equals(arity, 0),
            Checker::sum_equals(arity, 2),
            Checker::new("x0<=last", arity, |x| x[0] <= x[x.len() - 1]),
        ]
    }

    fn apply_all(c: &Checker, i: &Instance) -> [FilterOutcome; 4] {
        [
            arc_filter(c, i, CAP).unwrap(),
            range_filter(c, i, CAP).unwrap(),
            bound_d_filter(c, i, CAP).unwrap(),
            bound_z_filter(c, i, CAP).unwrap(),
        ]
    }

    proptest! {
        #[test]
        fn hierarchy_soundness_idempotence(i in instance_strategy()) {
            for c in checkers(i.arity()) {
                let [arc, range, bd, bz] = apply_all(&c, &i);
                prop_assert!(pointwise_subset(&arc, &range).unwrap());
                prop_assert!(pointwise_subset(&range, &bz).unwrap());
                prop_assert!(pointwise_subset(&arc, &bd).unwrap());
                prop_assert!(pointwise_subset(&bd, &bz).unwrap());

                let sols = solutions(&c, &i, CAP).unwrap();
                prop_assert_eq!(sols.is_empty(), arc.is_inconsistent());
                for out in [&arc, &range, &bd, &bz] {
                    for s in &sols {
                        prop_assert!(s.member_of(out.instance().unwrap()));
                    }
                }
                for (level, out) in [ConsistencyLevel::Arc, ConsistencyLevel::Range, ConsistencyLevel::BoundD, ConsistencyLevel::BoundZ]
                    .into_iter()
                    .zip([&arc, &range, &bd, &bz])
                {
                    if let FilterOutcome::Filtered(o) = out {
                        let again = make_reference(level, c.clone()).apply(o).unwrap();
                        prop_assert_eq!(&again, out);
                    }
                }
            }
        }

        #[test]
        fn monotonicity(i in instance_strategy(), drop in prop::collection::vec(any::<prop::sample::Index>(), 0..4)) {
            let mut smaller = i.clone();
            for d in drop {
                let var = d.index(smaller.arity());
                let dom = smaller.domain(var);
                if dom.len() > 1 {
                    let v = dom.as_slice()[d.index(dom.len())];
                    smaller = smaller.with_domain(var, dom.without(v));
                }
            }
            for c in checkers(i.arity()) {
                let big = apply_all(&c, &i);
                let small = apply_all(&c, &smaller);
                for (s, b) in small.iter().zip(&big) {
                    prop_assert!(pointwise_subset(s, b).unwrap());
                }
            }
        }
    }
}
