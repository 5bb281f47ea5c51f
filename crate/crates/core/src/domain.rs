//! Value types shared by every module: domains, instances, filter outcomes
//! and the pointwise comparison primitives used to judge filters.

use std::fmt;

use crate::error::{Error, Result};

/// A finite set of integers, stored sorted and without duplicates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Domain {
    values: Vec<i32>,
}

impl Domain {
    pub fn new(values: impl IntoIterator<Item = i32>) -> Self {
        let mut values: Vec<i32> = values.into_iter().collect();
        values.sort_unstable();
        values.dedup();
        Domain { values }
    }

    /// The inclusive interval `lo..=hi` (empty when `lo > hi`).
    pub fn interval(lo: i32, hi: i32) -> Self {
        Domain {
            values: (lo..=hi).collect(),
        }
    }

    pub fn singleton(value: i32) -> Self {
        Domain {
            values: vec![value],
        }
    }

    pub fn empty() -> Self {
        Domain::default()
    }

    /// Builds a domain from a slice already sorted in strictly increasing order.
    pub(crate) fn from_sorted(values: Vec<i32>) -> Self {
        debug_assert!(values.windows(2).all(|w| w[0] < w[1]));
        Domain { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// A domain is fixed when it holds exactly one value.
    pub fn is_fixed(&self) -> bool {
        self.values.len() == 1
    }

    pub fn contains(&self, value: i32) -> bool {
        self.values.binary_search(&value).is_ok()
    }

    pub fn min(&self) -> Option<i32> {
        self.values.first().copied()
    }

    pub fn max(&self) -> Option<i32> {
        self.values.last().copied()
    }

    /// Values in strictly increasing order.
    pub fn iter(&self) -> impl DoubleEndedIterator<Item = i32> + ExactSizeIterator + '_ {
        self.values.iter().copied()
    }

    pub fn as_slice(&self) -> &[i32] {
        &self.values
    }

    pub fn is_subset_of(&self, other: &Domain) -> bool {
        self.values.len() <= other.values.len() && self.iter().all(|v| other.contains(v))
    }

    pub fn retain(&self, mut keep: impl FnMut(i32) -> bool) -> Domain {
        Domain {
            values: self.iter().filter(|&v| keep(v)).collect(),
        }
    }

    pub fn without(&self, value: i32) -> Domain {
        self.retain(|v| v != value)
    }
}

impl FromIterator<i32> for Domain {
    fn from_iter<T: IntoIterator<Item = i32>>(iter: T) -> Self {
        Domain::new(iter)
    }
}

impl From<Vec<i32>> for Domain {
    fn from(values: Vec<i32>) -> Self {
        Domain::new(values)
    }
}

impl<const N: usize> From<[i32; N]> for Domain {
    fn from(values: [i32; N]) -> Self {
        Domain::new(values)
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, v) in self.values.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

/// A fixed-arity sequence of domains; input and output of every filter.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Instance {
    domains: Vec<Domain>,
}

impl Instance {
    /// Fails when `domains` is empty: instances have arity at least one.
    pub fn new(domains: Vec<Domain>) -> Result<Self> {
        if domains.is_empty() {
            return Err(Error::contract("an instance needs at least one variable"));
        }
        Ok(Instance { domains })
    }

    /// Convenience constructor from nested value lists.
    pub fn from_values<I, J>(domains: I) -> Result<Self>
    where
        I: IntoIterator<Item = J>,
        J: IntoIterator<Item = i32>,
    {
        Instance::new(domains.into_iter().map(Domain::new).collect())
    }

    pub fn arity(&self) -> usize {
        self.domains.len()
    }

    pub fn domain(&self, index: usize) -> &Domain {
        &self.domains[index]
    }

    pub fn domains(&self) -> &[Domain] {
        &self.domains
    }

    pub fn into_domains(self) -> Vec<Domain> {
        self.domains
    }

    /// Product of the domain sizes, saturating at `u128::MAX`.
    pub fn search_space_size(&self) -> u128 {
        self.domains
            .iter()
            .fold(1u128, |acc, d| acc.saturating_mul(d.len() as u128))
    }

    pub fn has_empty_domain(&self) -> bool {
        self.domains.iter().any(Domain::is_empty)
    }

    pub fn is_all_fixed(&self) -> bool {
        self.domains.iter().all(Domain::is_fixed)
    }

    /// Total number of values over all domains.
    pub fn total_size(&self) -> usize {
        self.domains.iter().map(Domain::len).sum()
    }

    /// Returns a copy with domain `index` replaced.
    pub fn with_domain(&self, index: usize, domain: Domain) -> Instance {
        let mut domains = self.domains.clone();
        domains[index] = domain;
        Instance { domains }
    }

    /// Pointwise inclusion `self ⊆ other`.
    pub fn is_subset_of(&self, other: &Instance) -> Result<bool> {
        check_arity(self.arity(), other.arity())?;
        Ok(self
            .domains
            .iter()
            .zip(&other.domains)
            .all(|(a, b)| a.is_subset_of(b)))
    }

    pub fn to_vecs(&self) -> Vec<Vec<i32>> {
        self.domains.iter().map(|d| d.as_slice().to_vec()).collect()
    }
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, d) in self.domains.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{d}")?;
        }
        write!(f, "]")
    }
}

/// Result of applying a filter. `Filtered` payloads never hold an empty
/// domain; a wiped-out domain is reported as `Inconsistent`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FilterOutcome {
    Filtered(Instance),
    Inconsistent,
}

impl FilterOutcome {
    /// `Inconsistent` if any domain is empty, `Filtered` otherwise.
    pub fn from_instance(instance: Instance) -> Self {
        if instance.has_empty_domain() {
            FilterOutcome::Inconsistent
        } else {
            FilterOutcome::Filtered(instance)
        }
    }

    pub fn is_inconsistent(&self) -> bool {
        matches!(self, FilterOutcome::Inconsistent)
    }

    pub fn instance(&self) -> Option<&Instance> {
        match self {
            FilterOutcome::Filtered(inst) => Some(inst),
            FilterOutcome::Inconsistent => None,
        }
    }
}

impl fmt::Display for FilterOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FilterOutcome::Filtered(inst) => write!(f, "Filtered({inst})"),
            FilterOutcome::Inconsistent => write!(f, "Inconsistent"),
        }
    }
}

/// A complete assignment, one value per variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment(pub Vec<i32>);

impl Assignment {
    pub fn values(&self) -> &[i32] {
        &self.0
    }

    pub fn member_of(&self, instance: &Instance) -> bool {
        self.0.len() == instance.arity()
            && self
                .0
                .iter()
                .zip(instance.domains())
                .all(|(&v, d)| d.contains(v))
    }
}

pub fn is_fixed(domain: &Domain) -> bool {
    domain.is_fixed()
}

/// Leaf of a search dive: inconsistent, or every domain fixed.
pub fn is_leaf(outcome: &FilterOutcome) -> bool {
    match outcome {
        FilterOutcome::Inconsistent => true,
        FilterOutcome::Filtered(inst) => inst.is_all_fixed(),
    }
}

fn check_arity(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::contract(format!("arity mismatch: {a} vs {b}")));
    }
    Ok(())
}

pub fn pointwise_equal(a: &FilterOutcome, b: &FilterOutcome) -> Result<bool> {
    use FilterOutcome::*;
    match (a, b) {
        (Inconsistent, Inconsistent) => Ok(true),
        (Filtered(x), Filtered(y)) => {
            check_arity(x.arity(), y.arity())?;
            Ok(x == y)
        }
        _ => Ok(false),
    }
}

/// `a ⊆ b` where `Inconsistent` is the bottom element.
pub fn pointwise_subset(a: &FilterOutcome, b: &FilterOutcome) -> Result<bool> {
    use FilterOutcome::*;
    match (a, b) {
        (Inconsistent, _) => Ok(true),
        (Filtered(_), Inconsistent) => Ok(false),
        (Filtered(x), Filtered(y)) => x.is_subset_of(y),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn filtered(values: &[&[i32]]) -> FilterOutcome {
        FilterOutcome::Filtered(Instance::from_values(values.iter().map(|d| d.to_vec())).unwrap())
    }

    #[test]
    fn fixed_domains() {
        assert!(Domain::from([3]).is_fixed());
        assert!(!Domain::from([1, 2]).is_fixed());
        assert!(!Domain::empty().is_fixed());
    }

    #[test]
    fn leaves() {
        assert!(is_leaf(&FilterOutcome::Inconsistent));
        assert!(is_leaf(&filtered(&[&[1], &[4]])));
        assert!(!is_leaf(&filtered(&[&[1, 2], &[4]])));
    }

    #[test]
    fn equality_examples() {
        let inc = FilterOutcome::Inconsistent;
        assert!(pointwise_equal(&inc, &inc).unwrap());
        assert!(pointwise_equal(&filtered(&[&[1, 2]]), &filtered(&[&[1, 2]])).unwrap());
        assert!(!pointwise_equal(&filtered(&[&[1, 2]]), &filtered(&[&[1]])).unwrap());
        assert!(!pointwise_equal(&inc, &filtered(&[&[1]])).unwrap());
    }

    #[test]
    fn subset_examples() {
        let inc = FilterOutcome::Inconsistent;
        assert!(pointwise_subset(&inc, &filtered(&[&[1, 2]])).unwrap());
        assert!(pointwise_subset(&filtered(&[&[1]]), &filtered(&[&[1, 2]])).unwrap());
        assert!(!pointwise_subset(&filtered(&[&[1, 2]]), &filtered(&[&[1]])).unwrap());
        assert!(!pointwise_subset(&filtered(&[&[1]]), &inc).unwrap());
    }

    #[test]
    fn arity_mismatch_is_a_contract_violation() {
        let a = filtered(&[&[1]]);
        let b = filtered(&[&[1], &[2]]);
        assert!(matches!(pointwise_equal(&a, &b), Err(Error::Contract(_))));
        assert!(matches!(pointwise_subset(&a, &b), Err(Error::Contract(_))));
    }

    #[test]
    fn empty_instance_rejected() {
        assert!(Instance::new(vec![]).is_err());
    }

    #[test]
    fn outcome_from_instance_with_empty_domain() {
        let inst = Instance::from_values(vec![vec![1], vec![]]).unwrap();
        assert_eq!(FilterOutcome::from_instance(inst), FilterOutcome::Inconsistent);
    }

    #[test]
    fn search_space_and_membership() {
        let inst = Instance::from_values(vec![vec![1, 2], vec![3, 4, 5]]).unwrap();
        assert_eq!(inst.search_space_size(), 6);
        assert!(Assignment(vec![2, 5]).member_of(&inst));
        assert!(!Assignment(vec![3, 5]).member_of(&inst));
        assert!(!Assignment(vec![2]).member_of(&inst));
    }

    fn outcome_strategy() -> impl Strategy<Value = FilterOutcome> {
        prop_oneof![
            1 => Just(FilterOutcome::Inconsistent),
            4 => prop::collection::vec(prop::collection::btree_set(0i32..4, 1..4), 2)
                .prop_map(|ds| FilterOutcome::Filtered(Instance::from_values(ds).unwrap())),
        ]
    }

    proptest! {
        #[test]
        fn domain_is_canonical(values in prop::collection::vec(-20i32..20, 0..30)) {
            let d = Domain::new(values.clone());
            let mut rev = values.clone();
            rev.reverse();
            prop_assert_eq!(&d, &Domain::new(rev));
            prop_assert!(d.as_slice().windows(2).all(|w| w[0] < w[1]));
        }

        #[test]
        fn equality_is_mutual_inclusion(a in outcome_strategy(), b in outcome_strategy()) {
            let eq = pointwise_equal(&a, &b).unwrap();
            let both = pointwise_subset(&a, &b).unwrap() && pointwise_subset(&b, &a).unwrap();
            prop_assert_eq!(eq, both);
        }

        #[test]
        fn subset_is_transitive(a in outcome_strategy(), b in outcome_strategy(), c in outcome_strategy()) {
            if pointwise_subset(&a, &b).unwrap() && pointwise_subset(&b, &c).unwrap() {
                prop_assert!(pointwise_subset(&a, &c).unwrap());
            }
            prop_assert!(pointwise_subset(&a, &a).unwrap());
        }
    }
}
