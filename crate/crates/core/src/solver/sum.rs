use super::{CpResult, FixedPartition, Inconsistency, Propagator, RevInt, Store, VarId};

/// Bound-consistent filtering of `x_1 + ... + x_n = c`.
///
/// Fixed variables are folded into a reversible partial sum so each call
/// only scans the free ones.
pub struct SumEqualsBc {
    vars: Vec<VarId>,
    target: i64,
    fixed: FixedPartition,
    sum_fixed: RevInt,
    reversed: bool,
}

impl SumEqualsBc {
    pub fn new(store: &mut Store, vars: &[VarId], target: i64) -> Self {
        Self::build(store, vars, target, false, true)
    }

    pub(crate) fn build(
        store: &mut Store,
        vars: &[VarId],
        target: i64,
        reversed: bool,
        trailed: bool,
    ) -> Self {
        SumEqualsBc {
            vars: vars.to_vec(),
            target,
            fixed: FixedPartition::new(store, vars.len(), trailed),
            sum_fixed: store.new_int(0),
            reversed,
        }
    }
}

impl Propagator for SumEqualsBc {
    fn scope(&self) -> &[VarId] {
        &self.vars
    }

    fn propagate(&mut self, store: &mut Store) -> CpResult<()> {
        loop {
            let (before, nf) = self.fixed.update(store, &self.vars);
            let mut sum_fixed = store.int(self.sum_fixed);
            for &i in &self.fixed.order[before..nf] {
                sum_fixed += i64::from(store.min(self.vars[i]));
            }
            store.set_int(self.sum_fixed, sum_fixed);

            let free = &self.fixed.order[nf..];
            let mut sum_min = sum_fixed;
            let mut sum_max = sum_fixed;
            for &i in free {
                sum_min += i64::from(store.min(self.vars[i]));
                sum_max += i64::from(store.max(self.vars[i]));
            }
            if self.target < sum_min || self.target > sum_max {
                return Err(Inconsistency);
            }
            let mut changed = false;
            for &i in free {
                let x = self.vars[i];
                let (lo, hi) = (i64::from(store.min(x)), i64::from(store.max(x)));
                let mut new_lo = self.target - (sum_max - hi);
                let mut new_hi = self.target - (sum_min - lo);
                if self.reversed {
                    std::mem::swap(&mut new_lo, &mut new_hi);
                }
                changed |= store.remove_below(x, new_lo)?;
                changed |= store.remove_above(x, new_hi)?;
            }
            if !changed {
                return Ok(());
            }
        }
    }
}
