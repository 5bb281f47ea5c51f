//! Seeded instance generation and greedy counterexample shrinking.
//!
//! The generator is bit-exact: a campaign seed fully determines every drawn
//! instance, on every platform.

use crate::domain::{Domain, Instance};
use crate::error::{Error, Result};
use crate::reference::EnumerationCap;

/// splitmix64 pseudo-random generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rng {
    state: u64,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)` from the top 53 bits of one draw.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[0, bound)` by the multiply-high reduction of one draw.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "Rng::below needs a positive bound");
        ((u128::from(self.next_u64()) * u128::from(bound)) >> 64) as u64
    }

    /// Uniform in the inclusive range `[lo, hi]`.
    pub fn range_inclusive(&mut self, lo: u64, hi: u64) -> u64 {
        lo + self.below(hi - lo + 1)
    }
}

/// Parameters of a random campaign.
#[derive(Debug, Clone, PartialEq)]
pub struct GenConfig {
    pub n_vars: usize,
    pub value_min: i32,
    pub value_max: i32,
    /// Probability for each value of `[value_min, value_max]` to enter a domain.
    pub density: f64,
    pub n_tests: usize,
    pub seed: u64,
    /// Instances whose Cartesian product exceeds this are re-drawn.
    pub cap: EnumerationCap,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            n_vars: 5,
            value_min: -10,
            value_max: 10,
            density: 0.2,
            n_tests: 100,
            seed: 0,
            cap: EnumerationCap::DEFAULT,
        }
    }
}

impl GenConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_vars == 0 {
            return Err(Error::InvalidConfig("the number of variables must be at least 1".into()));
        }
        if self.value_min > self.value_max {
            return Err(Error::InvalidConfig(format!(
                "empty value range {}..{}",
                self.value_min, self.value_max
            )));
        }
        if !(self.density > 0.0 && self.density <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "density must lie in (0, 1], got {}",
                self.density
            )));
        }
        if self.n_tests == 0 {
            return Err(Error::InvalidConfig("the number of tests must be at least 1".into()));
        }
        Ok(())
    }

    fn range_len(&self) -> u64 {
        (i64::from(self.value_max) - i64::from(self.value_min) + 1) as u64
    }
}

/// Draws one instance: one Bernoulli(density) draw per candidate value,
/// variable-major then value-ascending; an empty domain receives one value
/// drawn uniformly from the range instead.
pub fn generate_instance(rng: &mut Rng, cfg: &GenConfig) -> Instance {
    let domains = (0..cfg.n_vars)
        .map(|_| {
            let mut values: Vec<i32> = (cfg.value_min..=cfg.value_max)
                .filter(|_| rng.next_f64() < cfg.density)
                .collect();
            if values.is_empty() {
                let offset = rng.below(cfg.range_len()) as i64;
                values.push((i64::from(cfg.value_min) + offset) as i32);
            }
            Domain::from_sorted(values)
        })
        .collect();
    Instance::new(domains).expect("n_vars >= 1 after validation")
}

/// Maximum number of predicate evaluations one shrink may spend.
pub const DEFAULT_SHRINK_BUDGET: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShrinkResult {
    pub instance: Instance,
    /// False when the budget ran out before 1-minimality was established.
    pub minimal: bool,
    pub evaluations: usize,
}

/// Greedily removes single values from `failing` while `fails` keeps holding.
///
/// Variables are scanned by decreasing domain size (lower index first on
/// ties) and, within a domain, values are tried for removal from the largest
/// down so the smallest surviving values are kept. The scan restarts after
/// every accepted removal. Domains are never emptied. The result is
/// 1-minimal unless the budget is exhausted.
pub fn shrink<F>(failing: &Instance, budget: usize, mut fails: F) -> ShrinkResult
where
    F: FnMut(&Instance) -> bool,
{
    let mut current = failing.clone();
    let mut evaluations = 0;
    'scan: loop {
        let mut order: Vec<usize> = (0..current.arity()).collect();
        order.sort_by_key(|&i| std::cmp::Reverse(current.domain(i).len()));
        for var in order {
            let domain = current.domain(var).clone();
            if domain.len() < 2 {
                continue;
            }
            for value in domain.iter().rev() {
                if evaluations == budget {
                    return ShrinkResult {
                        instance: current,
                        minimal: false,
                        evaluations,
                    };
                }
                let candidate = current.with_domain(var, domain.without(value));
                evaluations += 1;
                if fails(&candidate) {
                    current = candidate;
                    continue 'scan;
                }
            }
        }
        return ShrinkResult {
            instance: current,
            minimal: true,
            evaluations,
        };
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use super::Rng;
    use proptest::prelude::*;

    fn inst(values: &[&[i32]]) -> Instance {
        Instance::from_values(values.iter().map(|d| d.to_vec())).unwrap()
    }

    #[test]
    fn splitmix_golden() {
        let mut rng = Rng::new(0);
        assert_eq!(rng.next_u64(), 0xE220_A839_7B1D_CDAF);
        // Further reference outputs of the published algorithm from seed 0.
        assert_eq!(rng.next_u64(), 0x6E78_9E6A_A1B9_65F4);
        assert_eq!(rng.next_u64(), 0x06C4_5D18_8009_454F);
    }

    #[test]
    fn forced_value_when_range_is_a_point() {
        let cfg = GenConfig {
            n_vars: 1,
            value_min: 0,
            value_max: 0,
            density: 1.0,
            ..GenConfig::default()
        };
        assert_eq!(generate_instance(&mut Rng::new(9), &cfg), inst(&[&[0]]));
    }

    #[test]
    fn generation_is_deterministic() {
        let cfg = GenConfig::default();
        let a = generate_instance(&mut Rng::new(17), &cfg);
        let b = generate_instance(&mut Rng::new(17), &cfg);
        assert_eq!(a, b);
    }

    #[test]
    fn generation_golden() {
        let cfg = GenConfig {
            n_vars: 3,
            value_min: -2,
            value_max: 2,
            density: 0.5,
            ..GenConfig::default()
        };
        // Frozen from an independent splitmix64 evaluation.
        let got = generate_instance(&mut Rng::new(42), &cfg);
        assert_eq!(got, inst(&[&[-1, 0, 1, 2], &[-1, 1], &[-2, -1]]));
    }

    #[test]
    fn config_validation() {
        assert!(GenConfig::default().validate().is_ok());
        for bad in [
            GenConfig { n_vars: 0, ..GenConfig::default() },
            GenConfig { value_min: 3, value_max: 2, ..GenConfig::default() },
            GenConfig { density: 0.0, ..GenConfig::default() },
            GenConfig { density: 1.5, ..GenConfig::default() },
            GenConfig { density: f64::NAN, ..GenConfig::default() },
            GenConfig { n_tests: 0, ..GenConfig::default() },
        ] {
            assert!(bad.validate().is_err(), "{bad:?}");
        }
    }

    #[test]
    fn shrink_keeps_the_witness_value() {
        let r = shrink(&inst(&[&[1, 2, 3]]), DEFAULT_SHRINK_BUDGET, |i| i.domain(0).contains(2));
        assert_eq!(r.instance, inst(&[&[2]]));
        assert!(r.minimal);
    }

    #[test]
    fn shrink_on_minimal_input_is_identity() {
        let start = inst(&[&[1, 2], &[3]]);
        let r = shrink(&start, DEFAULT_SHRINK_BUDGET, |i| i.domain(0).len() == 2);
        assert_eq!(r.instance, start);
        assert!(r.minimal);
    }

    #[test]
    fn shrink_always_true_keeps_smallest_values() {
        let r = shrink(&inst(&[&[1, 2], &[3]]), DEFAULT_SHRINK_BUDGET, |_| true);
        assert_eq!(r.instance, inst(&[&[1], &[3]]));
    }

    #[test]
    fn shrink_budget_exhaustion_is_flagged() {
        let r = shrink(&inst(&[&[1, 2, 3, 4], &[1, 2, 3]]), 2, |_| true);
        assert!(!r.minimal);
        assert_eq!(r.evaluations, 2);
        assert_eq!(r.instance, inst(&[&[1, 2], &[1, 2, 3]]));
    }

    fn cfg_strategy() -> impl Strategy<Value = GenConfig> {
        (1usize..6, -20i32..20, 0i32..15, 0.05f64..=1.0, any::<u64>()).prop_map(
            |(n_vars, lo, width, density, seed)| GenConfig {
                n_vars,
                value_min: lo,
                value_max: lo + width,
                density,
                seed,
                ..GenConfig::default()
            },
        )
    }

    proptest! {
        #[test]
        fn generated_instances_respect_config(cfg in cfg_strategy()) {
            let mut rng = Rng::new(cfg.seed);
            for _ in 0..5 {
                let i = generate_instance(&mut rng, &cfg);
                prop_assert_eq!(i.arity(), cfg.n_vars);
                for d in i.domains() {
                    prop_assert!(!d.is_empty());
                    prop_assert!(d.iter().all(|v| cfg.value_min <= v && v <= cfg.value_max));
                }
            }
        }

        #[test]
        fn shrink_is_sound_minimal_and_idempotent(
            cfg in cfg_strategy(),
            threshold in 1usize..12,
        ) {
            let start = generate_instance(&mut Rng::new(cfg.seed), &cfg);
            // Fails while the total value count stays at or above the threshold
            // and the first domain keeps its maximum.
            let top = start.domain(0).max().unwrap();
            let fails = |i: &Instance| i.total_size() >= threshold && i.domain(0).contains(top);
            prop_assume!(fails(&start));
            let r = shrink(&start, DEFAULT_SHRINK_BUDGET, fails);
            prop_assert!(r.minimal);
            prop_assert!(fails(&r.instance));
            prop_assert!(r.instance.is_subset_of(&start).unwrap());
            for var in 0..r.instance.arity() {
                let d = r.instance.domain(var);
                if d.len() > 1 {
                    for v in d.iter() {
                        prop_assert!(!fails(&r.instance.with_domain(var, d.without(v))));
                    }
                }
            }
            let again = shrink(&r.instance, DEFAULT_SHRINK_BUDGET, fails);
            prop_assert_eq!(again.instance, r.instance);
        }
    }
}
