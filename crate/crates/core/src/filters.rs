//! Filters on a bounded universe `{1..N}`.
//!
//! A filter generated by finitely many sets is `{A : A ⊇ core}` where the
//! core is the intersection of the generators, so the core is a complete
//! invariant. Principal ultrafilters are exactly the singleton cores.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arith::{down_closure, up_closure};
use crate::error::{Error, Result};
use crate::nat::{Nat, NatSet};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct FinUniverse {
    bound: Nat,
}

impl FinUniverse {
    pub fn new(bound: Nat) -> FinUniverse {
        FinUniverse { bound }
    }

    pub fn bound(&self) -> &Nat {
        &self.bound
    }

    pub fn contains(&self, n: &Nat) -> bool {
        *n <= self.bound
    }

    fn check(&self, n: &Nat) -> Result<()> {
        if self.contains(n) {
            Ok(())
        } else {
            Err(Error::OutsideUniverse {
                value: n.clone(),
                bound: self.bound.clone(),
            })
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FinFilter {
    universe: FinUniverse,
    core: NatSet,
}

impl FinFilter {
    pub fn new(universe: FinUniverse, core: NatSet) -> Result<FinFilter> {
        if core.is_empty() {
            return Err(Error::EmptyCore);
        }
        if let Some(max) = core.max() {
            universe.check(max)?;
        }
        Ok(FinFilter { universe, core })
    }

    /// The principal ultrafilter `{A : n ∈ A}`.
    pub fn principal(n: Nat, universe: FinUniverse) -> Result<FinFilter> {
        FinFilter::new(universe, std::iter::once(n).collect())
    }

    pub fn universe(&self) -> &FinUniverse {
        &self.universe
    }

    pub fn core(&self) -> &NatSet {
        &self.core
    }

    /// Only principal ultrafilters are representable.
    pub fn is_ultra(&self) -> bool {
        self.core.len() == 1
    }

    pub fn member(&self, a: &NatSet) -> bool {
        self.core.is_subset(a)
    }

    fn same_universe(&self, other: &FinFilter) -> Result<()> {
        if self.universe == other.universe {
            Ok(())
        } else {
            Err(Error::UniverseMismatch {
                left: self.universe.bound.clone(),
                right: other.universe.bound.clone(),
            })
        }
    }
}

/// `x ∩ 𝒰 ⊆ y`: the least up-closed member of `x` (the up-closure of its
/// core) belongs to `y`.
pub fn divides_up(x: &FinFilter, y: &FinFilter) -> Result<bool> {
    x.same_universe(y)?;
    // core_y ⊆ core_x↑ without materializing the closure.
    Ok(y.core.iter().all(|c| x.core.iter().any(|d| d.divides(c))))
}

/// `y ∩ 𝒱 ⊆ x`: the down-closure of `y`'s core belongs to `x`.
pub fn divides_down(x: &FinFilter, y: &FinFilter) -> Result<bool> {
    x.same_universe(y)?;
    Ok(x.core.iter().all(|d| y.core.iter().any(|c| d.divides(c))))
}

/// Materializing variant of [`divides_up`], used as a cross-check.
pub fn divides_up_materialized(x: &FinFilter, y: &FinFilter) -> Result<bool> {
    x.same_universe(y)?;
    Ok(y.core.is_subset(&up_closure(&x.core, &x.universe.bound)?))
}

/// Materializing variant of [`divides_down`].
pub fn divides_down_materialized(x: &FinFilter, y: &FinFilter) -> Result<bool> {
    x.same_universe(y)?;
    Ok(x.core.is_subset(&down_closure(&y.core)))
}

/// `f̃(x)`, generated by `f[A]` for `A ∈ x`; its core is `f[core_x]`.
pub fn image_filter<F>(f: F, x: &FinFilter) -> Result<FinFilter>
where
    F: Fn(&Nat) -> Result<Nat>,
{
    let core = x.core.iter().map(&f).collect::<Result<NatSet>>()?;
    FinFilter::new(x.universe.clone(), core)
}

/// `A ∈ x·y` iff `{n : A/n ∈ y} ∈ x`.
pub fn product_member(a: &NatSet, x: &FinFilter, y: &FinFilter) -> bool {
    // Only core_x matters for membership of the outer set, so A/k is
    // checked against core_y for k ∈ core_x.
    x.core
        .iter()
        .all(|k| y.core.iter().all(|j| a.contains(&k.mul(j))))
}

/// Outcome of [`product_principal`].
#[derive(Clone, Debug, Serialize)]
pub struct PrincipalProduct {
    pub product: Nat,
    pub samples: usize,
    pub consistent: bool,
}

/// `p_m · p_n = p_{mn}`, checked against `product_member` on sampled sets
/// both containing and avoiding `mn`.
pub fn product_principal(m: &Nat, n: &Nat, window: &Nat) -> Result<PrincipalProduct> {
    let mn = m.mul(n);
    let universe = FinUniverse::new(window.clone());
    universe.check(&mn)?;
    let x = FinFilter::principal(m.clone(), universe.clone())?;
    let y = FinFilter::principal(n.clone(), universe)?;
    let w = window.to_u64().unwrap_or(u64::MAX);
    let seed = mn.to_u64().unwrap_or(0) ^ w.rotate_left(17);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut consistent = true;
    const SAMPLES: usize = 16;
    for i in 0..SAMPLES {
        let mut a: NatSet = (0..rng.gen_range(0..32))
            .map(|_| Nat::new(rng.gen_range(1..=w)).expect("nonzero"))
            .collect();
        if i % 2 == 0 {
            a.extend(std::iter::once(mn.clone()));
        } else {
            a.remove(&mn);
        }
        consistent &= product_member(&a, &x, &y) == a.contains(&mn);
    }
    Ok(PrincipalProduct {
        product: mn,
        samples: SAMPLES,
        consistent,
    })
}
