//! Eventually constant functions into the primes, the maps `g_n`, the
//! `Y` set built from a descending chain, and a greedy family extender
//! that preserves bounded thickness.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use itertools::Itertools;
use serde::Serialize;

use crate::arith::{is_prime, nth_prime, prime_index, primes};
use crate::coloring::{is_thick_bounded, PartitionGuard, ThickParams};
use crate::error::{Error, Result};
use crate::nat::{nat, Nat, NatSet};

/// `f(n) = prefix[n-1]` for `n <= |prefix|`, `tail` afterwards. The last
/// prefix entry differs from the tail, so each function has one form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ECFunction {
    prefix: Vec<u64>,
    tail: u64,
}

impl ECFunction {
    pub fn new(prefix: Vec<u64>, tail: u64) -> Result<ECFunction> {
        if let Some(&bad) = prefix
            .iter()
            .chain([&tail])
            .find(|&&p| !Nat::new(p).is_some_and(|n| is_prime(&n)))
        {
            return Err(Error::InvalidArgument(format!("{bad} is not a prime")));
        }
        let mut prefix = prefix;
        while prefix.last() == Some(&tail) {
            prefix.pop();
        }
        Ok(ECFunction { prefix, tail })
    }

    pub fn constant(p: u64) -> Result<ECFunction> {
        ECFunction::new(Vec::new(), p)
    }

    pub fn prefix(&self) -> &[u64] {
        &self.prefix
    }

    pub fn tail(&self) -> u64 {
        self.tail
    }

    /// `f(n)` for `n >= 1`.
    pub fn eval(&self, n: u64) -> u64 {
        match usize::try_from(n)
            .ok()
            .filter(|&n| n >= 1 && n <= self.prefix.len())
        {
            Some(n) => self.prefix[n - 1],
            None => self.tail,
        }
    }

    pub fn max_value(&self) -> u64 {
        self.prefix.iter().copied().fold(self.tail, u64::max)
    }

    /// `max(|prefix|, π(max value))`; only finitely many functions share a
    /// height.
    pub fn height(&self) -> u64 {
        let pi = prime_index(&nat(self.max_value())).expect("values are prime");
        pi.max(self.prefix.len() as u64)
    }

    /// Whether `f` may sit at index prime `i`.
    pub fn fits_index(&self, i: u64) -> bool {
        if i <= 3 {
            self.max_value() <= i
        } else {
            self.max_value() < i
        }
    }
}

impl fmt::Display for ECFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]{}^∞", self.prefix.iter().join(","), self.tail)
    }
}

/// All functions of height `h` in canonical order: prefix length, then
/// prefix lexicographically, then tail.
pub fn ec_height_class(h: u64) -> Result<Vec<ECFunction>> {
    let values: Vec<u64> = (1..=h)
        .map(|i| nth_prime(i).map(|p| p.to_u64().expect("small prime")))
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for len in 0..=h as usize {
        let prefixes: Vec<Vec<u64>> = if len == 0 {
            vec![Vec::new()]
        } else {
            (0..len)
                .map(|_| values.iter().copied())
                .multi_cartesian_product()
                .collect()
        };
        for prefix in prefixes {
            for &tail in &values {
                if prefix.last() == Some(&tail) {
                    continue;
                }
                let f = ECFunction {
                    prefix: prefix.clone(),
                    tail,
                };
                if f.height() == h {
                    out.push(f);
                }
            }
        }
    }
    Ok(out)
}

/// Injective assignment of eventually constant functions to index primes.
#[derive(Clone, Debug, Serialize)]
pub struct EcAssignment {
    functions: BTreeMap<u64, ECFunction>,
}

impl EcAssignment {
    pub fn get(&self, i: u64) -> Option<&ECFunction> {
        self.functions.get(&i)
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, &ECFunction)> {
        self.functions.iter().map(|(&i, f)| (i, f))
    }
}

/// Walk the first `count` primes `i`, giving each the first unused function
/// (by height, then canonical order) that respects the bound at `i`.
pub fn ec_enumerate(count: usize) -> Result<EcAssignment> {
    if count == 0 {
        return Err(Error::InvalidArgument("count must be positive".into()));
    }
    let mut pool: Vec<Option<ECFunction>> = Vec::new();
    let mut height = 0;
    let mut first_free = 0;
    let mut functions = BTreeMap::new();
    for idx in 1..=count as u64 {
        let i = nth_prime(idx)?.to_u64().expect("small prime");
        let mut pos = first_free;
        loop {
            if pos == pool.len() {
                height += 1;
                pool.extend(ec_height_class(height)?.into_iter().map(Some));
                continue;
            }
            if pool[pos].as_ref().is_some_and(|f| f.fits_index(i)) {
                functions.insert(i, pool[pos].take().expect("checked"));
                break;
            }
            pos += 1;
        }
        while first_free < pool.len() && pool[first_free].is_none() {
            first_free += 1;
        }
    }
    Ok(EcAssignment { functions })
}

/// `g_n(i) = i · f_i(n)`.
pub fn g_value(asg: &EcAssignment, i: u64, n: u64) -> Result<Nat> {
    if n == 0 {
        return Err(Error::Zero);
    }
    let f = asg
        .get(i)
        .ok_or_else(|| Error::InvalidArgument(format!("{i} is not an assigned index prime")))?;
    Ok(nat(i).mul(&nat(f.eval(n))))
}

#[derive(Clone, Debug, Serialize)]
pub struct GDisjointReport {
    pub m: u64,
    pub n: u64,
    pub indices: usize,
    /// `|{i : f_i(m) ≠ f_i(n)}|`.
    pub varying: usize,
    /// `(i, j)` with `g_m(i) = g_n(j)`.
    pub collisions: Vec<(u64, u64)>,
}

impl GDisjointReport {
    pub fn passed(&self) -> bool {
        self.collisions.is_empty()
    }
}

/// `g_m[V]` and `g_n[V]` are disjoint for `V = {i : f_i(m) ≠ f_i(n)}`.
pub fn verify_g_disjoint(asg: &EcAssignment, m: u64, n: u64) -> Result<GDisjointReport> {
    if m == n {
        return Err(Error::InvalidArgument(format!(
            "m and n must differ (both {m})"
        )));
    }
    let varying: Vec<u64> = asg
        .iter()
        .filter(|(_, f)| f.eval(m) != f.eval(n))
        .map(|(i, _)| i)
        .collect();
    let mut image_m: HashMap<Nat, u64> = HashMap::new();
    for &i in &varying {
        image_m.insert(g_value(asg, i, m)?, i);
    }
    let mut collisions = Vec::new();
    for &j in &varying {
        if let Some(&i) = image_m.get(&g_value(asg, j, n)?) {
            collisions.push((i, j));
        }
    }
    Ok(GDisjointReport {
        m,
        n,
        indices: asg.len(),
        varying: varying.len(),
        collisions,
    })
}

/// `X_1 ⊇ X_2 ⊇ …` of prime sets; `X_n` past the end repeats the last set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainOfSets {
    sets: Vec<NatSet>,
}

impl ChainOfSets {
    pub fn new(sets: Vec<NatSet>) -> Result<ChainOfSets> {
        for (k, s) in sets.iter().enumerate() {
            if let Some(bad) = s.iter().find(|p| !is_prime(p)) {
                return Err(Error::InvalidArgument(format!(
                    "X_{} holds non-prime {bad}",
                    k + 1
                )));
            }
        }
        if let Some(k) = (1..sets.len()).find(|&k| !sets[k].is_subset(&sets[k - 1])) {
            return Err(Error::InvalidArgument(format!(
                "X_{} is not contained in X_{}",
                k + 1,
                k
            )));
        }
        Ok(ChainOfSets { sets })
    }

    pub fn constant(set: NatSet) -> Result<ChainOfSets> {
        ChainOfSets::new(vec![set])
    }

    pub fn sets(&self) -> &[NatSet] {
        &self.sets
    }

    /// `X_n` for `n >= 1`; empty for an empty chain.
    pub fn level(&self, n: u64) -> Option<&NatSet> {
        let last = self.sets.len().checked_sub(1)?;
        let k = usize::try_from(n.saturating_sub(1)).map_or(last, |k| k.min(last));
        self.sets.get(k)
    }
}

/// `Y = {mn ∈ P^(2) : m > n, m ∈ X_n}` within `{1..W}`.
pub fn build_y(chain: &ChainOfSets, window: u64) -> Result<NatSet> {
    let table = primes();
    if window / 2 > table.bound() {
        return Err(Error::Guard {
            what: "Y window",
            size: u128::from(window),
            limit: u128::from(table.bound()) * 2,
        });
    }
    let mut out = NatSet::windowed(nat(window.max(1)));
    let ps = table.primes();
    for (a, &n) in ps.iter().enumerate() {
        let Some(&next) = ps.get(a + 1) else { break };
        if n.saturating_mul(next) > window {
            break;
        }
        let Some(x) = chain.level(n) else { break };
        for &m in &ps[a + 1..] {
            if n * m > window {
                break;
            }
            if x.contains(&nat(m)) {
                out.insert(nat(n * m))?;
            }
        }
    }
    Ok(out)
}

/// `|B ∖ X_n| <= slack` for every listed chain element.
pub fn pseudo_check(b: &NatSet, chain: &ChainOfSets, slack: usize) -> bool {
    chain.sets.iter().all(|x| b.difference(x).len() <= slack)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Kept,
    ComplementKept,
    DeadEnd,
}

#[derive(Clone, Debug, Serialize)]
pub struct GreedyStep {
    pub index: usize,
    pub candidate: NatSet,
    pub decision: Decision,
    pub added: Option<NatSet>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GreedyOutcome {
    pub window: NatSet,
    pub family: Vec<NatSet>,
    pub log: Vec<GreedyStep>,
}

impl GreedyOutcome {
    pub fn dead_ends(&self) -> usize {
        self.log
            .iter()
            .filter(|s| s.decision == Decision::DeadEnd)
            .count()
    }
}

/// Every pairwise intersection in `family`, including each set with itself,
/// is bounded-thick.
pub fn family_is_thick(
    family: &[NatSet],
    params: ThickParams,
    guard: PartitionGuard,
) -> Result<bool> {
    for (a, b) in family
        .iter()
        .tuple_combinations()
        .chain(family.iter().map(|a| (a, a)))
    {
        if !is_thick_bounded(&a.intersection(b), params, guard)?.thick {
            return Ok(false);
        }
    }
    Ok(true)
}

fn compatible(
    s: &NatSet,
    family: &[NatSet],
    params: ThickParams,
    guard: PartitionGuard,
) -> Result<bool> {
    if !is_thick_bounded(s, params, guard)?.thick {
        return Ok(false);
    }
    for a in family {
        if !is_thick_bounded(&s.intersection(a), params, guard)?.thick {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Add each candidate, or else its complement within the union of the
/// seeds, whenever all intersections with the family stay bounded-thick.
pub fn greedy_thick_extend(
    seeds: &[NatSet],
    candidates: &[NatSet],
    params: ThickParams,
    guard: PartitionGuard,
) -> Result<GreedyOutcome> {
    if !family_is_thick(seeds, params, guard)? {
        return Err(Error::InvalidArgument(
            "seed intersections are not all bounded-thick".into(),
        ));
    }
    let window = seeds.iter().fold(NatSet::new(), |acc, s| acc.union(s));
    let mut family = seeds.to_vec();
    let mut log = Vec::new();
    for (index, candidate) in candidates.iter().enumerate() {
        let side = candidate.intersection(&window);
        let other = window.difference(&side);
        let (decision, added) = if compatible(&side, &family, params, guard)? {
            (Decision::Kept, Some(side))
        } else if compatible(&other, &family, params, guard)? {
            (Decision::ComplementKept, Some(other))
        } else {
            (Decision::DeadEnd, None)
        };
        if let Some(s) = &added {
            family.push(s.clone());
        }
        log.push(GreedyStep {
            index,
            candidate: candidate.clone(),
            decision,
            added,
        });
    }
    Ok(GreedyOutcome {
        window,
        family,
        log,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{factorize, first_primes};
    use crate::nat::nat;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ec(prefix: &[u64], tail: u64) -> ECFunction {
        ECFunction::new(prefix.to_vec(), tail).unwrap()
    }

    #[test]
    fn canonical_form() {
        assert_eq!(ec(&[2, 3, 3], 3), ec(&[2], 3));
        assert_eq!(ec(&[5], 5), ECFunction::constant(5).unwrap());
        assert!(ECFunction::new(vec![4], 2).is_err());
        let f = ec(&[3, 5], 2);
        assert_eq!((f.eval(1), f.eval(2), f.eval(3), f.eval(100)), (3, 5, 2, 2));
        assert_eq!(f.height(), 3);
        assert_eq!(f.to_string(), "[3,5]2^∞");
    }

    #[test]
    fn height_classes() {
        assert_eq!(ec_height_class(1).unwrap(), vec![ec(&[], 2)]);
        let h2 = ec_height_class(2).unwrap();
        assert_eq!(h2.len(), 7);
        assert_eq!(h2[0], ec(&[], 3));
        assert_eq!(h2[1], ec(&[2], 3));
        // Count height-3 functions directly: canonical (prefix, tail) over
        // {2,3,5} with prefix length <= 3, minus those of lower height.
        let all: usize = (0..=3u32)
            .map(|l| if l == 0 { 3 } else { 3usize.pow(l) * 2 })
            .sum();
        assert_eq!(ec_height_class(3).unwrap().len(), all - 7 - 1);
    }

    #[test]
    fn enumeration_examples() {
        let asg = ec_enumerate(6).unwrap();
        assert_eq!(asg.get(2), Some(&ec(&[], 2)));
        assert_eq!(asg.get(3), Some(&ec(&[], 3)));
        assert_eq!(asg.get(5), Some(&ec(&[2], 3)));
        assert_eq!(asg.get(7), Some(&ec(&[3], 2)));
        assert_eq!(g_value(&asg, 7, 1), Ok(nat(21)));
        for n in 1..10 {
            assert_eq!(g_value(&asg, 2, n), Ok(nat(4)));
        }
        assert!(g_value(&asg, 4, 1).is_err());
        assert!(ec_enumerate(0).is_err());
    }

    #[test]
    fn enumeration_is_injective_and_bounded() {
        let asg = ec_enumerate(500).unwrap();
        assert_eq!(asg.len(), 500);
        let distinct: std::collections::HashSet<&ECFunction> = asg.iter().map(|(_, f)| f).collect();
        assert_eq!(distinct.len(), 500);
        for (i, f) in asg.iter() {
            assert!(f.fits_index(i), "{i} ↦ {f}");
        }
        let again = ec_enumerate(500).unwrap();
        assert!(asg.iter().zip(again.iter()).all(|(a, b)| a == b));
        // A prefix of the assignment does not depend on the count.
        let short = ec_enumerate(50).unwrap();
        assert!(short.iter().all(|(i, f)| asg.get(i) == Some(f)));
    }

    #[test]
    fn g_values_recover_index_and_value() {
        let asg = ec_enumerate(200).unwrap();
        for (i, f) in asg.iter().filter(|(i, _)| *i > 3) {
            for n in 1..6 {
                let g = g_value(&asg, i, n).unwrap();
                let fac = factorize(&g);
                assert!(fac.is_squarefree_of_arity(2));
                let ps: Vec<u64> = fac.iter().map(|(p, _)| p.to_u64().unwrap()).collect();
                assert_eq!(ps, vec![f.eval(n), i]);
            }
        }
    }

    #[test]
    fn g_disjoint_examples() {
        let asg = ec_enumerate(100).unwrap();
        let r = verify_g_disjoint(&asg, 1, 2).unwrap();
        assert!(r.passed());
        assert!(r.varying > 0);
        assert!(verify_g_disjoint(&asg, 3, 3).is_err());
        let tiny = ec_enumerate(1).unwrap();
        let r = verify_g_disjoint(&tiny, 1, 2).unwrap();
        assert_eq!((r.indices, r.varying), (1, 0));
        assert!(r.passed());
    }

    fn primes_upto(w: u64) -> NatSet {
        (2..=w).map(nat).filter(is_prime).collect()
    }

    /// `Y` from its definition by scanning every number in the window.
    fn y_oracle(chain: &ChainOfSets, w: u64) -> NatSet {
        (1..=w)
            .map(nat)
            .filter(|x| {
                let f = factorize(x);
                if !f.is_squarefree_of_arity(2) {
                    return false;
                }
                let ps: Vec<u64> = f.iter().map(|(p, _)| p.to_u64().unwrap()).collect();
                chain.level(ps[0]).is_some_and(|s| s.contains(&nat(ps[1])))
            })
            .collect()
    }

    #[test]
    fn y_examples() {
        let all = ChainOfSets::constant(primes_upto(15)).unwrap();
        assert_eq!(
            build_y(&all, 15).unwrap().to_u64s().unwrap(),
            vec![6, 10, 14, 15]
        );
        let empty = ChainOfSets::constant(NatSet::new()).unwrap();
        assert!(build_y(&empty, 100).unwrap().is_empty());
        assert!(build_y(&ChainOfSets::new(vec![]).unwrap(), 100)
            .unwrap()
            .is_empty());

        let x1 = primes_upto(35);
        let x2: NatSet = x1.iter().filter(|p| **p > nat(5)).cloned().collect();
        let chain = ChainOfSets::new(vec![x1, x2]).unwrap();
        let y = build_y(&chain, 35).unwrap();
        assert!(!y.contains(&nat(6)));
        assert_eq!(y.to_u64s().unwrap(), vec![14, 21, 22, 26, 33, 34, 35]);
        assert_eq!(y, y_oracle(&chain, 35).with_window(nat(35)).unwrap());
    }

    #[test]
    fn y_matches_oracle_on_random_chains() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let w = 600;
        for _ in 0..40 {
            let mut sets = vec![primes_upto(w)];
            for _ in 0..rng.gen_range(0..8) {
                let last = sets.last().unwrap();
                sets.push(last.iter().filter(|_| rng.gen_bool(0.8)).cloned().collect());
            }
            let chain = ChainOfSets::new(sets).unwrap();
            let y = build_y(&chain, w).unwrap();
            assert_eq!(y, y_oracle(&chain, w).with_window(nat(w)).unwrap());
            for x in &y {
                let ps: Vec<u64> = factorize(x)
                    .iter()
                    .map(|(p, _)| p.to_u64().unwrap())
                    .collect();
                assert!(chain.level(ps[0]).unwrap().contains(&nat(ps[1])));
            }
        }
    }

    #[test]
    fn chain_validation() {
        let a = NatSet::from_u64s([2, 3]).unwrap();
        let b = NatSet::from_u64s([2, 5]).unwrap();
        assert!(ChainOfSets::new(vec![a.clone(), b]).is_err());
        assert!(ChainOfSets::new(vec![NatSet::from_u64s([4]).unwrap()]).is_err());
        let c = ChainOfSets::new(vec![a.clone(), NatSet::from_u64s([3]).unwrap()]).unwrap();
        assert_eq!(c.level(1), Some(&a));
        assert_eq!(c.level(7), Some(&NatSet::from_u64s([3]).unwrap()));
    }

    #[test]
    fn pseudo_check_examples() {
        let x1 = primes_upto(50);
        let x2: NatSet = x1.iter().filter(|p| **p > nat(10)).cloned().collect();
        let x3: NatSet = x2.iter().filter(|p| **p > nat(20)).cloned().collect();
        let chain = ChainOfSets::new(vec![x1, x2, x3.clone()]).unwrap();
        assert!(pseudo_check(&x3, &chain, 0));
        let stray = NatSet::from_u64s([13, 23, 29]).unwrap();
        assert!(!pseudo_check(&stray, &chain, 0));
        assert!(pseudo_check(&stray, &chain, 1));
        let low = NatSet::from_u64s([2, 3, 5]).unwrap();
        assert!(!pseudo_check(&low, &chain, 2));
    }

    #[test]
    fn greedy_examples() {
        let g = PartitionGuard::default();
        let p = ThickParams::new(2, 1, 1).unwrap();
        let seed = first_primes(12);
        let out = greedy_thick_extend(std::slice::from_ref(&seed), &[NatSet::new()], p, g).unwrap();
        assert_eq!(out.log[0].decision, Decision::ComplementKept);
        assert_eq!(out.log[0].added, Some(seed.clone()));
        let out = greedy_thick_extend(
            std::slice::from_ref(&seed),
            std::slice::from_ref(&seed),
            p,
            g,
        )
        .unwrap();
        assert_eq!(out.log[0].decision, Decision::Kept);
        assert!(greedy_thick_extend(&[NatSet::new()], &[], p, g).is_err());
    }

    #[test]
    fn greedy_random_run_keeps_family_thick() {
        let g = PartitionGuard::default();
        let p = ThickParams::new(2, 2, 2).unwrap();
        let seed = first_primes(12);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let candidates: Vec<NatSet> = (0..12)
            .map(|_| seed.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect())
            .collect();
        let out = greedy_thick_extend(&[seed], &candidates, p, g).unwrap();
        assert_eq!(out.log.len(), candidates.len());
        assert!(family_is_thick(&out.family, p, g).unwrap());
        assert_eq!(out.family.len(), 1 + candidates.len() - out.dead_ends());
    }
}
