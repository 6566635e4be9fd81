//! The dyadic block coloring of pairs, the partitions it induces on
//! products of distinct primes, and bounded thickness.
//!
//! Blocks are `A^n_i = {(i-1)2^n + 1, ..., i 2^n}`. Two indices `a < b`
//! first share a block at their merge level `n`; with `2^j <= b - a < 2^(j+1)`
//! the pair gets color `n - j`.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arith::{coprime_power, factorize, first_primes, nth_prime, prime_index};
use crate::error::{Error, Result};
use crate::nat::{Nat, NatSet};

/// The pair coloring `c` on positive integers.
#[derive(Clone, Copy, Debug, Default)]
pub struct BlockColoring;

impl BlockColoring {
    /// `A^level_i`.
    pub fn block(level: u32, i: u64) -> RangeInclusive<u64> {
        let size = 1u64 << level;
        ((i - 1) * size + 1)..=(i * size)
    }

    /// The `i` with `a ∈ A^level_i`.
    pub fn block_index(level: u32, a: u64) -> u64 {
        ((a - 1) >> level) + 1
    }

    pub fn color(&self, a: u64, b: u64) -> Result<u32> {
        color_pair(a, b)
    }
}

/// Least `n` with `⌈a/2^n⌉ = ⌈b/2^n⌉`.
pub fn merge_level(a: u64, b: u64) -> u32 {
    64 - ((a - 1) ^ (b - 1)).leading_zeros()
}

pub fn color_pair(a: u64, b: u64) -> Result<u32> {
    if a == 0 || b == 0 {
        return Err(Error::Zero);
    }
    if a == b {
        return Err(Error::EqualPair(a));
    }
    let (a, b) = if a < b { (a, b) } else { (b, a) };
    let j = 63 - (b - a).leading_zeros();
    Ok(merge_level(a, b) - j)
}

/// `c_n`: the color of the two smallest indices.
pub fn color_tuple(indices: &[u64], n: usize) -> Result<u32> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("arity {n} is below 2")));
    }
    if indices.len() != n {
        return Err(Error::InvalidArgument(format!(
            "expected {n} indices, got {}",
            indices.len()
        )));
    }
    let mut sorted = indices.to_vec();
    sorted.sort_unstable();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::EqualPair(w[0]));
    }
    color_pair(sorted[0], sorted[1])
}

/// Increasing prime indices of `x`, which must be a product of `n`
/// distinct primes.
pub fn prime_indices(n: usize, x: &Nat) -> Result<Vec<u64>> {
    let f = factorize(x);
    if !f.is_squarefree_of_arity(n) {
        return Err(Error::NotCoprimePower(x.clone(), n));
    }
    f.iter()
        .map(|(p, _)| {
            prime_index(p)
                .ok_or_else(|| Error::InvalidArgument(format!("prime {p} is too large to index")))
        })
        .collect()
}

/// The `k` with `x ∈ X_{n,k}`.
pub fn class_of(n: usize, x: &Nat) -> Result<u32> {
    color_tuple(&prime_indices(n, x)?, n)
}

/// The partition `d_n = {X_{n,k}}` of `P^(n)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PartitionDn {
    n: usize,
}

impl PartitionDn {
    pub fn new(n: usize) -> Result<PartitionDn> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("arity {n} is below 2")));
        }
        Ok(PartitionDn { n })
    }

    pub fn arity(&self) -> usize {
        self.n
    }

    pub fn class_of(&self, x: &Nat) -> Result<u32> {
        class_of(self.n, x)
    }

    /// Classes restricted to products of primes with index `<= index_bound`.
    pub fn classes(&self, index_bound: u64) -> Result<BTreeMap<u32, NatSet>> {
        let mut out: BTreeMap<u32, NatSet> = BTreeMap::new();
        for combo in (1..=index_bound).combinations(self.n) {
            let k = color_tuple(&combo, self.n)?;
            let x = combo
                .iter()
                .map(|&i| nth_prime(i))
                .product::<Result<Nat>>()?;
            out.entry(k).or_default().extend(std::iter::once(x));
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ProgressionReport {
    pub k: u32,
    pub a0_max: u64,
    pub d_max: u64,
    pub length: u64,
    pub checked: u64,
    /// `(start, step)` of progressions with no pair colored `k`.
    pub violations: Vec<(u64, u64)>,
}

impl ProgressionReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Every progression of length `2^k + 1` with start `<= a0_max` and step
/// `<= d_max` contains some pair colored `k`.
pub fn verify_progr(k: u32, a0_max: u64, d_max: u64) -> Result<ProgressionReport> {
    if k == 0 || k > 20 {
        return Err(Error::InvalidArgument(format!(
            "k = {k} must lie in 1..=20"
        )));
    }
    let length = (1u64 << k) + 1;
    let mut violations = Vec::new();
    let mut checked = 0;
    for a0 in 1..=a0_max {
        for d in 1..=d_max {
            checked += 1;
            let terms: Vec<u64> = (0..length).map(|m| a0 + m * d).collect();
            let hit = terms
                .iter()
                .tuple_combinations()
                .any(|(&a, &b)| color_pair(a, b) == Ok(k));
            if !hit {
                violations.push((a0, d));
            }
        }
    }
    Ok(ProgressionReport {
        k,
        a0_max,
        d_max,
        length,
        checked,
        violations,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct RefinementReport {
    pub n: usize,
    pub index_bound: u64,
    pub checked: u64,
    /// Index tuples whose class changes when the largest index is dropped.
    pub violations: Vec<Vec<u64>>,
}

impl RefinementReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// `X_{n+1,k} ⊆ {xa : x ∈ X_{n,k}, a ∈ P}`, checked on the numbers
/// themselves by dropping the largest prime factor.
pub fn verify_refinement(n: usize, index_bound: u64) -> Result<RefinementReport> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("arity {n} is below 2")));
    }
    let primes: Vec<Nat> = (1..=index_bound).map(nth_prime).collect::<Result<_>>()?;
    let mut violations = Vec::new();
    let mut checked = 0;
    for combo in (1..=index_bound).combinations(n + 1) {
        checked += 1;
        let largest = &primes[(combo[n] - 1) as usize];
        let x: Nat = combo[..n]
            .iter()
            .map(|&i| &primes[(i - 1) as usize])
            .product();
        if class_of(n + 1, &x.mul(largest))? != class_of(n, &x)? {
            violations.push(combo);
        }
    }
    Ok(RefinementReport {
        n,
        index_bound,
        checked,
        violations,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Progression {
    pub class: usize,
    pub start: u64,
    pub step: u64,
    pub length: u64,
}

impl Progression {
    pub fn terms(&self) -> Vec<u64> {
        (0..self.length)
            .map(|m| self.start + m * self.step)
            .collect()
    }
}

/// Exhaustive search for a monochromatic progression of the given length
/// inside `{1..M}`, where the classes partition `{1..M}`.
pub fn find_mono_ap(partition: &[NatSet], length: u64) -> Result<Option<Progression>> {
    if length == 0 {
        return Err(Error::InvalidArgument(
            "progression length must be positive".into(),
        ));
    }
    let total: usize = partition.iter().map(NatSet::len).sum();
    let m = total as u64;
    let mut class = vec![usize::MAX; total + 1];
    for (c, part) in partition.iter().enumerate() {
        for x in part {
            let v = x
                .to_u64()
                .filter(|&v| v <= m)
                .ok_or_else(|| Error::InvalidArgument(format!("{x} lies outside {{1..{m}}}")))?;
            if class[v as usize] != usize::MAX {
                return Err(Error::InvalidArgument(format!("{v} lies in two classes")));
            }
            class[v as usize] = c;
        }
    }
    for start in 1..=m {
        let c = class[start as usize];
        if length == 1 {
            return Ok(Some(Progression {
                class: c,
                start,
                step: 1,
                length,
            }));
        }
        let mut step = 1;
        while start + (length - 1) * step <= m {
            if (1..length).all(|t| class[(start + t * step) as usize] == c) {
                return Ok(Some(Progression {
                    class: c,
                    start,
                    step,
                    length,
                }));
            }
            step += 1;
        }
    }
    Ok(None)
}

/// Bounds for a finite thickness test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ThickParams {
    pub n: usize,
    pub k_max: u32,
    pub m_max: usize,
}

impl ThickParams {
    pub fn new(n: usize, k_max: u32, m_max: usize) -> Result<ThickParams> {
        if n < 2 || k_max == 0 || k_max > 64 || m_max == 0 {
            return Err(Error::InvalidArgument(format!(
                "thickness parameters need n >= 2, 1 <= k_max <= 64, m_max >= 1 (got n={n}, k_max={k_max}, m_max={m_max})"
            )));
        }
        Ok(ThickParams { n, k_max, m_max })
    }
}

/// Limits on exhaustive partition enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PartitionGuard {
    pub max_elements: usize,
    pub max_parts: usize,
}

impl Default for PartitionGuard {
    fn default() -> Self {
        PartitionGuard {
            max_elements: 12,
            max_parts: 3,
        }
    }
}

impl PartitionGuard {
    pub fn unlimited() -> PartitionGuard {
        PartitionGuard {
            max_elements: 63,
            max_parts: usize::MAX,
        }
    }
}

/// One part of a refuting partition with a color its products miss.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessPart {
    pub part: NatSet,
    pub missing_color: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct ThickVerdict {
    pub thick: bool,
    pub params: ThickParams,
    pub nodes_visited: u64,
    /// A partition none of whose parts is rich enough, when not thick.
    pub witness: Option<Vec<WitnessPart>>,
}

/// Bitmask of colors `c_n` takes on `B^(n)` for sorted indices `B`.
fn reachable_colors(sorted: &[u64], n: usize) -> u128 {
    let s = sorted.len();
    let mut mask = 0u128;
    for i in 0..s {
        for j in i + 1..s {
            // a_1 = sorted[i], a_2 = sorted[j], and n - 2 larger indices.
            if s - 1 - j >= n - 2 {
                let c = color_pair(sorted[i], sorted[j]).expect("distinct indices");
                mask |= 1u128 << c.min(127);
            }
        }
    }
    mask
}

fn first_missing(mask: u128, k_max: u32) -> Option<u32> {
    (1..=k_max).find(|&k| mask & (1u128 << k) == 0)
}

fn indices_of(a: &NatSet) -> Result<Vec<(u64, Nat)>> {
    a.iter()
        .map(|p| {
            prime_index(p)
                .map(|i| (i, p.clone()))
                .ok_or_else(|| Error::InvalidArgument(format!("{p} is not a prime")))
        })
        .collect()
}

/// `B^(n)` meets `X_{n,k}` for every `k <= k_max`.
pub fn part_is_rich(b: &NatSet, n: usize, k_max: u32) -> Result<bool> {
    let idx: Vec<u64> = indices_of(b)?.into_iter().map(|(i, _)| i).collect();
    Ok(first_missing(reachable_colors(&idx, n), k_max).is_none())
}

/// Bounded thickness: every partition of `A` into at most `m_max` parts has
/// a part whose `n`-fold coprime products meet each class `X_{n,k}`,
/// `k <= k_max`.
pub fn is_thick_bounded(
    a: &NatSet,
    params: ThickParams,
    guard: PartitionGuard,
) -> Result<ThickVerdict> {
    if a.len() > guard.max_elements {
        return Err(Error::Guard {
            what: "elements to partition",
            size: a.len() as u128,
            limit: guard.max_elements as u128,
        });
    }
    if params.m_max > guard.max_parts {
        return Err(Error::Guard {
            what: "partition parts",
            size: params.m_max as u128,
            limit: guard.max_parts as u128,
        });
    }
    let elems = indices_of(a)?;
    let s = elems.len();
    let idx: Vec<u64> = elems.iter().map(|(i, _)| *i).collect();
    let colors_of = |mask: u64| -> u128 {
        let sub: Vec<u64> = (0..s)
            .filter(|&t| mask >> t & 1 == 1)
            .map(|t| idx[t])
            .collect();
        reachable_colors(&sub, params.n)
    };
    let table: Option<Vec<u128>> = (s <= 16).then(|| (0..1u64 << s).map(colors_of).collect());
    let colors = |mask: u64| match &table {
        Some(t) => t[mask as usize],
        None => colors_of(mask),
    };
    let rich = |mask: u64| first_missing(colors(mask), params.k_max).is_none();

    // Depth-first over restricted growth strings. Richness is monotone, so
    // once a partial part is rich every completion has a rich part.
    let mut parts: Vec<u64> = Vec::new();
    let mut nodes = 0u64;
    let found = refute(0, s, params.m_max, &mut parts, &rich, &mut nodes);
    let witness = found.then(|| {
        parts
            .iter()
            .map(|&mask| WitnessPart {
                part: (0..s)
                    .filter(|&t| mask >> t & 1 == 1)
                    .map(|t| elems[t].1.clone())
                    .collect(),
                missing_color: first_missing(colors(mask), params.k_max).expect("part is not rich"),
            })
            .collect()
    });
    Ok(ThickVerdict {
        thick: !found,
        params,
        nodes_visited: nodes,
        witness,
    })
}

/// Leaves `parts` holding a partition with no rich part and returns true,
/// or returns false when every partition has one.
fn refute(
    t: usize,
    s: usize,
    m_max: usize,
    parts: &mut Vec<u64>,
    rich: &dyn Fn(u64) -> bool,
    nodes: &mut u64,
) -> bool {
    *nodes += 1;
    if t == s {
        return true;
    }
    for p in 0..parts.len() {
        parts[p] |= 1 << t;
        if !rich(parts[p]) && refute(t + 1, s, m_max, parts, rich, nodes) {
            return true;
        }
        parts[p] &= !(1 << t);
    }
    if parts.len() < m_max {
        parts.push(1 << t);
        if !rich(1 << t) && refute(t + 1, s, m_max, parts, rich, nodes) {
            return true;
        }
        parts.pop();
    }
    false
}

/// Whether `partition` refutes thickness of `a` at `params`: it partitions
/// `a` into at most `m_max` parts, none of them rich.
pub fn is_refuting_partition(
    a: &NatSet,
    partition: &[NatSet],
    params: ThickParams,
) -> Result<bool> {
    if partition.len() > params.m_max {
        return Ok(false);
    }
    let mut union = NatSet::new();
    let mut count = 0;
    for part in partition {
        count += part.len();
        union = union.union(part);
        if part_is_rich(part, params.n, params.k_max)? {
            return Ok(false);
        }
    }
    Ok(count == union.len() && union == *a)
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct LemmaTally {
    pub instances: u64,
    pub attempts: u64,
    pub passed: u64,
    pub failures: Vec<String>,
}

impl LemmaTally {
    pub fn all_passed(&self) -> bool {
        self.failures.is_empty() && self.passed == self.instances
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ThickLemmaReport {
    pub samples: u64,
    pub seed: u64,
    pub monotonicity: LemmaTally,
    pub union: LemmaTally,
    pub arity: LemmaTally,
}

impl ThickLemmaReport {
    pub fn passed(&self) -> bool {
        [&self.monotonicity, &self.union, &self.arity]
            .iter()
            .all(|t| t.all_passed() && t.instances == self.samples)
    }
}

const HARNESS_INDICES: u64 = 16;

fn random_prime_set(rng: &mut ChaCha8Rng, pool: &[Nat], lo: usize, hi: usize) -> NatSet {
    let size = rng.gen_range(lo..=hi);
    pool.choose_multiple(rng, size).cloned().collect()
}

fn random_params(rng: &mut ChaCha8Rng, m_hi: usize) -> ThickParams {
    ThickParams {
        n: rng.gen_range(2..=3),
        k_max: rng.gen_range(1..=3),
        m_max: rng.gen_range(1..=m_hi),
    }
}

fn describe(sets: &[(&str, &NatSet)], params: ThickParams) -> String {
    let sets = sets.iter().map(|(n, s)| format!("{n}={s}")).join(" ");
    format!(
        "{sets} n={} k_max={} m_max={}",
        params.n, params.k_max, params.m_max
    )
}

/// Randomized harness for monotonicity, the union bound and the arity step.
/// Instances are drawn until `samples` of them satisfy each hypothesis.
pub fn check_thick_lemmas(samples: u64, seed: u64) -> Result<ThickLemmaReport> {
    let pool: Vec<Nat> = first_primes(HARNESS_INDICES as usize).into_iter().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let guard = PartitionGuard::default();
    let wide = PartitionGuard {
        max_elements: 12,
        max_parts: 4,
    };
    let cap = samples.saturating_mul(200).max(1000);

    let mut mono = LemmaTally::default();
    while mono.instances < samples && mono.attempts < cap {
        mono.attempts += 1;
        let params = random_params(&mut rng, 3);
        let a = random_prime_set(&mut rng, &pool, 2, 8);
        if !is_thick_bounded(&a, params, guard)?.thick {
            continue;
        }
        let extra = random_prime_set(&mut rng, &pool, 0, 4);
        let b = a.union(&extra);
        mono.instances += 1;
        if is_thick_bounded(&b, params, guard)?.thick {
            mono.passed += 1;
        } else {
            mono.failures
                .push(describe(&[("A", &a), ("B", &b)], params));
        }
    }

    let mut union = LemmaTally::default();
    while union.instances < samples && union.attempts < cap {
        union.attempts += 1;
        let p1 = random_params(&mut rng, 2);
        let m2 = rng.gen_range(1..=2);
        let p2 = ThickParams { m_max: m2, ..p1 };
        let a = random_prime_set(&mut rng, &pool, 1, 6);
        let b = random_prime_set(&mut rng, &pool, 1, 6);
        let va = is_thick_bounded(&a, p1, guard)?;
        let vb = is_thick_bounded(&b, p2, guard)?;
        let (Some(wa), Some(wb)) = (va.witness, vb.witness) else {
            continue;
        };
        union.instances += 1;
        let joint = ThickParams {
            m_max: p1.m_max + p2.m_max,
            ..p1
        };
        let ab = a.union(&b);
        // The second witness restricted to B \ A, then concatenated.
        let mut concat: Vec<NatSet> = wa.into_iter().map(|w| w.part).collect();
        concat.extend(
            wb.into_iter()
                .map(|w| w.part.difference(&a))
                .filter(|p| !p.is_empty()),
        );
        let witness_ok = is_refuting_partition(&ab, &concat, joint)?;
        let direct_ok = !is_thick_bounded(&ab, joint, wide)?.thick;
        if witness_ok && direct_ok {
            union.passed += 1;
        } else {
            union
                .failures
                .push(describe(&[("A", &a), ("B", &b)], joint));
        }
    }

    let mut arity = LemmaTally::default();
    while arity.instances < samples && arity.attempts < cap {
        arity.attempts += 1;
        let params = random_params(&mut rng, 3);
        let a = random_prime_set(&mut rng, &pool, 1, 10);
        let Some(w) = is_thick_bounded(&a, params, guard)?.witness else {
            continue;
        };
        arity.instances += 1;
        let next = ThickParams {
            n: params.n + 1,
            ..params
        };
        let parts: Vec<NatSet> = w.into_iter().map(|w| w.part).collect();
        let witness_ok = is_refuting_partition(&a, &parts, next)?;
        let direct_ok = !is_thick_bounded(&a, next, guard)?.thick;
        if witness_ok && direct_ok {
            arity.passed += 1;
        } else {
            arity.failures.push(describe(&[("A", &a)], params));
        }
    }

    Ok(ThickLemmaReport {
        samples,
        seed,
        monotonicity: mono,
        union,
        arity,
    })
}

/// A 2-coloring of the `k`-subsets of a prime set induced by a set `S`.
#[derive(Clone, Debug, Serialize)]
pub struct SubsetColoring {
    pub k: usize,
    pub colors: BTreeMap<Nat, u8>,
}

impl SubsetColoring {
    /// Color of a `k`-subset: 0 when its product lies in `S`, else 1.
    pub fn color(&self, subset: &[Nat]) -> Option<u8> {
        if subset.len() != self.k {
            return None;
        }
        self.colors.get(&subset.iter().product()).copied()
    }
}

/// `{a_1..a_k} ↦ 0` if `a_1···a_k ∈ S`, else `1`. Keys are the products.
pub fn coloring_from_set(s: &NatSet, a: &NatSet, k: usize) -> SubsetColoring {
    let colors = a
        .iter()
        .combinations(k)
        .map(|c| {
            let x: Nat = c.into_iter().product();
            let color = u8::from(!s.contains(&x));
            (x, color)
        })
        .collect();
    SubsetColoring { k, colors }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Monochromatic {
    pub set: NatSet,
    pub color: u8,
}

/// First `M ⊆ A` of size `target` (in lexicographic order) whose
/// `k`-subsets all receive one color.
pub fn find_monochromatic<F>(
    a: &NatSet,
    k: usize,
    coloring: F,
    target: usize,
) -> Result<Option<Monochromatic>>
where
    F: Fn(&[Nat]) -> u8,
{
    if k == 0 || target < k {
        return Err(Error::InvalidArgument(format!(
            "target size {target} must be at least k = {k} >= 1"
        )));
    }
    for m in a.iter().cloned().combinations(target) {
        let mut colors = m.iter().cloned().combinations(k).map(|c| coloring(&c));
        let first = colors.next().expect("target >= k");
        if colors.all(|c| c == first) {
            return Ok(Some(Monochromatic {
                set: m.into_iter().collect(),
                color: first,
            }));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, Serialize)]
pub struct RamseyWitness {
    pub set: NatSet,
    /// Whether `M^(k) ⊆ S`; otherwise `M^(k)` avoids `S`.
    pub inside: bool,
}

/// A set `M ⊆ A` with `|M| = target` and `M^(k)` inside `S` or inside its
/// complement, confirmed on the product set itself.
pub fn ramsey_bridge(
    s: &NatSet,
    a: &NatSet,
    k: usize,
    target: usize,
) -> Result<Option<RamseyWitness>> {
    let coloring = coloring_from_set(s, a, k);
    let found = find_monochromatic(a, k, |c| coloring.color(c).expect("k-subset of A"), target)?;
    let Some(mono) = found else { return Ok(None) };
    let power = coprime_power(&mono.set, k as u32)?;
    let inside = power.is_subset(s);
    let outside = power.is_disjoint(s);
    if inside == outside {
        return Err(Error::InvalidArgument(format!(
            "monochromatic set {} does not separate its products",
            mono.set
        )));
    }
    Ok(Some(RamseyWitness {
        set: mono.set,
        inside,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::squarefree_of_arity;
    use crate::nat::nat;
    use proptest::prelude::*;

    /// Colors from the case split: find the level where `a` and `b` sit in
    /// the two halves of one materialized block.
    fn oracle_color(a: u64, b: u64) -> u32 {
        let (a, b) = (a.min(b), a.max(b));
        let mut blocks: Vec<Vec<u64>> = (1..=256).map(|x| vec![x]).collect();
        for n in 1.. {
            let next: Vec<Vec<u64>> = blocks.chunks(2).map(|c| c.concat()).collect();
            for (i, block) in next.iter().enumerate() {
                let (left, right) = (&blocks[2 * i], &blocks[2 * i + 1]);
                if left.contains(&a) && right.contains(&b) {
                    assert!(block.contains(&a) && block.contains(&b));
                    let mut j = 0;
                    while 1u64 << (j + 1) <= b - a {
                        j += 1;
                    }
                    return n - j;
                }
            }
            blocks = next;
        }
        unreachable!()
    }

    #[test]
    fn pair_examples() {
        assert_eq!(color_pair(5, 6), Ok(1));
        assert_eq!(color_pair(4, 6), Ok(2));
        assert_eq!(color_pair(6, 4), Ok(2));
        for t in 0..40 {
            assert_eq!(color_pair(1, (1 << t) + 1), Ok(1));
        }
        assert_eq!(color_pair(3, 3), Err(Error::EqualPair(3)));
        assert_eq!(color_pair(0, 3), Err(Error::Zero));
    }

    #[test]
    fn pair_matches_materialized_blocks() {
        for a in 1..=256u64 {
            for b in a + 1..=256 {
                assert_eq!(color_pair(a, b).unwrap(), oracle_color(a, b), "({a},{b})");
            }
        }
    }

    #[test]
    fn blocks_split_in_halves() {
        for level in 1..10 {
            for i in 1..50 {
                let whole = BlockColoring::block(level, i);
                let left = BlockColoring::block(level - 1, 2 * i - 1);
                let right = BlockColoring::block(level - 1, 2 * i);
                assert_eq!(*whole.start(), *left.start());
                assert_eq!(*left.end() + 1, *right.start());
                assert_eq!(*whole.end(), *right.end());
                for a in whole {
                    assert_eq!(BlockColoring::block_index(level, a), i);
                }
            }
        }
    }

    #[test]
    fn tuple_and_class_examples() {
        assert_eq!(color_tuple(&[5, 6, 100], 3), Ok(1));
        assert_eq!(color_tuple(&[9, 7, 6, 4], 4), Ok(2));
        assert_eq!(color_tuple(&[3, 8], 2), color_pair(3, 8));
        assert!(color_tuple(&[3, 8], 3).is_err());
        assert!(color_tuple(&[3, 3, 8], 3).is_err());
        assert_eq!(class_of(2, &nat(143)), Ok(1));
        assert_eq!(class_of(3, &nat(7 * 13 * 23)), Ok(2));
        assert_eq!(class_of(2, &nat(4)), Err(Error::NotCoprimePower(nat(4), 2)));
        assert!(class_of(2, &nat(30)).is_err());
    }

    #[test]
    fn classes_partition_coprime_powers() {
        for n in 2..=3 {
            let d = PartitionDn::new(n).unwrap();
            let classes = d.classes(12).unwrap();
            let window = nth_prime(12).unwrap().pow(n as u32).to_u64().unwrap();
            let expected: NatSet = squarefree_of_arity(n, window)
                .iter()
                .filter(|x| prime_indices(n, x).unwrap().iter().all(|&i| i <= 12))
                .cloned()
                .collect();
            let mut seen = NatSet::new();
            for (k, class) in &classes {
                assert!(seen.is_disjoint(class));
                seen = seen.union(class);
                for x in class {
                    assert_eq!(d.class_of(x).unwrap(), *k);
                }
            }
            assert_eq!(seen, expected);
        }
    }

    #[test]
    fn progression_examples() {
        assert!(verify_progr(2, 256, 32).unwrap().passed());
        let r = verify_progr(3, 64, 16).unwrap();
        assert!(r.passed());
        assert_eq!(r.checked, 64 * 16);
        assert_eq!(r.length, 9);
        assert!(verify_progr(0, 1, 1).is_err());
    }

    #[test]
    fn three_terms_do_not_force_color_one() {
        // 3, 6, 9 has pair colors 2, 3, 2.
        assert_eq!(color_pair(3, 6), Ok(2));
        assert_eq!(color_pair(6, 9), Ok(3));
        assert_eq!(color_pair(3, 9), Ok(2));
        let r = verify_progr(1, 256, 32).unwrap();
        assert!(r.violations.contains(&(3, 3)));
        // Seven terms suffice on this range; six do not.
        let hits = |len: u64| {
            (1..=256u64).all(|a0| {
                (1..=32u64).all(|d| {
                    (0..len)
                        .tuple_combinations()
                        .any(|(i, j)| color_pair(a0 + i * d, a0 + j * d) == Ok(1))
                })
            })
        };
        assert!(!hits(6));
        assert!(hits(7));
    }

    #[test]
    fn shorter_progressions_can_miss_a_color() {
        // Length 2^k does not suffice: (1, 2) has color 1 only.
        let terms = [1u64, 2];
        assert!(terms
            .iter()
            .tuple_combinations()
            .all(|(&a, &b)| color_pair(a, b) != Ok(2)));
    }

    #[test]
    fn refinement_examples() {
        for (n, bound) in [(2, 20), (3, 15), (2, 3)] {
            let r = verify_refinement(n, bound).unwrap();
            assert!(r.passed());
        }
        assert_eq!(verify_refinement(2, 3).unwrap().checked, 1);
        assert_eq!(verify_refinement(2, 2).unwrap().checked, 0);
    }

    fn sets(parts: &[&[u64]]) -> Vec<NatSet> {
        parts
            .iter()
            .map(|p| NatSet::from_u64s(p.iter().copied()).unwrap())
            .collect()
    }

    #[test]
    fn mono_ap_examples() {
        let odds_evens = sets(&[&[1, 3, 5, 7, 9], &[2, 4, 6, 8]]);
        let ap = find_mono_ap(&odds_evens, 3).unwrap().unwrap();
        let class = &odds_evens[ap.class];
        assert!(ap.terms().iter().all(|&t| class.contains(&nat(t))));
        assert_eq!(ap.terms(), vec![1, 3, 5]);

        let one = sets(&[&[1, 2, 3, 4, 5, 6, 7, 8, 9]]);
        assert_eq!(
            find_mono_ap(&one, 4).unwrap().unwrap().terms(),
            vec![1, 2, 3, 4]
        );
        assert_eq!(find_mono_ap(&sets(&[&[1], &[2]]), 2).unwrap(), None);
        assert!(find_mono_ap(&sets(&[&[1], &[3]]), 2).is_err());
        assert!(find_mono_ap(&sets(&[&[1, 2], &[2]]), 2).is_err());
    }

    #[test]
    fn van_der_waerden_three_over_nine() {
        // W(2,3) = 9: every 2-coloring of {1..9} has a monochromatic 3-AP,
        // and some coloring of {1..8} has none.
        for mask in 0u32..1 << 9 {
            let parts = (0..2)
                .map(|c| {
                    (1..=9u64)
                        .filter(|&x| (mask >> (x - 1) & 1) as usize == c)
                        .map(nat)
                        .collect()
                })
                .collect::<Vec<NatSet>>();
            assert!(find_mono_ap(&parts, 3).unwrap().is_some());
        }
        let free = (0u32..1 << 8).any(|mask| {
            let parts = (0..2)
                .map(|c| {
                    (1..=8u64)
                        .filter(|&x| (mask >> (x - 1) & 1) as usize == c)
                        .map(nat)
                        .collect()
                })
                .collect::<Vec<NatSet>>();
            find_mono_ap(&parts, 3).unwrap().is_none()
        });
        assert!(free);
    }

    fn params(n: usize, k: u32, m: usize) -> ThickParams {
        ThickParams::new(n, k, m).unwrap()
    }

    /// Thickness by materializing `B^(n)` and classifying every product.
    fn thick_oracle(a: &NatSet, p: ThickParams) -> bool {
        let elems: Vec<Nat> = a.iter().cloned().collect();
        let s = elems.len();
        let mut labels = vec![0usize; s];
        loop {
            let used = labels.iter().max().map_or(0, |m| m + 1);
            if used <= p.m_max
                && labels
                    .iter()
                    .enumerate()
                    .all(|(i, &l)| l <= labels[..i].iter().max().map_or(0, |m| m + 1))
            {
                let some_rich = (0..used).any(|part| {
                    let b: NatSet = (0..s)
                        .filter(|&t| labels[t] == part)
                        .map(|t| elems[t].clone())
                        .collect();
                    let classes: Vec<u32> = coprime_power(&b, p.n as u32)
                        .unwrap()
                        .iter()
                        .map(|x| class_of(p.n, x).unwrap())
                        .collect();
                    (1..=p.k_max).all(|k| classes.contains(&k))
                });
                if !some_rich {
                    return false;
                }
            }
            // Odometer over all labelings in {0..m_max}^s.
            let mut t = 0;
            loop {
                if t == s {
                    return true;
                }
                labels[t] += 1;
                if labels[t] < p.m_max {
                    break;
                }
                labels[t] = 0;
                t += 1;
            }
        }
    }

    #[test]
    fn thick_examples() {
        let g = PartitionGuard::default();
        assert!(
            !is_thick_bounded(&NatSet::new(), params(2, 1, 1), g)
                .unwrap()
                .thick
        );
        let two = NatSet::from_u64s([2]).unwrap();
        for k in 1..=3 {
            assert!(!is_thick_bounded(&two, params(2, k, 2), g).unwrap().thick);
        }
        let first8 = first_primes(8);
        let meets = coprime_power(&first8, 2)
            .unwrap()
            .iter()
            .any(|x| class_of(2, x).unwrap() == 1);
        assert_eq!(
            is_thick_bounded(&first8, params(2, 1, 1), g).unwrap().thick,
            meets
        );
        assert!(meets);
    }

    #[test]
    fn thick_guards() {
        let g = PartitionGuard::default();
        assert!(matches!(
            is_thick_bounded(&first_primes(13), params(2, 1, 1), g),
            Err(Error::Guard { .. })
        ));
        assert!(matches!(
            is_thick_bounded(&first_primes(5), params(2, 1, 4), g),
            Err(Error::Guard { .. })
        ));
        assert!(is_thick_bounded(
            &first_primes(5),
            params(2, 1, 4),
            PartitionGuard::unlimited()
        )
        .is_ok());
        assert!(is_thick_bounded(&NatSet::from_u64s([4]).unwrap(), params(2, 1, 1), g).is_err());
    }

    #[test]
    fn witnesses_refute() {
        let g = PartitionGuard::default();
        let a = first_primes(10);
        for n in 2..=3 {
            for k in 1..=3 {
                for m in 1..=3 {
                    let p = params(n, k, m);
                    let v = is_thick_bounded(&a, p, g).unwrap();
                    if let Some(w) = v.witness {
                        let parts: Vec<NatSet> = w.into_iter().map(|w| w.part).collect();
                        assert!(is_refuting_partition(&a, &parts, p).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn thick_lemma_harness() {
        let r = check_thick_lemmas(100, 7).unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn coloring_from_set_examples() {
        let a = NatSet::from_u64s([3, 5]).unwrap();
        let c = coloring_from_set(&NatSet::from_u64s([15]).unwrap(), &a, 2);
        assert_eq!(c.color(&[nat(3), nat(5)]), Some(0));
        let a = first_primes(5);
        let c = coloring_from_set(&NatSet::new(), &a, 2);
        assert!(c.colors.values().all(|&v| v == 1));
        let c = coloring_from_set(&coprime_power(&a, 2).unwrap(), &a, 2);
        assert!(c.colors.values().all(|&v| v == 0));
    }

    #[test]
    fn monochromatic_examples() {
        let a = first_primes(6);
        let m = find_monochromatic(&a, 2, |_| 1, 6).unwrap().unwrap();
        assert_eq!(m.set, a);
        let small = NatSet::from_u64s([2, 3]).unwrap();
        assert_eq!(find_monochromatic(&small, 2, |_| 0, 3).unwrap(), None);
        assert!(find_monochromatic(&small, 3, |_| 0, 2).is_err());
    }

    #[test]
    fn every_pair_coloring_of_six_has_a_mono_triple() {
        let a = first_primes(6);
        let pairs: Vec<Nat> = coprime_power(&a, 2).unwrap().into_iter().collect();
        assert_eq!(pairs.len(), 15);
        for mask in 0u32..1 << 15 {
            let s: NatSet = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, x)| x.clone())
                .collect();
            assert!(ramsey_bridge(&s, &a, 2, 3).unwrap().is_some());
        }
    }

    proptest! {
        #[test]
        fn pair_color_properties(a in 1u64..1 << 40, b in 1u64..1 << 40) {
            prop_assume!(a != b);
            let c = color_pair(a, b).unwrap();
            prop_assert!(c >= 1);
            prop_assert_eq!(Ok(c), color_pair(b, a));
            let i = a.div_ceil(2);
            prop_assert_eq!(color_pair(2 * i - 1, 2 * i), Ok(1));
        }

        #[test]
        fn refinement_by_larger_prime(mut idx in proptest::collection::btree_set(1u64..60, 3..6), extra in 1u64..30) {
            let idx: Vec<u64> = std::mem::take(&mut idx).into_iter().collect();
            let n = idx.len();
            let x: Nat = idx.iter().map(|&i| nth_prime(i).unwrap()).product();
            let q = nth_prime(idx[n - 1] + extra).unwrap();
            prop_assert_eq!(class_of(n + 1, &x.mul(&q)).unwrap(), class_of(n, &x).unwrap());
        }

        #[test]
        fn pruned_search_matches_oracle(
            idx in proptest::collection::btree_set(1u64..20, 0..7),
            n in 2usize..4, k in 1u32..4, m in 1usize..4
        ) {
            let a: NatSet = idx.into_iter().map(|i| nth_prime(i).unwrap()).collect();
            let p = params(n, k, m);
            let v = is_thick_bounded(&a, p, PartitionGuard::default()).unwrap();
            prop_assert_eq!(v.thick, thick_oracle(&a, p));
        }
    }
}
