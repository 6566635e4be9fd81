//! Factorization patterns: finitely supported maps from basic powers
//! `(label, k)` to multiplicities, with the domination order, pattern
//! addition, the finite families `S_α` generated from a prime assignment,
//! and the constructive witness / extension procedures.
//!
//! A pattern `{(p,1)x2, (q,3)x1}` describes numbers built from two distinct
//! primes taken from the set assigned to `p` and the cube of one prime from
//! the set assigned to `q`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::arith::{self, up_closure};
use crate::error::{Error, Result};
use crate::nat::{Nat, NatSet};

/// Default refusal threshold for [`generate_falpha`].
pub const FALPHA_LIMIT: u128 = 1_000_000;

/// Identifies a prime ultrafilter slot in a pattern: either a concrete prime
/// or an abstract symbol. Labels only ever compare by equality; the derived
/// order exists for deterministic iteration.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PrimeLabel {
    Prime(Nat),
    Symbol(String),
}

impl PrimeLabel {
    pub fn symbol(name: &str) -> PrimeLabel {
        PrimeLabel::Symbol(name.to_string())
    }
}

impl fmt::Display for PrimeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrimeLabel::Prime(p) => write!(f, "{p}"),
            PrimeLabel::Symbol(s) => f.write_str(s),
        }
    }
}

impl Serialize for PrimeLabel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl FromStr for PrimeLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::Parse("empty label".into()));
        }
        if s.chars().all(|c| c.is_ascii_digit()) {
            let p: Nat = s.parse()?;
            if !arith::is_prime(&p) {
                return Err(Error::Parse(format!("numeric label {p} is not prime")));
            }
            return Ok(PrimeLabel::Prime(p));
        }
        if !s
            .chars()
            .all(|c| c.is_alphanumeric() || c == '_' || c == '\'')
        {
            return Err(Error::Parse(format!("bad label {s:?}")));
        }
        Ok(PrimeLabel::Symbol(s.to_string()))
    }
}

/// The sequence `⟨x_1, x_2, …⟩` of multiplicities of `p^1, p^2, …` in a
/// pattern. Stored without trailing zeros.
#[derive(Clone, Default, PartialEq, Eq, Hash, Serialize)]
pub struct ExpSequence(Vec<u64>);

impl ExpSequence {
    pub fn new(mut seq: Vec<u64>) -> ExpSequence {
        while seq.last() == Some(&0) {
            seq.pop();
        }
        ExpSequence(seq)
    }

    /// `x_k` for `k >= 1`; zero outside the support.
    pub fn get(&self, k: u32) -> u64 {
        if k == 0 {
            return 0;
        }
        self.0.get(k as usize - 1).copied().unwrap_or(0)
    }

    /// Highest `k` with `x_k > 0`, or 0 for the zero sequence.
    pub fn top(&self) -> u32 {
        self.0.len() as u32
    }

    /// `Σ_{k >= m} x_k`.
    pub fn tail_sum(&self, m: u32) -> u64 {
        let start = m.max(1) as usize - 1;
        self.0.iter().skip(start).sum()
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }

    /// True iff `self` dominates `x`: every tail sum of `x` is at most the
    /// corresponding tail sum of `self`.
    pub fn dominates(&self, x: &ExpSequence) -> bool {
        first_violation(x, self).is_none()
    }
}

impl fmt::Debug for ExpSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for ExpSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("<")?;
        for x in &self.0 {
            write!(f, "{x},")?;
        }
        f.write_str("0,...>")
    }
}

/// `dominates(y, x)`: `y` dominates `x`.
pub fn dominates(y: &ExpSequence, x: &ExpSequence) -> bool {
    y.dominates(x)
}

/// Least `m` with `Σ_{k>=m} x_k > Σ_{k>=m} y_k`.
fn first_violation(x: &ExpSequence, y: &ExpSequence) -> Option<u32> {
    let top = x.top().max(y.top());
    (1..=top).find(|&m| x.tail_sum(m) > y.tail_sum(m))
}

/// A factorization pattern.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Pattern {
    entries: BTreeMap<(PrimeLabel, u32), u64>,
}

impl Pattern {
    pub fn new() -> Pattern {
        Pattern::default()
    }

    /// Builds a pattern from `(label, exponent, multiplicity)` triples,
    /// summing repeated keys and dropping zero multiplicities.
    pub fn from_entries<I>(entries: I) -> Result<Pattern>
    where
        I: IntoIterator<Item = (PrimeLabel, u32, u64)>,
    {
        let mut p = Pattern::new();
        for (label, k, n) in entries {
            p.add_entry(label, k, n)?;
        }
        Ok(p)
    }

    pub fn add_entry(&mut self, label: PrimeLabel, exponent: u32, multiplicity: u64) -> Result<()> {
        if exponent == 0 {
            return Err(Error::InvalidArgument(
                "pattern exponents start at 1".into(),
            ));
        }
        if multiplicity > 0 {
            *self.entries.entry((label, exponent)).or_default() += multiplicity;
        }
        Ok(())
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `(label, exponent, multiplicity)` in label-then-exponent order.
    pub fn entries(&self) -> impl Iterator<Item = (&PrimeLabel, u32, u64)> {
        self.entries.iter().map(|((l, k), &n)| (l, *k, n))
    }

    pub fn multiplicity(&self, label: &PrimeLabel, exponent: u32) -> u64 {
        self.entries
            .get(&(label.clone(), exponent))
            .copied()
            .unwrap_or(0)
    }

    pub fn labels(&self) -> BTreeSet<&PrimeLabel> {
        self.entries.keys().map(|(l, _)| l).collect()
    }

    /// `σ(α) = Σ k·n`.
    pub fn sigma(&self) -> u64 {
        self.entries
            .iter()
            .map(|((_, k), n)| u64::from(*k) * n)
            .sum()
    }

    /// `α↾p`.
    pub fn restrict(&self, label: &PrimeLabel) -> ExpSequence {
        let mut seq = Vec::new();
        for ((l, k), &n) in &self.entries {
            if l == label {
                let idx = *k as usize - 1;
                if seq.len() <= idx {
                    seq.resize(idx + 1, 0);
                }
                seq[idx] = n;
            }
        }
        ExpSequence::new(seq)
    }

    /// Number of distinct primes a member of `S_α` draws from `label`'s set.
    pub fn primes_needed(&self, label: &PrimeLabel) -> u64 {
        self.entries
            .iter()
            .filter(|((l, _), _)| l == label)
            .map(|(_, &n)| n)
            .sum()
    }

    /// Exponents drawn from `label`, with multiplicity, largest first.
    pub fn exponent_list(&self, label: &PrimeLabel) -> Vec<u32> {
        let mut out = Vec::new();
        for ((l, k), &n) in self.entries.iter().rev() {
            if l == label {
                out.extend(std::iter::repeat_n(*k, n as usize));
            }
        }
        out
    }

    /// `α ≤ β`: for every label, `β↾p` dominates `α↾p`.
    pub fn is_leq(&self, other: &Pattern) -> bool {
        self.violation(other).is_none()
    }

    /// First label (in label order) and least threshold at which `other`
    /// fails to dominate `self`.
    fn violation(&self, other: &Pattern) -> Option<(PrimeLabel, u32)> {
        let labels: BTreeSet<&PrimeLabel> = self.labels().union(&other.labels()).copied().collect();
        labels.into_iter().find_map(|l| {
            first_violation(&self.restrict(l), &other.restrict(l)).map(|m| (l.clone(), m))
        })
    }

    /// `α + β`: entrywise sum of multiplicities.
    pub fn add(&self, other: &Pattern) -> Pattern {
        let mut out = self.clone();
        for (key, &n) in &other.entries {
            *out.entries.entry(key.clone()).or_default() += n;
        }
        out
    }

    /// The pattern of a concrete number: one entry `(q, e, 1)` per `q^e` in
    /// its factorization, labelled by the prime itself.
    pub fn of_number(n: &Nat) -> Pattern {
        let entries = arith::factorize(n)
            .iter()
            .map(|(q, e)| ((PrimeLabel::Prime(q.clone()), e), 1))
            .collect();
        Pattern { entries }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return f.write_str("{}");
        }
        for (i, ((l, k), n)) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "({l},{k})x{n}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Pattern[{self}]")
    }
}

impl Serialize for Pattern {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Parses `(label,exponent)xmultiplicity` entries separated by commas.
/// The `xmultiplicity` suffix is optional and defaults to 1; `{}` or an
/// empty string is the empty pattern.
impl FromStr for Pattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut pattern = Pattern::new();
        if s.is_empty() || s == "{}" {
            return Ok(pattern);
        }
        let mut rest = s;
        loop {
            rest = rest.trim_start();
            let body = rest
                .strip_prefix('(')
                .ok_or_else(|| Error::Parse(format!("expected '(' at {rest:?}")))?;
            let close = body
                .find(')')
                .ok_or_else(|| Error::Parse(format!("unclosed entry in {s:?}")))?;
            let (label, exp) = body[..close].split_once(',').ok_or_else(|| {
                Error::Parse(format!("entry {:?} needs label,exponent", &body[..close]))
            })?;
            let label: PrimeLabel = label.parse()?;
            let exp: u32 = exp
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad exponent {exp:?}")))?;
            rest = body[close + 1..].trim_start();
            let mut mult = 1u64;
            if let Some(after) = rest.strip_prefix(['x', '*']) {
                let end = after.find(',').unwrap_or(after.len());
                mult = after[..end]
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad multiplicity {:?}", &after[..end])))?;
                rest = &after[end..];
            }
            pattern.add_entry(label, exp, mult)?;
            rest = rest.trim_start();
            if rest.is_empty() {
                break;
            }
            rest = rest
                .strip_prefix(',')
                .ok_or_else(|| Error::Parse(format!("expected ',' at {rest:?}")))?;
        }
        Ok(pattern)
    }
}

/// Sorted multiset of exponents of `n`, largest first; identifies which
/// class of `L_Ω(n)` the number lies in.
pub fn shape_class(n: &Nat) -> Result<Vec<u32>> {
    if n.is_one() {
        return Err(Error::Unit);
    }
    Ok(arith::factorize(n).shape())
}

/// Renders a shape like `[2,1,1]` as `P^2P^(2)`.
pub fn shape_name(shape: &[u32]) -> String {
    let mut out = String::new();
    let mut i = 0;
    while i < shape.len() {
        let k = shape[i];
        let count = shape[i..].iter().take_while(|&&e| e == k).count();
        out.push_str(&match (k, count) {
            (1, 1) => "P".to_string(),
            (1, c) => format!("P^({c})"),
            (k, 1) => format!("P^{k}"),
            (k, c) => format!("(P^{k})^({c})"),
        });
        i += count;
    }
    out
}

/// Label → finite set of primes; sets of distinct labels are disjoint.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PrimeAssignment {
    sets: BTreeMap<PrimeLabel, NatSet>,
    #[serde(skip)]
    owner: BTreeMap<Nat, PrimeLabel>,
}

impl PrimeAssignment {
    pub fn new() -> PrimeAssignment {
        PrimeAssignment::default()
    }

    pub fn from_sets<I>(sets: I) -> Result<PrimeAssignment>
    where
        I: IntoIterator<Item = (PrimeLabel, NatSet)>,
    {
        let mut asg = PrimeAssignment::new();
        for (label, set) in sets {
            asg.assign(label, set)?;
        }
        Ok(asg)
    }

    /// Assigns `primes` to `label`. Fails if any element is not prime, if
    /// the label is already assigned, or if the set meets another label's.
    pub fn assign(&mut self, label: PrimeLabel, primes: NatSet) -> Result<()> {
        if self.sets.contains_key(&label) {
            return Err(Error::InvalidAssignment(format!(
                "label {label} assigned twice"
            )));
        }
        for p in &primes {
            if !arith::is_prime(p) {
                return Err(Error::InvalidAssignment(format!("{p} is not prime")));
            }
            if let Some(other) = self.owner.get(p) {
                return Err(Error::InvalidAssignment(format!(
                    "{p} is assigned to both {other} and {label}"
                )));
            }
        }
        for p in &primes {
            self.owner.insert(p.clone(), label.clone());
        }
        self.sets.insert(label, primes.into_iter().collect());
        Ok(())
    }

    pub fn get(&self, label: &PrimeLabel) -> Option<&NatSet> {
        self.sets.get(label)
    }

    pub fn label_of(&self, prime: &Nat) -> Option<&PrimeLabel> {
        self.owner.get(prime)
    }

    pub fn labels(&self) -> impl Iterator<Item = &PrimeLabel> {
        self.sets.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PrimeLabel, &NatSet)> {
        self.sets.iter()
    }

    fn require(&self, label: &PrimeLabel) -> Result<&NatSet> {
        self.sets
            .get(label)
            .ok_or_else(|| Error::UnassignedLabel(label.to_string()))
    }
}

impl fmt::Display for PrimeAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (l, set)) in self.sets.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{l}:")?;
            for (j, p) in set.iter().enumerate() {
                if j > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{p}")?;
            }
        }
        Ok(())
    }
}

/// Parses `label:prime,prime,…` groups separated by `;`.
impl FromStr for PrimeAssignment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut asg = PrimeAssignment::new();
        for group in s.split(';').map(str::trim).filter(|g| !g.is_empty()) {
            let (label, primes) = group
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("group {group:?} needs label:primes")))?;
            let set = primes
                .split(',')
                .map(str::trim)
                .filter(|p| !p.is_empty())
                .map(Nat::from_str)
                .collect::<Result<NatSet>>()?;
            asg.assign(label.parse()?, set)?;
        }
        Ok(asg)
    }
}

fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * u128::from(n - i) / u128::from(i + 1))
}

/// `|S_α|` under `asg`, or the first assignment error.
pub fn falpha_size(alpha: &Pattern, asg: &PrimeAssignment) -> Result<u128> {
    let mut total: u128 = 1;
    for label in alpha.labels() {
        let available = asg.require(label)?.len() as u64;
        let needed = alpha.primes_needed(label);
        if needed > available {
            return Err(Error::InsufficientPrimes {
                label: label.to_string(),
                needed: needed as usize,
                available: available as usize,
            });
        }
        let mut left = available;
        for (l, _, n) in alpha.entries() {
            if l == label {
                total = total.saturating_mul(binomial(left, n));
                left -= n;
            }
        }
    }
    Ok(total)
}

/// Products for one label: choose `n_1` primes for exponent `k_1`, then
/// `n_2` of the remaining for `k_2`, and so on.
fn label_products(groups: &[(u32, u64)], primes: &[Nat]) -> Vec<Nat> {
    fn go(
        groups: &[(u32, u64)],
        free: &mut Vec<bool>,
        primes: &[Nat],
        start: usize,
        left_in_group: u64,
        acc: Nat,
        out: &mut Vec<Nat>,
    ) {
        let Some(&(k, _)) = groups.first() else {
            out.push(acc);
            return;
        };
        if left_in_group == 0 {
            let next_left = groups.get(1).map_or(0, |g| g.1);
            go(&groups[1..], free, primes, 0, next_left, acc, out);
            return;
        }
        for i in start..primes.len() {
            if free[i] {
                free[i] = false;
                go(
                    groups,
                    free,
                    primes,
                    i + 1,
                    left_in_group - 1,
                    acc.mul(&primes[i].pow(k)),
                    out,
                );
                free[i] = true;
            }
        }
    }
    let mut out = Vec::new();
    let mut free = vec![true; primes.len()];
    let first = groups.first().map_or(0, |g| g.1);
    go(groups, &mut free, primes, 0, first, Nat::ONE, &mut out);
    out
}

/// `S_α`: the member of `F_α` built from `asg`, i.e. all products
/// `Π a_{i,j}^{k_i}` with every chosen prime distinct and drawn from its
/// label's set. The empty pattern yields `{1}`.
pub fn generate_falpha(alpha: &Pattern, asg: &PrimeAssignment) -> Result<NatSet> {
    generate_falpha_limited(alpha, asg, FALPHA_LIMIT)
}

pub fn generate_falpha_limited(
    alpha: &Pattern,
    asg: &PrimeAssignment,
    limit: u128,
) -> Result<NatSet> {
    let size = falpha_size(alpha, asg)?;
    if size > limit {
        return Err(Error::Guard {
            what: "F_alpha generation",
            size,
            limit,
        });
    }
    let mut acc = vec![Nat::ONE];
    for label in alpha.labels() {
        let primes: Vec<Nat> = asg.require(label)?.iter().cloned().collect();
        let groups: Vec<(u32, u64)> = alpha
            .entries()
            .filter(|(l, _, _)| *l == label)
            .map(|(_, k, n)| (k, n))
            .collect();
        let parts = label_products(&groups, &primes);
        acc = acc
            .iter()
            .flat_map(|a| parts.iter().map(move |b| a.mul(b)))
            .collect();
    }
    Ok(acc.into_iter().collect())
}

/// Membership in `S_α` without materializing it.
pub fn falpha_contains(alpha: &Pattern, asg: &PrimeAssignment, n: &Nat) -> bool {
    let mut found: BTreeMap<&PrimeLabel, Vec<u32>> = BTreeMap::new();
    for (p, e) in arith::factorize(n).iter() {
        match asg.label_of(p) {
            Some(label) => found.entry(label).or_default().push(e),
            None => return false,
        }
    }
    let labels = alpha.labels();
    if found.keys().any(|l| !labels.contains(l)) {
        return false;
    }
    labels.into_iter().all(|label| {
        let mut have = found.remove(label).unwrap_or_default();
        have.sort_unstable_by(|a, b| b.cmp(a));
        have == alpha.exponent_list(label)
    })
}

/// Evidence that `α ≤ β` fails: a label, a threshold `m`, and generators
/// `G = (A^m)^(x_m)…(A^n)^(x_n)` whose up-closure contains all of `S_α` but
/// meets nothing in `S_β`.
#[derive(Clone, Debug, Serialize)]
pub struct WitnessCertificate {
    pub label: PrimeLabel,
    pub threshold: u32,
    pub top: u32,
    /// Tail sum of `α↾p` from the threshold.
    pub u: u64,
    /// Tail sum of `β↾p` from the threshold; `u > v`.
    pub v: u64,
    pub generators: NatSet,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upset: Option<NatSet>,
    pub alpha_size: usize,
    pub beta_size: usize,
    /// (i): every element of `S_α` has a divisor in `G`.
    pub alpha_covered: bool,
    /// (ii): no element of `S_β` has a divisor in `G`.
    pub beta_avoided: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub uncovered: Option<Nat>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hit: Option<Nat>,
}

impl WitnessCertificate {
    pub fn is_valid(&self) -> bool {
        self.alpha_covered && self.beta_avoided && self.u > self.v
    }
}

/// Separating witness for a non-dominated pair. The label is the first in
/// label order that violates domination, and the threshold is the least
/// violating `m`. When `window` is given the up-closure `G↑ ∩ {1..W}` is
/// materialized too.
pub fn witness_set(
    alpha: &Pattern,
    beta: &Pattern,
    asg: &PrimeAssignment,
    window: Option<&Nat>,
) -> Result<WitnessCertificate> {
    let (label, threshold) = alpha.violation(beta).ok_or(Error::NoWitness)?;
    let x = alpha.restrict(&label);
    let y = beta.restrict(&label);
    let top = x.top().max(y.top());
    let mut tail = Pattern::new();
    for k in threshold..=top {
        tail.add_entry(label.clone(), k, x.get(k))?;
    }
    let generators = generate_falpha(&tail, asg)?;
    let s_alpha = generate_falpha(alpha, asg)?;
    let s_beta = generate_falpha(beta, asg)?;

    let has_generator = |n: &Nat| generators.iter().any(|g| g.divides(n));
    let uncovered = s_alpha.iter().find(|a| !has_generator(a)).cloned();
    let hit = s_beta.iter().find(|b| has_generator(b)).cloned();
    let upset = window.map(|w| up_closure(&generators, w)).transpose()?;

    Ok(WitnessCertificate {
        label,
        threshold,
        top,
        u: x.tail_sum(threshold),
        v: y.tail_sum(threshold),
        generators,
        upset,
        alpha_size: s_alpha.len(),
        beta_size: s_beta.len(),
        alpha_covered: uncovered.is_none(),
        beta_avoided: hit.is_none(),
        uncovered,
        hit,
    })
}

/// Given `α ≤ β` and `l ∈ S_α`, builds `l' ∈ S_β` with `l | l'`.
///
/// Per label, the primes of `l` are sorted by exponent (largest first) and
/// raised to the largest exponents of `β` in the same order; the remaining
/// exponents of `β` go to the smallest unused primes of the label's set.
pub fn extend_divisible(
    l: &Nat,
    alpha: &Pattern,
    beta: &Pattern,
    asg: &PrimeAssignment,
) -> Result<Nat> {
    if !alpha.is_leq(beta) {
        return Err(Error::NotDominated);
    }
    if !falpha_contains(alpha, asg, l) {
        return Err(Error::NotInFamily(l.clone()));
    }
    let fact = arith::factorize(l);
    let mut out = Nat::ONE;
    for label in beta.labels() {
        let set = asg.require(label)?;
        let mut present: Vec<(u32, &Nat)> = fact
            .iter()
            .filter(|(p, _)| set.contains(p))
            .map(|(p, e)| (e, p))
            .collect();
        present.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(b.1)));
        let targets = beta.exponent_list(label);
        let fresh_needed = targets.len().saturating_sub(present.len());
        let fresh: Vec<&Nat> = set
            .iter()
            .filter(|p| fact.exponent(p) == 0)
            .take(fresh_needed)
            .collect();
        if fresh.len() < fresh_needed || targets.len() < present.len() {
            return Err(Error::InsufficientPrimes {
                label: label.to_string(),
                needed: targets.len(),
                available: set.len(),
            });
        }
        let chosen = present
            .iter()
            .map(|&(e, p)| (Some(e), p))
            .chain(fresh.into_iter().map(|p| (None, p)));
        for (&target, (had, p)) in targets.iter().zip(chosen) {
            debug_assert!(had.is_none_or(|e| e <= target));
            out = out.mul(&p.pow(target));
        }
    }
    debug_assert!(l.divides(&out));
    debug_assert!(falpha_contains(beta, asg, &out));
    Ok(out)
}

/// Every pattern over `labels` with `σ <= sigma_max`.
pub fn enumerate_patterns(labels: &[PrimeLabel], sigma_max: u64) -> Vec<Pattern> {
    fn partitions(n: u64, max_part: u64) -> Vec<Vec<u64>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for part in (1..=max_part.min(n)).rev() {
            for mut rest in partitions(n - part, part) {
                rest.insert(0, part);
                out.push(rest);
            }
        }
        out
    }
    let mut out = vec![Pattern::new()];
    for label in labels {
        let mut next = Vec::new();
        for base in &out {
            let used = base.sigma();
            for s in 0..=sigma_max - used {
                for parts in partitions(s, s) {
                    let mut p = base.clone();
                    for k in parts {
                        p.add_entry(label.clone(), k as u32, 1).expect("k >= 1");
                    }
                    next.push(p);
                }
            }
        }
        out = next;
    }
    out
}
