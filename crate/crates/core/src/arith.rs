//! Divisor-lattice primitives: factorization, closures under divisibility,
//! quotient sets and the coprime products `AB`, `A^(n)`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::nat::{Nat, NatSet};

pub const DEFAULT_SIEVE_BOUND: u32 = 1_000_000;

/// Upper bound on the number of elements an operation may materialize.
pub const MATERIALIZE_LIMIT: u128 = 10_000_000;

/// Smallest-prime-factor sieve up to a fixed bound.
pub struct PrimeTable {
    spf: Vec<u32>,
    primes: Vec<u64>,
}

impl PrimeTable {
    pub fn new(bound: u32) -> PrimeTable {
        let bound = bound.max(2) as usize;
        let mut spf = vec![0u32; bound + 1];
        let mut primes = Vec::new();
        for i in 2..=bound {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u64);
            }
            let p_i = spf[i];
            for &p in &primes {
                let m = p as usize * i;
                if p as u32 > p_i || m > bound {
                    break;
                }
                spf[m] = p as u32;
            }
        }
        PrimeTable { spf, primes }
    }

    pub fn bound(&self) -> u64 {
        (self.spf.len() - 1) as u64
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn is_prime_u64(&self, n: u64) -> bool {
        if n <= self.bound() {
            n >= 2 && u64::from(self.spf[n as usize]) == n
        } else {
            miller_rabin_u64(n)
        }
    }

    pub fn is_prime(&self, n: &Nat) -> bool {
        match n.to_u64() {
            Some(v) => self.is_prime_u64(v),
            None => miller_rabin_big(&n.to_biguint()),
        }
    }

    /// Exact factorization as `(prime, exponent)` pairs of a `u64`.
    pub fn factorize_u64(&self, mut n: u64) -> Vec<(u64, u32)> {
        let mut out: BTreeMap<u64, u32> = BTreeMap::new();
        if n <= self.bound() {
            while n > 1 {
                let p = u64::from(self.spf[n as usize]);
                n /= p;
                *out.entry(p).or_default() += 1;
            }
            return out.into_iter().collect();
        }
        for &p in &self.primes {
            if p * p > n {
                break;
            }
            while n.is_multiple_of(p) {
                n /= p;
                *out.entry(p).or_default() += 1;
            }
            if n <= self.bound() {
                break;
            }
        }
        let mut stack = vec![n];
        while let Some(m) = stack.pop() {
            if m == 1 {
                continue;
            }
            if m <= self.bound() {
                for (p, e) in self.factorize_u64(m) {
                    *out.entry(p).or_default() += e;
                }
            } else if miller_rabin_u64(m) {
                *out.entry(m).or_default() += 1;
            } else if let Some((root, k)) = perfect_power_u64(m) {
                stack.extend(std::iter::repeat_n(root, k as usize));
            } else {
                let d = pollard_brent_u64(m);
                stack.push(d);
                stack.push(m / d);
            }
        }
        out.into_iter().collect()
    }

    pub fn factorize(&self, n: &Nat) -> Factorization {
        if let Some(v) = n.to_u64() {
            let entries = self
                .factorize_u64(v)
                .into_iter()
                .map(|(p, e)| (Nat::new(p).expect("prime"), e))
                .collect();
            return Factorization { entries };
        }
        let mut big = n.to_biguint();
        let mut entries: BTreeMap<Nat, u32> = BTreeMap::new();
        for &p in &self.primes {
            let bp = BigUint::from(p);
            if &bp * &bp > big {
                break;
            }
            loop {
                let (q, r) = big.div_rem(&bp);
                if !r.is_zero() {
                    break;
                }
                big = q;
                *entries.entry(Nat::new(p).expect("prime")).or_default() += 1;
            }
        }
        let mut stack = vec![big];
        while let Some(m) = stack.pop() {
            if m.is_one() {
                continue;
            }
            if let Some(small) = m.to_u64() {
                for (p, e) in self.factorize_u64(small) {
                    *entries.entry(Nat::new(p).expect("prime")).or_default() += e;
                }
            } else if miller_rabin_big(&m) {
                *entries
                    .entry(Nat::from_biguint(m).expect("nonzero"))
                    .or_default() += 1;
            } else if let Some((root, k)) = perfect_power_big(&m) {
                stack.extend(std::iter::repeat_n(root, k as usize));
            } else {
                let d = pollard_brent_big(&m);
                let q = &m / &d;
                stack.push(d);
                stack.push(q);
            }
        }
        Factorization { entries }
    }

    /// The i-th prime, 1-based (`p_1 = 2`).
    pub fn nth_prime_u64(&self, i: u64) -> Option<u64> {
        if i == 0 {
            return None;
        }
        if let Some(&p) = self.primes.get(i as usize - 1) {
            return Some(p);
        }
        let mut count = self.primes.len() as u64;
        let mut candidate = self.bound() + 1;
        loop {
            if miller_rabin_u64(candidate) {
                count += 1;
                if count == i {
                    return Some(candidate);
                }
            }
            candidate += 1;
        }
    }

    /// Index of `p` in the increasing enumeration of primes, `None` if not prime.
    pub fn prime_index_u64(&self, p: u64) -> Option<u64> {
        if !self.is_prime_u64(p) {
            return None;
        }
        if p <= self.bound() {
            return self.primes.binary_search(&p).ok().map(|i| i as u64 + 1);
        }
        let beyond = (self.bound() + 1..=p)
            .filter(|&m| miller_rabin_u64(m))
            .count();
        Some(self.primes.len() as u64 + beyond as u64)
    }
}

/// The process-wide sieve with [`DEFAULT_SIEVE_BOUND`].
pub fn primes() -> &'static PrimeTable {
    static TABLE: OnceLock<PrimeTable> = OnceLock::new();
    TABLE.get_or_init(|| PrimeTable::new(DEFAULT_SIEVE_BOUND))
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

// Deterministic for all u64 with these bases.
const MR_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

fn miller_rabin_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &MR_BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

// Rho needs ~sqrt(p) steps on p^k, so perfect powers are split by roots first.
fn perfect_power_u64(n: u64) -> Option<(u64, u32)> {
    let bits = 64 - n.leading_zeros();
    (2..bits).rev().find_map(|k| {
        let r = BigUint::from(n).nth_root(k).to_u64()?;
        (r > 1 && r.checked_pow(k) == Some(n)).then_some((r, k))
    })
}

fn perfect_power_big(n: &BigUint) -> Option<(BigUint, u32)> {
    let bits = n.bits() as u32;
    (2..bits).rev().find_map(|k| {
        let r = n.nth_root(k);
        (r > BigUint::one() && &num_traits::pow(r.clone(), k as usize) == n).then_some((r, k))
    })
}

fn pollard_brent_u64(n: u64) -> u64 {
    if n.is_multiple_of(2) {
        return 2;
    }
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut y, mut r, mut q, m) = (2u64, 1u64, 1u64, 128u64);
        let mut g = 1u64;
        let mut x = y;
        let mut ys = y;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..m.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = q.gcd(&n);
                k += m;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = x.abs_diff(ys).gcd(&n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}

// Probabilistic beyond 3.3e24; no counterexample is known for these bases.
fn miller_rabin_big(n: &BigUint) -> bool {
    if let Some(v) = n.to_u64() {
        return miller_rabin_u64(v);
    }
    let one = BigUint::one();
    let n_minus_one = n - &one;
    let s = n_minus_one.trailing_zeros().unwrap_or(0);
    let d = &n_minus_one >> s;
    const BASES: [u64; 20] = [
        2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71,
    ];
    'witness: for &a in &BASES {
        let a = BigUint::from(a);
        if (n % &a).is_zero() {
            return false;
        }
        let mut x = a.modpow(&d, n);
        if x == one || x == n_minus_one {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&BigUint::from(2u32), n);
            if x == n_minus_one {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_brent_big(n: &BigUint) -> BigUint {
    let two = BigUint::from(2u32);
    if (n % &two).is_zero() {
        return two;
    }
    let mut c = BigUint::one();
    loop {
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut y = two.clone();
        let mut x = y.clone();
        let mut ys = y.clone();
        let mut q = BigUint::one();
        let mut g = BigUint::one();
        let mut r: u64 = 1;
        let m: u64 = 128;
        while g.is_one() {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g.is_one() {
                ys = y.clone();
                for _ in 0..m.min(r - k) {
                    y = f(&y);
                    let diff = if x > y { &x - &y } else { &y - &x };
                    q = (q * diff) % n;
                }
                g = q.gcd(n);
                k += m;
            }
            r *= 2;
        }
        if &g == n {
            loop {
                ys = f(&ys);
                let diff = if x > ys { &x - &ys } else { &ys - &x };
                g = diff.gcd(n);
                if !g.is_one() {
                    break;
                }
            }
        }
        if &g != n {
            return g;
        }
        c += 1u32;
    }
}

/// Prime factorization: prime → exponent (all exponents `>= 1`).
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Factorization {
    entries: BTreeMap<Nat, u32>,
}

impl Factorization {
    pub fn entries(&self) -> &BTreeMap<Nat, u32> {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Nat, u32)> {
        self.entries.iter().map(|(p, &e)| (p, e))
    }

    pub fn exponent(&self, p: &Nat) -> u32 {
        self.entries.get(p).copied().unwrap_or(0)
    }

    pub fn value(&self) -> Nat {
        self.entries.iter().map(|(p, &e)| p.pow(e)).product()
    }

    /// Ω: prime factors counted with multiplicity.
    pub fn level(&self) -> u64 {
        self.entries.values().map(|&e| u64::from(e)).sum()
    }

    pub fn distinct_primes(&self) -> usize {
        self.entries.len()
    }

    /// Exponents sorted in decreasing order.
    pub fn shape(&self) -> Vec<u32> {
        let mut ex: Vec<u32> = self.entries.values().copied().collect();
        ex.sort_unstable_by(|a, b| b.cmp(a));
        ex
    }

    /// Primes with multiplicity, ascending.
    pub fn prime_multiset(&self) -> Vec<Nat> {
        self.entries
            .iter()
            .flat_map(|(p, &e)| std::iter::repeat_n(p.clone(), e as usize))
            .collect()
    }

    /// True iff the number is a product of `n` distinct primes.
    pub fn is_squarefree_of_arity(&self, n: usize) -> bool {
        self.entries.len() == n && self.entries.values().all(|&e| e == 1)
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (p, e)) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{p}:{e}")?;
        }
        f.write_str("}")
    }
}

pub fn factorize(n: &Nat) -> Factorization {
    primes().factorize(n)
}

pub fn is_prime(n: &Nat) -> bool {
    primes().is_prime(n)
}

pub fn smallest_prime_factor(n: &Nat) -> Result<Nat> {
    if n.is_one() {
        return Err(Error::Unit);
    }
    if let Some(v) = n.to_u64() {
        let table = primes();
        if v <= table.bound() {
            return Ok(Nat::new(u64::from(table.spf[v as usize])).expect("prime"));
        }
    }
    Ok(factorize(n)
        .entries
        .into_keys()
        .next()
        .expect("n > 1 has a prime factor"))
}

/// Ω(n); `level_of(1) = 0`.
pub fn level_of(n: &Nat) -> u64 {
    factorize(n).level()
}

/// Product of the two smallest prime factors counted with multiplicity.
pub fn drop_to_two(n: &Nat) -> Result<Nat> {
    let f = factorize(n);
    if f.level() < 2 {
        return Err(Error::NotComposite(n.clone()));
    }
    let ps = f.prime_multiset();
    Ok(ps[0].mul(&ps[1]))
}

pub fn nth_prime(i: u64) -> Result<Nat> {
    primes()
        .nth_prime_u64(i)
        .map(|p| Nat::new(p).expect("prime"))
        .ok_or_else(|| Error::InvalidArgument("prime indices start at 1".into()))
}

/// Inverse of [`nth_prime`]; `None` when `p` is not prime.
pub fn prime_index(p: &Nat) -> Option<u64> {
    primes().prime_index_u64(p.to_u64()?)
}

/// The first `count` primes as a set.
pub fn first_primes(count: usize) -> NatSet {
    (1..=count as u64)
        .map(|i| nth_prime(i).expect("i >= 1"))
        .collect()
}

fn window_u64(w: &Nat) -> Result<u64> {
    w.to_u64().ok_or(Error::Guard {
        what: "window",
        size: u128::MAX,
        limit: MATERIALIZE_LIMIT,
    })
}

/// `A↑ ∩ {1..W}`: multiples of elements of `A` up to the window.
pub fn up_closure(a: &NatSet, window: &Nat) -> Result<NatSet> {
    let w = window_u64(window)?;
    let gens: Vec<u64> = a
        .iter()
        .filter_map(Nat::to_u64)
        .filter(|&x| x <= w)
        .collect();
    let estimate: u128 = gens.iter().map(|&g| u128::from(w / g)).sum();
    if estimate > MATERIALIZE_LIMIT {
        return Err(Error::Guard {
            what: "up-closure",
            size: estimate,
            limit: MATERIALIZE_LIMIT,
        });
    }
    let mut out = NatSet::windowed(window.clone());
    for g in gens {
        let mut m = g;
        while m <= w {
            out.insert(Nat::new(m).expect("nonzero"))?;
            m = match m.checked_add(g) {
                Some(next) => next,
                None => break,
            };
        }
    }
    Ok(out)
}

/// All divisors of `n`, ascending.
pub fn divisors(n: &Nat) -> Vec<Nat> {
    let mut divs = vec![Nat::ONE];
    for (p, e) in factorize(n).iter() {
        let current = divs.len();
        let mut pk = Nat::ONE;
        for _ in 0..e {
            pk = pk.mul(p);
            for i in 0..current {
                let d = divs[i].mul(&pk);
                divs.push(d);
            }
        }
    }
    divs.sort();
    divs
}

/// `A↓`: every divisor of every element of `A`.
pub fn down_closure(a: &NatSet) -> NatSet {
    a.iter().flat_map(divisors).collect()
}

/// `A/n = {m : mn ∈ A}`.
pub fn quotient_set(a: &NatSet, n: &Nat) -> NatSet {
    let mut out: NatSet = a.iter().filter_map(|x| x.checked_div_exact(n)).collect();
    if let Some(w) = a.window() {
        if let Ok(qw) = Nat::from_biguint(w.to_biguint() / n.to_biguint()) {
            out = out
                .with_window(qw)
                .expect("quotients stay in the scaled window");
        }
    }
    out
}

/// `AB = {ab : a ∈ A, b ∈ B, gcd(a, b) = 1}`.
pub fn coprime_product(a: &NatSet, b: &NatSet) -> NatSet {
    let mut out = NatSet::new();
    for x in a {
        for y in b {
            if x.is_coprime(y) {
                out.extend(std::iter::once(x.mul(y)));
            }
        }
    }
    out
}

/// `A^(n) = A·A·…·A` (n factors), i.e. products of n pairwise-coprime
/// elements of `A`.
pub fn coprime_power(a: &NatSet, n: u32) -> Result<NatSet> {
    if n == 0 {
        return Err(Error::InvalidArgument("coprime power needs n >= 1".into()));
    }
    let mut acc = a.clone();
    for _ in 1..n {
        acc = coprime_product(&acc, a);
    }
    Ok(acc.into_iter().collect())
}

/// `A^n = {a^n : a ∈ A}`; `A^0 = {1}`.
pub fn elementwise_power(a: &NatSet, n: u32) -> NatSet {
    if n == 0 {
        return std::iter::once(Nat::ONE).collect();
    }
    a.iter().map(|x| x.pow(n)).collect()
}

/// `P^(n) ∩ {1..W}`: squarefree numbers with exactly `n` prime factors.
pub fn squarefree_of_arity(n: usize, window: u64) -> NatSet {
    let table = primes();
    (2..=window)
        .filter(|&m| {
            let f = table.factorize_u64(m);
            f.len() == n && f.iter().all(|&(_, e)| e == 1)
        })
        .map(|m| Nat::new(m).expect("nonzero"))
        .collect()
}
