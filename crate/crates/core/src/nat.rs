//! Positive naturals of unbounded size and finite sets of them.
//!
//! [`Nat`] keeps values that fit in a `u64` inline and only promotes to a
//! heap-allocated [`BigUint`] on overflow. The representation is normalized
//! (a value that fits in `u64` is always stored small), so derived equality
//! and hashing are value equality.

use std::cmp::Ordering;
use std::collections::btree_set;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
enum Repr {
    Small(u64),
    Big(BigUint),
}

/// A natural number `>= 1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Nat(Repr);

impl Nat {
    pub const ONE: Nat = Nat(Repr::Small(1));

    /// Returns `None` for zero.
    pub const fn new(value: u64) -> Option<Nat> {
        if value == 0 {
            None
        } else {
            Some(Nat(Repr::Small(value)))
        }
    }

    pub fn from_biguint(value: BigUint) -> Result<Nat> {
        if value.is_zero() {
            return Err(Error::Zero);
        }
        Ok(Self::normalize(value))
    }

    fn normalize(value: BigUint) -> Nat {
        match value.to_u64() {
            Some(v) => Nat(Repr::Small(v)),
            None => Nat(Repr::Big(value)),
        }
    }

    pub fn to_u64(&self) -> Option<u64> {
        match &self.0 {
            Repr::Small(v) => Some(*v),
            Repr::Big(_) => None,
        }
    }

    pub fn to_biguint(&self) -> BigUint {
        match &self.0 {
            Repr::Small(v) => BigUint::from(*v),
            Repr::Big(b) => b.clone(),
        }
    }

    pub fn is_one(&self) -> bool {
        matches!(self.0, Repr::Small(1))
    }

    pub fn bits(&self) -> u64 {
        match &self.0 {
            Repr::Small(v) => 64 - u64::from(v.leading_zeros()),
            Repr::Big(b) => b.bits(),
        }
    }

    pub fn mul(&self, other: &Nat) -> Nat {
        match (&self.0, &other.0) {
            (Repr::Small(a), Repr::Small(b)) => match a.checked_mul(*b) {
                Some(p) => Nat(Repr::Small(p)),
                None => Nat(Repr::Big(BigUint::from(*a) * BigUint::from(*b))),
            },
            _ => Self::normalize(self.to_biguint() * other.to_biguint()),
        }
    }

    /// `self^exp`; `x^0 = 1`.
    pub fn pow(&self, exp: u32) -> Nat {
        if let Repr::Small(v) = self.0 {
            if let Some(p) = v.checked_pow(exp) {
                return Nat(Repr::Small(p));
            }
        }
        Self::normalize(num_traits::pow(self.to_biguint(), exp as usize))
    }

    /// True iff `self | other`.
    pub fn divides(&self, other: &Nat) -> bool {
        match (&self.0, &other.0) {
            (Repr::Small(d), Repr::Small(n)) => n % d == 0,
            (Repr::Big(_), Repr::Small(_)) => false,
            _ => (other.to_biguint() % self.to_biguint()).is_zero(),
        }
    }

    /// `self / divisor` when the division is exact.
    pub fn checked_div_exact(&self, divisor: &Nat) -> Option<Nat> {
        match (&self.0, &divisor.0) {
            (Repr::Small(n), Repr::Small(d)) => (n % d == 0).then(|| Nat(Repr::Small(n / d))),
            (Repr::Small(_), Repr::Big(_)) => None,
            _ => {
                let (q, r) = self.to_biguint().div_rem(&divisor.to_biguint());
                r.is_zero().then(|| Self::normalize(q))
            }
        }
    }

    pub fn gcd(&self, other: &Nat) -> Nat {
        match (&self.0, &other.0) {
            (Repr::Small(a), Repr::Small(b)) => Nat(Repr::Small(a.gcd(b))),
            _ => Self::normalize(self.to_biguint().gcd(&other.to_biguint())),
        }
    }

    pub fn is_coprime(&self, other: &Nat) -> bool {
        self.gcd(other).is_one()
    }
}

impl Ord for Nat {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small(a), Repr::Small(b)) => a.cmp(b),
            (Repr::Small(_), Repr::Big(_)) => Ordering::Less,
            (Repr::Big(_), Repr::Small(_)) => Ordering::Greater,
            (Repr::Big(a), Repr::Big(b)) => a.cmp(b),
        }
    }
}

impl PartialOrd for Nat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl TryFrom<u64> for Nat {
    type Error = Error;

    fn try_from(value: u64) -> Result<Self> {
        Nat::new(value).ok_or(Error::Zero)
    }
}

impl TryFrom<BigUint> for Nat {
    type Error = Error;

    fn try_from(value: BigUint) -> Result<Self> {
        Nat::from_biguint(value)
    }
}

impl From<std::num::NonZeroU64> for Nat {
    fn from(value: std::num::NonZeroU64) -> Self {
        Nat(Repr::Small(value.get()))
    }
}

impl FromStr for Nat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Ok(v) = s.parse::<u64>() {
            return Nat::try_from(v);
        }
        let big = BigUint::from_str(s).map_err(|e| Error::Parse(format!("{s:?}: {e}")))?;
        Nat::from_biguint(big)
    }
}

impl fmt::Display for Nat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(v) => write!(f, "{v}"),
            Repr::Big(b) => write!(f, "{b}"),
        }
    }
}

impl fmt::Debug for Nat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Small values serialize as JSON numbers, large ones as decimal strings.
impl Serialize for Nat {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match &self.0 {
            Repr::Small(v) => serializer.serialize_u64(*v),
            Repr::Big(b) => serializer.serialize_str(&b.to_string()),
        }
    }
}

impl One for Nat {
    fn one() -> Self {
        Nat::ONE
    }
}

impl std::ops::Mul for Nat {
    type Output = Nat;

    fn mul(self, rhs: Nat) -> Nat {
        Nat::mul(&self, &rhs)
    }
}

impl<'a> std::ops::Mul<&'a Nat> for &'a Nat {
    type Output = Nat;

    fn mul(self, rhs: &'a Nat) -> Nat {
        Nat::mul(self, rhs)
    }
}

impl std::iter::Product for Nat {
    fn product<I: Iterator<Item = Nat>>(iter: I) -> Nat {
        iter.fold(Nat::ONE, |acc, x| acc.mul(&x))
    }
}

impl<'a> std::iter::Product<&'a Nat> for Nat {
    fn product<I: Iterator<Item = &'a Nat>>(iter: I) -> Nat {
        iter.fold(Nat::ONE, |acc, x| acc.mul(x))
    }
}

/// Shorthand for literals in tests and examples. Panics on zero.
pub fn nat(value: u64) -> Nat {
    Nat::new(value).expect("nat(0)")
}

/// A finite set of naturals.
///
/// When `window` is `Some(w)` the set stands for `S ∩ {1..w}` of some
/// conceptually infinite `S`, and every element is `<= w`.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct NatSet {
    elements: BTreeSet<Nat>,
    window: Option<Nat>,
}

/// Serializes as the sorted element list; the window is not part of it.
impl Serialize for NatSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(&self.elements)
    }
}

impl NatSet {
    pub fn new() -> NatSet {
        NatSet::default()
    }

    pub fn windowed(window: Nat) -> NatSet {
        NatSet {
            elements: BTreeSet::new(),
            window: Some(window),
        }
    }

    pub fn from_u64s<I: IntoIterator<Item = u64>>(values: I) -> Result<NatSet> {
        values.into_iter().map(Nat::try_from).collect()
    }

    /// Attaches a window, failing if an element exceeds it.
    pub fn with_window(mut self, window: Nat) -> Result<NatSet> {
        if let Some(max) = self.elements.last() {
            if *max > window {
                return Err(Error::WindowTooSmall {
                    window,
                    element: max.clone(),
                });
            }
        }
        self.window = Some(window);
        Ok(self)
    }

    pub fn window(&self) -> Option<&Nat> {
        self.window.as_ref()
    }

    pub fn insert(&mut self, value: Nat) -> Result<bool> {
        if let Some(w) = &self.window {
            if value > *w {
                return Err(Error::WindowTooSmall {
                    window: w.clone(),
                    element: value,
                });
            }
        }
        Ok(self.elements.insert(value))
    }

    pub fn remove(&mut self, value: &Nat) -> bool {
        self.elements.remove(value)
    }

    pub fn contains(&self, value: &Nat) -> bool {
        self.elements.contains(value)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn max(&self) -> Option<&Nat> {
        self.elements.last()
    }

    pub fn min(&self) -> Option<&Nat> {
        self.elements.first()
    }

    pub fn iter(&self) -> btree_set::Iter<'_, Nat> {
        self.elements.iter()
    }

    pub fn elements(&self) -> &BTreeSet<Nat> {
        &self.elements
    }

    pub fn is_subset(&self, other: &NatSet) -> bool {
        self.elements.is_subset(&other.elements)
    }

    pub fn is_disjoint(&self, other: &NatSet) -> bool {
        self.elements.is_disjoint(&other.elements)
    }

    /// Set operations keep no window; callers reattach one if needed.
    pub fn union(&self, other: &NatSet) -> NatSet {
        self.elements.union(&other.elements).cloned().collect()
    }

    pub fn intersection(&self, other: &NatSet) -> NatSet {
        self.elements
            .intersection(&other.elements)
            .cloned()
            .collect()
    }

    pub fn difference(&self, other: &NatSet) -> NatSet {
        self.elements.difference(&other.elements).cloned().collect()
    }

    /// Elements as `u64`, or `None` if any element is too large.
    pub fn to_u64s(&self) -> Option<Vec<u64>> {
        self.elements.iter().map(Nat::to_u64).collect()
    }
}

impl FromIterator<Nat> for NatSet {
    fn from_iter<I: IntoIterator<Item = Nat>>(iter: I) -> Self {
        NatSet {
            elements: iter.into_iter().collect(),
            window: None,
        }
    }
}

impl<'a> IntoIterator for &'a NatSet {
    type Item = &'a Nat;
    type IntoIter = btree_set::Iter<'a, Nat>;

    fn into_iter(self) -> Self::IntoIter {
        self.elements.iter()
    }
}

impl IntoIterator for NatSet {
    type Item = Nat;
    type IntoIter = btree_set::IntoIter<Nat>;

    fn into_iter(self) -> Self::IntoIter {
        self.elements.into_iter()
    }
}

impl Extend<Nat> for NatSet {
    fn extend<I: IntoIterator<Item = Nat>>(&mut self, iter: I) {
        self.elements.extend(iter)
    }
}

impl fmt::Debug for NatSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.elements.iter()).finish()?;
        if let Some(w) = &self.window {
            write!(f, " within {{1..{w}}}")?;
        }
        Ok(())
    }
}

impl fmt::Display for NatSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, x) in self.elements.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str("}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(s: &str) -> Nat {
        s.parse().unwrap()
    }

    #[test]
    fn zero_is_rejected() {
        assert_eq!(Nat::new(0), None);
        assert_eq!(Nat::try_from(0u64), Err(Error::Zero));
        assert!("0".parse::<Nat>().is_err());
    }

    #[test]
    fn overflow_promotes_and_stays_normalized() {
        let x = nat(u64::MAX);
        let sq = x.mul(&x);
        assert_eq!(sq.to_u64(), None);
        assert_eq!(sq.to_string(), "340282366920938463426481119284349108225");
        assert_eq!(sq.checked_div_exact(&x), Some(x.clone()));
        assert!(x.divides(&sq));
        assert!(!sq.divides(&x));
        assert_eq!(big("18446744073709551615"), x);
        assert!(sq > x);
    }

    #[test]
    fn pow_crosses_word_boundary() {
        assert_eq!(nat(2).pow(63).to_u64(), Some(1 << 63));
        assert_eq!(nat(2).pow(64).to_string(), "18446744073709551616");
        assert_eq!(nat(7).pow(0), Nat::ONE);
    }

    #[test]
    fn window_is_enforced() {
        let mut s = NatSet::windowed(nat(10));
        assert!(s.insert(nat(10)).unwrap());
        assert!(s.insert(nat(11)).is_err());
        let t = NatSet::from_u64s([3, 20]).unwrap();
        assert!(t.with_window(nat(19)).is_err());
    }

    proptest! {
        #[test]
        fn arithmetic_matches_u128(a in 1u64.., b in 1u64..) {
            let p = nat(a).mul(&nat(b));
            prop_assert_eq!(p.to_string(), (a as u128 * b as u128).to_string());
            prop_assert_eq!(p.checked_div_exact(&nat(b)), Some(nat(a)));
            prop_assert_eq!(nat(a).gcd(&nat(b)), nat(num_integer::gcd(a, b)));
        }

        #[test]
        fn ordering_matches_biguint(a in 1u64.., b in 1u64.., c in 1u64..) {
            let x = nat(a).mul(&nat(b));
            let y = nat(c);
            prop_assert_eq!(x.cmp(&y), x.to_biguint().cmp(&y.to_biguint()));
        }
    }
}
