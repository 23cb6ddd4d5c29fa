//! Truncated Laurent series in ε over an exact field.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::{Arith, Ring, Scalar};

/// A Laurent series Σ c_k ε^k with finitely many stored terms.
///
/// `ceiling` is the highest exponent known exactly; `None` means the value
/// is an exact Laurent polynomial. Stored exponents never exceed the
/// ceiling and zero coefficients are never stored.
#[derive(Clone, PartialEq)]
pub struct EpsLaurent<Q> {
    terms: BTreeMap<i64, Q>,
    ceiling: Option<i64>,
}

impl<Q: Scalar> EpsLaurent<Q> {
    pub fn exact_zero() -> Self {
        EpsLaurent { terms: BTreeMap::new(), ceiling: None }
    }

    /// c·ε^k, exact.
    pub fn monomial(c: Q, k: i64) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(k, c);
        }
        EpsLaurent { terms, ceiling: None }
    }

    pub fn constant(c: Q) -> Self {
        Self::monomial(c, 0)
    }

    pub fn eps() -> Self {
        Self::monomial(Q::one(), 1)
    }

    pub fn eps_pow(k: i64) -> Self {
        Self::monomial(Q::one(), k)
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (i64, Q)>) -> Self {
        let mut out = Self::exact_zero();
        for (k, c) in terms {
            out.add_term(k, c);
        }
        out
    }

    /// Marks the value as known only through `ε^ceiling`, dropping anything above.
    pub fn with_ceiling(mut self, ceiling: i64) -> Self {
        self.truncate(Some(ceiling));
        self
    }

    fn truncate(&mut self, ceiling: Option<i64>) {
        let c = match (self.ceiling, ceiling) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, None) => a,
            (None, b) => b,
        };
        if let Some(c) = c {
            self.terms.retain(|&k, _| k <= c);
        }
        self.ceiling = c;
    }

    fn add_term(&mut self, k: i64, c: Q) {
        if let Some(ceil) = self.ceiling {
            if k > ceil {
                return;
            }
        }
        let slot = self.terms.entry(k).or_insert_with(Q::zero);
        *slot += &c;
        if slot.is_zero() {
            self.terms.remove(&k);
        }
    }

    pub fn ceiling(&self) -> Option<i64> {
        self.ceiling
    }

    pub fn is_exact(&self) -> bool {
        self.ceiling.is_none()
    }

    /// Lowest stored exponent.
    pub fn valuation(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    /// Lower bound for the exponents of the true value (valuation, or one
    /// past the ceiling for an inexact zero). `None` for the exact zero.
    fn order_bound(&self) -> Option<i64> {
        match self.valuation() {
            Some(v) => Some(v),
            None => self.ceiling.map(|c| c + 1),
        }
    }

    pub fn coeff(&self, k: i64) -> Q {
        self.terms.get(&k).cloned().unwrap_or_else(Q::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &Q)> {
        self.terms.iter().map(|(&k, c)| (k, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Pure ε⁰ value, if the series is one.
    pub fn as_constant(&self) -> Option<Q> {
        match self.terms.len() {
            0 => Some(Q::zero()),
            1 => self.terms.get(&0).cloned(),
            _ => None,
        }
    }

    pub fn scale_q(&self, c: &Q) -> Self {
        if c.is_zero() {
            return EpsLaurent { terms: BTreeMap::new(), ceiling: self.ceiling };
        }
        EpsLaurent {
            terms: self.terms.iter().map(|(&k, v)| (k, v.clone() * c)).collect(),
            ceiling: self.ceiling,
        }
    }

    /// Multiplication by ε^k.
    pub fn shift(&self, k: i64) -> Self {
        EpsLaurent {
            terms: self.terms.iter().map(|(&e, v)| (e + k, v.clone())).collect(),
            ceiling: self.ceiling.map(|c| c + k),
        }
    }

    /// Multiplicative inverse. Exact when `self` is an exact monomial,
    /// otherwise a series known through `ε^ceiling` (or less if `self`
    /// itself is truncated).
    pub fn invert(&self, ceiling: i64) -> Result<Self> {
        let v = self.valuation().ok_or(Error::NotInvertible("zero ε-series"))?;
        let lead = self.coeff(v);
        let lead_inv = Q::one() / lead;
        if self.terms.len() == 1 && self.ceiling.is_none() {
            return Ok(Self::monomial(lead_inv, -v));
        }
        // u = self·ε^{-v} = lead·(1 + t); known relative precision of u
        let rel_known = self.ceiling.map(|c| c - v).unwrap_or(i64::MAX);
        let target = (ceiling + v).min(rel_known);
        let u: Vec<Q> = (0..=target.max(0)).map(|k| self.coeff(v + k)).collect();
        let mut inv: Vec<Q> = vec![lead_inv.clone()];
        for n in 1..=target.max(0) as usize {
            let mut acc = Q::zero();
            for k in 1..=n {
                if !u[k].is_zero() {
                    acc += &(u[k].clone() * &inv[n - k]);
                }
            }
            inv.push(-(acc * &lead_inv));
        }
        let mut out = Self::exact_zero();
        for (k, c) in inv.into_iter().enumerate() {
            out.add_term(k as i64 - v, c);
        }
        out.truncate(Some(target - v));
        Ok(out)
    }

    /// Equality within the common precision of both values.
    pub fn agrees_with(&self, other: &Self) -> bool {
        self.sub(other).is_zero()
    }
}

impl<Q: Scalar> Arith for EpsLaurent<Q> {
    fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.truncate(other.ceiling);
        for (&k, c) in &other.terms {
            out.add_term(k, c.clone());
        }
        out
    }

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    fn mul(&self, other: &Self) -> Self {
        let (Some(va), Some(vb)) = (self.order_bound(), other.order_bound()) else {
            return Self::exact_zero();
        };
        let ceiling = match (self.ceiling, other.ceiling) {
            (None, None) => None,
            (Some(ca), None) => Some(ca + vb),
            (None, Some(cb)) => Some(cb + va),
            (Some(ca), Some(cb)) => Some((ca + vb).min(cb + va)),
        };
        let mut out = EpsLaurent { terms: BTreeMap::new(), ceiling };
        for (&ka, ca) in &self.terms {
            for (&kb, cb) in &other.terms {
                if let Some(c) = ceiling {
                    if ka + kb > c {
                        break;
                    }
                }
                out.add_term(ka + kb, ca.clone() * cb);
            }
        }
        out
    }

    fn neg(&self) -> Self {
        EpsLaurent {
            terms: self.terms.iter().map(|(&k, v)| (k, -v.clone())).collect(),
            ceiling: self.ceiling,
        }
    }
}

impl<Q: Scalar> Ring for EpsLaurent<Q> {
    fn zero() -> Self {
        Self::exact_zero()
    }
    fn one() -> Self {
        Self::constant(Q::one())
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn from_int(n: i64) -> Self {
        Self::constant(Q::from_i64(n))
    }
}

impl<Q: Scalar> fmt::Debug for EpsLaurent<Q> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<Q: Scalar> fmt::Display for EpsLaurent<Q> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            write!(f, "0")?;
        }
        for (i, (k, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            match *k {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})·ε")?,
                k => write!(f, "({c})·ε^{k}")?,
            }
        }
        if let Some(c) = self.ceiling {
            write!(f, " + O(ε^{})", c + 1)?;
        }
        Ok(())
    }
}
