//! Truncated power series in X with ε-Laurent coefficients.

use std::fmt;

use crate::eps::EpsLaurent;
use crate::error::{Error, Result};
use crate::scalar::{Arith, DiffAlgebra, Ring, Scalar};

/// Σ_{k ≤ cap} c_k X^k.
///
/// `valid` is the highest X-order known exactly; `None` means the stored
/// polynomial is the exact value. `cap` bounds the stored degree: exact
/// products that would exceed it are truncated and lose exactness.
#[derive(Clone, PartialEq)]
pub struct XJet<Q> {
    coeffs: Vec<EpsLaurent<Q>>,
    valid: Option<i64>,
    cap: usize,
}

/// Storage cap for values that carry no X-dependence of their own; it
/// defers to the cap of whatever they are combined with.
const UNCAPPED: usize = usize::MAX;

fn cap_i64(cap: usize) -> i64 {
    i64::try_from(cap).unwrap_or(i64::MAX / 4).min(i64::MAX / 4)
}

impl<Q: Scalar> XJet<Q> {
    /// Exact polynomial with the given coefficients, capped at degree `cap`.
    pub fn from_coeffs(coeffs: Vec<EpsLaurent<Q>>, cap: usize) -> Self {
        let mut out = XJet { coeffs, valid: None, cap };
        if out.coeffs.len() > cap.saturating_add(1) {
            out.coeffs.truncate(cap + 1);
            out.valid = Some(cap_i64(cap));
        }
        out.trim();
        out
    }

    pub fn from_rationals(coeffs: Vec<Q>, cap: usize) -> Self {
        Self::from_coeffs(coeffs.into_iter().map(EpsLaurent::constant).collect(), cap)
    }

    pub fn constant(c: EpsLaurent<Q>) -> Self {
        Self::from_coeffs(vec![c], UNCAPPED)
    }

    /// The monomial X.
    pub fn x(cap: usize) -> Self {
        Self::from_rationals(vec![Q::zero(), Q::one()], cap)
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        if self.coeffs.len() > cap.saturating_add(1) {
            self.coeffs.truncate(cap + 1);
            self.valid = Some(self.valid.map_or(cap_i64(cap), |v| v.min(cap_i64(cap))));
        }
        self
    }

    /// Marks the value as known only through X^order.
    pub fn with_valid(mut self, order: i64) -> Self {
        let v = self.valid.map_or(order, |v| v.min(order));
        self.valid = Some(v);
        self.coeffs.truncate((v + 1).max(0) as usize);
        self.trim();
        self
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero() && c.is_exact()) {
            self.coeffs.pop();
        }
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    /// Highest exactly-known X-order; `None` for an exact polynomial.
    pub fn valid_order(&self) -> Option<i64> {
        self.valid
    }

    /// Highest X-order worth comparing: the valid order, or the stored degree.
    pub fn window(&self) -> i64 {
        match self.valid {
            Some(v) => v,
            None => self.coeffs.len() as i64 - 1,
        }
    }

    pub fn coeff(&self, k: usize) -> EpsLaurent<Q> {
        self.coeffs.get(k).cloned().unwrap_or_else(EpsLaurent::exact_zero)
    }

    pub fn coeffs(&self) -> &[EpsLaurent<Q>] {
        &self.coeffs
    }

    fn valuation(&self) -> Option<i64> {
        match self.coeffs.iter().position(|c| !c.is_zero()) {
            Some(p) => Some(p as i64),
            None => self.valid.map(|v| v + 1),
        }
    }

    /// ∂_X; the valid order drops by one.
    pub fn derive(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c.scale_q(&Q::from_i64(k as i64)))
            .collect();
        let mut out = XJet { coeffs, valid: self.valid.map(|v| v - 1), cap: self.cap };
        out.trim();
        out
    }

    /// X-antiderivative with zero constant term; a value known through X^v
    /// integrates to one known through X^{v+1}, subject to the storage cap.
    pub fn antiderivative(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(EpsLaurent::exact_zero());
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs.push(c.scale_q(&Q::from_ratio(1, k as i64 + 1)));
        }
        let mut out = XJet { coeffs, valid: self.valid.map(|v| v + 1), cap: self.cap };
        if let Some(v) = out.valid {
            out.coeffs.truncate((v + 1).max(0) as usize);
        }
        if out.coeffs.len() > out.cap.saturating_add(1) {
            out.coeffs.truncate(out.cap + 1);
            out.valid = Some(out.valid.map_or(cap_i64(out.cap), |v| v.min(cap_i64(out.cap))));
        }
        out.trim();
        out
    }

    /// 1/a as an X-series through the storage cap. Fails when the X⁰
    /// coefficient is zero.
    pub fn invert(&self, eps_ceiling: i64) -> Result<Self> {
        let a0 = self.coeff(0);
        if a0.is_zero() {
            return Err(Error::NotInvertible("X-jet with vanishing constant term"));
        }
        let inv0 = a0.invert(eps_ceiling)?;
        if self.coeffs.len() <= 1 && self.valid.is_none() {
            return Ok(XJet { coeffs: vec![inv0], valid: None, cap: self.cap });
        }
        if self.cap == UNCAPPED && self.valid.is_none() {
            return Err(Error::NotInvertible("uncapped X-polynomial has no finite inverse"));
        }
        let top = match self.valid {
            Some(v) => v.min(cap_i64(self.cap)),
            None => cap_i64(self.cap),
        };
        if top < 0 {
            return Ok(XJet { coeffs: Vec::new(), valid: Some(top), cap: self.cap });
        }
        let neg_inv0 = inv0.neg();
        let mut out: Vec<EpsLaurent<Q>> = vec![inv0];
        for n in 1..=top as usize {
            let mut acc = EpsLaurent::exact_zero();
            for k in 1..=n.min(self.coeffs.len().saturating_sub(1)) {
                if !self.coeffs[k].is_zero() {
                    acc = acc.add(&self.coeffs[k].mul(&out[n - k]));
                }
            }
            out.push(acc.mul(&neg_inv0));
        }
        let mut jet = XJet { coeffs: out, valid: Some(top), cap: self.cap };
        jet.trim();
        Ok(jet)
    }

    /// Value at X = 0.
    pub fn at_zero(&self) -> EpsLaurent<Q> {
        self.coeff(0)
    }

    /// True when every X^k coefficient with k ≥ 1 vanishes within the window.
    pub fn is_x_constant(&self) -> bool {
        self.coeffs.iter().skip(1).all(|c| c.is_zero())
    }

    pub fn map_coeffs(&self, f: impl Fn(&EpsLaurent<Q>) -> EpsLaurent<Q>) -> Self {
        let mut out = XJet {
            coeffs: self.coeffs.iter().map(f).collect(),
            valid: self.valid,
            cap: self.cap,
        };
        out.trim();
        out
    }

    /// First (X-order, ε-order) at which `self` and `other` differ within
    /// their common window.
    pub fn first_difference(&self, other: &Self) -> Option<(usize, i64)> {
        let diff = self.sub(other);
        for (k, c) in diff.coeffs.iter().enumerate() {
            if let Some(e) = c.valuation() {
                return Some((k, e));
            }
        }
        None
    }
}

impl<Q: Scalar> Arith for XJet<Q> {
    fn add(&self, other: &Self) -> Self {
        let valid = match (self.valid, other.valid) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, None) => a,
            (None, b) => b,
        };
        let cap = self.cap.min(other.cap);
        let mut len = self.coeffs.len().max(other.coeffs.len());
        if let Some(v) = valid {
            len = len.min((v + 1).max(0) as usize);
        }
        let coeffs = (0..len)
            .map(|k| match (self.coeffs.get(k), other.coeffs.get(k)) {
                (Some(a), Some(b)) => a.add(b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => EpsLaurent::exact_zero(),
            })
            .collect();
        let mut out = XJet { coeffs, valid, cap };
        out.trim();
        out
    }

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    fn mul(&self, other: &Self) -> Self {
        let (Some(va), Some(vb)) = (self.valuation(), other.valuation()) else {
            return XJet { coeffs: Vec::new(), valid: None, cap: self.cap.min(other.cap) };
        };
        let cap = self.cap.min(other.cap);
        let mut valid = match (self.valid, other.valid) {
            (None, None) => None,
            (Some(a), None) => Some(a + vb),
            (None, Some(b)) => Some(b + va),
            (Some(a), Some(b)) => Some((a + vb).min(b + va)),
        };
        let mut len = (self.coeffs.len() + other.coeffs.len()).saturating_sub(1);
        if len > cap.saturating_add(1) {
            len = cap + 1;
            valid = Some(valid.map_or(cap_i64(cap), |v| v.min(cap_i64(cap))));
        }
        if let Some(v) = valid {
            len = len.min((v + 1).max(0) as usize);
        }
        let mut coeffs = vec![EpsLaurent::exact_zero(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if i >= len {
                break;
            }
            if a.is_zero() && a.is_exact() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                if b.is_zero() && b.is_exact() {
                    continue;
                }
                coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
            }
        }
        let mut out = XJet { coeffs, valid, cap };
        out.trim();
        out
    }

    fn neg(&self) -> Self {
        XJet { coeffs: self.coeffs.iter().map(|c| c.neg()).collect(), valid: self.valid, cap: self.cap }
    }
}

impl<Q: Scalar> Ring for XJet<Q> {
    fn zero() -> Self {
        XJet { coeffs: Vec::new(), valid: None, cap: UNCAPPED }
    }
    fn one() -> Self {
        Self::constant(EpsLaurent::one())
    }
    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }
    fn from_int(n: i64) -> Self {
        Self::constant(EpsLaurent::from_int(n))
    }
}

impl<Q: Scalar> DiffAlgebra<Q> for XJet<Q> {
    fn from_eps(c: EpsLaurent<Q>) -> Self {
        Self::constant(c)
    }
    fn scale(&self, c: &EpsLaurent<Q>) -> Self {
        self.map_coeffs(|x| x.mul(c))
    }
    fn derive(&self) -> Self {
        XJet::derive(self)
    }
}

impl<Q: Scalar> fmt::Debug for XJet<Q> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<Q: Scalar> fmt::Display for XJet<Q> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "[{c}]")?,
                1 => write!(f, "[{c}]·X")?,
                k => write!(f, "[{c}]·X^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        if let Some(v) = self.valid {
            write!(f, " + O(X^{})", v + 1)?;
        }
        Ok(())
    }
}
