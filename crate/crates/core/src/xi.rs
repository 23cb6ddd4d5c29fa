//! Truncated Laurent series in a single spectral variable ξ.

use std::fmt;

use crate::eps::EpsLaurent;
use crate::error::{Error, Result};
use crate::scalar::{Arith, DiffAlgebra, Ring, Scalar};

/// Stand-in for an unbounded window edge.
pub const NEG_INF: i64 = i64::MIN / 4;

pub(crate) fn clamp_inf(x: i64) -> i64 {
    if x < NEG_INF / 2 {
        NEG_INF
    } else {
        x
    }
}

/// Σ_{floor ≤ e ≤ top} c_e ξ^e.
///
/// Every coefficient with exponent ≥ `floor` is exact; `floor == NEG_INF`
/// marks a finite exact series. `coeffs[i]` holds the coefficient of
/// ξ^{top−i}; missing tail entries are zero.
#[derive(Clone, PartialEq)]
pub struct XiSeries<R> {
    top: i64,
    floor: i64,
    coeffs: Vec<R>,
}

impl<R: Ring> XiSeries<R> {
    pub fn new(top: i64, floor: i64, mut coeffs: Vec<R>) -> Self {
        let floor = clamp_inf(floor);
        if floor > NEG_INF {
            coeffs.truncate((top - floor + 1).max(0) as usize);
        }
        let mut s = XiSeries { top, floor, coeffs };
        s.trim();
        s
    }

    /// Exact zero.
    pub fn zero() -> Self {
        XiSeries { top: 0, floor: NEG_INF, coeffs: Vec::new() }
    }

    /// Exact c·ξ^k.
    pub fn monomial(c: R, k: i64) -> Self {
        Self::new(k, NEG_INF, vec![c])
    }

    pub fn constant(c: R) -> Self {
        Self::monomial(c, 0)
    }

    /// Builds Σ_{e} c_e ξ^e from (exponent, coefficient) pairs.
    pub fn from_terms(terms: impl IntoIterator<Item = (i64, R)>, floor: i64) -> Self {
        let terms: Vec<(i64, R)> = terms.into_iter().collect();
        let Some(top) = terms.iter().map(|t| t.0).max() else {
            return XiSeries { top: 0, floor: clamp_inf(floor), coeffs: Vec::new() };
        };
        let low = terms.iter().map(|t| t.0).min().unwrap_or(top);
        let mut coeffs = vec![R::zero(); (top - low + 1) as usize];
        for (e, c) in terms {
            let i = (top - e) as usize;
            coeffs[i] = coeffs[i].add(&c);
        }
        Self::new(top, floor, coeffs)
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
        while self.coeffs.first().is_some_and(|c| c.is_zero()) {
            self.coeffs.remove(0);
            self.top -= 1;
        }
        if self.coeffs.is_empty() && self.floor > NEG_INF {
            self.top = self.top.max(self.floor - 1);
        }
    }

    /// Highest exponent with a stored (nonzero) coefficient, or an upper
    /// bound for it when the series is empty.
    pub fn top(&self) -> i64 {
        self.top
    }

    /// Lowest exponent known exactly; `NEG_INF` for exact finite series.
    pub fn floor(&self) -> i64 {
        self.floor
    }

    pub fn is_exact(&self) -> bool {
        self.floor == NEG_INF
    }

    /// Lowest exponent at which a stored coefficient sits.
    pub fn lowest(&self) -> i64 {
        self.top - self.coeffs.len() as i64 + 1
    }

    pub fn knows(&self, e: i64) -> bool {
        e >= self.floor
    }

    pub fn coeff(&self, e: i64) -> R {
        if e > self.top {
            return R::zero();
        }
        self.coeffs.get((self.top - e) as usize).cloned().unwrap_or_else(R::zero)
    }

    /// Coefficient of ξ^e, or `OutsideWindow` when it is not known exactly.
    pub fn coeff_checked(&self, e: i64) -> Result<R> {
        if !self.knows(e) {
            return Err(Error::OutsideWindow(format!(
                "ξ^{e} requested, series known only down to ξ^{}",
                self.floor
            )));
        }
        Ok(self.coeff(e))
    }

    /// Nonzero terms as (exponent, coefficient), highest exponent first.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &R)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, c)| (self.top - i as i64, c))
    }

    /// Drops everything below ξ^floor and marks the series inexact there.
    pub fn truncate(&self, floor: i64) -> Self {
        Self::new(self.top, self.floor.max(floor), self.coeffs.clone())
    }

    /// Multiplication by ξ^k.
    pub fn shift(&self, k: i64) -> Self {
        XiSeries { top: self.top + k, floor: clamp_inf(self.floor + k), coeffs: self.coeffs.clone() }
    }

    pub fn map(&self, f: impl Fn(&R) -> R) -> Self {
        Self::new(self.top, self.floor, self.coeffs.iter().map(f).collect())
    }

    pub fn mul_coeff(&self, c: &R) -> Self {
        self.map(|x| x.mul(c))
    }

    /// True when every exactly-known coefficient vanishes.
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Highest exponent carrying a nonzero coefficient.
    pub fn leading_exponent(&self) -> Option<i64> {
        self.terms().next().map(|(e, _)| e)
    }

    /// Multiplicative inverse of a series whose leading coefficient has
    /// inverse `lead_inv`. The result is exact down to ξ^floor at best.
    pub fn inverse(&self, lead_inv: &R, floor: i64) -> Result<Self> {
        let t = self.leading_exponent().ok_or(Error::NotInvertible("zero ξ-series"))?;
        let rel = if self.is_exact() { i64::MAX / 4 } else { t - self.floor };
        let out_floor = (-t - rel).max(floor);
        let n_max = (-t - out_floor).max(0) as usize;
        let a: Vec<R> = (0..=n_max).map(|k| self.coeff(t - k as i64)).collect();
        let neg_inv = lead_inv.neg();
        let mut b: Vec<R> = vec![lead_inv.clone()];
        for n in 1..=n_max {
            let mut acc = R::zero();
            for k in 1..=n {
                if !a[k].is_zero() {
                    acc = acc.add(&a[k].mul(&b[n - k]));
                }
            }
            b.push(acc.mul(&neg_inv));
        }
        Ok(Self::new(-t, out_floor, b))
    }
}

impl<R: Ring> Arith for XiSeries<R> {
    fn add(&self, other: &Self) -> Self {
        let floor = self.floor.max(other.floor);
        let top = self.top.max(other.top);
        let low = match floor {
            NEG_INF => self.lowest().min(other.lowest()),
            f => f,
        };
        let len = (top - low + 1).max(0) as usize;
        let coeffs = (0..len)
            .map(|i| {
                let e = top - i as i64;
                self.coeff(e).add(&other.coeff(e))
            })
            .collect();
        Self::new(top, floor, coeffs)
    }

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    fn mul(&self, other: &Self) -> Self {
        if (self.is_zero() && self.is_exact()) || (other.is_zero() && other.is_exact()) {
            return Self::zero();
        }
        let top = self.top + other.top;
        let floor = clamp_inf((self.floor + other.top).max(other.floor + self.top));
        let low = match floor {
            NEG_INF => self.lowest() + other.lowest(),
            f => f,
        };
        let len = (top - low + 1).max(0) as usize;
        let mut coeffs = vec![R::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if i >= len || a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                if !b.is_zero() {
                    coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
                }
            }
        }
        Self::new(top, floor, coeffs)
    }

    fn neg(&self) -> Self {
        self.map(|c| c.neg())
    }
}

impl<R> XiSeries<R> {
    /// Coefficientwise application of ∂_X.
    pub fn derive_x<Q: Scalar>(&self) -> Self
    where
        R: DiffAlgebra<Q>,
    {
        self.map(|c| c.derive())
    }

    pub fn scale_eps<Q: Scalar>(&self, c: &EpsLaurent<Q>) -> Self
    where
        R: DiffAlgebra<Q>,
    {
        self.map(|x| x.scale(c))
    }

    /// exp(s) for a series with no ξ^{≥0} part, exact down to
    /// ξ^{max(floor, s.floor)}.
    pub fn exp<Q: Scalar>(&self, floor: i64) -> Result<Self>
    where
        R: DiffAlgebra<Q>,
    {
        if let Some(e) = self.terms().map(|(e, _)| e).find(|&e| e >= 0) {
            return Err(Error::BadExponent(format!("exp argument has a ξ^{e} term")));
        }
        let out_floor = self.floor.max(floor);
        if out_floor == NEG_INF {
            return Err(Error::BadExponent("exp needs a finite truncation".into()));
        }
        let n_max = (-out_floor).max(0) as usize;
        let s: Vec<R> = (0..=n_max).map(|k| self.coeff(-(k as i64))).collect();
        let mut e: Vec<R> = vec![R::one()];
        for n in 1..=n_max {
            let mut acc = R::zero();
            for k in 1..=n {
                if !s[k].is_zero() {
                    acc = acc.add(&s[k].mul(&e[n - k]).scale(&EpsLaurent::constant(Q::from_i64(k as i64))));
                }
            }
            e.push(acc.scale(&EpsLaurent::constant(Q::from_ratio(1, n as i64))));
        }
        Ok(Self::new(0, out_floor, e))
    }
}

impl<R: Ring + fmt::Display> fmt::Display for XiSeries<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match e {
                0 => write!(f, "{{{c}}}")?,
                1 => write!(f, "{{{c}}}·ξ")?,
                e => write!(f, "{{{c}}}·ξ^{e}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        if self.floor > NEG_INF {
            write!(f, " + O(ξ^{})", self.floor - 1)?;
        }
        Ok(())
    }
}

impl<R: Ring> fmt::Debug for XiSeries<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("XiSeries")
            .field("top", &self.top)
            .field("floor", &self.floor)
            .field("coeffs", &self.coeffs)
            .finish()
    }
}
