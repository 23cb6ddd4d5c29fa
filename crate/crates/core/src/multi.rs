//! Truncated Laurent series in several spectral variables, expanded in a
//! fixed region |ξ_{o₀}| > |ξ_{o₁}| > … .
//!
//! Truncation is tracked through prefix sums taken in region order: for an
//! exponent vector e, P_j(e) = e_{o₀} + … + e_{o_j}. Each series records
//! `upper[j]` bounding P_j over all terms of the true series and `floor[j]`;
//! a term is stored, and exact, iff P_j ≥ floor[j] for every j. Both bounds
//! propagate through products, so kernels with infinitely many terms can
//! be multiplied without losing track of which coefficients are final.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mat2::Mat2;
use crate::scalar::{Arith, Ring};
use crate::xi::{clamp_inf, XiSeries, NEG_INF};

/// Ordering of variable magnitudes; `order[0]` is the dominant variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Region {
    order: Vec<usize>,
    pos: Vec<usize>,
}

impl Region {
    /// |ξ₀| > |ξ₁| > … > |ξ_{k−1}|.
    pub fn standard(k: usize) -> Self {
        Self::from_order((0..k).collect()).expect("identity is a permutation")
    }

    pub fn from_order(order: Vec<usize>) -> Result<Self> {
        let k = order.len();
        let mut pos = vec![usize::MAX; k];
        for (j, &v) in order.iter().enumerate() {
            if v >= k || pos[v] != usize::MAX {
                return Err(Error::RegionError(format!("{order:?} is not a permutation")));
            }
            pos[v] = j;
        }
        Ok(Region { order, pos })
    }

    pub fn nvars(&self) -> usize {
        self.order.len()
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Position of variable `v` in the magnitude ordering.
    pub fn pos(&self, v: usize) -> usize {
        self.pos[v]
    }

    pub fn prefix(&self, e: &[i64]) -> Vec<i64> {
        let mut acc = 0;
        self.order
            .iter()
            .map(|&v| {
                acc += e[v];
                acc
            })
            .collect()
    }

    /// Prefix floor selecting every exponent vector with all entries ≥ −m−2,
    /// i.e. the window of a k-point table with indices ≤ m.
    pub fn table_floor(&self, m: usize) -> Vec<i64> {
        (0..self.nvars()).map(|j| -((j as i64 + 1) * (m as i64 + 2))).collect()
    }
}

#[derive(Clone, PartialEq)]
pub struct MultiSeries<R> {
    region: Region,
    terms: BTreeMap<Vec<i64>, R>,
    upper: Vec<i64>,
    floor: Vec<i64>,
}

fn admits(prefix: &[i64], floor: &[i64]) -> bool {
    prefix.iter().zip(floor).all(|(p, f)| p >= f)
}

impl<R: Ring> MultiSeries<R> {
    pub fn zero(region: &Region) -> Self {
        let k = region.nvars();
        MultiSeries { region: region.clone(), terms: BTreeMap::new(), upper: vec![NEG_INF; k], floor: vec![NEG_INF; k] }
    }

    /// Exact c·∏ξ^e.
    pub fn monomial(region: &Region, exps: Vec<i64>, c: R) -> Self {
        if c.is_zero() {
            return Self::zero(region);
        }
        let k = region.nvars();
        let upper = region.prefix(&exps);
        let mut terms = BTreeMap::new();
        terms.insert(exps, c);
        MultiSeries { region: region.clone(), terms, upper, floor: vec![NEG_INF; k] }
    }

    /// Series from explicit terms, exact above `floor`; terms outside the
    /// window are dropped and the upper bounds are taken from the terms.
    pub fn from_terms(region: &Region, terms: impl IntoIterator<Item = (Vec<i64>, R)>, floor: Vec<i64>) -> Self {
        let k = region.nvars();
        let floor: Vec<i64> = floor.into_iter().map(clamp_inf).collect();
        let mut upper = vec![NEG_INF; k];
        let mut kept = BTreeMap::new();
        for (e, c) in terms {
            let p = region.prefix(&e);
            if c.is_zero() || !admits(&p, &floor) {
                continue;
            }
            for j in 0..k {
                upper[j] = upper[j].max(p[j]);
            }
            kept.insert(e, c);
        }
        MultiSeries { region: region.clone(), terms: kept, upper, floor }
    }

    pub fn one(region: &Region) -> Self {
        Self::monomial(region, vec![0; region.nvars()], R::one())
    }

    /// A univariate series placed in variable `var`.
    pub fn embed(region: &Region, var: usize, s: &XiSeries<R>) -> Self {
        let k = region.nvars();
        let p = region.pos(var);
        let Some(top) = s.leading_exponent() else {
            let mut z = Self::zero(region);
            for j in p..k {
                z.floor[j] = s.floor();
            }
            return z;
        };
        let upper = (0..k).map(|j| if j < p { 0 } else { top }).collect();
        let floor = (0..k).map(|j| if j < p { NEG_INF } else { s.floor() }).collect();
        let terms = s
            .terms()
            .map(|(e, c)| {
                let mut v = vec![0; k];
                v[var] = e;
                (v, c.clone())
            })
            .collect();
        MultiSeries { region: region.clone(), terms, upper, floor }
    }

    /// Expansion of 1/(ξ_a − ξ_b)^p in the region, keeping terms above `floor`.
    pub fn kernel(region: &Region, a: usize, b: usize, p: u32, floor: &[i64]) -> Result<Self> {
        if a == b || p == 0 {
            return Err(Error::RegionError(format!("kernel needs distinct variables and positive power, got ({a},{b},{p})")));
        }
        let (pa, pb) = (region.pos(a), region.pos(b));
        if pa > pb {
            let k = Self::kernel(region, b, a, p, floor)?;
            return Ok(if p % 2 == 1 { k.neg() } else { k });
        }
        let n = region.nvars();
        let p = p as i64;
        let binding = (pa..pb).map(|j| floor[j]).max().unwrap_or(NEG_INF);
        if binding <= NEG_INF {
            return Err(Error::RegionError("kernel expansion needs a finite floor".into()));
        }
        let mut terms = BTreeMap::new();
        let mut binom: i64 = 1;
        let mut m: i64 = 0;
        while -m - p >= binding {
            let mut e = vec![0; n];
            e[a] = -m - p;
            e[b] = m;
            if admits(&region.prefix(&e), floor) {
                terms.insert(e, R::from_int(binom));
            }
            // C(m+p, p−1) from C(m+p−1, p−1)
            binom = binom * (m + p) / (m + 1);
            m += 1;
        }
        let upper = (0..n).map(|j| if j < pa { 0 } else { -p }).collect();
        Ok(MultiSeries { region: region.clone(), terms, upper, floor: floor.iter().map(|&f| clamp_inf(f)).collect() })
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn floor(&self) -> &[i64] {
        &self.floor
    }

    pub fn upper(&self) -> &[i64] {
        &self.upper
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &R)> {
        self.terms.iter()
    }

    /// Whether the coefficient of ∏ξ^e is known exactly.
    pub fn knows(&self, exps: &[i64]) -> bool {
        admits(&self.region.prefix(exps), &self.floor)
    }

    /// True when every stored coefficient of the window `floor` is final.
    pub fn covers(&self, floor: &[i64]) -> bool {
        self.floor.iter().zip(floor).all(|(a, b)| a <= b)
    }

    pub fn coeff(&self, exps: &[i64]) -> Result<R> {
        if !self.knows(exps) {
            return Err(Error::OutsideWindow(format!(
                "coefficient {exps:?} outside exact window (prefix floor {:?})",
                self.floor
            )));
        }
        Ok(self.terms.get(exps).cloned().unwrap_or_else(R::zero))
    }

    /// Lowers precision to `floor`, discarding terms outside it.
    pub fn truncate(&self, floor: &[i64]) -> Self {
        let floor: Vec<i64> = self.floor.iter().zip(floor).map(|(a, b)| (*a).max(*b)).collect();
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| admits(&self.region.prefix(e), &floor))
            .map(|(e, c)| (e.clone(), c.clone()))
            .collect();
        MultiSeries { region: self.region.clone(), terms, upper: self.upper.clone(), floor }
    }

    pub fn scale(&self, c: &R) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(e, x)| (e.clone(), x.mul(c)))
            .filter(|(_, x)| !x.is_zero())
            .collect();
        MultiSeries { terms, ..self.clone() }
    }

    pub fn map(&self, f: impl Fn(&R) -> R) -> Self {
        let terms = self.terms.iter().map(|(e, x)| (e.clone(), f(x))).filter(|(_, x)| !x.is_zero()).collect();
        MultiSeries { terms, ..self.clone() }
    }

    /// First stored term (in exponent order) satisfying `pred`.
    pub fn find_term(&self, pred: impl Fn(&[i64]) -> bool) -> Option<(&Vec<i64>, &R)> {
        self.terms.iter().find(|(e, c)| pred(e) && !c.is_zero())
    }

    fn check_region(&self, other: &Self) -> Result<()> {
        if self.region != other.region {
            return Err(Error::RegionError(format!(
                "region {:?} combined with region {:?}",
                self.region.order, other.region.order
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_region(other)?;
        let floor: Vec<i64> = self.floor.iter().zip(&other.floor).map(|(a, b)| *a.max(b)).collect();
        let upper = self.upper.iter().zip(&other.upper).map(|(a, b)| *a.max(b)).collect();
        let mut terms = BTreeMap::new();
        for (e, c) in self.terms.iter().chain(other.terms.iter()) {
            if !admits(&self.region.prefix(e), &floor) {
                continue;
            }
            let slot = terms.entry(e.clone()).or_insert_with(R::zero);
            *slot = slot.add(c);
        }
        terms.retain(|_, c: &mut R| !c.is_zero());
        Ok(MultiSeries { region: self.region.clone(), terms, upper, floor })
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.mul_within(other, &vec![NEG_INF; self.region.nvars()])
    }

    /// Product keeping only the window `target`; the result's floor is the
    /// larger of `target` and the floor the factors support.
    pub fn mul_within(&self, other: &Self, target: &[i64]) -> Result<Self> {
        self.check_region(other)?;
        let k = self.region.nvars();
        let mut floor = vec![NEG_INF; k];
        let mut upper = vec![NEG_INF; k];
        for j in 0..k {
            let f1 = clamp_inf(self.floor[j] + other.upper[j]);
            let f2 = clamp_inf(other.floor[j] + self.upper[j]);
            floor[j] = f1.max(f2).max(clamp_inf(target[j]));
            upper[j] = clamp_inf(self.upper[j] + other.upper[j]);
        }
        let with_prefix = |s: &Self| -> Vec<(Vec<i64>, Vec<i64>, R)> {
            s.terms.iter().map(|(e, c)| (e.clone(), s.region.prefix(e), c.clone())).collect()
        };
        let lhs = with_prefix(self);
        let rhs = with_prefix(other);
        let lhs: Vec<_> = lhs
            .into_iter()
            .filter(|(_, p, _)| (0..k).all(|j| clamp_inf(p[j] + other.upper[j]) >= floor[j]))
            .collect();
        let work = |(ea, pa, ca): &(Vec<i64>, Vec<i64>, R)| -> Vec<(Vec<i64>, R)> {
            let mut out = Vec::new();
            for (eb, pb, cb) in &rhs {
                if (0..k).all(|j| pa[j] + pb[j] >= floor[j]) {
                    let e: Vec<i64> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                    out.push((e, ca.mul(cb)));
                }
            }
            out
        };
        let merge = |mut acc: BTreeMap<Vec<i64>, R>, items: Vec<(Vec<i64>, R)>| {
            for (e, c) in items {
                let slot = acc.entry(e).or_insert_with(R::zero);
                *slot = slot.add(&c);
            }
            acc
        };
        let mut terms = if lhs.len() * rhs.len() > 256 {
            lhs.par_iter()
                .map(work)
                .fold(BTreeMap::new, merge)
                .reduce(BTreeMap::new, |a, b| merge(a, b.into_iter().collect()))
        } else {
            lhs.iter().map(work).fold(BTreeMap::new(), merge)
        };
        terms.retain(|_, c| !c.is_zero());
        Ok(MultiSeries { region: self.region.clone(), terms, upper, floor })
    }
}

impl<R: Ring> Arith for MultiSeries<R> {
    fn add(&self, other: &Self) -> Self {
        self.try_add(other).expect("multivariate sum across regions")
    }

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    fn mul(&self, other: &Self) -> Self {
        self.try_mul(other).expect("multivariate product across regions")
    }

    fn neg(&self) -> Self {
        self.map(|c| c.neg())
    }
}

impl<R: Ring> fmt::Debug for MultiSeries<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MultiSeries")
            .field("region", &self.region.order)
            .field("upper", &self.upper)
            .field("floor", &self.floor)
            .field("terms", &self.terms)
            .finish()
    }
}

/// Matrix product of multivariate-series matrices restricted to `floor`.
pub fn mat_mul_within<R: Ring>(
    x: &Mat2<MultiSeries<R>>,
    y: &Mat2<MultiSeries<R>>,
    floor: &[i64],
) -> Result<Mat2<MultiSeries<R>>> {
    let m = |p: &MultiSeries<R>, q: &MultiSeries<R>| p.mul_within(q, floor);
    Ok(Mat2::new(
        m(&x.a, &y.a)?.try_add(&m(&x.b, &y.c)?)?,
        m(&x.a, &y.b)?.try_add(&m(&x.b, &y.d)?)?,
        m(&x.c, &y.a)?.try_add(&m(&x.d, &y.c)?)?,
        m(&x.c, &y.b)?.try_add(&m(&x.d, &y.d)?)?,
    ))
}

/// [x, y] restricted to `floor`.
pub fn commutator_within<R: Ring>(
    x: &Mat2<MultiSeries<R>>,
    y: &Mat2<MultiSeries<R>>,
    floor: &[i64],
) -> Result<Mat2<MultiSeries<R>>> {
    Ok(mat_mul_within(x, y, floor)?.sub(&mat_mul_within(y, x, floor)?))
}
