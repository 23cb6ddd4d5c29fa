//! Differential polynomials in the jet variables q⁽ᵐ⁾, r⁽ᵐ⁾.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::eps::EpsLaurent;
use crate::error::{Error, Result};
use crate::scalar::{Arith, DiffAlgebra, Ring, Scalar};
use crate::xjet::XJet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Species {
    Q,
    R,
}

impl Species {
    pub fn name(self) -> &'static str {
        match self {
            Species::Q => "q",
            Species::R => "r",
        }
    }
}

/// The symbol q⁽ᵐ⁾ or r⁽ᵐ⁾.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct JetVar {
    pub species: Species,
    pub order: u32,
}

impl JetVar {
    pub fn q(order: u32) -> Self {
        JetVar { species: Species::Q, order }
    }

    pub fn r(order: u32) -> Self {
        JetVar { species: Species::R, order }
    }

    pub fn derived(self) -> Self {
        JetVar { order: self.order + 1, ..self }
    }
}

impl fmt::Display for JetVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.species.name(), self.order)
    }
}

/// Sorted list of (variable, power) with positive powers.
pub type Monomial = Vec<(JetVar, u32)>;

fn mono_mul(a: &Monomial, b: &Monomial) -> Monomial {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push((a[i].0, a[i].1 + b[j].1));
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Σ c_M·M with c_M ∈ ε-Laurent series, in canonical monomial order.
#[derive(Clone, PartialEq)]
pub struct DiffPoly<Q> {
    terms: BTreeMap<Monomial, EpsLaurent<Q>>,
}

impl<Q: Scalar> DiffPoly<Q> {
    pub fn var(v: JetVar) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![(v, 1)], EpsLaurent::one());
        DiffPoly { terms }
    }

    pub fn q(order: u32) -> Self {
        Self::var(JetVar::q(order))
    }

    pub fn r(order: u32) -> Self {
        Self::var(JetVar::r(order))
    }

    pub fn constant(c: EpsLaurent<Q>) -> Self {
        Self::term(Vec::new(), c)
    }

    pub fn term(m: Monomial, c: EpsLaurent<Q>) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        DiffPoly { terms }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &EpsLaurent<Q>)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Highest derivative order of any variable present.
    pub fn jet_order(&self) -> Option<u32> {
        self.terms.keys().flat_map(|m| m.iter().map(|(v, _)| v.order)).max()
    }

    fn add_term(&mut self, m: Monomial, c: EpsLaurent<Q>) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(slot) => {
                *slot = slot.add(&c);
                if slot.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    /// The derivation sending each jet variable v to `image(v)`, extended
    /// to products by Leibniz.
    pub fn apply_derivation(&self, image: &mut impl FnMut(JetVar) -> DiffPoly<Q>) -> Self {
        let mut cache: HashMap<JetVar, DiffPoly<Q>> = HashMap::new();
        let mut out = DiffPoly::zero();
        for (m, c) in &self.terms {
            for (idx, &(v, p)) in m.iter().enumerate() {
                let img = cache.entry(v).or_insert_with(|| image(v));
                if img.is_empty() {
                    continue;
                }
                let mut rest = m.clone();
                if p == 1 {
                    rest.remove(idx);
                } else {
                    rest[idx].1 = p - 1;
                }
                let coeff = c.scale_q(&Q::from_i64(p as i64));
                for (im, ic) in &img.terms {
                    out.add_term(mono_mul(&rest, im), coeff.mul(ic));
                }
            }
        }
        out
    }

    /// ∂_X, acting by q⁽ᵐ⁾ ↦ q⁽ᵐ⁺¹⁾ and r⁽ᵐ⁾ ↦ r⁽ᵐ⁺¹⁾.
    pub fn derive(&self) -> Self {
        let mut out = DiffPoly::zero();
        for (m, c) in &self.terms {
            for (idx, &(v, p)) in m.iter().enumerate() {
                let mut rest = m.clone();
                if p == 1 {
                    rest.remove(idx);
                } else {
                    rest[idx].1 = p - 1;
                }
                out.add_term(mono_mul(&rest, &vec![(v.derived(), 1)]), c.scale_q(&Q::from_i64(p as i64)));
            }
        }
        out
    }

    /// n-fold ∂_X.
    pub fn derive_n(&self, n: u32) -> Self {
        (0..n).fold(self.clone(), |p, _| p.derive())
    }

    /// The homomorphism q⁽ᵐ⁾ ↦ ∂_X^m q, r⁽ᵐ⁾ ↦ ∂_X^m r into X-jets.
    pub fn eval(&self, data: &InitialData<Q>) -> XJet<Q> {
        let mut values: HashMap<(JetVar, u32), XJet<Q>> = HashMap::new();
        let mut out = XJet::zero().with_cap(data.n_x);
        for (m, c) in &self.terms {
            let mut prod = XJet::constant(c.clone());
            for &(v, p) in m {
                let val = values
                    .entry((v, p))
                    .or_insert_with(|| {
                        let base = data.jet(v);
                        (1..p).fold(base.clone(), |acc, _| acc.mul(&base))
                    })
                    .clone();
                prod = prod.mul(&val);
            }
            out = out.add(&prod);
        }
        out
    }

    pub fn to_text(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut pieces = Vec::new();
        for (m, c) in &self.terms {
            for (k, r) in c.terms() {
                let mut factors = Vec::new();
                let bare = k == 0 && m.is_empty();
                if !r.is_one() || bare {
                    factors.push(format!("({r})"));
                }
                match k {
                    0 => {}
                    1 => factors.push("ε".into()),
                    k => factors.push(format!("ε^{k}")),
                }
                for (v, p) in m {
                    if *p == 1 {
                        factors.push(v.to_string());
                    } else {
                        factors.push(format!("{v}^{p}"));
                    }
                }
                if factors.is_empty() {
                    factors.push("(1)".into());
                }
                pieces.push(factors.join("·"));
            }
            if let Some(ceil) = c.ceiling() {
                pieces.push(format!("O(ε^{})", ceil + 1));
            }
        }
        pieces.join(" + ")
    }
}

impl<Q: Scalar> Arith for DiffPoly<Q> {
    fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.neg());
        }
        out
    }

    fn mul(&self, other: &Self) -> Self {
        let mut out = DiffPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(mono_mul(ma, mb), ca.mul(cb));
            }
        }
        out
    }

    fn neg(&self) -> Self {
        DiffPoly { terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect() }
    }
}

impl<Q: Scalar> Ring for DiffPoly<Q> {
    fn zero() -> Self {
        DiffPoly { terms: BTreeMap::new() }
    }
    fn one() -> Self {
        Self::constant(EpsLaurent::one())
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn from_int(n: i64) -> Self {
        Self::constant(EpsLaurent::from_int(n))
    }
}

impl<Q: Scalar> DiffAlgebra<Q> for DiffPoly<Q> {
    fn from_eps(c: EpsLaurent<Q>) -> Self {
        Self::constant(c)
    }
    fn scale(&self, c: &EpsLaurent<Q>) -> Self {
        let mut out = DiffPoly::zero();
        for (m, x) in &self.terms {
            out.add_term(m.clone(), x.mul(c));
        }
        out
    }
    fn derive(&self) -> Self {
        DiffPoly::derive(self)
    }
}

impl<Q: Scalar> fmt::Display for DiffPoly<Q> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl<Q: Scalar> fmt::Debug for DiffPoly<Q> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Initial data on the slice t_{>0} = 0 plus truncation parameters.
#[derive(Clone, PartialEq)]
pub struct InitialData<Q> {
    pub q: XJet<Q>,
    pub r: XJet<Q>,
    pub n_x: usize,
    pub n_xi: usize,
    pub eps_ceiling: i64,
}

impl<Q: Scalar> InitialData<Q> {
    pub fn new(q: XJet<Q>, r: XJet<Q>, n_x: usize, n_xi: usize, eps_ceiling: i64) -> Self {
        InitialData { q: q.with_cap(n_x), r: r.with_cap(n_x), n_x, n_xi, eps_ceiling }
    }

    /// q and r given as X-polynomials with rational coefficients.
    pub fn polynomial(q: &[i64], r: &[i64], n_x: usize, n_xi: usize, eps_ceiling: i64) -> Self {
        let lift = |v: &[i64]| XJet::from_rationals(v.iter().map(|&c| Q::from_i64(c)).collect(), n_x);
        Self::new(lift(q), lift(r), n_x, n_xi, eps_ceiling)
    }

    /// Same data with different truncation parameters.
    pub fn with_truncation(&self, n_x: usize, n_xi: usize) -> Self {
        Self::new(self.q.clone().with_cap(n_x), self.r.clone().with_cap(n_x), n_x, n_xi, self.eps_ceiling)
    }

    /// ∂_X^m applied to the data for the given species.
    pub fn jet(&self, v: JetVar) -> XJet<Q> {
        let base = match v.species {
            Species::Q => &self.q,
            Species::R => &self.r,
        };
        (0..v.order).fold(base.clone(), |acc, _| acc.derive())
    }

    /// Fails unless the X⁰ coefficient of q is invertible.
    pub fn require_invertible_q(&self) -> Result<()> {
        if self.q.at_zero().is_zero() {
            return Err(Error::NotInvertible("q has vanishing constant term"));
        }
        Ok(())
    }
}

impl<Q: Scalar> fmt::Debug for InitialData<Q> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("InitialData")
            .field("q", &self.q)
            .field("r", &self.r)
            .field("n_x", &self.n_x)
            .field("n_xi", &self.n_xi)
            .field("eps_ceiling", &self.eps_ceiling)
            .finish()
    }
}
