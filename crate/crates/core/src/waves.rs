//! Wave functions of types A and B from the Riccati recursions, the pair
//! normalization, the rank-one factorization of R and the affine table.
//!
//! The exponential factors e^{±ε⁻¹Xξ} are never expanded. Every formula
//! below is written for the series tails φ_A, φ_B, with the exponentials
//! already cancelled.

use std::collections::BTreeMap;

use crate::diffpoly::InitialData;
use crate::eps::EpsLaurent;
use crate::error::{Error, Fault, Result};
use crate::mat2::Mat2;
use crate::multi::{MultiSeries, Region};
use crate::report::{Check, Report};
use crate::resolvent::{mr_coeffs, mr_matrix};
use crate::scalar::{Arith, Ring, Scalar};
use crate::xi::XiSeries;
use crate::xjet::XJet;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    A,
    B,
}

type Jet<Q> = XJet<Q>;
type Series<Q> = XiSeries<XJet<Q>>;

/// f = q_X/q and g = qr together with the data they came from.
#[derive(Clone, Debug)]
pub struct Potentials<Q: Scalar> {
    pub data: InitialData<Q>,
    pub f: Jet<Q>,
    pub g: Jet<Q>,
}

impl<Q: Scalar> Potentials<Q> {
    pub fn new(data: &InitialData<Q>) -> Result<Self> {
        data.require_invertible_q()?;
        let qinv = data.q.invert(data.eps_ceiling)?;
        let f = data.q.derive().mul(&qinv);
        let g = data.q.mul(&data.r);
        Ok(Potentials { data: data.clone(), f, g })
    }

    fn eps(&self) -> EpsLaurent<Q> {
        EpsLaurent::eps()
    }

    fn jet(&self, c: EpsLaurent<Q>) -> Jet<Q> {
        XJet::constant(c)
    }
}

/// Coefficients x₁…x_N (type A) or y₁…y_N (type B); index 0 is unused.
#[derive(Clone, Debug)]
pub struct RiccatiSeries<Q: Scalar> {
    pub kind: Kind,
    pub coeffs: Vec<Jet<Q>>,
}

impl<Q: Scalar> RiccatiSeries<Q> {
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Σ_{k≥1} c_k ξ^{−k}.
    pub fn series(&self) -> Series<Q> {
        let n = self.order() as i64;
        let mut v = vec![XJet::zero()];
        v.extend(self.coeffs[1..].iter().cloned());
        XiSeries::new(0, -n, v)
    }
}

pub fn riccati_series<Q: Scalar>(pot: &Potentials<Q>, kind: Kind, n: usize) -> RiccatiSeries<Q> {
    let eps = pot.eps();
    let half = EpsLaurent::constant(Q::from_ratio(1, 2));
    let mut c: Vec<Jet<Q>> = vec![XJet::zero()];
    for k in 0..n {
        let next = if k == 0 {
            match kind {
                Kind::A => pot.g.scale_q(&Q::from_ratio(-1, 2)),
                Kind::B => pot
                    .f
                    .derive()
                    .scale_eps(&eps.mul(&eps))
                    .add(&pot.g)
                    .scale_q(&Q::from_ratio(1, 2)),
            }
        } else {
            let conv = (1..k).fold(XJet::zero(), |acc: Jet<Q>, m| acc.add(&c[m].mul(&c[k - m])));
            let deriv = c[k].derive().scale_eps(&eps);
            let fx = pot.f.mul(&c[k]).scale_eps(&eps);
            let inner = match kind {
                Kind::A => deriv.neg().sub(&conv).add(&fx),
                Kind::B => deriv.add(&conv).add(&fx),
            };
            inner.scale_eps(&half)
        };
        c.push(next);
    }
    RiccatiSeries { kind, coeffs: c }
}

impl<Q: Scalar> Jet<Q> {
    fn scale_q(&self, c: &Q) -> Self {
        self.map_coeffs(|x| x.scale_q(c))
    }

    fn scale_eps(&self, c: &EpsLaurent<Q>) -> Self {
        self.map_coeffs(|x| x.mul(c))
    }
}

/// εx_X + x² + (2ξ − εf)x + g for type A, εy_X + y² + (εf − 2ξ)y + ε²f_X + g
/// for type B.
pub fn riccati_residual<Q: Scalar>(pot: &Potentials<Q>, s: &RiccatiSeries<Q>) -> Series<Q> {
    let eps = pot.eps();
    let x = s.series();
    let two_xi = XiSeries::monomial(XJet::from_int(2), 1);
    let ef = XiSeries::constant(pot.f.scale_eps(&eps));
    let lin = match s.kind {
        Kind::A => two_xi.sub(&ef),
        Kind::B => ef.sub(&two_xi),
    };
    let free = match s.kind {
        Kind::A => pot.g.clone(),
        Kind::B => pot.f.derive().scale_eps(&eps.mul(&eps)).add(&pot.g),
    };
    x.derive_x().scale_eps(&eps).add(&x.mul(&x)).add(&lin.mul(&x)).add(&XiSeries::constant(free))
}

/// φ = exp(ε⁻¹ ∂_X⁻¹ Σ c_k ξ^{−k}) with zero integration constants.
pub fn phi_build<Q: Scalar>(s: &RiccatiSeries<Q>) -> Result<Series<Q>> {
    let inv_eps = EpsLaurent::eps_pow(-1);
    let n = s.order() as i64;
    let arg = s.series().map(|c| c.antiderivative().scale_eps(&inv_eps));
    arg.exp(-n)
}

/// ε(φ_Aφ_{B,X} − φ_{A,X}φ_B) + (εf − 2ξ)φ_Aφ_B.
pub fn wronskian_d<Q: Scalar>(pot: &Potentials<Q>, phi_a: &Series<Q>, phi_b: &Series<Q>) -> Series<Q> {
    let eps = pot.eps();
    let cross = phi_a.mul(&phi_b.derive_x()).sub(&phi_a.derive_x().mul(phi_b)).scale_eps(&eps);
    let lin = XiSeries::constant(pot.f.scale_eps(&eps)).sub(&XiSeries::monomial(XJet::from_int(2), 1));
    cross.add(&lin.mul(&phi_a.mul(phi_b)))
}

fn all_coeffs<Q: Scalar>(s: &Series<Q>) -> impl Iterator<Item = (i64, Jet<Q>)> + '_ {
    (s.lowest()..=s.top()).rev().map(move |e| (e, s.coeff(e)))
}

fn x_dependence<Q: Scalar>(s: &Series<Q>) -> Option<i64> {
    s.terms().find(|(_, c)| !c.is_x_constant()).map(|(e, _)| e)
}

/// Smallest X-window over the coefficients of a series.
pub fn x_window<Q: Scalar>(s: &Series<Q>) -> Option<i64> {
    all_coeffs(s).filter_map(|(_, c)| c.valid_order()).min()
}

#[derive(Clone, Debug)]
pub struct WavePair<Q: Scalar> {
    pub phi_a: Series<Q>,
    pub phi_b: Series<Q>,
    pub d: Series<Q>,
    /// X-independent factor applied to φ_B by the normalization.
    pub multiplier: Option<Series<Q>>,
    pub normalized: bool,
}

/// Builds φ_A, φ_B to ξ^{−n} and d before normalization.
pub fn wave_pair<Q: Scalar>(pot: &Potentials<Q>, n: usize) -> Result<(WavePair<Q>, RiccatiSeries<Q>, RiccatiSeries<Q>)> {
    let (xa, xb) = rayon::join(|| riccati_series(pot, Kind::A, n), || riccati_series(pot, Kind::B, n));
    let phi_a = phi_build(&xa)?;
    let phi_b = phi_build(&xb)?;
    let d = wronskian_d(pot, &phi_a, &phi_b);
    Ok((WavePair { phi_a, phi_b, d, multiplier: None, normalized: false }, xa, xb))
}

/// Multiplies φ_B by (−2ξ)/d so that the pair condition d = −2ξ holds.
pub fn pair_fix<Q: Scalar>(pot: &Potentials<Q>, pair: &WavePair<Q>) -> Result<WavePair<Q>> {
    if let Some(e) = x_dependence(&pair.d) {
        return Err(Error::violation("waves.d_constant", format!("ξ^{e}")));
    }
    // d is X-independent, so its X⁰ coefficients are the whole value.
    let d0 = pair.d.map(|c| XJet::constant(c.at_zero()));
    let minus_two_xi = XiSeries::monomial(XJet::from_int(-2), 1);
    let lead = d0.coeff(1);
    let lead_inv = lead.at_zero().invert(pot.data.eps_ceiling)?;
    let inv = d0.inverse(&XJet::constant(lead_inv), pair.d.floor() - 2)?;
    let m = minus_two_xi.mul(&inv);
    let phi_b = pair.phi_b.mul(&m);
    let d = wronskian_d(pot, &pair.phi_a, &phi_b);
    Ok(WavePair { phi_a: pair.phi_a.clone(), phi_b, d, multiplier: Some(m), normalized: true })
}

/// ε²φ'' + (2εξ − ε²f)φ' + gφ for type A and, with u = qφ_B,
/// ε²u'' − (2εξ + ε²f)u' + (2εfξ + g)u for type B.
pub fn ode_residual<Q: Scalar>(pot: &Potentials<Q>, kind: Kind, phi: &Series<Q>) -> Series<Q> {
    let eps = pot.eps();
    let e2 = eps.mul(&eps);
    let xi = |c: Jet<Q>| XiSeries::monomial(c, 1);
    let konst = |c: Jet<Q>| XiSeries::constant(c);
    match kind {
        Kind::A => {
            let d1 = phi.derive_x();
            let d2 = d1.derive_x();
            let lin = xi(pot.jet(eps.scale_q(&Q::from_i64(2)))).sub(&konst(pot.f.scale_eps(&e2)));
            d2.scale_eps(&e2).add(&lin.mul(&d1)).add(&konst(pot.g.clone()).mul(phi))
        }
        Kind::B => {
            let u = konst(pot.data.q.clone()).mul(phi);
            let d1 = u.derive_x();
            let d2 = d1.derive_x();
            let lin = xi(pot.jet(eps.scale_q(&Q::from_i64(2)))).add(&konst(pot.f.scale_eps(&e2)));
            let zeroth = xi(pot.f.scale_eps(&eps.scale_q(&Q::from_i64(2)))).add(&konst(pot.g.clone()));
            d2.scale_eps(&e2).sub(&lin.mul(&d1)).add(&zeroth.mul(&u))
        }
    }
}

/// εφ_X − cφ, which vanishes when φ = exp(ε⁻¹∂⁻¹c) up to a constant factor.
pub fn log_derivative_residual<Q: Scalar>(phi: &Series<Q>, s: &RiccatiSeries<Q>) -> Series<Q> {
    phi.derive_x().scale_eps(&EpsLaurent::eps()).sub(&s.series().mul(phi))
}

/// 2·r₁ᵀr₂/d with r₁ = (φ_A, εφ_{A,X}/q) and
/// r₂ = (εφ_{B,X} + εfφ_B − 2ξφ_B, −qφ_B).
pub fn rank_one_resolvent<Q: Scalar>(pot: &Potentials<Q>, pair: &WavePair<Q>) -> Result<Mat2<Series<Q>>> {
    let eps = pot.eps();
    let qinv = pot.data.q.invert(pot.data.eps_ceiling)?;
    let konst = |c: Jet<Q>| XiSeries::constant(c);
    let (pa, pb) = (&pair.phi_a, &pair.phi_b);
    let r1 = [pa.clone(), pa.derive_x().scale_eps(&eps).mul(&konst(qinv))];
    let lin = konst(pot.f.scale_eps(&eps)).sub(&XiSeries::monomial(XJet::from_int(2), 1));
    let r2 = [pb.derive_x().scale_eps(&eps).add(&lin.mul(pb)), konst(pot.data.q.neg()).mul(pb)];
    let lead = pair.d.coeff(1).at_zero();
    let lead_inv = XJet::constant(lead.invert(pot.data.eps_ceiling)?);
    let two_over_d = pair.d.inverse(&lead_inv, pair.d.floor() - 2)?.mul(&konst(XJet::from_int(2)));
    let e = |i: usize, j: usize| two_over_d.mul(&r1[i].mul(&r2[j]));
    Ok(Mat2::new(e(0, 0), e(0, 1), e(1, 0), e(1, 1)))
}

/// R(ξ) from the recursion against the rank-one form from the wave pair,
/// entrywise on ξ^0…ξ^{−n}. Fails when the comparison is exact only below
/// X^min_x.
pub fn rp_check<Q: Scalar>(pot: &Potentials<Q>, pair: &WavePair<Q>, n: usize, min_x: i64) -> Result<Check> {
    let data = &pot.data;
    let mr = mr_coeffs(&data.q, &data.r, n, None);
    let rm = mr_matrix(&mr);
    let rw = rank_one_resolvent(pot, pair)?;
    let names = ["(1,1)", "(1,2)", "(2,1)", "(2,2)"];
    let mut locus = None;
    let mut window: Option<i64> = None;
    for ((a, b), name) in rm.entries().iter().zip(rw.entries()).zip(names) {
        for e in (-(n as i64)..=0).rev() {
            let diff = a.coeff(e).sub(&b.coeff_checked(e)?);
            if let Some(v) = diff.valid_order() {
                window = Some(window.map_or(v, |w| w.min(v)));
            }
            if locus.is_none() && !diff.is_zero() {
                locus = Some(format!("entry {name} at ξ^{e}"));
            }
        }
    }
    if locus.is_none() {
        if let Some(w) = window.filter(|&w| w < min_x) {
            locus = Some(format!("X-window X^{w} below the required X^{min_x}"));
        }
    }
    let w = window.map_or("exact".to_string(), |w| format!("X^0..X^{w}"));
    Ok(Check::from_outcome("waves.rank_one_resolvent", locus).with_window(format!("ξ^0..ξ^-{n}, {w}")))
}

/// A_{i,j} for i + j ≤ lmax.
#[derive(Clone, Debug, PartialEq)]
pub struct ATable<Q: Scalar> {
    pub lmax: usize,
    pub entries: BTreeMap<(usize, usize), Jet<Q>>,
}

impl<Q: Scalar> ATable<Q> {
    pub fn get(&self, i: usize, j: usize) -> Option<&Jet<Q>> {
        self.entries.get(&(i, j))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.values().all(|c| c.is_zero())
    }

    /// Smallest X-window among the entries.
    pub fn x_window(&self) -> Option<i64> {
        self.entries.values().filter_map(|c| c.valid_order()).min()
    }
}

/// Expands B(ξ,ν) = Num(ξ,ν)/(ν(ξ−ν)) in |ξ| > |ν|, checks that B + 2/(ξ−ν)
/// has only negative powers of both variables and reads off A_{i,j}.
pub fn a_table<Q: Scalar>(pot: &Potentials<Q>, pair: &WavePair<Q>, lmax: usize, fault: Option<Fault>) -> Result<ATable<Q>> {
    let eps = pot.eps();
    let region = Region::standard(2);
    let (xi, nu) = (0usize, 1usize);
    let target = vec![-(lmax as i64) - 1, -(lmax as i64) - 2];
    let emb = |v: usize, s: &Series<Q>| MultiSeries::embed(&region, v, s);
    let pa = emb(xi, &pair.phi_a);
    let pa_x = emb(xi, &pair.phi_a.derive_x());
    let pb = emb(nu, &pair.phi_b);
    let pb_x = emb(nu, &pair.phi_b.derive_x());
    let konst = |c: Jet<Q>| MultiSeries::monomial(&region, vec![0, 0], c);
    let nu_pow = |k: i64, c: Jet<Q>| MultiSeries::monomial(&region, vec![0, k], c);

    // Num/ν, whose prefix upper bound is (0, 0)
    let inner_floor: Vec<i64> = target.clone();
    let ab = pa.mul(&pb);
    let num = pa
        .mul(&pb_x)
        .sub(&pa_x.mul(&pb))
        .scale(&XJet::constant(eps.clone()))
        .add(&konst(pot.f.scale_eps(&eps)).mul(&ab));
    let num_over_nu = nu_pow(-1, XJet::one()).mul(&num).add(&ab.scale(&XJet::from_int(-2)));
    let kfloor: Vec<i64> = inner_floor.iter().zip(num_over_nu.upper()).map(|(t, u)| t - u.max(&0)).collect();
    let kernel = MultiSeries::kernel(&region, xi, nu, 1, &kfloor)?;
    let b = num_over_nu.mul_within(&kernel, &target)?;
    let sign = if fault == Some(Fault::KernelSign) { -2 } else { 2 };
    let reg = b.add(&MultiSeries::kernel(&region, xi, nu, 1, &target)?.scale(&XJet::from_int(sign)));
    if !reg.covers(&target) {
        return Err(Error::OutsideWindow(format!(
            "affine table to order {lmax} needs more ξ-orders (floor {:?})",
            reg.floor()
        )));
    }
    if let Some((e, _)) = reg.terms().filter(|(e, _)| e.iter().any(|&x| x >= 0)).last() {
        return Err(Error::violation("waves.affine_purity", format!("ξ^{} ν^{}", e[0], e[1])));
    }
    let mut entries = BTreeMap::new();
    for i in 0..=lmax {
        for j in 0..=(lmax - i) {
            let mut c = reg.coeff(&[-(i as i64) - 1, -(j as i64) - 1])?;
            if i == 0 && j == 0 && fault == Some(Fault::AEntry) {
                c = c.add(&XJet::one());
            }
            entries.insert((i, j), c);
        }
    }
    Ok(ATable { lmax, entries })
}

/// Everything the wave side produces for one data set.
#[derive(Clone, Debug)]
pub struct WaveRun<Q: Scalar> {
    pub pot: Potentials<Q>,
    pub raw: WavePair<Q>,
    pub pair: WavePair<Q>,
    pub xa: RiccatiSeries<Q>,
    pub xb: RiccatiSeries<Q>,
}

pub fn wave_run<Q: Scalar>(data: &InitialData<Q>) -> Result<WaveRun<Q>> {
    let pot = Potentials::new(data)?;
    let (raw, xa, xb) = wave_pair(&pot, data.n_xi)?;
    let pair = pair_fix(&pot, &raw)?;
    Ok(WaveRun { pot, raw, pair, xa, xb })
}

/// Passes when `s` vanishes; the window combines the ξ-range of `s` with
/// the X-window of the series it was built from.
fn zero_check<Q: Scalar>(name: &str, s: &Series<Q>, inputs: &[&Series<Q>]) -> Check {
    let locus = s.terms().next().map(|(e, _)| format!("ξ^{e}"));
    let w = inputs.iter().filter_map(|i| x_window(i)).min();
    let w = w.map_or("exact".to_string(), |w| format!("X^0..X^{w}"));
    Check::from_outcome(name, locus).with_window(format!("ξ^{}..ξ^{}, {w}", s.top(), s.floor()))
}

/// Riccati residuals, logarithmic derivatives, constancy and normalization
/// of d, and the second-order equation for both wave functions.
pub fn wave_suite<Q: Scalar>(run: &WaveRun<Q>) -> Report {
    let pot = &run.pot;
    let mut rep = Report::new();
    let (xa, xb) = (run.xa.series(), run.xb.series());
    let (pa, pb) = (&run.pair.phi_a, &run.pair.phi_b);
    rep.push(zero_check("waves.riccati_a", &riccati_residual(pot, &run.xa), &[&xa.derive_x()]));
    rep.push(zero_check("waves.riccati_b", &riccati_residual(pot, &run.xb), &[&xb.derive_x()]));
    let la = log_derivative_residual(&run.raw.phi_a, &run.xa);
    rep.push(zero_check("waves.log_derivative_a", &la, &[&run.raw.phi_a.derive_x()]));
    let lb = log_derivative_residual(&run.raw.phi_b, &run.xb);
    rep.push(zero_check("waves.log_derivative_b", &lb, &[&run.raw.phi_b.derive_x()]));
    let dx = run.raw.d.derive_x();
    rep.push(zero_check("waves.d_constant", &dx, &[&run.raw.d]));
    let fixed = run.pair.d.sub(&XiSeries::monomial(XJet::from_int(-2), 1));
    rep.push(zero_check("waves.pair_condition", &fixed, &[pa, pb]));
    let (a2, b2) = (pa.derive_x().derive_x(), XiSeries::constant(pot.data.q.clone()).mul(pb).derive_x().derive_x());
    rep.push(zero_check("waves.ode_a", &ode_residual(pot, Kind::A, pa), &[&a2]));
    rep.push(zero_check("waves.ode_b", &ode_residual(pot, Kind::B, pb), &[&b2]));
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn data(q: &[i64], r: &[i64], n_x: usize, n_xi: usize) -> InitialData<Rational> {
        InitialData::polynomial(q, r, n_x, n_xi, 8)
    }

    fn eps(c: (i64, i64), k: i64) -> EpsLaurent<Rational> {
        EpsLaurent::monomial(Rational::from_ratio(c.0, c.1), k)
    }

    fn jet(c: Vec<EpsLaurent<Rational>>) -> XJet<Rational> {
        XJet::from_coeffs(c, 12)
    }

    #[test]
    fn data2_pair_values() {
        let run = wave_run(&data(&[1, 1], &[1, -1], 12, 8)).unwrap();
        assert!(wave_suite(&run).passed());
        let zero = EpsLaurent::exact_zero();
        let phi_a1 = jet(vec![zero.clone(), eps((-1, 2), -1), zero.clone(), eps((1, 6), -1)]);
        assert!(run.pair.phi_a.coeff(-1).sub(&phi_a1).is_zero());
        let d = &run.raw.d;
        assert_eq!(d.coeff(1).at_zero(), eps((-2, 1), 0));
        assert_eq!(d.coeff(0).at_zero(), eps((1, 1), 1));
        assert_eq!(d.coeff(-1).at_zero(), eps((1, 1), 0).add(&eps((-1, 2), 2)));
        let m = run.pair.multiplier.as_ref().unwrap();
        assert_eq!(m.coeff(-1).at_zero(), eps((1, 2), 1));
        assert_eq!(m.coeff(-2).at_zero(), eps((1, 2), 0));
        let t = a_table(&run.pot, &run.pair, 4, None).unwrap();
        let a00 = jet(vec![zero.clone(), eps((-1, 1), -1), zero.clone(), eps((1, 3), -1)]);
        assert!(t.get(0, 0).unwrap().sub(&a00).is_zero());
        assert_eq!(t.get(0, 1).unwrap().at_zero(), eps((-1, 2), 0));
        assert_eq!(t.get(1, 1).unwrap().at_zero(), eps((-1, 4), 1));
    }

    #[test]
    fn rank_one_form_reaches_the_window() {
        for (q, r) in [(&[1][..], &[1][..]), (&[1, 1][..], &[1, -1][..])] {
            let run = wave_run(&data(q, r, 16, 8)).unwrap();
            assert!(rp_check(&run.pot, &run.pair, 6, 8).unwrap().passed);
        }
        let run = wave_run(&data(&[1, 1], &[1, -1], 12, 8)).unwrap();
        let c = rp_check(&run.pot, &run.pair, 6, 8).unwrap();
        assert_eq!(c.locus.as_deref(), Some("X-window X^7 below the required X^8"));
    }

    #[test]
    fn constant_q_without_r_has_no_affine_part() {
        let run = wave_run(&data(&[3], &[0], 12, 8)).unwrap();
        let t = a_table(&run.pot, &run.pair, 6, None).unwrap();
        assert!(t.is_zero());
    }

    #[test]
    fn faults_are_detected() {
        let run = wave_run(&data(&[1, 1], &[1, -1], 12, 8)).unwrap();
        match a_table(&run.pot, &run.pair, 4, Some(Fault::KernelSign)) {
            Err(Error::IdentityViolation { identity, locus }) => {
                assert_eq!(identity, "waves.affine_purity");
                assert_eq!(locus, "ξ^-1 ν^0");
            }
            other => panic!("unexpected {other:?}"),
        }
        let good = a_table(&run.pot, &run.pair, 2, None).unwrap();
        let bad = a_table(&run.pot, &run.pair, 2, Some(Fault::AEntry)).unwrap();
        assert!(bad.get(0, 0).unwrap().sub(good.get(0, 0).unwrap()).sub(&XJet::one()).is_zero());
    }

    #[test]
    fn zero_q_is_rejected() {
        assert!(Potentials::new(&data(&[0, 1], &[1], 8, 8)).is_err());
    }

    #[test]
    fn too_few_xi_orders_is_an_error() {
        let run = wave_run(&data(&[1], &[1], 8, 4)).unwrap();
        assert!(matches!(a_table(&run.pot, &run.pair, 6, None), Err(Error::OutsideWindow(_))));
    }
}
