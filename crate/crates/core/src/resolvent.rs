//! Basic matrix resolvent of the AKNS Lax operator, its flows, the
//! derivation identity and the two-point tau-structure.

use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;

use crate::diffpoly::{DiffPoly, JetVar, Species};
use crate::eps::EpsLaurent;
use crate::error::{Error, Fault, Result};
use crate::mat2::Mat2;
use crate::multi::{commutator_within, MultiSeries, Region};
use crate::report::{Check, Report};
use crate::scalar::{Arith, DiffAlgebra, Ring, Scalar};
use crate::xi::XiSeries;

/// Levels A_j, B_j, C_j of the resolvent for j = 0…N.
#[derive(Clone, Debug, PartialEq)]
pub struct MRData<R> {
    pub a: Vec<R>,
    pub b: Vec<R>,
    pub c: Vec<R>,
}

impl<R: Ring> MRData<R> {
    pub fn order(&self) -> usize {
        self.a.len() - 1
    }

    /// [[A_j, B_j], [C_j, −A_j]].
    pub fn level(&self, j: usize) -> Mat2<R> {
        Mat2::new(self.a[j].clone(), self.b[j].clone(), self.c[j].clone(), self.a[j].neg())
    }
}

fn eps_half<Q: Scalar>(fault: bool) -> EpsLaurent<Q> {
    let den = if fault { 3 } else { 2 };
    EpsLaurent::monomial(Q::from_ratio(1, den), 1)
}

/// Runs the recursion to level `n` starting from A₀ = 0, B₀ = q, C₀ = −r.
pub fn mr_coeffs<Q: Scalar, R: DiffAlgebra<Q>>(q: &R, r: &R, n: usize, fault: Option<Fault>) -> MRData<R> {
    let mut a = vec![R::zero()];
    let mut b = vec![q.clone()];
    let mut c = vec![r.neg()];
    let minus_half = EpsLaurent::constant(Q::from_ratio(-1, 2));
    for j in 0..n {
        let half = eps_half::<Q>(j == 0 && fault == Some(Fault::RecursionConstant));
        b.push(b[j].derive().scale(&half).add(&q.mul(&a[j])));
        c.push(c[j].derive().scale(&half).neg().sub(&r.mul(&a[j])));
        let k = j + 1;
        let mut acc = R::zero();
        for i in 0..k {
            let l = k - 1 - i;
            acc = acc.add(&a[i].mul(&a[l])).add(&b[i].mul(&c[l]));
        }
        a.push(acc.scale(&minus_half));
    }
    MRData { a, b, c }
}

/// Symbolic resolvent over the differential polynomial ring.
pub fn mr_coeffs_symbolic<Q: Scalar>(n: usize, fault: Option<Fault>) -> MRData<DiffPoly<Q>> {
    mr_coeffs(&DiffPoly::q(0), &DiffPoly::r(0), n, fault)
}

/// R(ξ) = diag(2,0) + Σ_{j≤N} ξ^{−j−1}[[A_j, B_j], [C_j, −A_j]].
pub fn mr_matrix<R: Ring>(data: &MRData<R>) -> Mat2<XiSeries<R>> {
    let n = data.order() as i64;
    let floor = -n - 1;
    let tail = |v: &[R], sign: bool, lead: R| {
        let mut coeffs = vec![lead];
        coeffs.extend(v.iter().map(|x| if sign { x.neg() } else { x.clone() }));
        XiSeries::new(0, floor, coeffs)
    };
    Mat2::new(
        tail(&data.a, false, R::from_int(2)),
        tail(&data.b, false, R::zero()),
        tail(&data.c, false, R::zero()),
        tail(&data.a, true, R::zero()),
    )
}

/// U(ξ) = [[−ξ, −q], [r, ξ]], so that ℒ = ε∂_X + U.
pub fn lax_potential<R: Ring>(q: &R, r: &R) -> Mat2<XiSeries<R>> {
    Mat2::new(
        XiSeries::monomial(R::from_int(-1), 1),
        XiSeries::constant(q.neg()),
        XiSeries::constant(r.clone()),
        XiSeries::monomial(R::one(), 1),
    )
}

fn first_nonzero<R: Ring>(s: &XiSeries<R>) -> Option<i64> {
    s.terms().map(|(e, _)| e).next()
}

fn first_nonzero_entry<R: Ring>(m: &Mat2<XiSeries<R>>) -> Option<String> {
    let names = ["(1,1)", "(1,2)", "(2,1)", "(2,2)"];
    m.entries()
        .iter()
        .zip(names)
        .find_map(|(s, name)| first_nonzero(s).map(|e| format!("entry {name} at ξ^{e}")))
}

/// Resolvent properties: ε∂_X A_j = rB_j + qC_j, Tr R = 2, det R = 0 and
/// [ℒ, R] = 0, each checked coefficientwise on its exact window.
pub fn mr_verify<Q: Scalar, R: DiffAlgebra<Q>>(q: &R, r: &R, n: usize, fault: Option<Fault>) -> Report {
    let data = mr_coeffs(q, r, n, fault);
    mr_verify_data(q, r, &data)
}

pub fn mr_verify_data<Q: Scalar, R: DiffAlgebra<Q>>(q: &R, r: &R, data: &MRData<R>) -> Report {
    let n = data.order();
    let eps = EpsLaurent::<Q>::eps();
    let mut report = Report::new();

    let bad = (0..=n).find(|&j| {
        let lhs = data.a[j].derive().scale(&eps);
        !lhs.sub(&r.mul(&data.b[j])).sub(&q.mul(&data.c[j])).is_zero()
    });
    report.push(
        Check::from_outcome("resolvent.consistency", bad.map(|j| format!("j={j}")))
            .with_window(format!("j=0..{n}")),
    );

    let rm = mr_matrix(data);
    let tr = rm.trace().sub(&XiSeries::constant(R::from_int(2)));
    report.push(
        Check::from_outcome("resolvent.trace", first_nonzero(&tr).map(|e| format!("ξ^{e}")))
            .with_window(format!("ξ^0..ξ^{}", tr.floor())),
    );

    let det = rm.det();
    report.push(
        Check::from_outcome("resolvent.det", first_nonzero(&det).map(|e| format!("ξ^{e}")))
            .with_window(format!("ξ^0..ξ^{}", det.floor())),
    );

    let u = lax_potential(q, r);
    let lr = rm.map(|s| s.derive_x().scale_eps(&eps)).add(&u.commutator(&rm));
    report.push(
        Check::from_outcome("resolvent.lax_commutator", first_nonzero_entry(&lr))
            .with_window(format!("ξ^1..ξ^{}", lr.a.floor())),
    );
    report
}

/// Flow polynomials P_j^q, P_j^r and the derivations D_j they generate.
pub struct FlowTable<Q> {
    pub pq: Vec<DiffPoly<Q>>,
    pub pr: Vec<DiffPoly<Q>>,
    images: Mutex<HashMap<(usize, JetVar), DiffPoly<Q>>>,
}

impl<Q: Scalar> FlowTable<Q> {
    /// Flows t₀…t_{jmax}, read off from B_{j+1}, C_{j+1}.
    pub fn new(jmax: usize) -> Self {
        let mr = mr_coeffs_symbolic::<Q>(jmax + 1, None);
        let mut pq = Vec::new();
        let mut pr = Vec::new();
        for j in 0..=jmax {
            let s = EpsLaurent::monomial(Q::from_i64(1 << (j + 1)), -1);
            pq.push(mr.b[j + 1].scale(&s));
            pr.push(mr.c[j + 1].scale(&s));
        }
        FlowTable { pq, pr, images: Mutex::new(HashMap::new()) }
    }

    pub fn jmax(&self) -> usize {
        self.pq.len() - 1
    }

    pub fn flow_poly(&self, j: usize) -> (&DiffPoly<Q>, &DiffPoly<Q>) {
        (&self.pq[j], &self.pr[j])
    }

    /// D_j(v) = ∂_X^m P_j for v = q⁽ᵐ⁾ or r⁽ᵐ⁾.
    pub fn image(&self, j: usize, v: JetVar) -> DiffPoly<Q> {
        if let Some(p) = self.images.lock().expect("flow cache").get(&(j, v)) {
            return p.clone();
        }
        let computed = if v.order == 0 {
            match v.species {
                Species::Q => self.pq[j].clone(),
                Species::R => self.pr[j].clone(),
            }
        } else {
            self.image(j, JetVar { order: v.order - 1, ..v }).derive()
        };
        self.images.lock().expect("flow cache").insert((j, v), computed.clone());
        computed
    }

    /// The derivation D_j applied to p.
    pub fn derive(&self, j: usize, p: &DiffPoly<Q>) -> DiffPoly<Q> {
        p.apply_derivation(&mut |v| self.image(j, v))
    }

    /// Compares D_j-images of ℒ with 2^j ε⁻¹[V_j, ℒ], V_j = (ξ^{j+1}R)₊:
    /// the right side must be ξ-free with off-diagonal entries −P_j^q, P_j^r.
    pub fn lax_check(&self, j: usize) -> Check {
        let (q, r) = (DiffPoly::<Q>::q(0), DiffPoly::<Q>::r(0));
        let mr = mr_coeffs_symbolic::<Q>(j + 1, None);
        let mut v = Mat2::new(
            XiSeries::monomial(DiffPoly::from_int(2), j as i64 + 1),
            XiSeries::zero(),
            XiSeries::zero(),
            XiSeries::zero(),
        );
        for l in 0..=j {
            let lvl = mr.level(l).map(|x| XiSeries::monomial(x.clone(), (j - l) as i64));
            v = v.add(&lvl);
        }
        let eps = EpsLaurent::<Q>::eps();
        let u = lax_potential(&q, &r);
        let scale = EpsLaurent::monomial(Q::from_i64(1 << j), -1);
        let rhs = v.map(|s| s.derive_x().scale_eps(&eps).neg()).add(&v.commutator(&u)).map(|s| s.scale_eps(&scale));
        let expected = Mat2::new(
            XiSeries::zero(),
            XiSeries::constant(self.pq[j].neg()),
            XiSeries::constant(self.pr[j].clone()),
            XiSeries::zero(),
        );
        Check::from_outcome(format!("flows.lax_equation j={j}"), first_nonzero_entry(&rhs.sub(&expected)))
    }

    /// [D_i, D_j] on q⁽ᵐ⁾ and r⁽ᵐ⁾ for m ≤ `jet_order`. Returns the first
    /// offending (i, j, variable).
    pub fn commutator_check(&self, imax: usize, jet_order: u32) -> Check {
        let mut failure = None;
        'outer: for i in 0..=imax {
            for j in (i + 1)..=imax {
                for m in 0..=jet_order {
                    for v in [JetVar::q(m), JetVar::r(m)] {
                        let lhs = self.derive(i, &self.image(j, v));
                        let rhs = self.derive(j, &self.image(i, v));
                        if !lhs.sub(&rhs).is_zero() {
                            failure = Some(format!("[D_{i}, D_{j}] on {v}"));
                            break 'outer;
                        }
                    }
                }
            }
        }
        Check::from_outcome("flows.commute", failure).with_window(format!("i,j ≤ {imax}, jet order ≤ {jet_order}"))
    }
}

/// Ω_{i,j} for i ≤ imax, j ≤ jmax.
#[derive(Clone, Debug, PartialEq)]
pub struct OmegaTable<R> {
    pub imax: usize,
    pub jmax: usize,
    pub entries: BTreeMap<(usize, usize), R>,
}

impl<R: Ring> OmegaTable<R> {
    pub fn get(&self, i: usize, j: usize) -> &R {
        &self.entries[&(i, j)]
    }

    /// First (i, j) with Ω_{i,j} ≠ Ω_{j,i} among square-bounded indices.
    pub fn asymmetry(&self) -> Option<(usize, usize)> {
        let m = self.imax.min(self.jmax);
        (0..=m).flat_map(|i| (0..=m).map(move |j| (i, j))).find(|&(i, j)| !self.get(i, j).sub(self.get(j, i)).is_zero())
    }
}

/// Reads Ω_{i,j} off (Tr R(ξ)R(ν) − 4)/(ξ−ν)² = Σ Ω_{i,j} 2^{−i−j} ξ^{−i−2} ν^{−j−2},
/// expanded in |ξ| > |ν| after checking that no ξ^{≥−1} or ν^{≥−1} term survives.
pub fn omega_table<Q: Scalar, R: DiffAlgebra<Q>>(data: &MRData<R>, imax: usize, jmax: usize) -> Result<OmegaTable<R>> {
    let region = Region::standard(2);
    let target = vec![-(imax as i64) - 2, -((imax + jmax) as i64) - 4];
    let rm = mr_matrix(data);
    let rx = rm.map(|s| MultiSeries::embed(&region, 0, s));
    let rn = rm.map(|s| MultiSeries::embed(&region, 1, s));
    let kernel = MultiSeries::kernel(&region, 0, 1, 2, &target)?;
    let inner: Vec<i64> = target.iter().zip(kernel.upper()).map(|(t, u)| t - u).collect();
    let tr = rx
        .a
        .mul_within(&rn.a, &inner)?
        .try_add(&rx.b.mul_within(&rn.c, &inner)?)?
        .try_add(&rx.c.mul_within(&rn.b, &inner)?)?
        .try_add(&rx.d.mul_within(&rn.d, &inner)?)?
        .try_add(&MultiSeries::monomial(&region, vec![0, 0], R::from_int(-4)))?;
    let gen = tr.mul_within(&kernel, &target)?;
    if !gen.covers(&target) {
        return Err(Error::OutsideWindow(format!(
            "two-point series known to prefix floor {:?}, need {target:?}; raise the resolvent order",
            gen.floor()
        )));
    }
    if let Some((e, _)) = gen.find_term(|e| e.iter().any(|&x| x >= -1)) {
        return Err(Error::violation("omega.regularity", format!("ξ^{} ν^{}", e[0], e[1])));
    }
    let mut entries = BTreeMap::new();
    for i in 0..=imax {
        for j in 0..=jmax {
            let c = gen.coeff(&[-(i as i64) - 2, -(j as i64) - 2])?;
            let s = EpsLaurent::constant(Q::from_i64(1 << (i + j)));
            entries.insert((i, j), c.scale(&s));
        }
    }
    Ok(OmegaTable { imax, jmax, entries })
}

/// Resolvent order sufficient for `omega_table(imax, jmax)`.
pub fn omega_order(imax: usize, jmax: usize) -> usize {
    imax + jmax + 1
}

/// ε∇(ν)R(ξ) = [R(ν), R(ξ)]/(ν−ξ) + [−ν⁻¹diag(2,0), R(ξ)] with
/// ∇(ν) = Σ_j 2^{−j} ν^{−j−2} D_j, expanded in |ν| > |ξ| and compared at
/// ν^{−1}…ν^{−nu_max} (with ξ-orders up to ξ^{−xi_max} beneath them).
pub fn nabla_check<Q: Scalar>(nu_max: usize, xi_max: usize, fault: Option<Fault>) -> Result<Report> {
    let n = nu_max + xi_max - 2;
    let flows = FlowTable::<Q>::new(nu_max.saturating_sub(2));
    let data = mr_coeffs_symbolic::<Q>(n, None);
    let region = Region::standard(2);
    let (nu, xi) = (0usize, 1usize);
    let target = vec![-(nu_max as i64), -((nu_max + xi_max) as i64)];
    let mut lhs_entries: [BTreeMap<Vec<i64>, DiffPoly<Q>>; 4] = Default::default();
    for j in 0..=nu_max.saturating_sub(2) {
        let e_nu = -(j as i64) - 2;
        let s = EpsLaurent::monomial(Q::from_ratio(1, 1 << j), 1);
        for l in 0..=n {
            let e_xi = -(l as i64) - 1;
            if e_nu + e_xi < target[1] {
                break;
            }
            let lvl = data.level(l);
            for (slot, x) in lhs_entries.iter_mut().zip(lvl.entries()) {
                let d = flows.derive(j, x).scale(&s);
                if !d.is_zero() {
                    slot.insert(vec![e_nu, e_xi], d);
                }
            }
        }
    }
    let build = |m: &BTreeMap<Vec<i64>, DiffPoly<Q>>| -> Result<MultiSeries<DiffPoly<Q>>> {
        let mut acc = MultiSeries::zero(&region);
        for (e, c) in m {
            acc = acc.try_add(&MultiSeries::monomial(&region, e.clone(), c.clone()))?;
        }
        Ok(acc.truncate(&target))
    };
    let [la, lb, lc, ld] = &lhs_entries;
    let lhs = Mat2::new(build(la)?, build(lb)?, build(lc)?, build(ld)?);

    let rm = mr_matrix(&data);
    let rn = rm.map(|s| MultiSeries::embed(&region, nu, s));
    let rx = rm.map(|s| MultiSeries::embed(&region, xi, s));
    let kernel = MultiSeries::kernel(&region, nu, xi, 1, &target)?;
    let inner: Vec<i64> = target.iter().zip(kernel.upper()).map(|(t, u)| t - u).collect();
    let comm = commutator_within(&rn, &rx, &inner)?;
    let mut rhs = comm.map(|s| s.mul_within(&kernel, &target).expect("same region"));
    if fault != Some(Fault::DropDiagonal) {
        let dmat = Mat2::new(
            MultiSeries::monomial(&region, vec![-1, 0], DiffPoly::from_int(-2)),
            MultiSeries::zero(&region),
            MultiSeries::zero(&region),
            MultiSeries::zero(&region),
        );
        rhs = rhs.add(&commutator_within(&dmat, &rx, &target)?);
    }
    let diff = lhs.sub(&rhs);
    if !diff.a.covers(&target) || !diff.b.covers(&target) {
        return Err(Error::OutsideWindow(format!("derivation identity known to {:?}, need {target:?}", diff.a.floor())));
    }
    let names = ["(1,1)", "(1,2)", "(2,1)", "(2,2)"];
    let mut locus = None;
    'scan: for e_nu in (-(nu_max as i64)..=0).rev() {
        for e_xi in (-(xi_max as i64)..=0).rev() {
            for (s, name) in diff.entries().iter().zip(names) {
                if !s.coeff(&[e_nu, e_xi])?.is_zero() {
                    locus = Some(format!("ν^{e_nu} ξ^{e_xi} entry {name}"));
                    break 'scan;
                }
            }
        }
    }
    let mut report = Report::new();
    report.push(
        Check::from_outcome("nabla.identity", locus)
            .with_window(format!("ν^-1..ν^-{nu_max}, ξ^0..ξ^-{xi_max}")),
    );
    Ok(report)
}

/// Ω_{k,0} against 2^{k+1}A_{k+1}; the index form 2^k A_k is reported as
/// a note only.
pub fn omega_column_check<Q: Scalar, R: DiffAlgebra<Q>>(data: &MRData<R>, omega: &OmegaTable<R>, kmax: usize) -> Check {
    let bad = (0..=kmax.min(omega.imax)).find(|&k| {
        let s = EpsLaurent::constant(Q::from_i64(1 << (k + 1)));
        !omega.get(k, 0).sub(&data.a[k + 1].scale(&s)).is_zero()
    });
    let literal = (0..=kmax.min(omega.imax))
        .filter(|&k| {
            let s = EpsLaurent::constant(Q::from_i64(1 << k));
            omega.get(k, 0).sub(&data.a[k].scale(&s)).is_zero()
        })
        .count();
    Check::from_outcome("omega.column_vs_resolvent", bad.map(|k| format!("k={k}")))
        .with_window(format!("k=0..{kmax}"))
        .with_note(format!("Ω_(k,0) = 2^k·A_k holds for {literal} of {} indices", kmax.min(omega.imax) + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    type P = DiffPoly<Rational>;

    fn eps(c: (i64, i64), k: i64) -> EpsLaurent<Rational> {
        EpsLaurent::monomial(Rational::from_ratio(c.0, c.1), k)
    }

    fn q(m: u32) -> P {
        P::q(m)
    }

    fn r(m: u32) -> P {
        P::r(m)
    }

    #[test]
    fn first_levels_match_hand_computation() {
        let mr = mr_coeffs_symbolic::<Rational>(2, None);
        assert!(mr.a[0].is_zero());
        assert_eq!(mr.b[0], q(0));
        assert_eq!(mr.c[0], r(0).neg());
        assert_eq!(mr.a[1], q(0).mul(&r(0)).scale(&eps((1, 2), 0)));
        assert_eq!(mr.b[1], q(1).scale(&eps((1, 2), 1)));
        assert_eq!(mr.c[1], r(1).scale(&eps((1, 2), 1)));
        let a2 = q(1).mul(&r(0)).sub(&q(0).mul(&r(1))).scale(&eps((1, 4), 1));
        assert_eq!(mr.a[2], a2);
        let b2 = q(2).scale(&eps((1, 4), 2)).add(&q(0).mul(&q(0)).mul(&r(0)).scale(&eps((1, 2), 0)));
        assert_eq!(mr.b[2], b2);
        let c2 = r(2).scale(&eps((-1, 4), 2)).sub(&q(0).mul(&r(0)).mul(&r(0)).scale(&eps((1, 2), 0)));
        assert_eq!(mr.c[2], c2);
    }

    #[test]
    fn symbolic_resolvent_properties_hold() {
        let rep = mr_verify::<Rational, P>(&q(0), &r(0), 6, None);
        assert!(rep.passed(), "{rep:?}");
    }

    #[test]
    fn perturbed_recursion_is_caught() {
        let rep = mr_verify::<Rational, P>(&q(0), &r(0), 4, Some(Fault::RecursionConstant));
        let fail = rep.first_failure().expect("must fail");
        assert_eq!(fail.name, "resolvent.consistency");
        assert_eq!(fail.locus.as_deref(), Some("j=1"));
    }

    #[test]
    fn low_flows() {
        let ft = FlowTable::<Rational>::new(1);
        assert_eq!(ft.flow_poly(0), (&q(1), &r(1)));
        let pq1 = q(2).scale(&eps((1, 1), 1)).add(&q(0).mul(&q(0)).mul(&r(0)).scale(&eps((2, 1), -1)));
        let pr1 = r(2).scale(&eps((-1, 1), 1)).sub(&q(0).mul(&r(0)).mul(&r(0)).scale(&eps((2, 1), -1)));
        assert_eq!(ft.flow_poly(1), (&pq1, &pr1));
        assert!(ft.lax_check(0).passed);
        assert!(ft.lax_check(1).passed);
    }

    #[test]
    fn two_point_low_entries() {
        let mr = mr_coeffs_symbolic::<Rational>(omega_order(2, 2), None);
        let om = omega_table(&mr, 2, 2).unwrap();
        assert_eq!(om.get(0, 0), &q(0).mul(&r(0)));
        let o10 = q(1).mul(&r(0)).sub(&q(0).mul(&r(1))).scale(&eps((1, 1), 1));
        assert_eq!(om.get(1, 0), &o10);
        assert_eq!(om.asymmetry(), None);
        assert!(omega_column_check(&mr, &om, 2).passed);
    }

    #[test]
    fn nabla_small() {
        let rep = nabla_check::<Rational>(3, 3, None).unwrap();
        assert!(rep.passed(), "{rep:?}");
        let bad = nabla_check::<Rational>(3, 3, Some(Fault::DropDiagonal)).unwrap();
        assert!(bad.first_failure().unwrap().locus.as_ref().unwrap().starts_with("ν^-1"));
    }
}
