//! k-point correlation functions from the matrix resolvent, from the wave
//! pair, and from flow derivatives of the two-point function.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;

use crate::diffpoly::InitialData;
use crate::eps::EpsLaurent;
use crate::error::{Error, Fault, Result};
use crate::mat2::Mat2;
use crate::multi::{mat_mul_within, MultiSeries, Region};
use crate::report::Check;
use crate::resolvent::{mr_coeffs, mr_coeffs_symbolic, mr_matrix, omega_order, omega_table, FlowTable, MRData, OmegaTable};
use crate::scalar::{Arith, DiffAlgebra, Ring, Scalar};
use crate::waves::{a_table, wave_run, ATable};
use crate::xi::NEG_INF;
use crate::xjet::XJet;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Source {
    Mr,
    Wave,
    Flow,
    Omega,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Source::Mr => "mr",
            Source::Wave => "wave",
            Source::Flow => "flow-oracle",
            Source::Omega => "omega",
        })
    }
}

/// Representatives of S_k modulo rotations: permutations fixing 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleClassSet {
    k: usize,
    reps: Vec<Vec<usize>>,
}

impl CycleClassSet {
    pub fn new(k: usize) -> Self {
        let mut reps = Vec::new();
        let mut cur = vec![0];
        fn go(k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if cur.len() == k {
                out.push(cur.clone());
                return;
            }
            for v in 1..k {
                if !cur.contains(&v) {
                    cur.push(v);
                    go(k, cur, out);
                    cur.pop();
                }
            }
        }
        if k > 0 {
            go(k, &mut cur, &mut reps);
        }
        CycleClassSet { k, reps }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn reps(&self) -> &[Vec<usize>] {
        &self.reps
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }
}

/// Ω_{i₁…i_k} for all indices ≤ `bound`.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelatorTable<R> {
    pub k: usize,
    pub bound: usize,
    pub source: Source,
    pub entries: BTreeMap<Vec<usize>, R>,
}

impl<R: Ring> CorrelatorTable<R> {
    pub fn get(&self, idx: &[usize]) -> Option<&R> {
        self.entries.get(idx)
    }

    /// First index whose entry differs from the one at its sorted index.
    pub fn asymmetry(&self) -> Option<Vec<usize>> {
        self.entries.iter().find_map(|(idx, c)| {
            let mut s = idx.clone();
            s.sort_unstable();
            (!c.sub(&self.entries[&s]).is_zero()).then(|| idx.clone())
        })
    }

    pub fn is_zero(&self) -> bool {
        self.entries.values().all(|c| c.is_zero())
    }
}

impl<R: Ring> CorrelatorTable<R> {
    /// The two-point table of the generating-series route, indices ≤ bound.
    pub fn from_omega(t: &OmegaTable<R>, bound: usize) -> Self {
        let entries = t
            .entries
            .iter()
            .filter(|((i, j), _)| *i <= bound && *j <= bound)
            .map(|(&(i, j), c)| (vec![i, j], c.clone()))
            .collect();
        CorrelatorTable { k: 2, bound, source: Source::Omega, entries }
    }
}

impl<Q: Scalar> CorrelatorTable<XJet<Q>> {
    pub fn x_window(&self) -> Option<i64> {
        self.entries.values().filter_map(|c| c.valid_order()).min()
    }
}

fn grid(k: usize, bound: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        out = out.into_iter().flat_map(|v| (0..=bound).map(move |i| [v.clone(), vec![i]].concat())).collect();
    }
    out
}

fn format_index(idx: &[usize]) -> String {
    let parts: Vec<String> = idx.iter().map(|i| i.to_string()).collect();
    format!("({})", parts.join(","))
}

/// Checks regularity of an assembled series and reads off the table.
fn extract<Q: Scalar, R: DiffAlgebra<Q>>(
    series: &MultiSeries<R>,
    k: usize,
    bound: usize,
    source: Source,
) -> Result<CorrelatorTable<R>> {
    let region = series.region();
    let target = region.table_floor(bound);
    if !series.covers(&target) {
        return Err(Error::OutsideWindow(format!(
            "{k}-point series from {source} known only above prefix floor {:?}, need {target:?}",
            series.floor()
        )));
    }
    if let Some((e, _)) = series.terms().filter(|(e, _)| e.iter().any(|&x| x >= -1)).last() {
        let parts: Vec<String> = e.iter().enumerate().map(|(j, x)| format!("ξ{}^{x}", j + 1)).collect();
        return Err(Error::violation(format!("npoint.regularity.{source}"), parts.join(" ")));
    }
    let mut entries = BTreeMap::new();
    for idx in grid(k, bound) {
        let e: Vec<i64> = idx.iter().map(|&i| -(i as i64) - 2).collect();
        let scale: i64 = 1 << idx.iter().sum::<usize>();
        entries.insert(idx, series.coeff(&e)?.scale(&EpsLaurent::constant(Q::from_i64(scale))));
    }
    Ok(CorrelatorTable { k, bound, source, entries })
}

/// Resolvent order that suffices for a k-point table with indices ≤ bound.
pub fn mr_order_for(k: usize, bound: usize) -> usize {
    k * (bound + 2)
}

/// −Σ_σ Tr(R(ξ_{σ₁})…R(ξ_{σ_k}))/∏(ξ_{σ_j} − ξ_{σ_{j+1}}) − 4δ_{k,2}/(ξ₁−ξ₂)².
pub fn npoint_mr<Q: Scalar, R: DiffAlgebra<Q>>(mr: &MRData<R>, k: usize, bound: usize) -> Result<CorrelatorTable<R>> {
    if k < 2 {
        return Err(Error::Input(format!("k-point functions need k ≥ 2, got {k}")));
    }
    let region = Region::standard(k);
    let target = region.table_floor(bound);
    let rmat = mr_matrix(mr);
    let embedded: Vec<Mat2<MultiSeries<R>>> =
        (0..k).map(|v| rmat.map(|s| MultiSeries::embed(&region, v, s))).collect();
    let classes = CycleClassSet::new(k);
    let terms: Vec<Result<MultiSeries<R>>> = classes
        .reps()
        .par_iter()
        .map(|p| {
            let mut prod = embedded[p[0]].clone();
            for &v in &p[1..] {
                prod = mat_mul_within(&prod, &embedded[v], &target)?;
            }
            let mut term = prod.a.try_add(&prod.d)?;
            for t in 0..k {
                let kern = MultiSeries::kernel(&region, p[t], p[(t + 1) % k], 1, &target)?;
                term = term.mul_within(&kern, &target)?;
            }
            Ok(term)
        })
        .collect();
    let mut total = MultiSeries::zero(&region);
    for t in terms {
        total = total.try_add(&t?.neg())?;
    }
    if k == 2 {
        total = total.try_add(&double_pole(&region, &target)?)?;
    }
    extract::<Q, R>(&total, k, bound, Source::Mr)
}

/// −4/(ξ₁−ξ₂)².
fn double_pole<R: Ring>(region: &Region, target: &[i64]) -> Result<MultiSeries<R>> {
    Ok(MultiSeries::kernel(region, 0, 1, 2, target)?.scale(&R::from_int(-4)))
}

/// Σ A_{i,j} x^{−i−1} y^{−j−1} with x, y the variables `u`, `v`.
fn affine_part<Q: Scalar>(region: &Region, a: &ATable<Q>, u: usize, v: usize, fault: Option<Fault>) -> MultiSeries<XJet<Q>> {
    let k = region.nvars();
    let l = a.lmax as i64;
    let (lo, hi) = (region.pos(u).min(region.pos(v)), region.pos(u).max(region.pos(v)));
    let floor = (0..k)
        .map(|j| if j < lo { NEG_INF } else if j < hi { -l - 1 } else { -l - 2 })
        .collect();
    let terms = a.entries.iter().map(|(&(i, j), c)| {
        let mut e = vec![0; k];
        e[u] = -(i as i64) - 1;
        e[v] = -(j as i64) - 1;
        let c = if i == 0 && j == 0 && fault == Some(Fault::AEntry) { c.add(&XJet::one()) } else { c.clone() };
        (e, c)
    });
    MultiSeries::from_terms(region, terms, floor)
}

/// A-table order that suffices for a k-point table with indices ≤ bound.
pub fn a_order_for(k: usize, bound: usize) -> usize {
    k * (bound + 2) - 2
}

/// −Σ_σ ∏_j B(ξ_{σ(j+1)}, ξ_{σ(j)}) − 4δ_{k,2}/(ξ₁−ξ₂)² with
/// B(x,y) = −2/(x−y) + Σ A_{i,j} x^{−i−1} y^{−j−1}.
pub fn npoint_wave<Q: Scalar>(a: &ATable<Q>, k: usize, bound: usize, fault: Option<Fault>) -> Result<CorrelatorTable<XJet<Q>>> {
    if k < 2 {
        return Err(Error::Input(format!("k-point functions need k ≥ 2, got {k}")));
    }
    let region = Region::standard(k);
    let target = region.table_floor(bound);
    let b = |x: usize, y: usize| -> Result<MultiSeries<XJet<Q>>> {
        let kern = MultiSeries::kernel(&region, x, y, 1, &target)?.scale(&XJet::from_int(-2));
        kern.try_add(&affine_part(&region, a, x, y, fault))
    };
    let classes = CycleClassSet::new(k);
    let terms: Vec<Result<MultiSeries<XJet<Q>>>> = classes
        .reps()
        .par_iter()
        .map(|p| {
            let mut prod = MultiSeries::one(&region);
            for j in 0..k {
                prod = prod.mul_within(&b(p[(j + 1) % k], p[j])?, &target)?;
            }
            Ok(prod)
        })
        .collect();
    let mut total = MultiSeries::zero(&region);
    for t in terms {
        total = total.try_add(&t?.neg())?;
    }
    if k == 2 {
        total = total.try_add(&double_pole(&region, &target)?)?;
    }
    extract::<Q, XJet<Q>>(&total, k, bound, Source::Wave)
}

/// ε·D_{i₃}(Ω_{i₁,i₂}) evaluated on the data, for all indices ≤ bound.
pub fn omega3_flow<Q: Scalar>(data: &InitialData<Q>, bound: usize) -> Result<CorrelatorTable<XJet<Q>>> {
    let mr = mr_coeffs_symbolic::<Q>(omega_order(bound, bound), None);
    let omega = omega_table(&mr, bound, bound)?;
    let flows = FlowTable::<Q>::new(bound);
    let eps = EpsLaurent::eps();
    let mut entries = BTreeMap::new();
    for idx in grid(3, bound) {
        let p = flows.derive(idx[2], omega.get(idx[0], idx[1])).scale(&eps);
        entries.insert(idx, p.eval(data));
    }
    Ok(CorrelatorTable { k: 3, bound, source: Source::Flow, entries })
}

/// Exact entrywise comparison; the locus names the first differing
/// multi-index with its X-order and ε-order.
pub fn compare<Q: Scalar>(a: &CorrelatorTable<XJet<Q>>, b: &CorrelatorTable<XJet<Q>>) -> Check {
    let name = format!("npoint.k{}.{}_vs_{}", a.k, a.source, b.source);
    if a.k != b.k || a.bound != b.bound {
        return Check::fail(name, format!("shape k={},≤{} vs k={},≤{}", a.k, a.bound, b.k, b.bound));
    }
    let locus = a.entries.iter().find_map(|(idx, x)| {
        let y = &b.entries[idx];
        x.first_difference(y).map(|(xo, eo)| format!("index {} at X^{xo} ε^{eo}", format_index(idx)))
    });
    let w = match (a.x_window(), b.x_window()) {
        (None, None) => "exact".to_string(),
        (p, q) => format!("X^0..X^{}", p.unwrap_or(i64::MAX).min(q.unwrap_or(i64::MAX))),
    };
    Check::from_outcome(name, locus).with_window(format!("indices ≤ {}, {w}", a.bound))
}

pub fn symmetry_check<Q: Scalar>(t: &CorrelatorTable<XJet<Q>>) -> Check {
    Check::from_outcome(
        format!("npoint.k{}.{}_symmetry", t.k, t.source),
        t.asymmetry().map(|idx| format!("index {}", format_index(&idx))),
    )
}

/// Working truncation for the wave side of a k-point run: enough ξ-orders
/// for the A-table and one extra X-order per A-table order.
pub fn wave_working_data<Q: Scalar>(data: &InitialData<Q>, k: usize, bound: usize) -> InitialData<Q> {
    let l = a_order_for(k, bound);
    data.with_truncation(data.n_x.max(data.n_x + l), data.n_xi.max(l + 1))
}

pub fn npoint_mr_data<Q: Scalar>(data: &InitialData<Q>, k: usize, bound: usize) -> Result<CorrelatorTable<XJet<Q>>> {
    let mr = mr_coeffs(&data.q, &data.r, mr_order_for(k, bound), None);
    npoint_mr(&mr, k, bound)
}

pub fn npoint_wave_data<Q: Scalar>(
    data: &InitialData<Q>,
    k: usize,
    bound: usize,
    fault: Option<Fault>,
) -> Result<CorrelatorTable<XJet<Q>>> {
    let work = wave_working_data(data, k, bound);
    let run = wave_run(&work)?;
    let a = a_table(&run.pot, &run.pair, a_order_for(k, bound), fault.filter(|f| *f == Fault::KernelSign))?;
    npoint_wave(&a, k, bound, fault.filter(|f| *f == Fault::AEntry))
}

/// Result of matching the affine table against the cyclic B-product form
/// with kernel 1/(x−y).
#[derive(Clone, Debug, PartialEq)]
pub struct Calibration<Q> {
    /// A^Z_{i,j} = α·β^{i+j}·A_{i,j}, or A_{j,i} when `transposed`.
    pub alpha: Q,
    pub beta: Q,
    /// Our n-point series equals s^n·G_n.
    pub scale: Q,
    pub transposed: bool,
    pub validated_k3: bool,
}

/// G_n split by the number m of affine factors: G_n = Σ_m α^m·(β-scaled P_m).
fn zhou_parts<Q: Scalar>(a: &ATable<Q>, k: usize, bound: usize, transposed: bool) -> Result<Vec<MultiSeries<XJet<Q>>>> {
    let region = Region::standard(k);
    let target = region.table_floor(bound);
    let at = if transposed {
        ATable { lmax: a.lmax, entries: a.entries.iter().map(|(&(i, j), c)| ((j, i), c.clone())).collect() }
    } else {
        a.clone()
    };
    let mut parts = vec![MultiSeries::zero(&region); k + 1];
    for p in CycleClassSet::new(k).reps() {
        let mut acc = vec![MultiSeries::one(&region)];
        for i in 0..k {
            let (x, y) = (p[i], p[(i + 1) % k]);
            let kern = MultiSeries::kernel(&region, x, y, 1, &target)?;
            // written x^{−j−1} y^{−i−1}, which is the table transposed
            let aff = affine_part(&region, &at, y, x, None);
            let mut next = vec![MultiSeries::zero(&region); acc.len() + 1];
            for (m, s) in acc.iter().enumerate() {
                next[m] = next[m].try_add(&s.mul_within(&kern, &target)?)?;
                next[m + 1] = next[m + 1].try_add(&s.mul_within(&aff, &target)?)?;
            }
            acc = next;
        }
        for (m, s) in acc.into_iter().enumerate() {
            parts[m] = parts[m].try_add(&s)?;
        }
    }
    let sign = if k.is_multiple_of(2) { -1 } else { 1 };
    let mut parts: Vec<_> = parts.into_iter().map(|s| s.scale(&XJet::from_int(sign))).collect();
    if k == 2 {
        parts[0] = parts[0].try_add(&MultiSeries::kernel(&region, 0, 1, 2, &target)?.scale(&XJet::from_int(-1)))?;
    }
    Ok(parts)
}

fn lattice<Q: Scalar>() -> Vec<Q> {
    let mut out = Vec::new();
    for e in 0..=4i64 {
        for s in [1, -1] {
            out.push(Q::from_ratio(s << e, 1));
            if e > 0 {
                out.push(Q::from_ratio(s, 1 << e));
            }
        }
    }
    out
}

fn qpow<Q: Scalar>(b: &Q, e: i64) -> Q {
    let base = if e < 0 { Q::one() / b.clone() } else { b.clone() };
    (0..e.unsigned_abs()).fold(Q::one(), |acc, _| acc.mul(&base))
}

fn matches<Q: Scalar>(parts: &[MultiSeries<XJet<Q>>], table: &CorrelatorTable<XJet<Q>>, alpha: &Q, beta: &Q, s: &Q) -> bool {
    let k = table.k as i64;
    table.entries.iter().all(|(idx, want)| {
        let e: Vec<i64> = idx.iter().map(|&i| -(i as i64) - 2).collect();
        let delta: i64 = e.iter().sum();
        let mut got = XJet::zero();
        for (m, p) in parts.iter().enumerate() {
            let Ok(c) = p.coeff(&e) else { return false };
            if c.is_zero() {
                continue;
            }
            let m = m as i64;
            let f = qpow(s, k).mul(&qpow(alpha, m)).mul(&qpow(beta, -delta - m - k));
            got = got.add(&c.map_coeffs(|x| x.scale_q(&f)));
        }
        let scale = Q::from_ratio(1, 1 << idx.iter().sum::<usize>());
        got.sub(&want.map_coeffs(|x| x.scale_q(&scale))).is_zero()
    })
}

/// Searches α, β, s over ±2^e, e ∈ −4…4, and both orientations of the
/// table, fitting k = 2 and then checking k = 3.
pub fn zhou_calibrate<Q: Scalar>(
    a: &ATable<Q>,
    two_point: &CorrelatorTable<XJet<Q>>,
    three_point: Option<&CorrelatorTable<XJet<Q>>>,
) -> Result<Calibration<Q>> {
    let lat = lattice::<Q>();
    for transposed in [false, true] {
        let p2 = zhou_parts(a, 2, two_point.bound, transposed)?;
        let p3 = match three_point {
            Some(t) => Some(zhou_parts(a, 3, t.bound, transposed)?),
            None => None,
        };
        for alpha in &lat {
            for beta in &lat {
                for s in &lat {
                    if !matches(&p2, two_point, alpha, beta, s) {
                        continue;
                    }
                    let validated_k3 = match (&p3, three_point) {
                        (Some(p), Some(t)) => matches(p, t, alpha, beta, s),
                        _ => false,
                    };
                    if three_point.is_some() && !validated_k3 {
                        continue;
                    }
                    return Ok(Calibration {
                        alpha: alpha.clone(),
                        beta: beta.clone(),
                        scale: s.clone(),
                        transposed,
                        validated_k3,
                    });
                }
            }
        }
    }
    Err(Error::CalibrationNotFound(format!(
        "no (α, β, s) in ±2^[-4..4] reproduces the {}-point table",
        if three_point.is_some() { "two- and three" } else { "two" }
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn data(q: &[i64], r: &[i64]) -> InitialData<Rational> {
        InitialData::polynomial(q, r, 12, 8, 8)
    }

    fn x_jet(c: &[(usize, i64, i64)]) -> XJet<Rational> {
        let mut v = vec![EpsLaurent::exact_zero(); 1 + c.iter().map(|t| t.0).max().unwrap_or(0)];
        for &(x, e, n) in c {
            v[x] = v[x].add(&EpsLaurent::monomial(Rational::from_i64(n), e));
        }
        XJet::from_coeffs(v, 12)
    }

    #[test]
    fn cycle_classes_have_factorial_size() {
        for (k, n) in [(1, 1), (2, 1), (3, 2), (4, 6), (5, 24)] {
            let c = CycleClassSet::new(k);
            assert_eq!(c.len(), n);
            assert!(c.reps().iter().all(|p| p[0] == 0));
        }
    }

    #[test]
    fn two_point_routes_agree_with_omega() {
        let d = data(&[1, 1], &[1, -1]);
        let mr = npoint_mr_data(&d, 2, 3).unwrap();
        let wave = npoint_wave_data(&d, 2, 3, None).unwrap();
        assert!(compare(&mr, &wave).passed);
        let om = omega_table(&mr_coeffs(&d.q, &d.r, omega_order(3, 3), None), 3, 3).unwrap();
        for (idx, c) in &mr.entries {
            assert!(c.sub(om.get(idx[0], idx[1])).is_zero(), "{idx:?}");
        }
        assert!(mr.get(&[0, 0]).unwrap().sub(&x_jet(&[(0, 0, 1), (2, 0, -1)])).is_zero());
        assert!(symmetry_check(&wave).passed);
    }

    #[test]
    fn three_point_routes_agree() {
        let d = data(&[1, 1], &[1, -1]);
        let mr = npoint_mr_data(&d, 3, 1).unwrap();
        let wave = npoint_wave_data(&d, 3, 1, None).unwrap();
        let flow = omega3_flow(&d, 1).unwrap();
        assert!(compare(&mr, &wave).passed);
        assert!(compare(&mr, &flow).passed);
        assert!(symmetry_check(&flow).passed);
        assert!(flow.get(&[0, 0, 0]).unwrap().sub(&x_jet(&[(1, 1, -2)])).is_zero());
    }

    #[test]
    fn vanishing_r_gives_zero_tables() {
        let d = data(&[2], &[0]);
        assert!(npoint_mr_data(&d, 3, 1).unwrap().is_zero());
        assert!(npoint_wave_data(&d, 3, 1, None).unwrap().is_zero());
        assert!(npoint_mr_data(&data(&[1, 1], &[0]), 2, 2).unwrap().is_zero());
    }

    #[test]
    fn corrupted_entry_is_located() {
        let d = data(&[1, 1], &[1, -1]);
        let mr = npoint_mr_data(&d, 2, 2).unwrap();
        let bad = npoint_wave_data(&d, 2, 2, Some(Fault::AEntry)).unwrap();
        let c = compare(&mr, &bad);
        assert!(!c.passed);
        assert_eq!(c.locus.unwrap(), "index (0,0) at X^0 ε^0");
    }

    #[test]
    fn zhou_normalization_is_found() {
        let d = data(&[1, 1], &[1, -1]);
        let work = wave_working_data(&d, 3, 1);
        let run = wave_run(&work).unwrap();
        let a = a_table(&run.pot, &run.pair, a_order_for(3, 1), None).unwrap();
        let two = npoint_mr_data(&d, 2, 1).unwrap();
        let three = npoint_mr_data(&d, 3, 1).unwrap();
        let cal = zhou_calibrate(&a, &two, Some(&three)).unwrap();
        assert_eq!(cal.alpha, Rational::from_ratio(1, 2));
        assert_eq!(cal.beta, Rational::from_i64(1));
        assert_eq!(cal.scale, Rational::from_i64(-2));
        assert!(cal.validated_k3);
    }
}
