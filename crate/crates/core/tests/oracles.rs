//! Hand-derived values frozen against the public API.

use mrkit::correlators::npoint_mr_data;
use mrkit::resolvent::{mr_coeffs, omega_order, omega_table};
use mrkit::waves::{riccati_series, wave_run, Kind, Potentials};
use mrkit::{Arith, Data, DiffAlgebra, Eps, FlowTable, Jet, JetVar, Poly, Rational, Ring, Scalar, Species};

fn eps(n: i64, d: i64, k: i64) -> Eps {
    Eps::monomial(Rational::from_ratio(n, d), k)
}

fn jet(c: &[(usize, Eps)]) -> Jet {
    let mut v = vec![Eps::exact_zero(); 1 + c.iter().map(|t| t.0).max().unwrap_or(0)];
    for (x, e) in c {
        v[*x] = v[*x].add(e);
    }
    Jet::from_coeffs(v, 12)
}

fn data(q: &[i64], r: &[i64]) -> Data {
    Data::polynomial(q, r, 12, 8, 8)
}

#[test]
fn first_riccati_coefficients() {
    let d = data(&[1, 1], &[1, -1]);
    let pot = Potentials::new(&d).unwrap();
    let x = riccati_series(&pot, Kind::A, 2);
    let want_x1 = jet(&[(0, eps(-1, 2, 0)), (2, eps(1, 2, 0))]);
    assert!(x.coeffs[1].sub(&want_x1).is_zero());
    let y = riccati_series(&pot, Kind::B, 2);
    // f_X = −1/(1+X)² and g = 1 − X², so y₁(0) = (1 − ε²)/2.
    assert_eq!(y.coeffs[1].at_zero(), eps(1, 2, 0).add(&eps(-1, 2, 2)));
}

#[test]
fn constant_data_wave_values() {
    let run = wave_run(&data(&[1], &[1])).unwrap();
    let phi_a1 = jet(&[(1, eps(-1, 2, -1))]);
    assert!(run.pair.phi_a.coeff(-1).sub(&phi_a1).is_zero());
    assert!(run.pair.phi_b.coeff(-1).sub(&phi_a1.neg()).is_zero());
}

#[test]
fn unnormalized_pairing_has_eps_f_at_xi_zero() {
    for (q, want) in [(&[1, 1][..], eps(1, 1, 1)), (&[2, 1][..], eps(1, 2, 1)), (&[1][..], Eps::exact_zero())] {
        let run = wave_run(&data(q, &[1])).unwrap();
        assert_eq!(run.raw.d.coeff(0).at_zero(), want, "q = {q:?}");
    }
}

#[test]
fn second_flow_and_its_derivation() {
    let ft = FlowTable::<Rational>::new(2);
    let q0 = Poly::q(0);
    let want = Poly::q(2).scale(&eps(1, 1, 1)).add(&q0.mul(&q0).mul(&Poly::r(0)).scale(&eps(2, 1, -1)));
    assert_eq!(ft.derive(1, &q0), want);
    assert_eq!(ft.derive(0, &q0.mul(&Poly::r(3))), q0.mul(&Poly::r(3)).derive());
}

#[test]
fn flows_without_r_are_linear() {
    let ft = FlowTable::<Rational>::new(2);
    for j in 0..=2 {
        let (pq, _) = ft.flow_poly(j);
        let linear: Vec<_> = pq
            .terms()
            .filter(|(m, _)| m.iter().all(|(v, _)| v.species == Species::Q))
            .collect();
        assert_eq!(linear.len(), 1, "j = {j}");
        let (mono, _) = linear[0];
        assert_eq!(mono, &vec![(JetVar::q(j as u32 + 1), 1)]);
    }
}

#[test]
fn constant_data_two_point_value() {
    let d = data(&[1], &[1]);
    let om = omega_table(&mr_coeffs(&d.q, &d.r, omega_order(1, 1), None), 1, 1).unwrap();
    assert!(om.get(0, 0).sub(&Jet::one()).is_zero());
    let t = npoint_mr_data(&d, 2, 1).unwrap();
    assert!(t.get(&[0, 0]).unwrap().sub(&Jet::one()).is_zero());
}
