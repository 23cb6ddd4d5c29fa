use mrkit::correlators::CycleClassSet;
use mrkit::{Arith, Data, DiffAlgebra, Eps, Jet, JetSeries, MultiSeries, Poly, Rational, Region, Ring, XiSeries};
use proptest::prelude::*;

fn rat() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| Rational::new(n.into(), d.into()))
}

fn nonzero_rat() -> impl Strategy<Value = Rational> {
    rat().prop_filter("nonzero", |q| *q != Rational::from_integer(0.into()))
}

fn eps() -> impl Strategy<Value = Eps> {
    prop::collection::vec((-2i64..=3, rat()), 0..4).prop_map(Eps::from_terms)
}

fn nonzero_eps() -> impl Strategy<Value = Eps> {
    eps().prop_filter("nonzero", |c| !c.is_zero())
}

const CAP: usize = 7;

fn jet() -> impl Strategy<Value = Jet> {
    prop::collection::vec(eps(), 0..6).prop_map(|c| Jet::from_coeffs(c, CAP))
}

fn invertible_jet() -> impl Strategy<Value = Jet> {
    (nonzero_rat(), prop::collection::vec(eps(), 0..5)).prop_map(|(a0, rest)| {
        let mut c = vec![Eps::constant(a0)];
        c.extend(rest);
        Jet::from_coeffs(c, CAP)
    })
}

fn poly() -> impl Strategy<Value = Poly> {
    let var = (any::<bool>(), 0u32..3).prop_map(|(q, o)| if q { Poly::q(o) } else { Poly::r(o) });
    let mono = (prop::collection::vec(var, 0..3), eps()).prop_map(|(vars, c)| {
        vars.iter().fold(Poly::one(), |acc, v| acc.mul(v)).scale(&c)
    });
    prop::collection::vec(mono, 0..4).prop_map(|ms| ms.iter().fold(Poly::zero(), |acc, m| acc.add(m)))
}

fn data() -> impl Strategy<Value = Data> {
    (prop::collection::vec(rat(), 1..4), prop::collection::vec(rat(), 1..4)).prop_map(|(q, r)| Data::new(Jet::from_rationals(q, 10), Jet::from_rationals(r, 10), 10, 6, 6))
}

fn agree<R: Ring>(a: &R, b: &R) -> bool {
    a.sub(b).is_zero()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eps_is_a_commutative_ring(a in eps(), b in eps(), c in eps()) {
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert!(a.add(&a.neg()).is_zero());
        prop_assert_eq!(a.mul(&Eps::one()), a);
    }

    #[test]
    fn eps_inverse(a in nonzero_eps(), ceiling in 0i64..6) {
        let inv = a.invert(ceiling).unwrap();
        prop_assert!(agree(&a.mul(&inv), &Eps::one()));
    }

    #[test]
    fn jet_is_a_commutative_ring(a in jet(), b in jet(), c in jet()) {
        prop_assert!(agree(&a.mul(&b), &b.mul(&a)));
        prop_assert!(agree(&a.mul(&b).mul(&c), &a.mul(&b.mul(&c))));
        prop_assert!(agree(&a.mul(&b.add(&c)), &a.mul(&b).add(&a.mul(&c))));
        prop_assert!(a.sub(&a).is_zero());
    }

    #[test]
    fn jet_inverse(a in invertible_jet()) {
        let inv = a.invert(6).unwrap();
        prop_assert!(agree(&a.mul(&inv), &Jet::one()));
        prop_assert_eq!(inv.valid_order().is_none(), a.is_x_constant());
    }

    #[test]
    fn jet_derive_undoes_antiderivative(a in jet()) {
        prop_assert!(agree(&a.antiderivative().derive(), &a));
        prop_assert!(a.antiderivative().at_zero().is_zero());
    }

    #[test]
    fn jet_leibniz(a in jet(), b in jet()) {
        let lhs = a.mul(&b).derive();
        let rhs = a.derive().mul(&b).add(&a.mul(&b.derive()));
        prop_assert!(agree(&lhs, &rhs));
    }

    #[test]
    fn poly_is_a_commutative_ring(a in poly(), b in poly(), c in poly()) {
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert!(a.add(&a.neg()).is_zero());
    }

    #[test]
    fn poly_leibniz(a in poly(), b in poly()) {
        prop_assert_eq!(a.mul(&b).derive(), a.derive().mul(&b).add(&a.mul(&b.derive())));
    }

    #[test]
    fn eval_is_a_differential_homomorphism(a in poly(), b in poly(), d in data()) {
        prop_assert!(agree(&a.mul(&b).eval(&d), &a.eval(&d).mul(&b.eval(&d))));
        prop_assert!(agree(&a.add(&b).eval(&d), &a.eval(&d).add(&b.eval(&d))));
        prop_assert!(agree(&a.derive().eval(&d), &a.eval(&d).derive()));
    }

    #[test]
    fn exp_of_negation_is_inverse(cs in prop::collection::vec(rat(), 1..4), floor in -7i64..-1) {
        let s: JetSeries = XiSeries::from_terms(
            cs.into_iter().enumerate().map(|(i, c)| (-(i as i64) - 1, Jet::constant(Eps::constant(c)))),
            floor,
        );
        let e = s.exp(floor).unwrap();
        let f = s.neg().exp(floor).unwrap();
        prop_assert!(e.mul(&f).sub(&JetSeries::constant(Jet::one())).is_zero());
        prop_assert_eq!(e.floor(), floor);
    }

    #[test]
    fn kernel_inverts_the_difference(n in 2i64..9) {
        let region = Region::standard(2);
        let floor = vec![-n, -n];
        let k = MultiSeries::<Rational>::kernel(&region, 0, 1, 1, &floor).unwrap();
        let one = Rational::from_integer(1.into());
        let diff = MultiSeries::monomial(&region, vec![1, 0], one.clone())
            .try_add(&MultiSeries::monomial(&region, vec![0, 1], -one.clone()))
            .unwrap();
        let prod = diff.try_mul(&k).unwrap();
        let terms: Vec<_> = prod.terms().map(|(e, c)| (e.clone(), c.clone())).collect();
        prop_assert_eq!(terms, vec![(vec![0, 0], one)]);
    }

    #[test]
    fn kernel_square_is_the_double_kernel(n in 3i64..10) {
        let region = Region::standard(2);
        let floor = vec![-n, -n];
        let k1 = MultiSeries::<Rational>::kernel(&region, 0, 1, 1, &floor).unwrap();
        let sq = k1.try_mul(&k1).unwrap();
        let k2 = MultiSeries::<Rational>::kernel(&region, 0, 1, 2, sq.floor()).unwrap();
        prop_assert_eq!(sq.terms().collect::<Vec<_>>(), k2.terms().collect::<Vec<_>>());
    }

    #[test]
    fn reversed_kernel_is_odd(n in 2i64..9, p in 1u32..4) {
        let region = Region::standard(2);
        let floor = vec![-n, -n];
        let fwd = MultiSeries::<Rational>::kernel(&region, 0, 1, p, &floor).unwrap();
        let back = MultiSeries::<Rational>::kernel(&region, 1, 0, p, &floor).unwrap();
        let sign = if p % 2 == 1 { -Rational::from_integer(1.into()) } else { Rational::from_integer(1.into()) };
        prop_assert_eq!(back, fwd.scale(&sign));
    }
}

#[test]
fn cycle_classes_cover_every_permutation_once() {
    for k in 1..=6 {
        let classes = CycleClassSet::new(k);
        let expected: usize = (1..k).product::<usize>().max(1);
        assert_eq!(classes.len(), expected, "k = {k}");
        let mut seen = std::collections::BTreeSet::new();
        for rep in classes.reps() {
            assert_eq!(rep[0], 0);
            let mut sorted = rep.clone();
            sorted.sort_unstable();
            assert_eq!(sorted, (0..k).collect::<Vec<_>>());
            for shift in 0..k {
                let rotated: Vec<usize> = (0..k).map(|i| rep[(i + shift) % k]).collect();
                assert!(seen.insert(rotated), "rotation of {rep:?} counted twice");
            }
        }
        assert_eq!(seen.len(), (1..=k).product::<usize>());
    }
}
