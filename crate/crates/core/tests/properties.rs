use enriques_core::involution::{
    classify_plane, find_plane_i0w2, random_frame, random_isometry, PlaneType,
};
use enriques_core::lattice::{self, Lattice, LatticeVector};
use enriques_core::matrix;
use enriques_core::model::branch::{BranchPolynomial, REAL_DIMENSION};
use enriques_core::model::certify::{certify_sign, SignOutcome, DEFAULT_BUDGET};
use enriques_core::model::space::{center_polynomial, exposition_sign, random_perturbation};
use enriques_core::quadric::{canonical_actions, classify_action, GaussRat};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn gauss() -> impl Strategy<Value = GaussRat> {
    (-6i64..=6, -6i64..=6, 1i64..=4)
        .prop_filter("nonzero", |(a, b, _)| *a != 0 || *b != 0)
        .prop_map(|(a, b, d)| GaussRat::new(BigRational::new(a.into(), d.into()), BigRational::new(b.into(), d.into())))
}

fn near_center(seed: u64, radius: BigRational) -> BranchPolynomial {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = random_perturbation(&mut rng, &radius);
    let x: Vec<BigRational> = center_polynomial().real_coordinates().iter().zip(&q).map(|(a, b)| a + b).collect();
    BranchPolynomial::from_real_coordinates(&x).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn action_type_is_a_conjugation_invariant(idx in 0usize..5, k1 in gauss(), k2 in gauss(), swap in any::<bool>(), halves in any::<bool>()) {
        let a = &canonical_actions()[idx];
        let mut b = a.conjugate_by_scaling(&k1, &k2);
        if swap {
            b = b.conjugate_by_swap();
        }
        if halves {
            b = b.swap_halves();
        }
        let ra = classify_action(a).unwrap();
        let rb = classify_action(&b).unwrap();
        prop_assert_eq!(ra.type_id, rb.type_id);
        prop_assert_eq!(ra.h2_matrix, rb.h2_matrix);
    }

    #[test]
    fn reflections_are_isometries(seed in any::<u64>(), len in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (g, g_inv) = random_isometry(&mut rng, len);
        let l = Lattice::enriques();
        prop_assert_eq!(&matrix::congruence(l.gram(), &g), l.gram());
        prop_assert_eq!(matrix::mul(&g, &g_inv), matrix::identity(10));
    }

    #[test]
    fn root_reflection_preserves_square(x in prop::collection::vec(-5i64..=5, 10), r in 0usize..8) {
        let l = Lattice::enriques();
        let root = LatticeVector::basis(10, r);
        let x = LatticeVector::from_i64(&x);
        let y = lattice::reflect_root(&l, &root, &x).unwrap();
        prop_assert_eq!(l.square(&x), l.square(&y));
        prop_assert_eq!(lattice::reflect_root(&l, &root, &y).unwrap(), x);
    }

    #[test]
    fn real_coordinates_round_trip(x in prop::collection::vec(-50i64..=50, REAL_DIMENSION)) {
        let x: Vec<BigRational> = x.into_iter().map(|v| BigRational::from_integer(BigInt::from(v))).collect();
        match BranchPolynomial::from_real_coordinates(&x) {
            Some(p) => {
                prop_assert_eq!(p.real_coordinates(), x);
                let q = BranchPolynomial::validate(p.coeffs().clone()).unwrap();
                prop_assert_eq!(q, p);
            }
            None => prop_assert!(x.iter().all(Zero::is_zero)),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn plane_search_output_has_type_i0w2(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_frame(&mut rng);
        let (a, b) = find_plane_i0w2(&f.involution, &f.u1, &f.u2, &f.d4).unwrap();
        prop_assert_eq!(classify_plane(&f.involution, &a, &b).unwrap(), PlaneType::I0w2);
    }

    #[test]
    fn sign_is_antisymmetric(seed in any::<u64>()) {
        let p = near_center(seed, BigRational::new(1.into(), 10.into()));
        let q = p.scale(&BigRational::from_integer((-1).into())).unwrap();
        match (certify_sign(&p, DEFAULT_BUDGET), certify_sign(&q, DEFAULT_BUDGET)) {
            (SignOutcome::Certified(a), SignOutcome::Certified(b)) => {
                prop_assert_eq!(a.sign, -b.sign);
                prop_assert_ne!(exposition_sign(&a), exposition_sign(&b));
                let tree = |c: &enriques_core::model::certify::TorusCertificate| {
                    c.boxes.iter().map(|x| (x.chart, x.path.clone(), x.bound.clone())).collect::<Vec<_>>()
                };
                prop_assert_eq!(tree(&a), tree(&b));
            }
            (SignOutcome::HasZero(_), SignOutcome::HasZero(_)) => {}
            other => prop_assert!(false, "asymmetric outcomes {:?}", other),
        }
    }

    #[test]
    fn positive_scaling_keeps_exposition(seed in any::<u64>(), n in 1i64..20, d in 1i64..20) {
        let p = near_center(seed, BigRational::new(1.into(), 10.into()));
        let q = p.scale(&BigRational::new(n.into(), d.into())).unwrap();
        if let (SignOutcome::Certified(a), SignOutcome::Certified(b)) = (certify_sign(&p, DEFAULT_BUDGET), certify_sign(&q, DEFAULT_BUDGET)) {
            prop_assert_eq!(exposition_sign(&a), exposition_sign(&b));
        }
    }

    #[test]
    fn same_sign_segments_have_no_zero(s0 in any::<u64>(), s1 in any::<u64>(), k in 1i64..16) {
        let radius = BigRational::new(1.into(), 4.into());
        let (p0, p1) = (near_center(s0, radius.clone()), near_center(s1, radius));
        let (SignOutcome::Certified(a), SignOutcome::Certified(b)) = (certify_sign(&p0, DEFAULT_BUDGET), certify_sign(&p1, DEFAULT_BUDGET)) else {
            return Ok(());
        };
        prop_assume!(a.sign == b.sign);
        let t = BigRational::new(k.into(), 16.into());
        let pt = p0.combine(&(BigRational::from_integer(1.into()) - &t), &p1, &t).unwrap();
        prop_assert!(!matches!(certify_sign(&pt, DEFAULT_BUDGET), SignOutcome::HasZero(_)));
    }
}
