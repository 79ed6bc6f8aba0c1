use concat_core::distribution::{fk_closed_form, witness_pair, ConcatKind, DeltaComb, Distribution};
use concat_core::gen;
use concat_core::text::{parse_distribution, parse_exppoly};
use concat_core::{Backend, ExpPoly, Scalar};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ex(re: i64) -> Scalar {
    Scalar::exact(re, 0)
}

fn comb(cs: &[i64]) -> DeltaComb {
    DeltaComb::new(Backend::Exact, cs.iter().map(|c| ex(*c)).collect()).unwrap()
}

#[test]
fn heaviside_derivative_is_delta() {
    let h = Distribution::from_concat(&ExpPoly::zero(Backend::Exact), &ExpPoly::constant(ex(1)), false).unwrap();
    let d = h.derive();
    assert!(d.regular.is_zero());
    assert_eq!(d.singular, comb(&[1]));
    assert_eq!(d.derive().singular, comb(&[0, 1]));
}

#[test]
fn matched_concatenation_has_no_delta_on_first_derivative() {
    let u1 = parse_exppoly("exp(1*t)", Backend::Exact).unwrap();
    let u2 = parse_exppoly("exp(-1*t)", Backend::Exact).unwrap();
    let f = Distribution::from_concat(&u1, &u2, true).unwrap();
    assert!(f.derive().singular.is_zero());
    // second derivative jumps by u2'(0) - u1'(0) = -2
    assert_eq!(f.derive_n(2).singular, comb(&[-2]));
}

#[test]
fn mismatched_concatenation_is_rejected() {
    let u1 = ExpPoly::constant(ex(1));
    let u2 = ExpPoly::constant(ex(2));
    assert!(Distribution::from_concat(&u1, &u2, true).is_err());
}

#[test]
fn closed_form_small_cases() {
    // distinct, λ = 1, μ = -1: F_2 has comb -2 δ, F_3 adds -2 δ' and a 0 δ term
    let (l, m) = (ex(1), ex(-1));
    let f2 = fk_closed_form(ConcatKind::Distinct, 2, &l, Some(&m)).unwrap();
    assert_eq!(f2.singular, comb(&[-2]));
    let f3 = fk_closed_form(ConcatKind::Distinct, 3, &l, Some(&m)).unwrap();
    assert_eq!(f3.singular, comb(&[0, -2]));
    // repeated, λ = 0: u2 = (1 + t), F_2 = δ
    let r2 = fk_closed_form(ConcatKind::Repeated, 2, &ex(0), None).unwrap();
    assert_eq!(r2.singular, comb(&[1]));
}

#[test]
fn parse_and_print_round_trip() {
    let d = parse_distribution("[left] exp(1*t) [right] t*exp(0*t) [comb] 1, 0, 1/2", Backend::Exact).unwrap();
    assert_eq!(parse_distribution(&d.to_string(), Backend::Exact).unwrap(), d);
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn closed_form_matches_iterated_derivative(seed in any::<u64>()) {
        let mut r = rng(seed);
        let lambda = Scalar::Exact(gen::gauss(&mut r, 4, 3));
        let mu = Scalar::Exact(gen::gauss(&mut r, 4, 3));
        prop_assume!(mu != lambda);
        for (kind, mu) in [(ConcatKind::Repeated, None), (ConcatKind::Distinct, Some(&mu))] {
            let (u1, u2) = witness_pair(kind, &lambda, mu).unwrap();
            let mut d = Distribution::from_concat(&u1, &u2, true).unwrap();
            for k in 0..=8 {
                prop_assert_eq!(&fk_closed_form(kind, k, &lambda, mu).unwrap(), &d, "{:?} k = {}", kind, k);
                d = d.derive();
            }
        }
    }

    #[test]
    fn operator_action_is_linear_and_composes(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = gen::distribution(&mut r);
        let t = gen::distribution(&mut r);
        let dp = r.gen_range(0..=3);
        let p = gen::operator_coeffs(&mut r, dp);
        let q = gen::operator_coeffs(&mut r, 2);
        let c = Scalar::Exact(gen::gauss(&mut r, 3, 2));
        let lhs = s.scale(&c).unwrap().add(&t).unwrap().apply_op(&p).unwrap();
        let rhs = s.apply_op(&p).unwrap().scale(&c).unwrap().add(&t.apply_op(&p).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(s.apply_op(&p.compose(&q)).unwrap(), s.apply_op(&q).unwrap().apply_op(&p).unwrap());
    }

    #[test]
    fn residual_vanishes_off_the_origin(seed in any::<u64>()) {
        let mut r = rng(seed);
        let degree = r.gen_range(2..=5);
        let p = gen::operator_with_roots(&mut r, degree, gen::RootPattern::Any);
        let basis = ExpPoly::solution_basis(&p.factored().unwrap().roots);
        let pick = |r: &mut ChaCha8Rng| {
            basis.iter().fold(ExpPoly::zero(Backend::Exact), |acc, b| {
                acc.add(&b.scale(&Scalar::Exact(gen::gauss(r, 3, 2))).unwrap()).unwrap()
            })
        };
        let u1 = pick(&mut r);
        let u2 = pick(&mut r);
        let f = Distribution::from_concat(&u1, &u2, false).unwrap();
        prop_assert!(f.apply_op(&p).unwrap().restrict_punctured().is_zero());
    }

    #[test]
    fn derivative_shifts_the_comb(seed in any::<u64>()) {
        let mut r = rng(seed);
        let c = gen::comb(&mut r, 4);
        let d = Distribution::comb(c.clone()).derive();
        prop_assert_eq!(d.singular, c.shift());
    }
}
