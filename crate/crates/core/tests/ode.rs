use concat_core::distribution::{ConcatKind, Distribution};
use concat_core::gen;
use concat_core::ode::{
    certificate_ode, certificate_ode_with, decide_ode, verify_certificate, verify_certificate_with, CertOptions,
    Certificate, CheckStatus, VerifyOptions,
};
use concat_core::{Backend, ExpPoly, FloatCtx, PolyOperator, Scalar};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn comb_of(c: &Certificate) -> Vec<Scalar> {
    match c {
        Certificate::Counterexample { residual, .. } => residual.singular.coeffs().to_vec(),
        Certificate::Closure { .. } => Vec::new(),
    }
}

#[test]
fn worked_example_t2_minus_1() {
    let p = PolyOperator::from_ints(&[-1, 0, 1]);
    assert!(!decide_ode(&p).unwrap());
    let c = certificate_ode(&p).unwrap();
    match &c {
        Certificate::Counterexample { kind, lambda, mu, .. } => {
            assert_eq!(*kind, ConcatKind::Distinct);
            assert_eq!(*lambda, Scalar::exact(1, 0));
            assert_eq!(mu.clone(), Some(Scalar::exact(-1, 0)));
        }
        other => panic!("expected a counterexample, got {other:?}"),
    }
    assert_eq!(comb_of(&c), vec![Scalar::exact(-2, 0)]);
    assert!(verify_certificate(&c, &p, true).passed());
}

#[test]
fn repeated_root_is_preferred() {
    // (t - 1)^2 (t + 2)
    let p = PolyOperator::from_roots(
        Scalar::exact(1, 0),
        vec![(Scalar::exact(1, 0), 2), (Scalar::exact(-2, 0), 1)],
    )
    .unwrap();
    match certificate_ode(&p).unwrap() {
        Certificate::Counterexample { kind, lambda, .. } => {
            assert_eq!(kind, ConcatKind::Repeated);
            assert_eq!(lambda, Scalar::exact(1, 0));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn first_order_operator_is_closed() {
    let p = PolyOperator::from_ints(&[3, 1]);
    assert!(decide_ode(&p).unwrap());
    let c = certificate_ode(&p).unwrap();
    assert_eq!(
        c,
        Certificate::Closure {
            lambda: Scalar::exact(-3, 0)
        }
    );
    assert!(verify_certificate(&c, &p, false).passed());
}

#[test]
fn constant_operator_is_refused() {
    assert!(decide_ode(&PolyOperator::from_ints(&[5])).is_err());
    assert!(certificate_ode(&PolyOperator::from_ints(&[5])).is_err());
}

#[test]
fn tampered_certificates_fail() {
    let p = PolyOperator::from_ints(&[-1, 0, 1]);
    let good = certificate_ode(&p).unwrap();
    let Certificate::Counterexample {
        kind,
        lambda,
        mu,
        u1,
        u2,
        residual,
    } = good.clone()
    else {
        unreachable!()
    };

    let wrong_comb = Certificate::Counterexample {
        kind,
        lambda: lambda.clone(),
        mu: mu.clone(),
        u1: u1.clone(),
        u2: u2.clone(),
        residual: residual.scale(&Scalar::exact(2, 0)).unwrap(),
    };
    assert_eq!(verify_certificate(&wrong_comb, &p, false).verdict(), CheckStatus::Fail);

    let mismatched = Certificate::Counterexample {
        kind,
        lambda: lambda.clone(),
        mu: mu.clone(),
        u1: u1.scale(&Scalar::exact(2, 0)).unwrap(),
        u2: u2.clone(),
        residual: residual.clone(),
    };
    assert_eq!(verify_certificate(&mismatched, &p, false).verdict(), CheckStatus::Fail);

    // right certificate, wrong operator
    let q = PolyOperator::from_ints(&[-4, 0, 1]);
    assert_eq!(verify_certificate(&good, &q, false).verdict(), CheckStatus::Fail);
}

#[test]
fn irrational_roots_use_the_bigfloat_backend() {
    // t^2 - 2 does not split over Q(i)
    let p = PolyOperator::from_ints(&[-2, 0, 1]);
    let c = certificate_ode_with(&p, &CertOptions::default()).unwrap();
    assert!(matches!(c.backend(), Backend::Float(_)));
    let r = verify_certificate_with(&c, &p, &VerifyOptions::with_crosscheck());
    assert!(r.passed(), "{r}");
    // top coefficient a_2 (μ - λ) = ±2√2
    let top = comb_of(&c)[0].abs_f64();
    assert!((top - 2.0 * 2f64.sqrt()).abs() < 1e-25);

    let strict = CertOptions {
        allow_numeric: false,
        ..CertOptions::default()
    };
    assert!(certificate_ode_with(&p, &strict).is_err());
}

#[test]
fn bigfloat_precision_follows_the_context() {
    let p = PolyOperator::from_ints(&[1, 1, 1]);
    let ctx = FloatCtx::new(256, 1e-60).unwrap();
    let c = certificate_ode_with(
        &p,
        &CertOptions {
            ctx,
            allow_numeric: true,
        },
    )
    .unwrap();
    assert_eq!(c.backend(), Backend::Float(ctx));
    assert!(verify_certificate(&c, &p, false).passed());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn certificates_are_sound(seed in any::<u64>()) {
        let mut r = rng(seed);
        let degree = r.gen_range(2..=6);
        let pattern = [gen::RootPattern::Distinct, gen::RootPattern::Repeated][r.gen_range(0..2)];
        let p = gen::operator_with_roots(&mut r, degree, pattern);
        prop_assert!(!decide_ode(&p).unwrap());
        let c = certificate_ode(&p).unwrap();
        prop_assert!(c.backend().is_exact());
        let comb = comb_of(&c);
        prop_assert!(comb.iter().any(|x| !x.is_zero()));
        let report = verify_certificate(&c, &p, false);
        prop_assert!(report.passed(), "{}\n{}", p, report);
    }

    #[test]
    fn top_coefficient_law(seed in any::<u64>()) {
        let mut r = rng(seed);
        let degree = r.gen_range(2..=6);
        let p = gen::operator_with_roots(&mut r, degree, gen::RootPattern::Any);
        let an = p.leading().unwrap().clone();
        let c = certificate_ode(&p).unwrap();
        let Certificate::Counterexample { kind, lambda, mu, residual, .. } = &c else { panic!("closure") };
        let want = match kind {
            ConcatKind::Distinct => &an * &(mu.as_ref().unwrap() - lambda),
            ConcatKind::Repeated => an,
        };
        prop_assert_eq!(residual.singular.order(), Some(degree - 2));
        prop_assert_eq!(residual.singular.coeff(degree - 2), want);
    }

    #[test]
    fn scaling_the_operator_scales_the_residual(seed in any::<u64>()) {
        let mut r = rng(seed);
        let degree = r.gen_range(2..=5);
        let p = gen::operator_with_roots(&mut r, degree, gen::RootPattern::Any);
        let c = Scalar::Exact(gen::nonzero_gauss(&mut r, 4, 3));
        let cp = p.scale(&c);
        prop_assert_eq!(decide_ode(&p).unwrap(), decide_ode(&cp).unwrap());
        let a = comb_of(&certificate_ode(&p).unwrap());
        let b = comb_of(&certificate_ode(&cp).unwrap());
        prop_assert_eq!(b, a.iter().map(|x| x * &c).collect::<Vec<_>>());
    }

    #[test]
    fn first_order_matched_pairs_concatenate_cleanly(seed in any::<u64>()) {
        let mut r = rng(seed);
        let p = gen::operator_coeffs(&mut r, 1);
        let Certificate::Closure { lambda } = certificate_ode(&p).unwrap() else { panic!("counterexample") };
        let k = Scalar::Exact(gen::gauss(&mut r, 5, 3));
        let u = ExpPoly::exp(lambda).scale(&k).unwrap();
        let t = Distribution::from_concat(&u, &u, true).unwrap();
        prop_assert!(t.apply_op(&p).unwrap().is_zero());
    }
}

#[test]
fn numeric_crosscheck_on_a_few_operators() {
    let mut r = rng(7);
    for degree in 2..=6 {
        let p = gen::operator_with_roots(&mut r, degree, gen::RootPattern::Any);
        let c = certificate_ode(&p).unwrap();
        let report = verify_certificate(&c, &p, true);
        assert!(report.passed(), "{p}\n{report}");
        assert!(report.checks.iter().any(|c| c.name == "adjoint_comb_combined"));
    }
}
