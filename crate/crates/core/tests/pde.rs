use concat_core::gen;
use concat_core::ode::{decide_ode, CertOptions, Certificate, CheckStatus, VerifyOptions};
use concat_core::pde::{
    apply_spatial, certificate_pde, decide_pde, lifted_operator, specialize, verify_certificate_pde, witness_xi,
};
use concat_core::text::parse_operator;
use concat_core::{GaussRat, Mode, MultiPoly, Scalar};
use num_rational::BigRational;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn op(src: &str) -> MultiPoly {
    parse_operator(src, None).unwrap()
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

fn g(n: i64) -> GaussRat {
    GaussRat::from_i64(n)
}

#[test]
fn golden_corpus() {
    let corpus = [
        ("t + x1", Mode::Growing, true),
        ("t - x1^2", Mode::Growing, true),
        ("t - i*x1^2", Mode::Oscillatory, true),
        ("t^2 - x1^2", Mode::Growing, false),
        ("t^2 + x1^4", Mode::Growing, false),
    ];
    for (src, mode, yes) in corpus {
        let p = op(src);
        assert_eq!(decide_pde(&p).unwrap(), yes, "{src}");
        let cert = certificate_pde(&p, mode, None, &CertOptions::default()).unwrap();
        assert_eq!(cert.is_closure(), yes, "{src}");
        assert!(cert.base.backend().is_exact(), "{src}");
        let r = verify_certificate_pde(&cert, &p, &VerifyOptions::with_crosscheck());
        assert!(r.passed(), "{src}\n{r}");
    }
}

#[test]
fn wave_counterexample_at_origin() {
    // a_2 = 1 never vanishes, so ξ = 0 and p_ξ = t^2 has a double root at 0
    let p = op("t^2 - x1^2");
    let cert = certificate_pde(&p, Mode::Growing, None, &CertOptions::default()).unwrap();
    assert_eq!(cert.xi, vec![g(0)]);
    let Certificate::Counterexample { residual, .. } = &cert.base else {
        panic!()
    };
    assert_eq!(residual.singular.coeffs(), &[Scalar::exact(1, 0)]);
}

#[test]
fn witness_skips_zeros_of_the_leading_coefficient() {
    // a_2 = x1 - x2 vanishes at (0,0) and (1,1); lex scan hits (0,1) first
    let p = op("(x1 - x2)*t^2 + t");
    assert_eq!(witness_xi(&p, Mode::Growing).unwrap(), vec![g(0), g(1)]);
    // a_1 = x1^3 + x1 vanishes at 0 in both modes and at 1 only after ξ -> iξ
    let p = op("(x1^3 + x1)*t + 3");
    assert_eq!(witness_xi(&p, Mode::Growing).unwrap(), vec![g(1)]);
    assert_eq!(witness_xi(&p, Mode::Oscillatory).unwrap(), vec![g(2)]);
}

#[test]
fn oscillatory_substitutes_i_xi() {
    // Schrödinger-type: t - i x1^2 at ξ = 2 gives t - i(2i)^2 = t + 4i
    let p = op("t - i*x1^2");
    let s = specialize(&p, &[g(2)], Mode::Oscillatory).unwrap();
    assert_eq!(s.coeff(0), Scalar::exact(0, 4));
    let s = specialize(&p, &[g(2)], Mode::Growing).unwrap();
    assert_eq!(s.coeff(0), Scalar::exact(0, -4));
}

#[test]
fn xi_override_and_errors() {
    let p = op("t^2 - x1^2 + x2");
    let cert = certificate_pde(&p, Mode::Growing, Some(vec![g(3), g(-1)]), &CertOptions::default()).unwrap();
    assert!(verify_certificate_pde(&cert, &p, &VerifyOptions::default()).passed());
    assert!(certificate_pde(&p, Mode::Growing, Some(vec![g(3)]), &CertOptions::default()).is_err());
    assert!(certificate_pde(
        &p,
        Mode::Growing,
        Some(vec![g(1), GaussRat::i()]),
        &CertOptions::default()
    )
    .is_err());
    // leading coefficient x1 vanishes at the override
    let q = op("x1*t^2 + 1");
    assert!(certificate_pde(&q, Mode::Growing, Some(vec![g(0)]), &CertOptions::default()).is_err());
    assert!(decide_pde(&op("x1^2 + 1")).is_err());
}

#[test]
fn tampered_plane_wave_certificate_fails() {
    let p = op("t^2 - x1^2");
    let mut cert = certificate_pde(&p, Mode::Growing, None, &CertOptions::default()).unwrap();
    cert.xi = vec![g(1)];
    let r = verify_certificate_pde(&cert, &p, &VerifyOptions::default());
    assert_eq!(r.verdict(), CheckStatus::Fail);
    let q = op("t - i*x1^2");
    let mut cert = certificate_pde(&q, Mode::Oscillatory, Some(vec![g(1)]), &CertOptions::default()).unwrap();
    cert.mode = Mode::Growing;
    let r = verify_certificate_pde(&cert, &q, &VerifyOptions::default());
    assert_eq!(r.verdict(), CheckStatus::Fail, "{r}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spatial_action_commutes_with_specialization(seed in any::<u64>()) {
        let mut r = rng(seed);
        let d = r.gen_range(1..=3);
        let terms = r.gen_range(1..=4);
        let a = gen::sparse(&mut r, d, terms, 4);
        let zeta: Vec<GaussRat> = (0..d).map(|_| gen::gauss(&mut r, 3, 2)).collect();
        let q = apply_spatial(&a, &zeta).unwrap();
        prop_assert_eq!(q.as_constant(), Some(a.eval(&zeta).unwrap()));
    }

    #[test]
    fn lifted_operator_equals_specialization(seed in any::<u64>()) {
        let mut r = rng(seed);
        let d = r.gen_range(1..=3);
        let n = r.gen_range(1..=3);
        let p = gen::multipoly(&mut r, d, n, 3, 4);
        let xi: Vec<GaussRat> = (0..d).map(|_| GaussRat::real(gen::small_rational(&mut r, 3, 2))).collect();
        for mode in [Mode::Growing, Mode::Oscillatory] {
            prop_assert_eq!(lifted_operator(&p, &xi, mode).unwrap(), specialize(&p, &xi, mode).unwrap());
        }
    }

    #[test]
    fn decision_matches_specialized_decision(seed in any::<u64>()) {
        let mut r = rng(seed);
        let d = r.gen_range(0..=3);
        let n = r.gen_range(1..=4);
        let p = gen::multipoly(&mut r, d, n, 3, 3);
        for mode in [Mode::Growing, Mode::Oscillatory] {
            let xi = witness_xi(&p, mode).unwrap();
            let s = specialize(&p, &xi, mode).unwrap();
            prop_assert_eq!(s.degree(), Some(n));
            prop_assert_eq!(decide_pde(&p).unwrap(), decide_ode(&s).unwrap());
        }
    }
}

#[test]
fn grid_lemma_on_random_leading_coefficients() {
    let mut r = rng(11);
    for _ in 0..100 {
        let d = r.gen_range(1..=3);
        let terms = r.gen_range(1..=6);
        let an = gen::nonzero_sparse(&mut r, d, terms, 3);
        let p = MultiPoly::new(d, vec![gen::sparse(&mut r, d, 2, 3), an.clone()]).unwrap();
        for mode in [Mode::Growing, Mode::Oscillatory] {
            let xi = witness_xi(&p, mode).unwrap();
            let top = an.max_var_degree() as i64;
            assert!(xi.iter().all(|x| x.is_real() && x.re >= rat(0) && x.re <= rat(top)));
            assert!(!an.eval(&mode.substitution(&xi)).unwrap().is_zero());
        }
    }
}
