//! Small embedded property corpus, run by `concat-calc selftest`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::distribution::{fk_closed_form, witness_pair, ConcatKind, Distribution};
use crate::gen;
use crate::ode::{certificate_ode, decide_ode, verify_certificate_with, Certificate, VerifyOptions};
use crate::oracle::{adjoint_pair_derivative, pair, PairOptions, TestFunction};
use crate::pde::{certificate_pde, decide_pde, specialize, verify_certificate_pde, witness_xi, Mode};
use crate::scalar::{rat, Scalar};
use crate::text::{parse_operator, print_operator};

#[derive(Clone, Debug)]
pub struct PropertyResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn outcome(name: &'static str, failures: Vec<String>, cases: usize) -> PropertyResult {
    PropertyResult {
        name,
        passed: failures.is_empty(),
        detail: match failures.first() {
            None => format!("{cases} cases"),
            Some(f) => format!("{} of {cases} failed; first: {f}", failures.len()),
        },
    }
}

fn closed_form(rng: &mut ChaCha8Rng) -> PropertyResult {
    let mut failures = Vec::new();
    let mut cases = 0;
    for _ in 0..5 {
        let lambda = Scalar::Exact(gen::gauss(rng, 3, 2));
        let mu = Scalar::Exact(gen::gauss(rng, 3, 2));
        for (kind, mu) in [(ConcatKind::Repeated, None), (ConcatKind::Distinct, Some(&mu))] {
            if kind == ConcatKind::Distinct && mu == Some(&lambda) {
                continue;
            }
            let (u1, u2) = witness_pair(kind, &lambda, mu).expect("witness");
            let mut d = Distribution::from_concat(&u1, &u2, true).expect("matched");
            for k in 0..=8 {
                cases += 1;
                let closed = fk_closed_form(kind, k, &lambda, mu).expect("closed form");
                if closed != d {
                    failures.push(format!("{kind:?} k={k} λ={lambda}"));
                }
                d = d.derive();
            }
        }
    }
    outcome("closed_form_matches_iteration", failures, cases)
}

fn ode_soundness(rng: &mut ChaCha8Rng) -> PropertyResult {
    let mut failures = Vec::new();
    let n = 20;
    for i in 0..n {
        let degree = rng.gen_range(2..=6);
        let pattern = if i % 2 == 0 {
            gen::RootPattern::Distinct
        } else {
            gen::RootPattern::Repeated
        };
        let p = gen::operator_with_roots(rng, degree, pattern);
        let opts = VerifyOptions {
            numeric_crosscheck: i < 2,
            ..VerifyOptions::default()
        };
        match certificate_ode(&p) {
            Ok(c @ Certificate::Counterexample { .. }) => {
                let r = verify_certificate_with(&c, &p, &opts);
                if !r.passed() {
                    failures.push(format!("{p}: {r}"));
                }
            }
            Ok(_) => failures.push(format!("{p}: closure for degree {degree}")),
            Err(e) => failures.push(format!("{p}: {e}")),
        }
    }
    outcome("ode_certificates_verify", failures, n)
}

fn degree_one(rng: &mut ChaCha8Rng) -> PropertyResult {
    let mut failures = Vec::new();
    let n = 10;
    for _ in 0..n {
        let p = gen::operator_coeffs(rng, 1);
        let ok = decide_ode(&p).unwrap_or(false)
            && certificate_ode(&p)
                .map(|c| verify_certificate_with(&c, &p, &VerifyOptions::default()).passed())
                .unwrap_or(false);
        if !ok {
            failures.push(p.to_string());
        }
    }
    outcome("degree_one_closure", failures, n)
}

fn pde_corpus() -> PropertyResult {
    let corpus = [
        ("t + x1", Mode::Growing, true),
        ("t - x1^2", Mode::Growing, true),
        ("t - i*x1^2", Mode::Oscillatory, true),
        ("t^2 - x1^2", Mode::Growing, false),
        ("t^2 + x1^4", Mode::Growing, false),
    ];
    let mut failures = Vec::new();
    for (src, mode, expect) in corpus {
        let p = parse_operator(src, None).expect("corpus parses");
        let decided = decide_pde(&p).ok();
        let verified = certificate_pde(&p, mode, None, &Default::default())
            .map(|c| verify_certificate_pde(&c, &p, &VerifyOptions::default()).passed() && c.is_closure() == expect)
            .unwrap_or(false);
        if decided != Some(expect) || !verified {
            failures.push(src.to_string());
        }
    }
    outcome("pde_corpus", failures, corpus.len())
}

fn pde_consistency(rng: &mut ChaCha8Rng) -> PropertyResult {
    let mut failures = Vec::new();
    let n = 20;
    for _ in 0..n {
        let d = rng.gen_range(1..=3);
        let tdeg = rng.gen_range(1..=3);
        let p = gen::multipoly(rng, d, tdeg, 3, 3);
        let xi = witness_xi(&p, Mode::Growing).expect("grid witness");
        let s = specialize(&p, &xi, Mode::Growing).expect("dimension");
        if decide_pde(&p).ok() != decide_ode(&s).ok() {
            failures.push(print_operator(&p));
        }
    }
    outcome("decision_consistency", failures, n)
}

fn round_trip(rng: &mut ChaCha8Rng) -> PropertyResult {
    let mut failures = Vec::new();
    let n = 50;
    for _ in 0..n {
        let d = rng.gen_range(0..=3);
        let tdeg = rng.gen_range(0..=3);
        let p = gen::multipoly(rng, d, tdeg, 3, 3);
        let text = print_operator(&p);
        match parse_operator(&text, Some(d)) {
            Ok(q) if q == p && print_operator(&q) == text => {}
            _ => failures.push(text),
        }
    }
    outcome("parser_round_trip", failures, n)
}

fn oracle(rng: &mut ChaCha8Rng) -> PropertyResult {
    let mut failures = Vec::new();
    let n = 2;
    let opts = PairOptions::default();
    for _ in 0..n {
        let t = gen::distribution(rng);
        let degree = rng.gen_range(1..=3);
        let p = gen::operator_coeffs(rng, degree);
        let phi = TestFunction::bump(rat(1, 1)).expect("radius");
        let direct = t.apply_op(&p).and_then(|r| pair(&r, &phi, &opts));
        let adjoint = adjoint_pair_derivative(&t, &p, &phi, &opts);
        match (direct, adjoint) {
            (Ok(a), Ok(b)) => {
                let diff = a.value.sub(&b.value, opts.quad.precision).abs_f64();
                if diff >= 1e-9 * (1.0 + a.value.abs_f64()) {
                    failures.push(format!("{t} with {p}: |diff| = {diff:e}"));
                }
            }
            (a, b) => failures.push(format!("{:?} / {:?}", a.err(), b.err())),
        }
    }
    outcome("jump_rule_oracle", failures, n)
}

/// Run every property with the given seed.
pub fn run(seed: u64) -> Vec<PropertyResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    vec![
        closed_form(&mut rng),
        ode_soundness(&mut rng),
        degree_one(&mut rng),
        pde_corpus(),
        pde_consistency(&mut rng),
        round_trip(&mut rng),
        oracle(&mut rng),
    ]
}
