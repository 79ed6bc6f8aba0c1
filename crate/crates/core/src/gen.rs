//! Seeded random instances for property batches.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;

use crate::distribution::{ConcatFunction, DeltaComb, Distribution};
use crate::exppoly::ExpPoly;
use crate::multipoly::{MultiPoly, SparsePoly};
use crate::poly::{Poly1, PolyOperator};
use crate::scalar::{Backend, GaussRat, Scalar};

pub fn small_rational<R: Rng>(rng: &mut R, num: i64, den: i64) -> BigRational {
    BigRational::new(
        BigInt::from(rng.gen_range(-num..=num)),
        BigInt::from(rng.gen_range(1..=den)),
    )
}

/// Gaussian rational with `|re|, |im| <= num` and denominators up to `den`.
pub fn gauss<R: Rng>(rng: &mut R, num: i64, den: i64) -> GaussRat {
    GaussRat::new(small_rational(rng, num, den), small_rational(rng, num, den))
}

pub fn nonzero_gauss<R: Rng>(rng: &mut R, num: i64, den: i64) -> GaussRat {
    loop {
        let g = gauss(rng, num, den);
        if !g.is_zero() {
            return g;
        }
    }
}

/// Root pattern of a random operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RootPattern {
    /// Pairwise distinct roots.
    Distinct,
    /// At least one root of multiplicity two or more.
    Repeated,
    Any,
}

/// `leading * Π (t - r)^m` of the given degree with Gaussian-rational roots,
/// kept in factored form.
pub fn operator_with_roots<R: Rng>(rng: &mut R, degree: usize, pattern: RootPattern) -> PolyOperator {
    loop {
        let mut mults = Vec::new();
        let mut left = degree;
        while left > 0 {
            let m = match pattern {
                RootPattern::Distinct => 1,
                _ => rng.gen_range(1..=left),
            };
            mults.push(m);
            left -= m;
        }
        if pattern == RootPattern::Repeated && mults.iter().all(|&m| m == 1) {
            if degree < 2 {
                continue;
            }
            mults = vec![2];
            mults.extend(std::iter::repeat_n(1, degree - 2));
        }
        let mut roots: Vec<(Scalar, usize)> = Vec::new();
        for m in mults {
            let r = Scalar::Exact(gauss(rng, 4, 3));
            if roots.iter().any(|(q, _)| *q == r) {
                roots.clear();
                break;
            }
            roots.push((r, m));
        }
        if roots.is_empty() {
            continue;
        }
        let leading = Scalar::Exact(nonzero_gauss(rng, 3, 2));
        return PolyOperator::from_roots(leading, roots).expect("nonzero leading coefficient");
    }
}

/// Operator with small random coefficients and nonzero leading coefficient.
pub fn operator_coeffs<R: Rng>(rng: &mut R, degree: usize) -> PolyOperator {
    let mut cs: Vec<Scalar> = (0..degree).map(|_| Scalar::Exact(gauss(rng, 3, 2))).collect();
    cs.push(Scalar::Exact(nonzero_gauss(rng, 3, 2)));
    PolyOperator::from_coeffs(Backend::Exact, cs).expect("exact coefficients")
}

/// Up to `terms` exponential terms with polynomial factors of degree < 3.
pub fn exppoly<R: Rng>(rng: &mut R, terms: usize) -> ExpPoly {
    let mut u = ExpPoly::zero(Backend::Exact);
    for _ in 0..terms {
        let deg = rng.gen_range(0..3);
        let poly = Poly1::new(
            Backend::Exact,
            (0..=deg).map(|_| Scalar::Exact(gauss(rng, 3, 2))).collect(),
        )
        .expect("exact coefficients");
        let lambda = Scalar::Exact(gauss(rng, 2, 2));
        u = u.add(&ExpPoly::term(poly, lambda)).expect("same backend");
    }
    u
}

pub fn comb<R: Rng>(rng: &mut R, max_order: usize) -> DeltaComb {
    let n = rng.gen_range(1..=max_order + 1);
    let coeffs = (0..n).map(|_| Scalar::Exact(gauss(rng, 5, 3))).collect();
    DeltaComb::new(Backend::Exact, coeffs).expect("exact coefficients")
}

/// Concatenation of two random exponential polynomials (not necessarily
/// matching at the origin) plus a random comb.
pub fn distribution<R: Rng>(rng: &mut R) -> Distribution {
    let left = exppoly(rng, 2);
    let right = exppoly(rng, 2);
    let c = comb(rng, 2);
    Distribution::new(ConcatFunction::new(left, right).expect("same backend"), c).expect("same backend")
}

/// Sparse polynomial in `d` variables with at most `terms` terms and
/// per-variable degree at most `max_deg`.
pub fn sparse<R: Rng>(rng: &mut R, d: usize, terms: usize, max_deg: u32) -> SparsePoly {
    let items: Vec<(Vec<u32>, GaussRat)> = (0..terms)
        .map(|_| {
            let alpha = (0..d).map(|_| rng.gen_range(0..=max_deg)).collect();
            (alpha, gauss(rng, 4, 3))
        })
        .collect();
    SparsePoly::from_terms(d, items).expect("consistent dimension")
}

pub fn nonzero_sparse<R: Rng>(rng: &mut R, d: usize, terms: usize, max_deg: u32) -> SparsePoly {
    loop {
        let a = sparse(rng, d, terms.max(1), max_deg);
        if !a.is_zero() {
            return a;
        }
    }
}

/// Operator of t-degree `n` in `d` spatial variables.
pub fn multipoly<R: Rng>(rng: &mut R, d: usize, n: usize, terms: usize, max_deg: u32) -> MultiPoly {
    let mut tcoeffs: Vec<SparsePoly> = (0..n).map(|_| sparse(rng, d, terms, max_deg)).collect();
    tcoeffs.push(nonzero_sparse(rng, d, terms, max_deg));
    MultiPoly::new(d, tcoeffs).expect("consistent dimension")
}
