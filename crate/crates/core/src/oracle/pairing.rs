//! Numerical pairing `⟨T, φ⟩` of a distribution with a test function.

use std::collections::HashMap;

use astro_float::BigFloat;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::distribution::Distribution;
use crate::error::{Error, Result};
use crate::exppoly::ExpPoly;
use crate::poly::PolyOperator;
use crate::scalar::{big_zero, rat_to_big, BigComplex, RM};

use super::quadrature::{integrate_batched, PanelNodes, QuadOptions, QuadratureResult};
use super::testfn::{CompiledTf, TestFunction};

#[derive(Clone, Debug, Default)]
pub struct PairOptions {
    pub quad: QuadOptions,
    /// Integrate over `[-R, R]` instead of the test function's support radius.
    /// Must contain the support.
    pub domain: Option<BigRational>,
}

impl PairOptions {
    pub fn with_precision(precision: usize) -> Self {
        Self {
            quad: QuadOptions {
                precision,
                ..QuadOptions::default()
            },
            domain: None,
        }
    }
}

/// `⟨T, φ⟩`.
pub fn pair(t: &Distribution, phi: &TestFunction, opts: &PairOptions) -> Result<QuadratureResult> {
    let p = opts.quad.precision;
    pair_weighted(t, phi, &[BigComplex::one(p)], opts)
}

/// `⟨T, Σ_k (-1)^k a_k φ^{(k)}⟩`, which equals `⟨p(d/dt) T, φ⟩` by the
/// definition of the distributional derivative. Computed from `T` itself
/// without any jump bookkeeping.
pub fn adjoint_pair_derivative(
    t: &Distribution,
    op: &PolyOperator,
    phi: &TestFunction,
    opts: &PairOptions,
) -> Result<QuadratureResult> {
    let p = opts.quad.precision;
    let weights: Vec<BigComplex> = op
        .coeffs()
        .iter()
        .enumerate()
        .map(|(k, a)| {
            let w = a.to_big(p);
            if k % 2 == 1 {
                w.neg()
            } else {
                w
            }
        })
        .collect();
    if weights.is_empty() {
        return Ok(QuadratureResult {
            value: BigComplex::zero(p),
            error_estimate: 0.0,
            nodes: 0,
        });
    }
    pair_weighted(t, phi, &weights, opts)
}

type WidthKey = (Vec<u64>, i32, bool);

fn width_key(x: &BigFloat) -> WidthKey {
    match x.as_raw_parts() {
        Some((words, _, sign, e, _)) => (words.to_vec(), e, sign.is_positive()),
        None => (Vec::new(), 0, true),
    }
}

/// An exponential polynomial prepared for evaluation on Gauss panels.
/// `e^{λ(mid + h x_i)} = e^{λ mid} e^{λ h x_i}`, and bisection produces few
/// distinct widths `h`, so the second factor is cached per width.
struct CompiledExpPoly {
    terms: Vec<(BigComplex, Vec<BigComplex>)>,
    cache: HashMap<WidthKey, Vec<Vec<BigComplex>>>,
}

impl CompiledExpPoly {
    fn new(u: &ExpPoly, p: usize) -> Self {
        Self {
            terms: u
                .terms()
                .iter()
                .map(|t| {
                    (
                        t.exponent.to_big(p),
                        t.poly.coeffs().iter().map(|c| c.to_big(p)).collect(),
                    )
                })
                .collect(),
            cache: HashMap::new(),
        }
    }

    fn eval_panel(&mut self, pn: &PanelNodes, p: usize) -> Vec<BigComplex> {
        let terms = &self.terms;
        let offsets = self.cache.entry(width_key(&pn.half)).or_insert_with(|| {
            terms
                .iter()
                .map(|(lam, _)| {
                    let lh = lam.scale(&pn.half, p);
                    pn.offsets.iter().map(|x| lh.scale(x, p).exp(p)).collect()
                })
                .collect()
        });
        let mut out = vec![BigComplex::zero(p); pn.points.len()];
        for ((lam, coeffs), offs) in terms.iter().zip(offsets.iter()) {
            let base = lam.scale(&pn.mid, p).exp(p);
            for ((slot, t), e) in out.iter_mut().zip(&pn.points).zip(offs) {
                let mut q = BigComplex::zero(p);
                for c in coeffs.iter().rev() {
                    q = q.scale(t, p).add(c, p);
                }
                *slot = slot.add(&q.mul(&base.mul(e, p), p), p);
            }
        }
        out
    }
}

/// `⟨T, Σ_j w_j φ^{(j)}⟩`.
fn pair_weighted(
    dist: &Distribution,
    phi: &TestFunction,
    weights: &[BigComplex],
    opts: &PairOptions,
) -> Result<QuadratureResult> {
    let p = opts.quad.precision;
    let extra = weights.len() - 1;
    let radius = match &opts.domain {
        None => phi.support().clone(),
        Some(r) => {
            if r < phi.support() {
                return Err(Error::InvalidArgument(
                    "integration domain must contain the test function support".into(),
                ));
            }
            r.clone()
        }
    };
    let compiled = phi.compile(p);

    // Breakpoints: the origin, the domain ends, and every piece boundary.
    let mut cuts: Vec<BigRational> = vec![BigRational::zero(), radius.clone(), -radius.clone()];
    for b in phi.breakpoints() {
        if b.abs() < radius {
            cuts.push(b);
        }
    }
    cuts.sort();
    cuts.dedup();

    let sides = [
        CompiledExpPoly::new(&dist.regular.left, p),
        CompiledExpPoly::new(&dist.regular.right, p),
    ];
    let mut panels = Vec::new();
    for w in cuts.windows(2) {
        let side = usize::from(w[1].is_positive());
        let u = if side == 0 {
            &dist.regular.left
        } else {
            &dist.regular.right
        };
        // The integrand vanishes identically on this panel.
        if u.is_zero() {
            continue;
        }
        let mid = rat_to_big(&((&w[0] + &w[1]) / BigRational::from_integer(2.into())), p);
        // Tag: side in the low bit, piece index (or none) above it.
        let piece = compiled.piece_at(&mid).map_or(0, |i| i + 1);
        panels.push((rat_to_big(&w[0], p), rat_to_big(&w[1], p), side | (piece << 1)));
    }

    let combine = |ds: &[BigFloat]| -> BigComplex {
        let mut acc = BigComplex::zero(p);
        for (w, d) in weights.iter().zip(ds) {
            if !d.is_zero() {
                acc = acc.add(&w.scale(d, p), p);
            }
        }
        acc
    };

    let mut sides = sides;
    let integrand = |pn: &PanelNodes| -> Vec<BigComplex> {
        let piece = pn.tag >> 1;
        if piece == 0 {
            return vec![BigComplex::zero(p); pn.points.len()];
        }
        let tests: Vec<BigComplex> = pn
            .points
            .iter()
            .map(|t| combine(&compiled.derivatives_on(piece - 1, t, extra)))
            .collect();
        if tests.iter().all(BigComplex::is_exact_zero) {
            return tests;
        }
        let us = sides[pn.tag & 1].eval_panel(pn, p);
        tests.iter().zip(&us).map(|(a, b)| a.mul(b, p)).collect()
    };
    let mut result = if panels.is_empty() {
        QuadratureResult {
            value: BigComplex::zero(p),
            error_estimate: 0.0,
            nodes: 0,
        }
    } else {
        integrate_batched(integrand, &panels, opts.quad)?
    };

    // Comb part: ⟨δ^{(m)}, ψ⟩ = (-1)^m ψ^{(m)}(0).
    let comb = dist.singular.coeffs();
    if !comb.is_empty() {
        let origin = comb_derivatives(&compiled, extra + comb.len() - 1, p);
        for (m, c) in comb.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let psi = combine(&origin[m..]);
            let mut term = c.to_big(p).mul(&psi, p);
            if m % 2 == 1 {
                term = term.neg();
            }
            result.value = result.value.add(&term, p);
        }
    }
    Ok(result)
}

fn comb_derivatives(compiled: &CompiledTf, extra: usize, p: usize) -> Vec<BigFloat> {
    compiled.derivatives(&big_zero(p), extra)
}

/// `∫ φ` over its support, used for normalisation checks.
pub fn integral(phi: &TestFunction, opts: &PairOptions) -> Result<QuadratureResult> {
    let p = opts.quad.precision;
    let one = ExpPoly::constant(crate::scalar::Scalar::exact(1, 0));
    let _ = RM;
    pair_weighted(&Distribution::regular(&one), phi, &[BigComplex::one(p)], opts)
}
