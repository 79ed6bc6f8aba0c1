//! Globally adaptive Gauss–Legendre quadrature in bigfloat arithmetic.

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use astro_float::BigFloat;

use crate::error::{Error, Result};
#[cfg(test)]
use crate::scalar::big_to_f64;
use crate::scalar::{big_from_i64, big_zero, BigComplex, RM};

pub const GAUSS_POINTS: usize = 32;

#[derive(Debug)]
pub(crate) struct Rule {
    pub nodes: Vec<BigFloat>,
    pub weights: Vec<BigFloat>,
}

thread_local! {
    static RULES: RefCell<HashMap<(usize, usize), Rc<Rule>>> = RefCell::new(HashMap::new());
}

/// `n`-point Gauss–Legendre rule on `[-1, 1]` at precision `p`, cached.
pub(crate) fn gauss_legendre(n: usize, p: usize) -> Rc<Rule> {
    if let Some(r) = RULES.with(|m| m.borrow().get(&(n, p)).cloned()) {
        return r;
    }
    let rule = Rc::new(compute_rule(n, p));
    RULES.with(|m| m.borrow_mut().insert((n, p), rule.clone()));
    rule
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: &BigFloat, q: usize) -> (BigFloat, BigFloat) {
    let one = big_from_i64(1, q);
    let mut p0 = one.clone();
    let mut p1 = x.clone();
    for k in 1..n {
        let kf = big_from_i64(k as i64, q);
        let a = big_from_i64(2 * k as i64 + 1, q).mul(x, q, RM).mul(&p1, q, RM);
        let b = kf.mul(&p0, q, RM);
        let p2 = a.sub(&b, q, RM).div(&big_from_i64(k as i64 + 1, q), q, RM);
        p0 = p1;
        p1 = p2;
    }
    // P_n' = n (x P_n - P_{n-1}) / (x² - 1)
    let nf = big_from_i64(n as i64, q);
    let num = nf.mul(&x.mul(&p1, q, RM).sub(&p0, q, RM), q, RM);
    let den = x.mul(x, q, RM).sub(&one, q, RM);
    (p1.clone(), num.div(&den, q, RM))
}

fn compute_rule(n: usize, p: usize) -> Rule {
    let q = p + 32;
    let mut tol = big_from_i64(1, q);
    tol.set_exponent(-(p as i32) + 2);
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for i in 0..n.div_ceil(2) {
        let guess = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut x = BigFloat::from_f64(guess, q);
        for _ in 0..100 {
            let (pn, dpn) = legendre(n, &x, q);
            let dx = pn.div(&dpn, q, RM);
            x = x.sub(&dx, q, RM);
            if dx.abs_cmp(&tol).is_some_and(|c| c < 0) {
                break;
            }
        }
        let (_, dpn) = legendre(n, &x, q);
        let one = big_from_i64(1, q);
        let w = big_from_i64(2, q).div(
            &one.sub(&x.mul(&x, q, RM), q, RM).mul(&dpn.mul(&dpn, q, RM), q, RM),
            q,
            RM,
        );
        let mut xp = x.clone();
        let mut wp = w;
        xp.set_precision(p, RM).expect("valid precision");
        wp.set_precision(p, RM).expect("valid precision");
        nodes.push(xp);
        weights.push(wp);
    }
    // Mirror the positive half; the middle node of an odd rule is not duplicated.
    let half = nodes.len();
    let mut all_nodes: Vec<BigFloat> = nodes.iter().map(|x| -x.clone()).collect();
    let mut all_weights = weights.clone();
    let mirror = if n % 2 == 1 { half - 1 } else { half };
    for i in (0..mirror).rev() {
        all_nodes.push(nodes[i].clone());
        all_weights.push(weights[i].clone());
    }
    Rule {
        nodes: all_nodes,
        weights: all_weights,
    }
}

#[derive(Clone, Debug)]
pub struct QuadratureResult {
    pub value: BigComplex,
    /// Heuristic: sum over panels of |one rule − two half rules|.
    pub error_estimate: f64,
    pub nodes: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct QuadOptions {
    pub precision: usize,
    /// Stop once the estimate falls below `tol * (1 + |value|)`.
    pub tol: f64,
    pub max_nodes: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            precision: 128,
            tol: 1e-13,
            max_nodes: 200_000,
        }
    }
}

struct Panel {
    lo: BigFloat,
    hi: BigFloat,
    tag: usize,
    halves: [BigComplex; 2],
    err: f64,
}

/// Gauss nodes of one panel, handed to the integrand in a batch so that it can
/// share work between nodes.
pub struct PanelNodes<'a> {
    pub tag: usize,
    pub mid: BigFloat,
    pub half: BigFloat,
    /// Rule abscissae on `[-1, 1]`; `points[i] = mid + half * offsets[i]`.
    pub offsets: &'a [BigFloat],
    pub points: Vec<BigFloat>,
}

fn apply_rule<F>(f: &mut F, rule: &Rule, tag: usize, lo: &BigFloat, hi: &BigFloat, p: usize) -> BigComplex
where
    F: FnMut(&PanelNodes) -> Vec<BigComplex>,
{
    let two = big_from_i64(2, p);
    let mid = lo.add(hi, p, RM).div(&two, p, RM);
    let half = hi.sub(lo, p, RM).div(&two, p, RM);
    let points = rule.nodes.iter().map(|x| mid.add(&half.mul(x, p, RM), p, RM)).collect();
    let panel = PanelNodes {
        tag,
        mid,
        half,
        offsets: &rule.nodes,
        points,
    };
    let values = f(&panel);
    let mut acc = BigComplex::zero(p);
    for (v, w) in values.iter().zip(&rule.weights) {
        if !v.is_exact_zero() {
            acc = acc.add(&v.scale(w, p), p);
        }
    }
    acc.scale(&panel.half, p)
}

/// Integrate over the union of `panels`. Each panel carries a tag passed back
/// to the integrand, so it may switch formula between panels; a panel must not
/// straddle a point where the integrand is not smooth.
pub fn integrate<F>(f: F, panels: &[(BigFloat, BigFloat, usize)], opts: QuadOptions) -> Result<QuadratureResult>
where
    F: FnMut(usize, &BigFloat) -> BigComplex,
{
    let mut f = f;
    integrate_batched(
        |pn: &PanelNodes| pn.points.iter().map(|t| f(pn.tag, t)).collect(),
        panels,
        opts,
    )
}

/// As [`integrate`], with the integrand evaluated one panel at a time.
pub fn integrate_batched<F>(
    mut f: F,
    panels: &[(BigFloat, BigFloat, usize)],
    opts: QuadOptions,
) -> Result<QuadratureResult>
where
    F: FnMut(&PanelNodes) -> Vec<BigComplex>,
{
    let p = opts.precision;
    let rule = gauss_legendre(GAUSS_POINTS, p);
    let two = big_from_i64(2, p);
    let mut nodes = 0usize;
    let evaluate =
        |f: &mut F, lo: &BigFloat, hi: &BigFloat, tag: usize, whole: Option<BigComplex>, nodes: &mut usize| {
            let mid = lo.add(hi, p, RM).div(&two, p, RM);
            let whole = whole.unwrap_or_else(|| {
                *nodes += GAUSS_POINTS;
                apply_rule(f, &rule, tag, lo, hi, p)
            });
            let left = apply_rule(f, &rule, tag, lo, &mid, p);
            let right = apply_rule(f, &rule, tag, &mid, hi, p);
            *nodes += 2 * GAUSS_POINTS;
            let err = whole.sub(&left.add(&right, p), p).abs_f64();
            Panel {
                lo: lo.clone(),
                hi: hi.clone(),
                tag,
                halves: [left, right],
                err,
            }
        };

    let mut work: Vec<Panel> = panels
        .iter()
        .filter(|(lo, hi, _)| lo < hi)
        .map(|(lo, hi, tag)| evaluate(&mut f, lo, hi, *tag, None, &mut nodes))
        .collect();

    loop {
        let total = work.iter().fold(BigComplex::zero(p), |acc, pn| {
            acc.add(&pn.halves[0].add(&pn.halves[1], p), p)
        });
        let err: f64 = work.iter().map(|pn| pn.err).sum();
        let target = opts.tol * (1.0 + total.abs_f64());
        if err <= target {
            return Ok(QuadratureResult {
                value: total,
                error_estimate: err,
                nodes,
            });
        }
        if nodes + 4 * GAUSS_POINTS > opts.max_nodes {
            return Err(Error::QuadratureFailed {
                estimate: err,
                tolerance: target,
                nodes,
            });
        }
        let worst = (0..work.len())
            .max_by(|&a, &b| work[a].err.total_cmp(&work[b].err))
            .expect("nonempty work list");
        let pn = work.swap_remove(worst);
        let mid = pn.lo.add(&pn.hi, p, RM).div(&two, p, RM);
        let [l, r] = pn.halves;
        work.push(evaluate(&mut f, &pn.lo, &mid, pn.tag, Some(l), &mut nodes));
        work.push(evaluate(&mut f, &mid, &pn.hi, pn.tag, Some(r), &mut nodes));
    }
}

/// Convenience for real integrands on a single interval.
pub fn integrate_real<F>(mut f: F, lo: &BigFloat, hi: &BigFloat, opts: QuadOptions) -> Result<(BigFloat, f64)>
where
    F: FnMut(&BigFloat) -> BigFloat,
{
    let p = opts.precision;
    let r = integrate(
        |_, t| BigComplex::new(f(t), big_zero(p)),
        &[(lo.clone(), hi.clone(), 0)],
        opts,
    )?;
    Ok((r.value.re, r.error_estimate))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f64_of(x: &BigFloat) -> f64 {
        big_to_f64(x)
    }

    #[test]
    fn rule_integrates_polynomials_exactly() {
        let p = 128;
        let rule = gauss_legendre(GAUSS_POINTS, p);
        assert_eq!(rule.nodes.len(), GAUSS_POINTS);
        let sum_w = rule.weights.iter().fold(big_zero(p), |a, w| a.add(w, p, RM));
        assert!((f64_of(&sum_w) - 2.0).abs() < 1e-30);
        // ∫_{-1}^{1} x^62 = 2/63
        let s = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .fold(big_zero(p), |a, (x, w)| a.add(&x.powi(62, p, RM).mul(w, p, RM), p, RM));
        assert!((f64_of(&s) - 2.0 / 63.0).abs() < 1e-30);
    }

    #[test]
    fn odd_rule_has_center_node() {
        let rule = gauss_legendre(5, 128);
        assert_eq!(rule.nodes.len(), 5);
        assert!(rule.nodes[2].is_zero() || f64_of(&rule.nodes[2]).abs() < 1e-35);
        assert!((f64_of(&rule.weights[2]) - 128.0 / 225.0).abs() < 1e-30);
    }

    #[test]
    fn adaptive_exp_integral() {
        let p = 128;
        let opts = QuadOptions {
            precision: p,
            ..QuadOptions::default()
        };
        let (v, _) = integrate_real(
            |t| crate::scalar::with_consts(|cc| t.exp(p, RM, cc)),
            &big_zero(p),
            &big_from_i64(3, p),
            opts,
        )
        .unwrap();
        assert!((f64_of(&v) - (3f64.exp() - 1.0)).abs() < 1e-13);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let p = 128;
        let opts = QuadOptions {
            precision: p,
            tol: 1e-30,
            max_nodes: 500,
        };
        // Kink at an irrational point defeats the panel refinement quickly.
        let c = BigFloat::from_f64(std::f64::consts::FRAC_1_SQRT_2, p);
        let r = integrate_real(|t| t.sub(&c, p, RM).abs(), &big_zero(p), &big_from_i64(1, p), opts);
        assert!(matches!(r, Err(Error::QuadratureFailed { .. })));
    }
}
