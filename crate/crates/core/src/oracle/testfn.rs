//! Compactly supported smooth test functions with exact derivatives.
//!
//! A test function is a list of pieces on closed intervals; each piece is an
//! expression tree over `t`, rational constants, reciprocal-affine atoms,
//! sums, products and `exp`. Derivatives of any order are obtained by
//! truncated Taylor arithmetic on the tree, which is exact up to rounding.

use astro_float::BigFloat;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::{big_from_i64, big_to_f64, big_zero, rat_to_big, BigComplex, FloatCtx, Scalar, RM};

#[derive(Clone, Debug, PartialEq)]
pub enum TfExpr {
    /// `t^k`.
    TPow(u32),
    Const(BigRational),
    /// `1 / (offset + slope * t)`.
    Recip {
        offset: BigRational,
        slope: BigRational,
    },
    Add(Vec<TfExpr>),
    Mul(Vec<TfExpr>),
    Exp(Box<TfExpr>),
}

impl TfExpr {
    fn scaled(c: BigRational, e: TfExpr) -> TfExpr {
        TfExpr::Mul(vec![TfExpr::Const(c), e])
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Piece {
    pub lo: BigRational,
    pub hi: BigRational,
    pub expr: TfExpr,
}

/// A test function, differentiated `order` times.
#[derive(Clone, Debug, PartialEq)]
pub struct TestFunction {
    label: String,
    support: BigRational,
    /// Searched in order; the first piece containing `t` wins.
    pieces: Vec<Piece>,
    order: usize,
}

impl TestFunction {
    /// `exp(-a² / (a² - t²))` on `(-a, a)`, zero outside. Peak value `e^{-1}`.
    pub fn bump(a: BigRational) -> Result<Self> {
        check_radius(&a)?;
        // a² / (a² - t²) = (a/2) (1/(a - t) + 1/(a + t))
        let half = &a / BigRational::from_integer(2.into());
        let v = TfExpr::Recip {
            offset: a.clone(),
            slope: -BigRational::one(),
        };
        let w = TfExpr::Recip {
            offset: a.clone(),
            slope: BigRational::one(),
        };
        let arg = TfExpr::scaled(-half, TfExpr::Add(vec![v, w]));
        Ok(Self {
            label: format!("bump({})", crate::scalar::fmt_rat(&a)),
            support: a.clone(),
            pieces: vec![Piece {
                lo: -a.clone(),
                hi: a,
                expr: TfExpr::Exp(Box::new(arg)),
            }],
            order: 0,
        })
    }

    /// Equals `t^k / k!` on `|t| ≤ plateau * a`, vanishes for `|t| ≥ a`, and
    /// joins the two with a flat smooth step. Its derivatives at the origin
    /// are `δ_{jk}`, so pairing against it isolates the `δ^{(k)}` coefficient.
    pub fn monomial_window(k: u32, a: BigRational, plateau: BigRational) -> Result<Self> {
        let mut fact = BigInt::one();
        for j in 2..=k {
            fact *= j;
        }
        let mut coeffs = vec![BigRational::from_integer(0.into()); k as usize];
        coeffs.push(BigRational::new(BigInt::one(), fact));
        let mut w = Self::polynomial_window(&coeffs, a, plateau)?;
        w.label = format!(
            "window({k}, {}, {})",
            crate::scalar::fmt_rat(&w.support),
            crate::scalar::fmt_rat(&(&w.pieces[0].hi / &w.support))
        );
        Ok(w)
    }

    /// `Σ_j coeffs[j] t^j` on the plateau, cut off by the same step as
    /// [`TestFunction::monomial_window`].
    pub fn polynomial_window(coeffs: &[BigRational], a: BigRational, plateau: BigRational) -> Result<Self> {
        check_radius(&a)?;
        if !(plateau.is_positive() && plateau < BigRational::one()) {
            return Err(Error::InvalidArgument(format!(
                "plateau fraction must lie in (0, 1), got {}",
                crate::scalar::fmt_rat(&plateau)
            )));
        }
        let b = &plateau * &a;
        let w = &a - &b;
        let terms: Vec<TfExpr> = coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| TfExpr::scaled(c.clone(), TfExpr::TPow(j as u32)))
            .collect();
        let poly = match terms.len() {
            1 => terms.into_iter().next().expect("one term"),
            _ => TfExpr::Add(terms),
        };
        let one = BigRational::one;
        // s = (±t - b) / w runs 0 → 1 across a transition; the step is
        // exp(-exp(-1/s) / (1 - s)) with 1/s = w U and 1/(1 - s) = w V.
        let step = |sign: BigRational| {
            let u = TfExpr::Recip {
                offset: -b.clone(),
                slope: sign.clone(),
            };
            let v = TfExpr::Recip {
                offset: a.clone(),
                slope: -sign,
            };
            let e = TfExpr::Exp(Box::new(TfExpr::scaled(-w.clone(), u)));
            TfExpr::Exp(Box::new(TfExpr::Mul(vec![TfExpr::Const(-w.clone()), e, v])))
        };
        let pieces = vec![
            Piece {
                lo: -b.clone(),
                hi: b.clone(),
                expr: poly.clone(),
            },
            Piece {
                lo: b.clone(),
                hi: a.clone(),
                expr: TfExpr::Mul(vec![poly.clone(), step(one())]),
            },
            Piece {
                lo: -a.clone(),
                hi: -b.clone(),
                expr: TfExpr::Mul(vec![poly, step(-one())]),
            },
        ];
        let shown: Vec<String> = coeffs.iter().map(crate::scalar::fmt_rat).collect();
        Ok(Self {
            label: format!(
                "polywindow([{}], {}, {})",
                shown.join(", "),
                crate::scalar::fmt_rat(&a),
                crate::scalar::fmt_rat(&plateau)
            ),
            support: a,
            pieces,
            order: 0,
        })
    }

    /// `φ^{(k)}`.
    pub fn derive(&self, k: usize) -> Self {
        let mut out = self.clone();
        out.order += k;
        out
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn label(&self) -> String {
        match self.order {
            0 => self.label.clone(),
            k => format!("{}^({k})", self.label),
        }
    }

    /// The support is contained in `[-support, support]`.
    pub fn support(&self) -> &BigRational {
        &self.support
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// Points where the piece structure changes, sorted.
    pub fn breakpoints(&self) -> Vec<BigRational> {
        let mut pts: Vec<BigRational> = self.pieces.iter().flat_map(|p| [p.lo.clone(), p.hi.clone()]).collect();
        pts.sort();
        pts.dedup();
        pts
    }

    /// Precision-specific form for repeated evaluation.
    pub(crate) fn compile(&self, p: usize) -> CompiledTf {
        CompiledTf {
            support: rat_to_big(&self.support, p),
            pieces: self
                .pieces
                .iter()
                .map(|pc| CompiledPiece {
                    lo: rat_to_big(&pc.lo, p),
                    hi: rat_to_big(&pc.hi, p),
                    expr: CExpr::compile(&pc.expr, p),
                })
                .collect(),
            order: self.order,
            p,
        }
    }

    /// `φ^{(order + j)}(t)` for `j = 0..=extra`.
    pub fn derivatives_at(&self, t: &BigFloat, extra: usize, p: usize) -> Vec<BigFloat> {
        self.compile(p).derivatives(t, extra)
    }

    /// Value of this (possibly differentiated) test function.
    pub fn eval_big(&self, t: &BigFloat, p: usize) -> BigFloat {
        self.derivatives_at(t, 0, p).swap_remove(0)
    }

    pub fn eval(&self, t: &Scalar, ctx: FloatCtx) -> Result<Scalar> {
        let z = t.coerce(crate::scalar::Backend::Float(ctx))?.to_big(ctx.precision);
        if !z.im.is_zero() {
            return Err(Error::InvalidArgument("test functions take real arguments".into()));
        }
        let v = self.eval_big(&z.re, ctx.precision);
        Ok(Scalar::Float(BigComplex::from_real(v, ctx.precision), ctx))
    }

    pub fn eval_f64(&self, t: f64) -> f64 {
        big_to_f64(&self.eval_big(&BigFloat::from_f64(t, 128), 128))
    }
}

fn check_radius(a: &BigRational) -> Result<()> {
    if a.is_positive() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "support radius must be positive, got {}",
            crate::scalar::fmt_rat(a)
        )))
    }
}

#[derive(Clone, Debug)]
pub(crate) enum CExpr {
    TPow(u32),
    Const(BigFloat),
    Recip { offset: BigFloat, slope: BigFloat },
    Add(Vec<CExpr>),
    Mul(Vec<CExpr>),
    Exp(Box<CExpr>),
}

impl CExpr {
    fn compile(e: &TfExpr, p: usize) -> CExpr {
        match e {
            TfExpr::TPow(k) => CExpr::TPow(*k),
            TfExpr::Const(c) => CExpr::Const(rat_to_big(c, p)),
            TfExpr::Recip { offset, slope } => CExpr::Recip {
                offset: rat_to_big(offset, p),
                slope: rat_to_big(slope, p),
            },
            TfExpr::Add(xs) => CExpr::Add(xs.iter().map(|x| CExpr::compile(x, p)).collect()),
            TfExpr::Mul(xs) => CExpr::Mul(xs.iter().map(|x| CExpr::compile(x, p)).collect()),
            TfExpr::Exp(x) => CExpr::Exp(Box::new(CExpr::compile(x, p))),
        }
    }

    /// Taylor coefficients `f^{(j)}(t) / j!`, `j = 0..n`.
    fn jet(&self, t: &BigFloat, n: usize, p: usize) -> Vec<BigFloat> {
        match self {
            CExpr::TPow(k) => {
                let k = *k as usize;
                // (t + s)^k = Σ_j C(k, j) t^{k-j} s^j
                let mut out = vec![big_zero(p); n];
                let mut powers = Vec::with_capacity(k + 1);
                powers.push(big_from_i64(1, p));
                for i in 1..=k {
                    powers.push(powers[i - 1].mul(t, p, RM));
                }
                let mut binom = BigInt::one();
                for (j, slot) in out.iter_mut().enumerate().take(k + 1) {
                    *slot = powers[k - j].mul(&crate::scalar::int_to_big(&binom), p, RM);
                    binom = binom * (k - j) / (j + 1);
                }
                out
            }
            CExpr::Const(c) => {
                let mut out = vec![big_zero(p); n];
                out[0] = c.clone();
                out
            }
            CExpr::Recip { offset, slope } => {
                // 1/(c + βs) = (1/c) Σ_j (-β/c)^j s^j
                let c = offset.add(&slope.mul(t, p, RM), p, RM);
                let r = big_from_i64(1, p).div(&c, p, RM);
                let q = (-slope.clone()).mul(&r, p, RM);
                let mut out = Vec::with_capacity(n);
                out.push(r);
                for j in 1..n {
                    let next = out[j - 1].mul(&q, p, RM);
                    out.push(next);
                }
                out
            }
            CExpr::Add(xs) => {
                let mut acc = vec![big_zero(p); n];
                for x in xs {
                    for (a, b) in acc.iter_mut().zip(x.jet(t, n, p)) {
                        if !b.is_zero() {
                            *a = a.add(&b, p, RM);
                        }
                    }
                }
                acc
            }
            CExpr::Mul(xs) => {
                // Constant factors scale the product instead of entering a
                // Cauchy product.
                let mut scale: Option<BigFloat> = None;
                let mut acc: Option<Vec<BigFloat>> = None;
                for x in xs {
                    if let CExpr::Const(c) = x {
                        scale = Some(match scale {
                            None => c.clone(),
                            Some(s) => s.mul(c, p, RM),
                        });
                        continue;
                    }
                    let j = x.jet(t, n, p);
                    acc = Some(match acc {
                        None => j,
                        Some(a) => cauchy(&a, &j, p),
                    });
                }
                let mut out = acc.unwrap_or_else(|| {
                    let mut one = vec![big_zero(p); n];
                    one[0] = big_from_i64(1, p);
                    one
                });
                if let Some(s) = scale {
                    for v in out.iter_mut() {
                        if !v.is_zero() {
                            *v = v.mul(&s, p, RM);
                        }
                    }
                }
                out
            }
            CExpr::Exp(x) => {
                let g = x.jet(t, n, p);
                let mut h = Vec::with_capacity(n);
                h.push(crate::elementary::exp(&g[0], p));
                // h' = g' h, i.e. m h_m = Σ_{j=1}^{m} j g_j h_{m-j}
                let jg: Vec<BigFloat> = g
                    .iter()
                    .enumerate()
                    .map(|(j, v)| {
                        if j < 2 {
                            v.clone()
                        } else {
                            v.mul(&big_from_i64(j as i64, p), p, RM)
                        }
                    })
                    .collect();
                for m in 1..n {
                    let mut s = big_zero(p);
                    for j in 1..=m {
                        if jg[j].is_zero() {
                            continue;
                        }
                        s = s.add(&jg[j].mul(&h[m - j], p, RM), p, RM);
                    }
                    if m > 1 {
                        s = s.div(&big_from_i64(m as i64, p), p, RM);
                    }
                    h.push(s);
                }
                h
            }
        }
    }
}

fn cauchy(a: &[BigFloat], b: &[BigFloat], p: usize) -> Vec<BigFloat> {
    let n = a.len();
    (0..n)
        .map(|m| {
            let mut s = big_zero(p);
            for j in 0..=m {
                if a[j].is_zero() || b[m - j].is_zero() {
                    continue;
                }
                s = s.add(&a[j].mul(&b[m - j], p, RM), p, RM);
            }
            s
        })
        .collect()
}

#[derive(Clone, Debug)]
pub(crate) struct CompiledPiece {
    pub lo: BigFloat,
    pub hi: BigFloat,
    expr: CExpr,
}

#[derive(Clone, Debug)]
pub(crate) struct CompiledTf {
    support: BigFloat,
    pub pieces: Vec<CompiledPiece>,
    order: usize,
    p: usize,
}

impl CompiledTf {
    /// Index of the piece used at `t`, `None` where the function vanishes.
    pub fn piece_at(&self, t: &BigFloat) -> Option<usize> {
        if t.abs_cmp(&self.support).is_none_or(|c| c >= 0) {
            return None;
        }
        self.pieces.iter().position(|pc| pc.lo <= *t && *t <= pc.hi)
    }

    /// `φ^{(order + j)}(t)` for `j = 0..=extra`, using piece `idx`.
    pub fn derivatives_on(&self, idx: usize, t: &BigFloat, extra: usize) -> Vec<BigFloat> {
        let p = self.p;
        let n = self.order + extra + 1;
        let jet = self.pieces[idx].expr.jet(t, n, p);
        let mut fact = big_from_i64(1, p);
        for j in 2..=self.order {
            fact = fact.mul(&big_from_i64(j as i64, p), p, RM);
        }
        let mut out = Vec::with_capacity(extra + 1);
        for (j, c) in jet.into_iter().enumerate().skip(self.order) {
            if j > self.order {
                fact = fact.mul(&big_from_i64(j as i64, p), p, RM);
            }
            out.push(c.mul(&fact, p, RM));
        }
        out
    }

    pub fn derivatives(&self, t: &BigFloat, extra: usize) -> Vec<BigFloat> {
        match self.piece_at(t) {
            Some(i) => self.derivatives_on(i, t, extra),
            None => vec![big_zero(self.p); extra + 1],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn r(n: i64, d: i64) -> BigRational {
        rat(n, d)
    }

    #[test]
    fn bump_values() {
        let b = TestFunction::bump(r(1, 1)).unwrap();
        assert!((b.eval_f64(0.0) - (-1f64).exp()).abs() < 1e-15);
        let t: f64 = 0.5;
        let expect = (-1.0 / (1.0 - t * t)).exp();
        assert!((b.eval_f64(t) - expect).abs() < 1e-15);
        assert_eq!(b.eval_f64(1.0), 0.0);
        assert_eq!(b.eval_f64(-1.5), 0.0);
    }

    #[test]
    fn bump_derivative_matches_closed_form() {
        // d/dt exp(-1/(1-t²)) = -2t/(1-t²)² exp(-1/(1-t²))
        let b = TestFunction::bump(r(1, 1)).unwrap().derive(1);
        for t in [-0.7f64, -0.2, 0.3, 0.9] {
            let s = 1.0 - t * t;
            let expect = -2.0 * t / (s * s) * (-1.0 / s).exp();
            let got = b.eval_f64(t);
            assert!(
                (got - expect).abs() < 1e-13 * (1.0 + expect.abs()),
                "{t}: {got} vs {expect}"
            );
        }
    }

    #[test]
    fn higher_derivatives_match_finite_differences() {
        let w = TestFunction::monomial_window(2, r(1, 1), r(1, 2)).unwrap();
        let p = 256;
        let h = BigFloat::from_f64(1e-20, p);
        let two_h = h.mul(&big_from_i64(2, p), p, RM);
        for t in [-0.8f64, -0.6, 0.55, 0.75, 0.95] {
            let tb = BigFloat::from_f64(t, p);
            let ds = w.derivatives_at(&tb, 3, p);
            for j in 0..3 {
                let f = |x: &BigFloat| w.derive(j).eval_big(x, p);
                let fd = f(&tb.add(&h, p, RM))
                    .sub(&f(&tb.sub(&h, p, RM)), p, RM)
                    .div(&two_h, p, RM);
                let (fd, sym) = (big_to_f64(&fd), big_to_f64(&ds[j + 1]));
                assert!(
                    (fd - sym).abs() < 1e-12 * (1.0 + sym.abs()),
                    "t={t} j={j}: {fd} vs {sym}"
                );
            }
        }
    }

    #[test]
    fn window_is_monomial_on_plateau() {
        let w = TestFunction::monomial_window(3, r(1, 1), r(1, 2)).unwrap();
        let ds = w.derivatives_at(&big_zero(128), 6, 128);
        let vals: Vec<f64> = ds.iter().map(big_to_f64).collect();
        assert_eq!(vals, vec![0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
        let t: f64 = 0.4;
        assert!((w.eval_f64(t) - t.powi(3) / 6.0).abs() < 1e-16);
    }

    #[test]
    fn window_is_smooth_across_breakpoints() {
        let w = TestFunction::monomial_window(1, r(2, 1), r(1, 4)).unwrap();
        let p = 128;
        for edge in [0.5f64, -0.5] {
            let inside = w.derivatives_at(&BigFloat::from_f64(edge * 0.999999, p), 3, p);
            let outside = w.derivatives_at(&BigFloat::from_f64(edge * 1.000001, p), 3, p);
            for j in 0..4 {
                let (a, b) = (big_to_f64(&inside[j]), big_to_f64(&outside[j]));
                assert!((a - b).abs() < 1e-4, "edge {edge} order {j}: {a} vs {b}");
            }
        }
        // Flat approach to the outer edge.
        assert!(w.eval_f64(1.99).abs() < 1e-20);
        assert_eq!(w.eval_f64(2.0), 0.0);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(TestFunction::bump(r(0, 1)).is_err());
        assert!(TestFunction::monomial_window(1, r(1, 1), r(1, 1)).is_err());
        assert!(TestFunction::monomial_window(1, r(1, 1), r(0, 1)).is_err());
    }
}
