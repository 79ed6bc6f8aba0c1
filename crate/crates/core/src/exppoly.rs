//! Exponential polynomials `Σ_j q_j(t) e^{λ_j t}`: the classical solutions of
//! constant-coefficient ODEs.

use std::fmt;

use crate::error::{Error, Result};
use crate::poly::{join_signed, scalar_sign_body, signed_term, t_power, Poly1, PolyOperator};
use crate::scalar::{Backend, BigComplex, Scalar};

/// One summand `poly(t) * e^{exponent * t}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpTerm {
    pub exponent: Scalar,
    pub poly: Poly1,
}

/// Normalized: exponents pairwise distinct, no zero polynomial, sorted by
/// `(re λ, im λ)`. In bigfloat mode exponents within `eps` are merged.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpPoly {
    backend: Backend,
    terms: Vec<ExpTerm>,
}

impl ExpPoly {
    pub fn new(backend: Backend, terms: Vec<(Scalar, Poly1)>) -> Result<Self> {
        let terms = terms
            .into_iter()
            .map(|(e, p)| {
                Ok(ExpTerm {
                    exponent: e.coerce(backend)?,
                    poly: p.to_backend(backend)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_terms(backend, terms))
    }

    fn from_terms(backend: Backend, raw: Vec<ExpTerm>) -> Self {
        let mut terms: Vec<ExpTerm> = Vec::with_capacity(raw.len());
        for t in raw {
            match terms.iter_mut().find(|e| e.exponent == t.exponent) {
                Some(e) => e.poly = e.poly.add(&t.poly),
                None => terms.push(t),
            }
        }
        terms.retain(|t| !t.poly.is_zero());
        terms.sort_by(|a, b| a.exponent.cmp_canonical(&b.exponent));
        Self { backend, terms }
    }

    pub fn zero(backend: Backend) -> Self {
        Self {
            backend,
            terms: Vec::new(),
        }
    }

    /// `e^{λ t}`.
    pub fn exp(lambda: Scalar) -> Self {
        let b = lambda.backend();
        Self::term(Poly1::constant(Scalar::one(b)), lambda)
    }

    /// `poly(t) e^{λ t}`.
    pub fn term(poly: Poly1, lambda: Scalar) -> Self {
        let b = lambda.backend();
        Self::from_terms(b, vec![ExpTerm { exponent: lambda, poly }])
    }

    /// Constant function.
    pub fn constant(c: Scalar) -> Self {
        let b = c.backend();
        Self::term(Poly1::constant(c), Scalar::zero(b))
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn terms(&self) -> &[ExpTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &ExpPoly) -> Result<ExpPoly> {
        self.backend.check(&o.backend)?;
        Ok(self.add_unchecked(o))
    }

    pub(crate) fn add_unchecked(&self, o: &ExpPoly) -> ExpPoly {
        let mut raw = self.terms.clone();
        raw.extend(o.terms.iter().cloned());
        Self::from_terms(self.backend, raw)
    }

    pub fn sub(&self, o: &ExpPoly) -> Result<ExpPoly> {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> ExpPoly {
        self.map_polys(|p| p.neg())
    }

    pub fn scale(&self, c: &Scalar) -> Result<ExpPoly> {
        let c = c.coerce(self.backend)?;
        Ok(self.map_polys(|p| p.scale(&c)))
    }

    fn map_polys(&self, f: impl Fn(&Poly1) -> Poly1) -> ExpPoly {
        Self::from_terms(
            self.backend,
            self.terms
                .iter()
                .map(|t| ExpTerm {
                    exponent: t.exponent.clone(),
                    poly: f(&t.poly),
                })
                .collect(),
        )
    }

    /// Pointwise product.
    pub fn mul(&self, o: &ExpPoly) -> Result<ExpPoly> {
        self.backend.check(&o.backend)?;
        let mut raw = Vec::new();
        for a in &self.terms {
            for b in &o.terms {
                raw.push(ExpTerm {
                    exponent: &a.exponent + &b.exponent,
                    poly: a.poly.mul(&b.poly),
                });
            }
        }
        Ok(Self::from_terms(self.backend, raw))
    }

    /// First derivative: `(q e^{λt})' = (q' + λ q) e^{λt}`.
    pub fn derive_once(&self) -> ExpPoly {
        let raw = self
            .terms
            .iter()
            .map(|t| ExpTerm {
                exponent: t.exponent.clone(),
                poly: t.poly.derive().add(&t.poly.scale(&t.exponent)),
            })
            .collect();
        Self::from_terms(self.backend, raw)
    }

    pub fn derive(&self, k: usize) -> ExpPoly {
        (0..k).fold(self.clone(), |acc, _| acc.derive_once())
    }

    /// `Σ_j q_j(0)`, exact in either backend.
    pub fn value_at_zero(&self) -> Scalar {
        self.terms
            .iter()
            .fold(Scalar::zero(self.backend), |acc, t| &acc + &t.poly.coeff(0))
    }

    /// Function value. Exact expressions can only be evaluated exactly at
    /// `t = 0`; a bigfloat `t` promotes an exact expression to bigfloat.
    pub fn eval(&self, t: &Scalar) -> Result<Scalar> {
        match (self.backend, t) {
            (Backend::Exact, Scalar::Exact(g)) => {
                if g.is_zero() {
                    Ok(self.value_at_zero())
                } else {
                    Err(Error::TranscendentalEvaluation(g.to_string()))
                }
            }
            (Backend::Exact, Scalar::Float(_, c)) => self.to_backend(Backend::Float(*c))?.eval(t),
            (Backend::Float(c), _) => {
                let tb = t.coerce(Backend::Float(c))?.to_big(c.precision);
                Ok(Scalar::Float(self.eval_big(&tb, c.precision), c))
            }
        }
    }

    /// Evaluation at a bigfloat point with working precision `p`.
    pub fn eval_big(&self, t: &BigComplex, p: usize) -> BigComplex {
        let mut acc = BigComplex::zero(p);
        for term in &self.terms {
            let lam = term.exponent.to_big(p);
            let e = lam.mul(t, p).exp(p);
            let q = term
                .poly
                .coeffs()
                .iter()
                .rev()
                .fold(BigComplex::zero(p), |a, c| a.mul(t, p).add(&c.to_big(p), p));
            acc = acc.add(&q.mul(&e, p), p);
        }
        acc
    }

    /// `p(d/dt) a = Σ_k a_k a^{(k)}`.
    pub fn apply_op(&self, p: &PolyOperator) -> Result<ExpPoly> {
        self.backend.check(&p.backend())?;
        let mut acc = ExpPoly::zero(self.backend);
        let mut cur = self.clone();
        for (k, a) in p.coeffs().iter().enumerate() {
            if k > 0 {
                cur = cur.derive_once();
            }
            if !a.is_zero() {
                acc = acc.add_unchecked(&cur.map_polys(|q| q.scale(a)));
            }
        }
        Ok(acc)
    }

    pub fn to_backend(&self, backend: Backend) -> Result<ExpPoly> {
        if backend == self.backend {
            return Ok(self.clone());
        }
        ExpPoly::new(
            backend,
            self.terms
                .iter()
                .map(|t| (t.exponent.clone(), t.poly.clone()))
                .collect(),
        )
    }

    /// The basis `{t^j e^{λt} : 0 ≤ j < m}` for every `(λ, m)`.
    pub fn solution_basis(roots: &[(Scalar, usize)]) -> Vec<ExpPoly> {
        roots
            .iter()
            .flat_map(|(lam, m)| {
                (0..*m).map(move |j| ExpPoly::term(Poly1::monomial(Scalar::one(lam.backend()), j), lam.clone()))
            })
            .collect()
    }
}

impl fmt::Display for ExpPoly {
    /// Canonical text, e.g. `(1 + 2*t)*exp((3/2 + 1i)*t) + exp(0*t)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<(bool, String)> = self
            .terms
            .iter()
            .map(|term| {
                let exp = format!("exp({}*t)", exponent_text(&term.exponent));
                let nonzero: Vec<(usize, &Scalar)> = term
                    .poly
                    .coeffs()
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .collect();
                if let [(k, c)] = nonzero.as_slice() {
                    let body = match *k {
                        0 => exp,
                        k => format!("{}*{exp}", t_power(k)),
                    };
                    signed_term(c, &body)
                } else {
                    (false, format!("({})*{exp}", term.poly))
                }
            })
            .collect();
        f.write_str(&join_signed(&terms))
    }
}

fn exponent_text(lam: &Scalar) -> String {
    let (neg, body) = scalar_sign_body(lam);
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::FloatCtx;

    fn float() -> Backend {
        Backend::Float(FloatCtx::default())
    }

    fn affine(a: i64, b: i64) -> Poly1 {
        Poly1::new(Backend::Exact, vec![Scalar::exact(a, 0), Scalar::exact(b, 0)]).unwrap()
    }

    #[test]
    fn additive_identity_and_inverse() {
        let e = ExpPoly::exp(Scalar::exact(1, 0));
        assert_eq!(e.add(&ExpPoly::zero(Backend::Exact)).unwrap(), e);
        assert!(e.add(&e.scale(&Scalar::exact(-1, 0)).unwrap()).unwrap().is_zero());
    }

    #[test]
    fn like_exponents_merge_into_one_term() {
        let lam = Scalar::exact(2, 0);
        let a = ExpPoly::exp(lam.clone());
        let b = ExpPoly::term(affine(0, 1), lam.clone());
        let sum = a.add(&b).unwrap();
        assert_eq!(sum.terms().len(), 1);
        assert_eq!(sum, ExpPoly::term(affine(1, 1), lam));
        // Pointwise oracle at t = 0, 1, 2.
        for t in [0, 1, 2] {
            let tb = Scalar::from_i64(t, float());
            let lhs = sum.eval(&tb).unwrap();
            let rhs = &a.eval(&tb).unwrap() + &b.eval(&tb).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn scale_by_zero_and_one() {
        let e = ExpPoly::term(affine(1, 1), Scalar::exact(1, 0));
        assert!(e.scale(&Scalar::exact(0, 0)).unwrap().is_zero());
        assert_eq!(e.scale(&Scalar::exact(1, 0)).unwrap(), e);
        let three = ExpPoly::exp(Scalar::exact(2, 0)).scale(&Scalar::exact(3, 0)).unwrap();
        let v = three.eval(&Scalar::from_i64(1, float())).unwrap().to_f64().0;
        assert!((v - 3.0 * 2f64.exp()).abs() < 1e-12);
    }

    #[test]
    fn derivative_rules() {
        let lam = Scalar::ratio(3, 2);
        let d = ExpPoly::exp(lam.clone()).derive(1);
        assert_eq!(d, ExpPoly::exp(lam.clone()).scale(&lam).unwrap());
        // (t e^{λt})' = (1 + λt) e^{λt}
        let te = ExpPoly::term(affine(0, 1), lam.clone());
        let expected = ExpPoly::term(
            Poly1::new(Backend::Exact, vec![Scalar::exact(1, 0), lam.clone()]).unwrap(),
            lam,
        );
        assert_eq!(te.derive(1), expected);
        // Second derivative of an affine function vanishes.
        assert!(ExpPoly::term(affine(1, 1), Scalar::exact(0, 0)).derive(2).is_zero());
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let ctx = FloatCtx::default();
        let b = Backend::Float(ctx);
        let te = ExpPoly::term(affine(0, 1), Scalar::exact(1, 0));
        let d = te.derive(1);
        let h = 1e-6;
        let at = |x: f64| {
            te.eval(&Scalar::Float(BigComplex::from_f64(x, 0.0, 128), ctx))
                .unwrap()
                .to_f64()
                .0
        };
        let fd = (at(0.3 + h) - at(0.3 - h)) / (2.0 * h);
        let sym = d
            .eval(&Scalar::Float(BigComplex::from_f64(0.3, 0.0, 128), ctx))
            .unwrap()
            .to_f64()
            .0;
        assert!((fd - sym).abs() < 1e-8, "{fd} vs {sym}");
        assert!(Scalar::one(b).is_one());
    }

    #[test]
    fn evaluation_rules() {
        let lam = Scalar::exact(5, 1);
        let u = ExpPoly::term(affine(1, 1), lam);
        assert_eq!(u.eval(&Scalar::exact(0, 0)).unwrap(), Scalar::exact(1, 0));
        assert!(matches!(
            u.eval(&Scalar::exact(1, 0)),
            Err(Error::TranscendentalEvaluation(_))
        ));
        let e = ExpPoly::exp(Scalar::exact(1, 0))
            .eval(&Scalar::from_i64(1, float()))
            .unwrap();
        assert!((e.to_f64().0 - std::f64::consts::E).abs() < 1e-15);
        assert!(ExpPoly::zero(Backend::Exact)
            .eval(&Scalar::exact(0, 0))
            .unwrap()
            .is_zero());
    }

    #[test]
    fn operator_annihilates_solutions() {
        let lam = Scalar::ratio(-2, 3);
        let first = PolyOperator::from_roots(Scalar::exact(1, 0), vec![(lam.clone(), 1)]).unwrap();
        assert!(ExpPoly::exp(lam.clone()).apply_op(&first).unwrap().is_zero());
        let second = PolyOperator::from_roots(Scalar::exact(1, 0), vec![(lam.clone(), 2)]).unwrap();
        let u = ExpPoly::term(affine(7, -3), lam);
        assert!(u.apply_op(&second).unwrap().is_zero());
        let t2 = PolyOperator::from_ints(&[0, 0, 1]);
        let e = ExpPoly::exp(Scalar::exact(1, 0));
        assert_eq!(e.apply_op(&t2).unwrap(), e);
    }

    #[test]
    fn solution_basis_shapes() {
        let lam = Scalar::exact(2, -1);
        let basis = ExpPoly::solution_basis(&[(lam.clone(), 2)]);
        assert_eq!(basis.len(), 2);
        assert_eq!(basis[1], ExpPoly::term(affine(0, 1), lam));
        let one = ExpPoly::solution_basis(&[(Scalar::exact(0, 0), 1)]);
        assert_eq!(one, vec![ExpPoly::constant(Scalar::exact(1, 0))]);
    }

    #[test]
    fn backend_mismatch_is_an_error() {
        let a = ExpPoly::exp(Scalar::exact(1, 0));
        let b = a.to_backend(float()).unwrap();
        assert!(matches!(a.add(&b), Err(Error::BackendMismatch(_))));
    }

    #[test]
    fn display_is_canonical() {
        let u = ExpPoly::term(
            affine(1, 2),
            Scalar::Exact(crate::scalar::GaussRat::new(
                crate::scalar::rat(3, 2),
                crate::scalar::rat(1, 1),
            )),
        )
        .add(&ExpPoly::exp(Scalar::exact(0, 0)))
        .unwrap();
        assert_eq!(u.to_string(), "exp(0*t) + (1 + 2*t)*exp((3/2 + 1i)*t)");
        let v = ExpPoly::term(affine(0, -1), Scalar::exact(-1, 0));
        assert_eq!(v.to_string(), "-t*exp(-1*t)");
        assert_eq!(ExpPoly::zero(Backend::Exact).to_string(), "0");
    }
}
