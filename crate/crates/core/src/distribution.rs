//! Distributions of the form `T_{u1 ⊕ u2} + Σ_k c_k δ^{(k)}`: a piecewise
//! exponential polynomial split at `t = 0` plus a finite comb at the origin.

use std::fmt;

use crate::error::{Error, Result};
use crate::exppoly::ExpPoly;
use crate::poly::{join_signed, scalar_sign_body, Poly1, PolyOperator};
use crate::scalar::{Backend, Scalar};

/// `u1` on `t < 0`, `u2` on `t > 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConcatFunction {
    pub left: ExpPoly,
    pub right: ExpPoly,
}

impl ConcatFunction {
    pub fn new(left: ExpPoly, right: ExpPoly) -> Result<Self> {
        left.backend().check(&right.backend())?;
        Ok(Self { left, right })
    }

    pub fn zero(backend: Backend) -> Self {
        Self {
            left: ExpPoly::zero(backend),
            right: ExpPoly::zero(backend),
        }
    }

    pub fn backend(&self) -> Backend {
        self.left.backend()
    }

    pub fn is_zero(&self) -> bool {
        self.left.is_zero() && self.right.is_zero()
    }

    /// `right(0+) - left(0-)`.
    pub fn jump(&self) -> Scalar {
        &self.right.value_at_zero() - &self.left.value_at_zero()
    }

    /// Derivative on `t ≠ 0`.
    pub fn derive_piecewise(&self) -> Self {
        Self {
            left: self.left.derive_once(),
            right: self.right.derive_once(),
        }
    }

    fn add(&self, o: &Self) -> Self {
        Self {
            left: self.left.add_unchecked(&o.left),
            right: self.right.add_unchecked(&o.right),
        }
    }

    fn scale(&self, c: &Scalar) -> Self {
        Self {
            left: self.left.scale(c).expect("checked backend"),
            right: self.right.scale(c).expect("checked backend"),
        }
    }
}

/// `Σ_k coeffs[k] δ^{(k)}`, trailing zeros stripped.
#[derive(Clone, Debug, PartialEq)]
pub struct DeltaComb {
    backend: Backend,
    coeffs: Vec<Scalar>,
}

impl DeltaComb {
    pub fn new(backend: Backend, coeffs: Vec<Scalar>) -> Result<Self> {
        let coeffs = coeffs.iter().map(|c| c.coerce(backend)).collect::<Result<Vec<_>>>()?;
        Ok(Self::from_raw(backend, coeffs))
    }

    fn from_raw(backend: Backend, mut coeffs: Vec<Scalar>) -> Self {
        while coeffs.last().is_some_and(Scalar::is_zero) {
            coeffs.pop();
        }
        Self { backend, coeffs }
    }

    pub fn zero(backend: Backend) -> Self {
        Self {
            backend,
            coeffs: Vec::new(),
        }
    }

    /// `c δ^{(k)}`.
    pub fn delta(c: Scalar, k: usize) -> Self {
        let b = c.backend();
        let mut coeffs = vec![Scalar::zero(b); k];
        coeffs.push(c);
        Self::from_raw(b, coeffs)
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Scalar {
        self.coeffs
            .get(k)
            .cloned()
            .unwrap_or_else(|| Scalar::zero(self.backend))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Highest derivative order present.
    pub fn order(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// `δ^{(k)} ↦ δ^{(k+1)}`.
    pub fn shift(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![Scalar::zero(self.backend)];
        coeffs.extend(self.coeffs.iter().cloned());
        Self::from_raw(self.backend, coeffs)
    }

    fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Self::from_raw(self.backend, (0..n).map(|k| &self.coeff(k) + &o.coeff(k)).collect())
    }

    fn scale(&self, c: &Scalar) -> Self {
        Self::from_raw(self.backend, self.coeffs.iter().map(|a| a * c).collect())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Distribution {
    pub regular: ConcatFunction,
    pub singular: DeltaComb,
}

impl Distribution {
    pub fn new(regular: ConcatFunction, singular: DeltaComb) -> Result<Self> {
        regular.backend().check(&singular.backend())?;
        Ok(Self { regular, singular })
    }

    pub fn zero(backend: Backend) -> Self {
        Self {
            regular: ConcatFunction::zero(backend),
            singular: DeltaComb::zero(backend),
        }
    }

    /// `T_{u1 ⊕ u2}`. With `require_match`, insists on `u1(0) = u2(0)`.
    pub fn from_concat(u1: &ExpPoly, u2: &ExpPoly, require_match: bool) -> Result<Self> {
        let regular = ConcatFunction::new(u1.clone(), u2.clone())?;
        if require_match {
            let (l, r) = (u1.value_at_zero(), u2.value_at_zero());
            if l != r {
                return Err(Error::Match {
                    left: l.to_string(),
                    right: r.to_string(),
                });
            }
        }
        let backend = regular.backend();
        Ok(Self {
            regular,
            singular: DeltaComb::zero(backend),
        })
    }

    /// `T_u` for a classical `u` on the whole line.
    pub fn regular(u: &ExpPoly) -> Self {
        Self {
            regular: ConcatFunction {
                left: u.clone(),
                right: u.clone(),
            },
            singular: DeltaComb::zero(u.backend()),
        }
    }

    pub fn comb(comb: DeltaComb) -> Self {
        Self {
            regular: ConcatFunction::zero(comb.backend()),
            singular: comb,
        }
    }

    pub fn backend(&self) -> Backend {
        self.regular.backend()
    }

    pub fn is_zero(&self) -> bool {
        self.regular.is_zero() && self.singular.is_zero()
    }

    /// Distributional derivative. The jump `σ = right(0) - left(0)` becomes a
    /// new `σ δ`, existing comb terms move up one order.
    pub fn derive(&self) -> Self {
        let sigma = self.regular.jump();
        let mut singular = self.singular.shift();
        singular = singular.add(&DeltaComb::from_raw(self.backend(), vec![sigma]));
        Self {
            regular: self.regular.derive_piecewise(),
            singular,
        }
    }

    pub fn derive_n(&self, k: usize) -> Self {
        (0..k).fold(self.clone(), |acc, _| acc.derive())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.backend().check(&o.backend())?;
        Ok(Self {
            regular: self.regular.add(&o.regular),
            singular: self.singular.add(&o.singular),
        })
    }

    pub fn scale(&self, c: &Scalar) -> Result<Self> {
        let c = c.coerce(self.backend())?;
        Ok(Self {
            regular: self.regular.scale(&c),
            singular: self.singular.scale(&c),
        })
    }

    /// `p(d/dt) T`.
    pub fn apply_op(&self, p: &PolyOperator) -> Result<Self> {
        self.backend().check(&p.backend())?;
        let mut acc = Self::zero(self.backend());
        let mut cur = self.clone();
        for (k, a) in p.coeffs().iter().enumerate() {
            if k > 0 {
                cur = cur.derive();
            }
            if !a.is_zero() {
                acc = acc.add(&cur.scale(a)?)?;
            }
        }
        Ok(acc)
    }

    /// The classical part away from the origin.
    pub fn restrict_punctured(&self) -> &ConcatFunction {
        &self.regular
    }

    pub fn to_backend(&self, backend: Backend) -> Result<Self> {
        Ok(Self {
            regular: ConcatFunction::new(
                self.regular.left.to_backend(backend)?,
                self.regular.right.to_backend(backend)?,
            )?,
            singular: DeltaComb::new(backend, self.singular.coeffs.clone())?,
        })
    }
}

/// Coefficients of `δ, δ', ...` separated by commas; `0` when empty.
impl fmt::Display for DeltaComb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|c| join_signed(&[scalar_sign_body(c)]))
            .collect();
        f.write_str(&parts.join(", "))
    }
}

impl fmt::Display for Distribution {
    /// `[left] <expr> [right] <expr> [comb] c0, c1, ...`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[left] {} [right] {} [comb] {}",
            self.regular.left, self.regular.right, self.singular
        )
    }
}

/// Which pair of classical solutions was concatenated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConcatKind {
    /// `e^{λt} ⊕ (1 + t) e^{λt}` for a repeated root `λ`.
    Repeated,
    /// `e^{λt} ⊕ e^{μt}` for distinct roots.
    Distinct,
}

impl ConcatKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ConcatKind::Repeated => "repeated",
            ConcatKind::Distinct => "distinct",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "repeated" => Some(ConcatKind::Repeated),
            "distinct" => Some(ConcatKind::Distinct),
            _ => None,
        }
    }
}

/// The two concatenated witnesses for a root pair.
pub fn witness_pair(kind: ConcatKind, lambda: &Scalar, mu: Option<&Scalar>) -> Result<(ExpPoly, ExpPoly)> {
    let b = lambda.backend();
    match kind {
        ConcatKind::Repeated => {
            let one_plus_t = Poly1::new(b, vec![Scalar::one(b), Scalar::one(b)])?;
            Ok((ExpPoly::exp(lambda.clone()), ExpPoly::term(one_plus_t, lambda.clone())))
        }
        ConcatKind::Distinct => {
            let mu = mu.ok_or_else(|| Error::InvalidArgument("distinct kind needs mu".into()))?;
            let mu = mu.coerce(b)?;
            if &mu == lambda {
                return Err(Error::InvalidArgument("distinct kind needs mu != lambda".into()));
            }
            Ok((ExpPoly::exp(lambda.clone()), ExpPoly::exp(mu)))
        }
    }
}

/// Closed form of `(d/dt)^k` applied to the concatenated witnesses.
///
/// Repeated root: regular part `(λ^k e^{λt}, (λ^k + kλ^{k-1} + λ^k t) e^{λt})`,
/// comb coefficient of `δ^{(m)}` is `(k-1-m) λ^{k-2-m}` for `m ≤ k-2`.
///
/// Distinct roots: regular part `(λ^k e^{λt}, μ^k e^{μt})`, comb coefficient of
/// `δ^{(m)}` is `μ^{k-1-m} - λ^{k-1-m}` for `m ≤ k-1`. The `δ^{(k-1)}` entry is
/// zero, so the comb has order `k-2`.
pub fn fk_closed_form(kind: ConcatKind, k: usize, lambda: &Scalar, mu: Option<&Scalar>) -> Result<Distribution> {
    let b = lambda.backend();
    let pow = |x: &Scalar, e: usize| x.pow(e as u32);
    let (u1, u2) = witness_pair(kind, lambda, mu)?;
    let _ = u2;
    let num = |v: usize| Scalar::from_i64(v as i64, b);
    let (left, right, comb) = match kind {
        ConcatKind::Repeated => {
            let lk = pow(lambda, k);
            let lk1 = if k == 0 {
                Scalar::zero(b)
            } else {
                &num(k) * &pow(lambda, k - 1)
            };
            let right = ExpPoly::term(Poly1::new(b, vec![&lk + &lk1, lk.clone()])?, lambda.clone());
            let left = ExpPoly::term(Poly1::constant(lk), lambda.clone());
            let comb: Vec<Scalar> = (0..k.saturating_sub(1))
                .map(|m| &num(k - 1 - m) * &pow(lambda, k - 2 - m))
                .collect();
            (left, right, comb)
        }
        ConcatKind::Distinct => {
            let mu = mu.expect("checked by witness_pair").coerce(b)?;
            let left = u1.scale(&pow(lambda, k))?;
            let right = ExpPoly::exp(mu.clone()).scale(&pow(&mu, k))?;
            let comb: Vec<Scalar> = (0..k).map(|m| &pow(&mu, k - 1 - m) - &pow(lambda, k - 1 - m)).collect();
            (left, right, comb)
        }
    };
    Distribution::new(ConcatFunction::new(left, right)?, DeltaComb::new(b, comb)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::FloatCtx;

    #[test]
    fn heaviside_derivative_is_delta() {
        let h = Distribution::from_concat(
            &ExpPoly::zero(Backend::Exact),
            &ExpPoly::constant(Scalar::exact(1, 0)),
            false,
        )
        .unwrap();
        let d = h.derive();
        assert!(d.regular.is_zero());
        assert_eq!(d.singular.coeffs(), &[Scalar::exact(1, 0)]);
        let dd = d.derive();
        assert_eq!(dd.singular, DeltaComb::delta(Scalar::exact(1, 0), 1));
    }

    #[test]
    fn smooth_functions_have_no_comb() {
        let u = ExpPoly::exp(Scalar::exact(2, 3));
        let t = Distribution::regular(&u);
        assert_eq!(t.derive_n(4), Distribution::regular(&u.derive(4)));
    }

    #[test]
    fn match_condition_is_enforced() {
        let e = Distribution::from_concat(
            &ExpPoly::exp(Scalar::exact(1, 0)),
            &ExpPoly::constant(Scalar::exact(2, 0)),
            true,
        );
        assert!(matches!(e, Err(Error::Match { .. })));
    }

    #[test]
    fn second_derivative_of_distinct_pair() {
        // e^t ⊕ e^{-t}: second derivative has comb -2 δ.
        let d = Distribution::from_concat(
            &ExpPoly::exp(Scalar::exact(1, 0)),
            &ExpPoly::exp(Scalar::exact(-1, 0)),
            true,
        )
        .unwrap();
        let r = d.apply_op(&PolyOperator::from_ints(&[-1, 0, 1])).unwrap();
        assert!(r.regular.is_zero());
        assert_eq!(r.singular.coeffs(), &[Scalar::exact(-2, 0)]);
    }

    #[test]
    fn closed_forms_small_orders() {
        let lam = Scalar::exact(2, 1);
        let mu = Scalar::ratio(-1, 3);
        for kind in [ConcatKind::Repeated, ConcatKind::Distinct] {
            let (u1, u2) = witness_pair(kind, &lam, Some(&mu)).unwrap();
            let base = Distribution::from_concat(&u1, &u2, true).unwrap();
            assert_eq!(fk_closed_form(kind, 0, &lam, Some(&mu)).unwrap(), base);
            let mut cur = base;
            for k in 1..=5 {
                cur = cur.derive();
                assert_eq!(fk_closed_form(kind, k, &lam, Some(&mu)).unwrap(), cur, "{kind:?} k={k}");
            }
        }
    }

    #[test]
    fn display_lists_comb() {
        let d = fk_closed_form(
            ConcatKind::Distinct,
            2,
            &Scalar::exact(1, 0),
            Some(&Scalar::exact(-1, 0)),
        )
        .unwrap();
        assert_eq!(d.to_string(), "[left] exp(1*t) [right] exp(-1*t) [comb] -2");
    }

    #[test]
    fn float_backend_closed_form() {
        let b = Backend::Float(FloatCtx::default());
        let lam = Scalar::exact(1, 1).coerce(b).unwrap();
        let mu = Scalar::exact(0, -2).coerce(b).unwrap();
        let closed = fk_closed_form(ConcatKind::Distinct, 4, &lam, Some(&mu)).unwrap();
        let (u1, u2) = witness_pair(ConcatKind::Distinct, &lam, Some(&mu)).unwrap();
        let iter = Distribution::from_concat(&u1, &u2, true).unwrap().derive_n(4);
        assert_eq!(closed, iter);
    }
}
