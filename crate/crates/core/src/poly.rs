//! Univariate polynomials in `t` and the constant-coefficient operators `p(d/dt)`.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::{Backend, Scalar};

/// Dense polynomial; `coeffs[k]` multiplies `t^k`. Empty means zero.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly1 {
    backend: Backend,
    coeffs: Vec<Scalar>,
}

impl Poly1 {
    pub fn new(backend: Backend, coeffs: Vec<Scalar>) -> Result<Self> {
        let coeffs = coeffs.iter().map(|c| c.coerce(backend)).collect::<Result<Vec<_>>>()?;
        Ok(Self::from_raw(backend, coeffs))
    }

    pub(crate) fn from_raw(backend: Backend, mut coeffs: Vec<Scalar>) -> Self {
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

    pub fn constant(c: Scalar) -> Self {
        let backend = c.backend();
        Self::from_raw(backend, vec![c])
    }

    /// `c * t^k`.
    pub fn monomial(c: Scalar, k: usize) -> Self {
        let backend = c.backend();
        let mut coeffs = vec![Scalar::zero(backend); k];
        coeffs.push(c);
        Self::from_raw(backend, coeffs)
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

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Scalar> {
        self.coeffs.last()
    }

    pub fn add(&self, o: &Poly1) -> Poly1 {
        let n = self.coeffs.len().max(o.coeffs.len());
        let coeffs = (0..n).map(|k| &self.coeff(k) + &o.coeff(k)).collect();
        Self::from_raw(self.backend, coeffs)
    }

    pub fn sub(&self, o: &Poly1) -> Poly1 {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Poly1 {
        Self::from_raw(self.backend, self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn scale(&self, c: &Scalar) -> Poly1 {
        Self::from_raw(self.backend, self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn mul(&self, o: &Poly1) -> Poly1 {
        if self.is_zero() || o.is_zero() {
            return Self::zero(self.backend);
        }
        let mut out = vec![Scalar::zero(self.backend); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        Self::from_raw(self.backend, out)
    }

    pub fn derive(&self) -> Poly1 {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * &Scalar::from_i64(k as i64, self.backend))
            .collect();
        Self::from_raw(self.backend, coeffs)
    }

    /// Horner evaluation.
    pub fn eval(&self, t: &Scalar) -> Scalar {
        self.coeffs
            .iter()
            .rev()
            .fold(Scalar::zero(self.backend), |acc, c| &(&acc * t) + c)
    }

    pub fn to_backend(&self, backend: Backend) -> Result<Poly1> {
        Poly1::new(backend, self.coeffs.clone())
    }

    /// `(t - root)^m`.
    pub fn root_power(root: &Scalar, m: usize) -> Poly1 {
        let b = root.backend();
        let lin = Self::from_raw(b, vec![-root, Scalar::one(b)]);
        (0..m).fold(Self::constant(Scalar::one(b)), |acc, _| acc.mul(&lin))
    }
}

impl fmt::Display for Poly1 {
    /// Ascending powers of `t`, e.g. `1 + 2*t - t^2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<(bool, String)> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| signed_term(c, &t_power(k)))
            .collect();
        f.write_str(&join_signed(&terms))
    }
}

pub(crate) fn t_power(k: usize) -> String {
    match k {
        0 => String::new(),
        1 => "t".into(),
        _ => format!("t^{k}"),
    }
}

/// Split a coefficient into (negative, magnitude text) for sum printing.
/// Compound values `a + bi` are parenthesised.
pub(crate) fn scalar_sign_body(c: &Scalar) -> (bool, String) {
    let (re, im) = c.signs();
    if re != 0 && im != 0 {
        return (false, format!("({c})"));
    }
    let negative = if re != 0 { re < 0 } else { im < 0 };
    if negative {
        (true, (-c).to_string())
    } else {
        (false, c.to_string())
    }
}

/// Coefficient times a monomial body (body may be empty for a constant).
pub(crate) fn signed_term(c: &Scalar, body: &str) -> (bool, String) {
    let (negative, mag) = scalar_sign_body(c);
    if body.is_empty() {
        return (negative, mag);
    }
    if mag == "1" {
        (negative, body.to_string())
    } else {
        (negative, format!("{mag}*{body}"))
    }
}

pub(crate) fn join_signed(terms: &[(bool, String)]) -> String {
    if terms.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, (neg, body)) in terms.iter().enumerate() {
        match (i, neg) {
            (0, true) => {
                out.push('-');
                out.push_str(body);
            }
            (0, false) => out.push_str(body),
            (_, true) => {
                out.push_str(" - ");
                out.push_str(body);
            }
            (_, false) => {
                out.push_str(" + ");
                out.push_str(body);
            }
        }
    }
    out
}

/// Roots with multiplicities, `p = leading * Π (t - root)^mult`.
#[derive(Clone, Debug, PartialEq)]
pub struct Factored {
    pub leading: Scalar,
    pub roots: Vec<(Scalar, usize)>,
}

impl Factored {
    pub fn expand(&self) -> Poly1 {
        let b = self.leading.backend();
        self.roots
            .iter()
            .fold(Poly1::constant(self.leading.clone()), |acc, (r, m)| {
                acc.mul(&Poly1::root_power(&r.coerce(b).expect("root backend"), *m))
            })
    }
}

/// The operator `p(d/dt) = a_0 + a_1 d/dt + ... + a_n (d/dt)^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyOperator {
    poly: Poly1,
    factored: Option<Factored>,
}

impl PolyOperator {
    pub fn new(poly: Poly1) -> Self {
        Self { poly, factored: None }
    }

    pub fn from_coeffs(backend: Backend, coeffs: Vec<Scalar>) -> Result<Self> {
        Ok(Self::new(Poly1::new(backend, coeffs)?))
    }

    /// Exact helper: integer coefficients `a_0, a_1, ...`.
    pub fn from_ints(coeffs: &[i64]) -> Self {
        let cs = coeffs.iter().map(|c| Scalar::from_i64(*c, Backend::Exact)).collect();
        Self::new(Poly1::from_raw(Backend::Exact, cs))
    }

    /// `leading * Π (t - root)^mult`, keeping the factored form.
    pub fn from_roots(leading: Scalar, roots: Vec<(Scalar, usize)>) -> Result<Self> {
        if leading.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let backend = leading.backend();
        let roots = roots
            .into_iter()
            .map(|(r, m)| {
                if m == 0 {
                    return Err(Error::InvalidArgument("root multiplicity must be >= 1".into()));
                }
                Ok((r.coerce(backend)?, m))
            })
            .collect::<Result<Vec<_>>>()?;
        let factored = Factored { leading, roots };
        Ok(Self {
            poly: factored.expand(),
            factored: Some(factored),
        })
    }

    /// Attach a factored form after checking that it expands to the coefficients.
    pub fn with_factored(self, factored: Factored) -> Result<Self> {
        let expanded = factored.expand();
        if expanded != self.poly {
            return Err(Error::InvalidArgument(
                "factored form does not expand to the operator coefficients".into(),
            ));
        }
        Ok(Self {
            poly: self.poly,
            factored: Some(factored),
        })
    }

    pub fn poly(&self) -> &Poly1 {
        &self.poly
    }

    pub fn factored(&self) -> Option<&Factored> {
        self.factored.as_ref()
    }

    pub fn backend(&self) -> Backend {
        self.poly.backend()
    }

    pub fn coeffs(&self) -> &[Scalar] {
        self.poly.coeffs()
    }

    pub fn coeff(&self, k: usize) -> Scalar {
        self.poly.coeff(k)
    }

    pub fn degree(&self) -> Option<usize> {
        self.poly.degree()
    }

    pub fn leading(&self) -> Option<&Scalar> {
        self.poly.leading()
    }

    pub fn eval(&self, t: &Scalar) -> Scalar {
        self.poly.eval(t)
    }

    /// Operator composition, i.e. polynomial product.
    pub fn compose(&self, o: &PolyOperator) -> PolyOperator {
        let factored = match (&self.factored, &o.factored) {
            (Some(a), Some(b)) => {
                let mut roots = a.roots.clone();
                for (r, m) in &b.roots {
                    match roots.iter_mut().find(|(s, _)| s == r) {
                        Some(entry) => entry.1 += m,
                        None => roots.push((r.clone(), *m)),
                    }
                }
                Some(Factored {
                    leading: &a.leading * &b.leading,
                    roots,
                })
            }
            _ => None,
        };
        PolyOperator {
            poly: self.poly.mul(&o.poly),
            factored,
        }
    }

    pub fn scale(&self, c: &Scalar) -> PolyOperator {
        PolyOperator {
            poly: self.poly.scale(c),
            factored: self.factored.as_ref().map(|f| Factored {
                leading: &f.leading * c,
                roots: f.roots.clone(),
            }),
        }
    }

    pub fn to_backend(&self, backend: Backend) -> Result<PolyOperator> {
        let factored = match &self.factored {
            None => None,
            Some(f) => Some(Factored {
                leading: f.leading.coerce(backend)?,
                roots: f
                    .roots
                    .iter()
                    .map(|(r, m)| Ok((r.coerce(backend)?, *m)))
                    .collect::<Result<Vec<_>>>()?,
            }),
        };
        Ok(PolyOperator {
            poly: self.poly.to_backend(backend)?,
            factored,
        })
    }
}

impl fmt::Display for PolyOperator {
    /// Descending powers, e.g. `t^2 - 1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<(bool, String)> = self
            .poly
            .coeffs()
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| signed_term(c, &t_power(k)))
            .collect();
        f.write_str(&join_signed(&terms))
    }
}
