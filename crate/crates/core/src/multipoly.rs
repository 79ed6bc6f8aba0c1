//! Operators `p = a_0 + a_1 t + ... + a_n t^n` whose coefficients are
//! polynomials in spatial variables `x1..xd` over the Gaussian rationals.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::poly::{join_signed, signed_term, t_power};
use crate::scalar::{GaussRat, Scalar};

/// Sparse polynomial in `x1..xd`: exponent vector → nonzero coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SparsePoly {
    d: usize,
    terms: BTreeMap<Vec<u32>, GaussRat>,
}

/// Graded-lex, highest first: larger total degree first, then larger power
/// of `x1`, then of `x2`, and so on.
pub fn grlex_desc(a: &[u32], b: &[u32]) -> Ordering {
    let da: u64 = a.iter().map(|&e| e as u64).sum();
    let db: u64 = b.iter().map(|&e| e as u64).sum();
    db.cmp(&da).then_with(|| b.cmp(a))
}

impl SparsePoly {
    pub fn zero(d: usize) -> Self {
        Self {
            d,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(d: usize, c: GaussRat) -> Self {
        Self::monomial(d, vec![0; d], c).expect("length d")
    }

    /// `c * x^alpha`.
    pub fn monomial(d: usize, alpha: Vec<u32>, c: GaussRat) -> Result<Self> {
        if alpha.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: alpha.len(),
            });
        }
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(alpha, c);
        }
        Ok(Self { d, terms })
    }

    /// `x_j` (1-based, as written).
    pub fn var(d: usize, j: usize) -> Result<Self> {
        if j == 0 || j > d {
            return Err(Error::DimensionMismatch { expected: d, got: j });
        }
        let mut alpha = vec![0; d];
        alpha[j - 1] = 1;
        Self::monomial(d, alpha, GaussRat::one())
    }

    /// Builds from (exponent, coefficient) pairs, summing duplicates.
    pub fn from_terms(d: usize, terms: impl IntoIterator<Item = (Vec<u32>, GaussRat)>) -> Result<Self> {
        let mut out = Self::zero(d);
        for (alpha, c) in terms {
            out = out.add(&Self::monomial(d, alpha, c)?);
        }
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, GaussRat> {
        &self.terms
    }

    /// Terms in graded-lex order, highest first.
    pub fn terms_grlex(&self) -> Vec<(&Vec<u32>, &GaussRat)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| grlex_desc(a.0, b.0));
        v
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value if this is a constant polynomial.
    pub fn as_constant(&self) -> Option<GaussRat> {
        match self.terms.len() {
            0 => Some(GaussRat::zero()),
            1 => {
                let (alpha, c) = self.terms.iter().next().expect("one term");
                alpha.iter().all(|&e| e == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    /// Largest exponent of any single variable.
    pub fn max_var_degree(&self) -> u32 {
        self.terms.keys().flat_map(|a| a.iter().copied()).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|a| a.iter().sum()).max()
    }

    fn check_dim(&self, o: &Self) {
        assert_eq!(self.d, o.d, "spatial dimensions differ");
    }

    pub fn add(&self, o: &Self) -> Self {
        self.check_dim(o);
        let mut terms = self.terms.clone();
        for (alpha, c) in &o.terms {
            let sum = match terms.get(alpha) {
                Some(a) => a + c,
                None => c.clone(),
            };
            if sum.is_zero() {
                terms.remove(alpha);
            } else {
                terms.insert(alpha.clone(), sum);
            }
        }
        Self { d: self.d, terms }
    }

    pub fn neg(&self) -> Self {
        Self {
            d: self.d,
            terms: self.terms.iter().map(|(a, c)| (a.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &GaussRat) -> Self {
        if c.is_zero() {
            return Self::zero(self.d);
        }
        Self {
            d: self.d,
            terms: self.terms.iter().map(|(a, v)| (a.clone(), v * c)).collect(),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.check_dim(o);
        let mut out = Self::zero(self.d);
        for (a, c) in &self.terms {
            for (b, e) in &o.terms {
                let alpha: Vec<u32> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                out = out.add(&Self {
                    d: self.d,
                    terms: BTreeMap::from([(alpha, c * e)]),
                });
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::constant(self.d, GaussRat::one()), |acc, _| acc.mul(self))
    }

    /// `∂/∂x_j` (0-based index).
    pub fn derive(&self, j: usize) -> Self {
        let mut out = Self::zero(self.d);
        for (alpha, c) in &self.terms {
            if alpha[j] == 0 {
                continue;
            }
            let mut beta = alpha.clone();
            beta[j] -= 1;
            let coeff = c * &GaussRat::from_i64(alpha[j] as i64);
            out = out.add(&Self {
                d: self.d,
                terms: BTreeMap::from([(beta, coeff)]),
            });
        }
        out
    }

    pub fn eval(&self, point: &[GaussRat]) -> Result<GaussRat> {
        if point.len() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                got: point.len(),
            });
        }
        let mut acc = GaussRat::zero();
        for (alpha, c) in &self.terms {
            let mut term = c.clone();
            for (x, &e) in point.iter().zip(alpha) {
                if e > 0 {
                    term = &term * &x.pow(e);
                }
            }
            acc = &acc + &term;
        }
        Ok(acc)
    }
}

pub(crate) fn monomial_text(alpha: &[u32]) -> String {
    alpha
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(j, &e)| match e {
            1 => format!("x{}", j + 1),
            _ => format!("x{}^{e}", j + 1),
        })
        .collect::<Vec<_>>()
        .join("*")
}

fn join_body(a: &str, b: &str) -> String {
    match (a.is_empty(), b.is_empty()) {
        (true, _) => b.to_string(),
        (_, true) => a.to_string(),
        _ => format!("{a}*{b}"),
    }
}

impl SparsePoly {
    /// Signed terms of `self * extra`, for sum printing.
    fn signed_terms(&self, extra: &str) -> Vec<(bool, String)> {
        self.terms_grlex()
            .into_iter()
            .map(|(alpha, c)| signed_term(&Scalar::Exact(c.clone()), &join_body(&monomial_text(alpha), extra)))
            .collect()
    }
}

impl fmt::Display for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&join_signed(&self.signed_terms("")))
    }
}

/// `Σ_k a_k(x) t^k`. Trailing zero coefficients are dropped, so the zero
/// operator has no coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    d: usize,
    tcoeffs: Vec<SparsePoly>,
}

impl MultiPoly {
    pub fn new(d: usize, tcoeffs: Vec<SparsePoly>) -> Result<Self> {
        if let Some(bad) = tcoeffs.iter().find(|a| a.dim() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: bad.dim(),
            });
        }
        let mut tcoeffs = tcoeffs;
        while tcoeffs.last().is_some_and(SparsePoly::is_zero) {
            tcoeffs.pop();
        }
        Ok(Self { d, tcoeffs })
    }

    pub fn zero(d: usize) -> Self {
        Self { d, tcoeffs: Vec::new() }
    }

    pub fn constant(d: usize, c: GaussRat) -> Self {
        Self::new(d, vec![SparsePoly::constant(d, c)]).expect("same dimension")
    }

    /// `a * t^k`.
    pub fn t_term(a: SparsePoly, k: usize) -> Self {
        let d = a.dim();
        let mut tcoeffs = vec![SparsePoly::zero(d); k];
        tcoeffs.push(a);
        Self::new(d, tcoeffs).expect("same dimension")
    }

    pub fn t(d: usize) -> Self {
        Self::t_term(SparsePoly::constant(d, GaussRat::one()), 1)
    }

    pub fn var(d: usize, j: usize) -> Result<Self> {
        Ok(Self::t_term(SparsePoly::var(d, j)?, 0))
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn tcoeffs(&self) -> &[SparsePoly] {
        &self.tcoeffs
    }

    pub fn tcoeff(&self, k: usize) -> SparsePoly {
        self.tcoeffs.get(k).cloned().unwrap_or_else(|| SparsePoly::zero(self.d))
    }

    pub fn is_zero(&self) -> bool {
        self.tcoeffs.is_empty()
    }

    /// Degree in `t`.
    pub fn tdegree(&self) -> Result<usize> {
        self.tcoeffs.len().checked_sub(1).ok_or(Error::ZeroPolynomial)
    }

    /// `a_n`.
    pub fn leading(&self) -> Option<&SparsePoly> {
        self.tcoeffs.last()
    }

    fn zip_with(&self, o: &Self, f: impl Fn(&SparsePoly, &SparsePoly) -> SparsePoly) -> Self {
        assert_eq!(self.d, o.d, "spatial dimensions differ");
        let n = self.tcoeffs.len().max(o.tcoeffs.len());
        let tcoeffs = (0..n).map(|k| f(&self.tcoeff(k), &o.tcoeff(k))).collect();
        Self::new(self.d, tcoeffs).expect("same dimension")
    }

    pub fn add(&self, o: &Self) -> Self {
        self.zip_with(o, SparsePoly::add)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.zip_with(o, SparsePoly::sub)
    }

    pub fn neg(&self) -> Self {
        Self {
            d: self.d,
            tcoeffs: self.tcoeffs.iter().map(SparsePoly::neg).collect(),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.d, o.d, "spatial dimensions differ");
        if self.is_zero() || o.is_zero() {
            return Self::zero(self.d);
        }
        let mut tcoeffs = vec![SparsePoly::zero(self.d); self.tcoeffs.len() + o.tcoeffs.len() - 1];
        for (i, a) in self.tcoeffs.iter().enumerate() {
            for (j, b) in o.tcoeffs.iter().enumerate() {
                tcoeffs[i + j] = tcoeffs[i + j].add(&a.mul(b));
            }
        }
        Self::new(self.d, tcoeffs).expect("same dimension")
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::constant(self.d, GaussRat::one()), |acc, _| acc.mul(self))
    }

    /// Embed into a higher spatial dimension by padding exponent vectors.
    pub fn with_dim(&self, d: usize) -> Result<Self> {
        if d < self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                got: d,
            });
        }
        let tcoeffs = self
            .tcoeffs
            .iter()
            .map(|a| {
                SparsePoly::from_terms(
                    d,
                    a.terms().iter().map(|(alpha, c)| {
                        let mut beta = alpha.clone();
                        beta.resize(d, 0);
                        (beta, c.clone())
                    }),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(d, tcoeffs)
    }
}

/// Canonical text: descending powers of `t`, graded-lex monomials inside each
/// coefficient, e.g. `(x1^2 + 1)*t^2 + x2*t - 3`.
impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<(bool, String)> = Vec::new();
        for (k, a) in self.tcoeffs.iter().enumerate().rev() {
            if a.is_zero() {
                continue;
            }
            let tp = t_power(k);
            if a.terms().len() == 1 || k == 0 {
                parts.extend(a.signed_terms(&tp));
            } else {
                parts.push((false, join_body(&format!("({a})"), &tp)));
            }
        }
        f.write_str(&join_signed(&parts))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: i64) -> GaussRat {
        GaussRat::from_i64(n)
    }

    #[test]
    fn printing_follows_canonical_order() {
        let d = 2;
        let x1 = MultiPoly::var(d, 1).unwrap();
        let x2 = MultiPoly::var(d, 2).unwrap();
        let t = MultiPoly::t(d);
        let one = MultiPoly::constant(d, g(1));
        let p = one
            .add(&x1.pow(2))
            .mul(&t.pow(2))
            .add(&x2.mul(&t))
            .sub(&MultiPoly::constant(d, g(3)));
        assert_eq!(p.to_string(), "(x1^2 + 1)*t^2 + x2*t - 3");
        assert_eq!(p.tdegree().unwrap(), 2);
        let q = t.pow(2).sub(&one);
        assert_eq!(q.to_string(), "t^2 - 1");
        let r = x1.mul(&x2).mul(&t.pow(3)).add(&t).neg();
        assert_eq!(r.to_string(), "-x1*x2*t^3 - t");
        let s = x2.pow(2).add(&x1).add(&x1.mul(&x2)).sub(&one);
        assert_eq!(s.to_string(), "x1*x2 + x2^2 + x1 - 1");
    }

    #[test]
    fn zero_has_no_degree() {
        let z = MultiPoly::zero(1);
        assert!(matches!(z.tdegree(), Err(Error::ZeroPolynomial)));
        assert_eq!(z.to_string(), "0");
        let t = MultiPoly::t(1);
        assert!(t.sub(&t).is_zero());
    }

    #[test]
    fn evaluation_and_derivative() {
        let a = SparsePoly::from_terms(2, [(vec![1, 1], g(1)), (vec![0, 0], g(-1))]).unwrap();
        assert_eq!(a.eval(&[g(0), g(0)]).unwrap(), g(-1));
        assert_eq!(a.eval(&[g(2), g(3)]).unwrap(), g(5));
        assert!(a.eval(&[g(1)]).is_err());
        assert_eq!(a.derive(0), SparsePoly::var(2, 2).unwrap());
        assert_eq!(a.max_var_degree(), 1);
        assert_eq!(a.total_degree(), Some(2));
    }
}
