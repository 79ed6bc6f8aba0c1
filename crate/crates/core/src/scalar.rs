//! Coefficient field for all algebra in the crate.
//!
//! Two backends are supported: exact Gaussian rationals ([`GaussRat`]) and
//! arbitrary-precision complex floats ([`BigComplex`]) whose precision and
//! zero tolerance travel in an explicit [`FloatCtx`]. Values from different
//! backends never mix silently; containers carry a [`Backend`] tag and check
//! it at their public boundary.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, RoundingMode, Sign};
use num_bigint::{BigInt, Sign as IntSign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub(crate) const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    // Cache of pi/e/ln2 used by the transcendental functions. Holds no configuration.
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constants cache"));
}

pub(crate) fn with_consts<R>(f: impl FnOnce(&mut Consts) -> R) -> R {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

/// Precision (bits) and zero tolerance of the bigfloat backend.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FloatCtx {
    pub precision: usize,
    pub eps: f64,
}

impl Default for FloatCtx {
    fn default() -> Self {
        Self {
            precision: 128,
            eps: 1e-30,
        }
    }
}

impl FloatCtx {
    pub fn new(precision: usize, eps: f64) -> Result<Self> {
        if precision < 64 {
            return Err(Error::InvalidArgument(format!(
                "precision must be at least 64 bits, got {precision}"
            )));
        }
        if !(eps.is_finite() && eps > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "zero tolerance must be positive and finite, got {eps}"
            )));
        }
        Ok(Self { precision, eps })
    }

    pub fn eps_big(&self) -> BigFloat {
        BigFloat::from_f64(self.eps, self.precision)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Backend {
    Exact,
    Float(FloatCtx),
}

impl Backend {
    pub fn is_exact(&self) -> bool {
        matches!(self, Backend::Exact)
    }

    pub fn float_ctx(&self) -> Option<FloatCtx> {
        match self {
            Backend::Exact => None,
            Backend::Float(c) => Some(*c),
        }
    }

    pub(crate) fn check(&self, other: &Backend) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::BackendMismatch(format!("{self} vs {other}")))
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Backend::Exact => write!(f, "exact"),
            Backend::Float(c) => write!(f, "bigfloat(P={}, eps={:e})", c.precision, c.eps),
        }
    }
}

// ---------------------------------------------------------------------------
// Rational helpers
// ---------------------------------------------------------------------------

pub(crate) fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub(crate) fn fmt_rat(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub(crate) fn int_to_big(i: &BigInt) -> BigFloat {
    let (sign, digits) = i.to_u64_digits();
    if digits.is_empty() {
        return BigFloat::from_word(0, 64);
    }
    let s = if sign == IntSign::Minus { Sign::Neg } else { Sign::Pos };
    BigFloat::from_words(&digits, s, (digits.len() * 64) as i32)
}

pub(crate) fn rat_to_big(r: &BigRational, p: usize) -> BigFloat {
    if r.denom().is_one() {
        let mut v = int_to_big(r.numer());
        // Round wide integers down to the working precision.
        if v.mantissa_max_bit_len().unwrap_or(0) > p {
            v.set_precision(p, RM).expect("valid precision");
        }
        return v;
    }
    int_to_big(r.numer()).div(&int_to_big(r.denom()), p, RM)
}

/// Exact rational value of a finite bigfloat.
pub(crate) fn big_to_rat(x: &BigFloat) -> BigRational {
    let Some((words, _bits, sign, exp, _)) = x.as_raw_parts() else {
        panic!("non-finite bigfloat has no rational value");
    };
    if x.is_zero() {
        return BigRational::zero();
    }
    let mut m = BigInt::zero();
    for w in words.iter().rev() {
        m = (m << 64) + BigInt::from(*w);
    }
    if sign == Sign::Neg {
        m = -m;
    }
    let shift = exp as i64 - (words.len() * 64) as i64;
    if shift >= 0 {
        BigRational::from_integer(m << (shift as usize))
    } else {
        BigRational::new(m, BigInt::one() << ((-shift) as usize))
    }
}

pub(crate) fn big_to_f64(x: &BigFloat) -> f64 {
    let Some((words, _, sign, exp, _)) = x.as_raw_parts() else {
        return f64::NAN;
    };
    if x.is_zero() {
        return 0.0;
    }
    // The top mantissa word carries more bits than an f64 can hold.
    let top = *words.last().expect("nonzero mantissa") as f64 / 18446744073709551616.0;
    let e = exp.clamp(-1100, 1100);
    let mag = top * 2f64.powi(e);
    if sign == Sign::Neg {
        -mag
    } else {
        mag
    }
}

pub(crate) fn big_zero(p: usize) -> BigFloat {
    BigFloat::new(p)
}

pub(crate) fn big_from_i64(v: i64, p: usize) -> BigFloat {
    BigFloat::from_i64(v, p)
}

/// Decimal rendering with enough digits to survive a round trip at precision `p`.
pub(crate) fn fmt_big(x: &BigFloat) -> String {
    if x.is_zero() {
        return "0".into();
    }
    x.to_string()
}

// ---------------------------------------------------------------------------
// Gaussian rationals
// ---------------------------------------------------------------------------

/// Exact complex number with rational real and imaginary parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussRat {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussRat {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        Self {
            re,
            im: BigRational::zero(),
        }
    }

    pub fn from_i64(v: i64) -> Self {
        Self::real(BigRational::from_integer(v.into()))
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        Self::real(rat(n, d))
    }

    pub fn i() -> Self {
        Self {
            re: BigRational::zero(),
            im: BigRational::one(),
        }
    }

    pub fn zero() -> Self {
        Self::from_i64(0)
    }

    pub fn one() -> Self {
        Self::from_i64(1)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sqr();
        Some(Self::new(&self.re / &n, -(&self.im / &n)))
    }

    pub fn div(&self, other: &Self) -> Option<Self> {
        other.inv().map(|inv| self * &inv)
    }

    pub fn pow(&self, mut k: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            k >>= 1;
        }
        acc
    }

    pub fn to_big(&self, p: usize) -> BigComplex {
        BigComplex {
            re: rat_to_big(&self.re, p),
            im: rat_to_big(&self.im, p),
        }
    }

    /// Canonical order: lexicographic on (re, im).
    pub fn cmp_lex(&self, other: &Self) -> Ordering {
        self.re.cmp(&other.re).then_with(|| self.im.cmp(&other.im))
    }
}

impl<'a> Add<&'a GaussRat> for &'a GaussRat {
    type Output = GaussRat;
    fn add(self, o: &GaussRat) -> GaussRat {
        GaussRat::new(&self.re + &o.re, &self.im + &o.im)
    }
}

impl<'a> Sub<&'a GaussRat> for &'a GaussRat {
    type Output = GaussRat;
    fn sub(self, o: &GaussRat) -> GaussRat {
        GaussRat::new(&self.re - &o.re, &self.im - &o.im)
    }
}

impl<'a> Mul<&'a GaussRat> for &'a GaussRat {
    type Output = GaussRat;
    fn mul(self, o: &GaussRat) -> GaussRat {
        GaussRat::new(&self.re * &o.re - &self.im * &o.im, &self.re * &o.im + &self.im * &o.re)
    }
}

impl Neg for &GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        GaussRat::new(-self.re.clone(), -self.im.clone())
    }
}

/// Text form `a/b`, `c/di`, or `a/b + c/di` (imaginary part suffixed by `i`).
impl fmt::Display for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", fmt_rat(&self.re)),
            (true, false) => write!(f, "{}i", fmt_rat(&self.im)),
            (false, false) => {
                if self.im.is_negative() {
                    write!(f, "{} - {}i", fmt_rat(&self.re), fmt_rat(&-self.im.clone()))
                } else {
                    write!(f, "{} + {}i", fmt_rat(&self.re), fmt_rat(&self.im))
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Bigfloat complex numbers
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct BigComplex {
    pub re: BigFloat,
    pub im: BigFloat,
}

impl BigComplex {
    pub fn new(re: BigFloat, im: BigFloat) -> Self {
        Self { re, im }
    }

    pub fn zero(p: usize) -> Self {
        Self::new(big_zero(p), big_zero(p))
    }

    pub fn one(p: usize) -> Self {
        Self::new(big_from_i64(1, p), big_zero(p))
    }

    pub fn from_real(re: BigFloat, p: usize) -> Self {
        Self::new(re, big_zero(p))
    }

    pub fn from_f64(re: f64, im: f64, p: usize) -> Self {
        Self::new(BigFloat::from_f64(re, p), BigFloat::from_f64(im, p))
    }

    pub fn is_exact_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn add(&self, o: &Self, p: usize) -> Self {
        Self::new(self.re.add(&o.re, p, RM), self.im.add(&o.im, p, RM))
    }

    pub fn sub(&self, o: &Self, p: usize) -> Self {
        Self::new(self.re.sub(&o.re, p, RM), self.im.sub(&o.im, p, RM))
    }

    pub fn neg(&self) -> Self {
        Self::new(-self.re.clone(), -self.im.clone())
    }

    pub fn mul(&self, o: &Self, p: usize) -> Self {
        let re = self.re.mul(&o.re, p, RM).sub(&self.im.mul(&o.im, p, RM), p, RM);
        let im = self.re.mul(&o.im, p, RM).add(&self.im.mul(&o.re, p, RM), p, RM);
        Self::new(re, im)
    }

    pub fn scale(&self, k: &BigFloat, p: usize) -> Self {
        Self::new(self.re.mul(k, p, RM), self.im.mul(k, p, RM))
    }

    pub fn norm_sqr(&self, p: usize) -> BigFloat {
        self.re.mul(&self.re, p, RM).add(&self.im.mul(&self.im, p, RM), p, RM)
    }

    pub fn abs(&self, p: usize) -> BigFloat {
        self.norm_sqr(p).sqrt(p, RM)
    }

    pub fn inv(&self, p: usize) -> Self {
        let n = self.norm_sqr(p);
        Self::new(self.re.div(&n, p, RM), (-self.im.clone()).div(&n, p, RM))
    }

    pub fn div(&self, o: &Self, p: usize) -> Self {
        self.mul(&o.inv(p), p)
    }

    pub fn exp(&self, p: usize) -> Self {
        let r = crate::elementary::exp(&self.re, p);
        if self.im.is_zero() {
            return Self::new(r, big_zero(p));
        }
        let (c, s) = crate::elementary::cos_sin(&self.im, p);
        Self::new(r.mul(&c, p, RM), r.mul(&s, p, RM))
    }

    pub fn powi(&self, k: u32, p: usize) -> Self {
        let mut acc = Self::one(p);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base, p);
            }
            base = base.mul(&base, p);
            k >>= 1;
        }
        acc
    }

    /// `|self| < eps`.
    pub fn is_zero_within(&self, eps: &BigFloat, p: usize) -> bool {
        let e2 = eps.mul(eps, p, RM);
        self.norm_sqr(p) < e2
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (big_to_f64(&self.re), big_to_f64(&self.im))
    }

    pub fn abs_f64(&self) -> f64 {
        let (a, b) = self.to_f64();
        a.hypot(b)
    }

    pub fn cmp_lex(&self, o: &Self) -> Ordering {
        self.re
            .partial_cmp(&o.re)
            .unwrap_or(Ordering::Equal)
            .then_with(|| self.im.partial_cmp(&o.im).unwrap_or(Ordering::Equal))
    }
}

impl fmt::Display for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let re = fmt_big(&self.re);
        if self.im.is_zero() {
            return write!(f, "{re}");
        }
        if self.re.is_zero() {
            return write!(f, "{}i", fmt_big(&self.im));
        }
        if self.im.is_negative() {
            write!(f, "{re} - {}i", fmt_big(&-self.im.clone()))
        } else {
            write!(f, "{re} + {}i", fmt_big(&self.im))
        }
    }
}

// ---------------------------------------------------------------------------
// Scalar
// ---------------------------------------------------------------------------

/// A coefficient on one of the two backends.
///
/// Equality is bit-exact for exact scalars and within the context's `eps` for
/// bigfloat scalars.
#[derive(Clone, Debug)]
pub enum Scalar {
    Exact(GaussRat),
    Float(BigComplex, FloatCtx),
}

impl Scalar {
    pub fn backend(&self) -> Backend {
        match self {
            Scalar::Exact(_) => Backend::Exact,
            Scalar::Float(_, c) => Backend::Float(*c),
        }
    }

    pub fn from_gauss(g: GaussRat, backend: Backend) -> Self {
        match backend {
            Backend::Exact => Scalar::Exact(g),
            Backend::Float(c) => Scalar::Float(g.to_big(c.precision), c),
        }
    }

    pub fn from_i64(v: i64, backend: Backend) -> Self {
        Self::from_gauss(GaussRat::from_i64(v), backend)
    }

    pub fn zero(backend: Backend) -> Self {
        Self::from_i64(0, backend)
    }

    pub fn one(backend: Backend) -> Self {
        Self::from_i64(1, backend)
    }

    pub fn exact(re: i64, im: i64) -> Self {
        Scalar::Exact(GaussRat::new(
            BigRational::from_integer(re.into()),
            BigRational::from_integer(im.into()),
        ))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Scalar::Exact(GaussRat::from_ratio(n, d))
    }

    pub fn as_exact(&self) -> Option<&GaussRat> {
        match self {
            Scalar::Exact(g) => Some(g),
            Scalar::Float(..) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(g) => g.is_zero(),
            Scalar::Float(z, c) => z.is_zero_within(&c.eps_big(), c.precision),
        }
    }

    pub fn is_one(&self) -> bool {
        (self - &Scalar::one(self.backend())).is_zero()
    }

    /// Convert into `backend`. Exact values promote to bigfloat; the reverse is refused.
    pub fn coerce(&self, backend: Backend) -> Result<Scalar> {
        match (self, backend) {
            (Scalar::Exact(_), Backend::Exact) => Ok(self.clone()),
            (Scalar::Exact(g), Backend::Float(c)) => Ok(Scalar::Float(g.to_big(c.precision), c)),
            (Scalar::Float(_, c0), Backend::Float(c)) if *c0 == c => Ok(self.clone()),
            _ => Err(Error::BackendMismatch(format!(
                "cannot convert {} scalar into {}",
                self.backend(),
                backend
            ))),
        }
    }

    pub fn to_big(&self, p: usize) -> BigComplex {
        match self {
            Scalar::Exact(g) => g.to_big(p),
            Scalar::Float(z, c) if c.precision == p => z.clone(),
            Scalar::Float(z, _) => {
                let mut re = z.re.clone();
                let mut im = z.im.clone();
                re.set_precision(p, RM).expect("valid precision");
                im.set_precision(p, RM).expect("valid precision");
                BigComplex::new(re, im)
            }
        }
    }

    pub fn to_f64(&self) -> (f64, f64) {
        match self {
            Scalar::Exact(g) => (g.re.to_f64().unwrap_or(f64::NAN), g.im.to_f64().unwrap_or(f64::NAN)),
            Scalar::Float(z, _) => z.to_f64(),
        }
    }

    pub fn abs_f64(&self) -> f64 {
        let (a, b) = self.to_f64();
        a.hypot(b)
    }

    /// Signs (-1, 0, 1) of the real and imaginary parts.
    pub fn signs(&self) -> (i8, i8) {
        fn rs(r: &BigRational) -> i8 {
            if r.is_zero() {
                0
            } else if r.is_negative() {
                -1
            } else {
                1
            }
        }
        fn bs(b: &BigFloat) -> i8 {
            if b.is_zero() {
                0
            } else if b.is_negative() {
                -1
            } else {
                1
            }
        }
        match self {
            Scalar::Exact(g) => (rs(&g.re), rs(&g.im)),
            Scalar::Float(z, _) => (bs(&z.re), bs(&z.im)),
        }
    }

    pub fn checked_div(&self, o: &Scalar) -> Option<Scalar> {
        if o.is_zero() {
            return None;
        }
        Some(match (self, o) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a.div(b)?),
            (Scalar::Float(a, c), Scalar::Float(b, _)) => Scalar::Float(a.div(b, c.precision), *c),
            _ => mismatch(self, o),
        })
    }

    pub fn pow(&self, k: u32) -> Scalar {
        match self {
            Scalar::Exact(g) => Scalar::Exact(g.pow(k)),
            Scalar::Float(z, c) => Scalar::Float(z.powi(k, c.precision), *c),
        }
    }

    pub fn conj(&self) -> Scalar {
        match self {
            Scalar::Exact(g) => Scalar::Exact(g.conj()),
            Scalar::Float(z, c) => Scalar::Float(BigComplex::new(z.re.clone(), -z.im.clone()), *c),
        }
    }

    /// Multiply by the imaginary unit.
    pub fn mul_i(&self) -> Scalar {
        self * &Scalar::from_gauss(GaussRat::i(), self.backend())
    }

    /// Canonical total order used for sorting terms: lexicographic on (re, im).
    pub fn cmp_canonical(&self, o: &Scalar) -> Ordering {
        match (self, o) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a.cmp_lex(b),
            (Scalar::Float(a, _), Scalar::Float(b, _)) => a.cmp_lex(b),
            (Scalar::Exact(_), Scalar::Float(..)) => Ordering::Less,
            (Scalar::Float(..), Scalar::Exact(_)) => Ordering::Greater,
        }
    }
}

fn mismatch(a: &Scalar, b: &Scalar) -> ! {
    panic!("scalar backend mismatch: {} vs {}", a.backend(), b.backend())
}

macro_rules! scalar_binop {
    ($tr:ident, $m:ident, $gauss:tt, $big:ident) => {
        impl<'a> $tr<&'a Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $m(self, o: &'a Scalar) -> Scalar {
                match (self, o) {
                    (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a $gauss b),
                    (Scalar::Float(a, c), Scalar::Float(b, c2)) if c == c2 => {
                        Scalar::Float(a.$big(b, c.precision), *c)
                    }
                    _ => mismatch(self, o),
                }
            }
        }
    };
}

scalar_binop!(Add, add, +, add);
scalar_binop!(Sub, sub, -, sub);
scalar_binop!(Mul, mul, *, mul);

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(g) => Scalar::Exact(-g),
            Scalar::Float(z, c) => Scalar::Float(z.neg(), *c),
        }
    }
}

impl PartialEq for Scalar {
    fn eq(&self, o: &Scalar) -> bool {
        match (self, o) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            (Scalar::Float(_, c), Scalar::Float(_, c2)) if c == c2 => (self - o).is_zero(),
            _ => false,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(g) => g.fmt(f),
            Scalar::Float(z, _) => z.fmt(f),
        }
    }
}

impl From<GaussRat> for Scalar {
    fn from(g: GaussRat) -> Self {
        Scalar::Exact(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_arithmetic_is_exact() {
        let a = GaussRat::new(rat(3, 2), rat(1, 1));
        let b = GaussRat::new(rat(-1, 3), rat(2, 5));
        let q = a.div(&b).unwrap();
        assert_eq!(&q * &b, a);
        assert_eq!(GaussRat::i().pow(2), GaussRat::from_i64(-1));
    }

    #[test]
    fn gauss_display() {
        assert_eq!(GaussRat::new(rat(3, 2), rat(1, 1)).to_string(), "3/2 + 1i");
        assert_eq!(GaussRat::new(rat(0, 1), rat(-2, 3)).to_string(), "-2/3i");
        assert_eq!(GaussRat::new(rat(-1, 1), rat(-1, 2)).to_string(), "-1 - 1/2i");
        assert_eq!(GaussRat::zero().to_string(), "0");
    }

    #[test]
    fn rational_bigfloat_round_trip() {
        for (n, d) in [(1, 3), (-7, 2), (123456789, 1), (0, 1), (-5, 64)] {
            let r = rat(n, d);
            let b = rat_to_big(&r, 128);
            let back = big_to_rat(&b);
            let err = (back - &r).abs();
            assert!(err < rat(1, 1) / BigRational::from_integer(BigInt::one() << 120usize));
        }
        let huge: BigInt = BigInt::from(3) << 300usize;
        let b = int_to_big(&huge);
        assert_eq!(big_to_rat(&b), BigRational::from_integer(huge));
    }

    #[test]
    fn float_zero_uses_context_tolerance() {
        let ctx = FloatCtx::default();
        let tiny = Scalar::Float(BigComplex::from_f64(1e-31, 0.0, 128), ctx);
        let small = Scalar::Float(BigComplex::from_f64(1e-29, 0.0, 128), ctx);
        assert!(tiny.is_zero());
        assert!(!small.is_zero());
    }

    #[test]
    fn complex_exp_matches_f64() {
        let z = BigComplex::from_f64(0.5, 1.25, 128).exp(128);
        let (re, im) = z.to_f64();
        let w = 0.5f64.exp();
        assert!((re - w * 1.25f64.cos()).abs() < 1e-15);
        assert!((im - w * 1.25f64.sin()).abs() < 1e-15);
    }

    #[test]
    fn coercion_refuses_float_to_exact() {
        let f = Scalar::from_i64(1, Backend::Float(FloatCtx::default()));
        assert!(f.coerce(Backend::Exact).is_err());
        assert!(Scalar::exact(1, 2).coerce(Backend::Float(FloatCtx::default())).is_ok());
    }
}
