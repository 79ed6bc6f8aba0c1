//! Roots of operator polynomials.
//!
//! Exact mode returns Gaussian-rational roots with multiplicities or fails with
//! [`Error::ExactFactorizationUnavailable`]. Candidates come from a bigfloat
//! approximation rounded onto the lattice `Z[i] / N(a_n)`, which contains every
//! Gaussian-rational root of an integral polynomial; each candidate is then
//! confirmed by exact evaluation and divided out exactly.
//!
//! Numeric mode runs Aberth–Ehrlich iteration and groups nearby
//! approximations into clusters whose size is the multiplicity.

use astro_float::BigFloat;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::One;

use crate::error::{Error, Result};
use crate::poly::PolyOperator;
use crate::scalar::{big_from_i64, big_to_rat, BigComplex, FloatCtx, GaussRat, Scalar, RM};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RootMode {
    ExactRequired,
    Numeric,
}

const MAX_ITERATIONS: usize = 500;

/// Roots with multiplicities, sorted in descending `(re, im)` order.
pub fn roots(p: &PolyOperator, mode: RootMode, ctx: FloatCtx) -> Result<Vec<(Scalar, usize)>> {
    let n = p.degree().ok_or(Error::ZeroPolynomial)?;
    if n == 0 {
        return Err(Error::ConstantPolynomial);
    }
    let mut out = match mode {
        RootMode::ExactRequired => {
            if !p.backend().is_exact() {
                return Err(Error::BackendMismatch(
                    "exact roots requested for a bigfloat polynomial".into(),
                ));
            }
            match p.factored() {
                Some(f) => merge(f.roots.clone()),
                None => exact_roots(p)?
                    .into_iter()
                    .map(|(g, m)| (Scalar::Exact(g), m))
                    .collect(),
            }
        }
        RootMode::Numeric => {
            let b = crate::scalar::Backend::Float(ctx);
            match p.factored() {
                Some(f) => merge(
                    f.roots
                        .iter()
                        .map(|(r, m)| Ok((r.coerce(b)?, *m)))
                        .collect::<Result<Vec<_>>>()?,
                ),
                None => {
                    let coeffs: Vec<BigComplex> = p.coeffs().iter().map(|c| c.to_big(ctx.precision)).collect();
                    numeric_roots(&coeffs, ctx)?
                        .into_iter()
                        .map(|(z, m)| (Scalar::Float(z, ctx), m))
                        .collect()
                }
            }
        }
    };
    sort_descending(&mut out);
    Ok(out)
}

pub(crate) fn sort_descending(roots: &mut [(Scalar, usize)]) {
    roots.sort_by(|a, b| b.0.cmp_canonical(&a.0));
}

fn merge(raw: Vec<(Scalar, usize)>) -> Vec<(Scalar, usize)> {
    let mut out: Vec<(Scalar, usize)> = Vec::new();
    for (r, m) in raw {
        match out.iter_mut().find(|(s, _)| *s == r) {
            Some(e) => e.1 += m,
            None => out.push((r, m)),
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Exact splitting
// ---------------------------------------------------------------------------

fn horner(c: &[GaussRat], z: &GaussRat) -> GaussRat {
    c.iter().rev().fold(GaussRat::zero(), |acc, a| &(&acc * z) + a)
}

/// Synthetic division by `(t - z)`; `z` must be a root.
fn deflate(c: &[GaussRat], z: &GaussRat) -> Vec<GaussRat> {
    let n = c.len() - 1;
    let mut q = vec![GaussRat::zero(); n];
    let mut carry = GaussRat::zero();
    for k in (1..=n).rev() {
        carry = &(&carry * z) + &c[k];
        q[k - 1] = carry.clone();
    }
    q
}

fn exact_roots(p: &PolyOperator) -> Result<Vec<(GaussRat, usize)>> {
    let mut c: Vec<GaussRat> = p
        .coeffs()
        .iter()
        .map(|s| s.as_exact().cloned().expect("exact backend checked"))
        .collect();
    let mut found: Vec<(GaussRat, usize)> = Vec::new();

    let zeros = c.iter().take_while(|a| a.is_zero()).count();
    if zeros > 0 {
        found.push((GaussRat::zero(), zeros));
        c.drain(..zeros);
    }
    if c.len() == 1 {
        return Ok(found);
    }

    // Clear denominators: integral Gaussian coefficients.
    let lcm = c
        .iter()
        .fold(BigInt::one(), |l, a| l.lcm(a.re.denom()).lcm(a.im.denom()));
    let scale = GaussRat::real(BigRational::from_integer(lcm));
    c = c.iter().map(|a| a * &scale).collect();
    let lead = c.last().expect("nonconstant").clone();
    let grid = lead.norm_sqr().to_integer();

    let degree = c.len() - 1;
    let precision = 128 + 8 * degree + 2 * grid.bits() as usize;
    let ctx = FloatCtx::new(precision, 1e-30).expect("valid context");
    let approx: Vec<BigComplex> = c.iter().map(|a| a.to_big(precision)).collect();
    let clusters = numeric_roots(&approx, ctx)?;

    for (z, _) in clusters {
        if c.len() == 1 {
            break;
        }
        let Some(r) = lattice_candidate(&c, &z, &grid) else {
            continue;
        };
        let mut m = 0;
        while c.len() > 1 && horner(&c, &r).is_zero() {
            c = deflate(&c, &r);
            m += 1;
        }
        if m > 0 {
            match found.iter_mut().find(|(s, _)| *s == r) {
                Some(e) => e.1 += m,
                None => found.push((r, m)),
            }
        }
    }
    if c.len() > 1 {
        return Err(Error::ExactFactorizationUnavailable);
    }
    Ok(found)
}

/// Round `z` to `Z[i] / grid` and probe the neighbouring lattice points.
fn lattice_candidate(c: &[GaussRat], z: &BigComplex, grid: &BigInt) -> Option<GaussRat> {
    let round = |x: &BigFloat| -> BigInt {
        let r = big_to_rat(x) * BigRational::from_integer(grid.clone());
        r.round().to_integer()
    };
    let (re0, im0) = (round(&z.re), round(&z.im));
    for dr in [0i64, -1, 1] {
        for di in [0i64, -1, 1] {
            let cand = GaussRat::new(
                BigRational::new(&re0 + dr, grid.clone()),
                BigRational::new(&im0 + di, grid.clone()),
            );
            if horner(c, &cand).is_zero() {
                return Some(cand);
            }
        }
    }
    None
}

// ---------------------------------------------------------------------------
// Aberth–Ehrlich
// ---------------------------------------------------------------------------

fn eval_with_derivative(c: &[BigComplex], z: &BigComplex, p: usize) -> (BigComplex, BigComplex) {
    let mut f = BigComplex::zero(p);
    let mut d = BigComplex::zero(p);
    for a in c.iter().rev() {
        d = d.mul(z, p).add(&f, p);
        f = f.mul(z, p).add(a, p);
    }
    (f, d)
}

/// `Σ |a_k| |z|^k`: scale of the rounding error in evaluating `p(z)`.
fn eval_scale(c: &[BigComplex], z: &BigComplex, p: usize) -> BigFloat {
    let r = z.abs(p);
    c.iter()
        .rev()
        .fold(big_from_i64(0, p), |acc, a| acc.mul(&r, p, RM).add(&a.abs(p), p, RM))
}

fn below(x: &BigFloat, y: &BigFloat) -> bool {
    x.abs_cmp(y).is_some_and(|c| c <= 0)
}

/// Simultaneous approximations of all `n` roots.
pub(crate) fn aberth(c: &[BigComplex], p: usize) -> Result<Vec<BigComplex>> {
    let n = c.len() - 1;
    let lead = &c[n];
    let monic: Vec<BigComplex> = c.iter().map(|a| a.div(lead, p)).collect();
    // Cauchy bound on the root moduli.
    let bound = monic[..n].iter().map(|a| a.abs_f64()).fold(0.0f64, f64::max) + 1.0;
    let mut z: Vec<BigComplex> = (0..n)
        .map(|k| {
            let ang = std::f64::consts::TAU * k as f64 / n as f64 + 0.4;
            BigComplex::from_f64(bound * 0.5 * ang.cos(), bound * 0.5 * ang.sin(), p)
        })
        .collect();
    let mut unit_round = big_from_i64(1, p);
    unit_round.set_exponent(-(p as i32) + 6);
    let mut done = vec![false; n];
    for _ in 0..MAX_ITERATIONS {
        for k in 0..n {
            if done[k] {
                continue;
            }
            let (f, d) = eval_with_derivative(&monic, &z[k], p);
            let tol = eval_scale(&monic, &z[k], p).mul(&unit_round, p, RM);
            if below(&f.abs(p), &tol) {
                done[k] = true;
                continue;
            }
            let w = f.div(&d, p);
            let mut s = BigComplex::zero(p);
            for j in 0..n {
                if j != k {
                    s = s.add(&z[k].sub(&z[j], p).inv(p), p);
                }
            }
            let denom = BigComplex::one(p).sub(&w.mul(&s, p), p);
            let step = w.div(&denom, p);
            z[k] = z[k].sub(&step, p);
            let step_tol = z[k].abs(p).add(&big_from_i64(1, p), p, RM).mul(&unit_round, p, RM);
            if below(&step.abs(p), &step_tol) {
                done[k] = true;
            }
        }
        if done.iter().all(|d| *d) {
            return Ok(z);
        }
    }
    Err(Error::NonConvergence {
        iterations: MAX_ITERATIONS,
        dump: z.iter().map(|w| w.to_string()).collect(),
    })
}

/// Clustered roots: `(centroid, multiplicity)`.
pub(crate) fn numeric_roots(c: &[BigComplex], ctx: FloatCtx) -> Result<Vec<(BigComplex, usize)>> {
    let p = ctx.precision;
    let n = c.len() - 1;
    let approx = aberth(c, p)?;
    // Single-linkage clustering at radius eps^{1/n} (relative to |z| when large).
    let radius = ctx
        .eps
        .powf(1.0 / n as f64)
        .max(f64::powi(2.0, -(p as i32) / n as i32 + 4));
    let mut label: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in (i + 1)..n {
            let scale = approx[i].abs_f64().max(approx[j].abs_f64()).max(1.0);
            if approx[i].sub(&approx[j], p).abs_f64() <= radius * scale {
                let (a, b) = (label[i], label[j]);
                for l in label.iter_mut() {
                    if *l == b {
                        *l = a;
                    }
                }
            }
        }
    }
    let mut clusters: Vec<(BigComplex, usize)> = Vec::new();
    let mut seen: Vec<usize> = Vec::new();
    for i in 0..n {
        if seen.contains(&label[i]) {
            continue;
        }
        seen.push(label[i]);
        let members: Vec<&BigComplex> = (0..n).filter(|&j| label[j] == label[i]).map(|j| &approx[j]).collect();
        let m = members.len();
        let sum = members.iter().fold(BigComplex::zero(p), |a, z| a.add(z, p));
        let centroid = sum.scale(&big_from_i64(1, p).div(&big_from_i64(m as i64, p), p, RM), p);
        clusters.push((polish(c, centroid, m, p), m));
    }
    Ok(clusters)
}

/// Newton on `p^{(m-1)}`, for which a root of multiplicity `m` is simple.
fn polish(c: &[BigComplex], z0: BigComplex, m: usize, p: usize) -> BigComplex {
    let mut d: Vec<BigComplex> = c.to_vec();
    for _ in 1..m {
        d = d
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, a)| a.scale(&big_from_i64(k as i64, p), p))
            .collect();
    }
    let mut z = z0.clone();
    for _ in 0..8 {
        let (f, df) = eval_with_derivative(&d, &z, p);
        if df.is_exact_zero() {
            break;
        }
        let next = z.sub(&f.div(&df, p), p);
        // Keep the centroid if Newton wanders off.
        if next.sub(&z0, p).abs_f64() > 1e-3 * (1.0 + z0.abs_f64()) {
            return z0;
        }
        z = next;
    }
    z
}

/// Residual `|p(z)|` relative to the evaluation scale.
pub fn relative_residual(p: &PolyOperator, z: &Scalar, precision: usize) -> f64 {
    let c: Vec<BigComplex> = p.coeffs().iter().map(|a| a.to_big(precision)).collect();
    let zb = z.to_big(precision);
    let (f, _) = eval_with_derivative(&c, &zb, precision);
    let s = eval_scale(&c, &zb, precision);
    let sf = crate::scalar::big_to_f64(&s);
    if sf == 0.0 {
        return f.abs_f64();
    }
    f.abs_f64() / sf
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn g(a: i64, b: i64, c: i64, d: i64) -> Scalar {
        Scalar::Exact(GaussRat::new(rat(a, b), rat(c, d)))
    }

    #[test]
    fn exact_roots_of_unfactored_polynomial() {
        let p = PolyOperator::from_roots(
            Scalar::ratio(3, 2),
            vec![(g(1, 2, 0, 1), 2), (g(-2, 3, 1, 5), 1), (g(0, 1, 0, 1), 1)],
        )
        .unwrap();
        let bare = PolyOperator::new(p.poly().clone());
        let r = roots(&bare, RootMode::ExactRequired, FloatCtx::default()).unwrap();
        assert_eq!(r, vec![(g(1, 2, 0, 1), 2), (g(0, 1, 0, 1), 1), (g(-2, 3, 1, 5), 1)]);
    }

    #[test]
    fn irreducible_quadratic_is_refused() {
        let p = PolyOperator::from_ints(&[-2, 0, 1]);
        assert!(matches!(
            roots(&p, RootMode::ExactRequired, FloatCtx::default()),
            Err(Error::ExactFactorizationUnavailable)
        ));
        let r = roots(&p, RootMode::Numeric, FloatCtx::default()).unwrap();
        assert_eq!(r.len(), 2);
        assert!((r[0].0.to_f64().0 - 2f64.sqrt()).abs() < 1e-15);
        assert!(relative_residual(&p, &r[0].0, 128) < 1e-30);
    }

    #[test]
    fn numeric_mode_detects_multiplicity() {
        let p = PolyOperator::from_roots(Scalar::exact(1, 0), vec![(g(1, 3, 0, 1), 3), (g(0, 1, 2, 1), 1)]).unwrap();
        let bare = PolyOperator::new(p.poly().clone());
        let r = roots(&bare, RootMode::Numeric, FloatCtx::default()).unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(r[0].1, 3);
        assert!((r[0].0.to_f64().0 - 1.0 / 3.0).abs() < 1e-20);
        assert_eq!(r[1].1, 1);
    }

    #[test]
    fn constant_polynomial_is_an_error() {
        assert!(matches!(
            roots(&PolyOperator::from_ints(&[5]), RootMode::Numeric, FloatCtx::default()),
            Err(Error::ConstantPolynomial)
        ));
    }

    #[test]
    fn ordering_is_descending() {
        let p = PolyOperator::from_ints(&[-1, 0, 1]);
        let r = roots(&p, RootMode::ExactRequired, FloatCtx::default()).unwrap();
        assert_eq!(r[0].0, Scalar::exact(1, 0));
        assert_eq!(r[1].0, Scalar::exact(-1, 0));
    }

    #[test]
    fn large_denominators_are_found() {
        let p =
            PolyOperator::from_roots(Scalar::exact(7, 3), vec![(g(-13, 17, 5, 11), 2), (g(9, 19, -4, 7), 1)]).unwrap();
        let bare = PolyOperator::new(p.poly().clone());
        let r = roots(&bare, RootMode::ExactRequired, FloatCtx::default()).unwrap();
        assert_eq!(r.len(), 2);
        assert!(r.contains(&(g(-13, 17, 5, 11), 2)));
    }
}
