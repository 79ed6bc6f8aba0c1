//! `exp`, `cos` and `sin` for bigfloats by range reduction and a short Taylor
//! series. The library routines are accurate but slow for generic arguments at
//! ~128 bits, and the quadrature oracle calls these millions of times.

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use astro_float::BigFloat;

use crate::scalar::{big_from_i64, big_to_f64, with_consts, RM};

/// Halvings applied to the reduced argument before the series.
const SQUARINGS: i32 = 8;
/// Extra working bits: covers the squaring loop and the reduction.
const GUARD: usize = 40;
/// Beyond this the library routine is used; the reductions below would need
/// many more guard bits.
const FAST_LIMIT: f64 = 1.0e6;

struct Tables {
    ln2: BigFloat,
    half_pi: BigFloat,
    /// `1 / n!`.
    inv_fact: Vec<BigFloat>,
    terms: usize,
}

thread_local! {
    static TABLES: RefCell<HashMap<usize, Rc<Tables>>> = RefCell::new(HashMap::new());
}

fn tables(q: usize) -> Rc<Tables> {
    if let Some(t) = TABLES.with(|m| m.borrow().get(&q).cloned()) {
        return t;
    }
    let (ln2, pi) = with_consts(|cc| (cc.ln_2(q, RM), cc.pi(q, RM)));
    let mut half_pi = pi;
    half_pi.set_exponent(half_pi.exponent().expect("pi is finite") - 1);
    // Reduced argument is below 2^{-SQUARINGS}; stop once its powers over n!
    // drop under 2^{-q}.
    let mut terms = 2;
    let mut log2_term = 0.0f64;
    while log2_term > -(q as f64) - 4.0 || terms < 4 {
        log2_term -= SQUARINGS as f64 + (terms as f64).log2();
        terms += 1;
    }
    let mut inv_fact = vec![big_from_i64(1, q)];
    for n in 1..=terms {
        let next = inv_fact[n - 1].div(&big_from_i64(n as i64, q), q, RM);
        inv_fact.push(next);
    }
    let t = Rc::new(Tables {
        ln2,
        half_pi,
        inv_fact,
        terms,
    });
    TABLES.with(|m| m.borrow_mut().insert(q, t.clone()));
    t
}

fn scale2(x: &mut BigFloat, k: i32) {
    if let Some(e) = x.exponent() {
        x.set_exponent(e + k);
    }
}

fn rounded(mut x: BigFloat, p: usize) -> BigFloat {
    x.set_precision(p, RM).expect("valid precision");
    x
}

/// `e^x` correct to about `p` bits.
pub(crate) fn exp(x: &BigFloat, p: usize) -> BigFloat {
    if x.is_zero() {
        return big_from_i64(1, p);
    }
    let xf = big_to_f64(x);
    if xf.is_nan() || xf.abs() >= FAST_LIMIT {
        return with_consts(|cc| x.exp(p, RM, cc));
    }
    let q = p + GUARD;
    let tb = tables(q);
    let k = (xf / std::f64::consts::LN_2).round();
    let mut r = x.sub(&tb.ln2.mul(&big_from_i64(k as i64, q), q, RM), q, RM);
    scale2(&mut r, -SQUARINGS);
    // Horner for Σ r^n / n!
    let mut acc = tb.inv_fact[tb.terms].clone();
    for n in (0..tb.terms).rev() {
        acc = acc.mul(&r, q, RM).add(&tb.inv_fact[n], q, RM);
    }
    for _ in 0..SQUARINGS {
        acc = acc.mul(&acc, q, RM);
    }
    let Some(e) = acc.exponent() else {
        return with_consts(|cc| x.exp(p, RM, cc));
    };
    let target = e as i64 + k as i64;
    if target > i32::MAX as i64 / 2 || target < i32::MIN as i64 / 2 {
        return with_consts(|cc| x.exp(p, RM, cc));
    }
    acc.set_exponent(target as i32);
    rounded(acc, p)
}

/// `(cos x, sin x)` correct to about `p` bits (absolute).
pub(crate) fn cos_sin(x: &BigFloat, p: usize) -> (BigFloat, BigFloat) {
    if x.is_zero() {
        return (big_from_i64(1, p), big_from_i64(0, p));
    }
    let xf = big_to_f64(x);
    if xf.is_nan() || xf.abs() >= FAST_LIMIT {
        return with_consts(|cc| (x.cos(p, RM, cc), x.sin(p, RM, cc)));
    }
    let q = p + GUARD;
    let tb = tables(q);
    let k = (xf / std::f64::consts::FRAC_PI_2).round();
    let mut r = x.sub(&tb.half_pi.mul(&big_from_i64(k as i64, q), q, RM), q, RM);
    scale2(&mut r, -SQUARINGS);
    let r2 = r.mul(&r, q, RM);
    // cos = Σ (-1)^j r^{2j}/(2j)!, sin = r Σ (-1)^j r^{2j}/(2j+1)!
    let top = tb.terms / 2;
    let signed = |n: usize| {
        let v = tb.inv_fact[n].clone();
        if (n / 2) % 2 == 1 {
            -v
        } else {
            v
        }
    };
    let mut c = signed(2 * top);
    let mut s = signed(2 * top - 1);
    for j in (0..top).rev() {
        c = c.mul(&r2, q, RM).add(&signed(2 * j), q, RM);
        if j + 1 < top {
            s = s.mul(&r2, q, RM).add(&signed(2 * j + 1), q, RM);
        }
    }
    let mut s = s.mul(&r, q, RM);
    // Double the angle: (c + is)^2.
    for _ in 0..SQUARINGS {
        let cc = c.mul(&c, q, RM).sub(&s.mul(&s, q, RM), q, RM);
        let mut ss = c.mul(&s, q, RM);
        scale2(&mut ss, 1);
        c = cc;
        s = ss;
    }
    let (c, s) = match (k as i64).rem_euclid(4) {
        0 => (c, s),
        1 => (-s, c),
        2 => (-c, -s),
        _ => (s, -c),
    };
    (rounded(c, p), rounded(s, p))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &BigFloat, b: &BigFloat, p: usize, bits: i32) -> bool {
        let d = a.sub(b, p + 64, RM).abs();
        if d.is_zero() {
            return true;
        }
        let scale = b.abs().exponent().unwrap_or(0).max(0);
        d.exponent().unwrap() <= scale - bits
    }

    #[test]
    fn exp_matches_library() {
        let p = 128;
        for x in [1e-25, -0.5, 0.7182818, -3.3, 12.3, -77.125, 300.5, -2000.0, 1.5e5] {
            let b = BigFloat::from_f64(x, p);
            let want = with_consts(|cc| b.exp(p, RM, cc));
            let got = exp(&b, p);
            let d = got.div(&want, p + 64, RM).sub(&big_from_i64(1, p + 64), p + 64, RM);
            assert!(d.is_zero() || d.exponent().unwrap() < -(p as i32) + 3, "{x}");
        }
    }

    #[test]
    fn cos_sin_match_library() {
        let p = 192;
        for x in [1e-30, 0.3, -0.785, 1.5706, 2.5, -3.3, 10.0, -123.456, 4.0e4] {
            let b = BigFloat::from_f64(x, p);
            let (c, s) = cos_sin(&b, p);
            let (wc, ws) = with_consts(|cc| (b.cos(p, RM, cc), b.sin(p, RM, cc)));
            assert!(close(&c, &wc, p, p as i32 - 4), "cos {x}");
            assert!(close(&s, &ws, p, p as i32 - 4), "sin {x}");
        }
    }
}
