//! Text forms of operators, exponential polynomials, distributions and test
//! functions.
//!
//! Grammar (precedence high to low): `^` with a literal nonnegative integer
//! exponent, unary minus, `*`, binary `+`/`-`. Literals are integers,
//! rationals `a/b` (a single token), decimals such as `1.25` or `5.e-1`, and
//! any of these immediately followed by `i`. Identifiers: `t`, `i`, `x1`,
//! `x2`, ... and, in exponential polynomials only, `exp(...)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::distribution::{ConcatFunction, DeltaComb, Distribution};
use crate::error::{Error, Result};
use crate::exppoly::ExpPoly;
use crate::multipoly::MultiPoly;
use crate::oracle::TestFunction;
use crate::poly::Poly1;
use crate::scalar::{Backend, GaussRat, Scalar};

/// Largest accepted `^` exponent.
pub const MAX_EXPONENT: u32 = 4096;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigRational, bool),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    End,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    pos: usize,
    /// The integer literal as written, for exponents.
    text: String,
}

fn syntax(position: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        position,
        message: message.into(),
    }
}

fn lex(src: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let digits = |i: &mut usize| {
        let start = *i;
        while *i < chars.len() && chars[*i].is_ascii_digit() {
            *i += 1;
        }
        chars[start..*i].iter().collect::<String>()
    };
    while i < chars.len() {
        let c = chars[i];
        let pos = i;
        let simple = |tok| Token {
            tok,
            pos,
            text: c.to_string(),
        };
        match c {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
            }
            '+' => {
                out.push(simple(Tok::Plus));
                i += 1;
            }
            '-' => {
                out.push(simple(Tok::Minus));
                i += 1;
            }
            '*' => {
                out.push(simple(Tok::Star));
                i += 1;
            }
            '^' => {
                out.push(simple(Tok::Caret));
                i += 1;
            }
            '(' => {
                out.push(simple(Tok::LParen));
                i += 1;
            }
            ')' => {
                out.push(simple(Tok::RParen));
                i += 1;
            }
            '/' => return Err(syntax(pos, "`/` is only allowed inside a rational literal such as 3/4")),
            c if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) => {
                let int_part = digits(&mut i);
                let mut value = BigRational::from_integer(int_part.parse::<BigInt>().unwrap_or_default());
                let mut decimal = false;
                if i < chars.len() && chars[i] == '.' {
                    decimal = true;
                    i += 1;
                    let frac = digits(&mut i);
                    if !frac.is_empty() {
                        let scale = BigInt::from(10u32).pow(frac.len() as u32);
                        value += BigRational::new(frac.parse::<BigInt>().expect("digits"), scale);
                    }
                }
                // Exponent only when followed by a (signed) digit.
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut j = i + 1;
                    let negative = chars.get(j) == Some(&'-');
                    if matches!(chars.get(j), Some('+') | Some('-')) {
                        j += 1;
                    }
                    if chars.get(j).is_some_and(|d| d.is_ascii_digit()) {
                        i = j;
                        let e = digits(&mut i);
                        let e: u32 = e.parse().map_err(|_| Error::ExponentOverflow { position: pos })?;
                        if e > 10_000 {
                            return Err(Error::ExponentOverflow { position: pos });
                        }
                        let scale = BigRational::from_integer(BigInt::from(10u32).pow(e));
                        value = if negative { value / scale } else { value * scale };
                        decimal = true;
                    }
                }
                if !decimal && i < chars.len() && chars[i] == '/' {
                    if !chars.get(i + 1).is_some_and(|d| d.is_ascii_digit()) {
                        return Err(syntax(i, "expected a denominator after `/`"));
                    }
                    i += 1;
                    let den = digits(&mut i);
                    let den = den.parse::<BigInt>().expect("digits");
                    if den.is_zero() {
                        return Err(syntax(pos, "zero denominator"));
                    }
                    value /= BigRational::from_integer(den);
                    decimal = true;
                }
                let mut imag = false;
                if i < chars.len() && chars[i] == 'i' && !chars.get(i + 1).is_some_and(|d| d.is_alphanumeric()) {
                    imag = true;
                    i += 1;
                }
                let text = if decimal || imag { String::new() } else { int_part };
                out.push(Token {
                    tok: Tok::Num(value, imag),
                    pos,
                    text,
                });
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let name: String = chars[start..i].iter().collect();
                out.push(Token {
                    tok: Tok::Ident(name.clone()),
                    pos,
                    text: name,
                });
            }
            other => return Err(syntax(pos, format!("unexpected character `{other}`"))),
        }
    }
    out.push(Token {
        tok: Tok::End,
        pos: chars.len(),
        text: String::new(),
    });
    Ok(out)
}

/// Parsed expression, before lowering into a particular algebra.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(GaussRat),
    T,
    /// `x_k`, 1-based, with its source position.
    X(usize, usize),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, u32),
    /// `exp(...)` with its source position.
    Exp(Box<Expr>, usize),
}

struct Parser {
    toks: Vec<Token>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.at]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek().tok {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while self.peek().tok == Tok::Star {
            self.bump();
            lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        match self.peek().tok {
            Tok::Minus => {
                self.bump();
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.peek().tok != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let t = self.bump();
        match &t.tok {
            Tok::Num(_, false) if !t.text.is_empty() => {
                let e: u32 = t
                    .text
                    .parse()
                    .map_err(|_| Error::ExponentOverflow { position: t.pos })?;
                if e > MAX_EXPONENT {
                    return Err(Error::ExponentOverflow { position: t.pos });
                }
                Ok(Expr::Pow(Box::new(base), e))
            }
            Tok::Minus => Err(syntax(
                t.pos,
                "exponent must be a nonnegative integer literal, found `-`",
            )),
            _ => Err(syntax(t.pos, "exponent must be a nonnegative integer literal")),
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        let t = self.bump();
        match t.tok {
            Tok::Num(v, imag) => Ok(Expr::Num(if imag {
                GaussRat::new(BigRational::zero(), v)
            } else {
                GaussRat::real(v)
            })),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect_rparen()?;
                Ok(e)
            }
            Tok::Ident(name) => self.ident(name, t.pos),
            Tok::End => Err(syntax(t.pos, "unexpected end of input")),
            _ => Err(syntax(t.pos, format!("unexpected `{}`", t.text))),
        }
    }

    fn expect_rparen(&mut self) -> Result<()> {
        let t = self.bump();
        if t.tok == Tok::RParen {
            Ok(())
        } else {
            Err(syntax(t.pos, "expected `)`"))
        }
    }

    fn ident(&mut self, name: String, pos: usize) -> Result<Expr> {
        match name.as_str() {
            "t" => return Ok(Expr::T),
            "i" => return Ok(Expr::Num(GaussRat::i())),
            "exp" => {
                if self.peek().tok != Tok::LParen {
                    return Err(syntax(self.peek().pos, "expected `(` after exp"));
                }
                self.bump();
                let arg = self.expr()?;
                self.expect_rparen()?;
                return Ok(Expr::Exp(Box::new(arg), pos));
            }
            _ => {}
        }
        if let Some(idx) = name.strip_prefix('x') {
            let valid = !idx.is_empty() && idx.bytes().all(|b| b.is_ascii_digit()) && !idx.starts_with('0');
            if valid {
                if let Ok(k) = idx.parse::<usize>() {
                    return Ok(Expr::X(k, pos));
                }
            }
        }
        Err(Error::UnknownIdentifier { name, position: pos })
    }
}

/// Parse into an expression tree without lowering.
pub fn parse_expr(src: &str) -> Result<Expr> {
    let mut p = Parser { toks: lex(src)?, at: 0 };
    let e = p.expr()?;
    let t = p.peek();
    if t.tok != Tok::End {
        return Err(syntax(t.pos, format!("unexpected `{}`", t.text)));
    }
    Ok(e)
}

impl Expr {
    /// Highest `x` index mentioned.
    pub fn max_x(&self) -> usize {
        match self {
            Expr::Num(_) | Expr::T => 0,
            Expr::X(k, _) => *k,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => a.max_x().max(b.max_x()),
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Exp(a, _) => a.max_x(),
        }
    }

    fn lower_multi(&self, d: usize) -> Result<MultiPoly> {
        Ok(match self {
            Expr::Num(c) => MultiPoly::constant(d, c.clone()),
            Expr::T => MultiPoly::t(d),
            Expr::X(k, pos) => {
                if *k > d {
                    return Err(Error::UnknownIdentifier {
                        name: format!("x{k}"),
                        position: *pos,
                    });
                }
                MultiPoly::var(d, *k)?
            }
            Expr::Add(a, b) => a.lower_multi(d)?.add(&b.lower_multi(d)?),
            Expr::Sub(a, b) => a.lower_multi(d)?.sub(&b.lower_multi(d)?),
            Expr::Mul(a, b) => a.lower_multi(d)?.mul(&b.lower_multi(d)?),
            Expr::Neg(a) => a.lower_multi(d)?.neg(),
            Expr::Pow(a, e) => a.lower_multi(d)?.pow(*e),
            Expr::Exp(_, pos) => {
                return Err(Error::UnknownIdentifier {
                    name: "exp".into(),
                    position: *pos,
                })
            }
        })
    }

    fn lower_exppoly(&self) -> Result<ExpPoly> {
        let b = Backend::Exact;
        Ok(match self {
            Expr::Num(c) => ExpPoly::constant(Scalar::Exact(c.clone())),
            Expr::T => ExpPoly::term(Poly1::monomial(Scalar::one(b), 1), Scalar::zero(b)),
            Expr::X(k, pos) => {
                return Err(Error::UnknownIdentifier {
                    name: format!("x{k}"),
                    position: *pos,
                })
            }
            Expr::Add(x, y) => x.lower_exppoly()?.add(&y.lower_exppoly()?)?,
            Expr::Sub(x, y) => x.lower_exppoly()?.sub(&y.lower_exppoly()?)?,
            Expr::Mul(x, y) => x.lower_exppoly()?.mul(&y.lower_exppoly()?)?,
            Expr::Neg(x) => x.lower_exppoly()?.neg(),
            Expr::Pow(x, e) => {
                let base = x.lower_exppoly()?;
                let mut acc = ExpPoly::constant(Scalar::one(b));
                for _ in 0..*e {
                    acc = acc.mul(&base)?;
                }
                acc
            }
            Expr::Exp(arg, pos) => {
                let a = arg.lower_exppoly()?;
                let lambda = linear_rate(&a)
                    .ok_or_else(|| syntax(*pos, "exp argument must have the form c*t with a constant c"))?;
                ExpPoly::exp(lambda)
            }
        })
    }
}

/// `c` when `a = c t` exactly.
fn linear_rate(a: &ExpPoly) -> Option<Scalar> {
    match a.terms() {
        [] => Some(Scalar::zero(Backend::Exact)),
        [term] if term.exponent.is_zero() && term.poly.degree() == Some(1) && term.poly.coeff(0).is_zero() => {
            Some(term.poly.coeff(1))
        }
        _ => None,
    }
}

/// Parse an operator in `t` and `x1..xd`. With `d = None` the dimension is
/// the highest `x` index mentioned.
pub fn parse_operator(src: &str, d: Option<usize>) -> Result<MultiPoly> {
    let e = parse_expr(src)?;
    let d = d.unwrap_or_else(|| e.max_x());
    e.lower_multi(d)
}

pub fn print_operator(p: &MultiPoly) -> String {
    p.to_string()
}

/// Parse a constant (no `t`, no `x`).
pub fn parse_scalar(src: &str) -> Result<GaussRat> {
    let p = parse_operator(src, Some(0))?;
    match p.tdegree() {
        Err(_) => Ok(GaussRat::zero()),
        Ok(0) => p
            .tcoeff(0)
            .as_constant()
            .ok_or_else(|| syntax(0, "expected a constant")),
        Ok(_) => Err(syntax(0, "expected a constant, found a polynomial in t")),
    }
}

/// Parse `Σ q_j(t) exp(c_j t)`; exact literals are converted to `backend`.
pub fn parse_exppoly(src: &str, backend: Backend) -> Result<ExpPoly> {
    parse_expr(src)?.lower_exppoly()?.to_backend(backend)
}

/// Parse `[left] <u> [right] <v> [comb] c0, c1, ...`. Any section may be
/// omitted; a bare exponential polynomial denotes the regular distribution.
pub fn parse_distribution(src: &str, backend: Backend) -> Result<Distribution> {
    let trimmed = src.trim();
    if !trimmed.starts_with('[') {
        return Ok(Distribution::regular(&parse_exppoly(trimmed, backend)?));
    }
    let mut left = ExpPoly::zero(backend);
    let mut right = ExpPoly::zero(backend);
    let mut comb = DeltaComb::zero(backend);
    let mut rest = trimmed;
    let mut offset = src.len() - src.trim_start().len();
    while !rest.is_empty() {
        let close = rest
            .find(']')
            .ok_or_else(|| syntax(offset, "unterminated section marker"))?;
        let tag = rest[1..close].trim().to_string();
        let after = &rest[close + 1..];
        let end = after.find('[').unwrap_or(after.len());
        let body = &after[..end];
        let body_at = offset + close + 1;
        let located = |e: Error| match e {
            Error::Syntax { position, message } => Error::Syntax {
                position: position + body_at,
                message,
            },
            other => other,
        };
        match tag.as_str() {
            "left" => left = parse_exppoly(body, backend).map_err(located)?,
            "right" => right = parse_exppoly(body, backend).map_err(located)?,
            "comb" => {
                let coeffs = if body.trim() == "0" {
                    Vec::new()
                } else {
                    body.split(',')
                        .map(|c| Ok(Scalar::from_gauss(parse_scalar(c).map_err(located)?, backend)))
                        .collect::<Result<Vec<_>>>()?
                };
                comb = DeltaComb::new(backend, coeffs)?;
            }
            other => return Err(syntax(offset + 1, format!("unknown section `[{other}]`"))),
        }
        offset += close + 1 + end;
        rest = &after[end..];
    }
    Distribution::new(ConcatFunction::new(left, right)?, comb)
}

/// Test function specs: `bump(a)`, `window(k, a, plateau)` and
/// `polywindow([c0, c1, ...], a, plateau)`, optionally followed by `^(m)`
/// for the m-th derivative.
pub fn parse_testfn(src: &str) -> Result<TestFunction> {
    let s = src.trim();
    let (body, order) = match s.rfind("^(") {
        Some(at) if s.ends_with(')') => {
            let m = s[at + 2..s.len() - 1]
                .trim()
                .parse::<usize>()
                .map_err(|_| syntax(at + 2, "derivative order must be a nonnegative integer"))?;
            (&s[..at], m)
        }
        _ => (s, 0),
    };
    let open = body.find('(').ok_or_else(|| syntax(0, "expected `name(arguments)`"))?;
    if !body.ends_with(')') {
        return Err(syntax(body.len(), "expected `)`"));
    }
    let name = body[..open].trim();
    let inner = &body[open + 1..body.len() - 1];
    let real = |txt: &str| -> Result<BigRational> {
        let g = parse_scalar(txt)?;
        if g.is_real() {
            Ok(g.re)
        } else {
            Err(Error::InvalidArgument(format!("`{}` must be real", txt.trim())))
        }
    };
    let phi = match name {
        "bump" => TestFunction::bump(real(inner)?)?,
        "window" => {
            let args: Vec<&str> = inner.split(',').collect();
            if args.len() != 3 {
                return Err(Error::InvalidArgument("window takes (k, a, plateau)".into()));
            }
            let k: u32 = args[0]
                .trim()
                .parse()
                .map_err(|_| Error::InvalidArgument("window order must be a nonnegative integer".into()))?;
            TestFunction::monomial_window(k, real(args[1])?, real(args[2])?)?
        }
        "polywindow" => {
            let lb = inner.find('[').ok_or_else(|| syntax(open + 1, "expected `[`"))?;
            let rb = inner.find(']').ok_or_else(|| syntax(open + 1, "expected `]`"))?;
            let coeffs = inner[lb + 1..rb]
                .split(',')
                .filter(|c| !c.trim().is_empty())
                .map(real)
                .collect::<Result<Vec<_>>>()?;
            let args: Vec<&str> = inner[rb + 1..]
                .split(',')
                .map(str::trim)
                .filter(|a| !a.is_empty())
                .collect();
            if args.len() != 2 {
                return Err(Error::InvalidArgument(
                    "polywindow takes ([c0, ...], a, plateau)".into(),
                ));
            }
            TestFunction::polynomial_window(&coeffs, real(args[0])?, real(args[1])?)?
        }
        other => {
            return Err(Error::UnknownIdentifier {
                name: other.to_string(),
                position: 0,
            })
        }
    };
    Ok(phi.derive(order))
}

/// Convenience used by the command line: `v1,v2,...` as rationals.
pub fn parse_xi(src: &str) -> Result<Vec<GaussRat>> {
    if src.trim().is_empty() {
        return Ok(Vec::new());
    }
    src.split(',').map(parse_scalar).collect()
}
