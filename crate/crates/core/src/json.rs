//! Certificate JSON, schema `concat-cert/1`. Every number is a string so that
//! arbitrary precision survives readers that use 64-bit floats.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::distribution::{ConcatKind, DeltaComb, Distribution};
use crate::error::{Error, Result};
use crate::ode::{Certificate, Check};
use crate::pde::{Mode, PlaneWaveCertificate};
use crate::poly::PolyOperator;
use crate::scalar::{fmt_big, rat_to_big, Backend, BigComplex, FloatCtx, GaussRat, Scalar};
use crate::text::{parse_exppoly, parse_scalar};

pub const SCHEMA: &str = "concat-cert/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BigFloatJson {
    pub re: String,
    pub im: String,
    pub precision: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarJson {
    Exact {
        num_re: String,
        den_re: String,
        num_im: String,
        den_im: String,
    },
    Float {
        bigfloat: BigFloatJson,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorJson {
    /// Descending text form, for people.
    pub text: String,
    /// `a_0, a_1, ...`.
    pub coeffs: Vec<ScalarJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckJson {
    pub name: String,
    pub status: String,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateJson {
    pub schema: String,
    /// The operator in `t` and `x1..xd` as given.
    pub operator: String,
    pub dimension: String,
    pub xi: Vec<ScalarJson>,
    pub mode: String,
    pub backend: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<String>,
    pub variant: String,
    /// The specialized ODE operator.
    pub p: OperatorJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    pub lambda: ScalarJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<ScalarJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u1: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u2: Option<String>,
    pub residual_comb: Vec<ScalarJson>,
    #[serde(default)]
    pub checks: Vec<CheckJson>,
}

fn malformed(msg: impl Into<String>) -> Error {
    Error::MalformedCertificate(msg.into())
}

pub fn scalar_to_json(s: &Scalar) -> ScalarJson {
    match s {
        Scalar::Exact(g) => ScalarJson::Exact {
            num_re: g.re.numer().to_string(),
            den_re: g.re.denom().to_string(),
            num_im: g.im.numer().to_string(),
            den_im: g.im.denom().to_string(),
        },
        Scalar::Float(z, ctx) => ScalarJson::Float {
            bigfloat: BigFloatJson {
                re: fmt_big(&z.re),
                im: fmt_big(&z.im),
                precision: ctx.precision.to_string(),
            },
        },
    }
}

fn rational(num: &str, den: &str) -> Result<BigRational> {
    let n: BigInt = num
        .trim()
        .parse()
        .map_err(|_| malformed(format!("bad integer `{num}`")))?;
    let d: BigInt = den
        .trim()
        .parse()
        .map_err(|_| malformed(format!("bad integer `{den}`")))?;
    if d == BigInt::from(0) {
        return Err(malformed("zero denominator"));
    }
    Ok(BigRational::new(n, d))
}

fn decimal(s: &str) -> Result<BigRational> {
    let g = parse_scalar(s).map_err(|e| malformed(format!("bad number `{s}`: {e}")))?;
    if !g.is_real() {
        return Err(malformed(format!("expected a real number, got `{s}`")));
    }
    Ok(g.re)
}

pub fn scalar_from_json(j: &ScalarJson, backend: Backend) -> Result<Scalar> {
    match j {
        ScalarJson::Exact {
            num_re,
            den_re,
            num_im,
            den_im,
        } => {
            let g = GaussRat::new(rational(num_re, den_re)?, rational(num_im, den_im)?);
            Ok(Scalar::from_gauss(g, backend))
        }
        ScalarJson::Float { bigfloat } => {
            let Backend::Float(ctx) = backend else {
                return Err(malformed("bigfloat scalar in an exact certificate"));
            };
            let p = ctx.precision;
            let z = BigComplex::new(
                rat_to_big(&decimal(&bigfloat.re)?, p),
                rat_to_big(&decimal(&bigfloat.im)?, p),
            );
            Ok(Scalar::Float(z, ctx))
        }
    }
}

fn gauss_from_json(j: &ScalarJson) -> Result<GaussRat> {
    match scalar_from_json(j, Backend::Exact)? {
        Scalar::Exact(g) => Ok(g),
        Scalar::Float(..) => Err(malformed("expected an exact scalar")),
    }
}

fn operator_to_json(p: &PolyOperator) -> OperatorJson {
    OperatorJson {
        text: p.to_string(),
        coeffs: p.coeffs().iter().map(scalar_to_json).collect(),
    }
}

fn operator_from_json(j: &OperatorJson) -> Result<PolyOperator> {
    let coeffs = j.coeffs.iter().map(gauss_from_json).collect::<Result<Vec<_>>>()?;
    PolyOperator::from_coeffs(Backend::Exact, coeffs.into_iter().map(Scalar::Exact).collect())
}

pub fn checks_to_json(checks: &[Check]) -> Vec<CheckJson> {
    checks
        .iter()
        .map(|c| CheckJson {
            name: c.name.clone(),
            status: c.status.as_str().to_string(),
            detail: c.detail.clone(),
        })
        .collect()
}

/// Serializable form of a certificate for the operator with text `operator`.
pub fn certificate_to_json(cert: &PlaneWaveCertificate, operator: &str, checks: &[Check]) -> CertificateJson {
    let backend = cert.base.backend();
    let (backend_name, precision, eps) = match backend {
        Backend::Exact => ("exact", None, None),
        Backend::Float(ctx) => (
            "bigfloat",
            Some(ctx.precision.to_string()),
            Some(format!("{:e}", ctx.eps)),
        ),
    };
    let mut out = CertificateJson {
        schema: SCHEMA.into(),
        operator: operator.into(),
        dimension: cert.xi.len().to_string(),
        xi: cert
            .xi
            .iter()
            .map(|x| scalar_to_json(&Scalar::Exact(x.clone())))
            .collect(),
        mode: cert.mode.as_str().into(),
        backend: backend_name.into(),
        precision,
        eps,
        variant: String::new(),
        p: operator_to_json(&cert.specialized),
        kind: None,
        lambda: scalar_to_json(&Scalar::zero(backend)),
        mu: None,
        u1: None,
        u2: None,
        residual_comb: Vec::new(),
        checks: checks_to_json(checks),
    };
    match &cert.base {
        Certificate::Closure { lambda } => {
            out.variant = "closure".into();
            out.lambda = scalar_to_json(lambda);
        }
        Certificate::Counterexample {
            kind,
            lambda,
            mu,
            u1,
            u2,
            residual,
        } => {
            out.variant = "counterexample".into();
            out.kind = Some(kind.as_str().into());
            out.lambda = scalar_to_json(lambda);
            out.mu = mu.as_ref().map(scalar_to_json);
            out.u1 = Some(u1.to_string());
            out.u2 = Some(u2.to_string());
            out.residual_comb = residual.singular.coeffs().iter().map(scalar_to_json).collect();
        }
    }
    out
}

pub fn certificate_from_json(j: &CertificateJson) -> Result<PlaneWaveCertificate> {
    if j.schema != SCHEMA {
        return Err(malformed(format!("unsupported schema `{}`", j.schema)));
    }
    let backend = match j.backend.as_str() {
        "exact" => Backend::Exact,
        "bigfloat" => {
            let precision = j
                .precision
                .as_deref()
                .ok_or_else(|| malformed("bigfloat certificate without precision"))?
                .parse::<usize>()
                .map_err(|_| malformed("bad precision"))?;
            let eps = j
                .eps
                .as_deref()
                .ok_or_else(|| malformed("bigfloat certificate without eps"))?
                .parse::<f64>()
                .map_err(|_| malformed("bad eps"))?;
            Backend::Float(FloatCtx::new(precision, eps)?)
        }
        other => return Err(malformed(format!("unknown backend `{other}`"))),
    };
    let mode = Mode::parse(&j.mode).ok_or_else(|| malformed(format!("unknown mode `{}`", j.mode)))?;
    let xi = j.xi.iter().map(gauss_from_json).collect::<Result<Vec<_>>>()?;
    let specialized = operator_from_json(&j.p)?;
    let lambda = scalar_from_json(&j.lambda, backend)?;
    let base = match j.variant.as_str() {
        "closure" => Certificate::Closure { lambda },
        "counterexample" => {
            let kind = j
                .kind
                .as_deref()
                .and_then(ConcatKind::parse)
                .ok_or_else(|| malformed("missing or unknown kind"))?;
            let mu = j.mu.as_ref().map(|m| scalar_from_json(m, backend)).transpose()?;
            let text = |f: &Option<String>, name: &str| -> Result<_> {
                let s = f.as_deref().ok_or_else(|| malformed(format!("missing {name}")))?;
                parse_exppoly(s, backend).map_err(|e| malformed(format!("{name}: {e}")))
            };
            let comb = j
                .residual_comb
                .iter()
                .map(|c| scalar_from_json(c, backend))
                .collect::<Result<Vec<_>>>()?;
            Certificate::Counterexample {
                kind,
                lambda,
                mu,
                u1: text(&j.u1, "u1")?,
                u2: text(&j.u2, "u2")?,
                residual: Distribution::comb(DeltaComb::new(backend, comb)?),
            }
        }
        other => return Err(malformed(format!("unknown variant `{other}`"))),
    };
    Ok(PlaneWaveCertificate {
        xi,
        mode,
        base,
        specialized,
    })
}

pub fn to_string_pretty(j: &CertificateJson) -> String {
    serde_json::to_string_pretty(j).expect("certificate serializes")
}

pub fn from_str(s: &str) -> Result<CertificateJson> {
    Ok(serde_json::from_str(s)?)
}
