//! Decision and certificates for `p(d/dt)`: is every concatenation of two
//! classical solutions matching at `t = 0` again a distributional solution?
//!
//! Degree one: yes. Degree at least two: no, witnessed by a concrete pair
//! whose residual is a nonzero comb of deltas at the origin.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::distribution::{witness_pair, ConcatKind, Distribution};
use crate::error::{Error, Result};
use crate::exppoly::ExpPoly;
use crate::oracle::{adjoint_pair_derivative, pair, PairOptions, QuadratureResult, TestFunction};
use crate::poly::PolyOperator;
use crate::roots::{roots, RootMode};
use crate::scalar::{rat, Backend, FloatCtx, GaussRat, Scalar};

#[allow(clippy::large_enum_variant)]
#[derive(Clone, Debug, PartialEq)]
pub enum Certificate {
    /// `deg p = 1`; every solution is a multiple of `e^{λt}`.
    Closure { lambda: Scalar },
    Counterexample {
        kind: ConcatKind,
        lambda: Scalar,
        mu: Option<Scalar>,
        u1: ExpPoly,
        u2: ExpPoly,
        /// `p(d/dt) T_{u1 ⊕ u2}`.
        residual: Distribution,
    },
}

impl Certificate {
    pub fn backend(&self) -> Backend {
        match self {
            Certificate::Closure { lambda } => lambda.backend(),
            Certificate::Counterexample { lambda, .. } => lambda.backend(),
        }
    }

    pub fn is_closure(&self) -> bool {
        matches!(self, Certificate::Closure { .. })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct CertOptions {
    pub ctx: FloatCtx,
    /// Fall back to bigfloat roots when `p` does not split over `Q(i)`.
    pub allow_numeric: bool,
}

impl Default for CertOptions {
    fn default() -> Self {
        Self {
            ctx: FloatCtx::default(),
            allow_numeric: true,
        }
    }
}

/// `true` iff `S_p` is closed under concatenation, i.e. `deg p = 1`.
pub fn decide_ode(p: &PolyOperator) -> Result<bool> {
    match p.degree() {
        None => Err(Error::ZeroPolynomial),
        Some(0) => Err(Error::ConstantPolynomial),
        Some(n) => Ok(n == 1),
    }
}

pub fn certificate_ode(p: &PolyOperator) -> Result<Certificate> {
    certificate_ode_with(p, &CertOptions::default())
}

pub fn certificate_ode_with(p: &PolyOperator, opts: &CertOptions) -> Result<Certificate> {
    let n = match p.degree() {
        None => return Err(Error::ZeroPolynomial),
        Some(0) => return Err(Error::ConstantPolynomial),
        Some(n) => n,
    };
    if n == 1 {
        let lambda = (-&p.coeff(0))
            .checked_div(&p.coeff(1))
            .expect("nonzero leading coefficient");
        return Ok(Certificate::Closure { lambda });
    }

    let (op, rs) = if p.backend().is_exact() {
        match roots(p, RootMode::ExactRequired, opts.ctx) {
            Ok(rs) => (p.clone(), rs),
            Err(Error::ExactFactorizationUnavailable) if opts.allow_numeric => {
                let fp = p.to_backend(Backend::Float(opts.ctx))?;
                let rs = roots(&fp, RootMode::Numeric, opts.ctx)?;
                (fp, rs)
            }
            Err(e) => return Err(e),
        }
    } else {
        let ctx = p.backend().float_ctx().expect("float backend");
        (p.clone(), roots(p, RootMode::Numeric, ctx)?)
    };

    let (kind, lambda, mu) = select_pair(&rs, op.backend().is_exact());
    let (u1, u2) = witness_pair(kind, &lambda, mu.as_ref())?;
    let residual = Distribution::from_concat(&u1, &u2, true)?.apply_op(&op)?;
    Ok(Certificate::Counterexample {
        kind,
        lambda,
        mu,
        u1,
        u2,
        residual,
    })
}

/// Prefer the first repeated root; otherwise the first two roots (exact) or
/// the pair farthest apart (bigfloat, for conditioning).
fn select_pair(rs: &[(Scalar, usize)], exact: bool) -> (ConcatKind, Scalar, Option<Scalar>) {
    if let Some((r, _)) = rs.iter().find(|(_, m)| *m >= 2) {
        return (ConcatKind::Repeated, r.clone(), None);
    }
    if exact {
        return (ConcatKind::Distinct, rs[0].0.clone(), Some(rs[1].0.clone()));
    }
    let mut best = (0, 1);
    let mut best_d = -1.0f64;
    for i in 0..rs.len() {
        for j in (i + 1)..rs.len() {
            let d = (&rs[i].0 - &rs[j].0).abs_f64();
            if d > best_d {
                best_d = d;
                best = (i, j);
            }
        }
    }
    (ConcatKind::Distinct, rs[best.0].0.clone(), Some(rs[best.1].0.clone()))
}

// ---------------------------------------------------------------------------
// Verification
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    Inconclusive,
}

impl CheckStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "fail",
            CheckStatus::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub status: CheckStatus,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn push(&mut self, name: impl Into<String>, ok: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            status: if ok { CheckStatus::Pass } else { CheckStatus::Fail },
            detail: detail.into(),
        });
    }

    pub fn push_status(&mut self, name: impl Into<String>, status: CheckStatus, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            status,
            detail: detail.into(),
        });
    }

    pub fn extend_prefixed(&mut self, prefix: &str, other: Report) {
        for mut c in other.checks {
            c.name = format!("{prefix}{}", c.name);
            self.checks.push(c);
        }
    }

    pub fn verdict(&self) -> CheckStatus {
        if self.checks.iter().any(|c| c.status == CheckStatus::Fail) {
            CheckStatus::Fail
        } else if self.checks.iter().any(|c| c.status == CheckStatus::Inconclusive) {
            CheckStatus::Inconclusive
        } else {
            CheckStatus::Pass
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict() == CheckStatus::Pass
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{:<13} {}  {}", c.status.as_str(), c.name, c.detail)?;
        }
        write!(f, "verdict: {}", self.verdict().as_str())
    }
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    /// Pair the residual against test functions as an independent check.
    pub numeric_crosscheck: bool,
    pub pairing: PairOptions,
    /// Agreement required between symbolic and numeric values, relative to `1 + |value|`.
    pub pair_tol: f64,
    /// Bigfloat combs below this (relative to the largest `|a_k|`) are not
    /// distinguishable from zero.
    pub nonzero_threshold: f64,
    pub window_radius: BigRational,
    pub window_plateau: BigRational,
    /// Run one adjoint quadrature per comb coefficient instead of a single
    /// one against a combined window.
    pub adjoint_per_coefficient: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            numeric_crosscheck: false,
            pairing: PairOptions::default(),
            pair_tol: 1e-9,
            nonzero_threshold: 1e-20,
            window_radius: rat(1, 1),
            window_plateau: rat(1, 2),
            adjoint_per_coefficient: false,
        }
    }
}

impl VerifyOptions {
    pub fn with_crosscheck() -> Self {
        Self {
            numeric_crosscheck: true,
            ..Self::default()
        }
    }
}

pub fn verify_certificate(cert: &Certificate, p: &PolyOperator, numeric_crosscheck: bool) -> Report {
    let opts = VerifyOptions {
        numeric_crosscheck,
        ..VerifyOptions::default()
    };
    verify_certificate_with(cert, p, &opts)
}

pub fn verify_certificate_with(cert: &Certificate, p: &PolyOperator, opts: &VerifyOptions) -> Report {
    let mut report = Report::default();
    let backend = cert.backend();
    let op = match p.to_backend(backend) {
        Ok(op) => op,
        Err(e) => {
            report.push("backend", false, e.to_string());
            return report;
        }
    };
    let n = op.degree().unwrap_or(0);
    match cert {
        Certificate::Closure { lambda } => verify_closure(&mut report, &op, n, lambda, opts),
        Certificate::Counterexample {
            kind,
            lambda,
            mu,
            u1,
            u2,
            residual,
        } => verify_counterexample(&mut report, &op, n, *kind, lambda, mu.as_ref(), u1, u2, residual, opts),
    }
    report
}

fn verify_closure(report: &mut Report, op: &PolyOperator, n: usize, lambda: &Scalar, opts: &VerifyOptions) {
    report.push("operator_degree", n == 1, format!("degree {n}"));
    if n != 1 {
        return;
    }
    let expected = (-&op.coeff(0)).checked_div(&op.coeff(1)).expect("degree one");
    report.push(
        "lambda",
        *lambda == expected,
        format!("λ = {lambda}, -a0/a1 = {expected}"),
    );
    let e = ExpPoly::exp(lambda.clone());
    let annihilated = e.apply_op(op).map(|r| r.is_zero()).unwrap_or(false);
    report.push("basis_in_solution_set", annihilated, "p(D) e^{λt} = 0");
    // Two matched solutions c e^{λt} agree, so their concatenation is c e^{λt}.
    let b = op.backend();
    let c = Scalar::from_gauss(crate::scalar::GaussRat::new(rat(3, 2), rat(-1, 1)), b);
    let u = e.scale(&c).expect("same backend");
    let concat = Distribution::from_concat(&u, &u, true).and_then(|d| d.apply_op(op));
    match concat {
        Ok(r) => report.push("matched_pair_residual_zero", r.is_zero(), format!("residual {r}")),
        Err(err) => report.push("matched_pair_residual_zero", false, err.to_string()),
    }
    if opts.numeric_crosscheck {
        let d = Distribution::from_concat(&u, &u, true).expect("matched");
        let phi = TestFunction::bump(opts.window_radius.clone()).expect("positive radius");
        match adjoint_pair_derivative(&d, op, &phi, &opts.pairing) {
            Ok(q) => {
                let v = q.value.abs_f64();
                report.push(
                    "numeric_adjoint_zero",
                    v < opts.pair_tol,
                    format!("|⟨T, p(-D)φ⟩| = {v:e}"),
                );
            }
            Err(e) => report.push_status("numeric_adjoint_zero", CheckStatus::Inconclusive, e.to_string()),
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn verify_counterexample(
    report: &mut Report,
    op: &PolyOperator,
    n: usize,
    kind: ConcatKind,
    lambda: &Scalar,
    mu: Option<&Scalar>,
    u1: &ExpPoly,
    u2: &ExpPoly,
    residual: &Distribution,
    opts: &VerifyOptions,
) {
    report.push("operator_degree", n >= 2, format!("degree {n}"));
    if n < 2 {
        return;
    }
    let backend = op.backend();
    let consistent = [u1.backend(), u2.backend(), residual.backend()]
        .iter()
        .all(|b| *b == backend);
    report.push("backend", consistent, backend.to_string());
    if !consistent {
        return;
    }

    // Witness shape.
    match witness_pair(kind, lambda, mu) {
        Ok((w1, w2)) => report.push(
            "witness_shape",
            &w1 == u1 && &w2 == u2,
            format!(
                "{} pair at λ = {lambda}{}",
                kind.as_str(),
                mu.map(|m| format!(", μ = {m}")).unwrap_or_default()
            ),
        ),
        Err(e) => report.push("witness_shape", false, e.to_string()),
    }
    let root_ok = match kind {
        ConcatKind::Repeated => {
            let d = PolyOperator::new(op.poly().derive());
            op.eval(lambda).is_zero() && d.eval(lambda).is_zero()
        }
        ConcatKind::Distinct => op.eval(lambda).is_zero() && mu.is_some_and(|m| op.eval(m).is_zero() && m != lambda),
    };
    report.push("roots", root_ok, format!("p vanishes at the {} root(s)", kind.as_str()));

    for (name, u) in [("u1_solves", u1), ("u2_solves", u2)] {
        let ok = u.apply_op(op).map(|r| r.is_zero()).unwrap_or(false);
        report.push(name, ok, format!("p(D) ({u}) = 0"));
    }
    let (v1, v2) = (u1.value_at_zero(), u2.value_at_zero());
    report.push("match_at_origin", v1 == v2, format!("u1(0) = {v1}, u2(0) = {v2}"));

    let recomputed = Distribution::from_concat(u1, u2, false).and_then(|d| d.apply_op(op));
    match &recomputed {
        Ok(r) => report.push("residual_recomputed", r == residual, format!("{r}")),
        Err(e) => report.push("residual_recomputed", false, e.to_string()),
    }
    report.push(
        "residual_regular_zero",
        residual.restrict_punctured().is_zero(),
        "p(D) T vanishes away from the origin",
    );

    let comb = &residual.singular;
    let scale = op.coeffs().iter().map(Scalar::abs_f64).fold(0.0f64, f64::max);
    if backend.is_exact() {
        report.push("comb_nonzero", !comb.is_zero(), format!("order {:?}", comb.order()));
    } else {
        let largest = comb.coeffs().iter().map(Scalar::abs_f64).fold(0.0f64, f64::max);
        let status = if largest > opts.nonzero_threshold * scale {
            CheckStatus::Pass
        } else {
            CheckStatus::Inconclusive
        };
        report.push_status(
            "comb_nonzero",
            status,
            format!(
                "max |c_k| = {largest:e}, threshold {:e}",
                opts.nonzero_threshold * scale
            ),
        );
    }

    // Leading comb coefficient: a_n (μ - λ) for distinct roots, a_n when repeated.
    let an = op.leading().cloned().expect("degree >= 2");
    let expected_top = match kind {
        ConcatKind::Repeated => an.clone(),
        ConcatKind::Distinct => &an * &(&mu.cloned().unwrap_or_else(|| lambda.clone()) - lambda),
    };
    let top = comb.coeff(n - 2);
    report.push(
        "top_coefficient",
        top == expected_top && comb.order() == Some(n - 2),
        format!("coefficient of δ^({}) is {top}, expected {expected_top}", n - 2),
    );

    if opts.numeric_crosscheck {
        numeric_checks(report, op, u1, u2, residual, opts);
    }
}

/// Weight given to `δ^{(j)}` in the combined adjoint check.
fn combined_weight(j: usize) -> BigRational {
    rat(j as i64 + 1, 1)
}

/// Numerical cross-checks of the comb. Each coefficient is recovered by
/// pairing the residual with a monomial window. The concatenation itself is
/// paired with the adjoint operator applied to one window whose Taylor
/// coefficients at the origin are [`combined_weight`], and the result is
/// compared with the same combination of the symbolic coefficients; with
/// `adjoint_per_coefficient` every coefficient gets its own adjoint quadrature.
fn numeric_checks(
    report: &mut Report,
    op: &PolyOperator,
    u1: &ExpPoly,
    u2: &ExpPoly,
    residual: &Distribution,
    opts: &VerifyOptions,
) {
    let concat = Distribution::from_concat(u1, u2, false).expect("checked backend");
    let order = residual.singular.order().unwrap_or(0);
    let compare = |report: &mut Report, label: String, got: Result<QuadratureResult>, sign: f64, want: (f64, f64)| {
        let (cr, ci) = want;
        match got {
            Ok(q) => {
                let (vr, vi) = q.value.to_f64();
                let (vr, vi) = (sign * vr, sign * vi);
                let diff = (vr - cr).hypot(vi - ci);
                let ok = diff < opts.pair_tol * (1.0 + cr.hypot(ci));
                report.push(
                    label,
                    ok,
                    format!("recovered ({vr:.12e}, {vi:.12e}), |diff| = {diff:e}"),
                );
            }
            Err(e) => report.push_status(label, CheckStatus::Inconclusive, e.to_string()),
        }
    };
    let window =
        |j: usize| TestFunction::monomial_window(j as u32, opts.window_radius.clone(), opts.window_plateau.clone());
    for j in 0..=order {
        let phi = match window(j) {
            Ok(phi) => phi,
            Err(e) => {
                report.push(format!("numeric_window[{j}]"), false, e.to_string());
                continue;
            }
        };
        let want = residual.singular.coeff(j).to_f64();
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        compare(
            report,
            format!("numeric_comb[{j}]"),
            pair(residual, &phi, &opts.pairing),
            sign,
            want,
        );
        if opts.adjoint_per_coefficient {
            let got = adjoint_pair_derivative(&concat, op, &phi, &opts.pairing);
            compare(report, format!("adjoint_comb[{j}]"), got, sign, want);
        }
    }
    if opts.adjoint_per_coefficient {
        return;
    }
    // ⟨Σ c_j δ^{(j)}, ψ⟩ = Σ c_j (-1)^j ψ^{(j)}(0), with ψ^{(j)}(0) = w_j j!
    // for the plateau polynomial Σ w_j t^j / j!.
    let mut coeffs = Vec::with_capacity(order + 1);
    let mut want = Scalar::zero(residual.backend());
    let mut fact = BigInt::one();
    for j in 0..=order {
        if j > 1 {
            fact *= j;
        }
        let w = combined_weight(j);
        coeffs.push(&w / BigRational::from_integer(fact.clone()));
        let mut term = &residual.singular.coeff(j) * &Scalar::from_gauss(GaussRat::real(w), residual.backend());
        if j % 2 == 1 {
            term = -&term;
        }
        want = &want + &term;
    }
    let label = "adjoint_comb_combined".to_string();
    match TestFunction::polynomial_window(&coeffs, opts.window_radius.clone(), opts.window_plateau.clone()) {
        Ok(psi) => {
            let got = adjoint_pair_derivative(&concat, op, &psi, &opts.pairing);
            compare(report, label, got, 1.0, want.to_f64());
        }
        Err(e) => report.push(label, false, e.to_string()),
    }
}
