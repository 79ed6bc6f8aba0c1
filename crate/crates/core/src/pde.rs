//! Operators in `t` and `x1..xd`: the decision reduces to the t-degree, and
//! certificates come from plane waves `ũ(t) e^{ξ·x}` (or `e^{iξ·x}`), which
//! turn `p` into the ODE operator `p_ξ`.

use std::fmt;

use crate::distribution::Distribution;
use crate::error::{Error, Result};
use crate::multipoly::{MultiPoly, SparsePoly};
use crate::ode::{certificate_ode_with, verify_certificate_with, CertOptions, Certificate, Report, VerifyOptions};
use crate::poly::PolyOperator;
use crate::scalar::{Backend, GaussRat, Scalar};

/// Which spatial factor the plane waves carry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Mode {
    /// `e^{ξ·x}`: coefficients are evaluated at `ξ`.
    #[default]
    Growing,
    /// `e^{iξ·x}`: coefficients are evaluated at `iξ`.
    Oscillatory,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Growing => "growing",
            Mode::Oscillatory => "oscillatory",
        }
    }

    pub fn parse(s: &str) -> Option<Mode> {
        match s {
            "growing" => Some(Mode::Growing),
            "oscillatory" => Some(Mode::Oscillatory),
            _ => None,
        }
    }

    /// The point at which the spatial coefficients are evaluated.
    pub fn substitution(&self, xi: &[GaussRat]) -> Vec<GaussRat> {
        match self {
            Mode::Growing => xi.to_vec(),
            Mode::Oscillatory => xi.iter().map(|x| x * &GaussRat::i()).collect(),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn tdegree(p: &MultiPoly) -> Result<usize> {
    p.tdegree()
}

/// `true` iff concatenation preserves solutions, i.e. the t-degree is one.
pub fn decide_pde(p: &MultiPoly) -> Result<bool> {
    match p.tdegree()? {
        0 => Err(Error::TDegreeZero),
        n => Ok(n == 1),
    }
}

/// First grid point of `{0..D}^d` (lex order, `x1` slowest) where the leading
/// coefficient does not vanish, `D` being its largest single-variable degree.
/// A nonzero polynomial of per-variable degree at most `D` cannot vanish on
/// the whole grid, so the scan always succeeds.
pub fn witness_xi(p: &MultiPoly, mode: Mode) -> Result<Vec<GaussRat>> {
    let an = p.leading().ok_or(Error::ZeroPolynomial)?;
    let d = p.dim();
    let top = an.max_var_degree();
    let mut xi = vec![0u32; d];
    loop {
        let point: Vec<GaussRat> = xi.iter().map(|&v| GaussRat::from_i64(v as i64)).collect();
        if !an.eval(&mode.substitution(&point))?.is_zero() {
            return Ok(point);
        }
        // Odometer with the last coordinate fastest.
        let mut j = d;
        loop {
            if j == 0 {
                unreachable!("a nonzero polynomial cannot vanish on the whole grid");
            }
            j -= 1;
            if xi[j] < top {
                xi[j] += 1;
                break;
            }
            xi[j] = 0;
        }
    }
}

/// `p_ξ = Σ_k a_k(ξ) t^k`, or `a_k(iξ)` in oscillatory mode.
pub fn specialize(p: &MultiPoly, xi: &[GaussRat], mode: Mode) -> Result<PolyOperator> {
    if xi.len() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            got: xi.len(),
        });
    }
    let point = mode.substitution(xi);
    let coeffs = p
        .tcoeffs()
        .iter()
        .map(|a| Ok(Scalar::Exact(a.eval(&point)?)))
        .collect::<Result<Vec<_>>>()?;
    PolyOperator::from_coeffs(Backend::Exact, coeffs)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlaneWaveCertificate {
    pub xi: Vec<GaussRat>,
    pub mode: Mode,
    /// Certificate for the specialized operator. The lifted pair is
    /// `(u1 e^{ξ·x}, u2 e^{ξ·x})` with residual `comb ⊗ e^{ξ·x}`.
    pub base: Certificate,
    pub specialized: PolyOperator,
}

impl PlaneWaveCertificate {
    pub fn is_closure(&self) -> bool {
        self.base.is_closure()
    }
}

pub fn certificate_pde(
    p: &MultiPoly,
    mode: Mode,
    xi_override: Option<Vec<GaussRat>>,
    opts: &CertOptions,
) -> Result<PlaneWaveCertificate> {
    if p.tdegree()? == 0 {
        return Err(Error::TDegreeZero);
    }
    let xi = match xi_override {
        Some(xi) => {
            if xi.len() != p.dim() {
                return Err(Error::DimensionMismatch {
                    expected: p.dim(),
                    got: xi.len(),
                });
            }
            if xi.iter().any(|x| !x.is_real()) {
                return Err(Error::InvalidArgument("ξ must be real".into()));
            }
            xi
        }
        None => witness_xi(p, mode)?,
    };
    let specialized = specialize(p, &xi, mode)?;
    if specialized.degree() != Some(p.tdegree()?) {
        return Err(Error::InvalidArgument(format!(
            "leading coefficient vanishes at ξ = ({})",
            xi.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
        )));
    }
    let base = certificate_ode_with(&specialized, opts)?;
    Ok(PlaneWaveCertificate {
        xi,
        mode,
        base,
        specialized,
    })
}

/// `a(∂x)` applied to `e^{ζ·x}`, by differentiating `q(x) e^{ζ·x}` one
/// variable at a time with the product rule; returns `q` with
/// `a(∂x) e^{ζ·x} = q e^{ζ·x}`.
pub fn apply_spatial(a: &SparsePoly, zeta: &[GaussRat]) -> Result<SparsePoly> {
    let d = a.dim();
    if zeta.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: zeta.len(),
        });
    }
    let mut out = SparsePoly::zero(d);
    for (alpha, c) in a.terms() {
        let mut q = SparsePoly::constant(d, c.clone());
        for (j, &e) in alpha.iter().enumerate() {
            for _ in 0..e {
                // ∂_j (q e^{ζ·x}) = (∂_j q + ζ_j q) e^{ζ·x}
                q = q.derive(j).add(&q.scale(&zeta[j]));
            }
        }
        out = out.add(&q);
    }
    Ok(out)
}

/// The ODE operator seen by plane waves, computed with [`apply_spatial`]
/// rather than by evaluating the coefficients.
pub fn lifted_operator(p: &MultiPoly, xi: &[GaussRat], mode: Mode) -> Result<PolyOperator> {
    let zeta = mode.substitution(xi);
    let coeffs = p
        .tcoeffs()
        .iter()
        .map(|a| {
            let q = apply_spatial(a, &zeta)?;
            q.as_constant()
                .map(Scalar::Exact)
                .ok_or_else(|| Error::InvalidArgument("spatial action left a non-constant factor".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    PolyOperator::from_coeffs(Backend::Exact, coeffs)
}

pub fn verify_certificate_pde(cert: &PlaneWaveCertificate, p: &MultiPoly, opts: &VerifyOptions) -> Report {
    let mut report = Report::default();
    let d = p.dim();
    report.push(
        "dimension",
        cert.xi.len() == d,
        format!("|ξ| = {}, d = {d}", cert.xi.len()),
    );
    if cert.xi.len() != d {
        return report;
    }
    let n = match p.tdegree() {
        Ok(n) => n,
        Err(e) => {
            report.push("t_degree", false, e.to_string());
            return report;
        }
    };
    report.push("t_degree", n >= 1, format!("t-degree {n}"));

    let point = cert.mode.substitution(&cert.xi);
    let an = p
        .leading()
        .expect("nonzero operator")
        .eval(&point)
        .expect("dimension checked");
    report.push(
        "witness",
        !an.is_zero(),
        format!("a_n at the substitution point = {an}"),
    );

    let real = cert.xi.iter().all(GaussRat::is_real);
    report.push(
        "mode_consistency",
        real,
        format!("mode {}, coefficients evaluated at {}", cert.mode, fmt_point(&point)),
    );

    match specialize(p, &cert.xi, cert.mode) {
        Ok(s) => report.push(
            "specialization",
            s.poly() == cert.specialized.poly(),
            format!("recomputed {s}, certificate {}", cert.specialized),
        ),
        Err(e) => report.push("specialization", false, e.to_string()),
    }
    report.push(
        "specialized_degree",
        cert.specialized.degree() == Some(n),
        format!("deg p_ξ = {:?}, t-degree {n}", cert.specialized.degree()),
    );
    report.push(
        "decision",
        cert.base.is_closure() == (n == 1),
        format!("closure = {}, t-degree {n}", cert.base.is_closure()),
    );

    report.extend_prefixed("base.", verify_certificate_with(&cert.base, &cert.specialized, opts));

    // Independent route: act with a_k(∂x) on the spatial factor directly and
    // compare the resulting ODE operator and residual with the certificate.
    match lifted_operator(p, &cert.xi, cert.mode) {
        Ok(lifted) => {
            let same = lifted.poly() == cert.specialized.poly();
            report.push(
                "plane_wave_operator",
                same,
                format!("D_p on plane waves acts as {lifted}"),
            );
            if let Certificate::Counterexample { u1, u2, residual, .. } = &cert.base {
                let lifted_residual = lifted
                    .to_backend(cert.base.backend())
                    .and_then(|op| Distribution::from_concat(u1, u2, true)?.apply_op(&op));
                match lifted_residual {
                    Ok(r) => report.push(
                        "plane_wave_residual",
                        r == *residual && !r.singular.is_zero() && r.regular.is_zero(),
                        format!("D_p(u1 ⊕ u2) = [comb] {} ⊗ e^(ξ·x)", r.singular),
                    ),
                    Err(e) => report.push("plane_wave_residual", false, e.to_string()),
                }
            }
        }
        Err(e) => report.push("plane_wave_operator", false, e.to_string()),
    }
    report
}

fn fmt_point(v: &[GaussRat]) -> String {
    format!("({})", v.iter().map(ToString::to_string).collect::<Vec<_>>().join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ode::CheckStatus;

    fn g(n: i64) -> GaussRat {
        GaussRat::from_i64(n)
    }

    fn wave() -> MultiPoly {
        let t = MultiPoly::t(1);
        let x = MultiPoly::var(1, 1).unwrap();
        t.pow(2).sub(&x.pow(2))
    }

    #[test]
    fn decisions() {
        let t = MultiPoly::t(1);
        let x = MultiPoly::var(1, 1).unwrap();
        assert!(decide_pde(&t.add(&x)).unwrap());
        assert!(!decide_pde(&wave()).unwrap());
        assert!(matches!(decide_pde(&x), Err(Error::TDegreeZero)));
        assert!(matches!(decide_pde(&MultiPoly::zero(1)), Err(Error::ZeroPolynomial)));
    }

    #[test]
    fn witness_scan() {
        let x = MultiPoly::var(1, 1).unwrap();
        let t = MultiPoly::t(1);
        assert_eq!(witness_xi(&x.mul(&t), Mode::Growing).unwrap(), vec![g(1)]);
        assert_eq!(witness_xi(&wave(), Mode::Growing).unwrap(), vec![g(0)]);
        let d2 = MultiPoly::var(2, 1)
            .unwrap()
            .mul(&MultiPoly::var(2, 2).unwrap())
            .sub(&MultiPoly::constant(2, g(1)))
            .mul(&MultiPoly::t(2));
        assert_eq!(witness_xi(&d2, Mode::Growing).unwrap(), vec![g(0), g(0)]);
        // x1^2 - x1 vanishes at 0 and 1 but not at the third grid point 2.
        let a = x.pow(2).sub(&x).mul(&t);
        assert_eq!(witness_xi(&a, Mode::Growing).unwrap(), vec![g(2)]);
    }

    #[test]
    fn specialization_modes() {
        let t = MultiPoly::t(1);
        let x = MultiPoly::var(1, 1).unwrap();
        let heat = t.sub(&x.pow(2));
        assert_eq!(
            specialize(&wave(), &[g(1)], Mode::Growing).unwrap().to_string(),
            "t^2 - 1"
        );
        assert_eq!(specialize(&heat, &[g(2)], Mode::Growing).unwrap().to_string(), "t - 4");
        assert_eq!(
            specialize(&heat, &[g(1)], Mode::Oscillatory).unwrap().to_string(),
            "t + 1"
        );
        assert!(matches!(
            specialize(&heat, &[g(1), g(2)], Mode::Growing),
            Err(Error::DimensionMismatch { expected: 1, got: 2 })
        ));
    }

    #[test]
    fn wave_certificate_round_trip() {
        let c = certificate_pde(&wave(), Mode::Growing, None, &CertOptions::default()).unwrap();
        assert_eq!(c.xi, vec![g(0)]);
        assert_eq!(c.specialized.to_string(), "t^2");
        let Certificate::Counterexample { residual, .. } = &c.base else {
            panic!("wave is not concatenable");
        };
        assert_eq!(residual.singular.coeffs(), &[Scalar::exact(1, 0)]);
        let r = verify_certificate_pde(&c, &wave(), &VerifyOptions::default());
        assert!(r.passed(), "{r}");

        let forced = certificate_pde(&wave(), Mode::Growing, Some(vec![g(1)]), &CertOptions::default()).unwrap();
        let Certificate::Counterexample { residual, .. } = &forced.base else {
            panic!("wave is not concatenable");
        };
        assert_eq!(residual.singular.coeffs(), &[Scalar::exact(-2, 0)]);
    }

    #[test]
    fn tampering_is_detected() {
        let x = MultiPoly::var(1, 1).unwrap();
        let p = x.mul(&MultiPoly::t(1).pow(2)).add(&MultiPoly::constant(1, g(1)));
        let mut c = certificate_pde(&p, Mode::Growing, None, &CertOptions::default()).unwrap();
        c.xi = vec![g(0)];
        let r = verify_certificate_pde(&c, &p, &VerifyOptions::default());
        let witness = r.checks.iter().find(|ch| ch.name == "witness").unwrap();
        assert_eq!(witness.status, CheckStatus::Fail);

        let heat = MultiPoly::t(1).sub(&x.pow(2));
        let mut h = certificate_pde(&heat, Mode::Growing, None, &CertOptions::default()).unwrap();
        h.specialized = PolyOperator::from_ints(&[-3, 1]);
        let r = verify_certificate_pde(&h, &heat, &VerifyOptions::default());
        let spec = r.checks.iter().find(|ch| ch.name == "specialization").unwrap();
        assert_eq!(spec.status, CheckStatus::Fail);
    }

    #[test]
    fn spatial_action_matches_evaluation() {
        let a = SparsePoly::from_terms(2, [(vec![2, 1], g(3)), (vec![0, 1], g(-1)), (vec![0, 0], g(5))]).unwrap();
        let zeta = [GaussRat::new(crate::scalar::rat(1, 2), crate::scalar::rat(1, 1)), g(-2)];
        let q = apply_spatial(&a, &zeta).unwrap();
        assert_eq!(q.as_constant().unwrap(), a.eval(&zeta).unwrap());
    }
}
