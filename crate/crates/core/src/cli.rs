//! `concat-calc` command layer. `run` never exits the process, so tests can
//! drive it directly.

use std::io::Read;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::error::Result;
use crate::json::{certificate_from_json, certificate_to_json, checks_to_json, from_str, to_string_pretty};
use crate::multipoly::MultiPoly;
use crate::ode::{CertOptions, Report, VerifyOptions};
use crate::oracle::{pair, PairOptions, QuadOptions};
use crate::pde::{certificate_pde, decide_pde, verify_certificate_pde, Mode};
use crate::scalar::{fmt_big, Backend, FloatCtx, GaussRat};
use crate::selftest;
use crate::text::{parse_distribution, parse_expr, parse_operator, parse_testfn, parse_xi};

pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Growing,
    Oscillatory,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Growing => Mode::Growing,
            ModeArg::Oscillatory => Mode::Oscillatory,
        }
    }
}

/// Options shared by every subcommand.
#[derive(Clone, Debug, Args)]
pub struct RunConfig {
    /// Plane-wave substitution: `growing` uses e^{ξ·x}, `oscillatory` uses e^{iξ·x}.
    #[arg(long, value_enum, default_value = "growing", global = true)]
    pub mode: ModeArg,
    /// Bigfloat working precision in bits.
    #[arg(long, env = "CONCAT_CALC_PRECISION", default_value_t = 128, global = true)]
    pub precision: usize,
    /// Bigfloat zero threshold (used when exact factorization is unavailable).
    #[arg(long, default_value_t = 1e-30, global = true)]
    pub tol: f64,
    /// Agreement required between symbolic and numeric pairings.
    #[arg(long, default_value_t = 1e-9, global = true)]
    pub pair_tol: f64,
    /// Adaptive quadrature stopping tolerance.
    #[arg(long, default_value_t = 1e-13, global = true)]
    pub quad_tol: f64,
    /// Witness override `v1,v2,..` (real rationals).
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub xi: Option<String>,
    #[arg(long, value_enum, default_value = "text", global = true)]
    pub format: Format,
    /// Seed for the property batches of `selftest`.
    #[arg(long, default_value_t = DEFAULT_SEED, global = true)]
    pub seed: u64,
    /// Skip the numeric pairing cross-check in `certify` and `verify`.
    #[arg(long, global = true)]
    pub no_crosscheck: bool,
}

impl RunConfig {
    pub fn ctx(&self) -> Result<FloatCtx> {
        FloatCtx::new(self.precision, self.tol)
    }

    pub fn pair_options(&self) -> PairOptions {
        PairOptions {
            quad: QuadOptions {
                precision: self.precision,
                tol: self.quad_tol,
                ..QuadOptions::default()
            },
            domain: None,
        }
    }

    pub fn verify_options(&self) -> VerifyOptions {
        VerifyOptions {
            numeric_crosscheck: !self.no_crosscheck,
            pairing: self.pair_options(),
            pair_tol: self.pair_tol,
            ..VerifyOptions::default()
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "concat-calc",
    version,
    about = "Concatenability of solution sets of constant-coefficient PDEs"
)]
struct Cli {
    #[command(flatten)]
    cfg: RunConfig,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print YES/NO with the t-degree. Exit 0 if concatenable, 1 if not.
    Decide { operator: String },
    /// Emit a certificate (JSON) for the decision.
    Certify { operator: String },
    /// Re-check a certificate file (`-` for stdin) against an operator.
    Verify { certificate: String, operator: String },
    /// Pair a distribution with a test function by quadrature.
    Pair { distribution: String, testfn: String },
    /// Run the embedded property corpus.
    Selftest,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExitReport {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl ExitReport {
    fn out(code: i32, stdout: String) -> Self {
        Self {
            code,
            stdout,
            stderr: String::new(),
        }
    }
}

/// Parse `argv` (including the program name) and run the subcommand.
pub fn run<I, S>(argv: I) -> ExitReport
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                ExitReport {
                    code: 2,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                ExitReport::out(0, text)
            };
        }
    };
    match dispatch(&cli.cfg, &cli.cmd) {
        Ok(r) => r,
        Err(e) => ExitReport {
            code: 2,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

fn dispatch(cfg: &RunConfig, cmd: &Command) -> Result<ExitReport> {
    match cmd {
        Command::Decide { operator } => decide(cfg, operator),
        Command::Certify { operator } => certify(cfg, operator),
        Command::Verify { certificate, operator } => verify(cfg, certificate, operator),
        Command::Pair { distribution, testfn } => pair_cmd(cfg, distribution, testfn),
        Command::Selftest => Ok(selftest_cmd(cfg)),
    }
}

fn witness(cfg: &RunConfig) -> Result<Option<Vec<GaussRat>>> {
    cfg.xi.as_deref().map(parse_xi).transpose()
}

/// Parse with dimension `max(highest x index, |ξ|)`.
fn operator(src: &str, xi_len: Option<usize>) -> Result<MultiPoly> {
    let auto = parse_expr(src)?.max_x();
    parse_operator(src, Some(auto.max(xi_len.unwrap_or(0))))
}

fn json_line(v: serde_json::Value) -> String {
    format!("{}\n", serde_json::to_string_pretty(&v).expect("json value serializes"))
}

fn decide(cfg: &RunConfig, src: &str) -> Result<ExitReport> {
    let xi = witness(cfg)?;
    let p = operator(src, xi.as_ref().map(Vec::len))?;
    let n = p.tdegree()?;
    let yes = decide_pde(&p)?;
    let word = if yes { "YES" } else { "NO" };
    let stdout = match cfg.format {
        Format::Text => format!("{word} (t-degree {n})\n"),
        Format::Json => json_line(json!({
            "operator": src,
            "dimension": p.dim().to_string(),
            "t_degree": n.to_string(),
            "concatenable": yes,
        })),
    };
    Ok(ExitReport::out(if yes { 0 } else { 1 }, stdout))
}

fn certify(cfg: &RunConfig, src: &str) -> Result<ExitReport> {
    let xi = witness(cfg)?;
    let p = operator(src, xi.as_ref().map(Vec::len))?;
    let opts = CertOptions {
        ctx: cfg.ctx()?,
        allow_numeric: true,
    };
    let cert = certificate_pde(&p, cfg.mode.into(), xi, &opts)?;
    let report = verify_certificate_pde(&cert, &p, &cfg.verify_options());
    let code = if report.passed() { 0 } else { 1 };
    let stdout = match cfg.format {
        Format::Json => format!(
            "{}\n",
            to_string_pretty(&certificate_to_json(&cert, src, &report.checks))
        ),
        Format::Text => {
            let xi = cert.xi.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ");
            let mut s = format!(
                "{} for {src}\nwitness ξ = ({xi}), mode {}\nspecialized operator: {}\n",
                if cert.is_closure() { "closure" } else { "counterexample" },
                cert.mode,
                cert.specialized
            );
            s.push_str(&certificate_body(&cert.base));
            s.push_str(&format!("{report}\n"));
            s
        }
    };
    Ok(ExitReport::out(code, stdout))
}

fn certificate_body(c: &crate::ode::Certificate) -> String {
    use crate::ode::Certificate;
    match c {
        Certificate::Closure { lambda } => format!("λ = {lambda}\n"),
        Certificate::Counterexample {
            kind,
            lambda,
            mu,
            u1,
            u2,
            residual,
        } => {
            let mut s = format!("kind {}, λ = {lambda}", kind.as_str());
            if let Some(mu) = mu {
                s.push_str(&format!(", μ = {mu}"));
            }
            s.push_str(&format!(
                "\nu1 = {u1}\nu2 = {u2}\nresidual comb: {}\n",
                residual.singular
            ));
            s
        }
    }
}

fn read_certificate(path: &str) -> Result<String> {
    if path == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        Ok(std::fs::read_to_string(path)?)
    }
}

fn verify(cfg: &RunConfig, path: &str, src: &str) -> Result<ExitReport> {
    let j = from_str(&read_certificate(path)?)?;
    let cert = certificate_from_json(&j)?;
    let p = operator(src, Some(cert.xi.len()))?;
    let report = verify_certificate_pde(&cert, &p, &cfg.verify_options());
    let code = if report.passed() { 0 } else { 1 };
    Ok(ExitReport::out(code, render_report(cfg, &report)))
}

fn render_report(cfg: &RunConfig, report: &Report) -> String {
    match cfg.format {
        Format::Text => format!("{report}\n"),
        Format::Json => json_line(json!({
            "verdict": report.verdict().as_str(),
            "checks": checks_to_json(&report.checks),
        })),
    }
}

fn pair_cmd(cfg: &RunConfig, dist: &str, testfn: &str) -> Result<ExitReport> {
    let t = parse_distribution(dist, Backend::Exact)?;
    let phi = parse_testfn(testfn)?;
    let r = pair(&t, &phi, &cfg.pair_options())?;
    let stdout = match cfg.format {
        Format::Text => format!(
            "{}\nerror estimate {:e}, {} nodes\n",
            r.value, r.error_estimate, r.nodes
        ),
        Format::Json => json_line(json!({
            "distribution": t.to_string(),
            "testfn": phi.label(),
            "precision": cfg.precision.to_string(),
            "value": { "re": fmt_big(&r.value.re), "im": fmt_big(&r.value.im) },
            "error_estimate": format!("{:e}", r.error_estimate),
            "nodes": r.nodes.to_string(),
        })),
    };
    Ok(ExitReport::out(0, stdout))
}

fn selftest_cmd(cfg: &RunConfig) -> ExitReport {
    let results = selftest::run(cfg.seed);
    let ok = results.iter().all(|r| r.passed);
    let stdout = match cfg.format {
        Format::Text => {
            let mut s = String::new();
            for r in &results {
                s.push_str(&format!(
                    "{} {}: {}\n",
                    if r.passed { "PASS" } else { "FAIL" },
                    r.name,
                    r.detail
                ));
            }
            s.push_str(&format!(
                "seed {}: {}\n",
                cfg.seed,
                if ok { "all passed" } else { "failures" }
            ));
            s
        }
        Format::Json => json_line(json!({
            "seed": cfg.seed.to_string(),
            "passed": ok,
            "properties": results
                .iter()
                .map(|r| json!({ "name": r.name, "passed": r.passed, "detail": r.detail }))
                .collect::<Vec<_>>(),
        })),
    };
    ExitReport::out(if ok { 0 } else { 1 }, stdout)
}
