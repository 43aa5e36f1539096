//! The `fracreg` command line.
//!
//! ```text
//! fracreg check      --family F [--k K] [--alpha A] --mu M [--T T] ...
//! fracreg corollary  --family F ... --mu M [--eta E]
//! fracreg nd-ratio   --family F ...
//! fracreg holder-fit --family F ... --mu M
//! fracreg corpus list
//! ```
//!
//! Exit status: 0 on a passing verdict or emitted data, 1 on a failing
//! verdict, 2 on usage or parameter errors.
//!
//! JSON reports carry `"version": "fracreg-report/1"` and list keys in a
//! fixed order. CSV column sets:
//!
//! - `check`: `kind,x,exponent_fit,constant_fit,lipschitz_constant,ok`
//! - `corollary`: `y,epsilon,chain_ok`
//! - `nd-ratio`: `y,N,D,ratio`
//! - `holder-fit`: `offset,abs_diff,log_offset,log_abs_diff`, then one JSON
//!   summary line
//! - `corpus list`: `name,parameter_domain`

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::checker::{
    check_corollary, check_example2_limit, check_theorem, nd_grid, CorollaryReport,
    Example2LimitReport, TheoremReport, Verdict,
};
use crate::corpus::{
    make_example1_with_alpha, make_example2, make_negative_control, make_power, Family,
    FunctionSpec, SmoothFactor, DEFAULT_EXAMPLE1_ALPHA,
};
use crate::error::{Error, Result};
use crate::quadrature::QuadConfig;
use crate::regularity::{fracpow_deriv_samples, holder_fit, CheckConfig, HolderEstimate};
use crate::remainder::{nd_pair_checked, RemainderPair};

pub const REPORT_VERSION: &str = "fracreg-report/1";

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "fracreg",
    version,
    about = "Regularity checks for fractional powers of flat-zero functions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check hypotheses and every conclusion of the theorem.
    Check(RunArgs),
    /// Emit N(x,y), D(x,y) and their ratio on a log grid.
    NdRatio(RunArgs),
    /// Emit the dyadic increments of (f^mu)' at the first zero and their fit.
    HolderFit(RunArgs),
    /// Check the corollary (single zero at 0, positivity of f^(k)).
    Corollary(RunArgs),
    /// Inspect the built-in families.
    Corpus(CorpusArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CorpusAction {
    List,
}

#[derive(Debug, Args)]
struct CorpusArgs {
    #[arg(value_enum)]
    action: CorpusAction,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format (plain text when omitted).
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long)]
    family: String,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long = "T", default_value_t = 1.0)]
    t_max: f64,
    /// Defaults to T/2.
    #[arg(long)]
    eta: Option<f64>,
    /// First nonvanishing derivative order of g at 0 (example2 only).
    #[arg(long)]
    j: Option<usize>,
    #[arg(long, default_value_t = 64)]
    grid_points: usize,
    #[arg(long, default_value_t = 20)]
    scales: usize,
    /// Absolute quadrature tolerance; the relative tolerance is 100x this.
    #[arg(long, default_value_t = 1e-10)]
    quad_tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// json for check/corollary, csv for nd-ratio/holder-fit when omitted.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SubcommandKind {
    Check,
    NdRatio,
    HolderFit,
    Corollary,
    Corpus,
}

/// Validated parameters of a single invocation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub subcommand: SubcommandKind,
    pub family: Family,
    pub k: usize,
    pub alpha: f64,
    pub mu: Option<f64>,
    #[serde(rename = "T")]
    pub t_max: f64,
    pub eta: Option<f64>,
    pub j: Option<usize>,
    pub grid_points: usize,
    pub scales: usize,
    pub quad_tol: f64,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl RunManifest {
    fn from_args(subcommand: SubcommandKind, a: RunArgs) -> Result<Self> {
        let family = Family::from_name(&a.family)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown family '{}'", a.family)))?;
        let (k, alpha) = match family {
            Family::NegativeControl => {
                if a.k.is_some_and(|k| k != 2) || a.alpha.is_some_and(|al| al != 1.0) {
                    return Err(Error::InvalidParameter(
                        "negative-control has fixed k = 2, alpha = 1".into(),
                    ));
                }
                (2, 1.0)
            }
            Family::Example1 => (a.k.unwrap_or(2), a.alpha.unwrap_or(DEFAULT_EXAMPLE1_ALPHA)),
            _ => (a.k.unwrap_or(2), a.alpha.unwrap_or(0.5)),
        };
        if a.j.is_some() && family != Family::Example2 {
            return Err(Error::InvalidParameter(
                "--j applies to example2 only".into(),
            ));
        }
        if family == Family::Example2 && a.j.is_none() {
            return Err(Error::InvalidParameter("example2 needs --j".into()));
        }
        if a.eta.is_some() && subcommand != SubcommandKind::Corollary {
            return Err(Error::InvalidParameter(
                "--eta applies to corollary only".into(),
            ));
        }
        let needs_mu = matches!(
            subcommand,
            SubcommandKind::Check | SubcommandKind::Corollary | SubcommandKind::HolderFit
        );
        if needs_mu && a.mu.is_none() {
            return Err(Error::InvalidParameter("--mu is required".into()));
        }
        if !(a.quad_tol > 0.0 && a.quad_tol.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "--quad-tol must be positive, got {}",
                a.quad_tol
            )));
        }
        let default_format = match subcommand {
            SubcommandKind::NdRatio | SubcommandKind::HolderFit => Format::Csv,
            _ => Format::Json,
        };
        Ok(RunManifest {
            subcommand,
            family,
            k,
            alpha,
            mu: a.mu,
            t_max: a.t_max,
            eta: match subcommand {
                SubcommandKind::Corollary => Some(a.eta.unwrap_or(0.5 * a.t_max)),
                _ => None,
            },
            j: a.j,
            grid_points: a.grid_points,
            scales: a.scales,
            quad_tol: a.quad_tol,
            out: a.out,
            format: a.format.unwrap_or(default_format),
        })
    }

    pub fn function_spec(&self) -> Result<FunctionSpec> {
        match self.family {
            Family::Example1 => make_example1_with_alpha(self.k, self.alpha, self.t_max),
            Family::Example2Power => make_power(self.k, self.alpha, self.t_max),
            Family::Example2 => {
                let j = self.j.unwrap_or(0);
                if j > self.k {
                    return Err(Error::InvalidParameter(format!(
                        "j = {j} exceeds k = {}",
                        self.k
                    )));
                }
                make_example2(
                    self.k,
                    self.alpha,
                    SmoothFactor::flat_of_order(j),
                    self.t_max,
                )
            }
            Family::NegativeControl => make_negative_control(self.t_max),
            Family::Custom => Err(Error::InvalidParameter(
                "custom specs have no CLI form".into(),
            )),
        }
    }

    pub fn check_config(&self) -> CheckConfig {
        let mut cfg = CheckConfig::new(self.mu.unwrap_or(f64::NAN));
        cfg.grid_points = self.grid_points;
        cfg.scales = self.scales;
        cfg.quad = QuadConfig::from_abs_tol(self.quad_tol);
        cfg
    }
}

#[derive(Debug, Serialize)]
struct Envelope<'a, T: Serialize> {
    version: &'static str,
    subcommand: SubcommandKind,
    #[serde(flatten)]
    body: &'a T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NdRatioRow {
    pub y: f64,
    #[serde(rename = "N")]
    pub n: f64,
    #[serde(rename = "D")]
    pub d: f64,
    pub ratio: f64,
}

impl From<RemainderPair> for NdRatioRow {
    fn from(p: RemainderPair) -> Self {
        NdRatioRow {
            y: p.y,
            n: p.n_value,
            d: p.d_value,
            ratio: p.n_value / p.d_value,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NdRatioReport {
    pub family: Family,
    pub label: String,
    pub k: usize,
    pub alpha: f64,
    pub x: f64,
    pub rows: Vec<NdRatioRow>,
    pub limit: Option<Example2LimitReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HolderFitReport {
    pub family: Family,
    pub label: String,
    pub mu: f64,
    pub anchor: f64,
    pub samples: Vec<(f64, f64)>,
    pub estimate: HolderEstimate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusEntry {
    pub name: &'static str,
    pub parameter_domain: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusListing {
    pub families: Vec<CorpusEntry>,
}

/// Anything the CLI can serialise.
#[derive(Debug, Clone, PartialEq)]
pub enum Report {
    Theorem(TheoremReport),
    Corollary(CorollaryReport),
    NdRatio(NdRatioReport),
    HolderFit(HolderFitReport),
    Corpus(CorpusListing),
}

impl Report {
    fn subcommand(&self) -> SubcommandKind {
        match self {
            Report::Theorem(_) => SubcommandKind::Check,
            Report::Corollary(_) => SubcommandKind::Corollary,
            Report::NdRatio(_) => SubcommandKind::NdRatio,
            Report::HolderFit(_) => SubcommandKind::HolderFit,
            Report::Corpus(_) => SubcommandKind::Corpus,
        }
    }

    fn exit_status(&self) -> i32 {
        let verdict = match self {
            Report::Theorem(r) => r.verdict,
            Report::Corollary(r) => r.verdict,
            _ => Verdict::Pass,
        };
        if verdict == Verdict::Pass {
            EXIT_PASS
        } else {
            EXIT_FAIL
        }
    }
}

fn envelope_json<T: Serialize>(kind: SubcommandKind, body: &T) -> Vec<u8> {
    let env = Envelope {
        version: REPORT_VERSION,
        subcommand: kind,
        body,
    };
    let mut out = serde_json::to_vec_pretty(&env).expect("reports serialise");
    out.push(b'\n');
    out
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Serialises `report` in the requested format.
pub fn emit_report(report: &Report, format: Format) -> Vec<u8> {
    let kind = report.subcommand();
    if format == Format::Json {
        return match report {
            Report::Theorem(r) => envelope_json(kind, r),
            Report::Corollary(r) => envelope_json(kind, r),
            Report::NdRatio(r) => envelope_json(kind, r),
            Report::HolderFit(r) => envelope_json(kind, r),
            Report::Corpus(r) => envelope_json(kind, r),
        };
    }
    let mut s = String::new();
    match report {
        Report::Theorem(r) => {
            s.push_str("kind,x,exponent_fit,constant_fit,lipschitz_constant,ok\n");
            for z in &r.zeros {
                let h = z.holder_estimate;
                let _ = writeln!(
                    s,
                    "zero,{},{},{},,{}",
                    z.x,
                    opt(h.map(|h| h.exponent_fit)),
                    opt(h.map(|h| h.constant_fit)),
                    z.differentiability_ok && z.holder_ok
                );
            }
            for p in &r.positives {
                let _ = writeln!(
                    s,
                    "positive,{},,,{},{}",
                    p.x,
                    opt(p.lipschitz_constant),
                    p.ok
                );
            }
        }
        Report::Corollary(r) => {
            s.push_str("y,epsilon,chain_ok\n");
            for e in &r.epsilon_samples {
                let _ = writeln!(s, "{},{},{}", e.y, opt(e.epsilon), e.chain_ok);
            }
        }
        Report::NdRatio(r) => {
            s.push_str("y,N,D,ratio\n");
            for row in &r.rows {
                let _ = writeln!(s, "{},{},{},{}", row.y, row.n, row.d, row.ratio);
            }
        }
        Report::HolderFit(r) => {
            s.push_str("offset,abs_diff,log_offset,log_abs_diff\n");
            for &(h, d) in &r.samples {
                let _ = writeln!(s, "{},{},{},{}", h, d, h.ln(), d.ln());
            }
            let summary = serde_json::json!({
                "exponent_fit": r.estimate.exponent_fit,
                "constant_fit": r.estimate.constant_fit,
                "r_squared": r.estimate.r_squared,
            });
            let _ = writeln!(s, "{summary}");
        }
        Report::Corpus(r) => {
            s.push_str("name,parameter_domain\n");
            for e in &r.families {
                let _ = writeln!(s, "{},{}", e.name, csv_field(e.parameter_domain));
            }
        }
    }
    s.into_bytes()
}

pub fn corpus_listing() -> CorpusListing {
    CorpusListing {
        families: Family::BUILTIN
            .iter()
            .map(|f| CorpusEntry {
                name: f.name(),
                parameter_domain: f.parameter_domain(),
            })
            .collect(),
    }
}

fn nd_ratio_report(m: &RunManifest, f: &FunctionSpec, cfg: &CheckConfig) -> Result<NdRatioReport> {
    let x = *f
        .zeros()
        .first()
        .ok_or_else(|| Error::Precondition("family has no zeros".into()))?;
    let rows = nd_grid(f, cfg.grid_points)
        .into_iter()
        .filter(|&y| y > x)
        .map(|y| nd_pair_checked(f, x, y, &cfg.quad).map(NdRatioRow::from))
        .collect::<Result<Vec<_>>>()?;
    let limit = match m.family {
        Family::Example2Power => Some(check_example2_limit(
            m.k,
            m.alpha,
            SmoothFactor::constant(1.0),
            0,
            cfg,
        )?),
        Family::Example2 => {
            let j = m.j.unwrap_or(0);
            Some(check_example2_limit(
                m.k,
                m.alpha,
                SmoothFactor::flat_of_order(j),
                j,
                cfg,
            )?)
        }
        _ => None,
    };
    Ok(NdRatioReport {
        family: f.family(),
        label: f.label().to_string(),
        k: f.k(),
        alpha: f.alpha(),
        x,
        rows,
        limit,
    })
}

fn holder_fit_report(f: &FunctionSpec, cfg: &CheckConfig) -> Result<HolderFitReport> {
    cfg.validate(f)?;
    let x = *f
        .zeros()
        .first()
        .ok_or_else(|| Error::Precondition("family has no zeros".into()))?;
    let samples = fracpow_deriv_samples(f, cfg.mu, x, cfg)?;
    let mut estimate = holder_fit(x, &samples.pairs)?;
    estimate.dropped += samples.dropped;
    Ok(HolderFitReport {
        family: f.family(),
        label: f.label().to_string(),
        mu: cfg.mu,
        anchor: x,
        samples: samples.pairs,
        estimate,
    })
}

/// Runs the subcommand described by `manifest`.
pub fn execute(manifest: &RunManifest) -> Result<Report> {
    let f = manifest.function_spec()?;
    let cfg = manifest.check_config();
    Ok(match manifest.subcommand {
        SubcommandKind::Check => Report::Theorem(check_theorem(&f, &cfg)?),
        SubcommandKind::Corollary => {
            let eta = manifest.eta.unwrap_or(0.5 * manifest.t_max);
            Report::Corollary(check_corollary(&f, eta, &cfg)?)
        }
        SubcommandKind::NdRatio => Report::NdRatio(nd_ratio_report(manifest, &f, &cfg)?),
        SubcommandKind::HolderFit => Report::HolderFit(holder_fit_report(&f, &cfg)?),
        SubcommandKind::Corpus => Report::Corpus(corpus_listing()),
    })
}

fn write_output(out: Option<&PathBuf>, bytes: &[u8]) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, bytes),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()
        }
    }
}

fn corpus_text() -> Vec<u8> {
    let mut s = String::new();
    for e in corpus_listing().families {
        let _ = writeln!(s, "{:<18}{}", e.name, e.parameter_domain);
    }
    s.into_bytes()
}

/// Parses `argv` (including the program name), runs it and returns the
/// process exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                EXIT_USAGE
            } else {
                EXIT_PASS
            };
        }
    };
    let manifest = match cli.command {
        Command::Corpus(c) => {
            let bytes = match c.format {
                None => corpus_text(),
                Some(fmt) => emit_report(&Report::Corpus(corpus_listing()), fmt),
            };
            return match write_output(c.out.as_ref(), &bytes) {
                Ok(()) => EXIT_PASS,
                Err(e) => {
                    eprintln!("fracreg: cannot write output: {e}");
                    EXIT_USAGE
                }
            };
        }
        Command::Check(a) => RunManifest::from_args(SubcommandKind::Check, a),
        Command::NdRatio(a) => RunManifest::from_args(SubcommandKind::NdRatio, a),
        Command::HolderFit(a) => RunManifest::from_args(SubcommandKind::HolderFit, a),
        Command::Corollary(a) => RunManifest::from_args(SubcommandKind::Corollary, a),
    };
    let manifest = match manifest {
        Ok(m) => m,
        Err(e) => {
            eprintln!("fracreg: {e}");
            return EXIT_USAGE;
        }
    };
    let report = match execute(&manifest) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("fracreg: {e}");
            return EXIT_USAGE;
        }
    };
    let bytes = emit_report(&report, manifest.format);
    if let Err(e) = write_output(manifest.out.as_ref(), &bytes) {
        eprintln!("fracreg: cannot write output: {e}");
        return EXIT_USAGE;
    }
    report.exit_status()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn manifest(args: &[&str]) -> Result<RunManifest> {
        let mut argv = vec!["fracreg"];
        argv.extend_from_slice(args);
        let cli = Cli::try_parse_from(argv).expect("parses");
        match cli.command {
            Command::Check(a) => RunManifest::from_args(SubcommandKind::Check, a),
            Command::NdRatio(a) => RunManifest::from_args(SubcommandKind::NdRatio, a),
            Command::HolderFit(a) => RunManifest::from_args(SubcommandKind::HolderFit, a),
            Command::Corollary(a) => RunManifest::from_args(SubcommandKind::Corollary, a),
            Command::Corpus(_) => unreachable!(),
        }
    }

    #[test]
    fn manifest_defaults() {
        let m = manifest(&["corollary", "--family", "example1", "--mu", "0.6"]).unwrap();
        assert_eq!(m.k, 2);
        assert_eq!(m.alpha, DEFAULT_EXAMPLE1_ALPHA);
        assert_eq!(m.eta, Some(0.5));
        assert_eq!(m.format, Format::Json);
        let m = manifest(&["nd-ratio", "--family", "example2-power"]).unwrap();
        assert_eq!(m.format, Format::Csv);
    }

    #[test]
    fn manifest_rejects_invalid_combinations() {
        assert!(manifest(&["check", "--family", "nope", "--mu", "0.6"]).is_err());
        assert!(manifest(&["check", "--family", "example1", "--j", "1", "--mu", "0.6"]).is_err());
        assert!(manifest(&["check", "--family", "example2", "--mu", "0.6"]).is_err());
        assert!(manifest(&[
            "check",
            "--family",
            "negative-control",
            "--k",
            "3",
            "--mu",
            "0.6"
        ])
        .is_err());
        assert!(manifest(&["check", "--family", "example1"]).is_err());
        assert!(
            manifest(&["check", "--family", "example1", "--mu", "0.6", "--eta", "0.2"]).is_err()
        );
    }

    #[test]
    fn csv_quoting() {
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(csv_field("plain"), "plain");
    }
}
