//! Batch front end: a JSON run configuration in, CSV/JSON reports out.
//!
//! Exit codes: 0 success, 1 certificate failure, 2 configuration error,
//! 3 numerical failure.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;
use serde::{Deserialize, Serialize};

use crate::dynamics::{integrate, IntegratorConfig, Trajectory};
use crate::error::Error;
use crate::invariants::{gradient_table, invariant_count, InvariantTable};
use crate::matrix::{SkewMatrix, SymMatrix};
use crate::poisson::{
    canonical_form, canonical_n, casimirs_frozen, casimirs_lp, expected_frozen_leaf_dim, expected_lp_leaf_dim,
    leaf_dimensions, NCanonical,
};
use crate::sampling::{random_unit_skew, random_unit_sym, rng_from_seed};
use crate::tolerances;
use crate::verify::{
    casimir_certificate, independence_certificate, integrability_summary, involution_certificate, lax_certificate,
    leaf_dims_certificate, recursion_certificate, sectional_certificate, Certificate, Tolerances,
};

#[derive(Debug, Parser)]
#[command(name = "symflow", version, about = "Isospectral flow X' = [X^2, N] on symmetric matrices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate the flow and write the trajectory and monitor series.
    Simulate(CommonArgs),
    /// Run the certificate suites listed in the config.
    Verify(CommonArgs),
    /// Invariant values and gradients at X0.
    Invariants(CommonArgs),
    /// Canonical form of N and both Casimir families at X0.
    Casimirs(CommonArgs),
    /// Symplectic leaf dimensions at X0.
    LeafDims(CommonArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// JSON run configuration; built-in defaults when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory (overrides the config).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Base seed for sampling (overrides the config).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Residual tolerance for every identity-type suite.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum NSpec {
    Canonical { v: Vec<f64>, d: usize },
    Explicit { matrix: Vec<Vec<f64>> },
    Random { seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum X0Spec {
    Explicit { matrix: Vec<Vec<f64>> },
    Random { seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Involution,
    Independence,
    Casimir,
    LeafDims,
    Recursion,
    Lax,
    Sectional2x2,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Involution,
        Suite::Independence,
        Suite::Casimir,
        Suite::LeafDims,
        Suite::Recursion,
        Suite::Lax,
        Suite::Sectional2x2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Involution => "involution",
            Suite::Independence => "independence",
            Suite::Casimir => "casimir",
            Suite::LeafDims => "leaf_dims",
            Suite::Recursion => "recursion",
            Suite::Lax => "lax",
            Suite::Sectional2x2 => "sectional2x2",
        }
    }

    fn parse(s: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|x| x.name() == s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub format: Format,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            format: Format::Csv,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub n: usize,
    pub n_spec: NSpec,
    pub x0_spec: X0Spec,
    pub integrator: IntegratorConfig,
    /// Suite names, or `"all"`.
    pub suites: Vec<String>,
    pub samples: usize,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub output: OutputConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n: 4,
            n_spec: NSpec::Canonical { v: vec![1.0, 2.0], d: 0 },
            x0_spec: X0Spec::Random { seed: 0 },
            integrator: IntegratorConfig::default(),
            suites: vec!["all".into()],
            samples: 20,
            seed: 0,
            tolerances: Tolerances::default(),
            output: OutputConfig::default(),
        }
    }
}

/// Failure of a CLI run, carrying its exit code.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::NumericalAbort { .. }
            | Error::NoConvergence(_)
            | Error::CanonicalForm(_)
            | Error::OddCoefficient { .. }
            | Error::RankUnstable { .. } => CliError::Numerical(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Config(format!("{}: {e}", path.display()))
}

/// Resolved inputs of a run.
pub struct Resolved {
    pub config: RunConfig,
    pub n: SkewMatrix,
    pub x0: SymMatrix,
    pub suites: Vec<Suite>,
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = fs::read_to_string(p).map_err(|e| io_err(p, e))?;
                serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))
            }
        }
    }

    pub fn apply(mut self, args: &CommonArgs) -> Self {
        if let Some(out) = &args.out {
            self.output.dir = out.clone();
        }
        if let Some(seed) = args.seed {
            self.seed = seed;
        }
        if let Some(tol) = args.tol {
            self.tolerances = self.tolerances.with_residual(tol);
        }
        if let Some(f) = args.format {
            self.output.format = f;
        }
        self
    }

    pub fn resolve(self) -> Result<Resolved, CliError> {
        let size = self.n;
        if size == 0 {
            return Err(CliError::Config("n must be positive".into()));
        }
        let n = match &self.n_spec {
            NSpec::Canonical { v, d } => {
                if 2 * v.len() + d != size {
                    return Err(CliError::Config(format!(
                        "canonical N with {} pairs and d = {d} has size {}, config n = {size}",
                        v.len(),
                        2 * v.len() + d
                    )));
                }
                if v.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
                    return Err(CliError::Config("canonical v entries must be positive".into()));
                }
                canonical_n(v, *d)
            }
            NSpec::Explicit { matrix } => {
                let n = SkewMatrix::from_rows(matrix)?;
                if n.n() != size {
                    return Err(CliError::Config(format!("N is {0}x{0}, config n = {size}", n.n())));
                }
                n
            }
            NSpec::Random { seed } => random_unit_skew(size, &mut rng_from_seed(*seed)),
        };
        let x0 = match &self.x0_spec {
            X0Spec::Explicit { matrix } => {
                let x = SymMatrix::from_rows(matrix)?;
                if x.n() != size {
                    return Err(CliError::Config(format!("X0 is {0}x{0}, config n = {size}", x.n())));
                }
                x
            }
            X0Spec::Random { seed } => random_unit_sym(size, &mut rng_from_seed(*seed)),
        };
        let mut suites = Vec::new();
        for s in &self.suites {
            if s == "all" {
                suites.extend(Suite::ALL);
            } else {
                suites.push(Suite::parse(s).ok_or_else(|| CliError::Config(format!("unknown suite {s:?}")))?);
            }
        }
        suites.sort();
        suites.dedup();
        if self.samples == 0 {
            return Err(CliError::Config("samples must be at least 1".into()));
        }
        self.integrator.validate()?;
        Ok(Resolved {
            config: self,
            n,
            x0,
            suites,
        })
    }
}

/// `{:.16e}`: 17 significant digits, round-trippable.
fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| io_err(&path, e))?;
    info!("wrote {}", path.display());
    Ok(())
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Config(e.to_string()))?;
    text.push('\n');
    write_file(dir, name, &text)
}

fn csv_line(cells: impl IntoIterator<Item = String>) -> String {
    let mut line = cells.into_iter().collect::<Vec<_>>().join(",");
    line.push('\n');
    line
}

fn trajectory_csv(traj: &Trajectory) -> String {
    let n = traj.states[0].n();
    let mut header = vec!["t".to_string()];
    for i in 0..n {
        for j in i..n {
            header.push(format!("x_{}_{}", i + 1, j + 1));
        }
    }
    let mut out = csv_line(header);
    for (t, x) in traj.times.iter().zip(&traj.states) {
        let mut row = vec![num(*t)];
        for i in 0..n {
            for j in i..n {
                row.push(num(x[(i, j)]));
            }
        }
        out.push_str(&csv_line(row));
    }
    out
}

fn monitors_csv(traj: &Trajectory) -> String {
    let m0 = &traj.monitors[0];
    let mut header = vec!["t".to_string()];
    header.extend(m0.invariants.values.keys().map(|k| k.label()));
    header.extend((1..=m0.casimirs.len()).map(|i| format!("C{i}")));
    header.extend((1..=m0.spectrum.len()).map(|i| format!("eig{i}")));
    header.extend(["drift_invariants", "drift_casimirs", "drift_spectrum"].map(String::from));
    let mut out = csv_line(header);
    for (i, (t, m)) in traj.times.iter().zip(&traj.monitors).enumerate() {
        let d = traj.drift_at(i);
        let mut row = vec![num(*t)];
        row.extend(m.invariants.values.values().map(|v| num(*v)));
        row.extend(m.casimirs.iter().map(|v| num(*v)));
        row.extend(m.spectrum.iter().map(|v| num(*v)));
        row.extend([d.invariants, d.casimirs, d.spectrum].map(num));
        out.push_str(&csv_line(row));
    }
    out
}

#[derive(Serialize)]
struct MonitorJson<'a> {
    t: f64,
    invariants: &'a InvariantTable,
    casimirs: &'a [f64],
    spectrum: &'a [f64],
    drift: crate::dynamics::Drift,
}

fn cmd_simulate(r: &Resolved, dir: &Path) -> Result<bool, CliError> {
    let traj = integrate(&r.x0, &r.n, &r.config.integrator)?;
    let drift = traj.max_drift();
    info!(
        "{} rows; max drift invariants {:e}, casimirs {:e}, spectrum {:e}",
        traj.len(),
        drift.invariants,
        drift.casimirs,
        drift.spectrum
    );
    match r.config.output.format {
        Format::Csv => {
            write_file(dir, "trajectory.csv", &trajectory_csv(&traj))?;
            write_file(dir, "monitors.csv", &monitors_csv(&traj))?;
        }
        Format::Json => {
            let states: Vec<_> = traj.times.iter().zip(&traj.states).collect();
            write_json(dir, "trajectory.json", &states)?;
            let rows: Vec<MonitorJson> = traj
                .monitors
                .iter()
                .enumerate()
                .map(|(i, m)| MonitorJson {
                    t: traj.times[i],
                    invariants: &m.invariants,
                    casimirs: &m.casimirs,
                    spectrum: &m.spectrum,
                    drift: traj.drift_at(i),
                })
                .collect();
            write_json(dir, "monitors.json", &rows)?;
        }
    }
    Ok(true)
}

fn canonical(r: &Resolved) -> Result<NCanonical, CliError> {
    Ok(canonical_form(&r.n, r.config.tolerances.rank)?)
}

fn cmd_verify(r: &Resolved, dir: &Path) -> Result<bool, CliError> {
    let cfg = &r.config;
    let tol = &cfg.tolerances;
    let (samples, seed) = (cfg.samples, cfg.seed);
    let needs_nc = r
        .suites
        .iter()
        .any(|s| matches!(s, Suite::Independence | Suite::Casimir | Suite::LeafDims));
    let nc = if needs_nc { Some(canonical(r)?) } else { None };
    let mut all_pass = true;
    for suite in &r.suites {
        let cert: Certificate = match suite {
            Suite::Involution => involution_certificate(&r.n, samples, seed, tol.involution)?,
            Suite::Independence => {
                let nc = nc.as_ref().expect("computed above");
                let mut c = independence_certificate(nc, samples, tol.rank, seed)?;
                c.notes.push(integrability_summary(nc)?.note);
                c
            }
            Suite::Casimir => casimir_certificate(nc.as_ref().expect("computed above"), samples, seed, tol.casimir)?,
            Suite::LeafDims => leaf_dims_certificate(nc.as_ref().expect("computed above"), samples, tol.rank, seed)?,
            Suite::Recursion => recursion_certificate(&r.n, samples, seed, tol.recursion)?,
            Suite::Lax => lax_certificate(&r.n, samples, seed, tol.lax)?,
            Suite::Sectional2x2 => sectional_certificate(samples, seed, tolerances::SECTIONAL_SEPARATION)?,
        };
        println!(
            "{:<14} {:<13} max_residual {:.3e} (tol {:.1e})",
            suite.name(),
            format!("{:?}", cert.verdict).to_lowercase(),
            cert.max_residual,
            cert.tolerance
        );
        all_pass &= cert.passed();
        write_json(dir, &format!("certificate_{}.json", suite.name()), &cert)?;
    }
    Ok(all_pass)
}

#[derive(Serialize)]
struct InvariantReport<'a> {
    n: usize,
    count: usize,
    /// Serializes the values only.
    values: &'a InvariantTable,
    gradients: Vec<(String, SymMatrix)>,
}

fn cmd_invariants(r: &Resolved, dir: &Path) -> Result<bool, CliError> {
    let table = gradient_table(&r.x0, &r.n)?;
    let count = if r.config.n >= 2 { invariant_count(r.config.n)? } else { 0 };
    if table.len() != count {
        return Err(CliError::Numerical(format!("{} invariants, expected {count}", table.len())));
    }
    match r.config.output.format {
        Format::Csv => {
            let mut out = String::from("index,k,two_r,value\n");
            for (idx, v) in &table.values {
                let _ = writeln!(out, "{},{},{},{}", idx.label(), idx.k, idx.two_r, num(*v));
            }
            write_file(dir, "invariants.csv", &out)?;
        }
        Format::Json => {
            let gradients = table
                .gradients
                .as_ref()
                .expect("filled")
                .iter()
                .map(|(k, g)| (k.label(), g.clone()))
                .collect();
            let report = InvariantReport {
                n: r.config.n,
                count,
                values: &table,
                gradients,
            };
            write_json(dir, "invariants.json", &report)?;
        }
    }
    println!("{count} invariants");
    Ok(true)
}

#[derive(Serialize)]
struct CasimirReport {
    canonical: NCanonical,
    lie_poisson: Option<Vec<f64>>,
    lie_poisson_note: Option<String>,
    frozen_mode: Option<crate::poisson::CasimirMode>,
    frozen_gradients: Vec<SymMatrix>,
}

fn cmd_casimirs(r: &Resolved, dir: &Path) -> Result<bool, CliError> {
    let nc = canonical(r)?;
    let xc = nc.to_canonical(&r.x0)?;
    let (lie_poisson, lie_poisson_note) = match casimirs_lp(&nc, &xc) {
        Ok(v) => (Some(v), None),
        Err(e @ Error::InvalidArgument(_)) => (None, Some(e.to_string())),
        Err(e) => return Err(e.into()),
    };
    let mode = nc.natural_mode();
    let frozen_gradients = match mode {
        Some(m) => casimirs_frozen(&nc, m)?,
        None => Vec::new(),
    };
    match r.config.output.format {
        Format::Csv => {
            let mut out = String::from("family,index,value\n");
            for (i, v) in lie_poisson.iter().flatten().enumerate() {
                let _ = writeln!(out, "lie_poisson,C{},{}", i + 1, num(*v));
            }
            for (i, e) in frozen_gradients.iter().enumerate() {
                let v = crate::matrix::frobenius(e, &xc)?;
                let _ = writeln!(out, "frozen,CF{},{}", i + 1, num(v));
            }
            write_file(dir, "casimirs.csv", &out)?;
        }
        Format::Json => write_json(
            dir,
            "casimirs.json",
            &CasimirReport {
                canonical: nc.clone(),
                lie_poisson,
                lie_poisson_note,
                frozen_mode: mode,
                frozen_gradients,
            },
        )?,
    }
    println!("p = {}, d = {}, v = {:?}", nc.p, nc.d, nc.v);
    Ok(true)
}

#[derive(Serialize)]
struct LeafReport {
    p: usize,
    d: usize,
    lie_poisson: usize,
    frozen: usize,
    expected_lie_poisson: usize,
    expected_frozen: Option<usize>,
}

fn cmd_leaf_dims(r: &Resolved, dir: &Path) -> Result<bool, CliError> {
    let nc = canonical(r)?;
    let dims = leaf_dimensions(&nc, &r.x0, r.config.tolerances.rank)?;
    let report = LeafReport {
        p: nc.p,
        d: nc.d,
        lie_poisson: dims.lie_poisson,
        frozen: dims.frozen,
        expected_lie_poisson: expected_lp_leaf_dim(nc.p, nc.d),
        expected_frozen: nc.natural_mode().map(|m| expected_frozen_leaf_dim(nc.p, nc.d, m)),
    };
    match r.config.output.format {
        Format::Csv => {
            let fr = report.expected_frozen.map(|v| v.to_string()).unwrap_or_default();
            let out = format!(
                "p,d,lie_poisson,frozen,expected_lie_poisson,expected_frozen\n{},{},{},{},{},{}\n",
                report.p, report.d, report.lie_poisson, report.frozen, report.expected_lie_poisson, fr
            );
            write_file(dir, "leaf_dims.csv", &out)?;
        }
        Format::Json => write_json(dir, "leaf_dims.json", &report)?,
    }
    println!("leaf dimensions: lie_poisson {}, frozen {}", dims.lie_poisson, dims.frozen);
    Ok(true)
}

type Handler = fn(&Resolved, &Path) -> Result<bool, CliError>;

/// Runs one subcommand; `Ok(false)` means a certificate failed.
pub fn run(cli: Cli) -> Result<bool, CliError> {
    let (args, cmd): (&CommonArgs, Handler) = match &cli.command {
        Command::Simulate(a) => (a, cmd_simulate),
        Command::Verify(a) => (a, cmd_verify),
        Command::Invariants(a) => (a, cmd_invariants),
        Command::Casimirs(a) => (a, cmd_casimirs),
        Command::LeafDims(a) => (a, cmd_leaf_dims),
    };
    let resolved = RunConfig::load(args.config.as_deref())?.apply(args).resolve()?;
    let dir = resolved.config.output.dir.clone();
    fs::create_dir_all(&dir).map_err(|e| io_err(&dir, e))?;
    write_json(&dir, "runconfig.json", &resolved.config)?;
    cmd(&resolved, &dir)
}

pub fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("symflow: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trip_and_defaults() {
        let cfg: RunConfig = serde_json::from_str(r#"{"n": 5, "n_spec": {"canonical": {"v": [2.0, 1.0], "d": 1}}}"#).unwrap();
        assert_eq!(cfg.samples, 20);
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(serde_json::from_str::<RunConfig>(&text).unwrap(), cfg);
        let r = cfg.resolve().unwrap();
        assert_eq!(r.suites.len(), 7);
        assert_eq!(r.n.n(), 5);
    }

    #[test]
    fn config_errors() {
        let bad = |s: &str| serde_json::from_str::<RunConfig>(s).map_err(|_| ()).and_then(|c| c.resolve().map(|_| ()).map_err(|_| ()));
        assert!(bad(r#"{"n": 4, "n_spec": {"canonical": {"v": [1.0], "d": 0}}}"#).is_err());
        assert!(bad(r#"{"n": 2, "n_spec": {"explicit": {"matrix": [[0.0, 1.0], [1.0, 0.0]]}}}"#).is_err());
        assert!(bad(r#"{"n": 4, "suites": ["nope"]}"#).is_err());
        assert!(bad(r#"{"n": 4, "typo": 1}"#).is_err());
        assert!(bad(r#"{"n": 4, "samples": 0}"#).is_err());
        assert!(bad(r#"{"n": 4}"#).is_ok());
    }

    #[test]
    fn error_codes() {
        assert_eq!(CliError::from(Error::NumericalAbort { t: 1.0 }).exit_code(), 3);
        assert_eq!(CliError::from(Error::NotSkew(1.0)).exit_code(), 2);
    }

    #[test]
    fn number_format_round_trips() {
        for v in [0.1, -1.0 / 3.0, 1e-300, 6.02214076e23] {
            assert_eq!(num(v).parse::<f64>().unwrap(), v);
        }
    }
}
