//! `paneitz`: verification suites, radial solves, hyperbolic transport and
//! erratum detectors from the command line.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails or a solve does
//! not converge, 2 on usage or domain errors.

use std::f64::consts::SQRT_2;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chrono::{SecondsFormat, Utc};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use paneitz_core::errata::{errata_table, ErratumRow};
use paneitz_core::hyperbolic_map::{
    ball_to_hyperbolic, growth_coefficient, nonexistence_demo, write_nonexistence_csv,
    NonexistenceConfig, DEFAULT_RHO_MAX,
};
use paneitz_core::radial_solver::{shoot, RadialSolution, ShootingConfig, SourceFn};
use paneitz_core::report::{CheckReport, ReportBuilder};
use paneitz_core::representation::{
    check_representation, write_rows_csv, PotentialRule, RepresentationConstants,
};
use paneitz_core::suite::{run_suite, Suite, SuiteConfig};
use paneitz_core::Error;

#[derive(Parser, Debug)]
#[command(
    name = "paneitz",
    version,
    about = "Numerical checks for the clamped Paneitz problem on the ball and on H^3"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Run a named battery of checks.
    Verify(VerifyArgs),
    /// Solve the radial clamped problem with source v^-p.
    Solve(SolveArgs),
    /// Check the integral representation on a solved instance.
    CheckRepresentation(RepresentationArgs),
    /// Transport a ball solution to hyperbolic space.
    #[command(subcommand)]
    Map(MapCommand),
    #[command(subcommand)]
    Demo(DemoCommand),
    /// Compare printed constants with the values the oracles force.
    Errata(ErrataArgs),
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum MapCommand {
    Hyperbolic(MapArgs),
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum DemoCommand {
    /// Decay of the integral term against an exponentially growing profile.
    Nonexistence(DemoArgs),
}

#[derive(Args, Debug, Serialize)]
struct VerifyArgs {
    #[arg(value_parser = parse_suite, help = "kernels, identities, hyper, moving-plane, solutions or all")]
    suite: Suite,
    /// Radii as `start:stop:step` or a comma-separated list, all in (0, 1).
    #[arg(long, value_parser = parse_r_list)]
    r_list: Option<RList>,
    #[arg(long, default_value_t = 64)]
    n_theta: usize,
    /// Samples for the kernel finite-difference and moving-plane checks.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, env = "PANEITZ_SEED", default_value_t = 42)]
    seed: u64,
    /// Relative tolerance for the identity checks.
    #[arg(long)]
    tol: Option<f64>,
    /// JSON report path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
#[command(allow_negative_numbers = true)]
struct SolveArgs {
    #[arg(long)]
    a: f64,
    #[arg(long, default_value_t = 0.0)]
    b: f64,
    /// Exponent of the source; 0 selects the zero source.
    #[arg(long, default_value_t = 7.0)]
    p: f64,
    /// Solution CSV; the JSON sidecar goes next to it.
    #[arg(long, default_value = "solution.csv")]
    out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum ConstantsArg {
    Oracle,
    Paper,
}

#[derive(Args, Debug, Serialize)]
struct RepresentationArgs {
    #[arg(long)]
    sol: PathBuf,
    #[arg(long, value_enum, default_value_t = ConstantsArg::Oracle)]
    constants: ConstantsArg,
    #[arg(long, default_value_t = 1e-4)]
    tol: f64,
    /// Optional `r,v,rhs,diff` table.
    #[arg(long)]
    rows: Option<PathBuf>,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct MapArgs {
    #[arg(long)]
    sol: PathBuf,
    #[arg(long, default_value_t = DEFAULT_RHO_MAX)]
    rho_max: f64,
    /// Profile CSV; defaults to `<sol stem>_hyperbolic.csv`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
#[command(allow_negative_numbers = true)]
struct DemoArgs {
    #[arg(long)]
    alpha: f64,
    #[arg(long, value_delimiter = ',', default_values_t = [0.0, 5.0, 10.0, 15.0])]
    probes: Vec<f64>,
    #[arg(long, default_value = "nonexistence.csv")]
    out: PathBuf,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct ErrataArgs {
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(transparent)]
struct RList(Vec<f64>);

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_r_list(s: &str) -> Result<RList, String> {
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    let values = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, stop, step] = parts[..] else {
            return Err("expected start:stop:step".into());
        };
        let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
        if !(step > 0.0) || stop < start {
            return Err("need step > 0 and stop >= start".into());
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize;
        (0..=n)
            .map(|k| ((start + k as f64 * step) * 1e12).round() / 1e12)
            .collect()
    } else {
        s.split(',').map(num).collect::<Result<Vec<_>, _>>()?
    };
    if values.is_empty() || values.iter().any(|r| !(*r > 0.0 && *r < 1.0)) {
        return Err("radii must lie in (0, 1)".into());
    }
    Ok(RList(values))
}

#[derive(Serialize)]
struct RunManifest {
    command: String,
    flags: Value,
    versions: String,
    started: String,
    finished: String,
    reports: Vec<CheckReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    errata: Vec<ErratumRow>,
}

enum Failure {
    /// Exit 2.
    Usage(String),
    /// Exit 1.
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match &e {
            Error::Domain(_) | Error::Io(_) => Failure::Usage(e.to_string()),
            Error::NonConvergence { trace, .. } | Error::PositivityLoss { trace, .. } => {
                let diag = json!({ "error": e.to_string(), "trace": trace });
                Failure::Check(
                    serde_json::to_string_pretty(&diag).unwrap_or_else(|_| e.to_string()),
                )
            }
            _ => Failure::Check(e.to_string()),
        }
    }
}

fn io_failure(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::Usage(format!("{}: {e}", path.display()))
}

fn now() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true)
}

struct Run {
    command: &'static str,
    flags: Value,
    started: String,
}

impl Run {
    fn new(command: &'static str, args: &impl Serialize) -> Self {
        Run {
            command,
            flags: serde_json::to_value(args).unwrap_or(Value::Null),
            started: now(),
        }
    }

    fn write(
        self,
        path: Option<&Path>,
        reports: Vec<CheckReport>,
        errata: Vec<ErratumRow>,
    ) -> Result<(), Failure> {
        let Some(path) = path else { return Ok(()) };
        let manifest = RunManifest {
            command: self.command.into(),
            flags: self.flags,
            versions: format!(
                "paneitz-cli {}, paneitz-core {}",
                env!("CARGO_PKG_VERSION"),
                paneitz_core::VERSION
            ),
            started: self.started,
            finished: now(),
            reports,
            errata,
        };
        let text =
            serde_json::to_string_pretty(&manifest).map_err(|e| Failure::Check(e.to_string()))?;
        std::fs::write(path, text + "\n").map_err(|e| io_failure(path, e))
    }
}

fn print_reports(reports: &[CheckReport]) -> bool {
    for r in reports {
        println!("{}", r.summary_line());
        for note in &r.notes {
            println!("  note: {note}");
        }
    }
    let passed = reports.iter().filter(|r| r.passed).count();
    println!("{passed}/{} checks passed", reports.len());
    passed == reports.len()
}

fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

fn load_solution(csv: &Path) -> Result<RadialSolution, Failure> {
    if !csv.is_file() {
        return Err(Failure::Usage(format!(
            "{}: no such solution file",
            csv.display()
        )));
    }
    let side = sidecar_path(csv);
    let text = std::fs::read_to_string(&side).map_err(|e| io_failure(&side, e))?;
    let sidecar: Value = serde_json::from_str(&text).map_err(|e| io_failure(&side, e))?;
    Ok(RadialSolution::read(csv, &sidecar)?)
}

fn verify(args: &VerifyArgs) -> Result<bool, Failure> {
    let run = Run::new("verify", args);
    let mut cfg = SuiteConfig {
        n_theta: args.n_theta,
        seed: args.seed,
        tol: args.tol,
        ..SuiteConfig::default()
    };
    if let Some(r) = &args.r_list {
        cfg.r_list = r.0.clone();
    }
    if let Some(n) = args.samples {
        cfg.fd_samples = n;
        cfg.audit_samples = n;
    }
    if cfg.n_theta < 2 {
        return Err(Failure::Usage("--n-theta must be at least 2".into()));
    }
    let reports = run_suite(args.suite, &cfg)?;
    let passed = print_reports(&reports);
    run.write(args.out.as_deref(), reports, Vec::new())?;
    Ok(passed)
}

fn solve(args: &SolveArgs) -> Result<bool, Failure> {
    if !(args.a > 0.0) {
        return Err(Failure::Usage(format!(
            "--a must be positive, got {}",
            args.a
        )));
    }
    if !(args.b >= 0.0) || !args.b.is_finite() {
        return Err(Failure::Usage(format!(
            "--b must be finite and non-negative, got {}",
            args.b
        )));
    }
    if !(args.p >= 0.0) || !args.p.is_finite() {
        return Err(Failure::Usage(format!(
            "--p must be finite and non-negative, got {}",
            args.p
        )));
    }
    let source = if args.p == 0.0 {
        SourceFn::Zero
    } else {
        SourceFn::Power(args.p)
    };
    let sol = shoot(args.a, args.b, &source, &ShootingConfig::default())?;
    sol.write_csv(&args.out)
        .map_err(|e| io_failure(&args.out, e))?;
    let side = sidecar_path(&args.out);
    let text =
        serde_json::to_string_pretty(&sol.sidecar()).map_err(|e| Failure::Check(e.to_string()))?;
    std::fs::write(&side, text + "\n").map_err(|e| io_failure(&side, e))?;
    println!(
        "v0={:.15e} w0={:.15e} residual={:.3e}",
        sol.v0, sol.w0, sol.residual
    );
    println!("wrote {} and {}", args.out.display(), side.display());
    Ok(true)
}

fn representation(args: &RepresentationArgs) -> Result<bool, Failure> {
    let run = Run::new("check-representation", args);
    let sol = load_solution(&args.sol)?;
    let consts = match args.constants {
        ConstantsArg::Oracle => RepresentationConstants::oracle(sol.a, sol.b),
        ConstantsArg::Paper => RepresentationConstants::printed(sol.a, sol.b),
    };
    let (mut report, rows) =
        check_representation(&sol, &consts, &PotentialRule::default(), args.tol)?;
    if args.constants == ConstantsArg::Paper {
        report.notes.push(
            "erratum: the printed constants (3 sqrt(pi) a, (3 sqrt(pi)/2) b) do not reproduce the boundary trace; \
             the trace forces (a, b/2)"
                .into(),
        );
    }
    if let Some(path) = &args.rows {
        write_rows_csv(path, &rows).map_err(|e| io_failure(path, e))?;
    }
    let reports = vec![report];
    let passed = print_reports(&reports);
    run.write(args.report.as_deref(), reports, Vec::new())?;
    Ok(passed)
}

fn map_hyperbolic(args: &MapArgs) -> Result<bool, Failure> {
    let run = Run::new("map hyperbolic", args);
    let sol = load_solution(&args.sol)?;
    let profile = ball_to_hyperbolic(&sol, args.rho_max)?;
    let growth = growth_coefficient(&profile)?;
    let out = args.out.clone().unwrap_or_else(|| {
        let stem = args
            .sol
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("solution");
        args.sol.with_file_name(format!("{stem}_hyperbolic.csv"))
    });
    profile.write_csv(&out).map_err(|e| io_failure(&out, e))?;
    let side = sidecar_path(&out);
    let text = serde_json::to_string_pretty(&profile.sidecar())
        .map_err(|e| Failure::Check(e.to_string()))?;
    std::fs::write(&side, text + "\n").map_err(|e| io_failure(&side, e))?;

    let expected = sol.a / SQRT_2;
    println!(
        "alpha={:.10} a/sqrt(2)={expected:.10} extrapolation_change={:.2e}",
        growth.alpha, growth.change
    );
    if let Some(w) = &growth.warning {
        println!("  warning: {w}");
    }
    let mut rep = ReportBuilder::new("growth_coefficient", 1e-3, 1e-3);
    rep.param("rho_max", args.rho_max)
        .param("change", growth.change);
    rep.compare("alpha vs a/sqrt(2)", growth.alpha, expected);
    let reports = vec![rep.finish()];
    let passed = print_reports(&reports);
    println!("wrote {}", out.display());
    run.write(args.report.as_deref(), reports, Vec::new())?;
    Ok(passed)
}

fn demo_nonexistence(args: &DemoArgs) -> Result<bool, Failure> {
    let run = Run::new("demo nonexistence", args);
    let (report, rows) =
        nonexistence_demo(args.alpha, &args.probes, &NonexistenceConfig::default())?;
    write_nonexistence_csv(&args.out, &rows).map_err(|e| io_failure(&args.out, e))?;
    println!("{:>8} {:>22} {:>22} {:>22}", "rho_x", "T", "u", "u/T");
    for r in &rows {
        println!(
            "{:>8} {:>22.14e} {:>22.14e} {:>22.14e}",
            r.rho_x, r.t, r.u, r.u_over_t
        );
    }
    let reports = vec![report];
    let passed = print_reports(&reports);
    println!("wrote {}", args.out.display());
    run.write(args.report.as_deref(), reports, Vec::new())?;
    Ok(passed)
}

fn errata(args: &ErrataArgs) -> Result<bool, Failure> {
    let run = Run::new("errata", args);
    let rows = errata_table()?;
    for row in &rows {
        println!(
            "{} [{}]",
            row.detector,
            if row.confirmed {
                "confirmed"
            } else {
                "NOT confirmed"
            }
        );
        println!("  printed: {}", row.printed);
        println!("  oracle:  {}", row.oracle);
        println!("  why:     {}", row.oracle_description);
    }
    let passed = rows.iter().all(|r| r.confirmed);
    run.write(args.report.as_deref(), Vec::new(), rows)?;
    Ok(passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Verify(a) => verify(a),
        Command::Solve(a) => solve(a),
        Command::CheckRepresentation(a) => representation(a),
        Command::Map(MapCommand::Hyperbolic(a)) => map_hyperbolic(a),
        Command::Demo(DemoCommand::Nonexistence(a)) => demo_nonexistence(a),
        Command::Errata(a) => errata(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Check(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn r_list_forms() {
        assert_eq!(
            parse_r_list("0.1:0.9:0.1").unwrap().0,
            vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]
        );
        assert_eq!(parse_r_list("0.2,0.5").unwrap().0, vec![0.2, 0.5]);
        assert!(parse_r_list("0:0.5:0.1").is_err());
        assert!(parse_r_list("0.1:0.9").is_err());
        assert!(parse_r_list("0.5:0.1:0.1").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
