//! Command-line front end.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::bpoly::{read_poly, BivariatePoly};
use crate::error::Error;
use crate::rangeset::{hull_membership, hull_points, interval_sweep_f12, mixed_layout, rearrangement_extremes, OrbitSpec};
use crate::solve::{gmd_mismatch, solve, SolveOptions, SolveStatus, SCHEMA};
use crate::spectral::{necessary_battery, CheckStatus};
use crate::tol::Tolerances;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NONE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_BREACH: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "detrep", version, about = "Determinantal representations of bivariate polynomials")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run the necessary conditions.
    Analyze(PolyArgs),
    /// Search for a representation.
    Solve(SolveArgs),
    /// Permutation images, extremes and the f12 sweep.
    Range(RangeArgs),
}

#[derive(Args, Debug, Clone)]
pub struct PolyArgs {
    /// Polynomial expression or JSON, or a file containing one.
    #[arg(long, short)]
    pub input: Option<String>,
    /// Same as --input.
    pub poly: Option<String>,
    #[arg(long)]
    pub json: bool,
    #[arg(long, default_value_t = 8)]
    pub max_degree: usize,
    #[arg(long)]
    pub tol_root: Option<f64>,
    #[arg(long)]
    pub tol_ortho: Option<f64>,
    #[arg(long)]
    pub tol_residual: Option<f64>,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[command(flatten)]
    pub poly: PolyArgs,
    /// Report every representation found, not just the first.
    #[arg(long)]
    pub all: bool,
    /// Also decide Hermitian feasibility (size 3).
    #[arg(long)]
    pub hermitian_feasibility: bool,
}

#[derive(Args, Debug)]
pub struct RangeArgs {
    #[command(flatten)]
    pub poly: PolyArgs,
    /// Spectrum of the first matrix, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub u1: Option<Vec<f64>>,
    /// Spectrum of the second matrix, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub w1: Option<Vec<f64>>,
    #[arg(long)]
    pub extremes: bool,
    /// Coefficient to sweep; only `f12` is supported.
    #[arg(long)]
    pub sweep: Option<String>,
    #[arg(long)]
    pub f11: Option<f64>,
    #[arg(long)]
    pub f21: Option<f64>,
    #[arg(long, default_value_t = 0.01)]
    pub step: f64,
    /// Emit the sweep samples as CSV.
    #[arg(long)]
    pub csv: bool,
}

impl PolyArgs {
    fn tolerances(&self) -> Tolerances {
        let mut t = Tolerances::default();
        if let Some(v) = self.tol_root {
            t.root = v;
        }
        if let Some(v) = self.tol_ortho {
            t.ortho = v;
        }
        if let Some(v) = self.tol_residual {
            t.residual = v;
        }
        t
    }

    fn raw(&self) -> Option<&str> {
        self.input.as_deref().or(self.poly.as_deref())
    }

    fn read(&self) -> Result<BivariatePoly, String> {
        let raw = self.raw().ok_or("no polynomial given")?;
        let path = PathBuf::from(raw);
        let text = if path.is_file() {
            std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?
        } else {
            raw.to_string()
        };
        read_poly(text.trim(), self.max_degree).map_err(|e: Error| e.to_string())
    }
}

fn emit<T: Serialize>(out: &mut dyn Write, value: &T) {
    let _ = writeln!(out, "{}", serde_json::to_string_pretty(value).expect("serializable"));
}

#[derive(Serialize)]
struct AnalyzeJson<'a> {
    schema: u32,
    polynomial: String,
    passed: bool,
    summary: String,
    battery: &'a crate::spectral::BatteryReport,
}

fn analyze(args: &PolyArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let p = match args.read() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_INPUT;
        }
    };
    let report = necessary_battery(&p, &args.tolerances());
    let summary = match report.first_failure() {
        None => "all necessary conditions pass".to_string(),
        Some(f) => format!("{} fails, axis {}", f.name.replace('_', " "), f.axis),
    };
    if args.json {
        emit(out, &AnalyzeJson { schema: SCHEMA, polynomial: p.to_expression(), passed: report.passed, summary, battery: &report });
    } else {
        let _ = writeln!(out, "{summary}");
        for c in &report.checks {
            let status = match c.status {
                CheckStatus::Pass => "pass",
                CheckStatus::Fail => "FAIL",
                CheckStatus::Skipped => "skip",
            };
            let _ = writeln!(out, "  [{status}] {} (axis {}) {}", c.name, c.axis, c.detail);
        }
    }
    EXIT_OK
}

fn solve_cmd(args: &SolveArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let p = match args.poly.read() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_INPUT;
        }
    };
    let tol = args.poly.tolerances();
    let opts = SolveOptions { all: args.all, hermitian_feasibility: args.hermitian_feasibility, tolerances: tol.clone() };
    let report = solve(&p, &opts);
    let breach = report
        .representations
        .iter()
        .map(|r| gmd_mismatch(&p, r))
        .find(|&m| !(m <= 10.0 * tol.residual));
    if args.poly.json {
        emit(out, &report);
    } else {
        let _ = writeln!(out, "status: {:?}", report.status);
        let _ = writeln!(out, "{}", report.diagnostic);
        for (k, r) in report.representations.iter().enumerate() {
            let _ = writeln!(out, "representation {} (residual {:.3e})", k + 1, r.residual);
            let _ = writeln!(out, "D1 = {:?}", r.d1);
            let _ = write!(out, "A2 ={}", r.a2);
        }
        if let Some(rz) = &report.rz {
            if let Some(w) = rz.witness {
                let _ = writeln!(out, "restriction along ({:.4}, {:.4}) has complex roots", w[0], w[1]);
            }
        }
    }
    if let Some(m) = breach {
        let _ = writeln!(err, "internal error: a returned representation misses the input by {m:e}");
        return EXIT_BREACH;
    }
    match report.status {
        SolveStatus::Found => EXIT_OK,
        _ => EXIT_NONE,
    }
}

#[derive(Serialize)]
struct RangeJson {
    schema: u32,
    orbit: OrbitSpec,
    layout: Vec<(usize, usize)>,
    hull: Vec<crate::rangeset::HullTuple>,
    #[serde(skip_serializing_if = "Option::is_none")]
    membership: Option<crate::smallnum::LpResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    extremes: Option<crate::rangeset::Extremes>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sweep: Option<crate::rangeset::SweepReport>,
}

fn range(args: &RangeArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let tol = args.poly.tolerances();
    let poly = if args.poly.raw().is_some() {
        match args.poly.read() {
            Ok(p) => Some(p),
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                return EXIT_INPUT;
            }
        }
    } else {
        None
    };
    let spec = match (&args.u1, &args.w1, &poly) {
        (Some(u), Some(w), _) => OrbitSpec::new(u.clone(), w.clone()),
        (_, _, Some(p)) => OrbitSpec::from_poly(p, tol.root),
        _ => Err(Error::InvalidGrid("give a polynomial or both --u1 and --w1".into())),
    };
    let spec = match spec {
        Ok(s) => s,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_INPUT;
        }
    };
    let layout = mixed_layout(spec.d());
    let membership = poly.as_ref().filter(|p| p.degree() == spec.d()).and_then(|p| {
        let tuple: Vec<f64> = layout.iter().map(|&(a, b)| p.coeff(a, b)).collect();
        hull_membership(&spec, &tuple, 1e-6).ok()
    });
    let extremes = args.extremes.then(|| rearrangement_extremes(&spec));
    let sweep = match args.sweep.as_deref() {
        None => None,
        Some("f12") => {
            let Some(p) = &poly else {
                let _ = writeln!(err, "error: the sweep needs a polynomial template");
                return EXIT_INPUT;
            };
            let f11 = args.f11.unwrap_or(p.coeff(1, 1));
            let f21 = args.f21.unwrap_or(p.coeff(2, 1));
            match interval_sweep_f12(p, f11, f21, args.step, &tol) {
                Ok(s) => Some(s),
                Err(e) => {
                    let _ = writeln!(err, "error: {e}");
                    return EXIT_INPUT;
                }
            }
        }
        Some(other) => {
            let _ = writeln!(err, "error: unsupported sweep coefficient {other}");
            return EXIT_INPUT;
        }
    };
    if args.csv {
        match &sweep {
            Some(s) => {
                let _ = write!(out, "{}", s.to_csv());
            }
            None => {
                let _ = writeln!(out, "{}", layout.iter().map(|(a, b)| format!("f{a}{b}")).collect::<Vec<_>>().join(","));
                for h in hull_points(&spec) {
                    let row: Vec<String> = h.values.iter().map(|v| v.to_string()).collect();
                    let _ = writeln!(out, "{}", row.join(","));
                }
            }
        }
        return EXIT_OK;
    }
    let hull = hull_points(&spec);
    emit(out, &RangeJson { schema: SCHEMA, orbit: spec, layout, hull, membership, extremes, sweep });
    EXIT_OK
}

/// Runs a parsed command and returns the process exit code.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match &cli.command {
        Command::Analyze(a) => analyze(a, out, err),
        Command::Solve(s) => solve_cmd(s, out, err),
        Command::Range(r) => range(r, out, err),
    }
}

pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(&cli, &mut stdout.lock(), &mut stderr.lock())
}
