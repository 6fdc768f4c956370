use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use curvfunc::euler_lagrange::{constrained_residual_fts, identity_gaps, weitzenbock_gap_fts};
use curvfunc::functionals::{self, FunctionalParams, RIEMANN_REPORT_FACTOR};
use curvfunc::geometry::curvature_of;
use curvfunc::report::{self, read_solve_config, read_spec, to_value, RunReport};
use curvfunc::rigidity::pinching_margin;
use curvfunc::solver::{self, t_grid, Family, SolveConfig};
use curvfunc::tensor::{min_sectional, SectionalStrategy};
use curvfunc::tol::Tolerances;
use curvfunc::{verify, Error};

const EXIT_SUITE_FAILURE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_NONCONVERGENCE: u8 = 3;

/// Quadratic curvature functionals on homogeneous model geometries.
#[derive(Parser)]
#[command(name = "curvfunc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Curvature summary of a geometry file.
    Describe {
        spec: PathBuf,
        #[command(flatten)]
        out: ReportOut,
    },
    /// Euler-Lagrange residuals and identity gaps of a geometry file.
    Residual {
        spec: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        s: f64,
        #[command(flatten)]
        out: ReportOut,
    },
    /// Critical points of a metric family at one value of t.
    Solve {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
        #[command(flatten)]
        table: TableOut,
    },
    /// Critical points along an equally spaced t grid, with continuation.
    Sweep {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, allow_hyphen_values = true)]
        t_min: f64,
        #[arg(long, allow_hyphen_values = true)]
        t_max: f64,
        #[arg(long)]
        steps: usize,
        #[command(flatten)]
        table: TableOut,
    },
    /// Run verification suites; exits 1 if any fails.
    Verify {
        /// Suite name, or `all`.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// List suite names and exit.
        #[arg(long)]
        list: bool,
        #[command(flatten)]
        out: ReportOut,
    },
}

#[derive(Args)]
struct ReportOut {
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct FamilyArgs {
    /// `berger` or `diagonal-su2`.
    #[arg(long)]
    family: Family,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    s: f64,
    /// TOML solver configuration; absent keys keep their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the configuration seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct TableOut {
    /// Write the JSON report to this file.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Write the CSV to this file instead of stdout.
    #[arg(long)]
    csv: Option<PathBuf>,
}

/// Failure with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::ReductionMismatch { .. } => EXIT_NONCONVERGENCE,
            _ => EXIT_INPUT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn write_out(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure {
            code: EXIT_INPUT,
            message: format!("{}: {e}", p.display()),
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("CURVFUNC_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure {
            code: EXIT_INPUT,
            message: format!("CURVFUNC_THREADS must be a positive integer, got `{v}`"),
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure {
            code: EXIT_INPUT,
            message: format!("thread pool: {e}"),
        })
}

fn describe(spec_path: &Path) -> Result<RunReport, Failure> {
    let spec = read_spec(spec_path)?;
    let hc = curvature_of(&spec)?;
    let cp = &hc.cp;
    let ms = min_sectional(&cp.rm, SectionalStrategy::Auto);
    let results = json!({
        "dimension": cp.n,
        "R": cp.r,
        "Ric_norm_sq": cp.ric_norm_sq(),
        "E_norm_sq": cp.e_norm_sq(),
        "W_norm_sq": cp.w_norm_sq(),
        "Rm_norm_sq": cp.rm_norm_sq(),
        "sigma2_A": cp.sigma2_a,
        "ricci": cp.ric.rows(),
        "ricci_spectrum": cp.ricci_spectrum(),
        "coordinate_sectionals": cp.sectionals,
        "min_sectional": ms.value,
        "sectional_flag": ms.flag.as_str(),
        "volume": volume_value(&hc.volume),
    });
    Ok(RunReport::new(
        "describe",
        json!({ "spec": to_value(&spec) }),
        results,
        None,
    ))
}

fn volume_value(v: &curvfunc::geometry::Volume) -> Value {
    match v.finite() {
        Some(x) => json!(x),
        None => json!("noncompact"),
    }
}

fn residual(spec_path: &Path, t: f64, s: f64) -> Result<RunReport, Failure> {
    let spec = read_spec(spec_path)?;
    let p = FunctionalParams::new(t, s)?;
    let hc = curvature_of(&spec)?;
    let value = functionals::eval(&hc, p).ok();
    let res = constrained_residual_fts(&hc, p, value.map(|v| v.lambda))?;
    let gaps = identity_gaps(&hc, t);
    let mut results = json!({
        "tensor_residual": res.tensor.rows(),
        "tensor_residual_norm": res.tensor_norm(),
        "tensor_residual_eigenvalues": res.tensor.eigenvalues(),
        "scalar_residual": res.scalar,
        "lambda": value.map(|v| v.lambda),
        "lagrange_c": res.lagrange_c,
        "density": functionals::density(&hc.cp, p),
        "volume": volume_value(&hc.volume),
        "identity_gaps": to_value(&gaps),
        // homogeneous models have constant scalar curvature
        "constant_scalar_curvature": "automatic (homogeneous)",
        "tolerances": to_value(&Tolerances::default()),
    });
    let obj = results.as_object_mut().expect("object");
    if s != 0.0 {
        obj.insert(
            "weitzenbock_gap_fts".into(),
            json!(weitzenbock_gap_fts(&hc, p)),
        );
    }
    if t == -0.25 && s == 0.0 {
        if let Some(v) = value {
            obj.insert(
                "riemann_functional".into(),
                json!(RIEMANN_REPORT_FACTOR * v.normalized),
            );
        }
    }
    if hc.dim() == 3 {
        obj.insert("pinching".into(), to_value(&pinching_margin(&hc.cp, t)?));
    }
    Ok(RunReport::new(
        "residual",
        json!({ "spec": to_value(&spec), "t": t, "s": s }),
        results,
        None,
    ))
}

fn solve_config(args: &FamilyArgs) -> Result<SolveConfig, Failure> {
    let mut config = match &args.config {
        Some(p) => read_solve_config(p)?,
        None => SolveConfig::default(),
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    config.validate()?;
    Ok(config)
}

fn solve_inputs(args: &FamilyArgs, config: &SolveConfig, extra: Value) -> Value {
    let mut v = json!({
        "family": args.family.name(),
        "s": args.s,
        "config": to_value(config),
    });
    if let (Some(o), Value::Object(e)) = (v.as_object_mut(), extra) {
        o.extend(e);
    }
    v
}

/// Returns the CSV, the report and whether every solve produced points.
fn solve_cmd(args: &FamilyArgs, t: f64) -> Result<(String, RunReport, bool), Failure> {
    let config = solve_config(args)?;
    let p = FunctionalParams::new(t, args.s)?;
    let out = solver::solve(args.family, p, &config)?;
    let csv = report::points_csv(args.family, &out.points)?;
    let ok = !out.points.is_empty();
    let rep = RunReport::new(
        "solve",
        solve_inputs(args, &config, json!({ "t": t })),
        json!({ "points": to_value(&out.points), "diagnostics": to_value(&out.diagnostics) }),
        Some(config.seed),
    );
    Ok((csv, rep, ok))
}

fn sweep_cmd(
    args: &FamilyArgs,
    t_min: f64,
    t_max: f64,
    steps: usize,
) -> Result<(String, RunReport, bool), Failure> {
    let config = solve_config(args)?;
    let grid = t_grid(t_min, t_max, steps)?;
    let sw = solver::sweep(args.family, &grid, args.s, &config)?;
    let csv = report::sweep_csv(args.family, &sw)?;
    let ok = sw.rows.iter().all(|r| r.status == "ok");
    let rep = RunReport::new(
        "sweep",
        solve_inputs(
            args,
            &config,
            json!({ "t_min": t_min, "t_max": t_max, "steps": steps }),
        ),
        to_value(&sw),
        Some(config.seed),
    );
    Ok((csv, rep, ok))
}

fn table_output(
    (csv, rep, ok): (String, RunReport, bool),
    table: &TableOut,
    what: &str,
) -> Result<ExitCode, Failure> {
    if let Some(p) = &table.report {
        write_out(Some(p), &rep.to_json()?)?;
    }
    write_out(table.csv.as_deref(), &csv)?;
    if ok {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("curvfunc: {what}: no critical point converged for at least one t; see the report diagnostics");
        if table.report.is_none() {
            eprint!("{}", rep.to_json()?);
        }
        Ok(ExitCode::from(EXIT_NONCONVERGENCE))
    }
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    configure_threads()?;
    match cli.command {
        Command::Describe { spec, out } => {
            let rep = describe(&spec)?;
            write_out(out.report.as_deref(), &rep.to_json()?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Residual { spec, t, s, out } => {
            let rep = residual(&spec, t, s)?;
            write_out(out.report.as_deref(), &rep.to_json()?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Solve { family, t, table } => {
            table_output(solve_cmd(&family, t)?, &table, "solve")
        }
        Command::Sweep {
            family,
            t_min,
            t_max,
            steps,
            table,
        } => table_output(sweep_cmd(&family, t_min, t_max, steps)?, &table, "sweep"),
        Command::Verify {
            suite,
            seed,
            list,
            out,
        } => {
            if list {
                println!("{}", verify::suite_names().join("\n"));
                return Ok(ExitCode::SUCCESS);
            }
            let outcomes = verify::run(&suite, seed)?;
            let passed = outcomes.iter().all(|o| o.passed);
            let mut rep = RunReport::new(
                "verify",
                json!({ "suite": suite }),
                json!({ "passed": passed }),
                Some(seed),
            );
            rep.suite_outcomes = outcomes;
            write_out(out.report.as_deref(), &rep.to_json()?)?;
            for o in rep.suite_outcomes.iter().filter(|o| !o.passed) {
                eprintln!(
                    "curvfunc: suite {} failed: {} of {} checks violated",
                    o.name, o.violations, o.trials
                );
            }
            Ok(if passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_SUITE_FAILURE)
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("curvfunc: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
