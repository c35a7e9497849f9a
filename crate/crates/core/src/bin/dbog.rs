use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use dbog::config::{FieldConfigFile, Metadata};
use dbog::gauge::{bogomolny_residual, curvature, equivalence_check};
use dbog::lattice::{Boundary, Lattice};
use dbog::random::FieldRng;
use dbog::report::{write_json_line, CheckRecord};
use dbog::solver::{solve, Method, ParameterVector, SolveOptions, SolveReport};
use dbog::verify::{run_suite, Suite, VerifyConfig};
use dbog::Error;

/// Discrete exterior calculus checks and a lattice Bogomolny solver.
#[derive(Parser)]
#[command(name = "dbog", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an identity suite on seeded random data; one JSON line per check.
    Verify {
        #[arg(value_parser = clap::builder::ValueParser::new(parse_suite))]
        suite: Suite,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Lattice extents such as 3x3x3; repeat for several. Defaults depend on the suite.
        #[arg(long = "lattice", value_parser = parse_extents)]
        lattices: Vec<Extents>,
        #[arg(long, default_value = "periodic", value_parser = parse_boundary)]
        boundary: Boundary,
        /// Random samples per check.
        #[arg(long, default_value_t = 25)]
        trials: usize,
    },
    /// Evaluate the Bogomolny residual of a field configuration.
    Residual {
        #[arg(long)]
        config: PathBuf,
        /// Also write the JSON report here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Minimise the Bogomolny residual and write the final configuration.
    Solve {
        #[arg(long, value_enum, default_value_t = Init::Zeros)]
        init: Init,
        /// Starting configuration for `--init config`.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "2x2x2", value_parser = parse_extents)]
        lattice: Extents,
        #[arg(long, default_value = "periodic", value_parser = parse_boundary)]
        boundary: Boundary,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Noise amplitude for `--init noise`.
        #[arg(long, default_value_t = 1e-2)]
        amp: f64,
        #[arg(long, default_value = "gauss_newton", value_parser = parse_method)]
        method: Method,
        #[arg(long, default_value_t = 10_000)]
        max_iter: usize,
        /// Objective tolerance.
        #[arg(long, default_value_t = 1e-18)]
        tol: f64,
        #[arg(long, default_value_t = 1e-12)]
        tol_step: f64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Lift a 3D configuration to 4D and compare the two residual systems.
    Reduce {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 2)]
        n4: usize,
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum Init {
    Zeros,
    Noise,
    Config,
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse()
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse()
}

fn parse_boundary(s: &str) -> Result<Boundary, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Lattice extents written as `3x3x3`.
#[derive(Clone, Debug)]
struct Extents(Vec<usize>);

fn parse_extents(s: &str) -> Result<Extents, String> {
    s.split('x')
        .map(|part| part.trim().parse::<usize>().map_err(|_| format!("bad lattice '{s}', expected e.g. 3x3x3")))
        .collect::<Result<_, _>>()
        .map(Extents)
}

/// Failure of a command, mapped onto the exit-code contract.
enum Failure {
    /// Bad input: exit code 2.
    Usage(String),
    /// Numerical failure: exit code 1.
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Divergence { .. } => Failure::Numerical(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Numerical(format!("i/o error: {e}"))
    }
}

fn emit<T: Serialize>(value: &T, report: Option<&Path>) -> Result<(), Failure> {
    let stdout = io::stdout();
    write_json_line(&mut stdout.lock(), value)?;
    if let Some(path) = report {
        let mut buf = Vec::new();
        write_json_line(&mut buf, value)?;
        fs::write(path, buf)?;
    }
    Ok(())
}

fn read_config(path: &Path) -> Result<FieldConfigFile, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    FieldConfigFile::parse(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn verify(suite: Suite, config: VerifyConfig) -> Result<(), Failure> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let mut failed = Vec::new();
    let mut write_error = None;
    run_suite(suite, &config, |record: CheckRecord| {
        if !record.passed() {
            failed.push(record.name.clone());
        }
        if let Err(e) = write_json_line(&mut out, &record) {
            write_error.get_or_insert(e);
        }
    })?;
    out.flush()?;
    if let Some(e) = write_error {
        return Err(e.into());
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Numerical(format!("failed checks: {}", failed.join(", "))))
    }
}

#[derive(Serialize)]
struct ResidualRecord {
    command: &'static str,
    lattice: String,
    plane_norms: Vec<(String, f64)>,
    sum_sq: f64,
    objective: f64,
    max_component: f64,
    curvature_su2_defect: f64,
}

fn residual(config: &Path, report: Option<&Path>) -> Result<(), Failure> {
    let file = read_config(config)?;
    let (a, phi) = file.to_fields()?;
    let r = bogomolny_residual(&a, &phi)?;
    let record = ResidualRecord {
        command: "residual",
        lattice: a.lattice().to_string(),
        plane_norms: r.plane_norms().into_iter().map(|(plane, v)| (plane.label(), v)).collect(),
        sum_sq: r.sum_sq,
        objective: 0.5 * r.sum_sq,
        max_component: r.max_component(),
        curvature_su2_defect: curvature(&a)?.su2_defect(),
    };
    for (plane, v) in &record.plane_norms {
        eprintln!("plane {plane}: {v:e}");
    }
    eprintln!("objective: {:e}", record.objective);
    eprintln!("curvature su(2) defect: {:e}", record.curvature_su2_defect);
    emit(&record, report)
}

#[derive(Serialize)]
struct SolveRecord {
    command: &'static str,
    lattice: String,
    init: Init,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    options: SolveOptions,
    #[serde(flatten)]
    report: SolveReport,
}

#[derive(Serialize)]
struct DivergenceRecord {
    command: &'static str,
    status: &'static str,
    detail: String,
}

struct SolveArgs {
    init: Init,
    config: Option<PathBuf>,
    lattice: Lattice,
    seed: u64,
    amp: f64,
    options: SolveOptions,
    out: PathBuf,
    report: Option<PathBuf>,
}

fn run_solve(args: SolveArgs) -> Result<(), Failure> {
    let (lattice, start, seed) = match args.init {
        Init::Zeros => (args.lattice.clone(), ParameterVector::zeros(&args.lattice), None),
        Init::Noise => {
            if !(args.amp.is_finite() && args.amp >= 0.0) {
                return Err(Failure::Usage(format!("--amp must be a non-negative number, got {}", args.amp)));
            }
            let mut rng = FieldRng::new(args.seed);
            (args.lattice.clone(), ParameterVector::random(&args.lattice, &mut rng, args.amp), Some(args.seed))
        }
        Init::Config => {
            let path = args.config.as_deref().ok_or_else(|| Failure::Usage("--init config needs --config".into()))?;
            let file = read_config(path)?;
            let (a, phi) = file.to_fields()?;
            let seed = file.metadata.and_then(|m| m.seed);
            (a.lattice().clone(), ParameterVector::encode(&a, &phi)?, seed)
        }
    };
    let (p, report) = match solve(&start, &lattice, &args.options) {
        Ok(result) => result,
        Err(e @ Error::Divergence { .. }) => {
            let record = DivergenceRecord { command: "solve", status: "divergence", detail: e.to_string() };
            emit(&record, args.report.as_deref())?;
            return Err(e.into());
        }
        Err(e) => return Err(e.into()),
    };
    let (a, phi) = p.decode(&lattice)?;
    FieldConfigFile::from_fields(&a, &phi, Some(Metadata::new(seed)))?.write(&args.out)?;
    eprintln!(
        "{:?} after {} steps, objective {:e}",
        report.termination, report.iterations, report.final_objective
    );
    let record = SolveRecord {
        command: "solve",
        lattice: lattice.to_string(),
        init: args.init,
        seed,
        options: args.options,
        report,
    };
    emit(&record, args.report.as_deref())
}

#[derive(Serialize)]
struct ReduceRecord {
    command: &'static str,
    lattice: String,
    n4: usize,
    status: &'static str,
    max_discrepancy: f64,
    max_delta4: f64,
    bogomolny_sum_sq: f64,
    selfdual_sum_sq: f64,
}

fn reduce(config: &Path, n4: usize, report: Option<&Path>) -> Result<(), Failure> {
    let file = read_config(config)?;
    let (a, phi) = file.to_fields()?;
    let r = equivalence_check(&a, &phi, n4)?;
    let exact = r.max_discrepancy == 0.0 && r.max_delta4 == 0.0;
    let record = ReduceRecord {
        command: "reduce",
        lattice: a.lattice().to_string(),
        n4,
        status: if exact { "pass" } else { "fail" },
        max_discrepancy: r.max_discrepancy,
        max_delta4: r.max_delta4,
        bogomolny_sum_sq: r.bogomolny_sum_sq,
        selfdual_sum_sq: r.selfdual_sum_sq,
    };
    emit(&record, report)?;
    if exact {
        Ok(())
    } else {
        Err(Failure::Numerical(format!("lifted residual differs by {:e}", r.max_discrepancy)))
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(value) = std::env::var("DBOG_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Failure::Usage(format!("DBOG_THREADS must be a positive integer, got '{value}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::Usage(e.to_string()))
}

fn run(cli: Cli) -> Result<(), Failure> {
    configure_threads()?;
    match cli.command {
        Command::Verify { suite, seed, lattices, boundary, trials } => {
            let extents = lattices.into_iter().map(|e| e.0).collect();
            verify(suite, VerifyConfig { seed, extents, boundary, trials })
        }
        Command::Residual { config, report } => residual(&config, report.as_deref()),
        Command::Solve {
            init,
            config,
            lattice,
            boundary,
            seed,
            amp,
            method,
            max_iter,
            tol,
            tol_step,
            out,
            report,
        } => {
            let lattice = Lattice::new(lattice.0.clone(), vec![boundary; lattice.0.len()])?;
            let options = SolveOptions { max_iter, tol_objective: tol, tol_step, method };
            run_solve(SolveArgs { init, config, lattice, seed, amp, options, out, report })
        }
        Command::Reduce { config, n4, report } => reduce(&config, n4, report.as_deref()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
