//! Command-line front end. Every command writes deterministic text with
//! floats in `{:.16e}` form. Exit codes: 0 success, 2 input error,
//! 3 numerical failure.

mod config;

pub use config::{parse_bc, BcField, InitialState, OutputFormat, RunConfig};

use crate::bc_algebra::{classify, fold_left, BCClass, BoundaryCondition, SINGULAR_TOL};
use crate::error::Error;
use crate::evolution::{magnetic_trotter, trotter_error_sweep, MagneticConfig, SWEEP_HEADER};
use crate::mat2::{Mat2, C64};
use crate::spectral::{find_spectrum, SolverOptions};
use clap::{Parser, Subcommand};
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Environment variable capping the worker threads of a sweep.
pub const THREADS_VAR: &str = "BC_COMPOSE_THREADS";

#[derive(Parser, Debug)]
#[command(
    name = "bccompose",
    version,
    about = "Compose quantum boundary conditions on [0, 1] and simulate their alternation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Fold boundary conditions left with the ⋆ product and print the result.
    Compose {
        /// Boundary conditions: dirichlet | neumann | robin:A | mixed:A | pseudoperiodic:A | matrix:PATH
        #[arg(required = true, num_args = 2..)]
        bcs: Vec<String>,
    },
    /// Eigenvalues and eigenfunction coefficients up to E_MAX.
    Spectrum {
        bc: String,
        #[arg(allow_negative_numbers = true)]
        e_max: f64,
        #[arg(long, value_enum, default_value = "csv")]
        format: OutputFormat,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Trotter error sweep described by a JSON config file.
    Sweep { config: PathBuf },
    /// Alternating magnetic fluxes on the ring, in the Fourier basis.
    Magnetic {
        #[arg(long, allow_negative_numbers = true)]
        alpha1: f64,
        #[arg(long, allow_negative_numbers = true)]
        alpha2: f64,
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
        #[arg(long = "steps", short = 'n')]
        n_steps: usize,
        #[arg(long, default_value_t = 8)]
        n_modes: usize,
        /// Start from the single Fourier mode n instead of an equal superposition.
        #[arg(long, allow_negative_numbers = true)]
        mode: Option<i64>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

/// Failure classified by exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_numerical() { EXIT_NUMERICAL } else { EXIT_INPUT };
        Failure { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure { code: EXIT_INPUT, message: format!("I/O error: {e}") }
    }
}

fn num(x: f64) -> String {
    crate::sci(x)
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(std::io::BufWriter::new(std::fs::File::create(p)?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn write_matrix(out: &mut dyn Write, label: &str, m: &Mat2) -> std::io::Result<()> {
    for r in 0..2 {
        for c in 0..2 {
            let z = m.get(r, c);
            writeln!(out, "{label},{r},{c},{},{}", num(z.re), num(z.im))?;
        }
    }
    Ok(())
}

fn cmd_compose(specs: &[String], out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    let bcs: Vec<BoundaryCondition> = specs.iter().map(|s| parse_bc(s, None)).collect::<Result<_, _>>()?;
    let regular = bcs.iter().filter(|b| matches!(classify(b, SINGULAR_TOL), BCClass::Regular(_))).count();
    if regular >= 3 {
        writeln!(
            err,
            "warning: the star product is not associative for three or more regular conditions; folding left"
        )?;
    }
    let w = fold_left(&bcs, SINGULAR_TOL).expect("at least two conditions");
    let class = classify(&w, SINGULAR_TOL);
    writeln!(out, "# class={}", class.name())?;
    writeln!(out, "matrix,row,col,re,im")?;
    write_matrix(out, "U", w.matrix())?;
    if let BCClass::Regular(k) = class {
        write_matrix(out, "K", k.matrix())?;
    }
    Ok(())
}

fn cmd_spectrum(bc: &str, e_max: f64, format: OutputFormat, output: Option<&Path>) -> Result<(), Failure> {
    let u = parse_bc(bc, None)?;
    let basis = find_spectrum(&u, e_max, &SolverOptions::default())?;
    let mut out = open_output(output)?;
    match format {
        OutputFormat::Csv => basis.write_csv(&mut out)?,
        OutputFormat::JsonLines => basis.write_json_lines(&mut out)?,
    }
    out.flush()?;
    Ok(())
}

fn sweep_threads() -> Result<Option<usize>, Failure> {
    match std::env::var(THREADS_VAR) {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Failure {
                code: EXIT_INPUT,
                message: format!("{THREADS_VAR} must be a positive integer, got '{s}'"),
            }),
        },
    }
}

fn cmd_sweep(path: &Path) -> Result<(), Failure> {
    let run = RunConfig::load(path)?;
    let base = path.parent();
    let cfg = run.sweep(base)?;
    let psi0 = run.initial_state.sample(run.grid_size)?;
    let output = run.output.as_ref().map(|p| match (base, p.is_relative()) {
        (Some(b), true) => b.join(p),
        _ => p.clone(),
    });

    let pool = {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(n) = sweep_threads()? {
            b = b.num_threads(n);
        }
        b.build().map_err(|e| Failure { code: EXIT_INPUT, message: e.to_string() })?
    };
    let result = pool.install(|| trotter_error_sweep(&cfg, &psi0));

    let mut out = open_output(output.as_deref())?;
    match result {
        Ok(report) => {
            match run.format {
                OutputFormat::Csv => {
                    writeln!(out, "{SWEEP_HEADER}")?;
                    for r in &report.per_n {
                        writeln!(out, "{}", r.csv())?;
                    }
                }
                OutputFormat::JsonLines => {
                    for r in &report.per_n {
                        writeln!(out, "{}", r.json())?;
                    }
                }
            }
            out.flush()?;
            Ok(())
        }
        Err(e) => {
            if run.format == OutputFormat::Csv {
                writeln!(out, "{SWEEP_HEADER}")?;
            }
            writeln!(out, "# failure: {e}")?;
            out.flush()?;
            Err(e.into())
        }
    }
}

fn cmd_magnetic(
    cfg: MagneticConfig,
    mode: Option<i64>,
    output: Option<&Path>,
    err: &mut dyn Write,
) -> Result<(), Failure> {
    cfg.validate()?;
    let d = cfg.dimension();
    let c0: Vec<C64> = match mode {
        None => vec![C64::new(1.0 / (d as f64).sqrt(), 0.0); d],
        Some(n) => {
            if n.unsigned_abs() as usize > cfg.n_modes {
                return Err(Error::InvalidInput(format!("mode {n} outside ±{}", cfg.n_modes)).into());
            }
            let mut c = vec![C64::new(0.0, 0.0); d];
            c[(n + cfg.n_modes as i64) as usize] = C64::new(1.0, 0.0);
            c
        }
    };
    let outcome = magnetic_trotter(&cfg, &c0)?;
    writeln!(err, "using H_alpha = (-i d/dx + alpha)^2 for both fluxes")?;
    let mut out = open_output(output)?;
    outcome.write_csv(&mut out)?;
    out.flush()?;
    Ok(())
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let mut stderr = std::io::stderr().lock();
    let result = match cli.command {
        Command::Compose { bcs } => {
            let mut stdout = std::io::stdout().lock();
            cmd_compose(&bcs, &mut stdout, &mut stderr)
        }
        Command::Spectrum { bc, e_max, format, output } => cmd_spectrum(&bc, e_max, format, output.as_deref()),
        Command::Sweep { config } => cmd_sweep(&config),
        Command::Magnetic { alpha1, alpha2, t, n_steps, n_modes, mode, output } => {
            cmd_magnetic(MagneticConfig { alpha1, alpha2, t, n_steps, n_modes }, mode, output.as_deref(), &mut stderr)
        }
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}
