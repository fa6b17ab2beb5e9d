//! `shiftspace`: JSON front end for the shiftspace toolkit.

mod commands;
mod input;

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::input::{required, CliError, CliResult};

#[derive(Parser, Debug)]
#[command(name = "shiftspace", version, about = "Generalized backward shifts, state spaces and kernels for rational functions")]
struct Cli {
    /// Tolerance for pass/fail (defaults: 1e-9; decompose and quadrature Cuntz 1e-7; polynomial Cuntz 1e-12).
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    /// Trapezoid nodes per circle.
    #[arg(long, global = true, default_value_t = 2048)]
    nodes: usize,
    /// Taylor order of F.
    #[arg(long, global = true, default_value_t = 32)]
    taylor_order: usize,
    /// Seed for randomized samples.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    output: Option<std::path::PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Zeros and poles of r.
    Roots {
        #[arg(long)]
        r: String,
    },
    /// The fiber r^{-1}(alpha) with r' at each point.
    Preimages {
        #[arg(long)]
        r: String,
        #[arg(long)]
        alpha: String,
    },
    /// R_alpha f at sample points and the resolvent identity residual.
    Resolvent {
        #[arg(long)]
        r: String,
        #[arg(long)]
        f: String,
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        beta: Option<String>,
        /// JSON list of points; random when omitted.
        #[arg(long)]
        points: Option<String>,
        #[arg(long, default_value_t = 50)]
        samples: usize,
    },
    /// The associated symmetric matrix X(J, r) and its signature factorization.
    Xmatrix {
        #[arg(long)]
        r: String,
        #[arg(long, default_value = "identity")]
        j: String,
        #[arg(long)]
        alpha: Option<String>,
    },
    /// f = (Z_r ⊗ I) F∘r by contour quadrature.
    Decompose {
        #[arg(long)]
        r: String,
        #[arg(long)]
        f: String,
    },
    /// Cuntz relations for the weighted composition operators.
    CuntzCheck {
        #[arg(long)]
        r: String,
        #[arg(long, default_value_t = 32)]
        degree: usize,
    },
    /// Gram matrix of a kernel family on a grid.
    Kernel {
        #[arg(long)]
        r: String,
        #[arg(long)]
        family: String,
        #[arg(long)]
        grid: Option<String>,
        /// Family parameters as JSON.
        #[arg(long)]
        input: Option<String>,
    },
    /// Solve A*PA − B*PB = C*JC.
    Stein {
        /// JSON object with A, B, C and optionally J.
        #[arg(long)]
        input: Option<String>,
    },
    /// Minimal-norm multipoint interpolation.
    Interp {
        #[arg(long)]
        r: String,
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long)]
        w: Option<String>,
        #[arg(long)]
        c: Option<String>,
        #[arg(long)]
        gamma: String,
        #[arg(long, default_value = "exponential")]
        kernel: String,
    },
    /// Golden X-matrix examples.
    VerifyPaper,
}

fn emit(cli: &Cli, text: &str) -> CliResult<()> {
    match &cli.output {
        Some(path) => std::fs::write(path, format!("{text}\n")).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            writeln!(out, "{text}").map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

fn run(cli: &Cli) -> CliResult<bool> {
    if let Some(t) = cli.tolerance {
        if !(t > 0.0 && t.is_finite()) {
            return Err(CliError::Usage(format!("--tolerance must be positive, got {t}")));
        }
    }
    if cli.nodes == 0 || cli.taylor_order == 0 {
        return Err(CliError::Usage("--nodes and --taylor-order must be positive".into()));
    }
    let tol = cli.tolerance.unwrap_or(1e-9);
    let outcome = match &cli.command {
        Command::Roots { r } => commands::roots(r)?,
        Command::Preimages { r, alpha } => commands::preimages(r, alpha)?,
        Command::Resolvent { r, f, alpha, beta, points, samples } => commands::resolvent(commands::ResolventArgs {
            r,
            f,
            alpha,
            beta: beta.as_deref(),
            points: points.as_deref(),
            samples: *samples,
            seed: cli.seed,
            tolerance: tol,
        })?,
        Command::Xmatrix { r, j, alpha } => commands::xmatrix(r, j, alpha.as_deref())?,
        Command::Decompose { r, f } => {
            commands::decompose_cmd(r, f, cli.nodes, cli.taylor_order, cli.tolerance.unwrap_or(1e-7))?
        }
        Command::CuntzCheck { r, degree } => commands::cuntz_check(r, *degree, cli.nodes, cli.tolerance)?,
        Command::Kernel { r, family, grid, input } => commands::kernel(r, family, grid.as_deref(), input.as_deref(), tol)?,
        Command::Stein { input } => commands::stein(required("input", input)?, tol)?,
        Command::Interp { r, alpha, w, c, gamma, kernel } => commands::interp(commands::InterpArgs {
            r,
            alpha: alpha.as_deref(),
            w: w.as_deref(),
            c: c.as_deref(),
            gamma,
            kernel,
            tolerance: tol,
        })?,
        Command::VerifyPaper => {
            let (lines, all) = commands::golden_examples(tol)?;
            emit(cli, &lines.join("\n"))?;
            return Ok(all);
        }
    };
    let text = serde_json::to_string(&outcome.value).map_err(|e| CliError::Io(e.to_string()))?;
    emit(cli, &text)?;
    Ok(outcome.passed)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("SHIFTSPACE_LOG")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    log::debug!("{:?}", cli.command);
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("tolerance exceeded");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(1)
        }
    }
}
