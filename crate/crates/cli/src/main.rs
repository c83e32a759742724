//! `sympfact`: check, factor, synthesize, complete and optimize real
//! symplectic matrices.
//!
//! Exit status: 0 success, 1 a precondition or verification failed, 2 file
//! or argument problem, 3 the optimizer stopped without converging.

mod commands;
mod error;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sympfact_core::optim::OptimizerConfig;
use sympfact_core::symplectic::DEFAULT_SYMPLECTIC_TOL;

use commands::{FactorArgs, Mode, OptimizeArgs, Variant};
use error::CliError;
use io::ParamKind;

#[derive(Debug, Parser)]
#[command(name = "sympfact", version, about, propagate_version = true)]
struct Cli {
    /// Tolerance on the normalized symplecticity residual
    /// ‖HᵀJH − J‖_F / (1 + ‖H‖_F²).
    #[arg(long, global = true, env = "SYMPFACT_TOL", default_value_t = DEFAULT_SYMPLECTIC_TOL)]
    tol: f64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Report the symplecticity residual of a matrix, chain or parameter file.
    Check { input: PathBuf },
    /// Factor a symplectic matrix and write the factor chain as JSON.
    Factor {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Unit9)]
        mode: Mode,
        /// Placement of the diagonal factor for `--mode ldu`.
        #[arg(long, value_enum, default_value_t = Variant::Center)]
        variant: Variant,
        #[arg(long)]
        out: PathBuf,
        /// Also write the chain's parameter blocks (unit factor modes only).
        #[arg(long)]
        emit_params: Option<PathBuf>,
        /// Skip the symplecticity pre-check.
        #[arg(long)]
        force: bool,
        /// Largest accepted ‖product − H‖_F / (1 + ‖H‖_F).
        #[arg(long, default_value_t = 1e-8)]
        rec_tol: f64,
    },
    /// Draw standard-normal parameter blocks and write the matrix they give.
    Synth {
        #[arg(value_enum)]
        kind: ParamKind,
        /// Half dimension d of the 2d x 2d output.
        #[arg(short = 'd', long = "half-dim")]
        d: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        emit_params: Option<PathBuf>,
    },
    /// Complete a 2d x d symmetric pair to a 2d x 2d symplectic matrix.
    Complete {
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Find the symplectic matrix nearest to a target in Frobenius norm.
    Optimize {
        target: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        emit_params: Option<PathBuf>,
        /// CSV of iteration, objective, gradient norm and residual.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long, default_value_t = OptimizerConfig::default().max_iters)]
        max_iters: usize,
        #[arg(long, default_value_t = OptimizerConfig::default().step_init)]
        step_init: f64,
        #[arg(long, default_value_t = OptimizerConfig::default().step_shrink)]
        step_shrink: f64,
        #[arg(long, default_value_t = OptimizerConfig::default().grad_epsilon)]
        grad_epsilon: f64,
        #[arg(long, default_value_t = OptimizerConfig::default().tol_grad)]
        tol_grad: f64,
        #[arg(long, default_value_t = OptimizerConfig::default().seed)]
        seed: u64,
    },
}

fn positive(name: &str, x: f64) -> Result<f64, CliError> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(CliError::Usage(format!(
            "--{name} must be positive and finite, got {x}"
        )))
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let tol = positive("tol", cli.tol)?;
    match cli.command {
        Command::Check { input } => commands::check(&input, tol),
        Command::Factor {
            input,
            mode,
            variant,
            out,
            emit_params,
            force,
            rec_tol,
        } => commands::factor(&FactorArgs {
            input: &input,
            mode,
            variant,
            out: &out,
            emit_params: emit_params.as_deref(),
            force,
            tol,
            rec_tol: positive("rec-tol", rec_tol)?,
        }),
        Command::Synth {
            kind,
            d,
            seed,
            out,
            emit_params,
        } => commands::synth(kind, d, seed, &out, emit_params.as_deref(), tol),
        Command::Complete { input, out } => commands::complete(&input, &out, tol),
        Command::Optimize {
            target,
            out,
            emit_params,
            trace,
            max_iters,
            step_init,
            step_shrink,
            grad_epsilon,
            tol_grad,
            seed,
        } => commands::optimize(&OptimizeArgs {
            target: &target,
            out: &out,
            emit_params: emit_params.as_deref(),
            trace: trace.as_deref(),
            config: OptimizerConfig {
                max_iters,
                step_init,
                step_shrink,
                grad_epsilon,
                tol_grad,
                seed,
            },
        }),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            use std::io::Write as _;
            let _ = writeln!(std::io::stderr(), "error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
