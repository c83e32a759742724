use std::path::Path;

use sympfact_core::factorization::{
    complete_symplectic, extend_to_symplectic_with_column, ldu_factor_with, spm_factor_with,
    spn_factor_8_with, spp_factor_with, unit_triangular_9_with, unit_ulu_with, FactorOptions,
    LduVariant, ReconstructionReport,
};
use sympfact_core::kernel::min_singular_value;
use sympfact_core::optim::{minimize, nearest_symplectic_objective, OptimizerConfig, Termination};
use sympfact_core::param::{
    factor_to_params, packed_len, params_of, sp_from_params, spp_from_params, sps_from_params,
    ParamVector, SpsParams, SPP_BLOCKS, SPS_BLOCKS, SP_BLOCKS,
};
use sympfact_core::sample::{normal_params, normal_vec, rng_from_seed};
use sympfact_core::symplectic::{half_dim, symplecticity_check, CheckReport, FactorChain};
use sympfact_core::Mat;

use crate::error::{exit, CliError, Result};
use crate::io::{self, Document, ParamKind};

/// `println!` that ignores a closed stdout (e.g. piped into `head`).
macro_rules! say {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Mode {
    /// Unit ULU: Upper · Lower · Upper · Diag.
    Ulu,
    /// At most nine unit triangular factors; works for every input.
    Unit9,
    /// At most eight unit triangular factors; needs a nonsingular A₁.
    Spn8,
    /// Lower · Diag · Upper and its two siblings; needs a nonsingular A₁.
    Ldu,
    /// Four factors L with L · Lᵀ = H; needs H positive definite.
    Spp,
    /// Lower(H) · Diag(D) · Upper(K) for symplectic M-matrices.
    Spm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Variant {
    Left,
    Center,
    Right,
}

impl From<Variant> for LduVariant {
    fn from(v: Variant) -> Self {
        match v {
            Variant::Left => LduVariant::DiagLeft,
            Variant::Center => LduVariant::DiagCenter,
            Variant::Right => LduVariant::DiagRight,
        }
    }
}

fn print_check(report: &CheckReport) {
    say!("residual: {:?}", report.residual);
    say!("relative_residual: {:?}", report.relative_residual);
    say!("tolerance: {:?}", report.tolerance);
    say!("passed: {}", report.passed);
}

fn verdict(passed: bool) -> u8 {
    if passed {
        exit::OK
    } else {
        exit::DOMAIN
    }
}

fn materialize(doc: Document) -> Result<Mat> {
    Ok(match doc {
        Document::Matrix(m) => m,
        Document::Chain(c) => c.product(),
        Document::Params(ParamKind::Sp, p) => sp_from_params(&p)?.product(),
        Document::Params(ParamKind::Spp, p) => spp_from_params(&p)?,
        Document::Params(ParamKind::Sps, p) => sps_from_params(&SpsParams::from_param_vector(&p)?)?,
    })
}

pub fn check(input: &Path, tol: f64) -> Result<u8> {
    let h = materialize(io::read_document(input)?)?;
    let report = symplecticity_check(&h, tol)?;
    print_check(&report);
    Ok(verdict(report.passed))
}

pub struct FactorArgs<'a> {
    pub input: &'a Path,
    pub mode: Mode,
    pub variant: Variant,
    pub out: &'a Path,
    pub emit_params: Option<&'a Path>,
    pub force: bool,
    pub tol: f64,
    pub rec_tol: f64,
}

pub fn factor(args: &FactorArgs) -> Result<u8> {
    let h = io::read_matrix(args.input)?;
    let opts = FactorOptions {
        tol: args.tol,
        check_input: !args.force,
    };
    let (chain, report): (FactorChain, ReconstructionReport) = match args.mode {
        Mode::Ulu => {
            let r = unit_ulu_with(&h, &opts)?;
            (r.to_chain()?, r.report)
        }
        Mode::Unit9 => {
            let f = unit_triangular_9_with(&h, &opts)?;
            (f.chain, f.report)
        }
        Mode::Spn8 => {
            let f = spn_factor_8_with(&h, &opts)?;
            (f.chain, f.report)
        }
        Mode::Ldu => {
            let f = ldu_factor_with(&h, args.variant.into(), &opts)?;
            (f.chain, f.report)
        }
        Mode::Spp => {
            let f = spp_factor_with(&h, &opts)?;
            (f.chain, f.report)
        }
        Mode::Spm => {
            let chain = spm_factor_with(&h, &opts)?.to_chain()?;
            let report = ReconstructionReport::compare(&chain.product(), &h, args.tol)?;
            (chain, report)
        }
    };
    io::write_chain(args.out, &chain)?;
    if let Some(path) = args.emit_params {
        let params = factor_to_params(&chain)?;
        let kind = if args.mode == Mode::Spp {
            ParamKind::Spp
        } else {
            ParamKind::Sp
        };
        let params = if kind == ParamKind::Spp {
            // The four factors of L fill the SPP slots directly.
            ParamVector::new(params.d, params.blocks[..SPP_BLOCKS].to_vec())?
        } else {
            params
        };
        io::write_params(path, kind, &params)?;
    }
    let passed = report.relative <= args.rec_tol;
    say!("factors: {}", chain.len());
    say!("reconstruction_residual: {:?}", report.residual);
    say!("reconstruction_error: {:?}", report.relative);
    say!("reconstruction_tolerance: {:?}", args.rec_tol);
    say!("passed: {passed}");
    Ok(verdict(passed))
}

pub fn synth(
    kind: ParamKind,
    d: usize,
    seed: u64,
    out: &Path,
    emit_params: Option<&Path>,
    tol: f64,
) -> Result<u8> {
    if d == 0 {
        return Err(CliError::Usage("half dimension must be at least 1".into()));
    }
    let mut rng = rng_from_seed(seed);
    let (h, params) = match kind {
        ParamKind::Sp => {
            let p = normal_params(&mut rng, d, SP_BLOCKS, 1.0);
            (sp_from_params(&p)?.product(), p)
        }
        ParamKind::Spp => {
            let p = normal_params(&mut rng, d, SPP_BLOCKS, 1.0);
            (spp_from_params(&p)?, p)
        }
        ParamKind::Sps => {
            // The conjugator is stored through its own nine parameters, so
            // the file alone reproduces the matrix.
            let u = normal_vec(&mut rng, 2 * d, 1.0);
            let q_params = params_of(&extend_to_symplectic_with_column(&u)?)?;
            let mut blocks: Vec<Vec<f64>> = (0..SPS_BLOCKS)
                .map(|k| {
                    let n = if k % 2 == 0 { d } else { d - 1 };
                    normal_vec(&mut rng, packed_len(n), 1.0)
                })
                .collect();
            blocks.extend(q_params.blocks);
            let p = ParamVector::new(d, blocks)?;
            (sps_from_params(&SpsParams::from_param_vector(&p)?)?, p)
        }
    };
    io::write_matrix(out, &h)?;
    if let Some(path) = emit_params {
        io::write_params(path, kind, &params)?;
    }
    let report = symplecticity_check(&h, tol)?;
    print_check(&report);
    if kind == ParamKind::Sps {
        let smin = min_singular_value(&(&h - &Mat::identity(2 * d)))?;
        say!("min_singular_value_h_minus_i: {smin:?}");
    }
    Ok(verdict(report.passed))
}

pub fn complete(input: &Path, out: &Path, tol: f64) -> Result<u8> {
    let a = io::read_matrix(input)?;
    let q = complete_symplectic(&a)?;
    io::write_matrix(out, &q)?;
    let report = symplecticity_check(&q, tol)?;
    print_check(&report);
    Ok(verdict(report.passed))
}

pub struct OptimizeArgs<'a> {
    pub target: &'a Path,
    pub out: &'a Path,
    pub emit_params: Option<&'a Path>,
    pub trace: Option<&'a Path>,
    pub config: OptimizerConfig,
}

pub fn optimize(args: &OptimizeArgs) -> Result<u8> {
    let target = io::read_matrix(args.target)?;
    let d = half_dim(&target)?;
    if d == 0 {
        return Err(CliError::Usage("target must not be empty".into()));
    }
    let obj = nearest_symplectic_objective(&target)?;
    let result = minimize(&obj, &ParamVector::zeros(d, SP_BLOCKS), &args.config)?;
    let x = sp_from_params(&result.params)?.product();
    io::write_matrix(args.out, &x)?;
    if let Some(path) = args.emit_params {
        io::write_params(path, ParamKind::Sp, &result.params)?;
    }
    if let Some(path) = args.trace {
        io::write_trace(path, &result.trace)?;
    }
    let last = result.trace.iterates.last().copied();
    say!("objective: {:?}", result.final_objective());
    say!(
        "iterations: {}",
        result.trace.iterates.len().saturating_sub(1)
    );
    say!("grad_norm: {:?}", last.map_or(f64::NAN, |e| e.grad_norm));
    say!("residual: {:?}", last.map_or(f64::NAN, |e| e.residual));
    let status = match result.termination {
        Termination::Converged => "converged",
        Termination::MaxIterations => "max_iterations",
        Termination::StepUnderflow => "step_underflow",
    };
    say!("status: {status}");
    Ok(if result.converged() {
        exit::OK
    } else {
        exit::NOT_CONVERGED
    })
}
