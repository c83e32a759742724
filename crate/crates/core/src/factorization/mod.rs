//! Constructive factorizations of symplectic matrices into unit triangular
//! (and diagonal) symplectic factors, the SPM structure test, and
//! completion of symmetric pairs to symplectic matrices.
//!
//! Every chain-producing routine multiplies its output back and reports the
//! reconstruction error next to the chain; nothing is silently trusted.

mod completion;
mod ldu;
mod spm;
mod spp;
mod triangular;
mod ulu;

pub use completion::{complete_symplectic, completion_block, extend_to_symplectic_with_column};
pub use ldu::{ldu_factor, ldu_factor_with, LduVariant};
pub use spm::{is_m_matrix, spm_factor, spm_factor_with, SpmForm, SPM_TOL};
pub use spp::{spp_factor, spp_factor_with};
pub use triangular::{
    diagonal_chain_from_split, diagonal_to_unit_triangular, diagonal_to_unit_triangular_seeded,
    spn_factor_8, spn_factor_8_with, unit_triangular_9, unit_triangular_9_via,
    unit_triangular_9_with, NineFactorRoute, Orientation,
};
pub use ulu::{
    nonsingularizing_shift, nonsingularizing_shift_with_lambda, unit_ulu, unit_ulu_with, Shift,
    UluResult,
};

use crate::error::{Error, Result};
use crate::kernel::svd;
use crate::mat::Mat;
use crate::symplectic::{
    half_dim, require_symplectic, symplecticity_check, CheckReport, FactorChain,
    DEFAULT_SYMPLECTIC_TOL,
};

/// `A₁` counts as nonsingular when `σ_min(A₁) > NONSINGULAR_THRESHOLD ·
/// ‖A₁‖₂`. Below this the blocks `A₂A₁⁻¹` and `A₁⁻¹B₁` grow past any useful
/// reconstruction accuracy.
pub const NONSINGULAR_THRESHOLD: f64 = 1e-8;

/// Input validation shared by the factorizations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactorOptions {
    /// Tolerance on the normalized symplecticity residual of the input.
    pub tol: f64,
    /// Skip the symplecticity pre-check when `false`.
    pub check_input: bool,
}

impl Default for FactorOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_SYMPLECTIC_TOL,
            check_input: true,
        }
    }
}

/// How well a factorization reproduces its input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReconstructionReport {
    /// `‖product − h‖_F`.
    pub residual: f64,
    /// `residual / (1 + ‖h‖_F)`.
    pub relative: f64,
    /// Symplecticity of the reconstructed product.
    pub check: CheckReport,
}

impl ReconstructionReport {
    pub fn compare(reconstructed: &Mat, h: &Mat, tol: f64) -> Result<Self> {
        let residual = reconstructed.try_sub(h)?.frobenius_norm();
        Ok(Self {
            residual,
            relative: residual / (1.0 + h.frobenius_norm()),
            check: symplecticity_check(reconstructed, tol)?,
        })
    }
}

/// A chain together with its reconstruction report.
#[derive(Debug, Clone, PartialEq)]
pub struct Factorization {
    pub chain: FactorChain,
    pub report: ReconstructionReport,
}

impl Factorization {
    fn verified(chain: FactorChain, h: &Mat, tol: f64) -> Result<Self> {
        let report = ReconstructionReport::compare(&chain.product(), h, tol)?;
        Ok(Self { chain, report })
    }
}

fn precheck(h: &Mat, opts: &FactorOptions) -> Result<usize> {
    let d = half_dim(h)?;
    if d == 0 {
        return Err(Error::InvalidParameter("empty matrix"));
    }
    if !h.is_finite() {
        return Err(Error::NonFinite);
    }
    if opts.check_input {
        require_symplectic(h, opts.tol)?;
    }
    Ok(d)
}

/// `(nonsingular, σ_min)` for the routing test on `A₁`.
fn left_upper_nonsingular(a1: &Mat) -> Result<(bool, f64)> {
    let s = svd(a1)?;
    let smax = s.sigma.first().copied().unwrap_or(0.0);
    let smin = s.sigma.last().copied().unwrap_or(0.0);
    Ok((smax > 0.0 && smin > NONSINGULAR_THRESHOLD * smax, smin))
}
