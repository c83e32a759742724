use alloc::vec;

use super::{precheck, FactorOptions, Factorization, ReconstructionReport};
use crate::error::{Error, Result};
use crate::kernel::{inverse, solve_right, spd_sqrt};
use crate::mat::Mat;
use crate::symplectic::{blocks, FactorChain, Side, UnitTriangularFactor};

/// Relative asymmetry accepted for an SPP input.
const SPP_SYMMETRY_TOL: f64 = 1e-10;

pub fn spp_factor(h: &Mat) -> Result<Factorization> {
    spp_factor_with(h, &FactorOptions::default())
}

/// Four unit factors `L` with `L · Lᵀ = h` for a symmetric positive definite
/// symplectic `h`.
///
/// With `P = H₁`, `S = H₃H₁⁻¹` and `R = P^{1/2}`, `h = Lower(S) · Diag(R) ·
/// Diag(R) · Upper(S)`, and `Lower(S) · Diag(R)` is rewritten as
/// `Lower(S − R⁻¹) · Upper(R − I) · Lower(I) · Upper(R⁻¹ − I)`.
///
/// The returned report compares `L · Lᵀ` (not `L`) with `h`.
pub fn spp_factor_with(h: &Mat, opts: &FactorOptions) -> Result<Factorization> {
    let d = precheck(h, opts)?;
    let residual = h.relative_asymmetry()?;
    if residual > SPP_SYMMETRY_TOL {
        return Err(Error::NotSymmetric { residual });
    }
    let b = blocks(&h.symmetrized())?;
    // spd_sqrt rejects indefinite P; a positive definite h has positive definite H₁.
    let r = spd_sqrt(&b.a1)?;
    let s = solve_right(&b.a1, &b.a2)?;
    let r_inv = inverse(&r)?.symmetrized();
    let i = Mat::identity(d);
    let chain = FactorChain::from_factors(
        d,
        vec![
            UnitTriangularFactor::symmetrized(Side::Upper, &(&r_inv - &i))?.into(),
            UnitTriangularFactor::new(Side::Lower, i.clone())?.into(),
            UnitTriangularFactor::symmetrized(Side::Upper, &(&r - &i))?.into(),
            UnitTriangularFactor::symmetrized(Side::Lower, &(&s - &r_inv))?.into(),
        ],
    )?;
    let l = chain.product();
    let report = ReconstructionReport::compare(&(&l * &l.transpose()), h, opts.tol)?;
    Ok(Factorization { chain, report })
}
