use alloc::vec;

use super::{precheck, FactorOptions};
use crate::error::{Error, Result};
use crate::kernel::{eigenvalues, solve, solve_right};
use crate::mat::Mat;
use crate::symplectic::{blocks, DiagonalFactor, FactorChain, Side, UnitTriangularFactor};

/// Absolute tolerance for the sign and diagonality checks of
/// [`spm_factor`].
pub const SPM_TOL: f64 = 1e-12;

/// Off-diagonal tolerance for `hfac · dpos · k` being diagonal.
const SPM_DIAGONAL_TOL: f64 = 1e-10;

/// `Lower(hfac) · Diag(dpos) · Upper(k)` with `hfac, k ≤ 0` entrywise,
/// `dpos` positive diagonal and `hfac · dpos · k` diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct SpmForm {
    pub hfac: Mat,
    pub dpos: Mat,
    pub k: Mat,
}

impl SpmForm {
    /// Index 0 is `Upper(k)`.
    pub fn to_chain(&self) -> Result<FactorChain> {
        FactorChain::from_factors(
            self.dpos.rows(),
            vec![
                UnitTriangularFactor::new(Side::Upper, self.k.clone())?.into(),
                DiagonalFactor::new(self.dpos.clone())?.into(),
                UnitTriangularFactor::new(Side::Lower, self.hfac.clone())?.into(),
            ],
        )
    }

    pub fn to_mat(&self) -> Result<Mat> {
        Ok(self.to_chain()?.product())
    }
}

/// Nonpositive off-diagonal entries (up to `tol`) and every eigenvalue with
/// real part above `tol`.
pub fn is_m_matrix(a: &Mat, tol: f64) -> Result<bool> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let n = a.rows();
    for i in 0..n {
        for j in 0..n {
            if i != j && a[(i, j)] > tol {
                return Ok(false);
            }
        }
    }
    Ok(eigenvalues(a)?.iter().all(|e| e.re > tol))
}

pub fn spm_factor(h: &Mat) -> Result<SpmForm> {
    spm_factor_with(h, &FactorOptions::default())
}

/// Recovers the SPM structure of a symplectic M-matrix from its
/// diagonal-center LDU factorization.
pub fn spm_factor_with(h: &Mat, opts: &FactorOptions) -> Result<SpmForm> {
    let d = precheck(h, opts)?;
    if !is_m_matrix(h, SPM_TOL)? {
        return Err(Error::NotMMatrix);
    }
    let b = blocks(h)?;
    let mut dpos = Mat::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let v = b.a1[(i, j)];
            if i == j {
                if v <= 0.0 {
                    return Err(Error::StructureViolation {
                        what: "diagonal block entry not positive",
                        value: v,
                    });
                }
                dpos[(i, i)] = v;
            } else if v.abs() > SPM_TOL {
                return Err(Error::StructureViolation {
                    what: "left upper block not diagonal",
                    value: v.abs(),
                });
            }
        }
    }
    let hfac = solve_right(&dpos, &b.a2)?.symmetrized();
    let k = solve(&dpos, &b.b1)?.symmetrized();
    for (what, m) in [
        ("lower factor has a positive entry", &hfac),
        ("upper factor has a positive entry", &k),
    ] {
        let worst = m
            .as_slice()
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        if worst > SPM_TOL {
            return Err(Error::StructureViolation { what, value: worst });
        }
    }
    let hdk = &(&hfac * &dpos) * &k;
    let mut off = 0.0;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                off += hdk[(i, j)] * hdk[(i, j)];
            }
        }
    }
    let off = libm::sqrt(off);
    if off > SPM_DIAGONAL_TOL {
        return Err(Error::StructureViolation {
            what: "hfac·dpos·k is not diagonal",
            value: off,
        });
    }
    Ok(SpmForm { hfac, dpos, k })
}
