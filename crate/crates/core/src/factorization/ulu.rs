use alloc::vec;

use super::{
    left_upper_nonsingular, precheck, FactorOptions, ReconstructionReport, NONSINGULAR_THRESHOLD,
};
use crate::error::{Error, Result};
use crate::kernel::{rank_factor, solve_right};
use crate::mat::Mat;
use crate::symplectic::{blocks, DiagonalFactor, Factor, FactorChain, Side, UnitTriangularFactor};

/// A shift `s` with `h = Upper(λs) · shifted` and `shifted` having a
/// nonsingular left upper block.
#[derive(Debug, Clone, PartialEq)]
pub struct Shift {
    pub s: Mat,
    pub lambda: f64,
    pub shifted: Mat,
}

pub fn nonsingularizing_shift(h: &Mat) -> Result<Shift> {
    nonsingularizing_shift_with_lambda(h, 1.0)
}

/// Builds `s = −P · diag(0_r, I_{d−r}) · Pᵀ` from the rank factorization
/// `A₁ = P · diag(I_r, 0) · Q` and returns `shifted = Upper(−λs) · h`.
/// When `A₁` already passes the nonsingularity test, `s = 0`.
pub fn nonsingularizing_shift_with_lambda(h: &Mat, lambda: f64) -> Result<Shift> {
    nonsingularizing_shift_with(h, lambda, &FactorOptions::default())
}

pub(super) fn nonsingularizing_shift_with(
    h: &Mat,
    lambda: f64,
    opts: &FactorOptions,
) -> Result<Shift> {
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(Error::InvalidParameter(
            "shift scale must be finite and nonzero",
        ));
    }
    let d = precheck(h, opts)?;
    let b = blocks(h)?;
    let (ok, _) = left_upper_nonsingular(&b.a1)?;
    if ok {
        return Ok(Shift {
            s: Mat::zeros(d, d),
            lambda,
            shifted: h.clone(),
        });
    }
    let rf = rank_factor(&b.a1, NONSINGULAR_THRESHOLD)?;
    let mut tail = Mat::zeros(d, d);
    for i in rf.rank..d {
        tail[(i, i)] = 1.0;
    }
    let s = (&(&rf.p * &tail) * &rf.p.transpose())
        .scale(-1.0)
        .symmetrized();
    let shifted = UnitTriangularFactor::new(Side::Upper, s.scale(-lambda))?.apply_left(h);
    Ok(Shift { s, lambda, shifted })
}

/// `H = Upper(s) · Lower(t) · Upper(u) · Diag(p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct UluResult {
    pub s: Mat,
    pub t: Mat,
    pub u: Mat,
    pub p: Mat,
    pub report: ReconstructionReport,
}

impl UluResult {
    /// The four factors as a chain, `Diag(p)` first.
    pub fn to_chain(&self) -> Result<FactorChain> {
        ulu_chain(&self.s, &self.t, &self.u, &self.p)
    }
}

fn ulu_chain(s: &Mat, t: &Mat, u: &Mat, p: &Mat) -> Result<FactorChain> {
    FactorChain::from_factors(
        p.rows(),
        vec![
            Factor::Diagonal(DiagonalFactor::new(p.clone())?),
            Factor::upper(u.clone())?,
            Factor::lower(t.clone())?,
            Factor::upper(s.clone())?,
        ],
    )
}

pub fn unit_ulu(h: &Mat) -> Result<UluResult> {
    unit_ulu_with(h, &FactorOptions::default())
}

/// Unit ULU factorization: shift to a nonsingular left upper block, then
/// read `T = A₂A₁⁻¹`, `U = B₁A₁ᵀ`, `P = A₁` off the shifted blocks.
pub fn unit_ulu_with(h: &Mat, opts: &FactorOptions) -> Result<UluResult> {
    let shift = nonsingularizing_shift_with(h, 1.0, opts)?;
    let b = blocks(&shift.shifted)?;
    let t = solve_right(&b.a1, &b.a2)?.symmetrized();
    let u = (&b.b1 * &b.a1.transpose()).symmetrized();
    let chain = ulu_chain(&shift.s, &t, &u, &b.a1)?;
    let report = ReconstructionReport::compare(&chain.product(), h, opts.tol)?;
    Ok(UluResult {
        s: shift.s,
        t,
        u,
        p: b.a1,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplectic::StandardJ;

    fn s(x: f64) -> Mat {
        Mat::from_diagonal(&[x])
    }

    #[test]
    fn shift_examples() {
        let sh = nonsingularizing_shift(&Mat::identity(2)).unwrap();
        assert_eq!(sh.s, s(0.0));
        assert_eq!(sh.shifted, Mat::identity(2));

        let j = StandardJ::new(1).to_mat();
        let sh = nonsingularizing_shift(&j).unwrap();
        assert_eq!(sh.s, s(-1.0));
        assert_eq!(
            sh.shifted,
            Mat::from_rows(&[[-1.0, 1.0], [-1.0, 0.0]]).unwrap()
        );

        let h = Mat::from_diagonal(&[3.0, 1.0 / 3.0]);
        let sh = nonsingularizing_shift(&h).unwrap();
        assert_eq!(sh.s, s(0.0));
        assert_eq!(sh.shifted, h);
    }

    #[test]
    fn shift_scales_with_lambda() {
        for d in 1..4 {
            let j = StandardJ::new(d).to_mat();
            for lambda in [1.0, 0.1, 0.01] {
                let sh = nonsingularizing_shift_with_lambda(&j, lambda).unwrap();
                let a1 = sh.shifted.block(0, 0, d, d);
                assert!(left_upper_nonsingular(&a1).unwrap().0);
                let back = UnitTriangularFactor::new(Side::Upper, sh.s.scale(lambda))
                    .unwrap()
                    .apply_left(&sh.shifted);
                assert!((&back - &j).frobenius_norm() <= 1e-12 / lambda * j.frobenius_norm());
            }
        }
        assert!(nonsingularizing_shift_with_lambda(&Mat::identity(2), 0.0).is_err());
    }

    #[test]
    fn ulu_of_identity() {
        let r = unit_ulu(&Mat::identity(4)).unwrap();
        assert_eq!(r.s, Mat::zeros(2, 2));
        assert_eq!(r.t, Mat::zeros(2, 2));
        assert_eq!(r.u, Mat::zeros(2, 2));
        assert_eq!(r.p, Mat::identity(2));
    }

    #[test]
    fn ulu_of_j_is_exact() {
        let j = StandardJ::new(1).to_mat();
        let r = unit_ulu(&j).unwrap();
        assert_eq!(
            (r.s.clone(), r.t.clone(), r.u.clone(), r.p.clone()),
            (s(-1.0), s(1.0), s(-1.0), s(-1.0))
        );
        assert_eq!(r.to_chain().unwrap().product(), j);
        assert_eq!(r.report.residual, 0.0);
    }

    #[test]
    fn ulu_reduces_to_diag_right() {
        let h = Mat::from_rows(&[[2.0, 1.0], [1.0, 1.0]]).unwrap();
        let r = unit_ulu(&h).unwrap();
        assert_eq!(r.s, s(0.0));
        assert_eq!(r.t, s(0.5));
        assert_eq!(r.u, s(2.0));
        assert_eq!(r.p, s(2.0));
    }
}
