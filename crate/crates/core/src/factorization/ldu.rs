use alloc::vec;

use super::{left_upper_nonsingular, precheck, FactorOptions, Factorization};
use crate::error::{Error, Result};
use crate::kernel::{solve, solve_right};
use crate::mat::Mat;
use crate::symplectic::{blocks, Factor, FactorChain, Side, UnitTriangularFactor};

/// Position of the diagonal factor in the three-factor LDU product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LduVariant {
    /// `Diag(A₁) · Lower(A₁ᵀA₂) · Upper(A₁⁻¹B₁)`
    DiagLeft,
    /// `Lower(A₂A₁⁻¹) · Diag(A₁) · Upper(A₁⁻¹B₁)`
    DiagCenter,
    /// `Lower(A₂A₁⁻¹) · Upper(B₁A₁ᵀ) · Diag(A₁)`
    DiagRight,
}

pub fn ldu_factor(h: &Mat, variant: LduVariant) -> Result<Factorization> {
    ldu_factor_with(h, variant, &FactorOptions::default())
}

/// Three-factor LDU factorization of a symplectic matrix with nonsingular
/// left upper block. Off-diagonal blocks are symmetrized on output.
pub fn ldu_factor_with(
    h: &Mat,
    variant: LduVariant,
    opts: &FactorOptions,
) -> Result<Factorization> {
    let d = precheck(h, opts)?;
    let b = blocks(h)?;
    let (ok, sigma_min) = left_upper_nonsingular(&b.a1)?;
    if !ok {
        return Err(Error::SingularLeftUpperBlock { sigma_min });
    }
    let diag = Factor::diagonal(b.a1.clone())?;
    let unit = |side, s: &Mat| UnitTriangularFactor::symmetrized(side, s).map(Factor::Unit);
    let factors = match variant {
        LduVariant::DiagLeft => vec![
            unit(Side::Upper, &solve(&b.a1, &b.b1)?)?,
            unit(Side::Lower, &(&b.a1.transpose() * &b.a2))?,
            diag,
        ],
        LduVariant::DiagCenter => vec![
            unit(Side::Upper, &solve(&b.a1, &b.b1)?)?,
            diag,
            unit(Side::Lower, &solve_right(&b.a1, &b.a2)?)?,
        ],
        LduVariant::DiagRight => vec![
            diag,
            unit(Side::Upper, &(&b.b1 * &b.a1.transpose()))?,
            unit(Side::Lower, &solve_right(&b.a1, &b.a2)?)?,
        ],
    };
    Factorization::verified(FactorChain::from_factors(d, factors)?, h, opts.tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn example() -> Mat {
        Mat::from_rows(&[[2.0, 1.0], [1.0, 1.0]]).unwrap()
    }

    fn scalars(f: &Factorization) -> alloc::vec::Vec<f64> {
        f.chain
            .factors()
            .iter()
            .map(|f| match f {
                Factor::Unit(u) => u.s()[(0, 0)],
                Factor::Diagonal(p) => p.p()[(0, 0)],
            })
            .collect()
    }

    #[test]
    fn identity_gives_trivial_blocks() {
        for v in [
            LduVariant::DiagLeft,
            LduVariant::DiagCenter,
            LduVariant::DiagRight,
        ] {
            let f = ldu_factor(&Mat::identity(4), v).unwrap();
            assert_eq!(f.chain.product(), Mat::identity(4));
            assert_eq!(f.report.residual, 0.0);
        }
    }

    #[test]
    fn center_example() {
        let f = ldu_factor(&example(), LduVariant::DiagCenter).unwrap();
        // chain order: Upper(T₂), Diag(P₂), Lower(S₂)
        let v = scalars(&f);
        assert_relative_eq!(v[0], 0.5, epsilon = 1e-15);
        assert_relative_eq!(v[1], 2.0, epsilon = 1e-15);
        assert_relative_eq!(v[2], 0.5, epsilon = 1e-15);
        assert!(f.report.residual < 1e-15);
    }

    #[test]
    fn right_example() {
        let f = ldu_factor(&example(), LduVariant::DiagRight).unwrap();
        let v = scalars(&f);
        assert_relative_eq!(v[0], 2.0, epsilon = 1e-15);
        assert_relative_eq!(v[1], 2.0, epsilon = 1e-15);
        assert_relative_eq!(v[2], 0.5, epsilon = 1e-15);
        assert!(f.report.residual < 1e-15);
    }

    #[test]
    fn left_example() {
        // Diag(2)·Lower(A₁ᵀA₂ = 2)·Upper(1/2)
        let f = ldu_factor(&example(), LduVariant::DiagLeft).unwrap();
        let v = scalars(&f);
        assert_relative_eq!(v[0], 0.5, epsilon = 1e-15);
        assert_relative_eq!(v[1], 2.0, epsilon = 1e-15);
        assert_relative_eq!(v[2], 2.0, epsilon = 1e-15);
        assert!(f.report.residual < 1e-15);
    }

    #[test]
    fn singular_block_is_rejected() {
        let j = Mat::from_rows(&[[0.0, 1.0], [-1.0, 0.0]]).unwrap();
        assert!(matches!(
            ldu_factor(&j, LduVariant::DiagCenter),
            Err(Error::SingularLeftUpperBlock { .. })
        ));
    }

    #[test]
    fn non_symplectic_is_rejected() {
        let m = Mat::from_diagonal(&[2.0, 2.0]);
        assert!(matches!(
            ldu_factor(&m, LduVariant::DiagLeft),
            Err(Error::NotSymplectic { .. })
        ));
        let opts = FactorOptions {
            check_input: false,
            ..FactorOptions::default()
        };
        let f = ldu_factor_with(&m, LduVariant::DiagLeft, &opts).unwrap();
        assert!(f.report.residual > 1.0);
    }
}
