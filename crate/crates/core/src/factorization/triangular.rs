use super::ulu::nonsingularizing_shift_with;
use super::{left_upper_nonsingular, precheck, unit_ulu_with, FactorOptions, Factorization};
use crate::error::{Error, Result};
use crate::kernel::{inverse, solve, solve_right, two_symmetric_factor_seeded, DEFAULT_SPLIT_SEED};
use crate::mat::Mat;
use crate::symplectic::{blocks, Factor, FactorChain, Side, UnitTriangularFactor};

/// Which side the rightmost factor of a seven-factor diagonal chain is on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    StartUpper,
    StartLower,
}

/// Seven alternating unit factors multiplying to `Diag(p1 · p2)` for
/// symmetric `p1`, `p2`. Index 0 is `Upper(p2⁻¹ − I)`; the leftmost factor
/// is `Upper(−p1)`.
pub fn diagonal_chain_from_split(p1: &Mat, p2: &Mat) -> Result<FactorChain> {
    let d = p1.rows();
    if !p1.is_square() || p2.shape() != (d, d) {
        return Err(Error::DimensionMismatch {
            op: "diagonal split",
            left: p1.shape(),
            right: p2.shape(),
        });
    }
    let i = Mat::identity(d);
    let p1_inv = inverse(p1)?;
    let p2_inv = inverse(p2)?;
    let blocks = [
        &p2_inv - &i,
        i.clone(),
        p2 - &i,
        &(p1 - &i) - &p2_inv,
        i.clone(),
        &p1_inv - &i,
        p1.scale(-1.0),
    ];
    let mut chain = FactorChain::new(d);
    for (k, s) in blocks.iter().enumerate() {
        let side = if k % 2 == 0 { Side::Upper } else { Side::Lower };
        chain.push(UnitTriangularFactor::symmetrized(side, s)?)?;
    }
    Ok(chain)
}

pub fn diagonal_to_unit_triangular(p: &Mat, orientation: Orientation) -> Result<FactorChain> {
    diagonal_to_unit_triangular_seeded(p, orientation, DEFAULT_SPLIT_SEED)
}

/// Seven-factor unit triangular chain for `Diag(p)`, splitting `p` into two
/// symmetric factors with the given seed.
pub fn diagonal_to_unit_triangular_seeded(
    p: &Mat,
    orientation: Orientation,
    seed: u64,
) -> Result<FactorChain> {
    match orientation {
        Orientation::StartUpper => {
            let split = two_symmetric_factor_seeded(p, seed)?;
            diagonal_chain_from_split(&split.s1, &split.s2)
        }
        // Diag(p) = Diag(pᵀ)ᵀ, and transposing flips every side.
        Orientation::StartLower => {
            let split = two_symmetric_factor_seeded(&p.transpose(), seed)?;
            Ok(diagonal_chain_from_split(&split.s1, &split.s2)?.transpose())
        }
    }
}

fn merge_upper(chain: &mut FactorChain, index: usize, extra: &Mat) -> Result<()> {
    let merged = match &chain.factors()[index] {
        Factor::Unit(u) if u.side() == Side::Upper => u.s() + extra,
        _ => return Err(Error::InvalidChain("merge target is not an upper factor")),
    };
    chain.replace(
        index,
        UnitTriangularFactor::symmetrized(Side::Upper, &merged)?,
    )
}

/// How the nine-factor chain is assembled.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum NineFactorRoute {
    /// Shift, then the eight-factor diagonal-center construction on the
    /// shifted matrix. Its merged block `A₁⁻¹B₁` stays moderate, so the
    /// chain multiplies back accurately even for badly scaled inputs.
    #[default]
    CenterMerge,
    /// Unit ULU, with `Upper(u)` merged into the leftmost factor of the
    /// seven-factor chain of `Diag(p)`. Since `u = B₁A₁ᵀ` grows like
    /// `‖B₁‖·‖A₁‖`, the product loses accuracy as `‖H‖` grows.
    UluMerge,
}

pub fn unit_triangular_9(h: &Mat) -> Result<Factorization> {
    unit_triangular_9_with(h, &FactorOptions::default())
}

pub fn unit_triangular_9_with(h: &Mat, opts: &FactorOptions) -> Result<Factorization> {
    unit_triangular_9_via(h, NineFactorRoute::default(), opts)
}

/// Nine unit triangular factors for any symplectic matrix. Both routes
/// start from the nonsingularizing shift `h = Upper(s) · shifted`.
pub fn unit_triangular_9_via(
    h: &Mat,
    route: NineFactorRoute,
    opts: &FactorOptions,
) -> Result<Factorization> {
    let chain = match route {
        NineFactorRoute::UluMerge => {
            let ulu = unit_ulu_with(h, opts)?;
            let mut chain = diagonal_to_unit_triangular(&ulu.p, Orientation::StartUpper)?;
            merge_upper(&mut chain, 6, &ulu.u)?;
            chain.push(UnitTriangularFactor::new(Side::Lower, ulu.t)?)?;
            chain.push(UnitTriangularFactor::new(Side::Upper, ulu.s)?)?;
            chain
        }
        NineFactorRoute::CenterMerge => {
            let shift = nonsingularizing_shift_with(h, 1.0, opts)?;
            let unchecked = FactorOptions {
                check_input: false,
                ..*opts
            };
            let mut chain = spn_factor_8_with(&shift.shifted, &unchecked)?.chain;
            chain.push(UnitTriangularFactor::new(Side::Upper, shift.s)?)?;
            chain
        }
    };
    debug_assert_eq!(chain.len(), 9);
    Factorization::verified(chain, h, opts.tol)
}

pub fn spn_factor_8(h: &Mat) -> Result<Factorization> {
    spn_factor_8_with(h, &FactorOptions::default())
}

/// Eight unit triangular factors for a symplectic matrix with nonsingular
/// left upper block: `Lower(A₂A₁⁻¹) · Diag(A₁) · Upper(A₁⁻¹B₁)` with the
/// seven-factor chain of `Diag(A₁)` absorbing the right upper factor.
pub fn spn_factor_8_with(h: &Mat, opts: &FactorOptions) -> Result<Factorization> {
    let d = precheck(h, opts)?;
    let b = blocks(h)?;
    let (ok, sigma_min) = left_upper_nonsingular(&b.a1)?;
    if !ok {
        return Err(Error::SingularLeftUpperBlock { sigma_min });
    }
    let lower = solve_right(&b.a1, &b.a2)?;
    let upper = solve(&b.a1, &b.b1)?.symmetrized();
    let mut chain = diagonal_to_unit_triangular(&b.a1, Orientation::StartUpper)?;
    merge_upper(&mut chain, 0, &upper)?;
    chain.push(UnitTriangularFactor::symmetrized(Side::Lower, &lower)?)?;
    debug_assert_eq!(chain.len(), 8);
    debug_assert_eq!(chain.half_dim(), d);
    Factorization::verified(chain, h, opts.tol)
}
