//! Unit triangular and diagonal symplectic factors and ordered chains of
//! them.
//!
//! A [`FactorChain`] stores its factors with index 0 as the *rightmost*
//! factor of the matrix product, so `[F₀, F₁, F₂]` denotes `F₂·F₁·F₀`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::kernel::Lu;
use crate::mat::Mat;

/// Asymmetry accepted by [`UnitTriangularFactor::new`] before the block is
/// symmetrized, relative to `1 + ‖S‖_F`.
const SYMMETRY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Upper,
    Lower,
}

impl Side {
    pub fn flipped(self) -> Self {
        match self {
            Side::Upper => Side::Lower,
            Side::Lower => Side::Upper,
        }
    }
}

/// `[[I, S], [0, I]]` (upper) or `[[I, 0], [S, I]]` (lower) with `S`
/// symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitTriangularFactor {
    side: Side,
    s: Mat,
}

impl UnitTriangularFactor {
    /// Accepts `s` if it is symmetric up to roundoff and stores its
    /// symmetric part, so the stored block is exactly symmetric.
    pub fn new(side: Side, s: Mat) -> Result<Self> {
        let residual = s.relative_asymmetry()?;
        if !s.is_finite() {
            return Err(Error::NonFinite);
        }
        if residual > SYMMETRY_TOL {
            return Err(Error::NotSymmetric { residual });
        }
        Ok(Self {
            side,
            s: s.symmetrized(),
        })
    }

    /// Builds the factor from the symmetric part of an arbitrary square
    /// block.
    pub fn symmetrized(side: Side, s: &Mat) -> Result<Self> {
        if !s.is_square() {
            return Err(Error::NotSquare {
                rows: s.rows(),
                cols: s.cols(),
            });
        }
        Ok(Self {
            side,
            s: s.symmetrized(),
        })
    }

    pub fn upper(s: Mat) -> Result<Self> {
        Self::new(Side::Upper, s)
    }

    pub fn lower(s: Mat) -> Result<Self> {
        Self::new(Side::Lower, s)
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn s(&self) -> &Mat {
        &self.s
    }

    pub fn half_dim(&self) -> usize {
        self.s.rows()
    }

    pub fn to_mat(&self) -> Mat {
        let d = self.half_dim();
        let mut m = Mat::identity(2 * d);
        match self.side {
            Side::Upper => m.set_block(0, d, &self.s),
            Side::Lower => m.set_block(d, 0, &self.s),
        }
        m
    }

    /// `F · m` in `O(d²·cols)` without materializing `F`.
    pub fn apply_left(&self, m: &Mat) -> Mat {
        let d = self.half_dim();
        let cols = m.cols();
        let top = m.block(0, 0, d, cols);
        let bottom = m.block(d, 0, d, cols);
        let mut out = m.clone();
        match self.side {
            Side::Upper => out.set_block(0, 0, &(&top + &(&self.s * &bottom))),
            Side::Lower => out.set_block(d, 0, &(&bottom + &(&self.s * &top))),
        }
        out
    }

    pub fn inverse(&self) -> Self {
        Self {
            side: self.side,
            s: -&self.s,
        }
    }

    pub fn transpose(&self) -> Self {
        Self {
            side: self.side.flipped(),
            s: self.s.clone(),
        }
    }
}

/// `[[P, 0], [0, P⁻ᵀ]]` with `P` nonsingular.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalFactor {
    p: Mat,
    p_inv: Mat,
}

impl DiagonalFactor {
    pub fn new(p: Mat) -> Result<Self> {
        if !p.is_finite() {
            return Err(Error::NonFinite);
        }
        let lu = Lu::new(&p)?;
        if lu.is_singular() {
            return Err(Error::Singular {
                what: "diagonal factor block",
                sigma_min: 0.0,
            });
        }
        let p_inv = lu.inverse()?;
        if !p_inv.is_finite() {
            return Err(Error::Singular {
                what: "diagonal factor block",
                sigma_min: 0.0,
            });
        }
        Ok(Self { p, p_inv })
    }

    pub fn p(&self) -> &Mat {
        &self.p
    }

    pub fn p_inv(&self) -> &Mat {
        &self.p_inv
    }

    pub fn half_dim(&self) -> usize {
        self.p.rows()
    }

    pub fn to_mat(&self) -> Mat {
        let d = self.half_dim();
        let mut m = Mat::zeros(2 * d, 2 * d);
        m.set_block(0, 0, &self.p);
        m.set_block(d, d, &self.p_inv.transpose());
        m
    }

    pub fn apply_left(&self, m: &Mat) -> Mat {
        let d = self.half_dim();
        let cols = m.cols();
        let mut out = Mat::zeros(m.rows(), cols);
        out.set_block(0, 0, &(&self.p * &m.block(0, 0, d, cols)));
        out.set_block(d, 0, &(&self.p_inv.transpose() * &m.block(d, 0, d, cols)));
        out
    }

    pub fn inverse(&self) -> Self {
        Self {
            p: self.p_inv.clone(),
            p_inv: self.p.clone(),
        }
    }

    /// `Diag(P)ᵀ = Diag(Pᵀ)`.
    pub fn transpose(&self) -> Self {
        Self {
            p: self.p.transpose(),
            p_inv: self.p_inv.transpose(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Factor {
    Unit(UnitTriangularFactor),
    Diagonal(DiagonalFactor),
}

impl Factor {
    pub fn upper(s: Mat) -> Result<Self> {
        UnitTriangularFactor::upper(s).map(Factor::Unit)
    }

    pub fn lower(s: Mat) -> Result<Self> {
        UnitTriangularFactor::lower(s).map(Factor::Unit)
    }

    pub fn diagonal(p: Mat) -> Result<Self> {
        DiagonalFactor::new(p).map(Factor::Diagonal)
    }

    pub fn half_dim(&self) -> usize {
        match self {
            Factor::Unit(f) => f.half_dim(),
            Factor::Diagonal(f) => f.half_dim(),
        }
    }

    pub fn is_diagonal(&self) -> bool {
        matches!(self, Factor::Diagonal(_))
    }

    pub fn as_unit(&self) -> Option<&UnitTriangularFactor> {
        match self {
            Factor::Unit(f) => Some(f),
            Factor::Diagonal(_) => None,
        }
    }

    pub fn to_mat(&self) -> Mat {
        match self {
            Factor::Unit(f) => f.to_mat(),
            Factor::Diagonal(f) => f.to_mat(),
        }
    }

    pub fn apply_left(&self, m: &Mat) -> Mat {
        match self {
            Factor::Unit(f) => f.apply_left(m),
            Factor::Diagonal(f) => f.apply_left(m),
        }
    }

    pub fn inverse(&self) -> Self {
        match self {
            Factor::Unit(f) => Factor::Unit(f.inverse()),
            Factor::Diagonal(f) => Factor::Diagonal(f.inverse()),
        }
    }

    pub fn transpose(&self) -> Self {
        match self {
            Factor::Unit(f) => Factor::Unit(f.transpose()),
            Factor::Diagonal(f) => Factor::Diagonal(f.transpose()),
        }
    }
}

impl From<UnitTriangularFactor> for Factor {
    fn from(f: UnitTriangularFactor) -> Self {
        Factor::Unit(f)
    }
}

impl From<DiagonalFactor> for Factor {
    fn from(f: DiagonalFactor) -> Self {
        Factor::Diagonal(f)
    }
}

/// Ordered product of symplectic factors; index 0 is applied first.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorChain {
    d: usize,
    factors: Vec<Factor>,
}

impl FactorChain {
    pub fn new(d: usize) -> Self {
        Self {
            d,
            factors: Vec::new(),
        }
    }

    pub fn from_factors(d: usize, factors: Vec<Factor>) -> Result<Self> {
        let mut chain = Self::new(d);
        for f in factors {
            chain.push(f)?;
        }
        Ok(chain)
    }

    /// Appends `f` as the new leftmost factor.
    pub fn push(&mut self, f: impl Into<Factor>) -> Result<()> {
        let f = f.into();
        if f.half_dim() != self.d {
            return Err(Error::DimensionMismatch {
                op: "factor chain",
                left: (self.d, self.d),
                right: (f.half_dim(), f.half_dim()),
            });
        }
        self.factors.push(f);
        Ok(())
    }

    pub fn half_dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn into_factors(self) -> Vec<Factor> {
        self.factors
    }

    pub fn diagonal_count(&self) -> usize {
        self.factors.iter().filter(|f| f.is_diagonal()).count()
    }

    /// Number of unit triangular factors.
    pub fn unit_count(&self) -> usize {
        self.len() - self.diagonal_count()
    }

    /// Replaces the factor at `index`.
    pub fn replace(&mut self, index: usize, f: impl Into<Factor>) -> Result<()> {
        let f = f.into();
        if index >= self.len() {
            return Err(Error::InvalidChain("replacement index out of range"));
        }
        if f.half_dim() != self.d {
            return Err(Error::DimensionMismatch {
                op: "factor chain",
                left: (self.d, self.d),
                right: (f.half_dim(), f.half_dim()),
            });
        }
        self.factors[index] = f;
        Ok(())
    }

    /// `self · m`.
    pub fn apply_left(&self, m: &Mat) -> Mat {
        self.factors
            .iter()
            .fold(m.clone(), |acc, f| f.apply_left(&acc))
    }

    pub fn product(&self) -> Mat {
        self.apply_left(&Mat::identity(2 * self.d))
    }

    pub fn inverse(&self) -> Self {
        Self {
            d: self.d,
            factors: self.factors.iter().rev().map(Factor::inverse).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self {
            d: self.d,
            factors: self.factors.iter().rev().map(Factor::transpose).collect(),
        }
    }

    /// Moves the single diagonal factor to `position`, conjugating every
    /// unit factor it passes so the product is unchanged.
    pub fn move_diagonal(&self, position: usize) -> Result<Self> {
        let found = self.diagonal_count();
        if found != 1 {
            return Err(Error::DiagonalCount { found });
        }
        if position >= self.len() {
            return Err(Error::InvalidChain("diagonal position out of range"));
        }
        let mut factors = self.factors.clone();
        let mut k = factors.iter().position(Factor::is_diagonal).unwrap_or(0);
        let diag = match &factors[k] {
            Factor::Diagonal(d) => d.clone(),
            Factor::Unit(_) => unreachable!(),
        };
        let p = diag.p();
        let p_inv = diag.p_inv();
        while k != position {
            let (neighbor, towards_right) = if position < k {
                (k - 1, true)
            } else {
                (k + 1, false)
            };
            let unit = match &factors[neighbor] {
                Factor::Unit(u) => u,
                Factor::Diagonal(_) => unreachable!(),
            };
            let s = unit.s();
            // D·F = F'·D when moving towards index 0, F·D = D·F' otherwise.
            let conjugated = match (unit.side(), towards_right) {
                (Side::Upper, true) => &(p * s) * &p.transpose(),
                (Side::Lower, true) => &(&p_inv.transpose() * s) * p_inv,
                (Side::Upper, false) => &(p_inv * s) * &p_inv.transpose(),
                (Side::Lower, false) => &(&p.transpose() * s) * p,
            };
            let moved = UnitTriangularFactor::symmetrized(unit.side(), &conjugated)?;
            factors[k] = Factor::Unit(moved);
            factors[neighbor] = Factor::Diagonal(diag.clone());
            k = neighbor;
        }
        Ok(Self { d: self.d, factors })
    }
}

/// Materialized product of `c`.
pub fn chain_product(c: &FactorChain) -> Mat {
    c.product()
}

pub fn chain_inverse(c: &FactorChain) -> FactorChain {
    c.inverse()
}

pub fn chain_transpose(c: &FactorChain) -> FactorChain {
    c.transpose()
}

pub fn move_diagonal(c: &FactorChain, position: usize) -> Result<FactorChain> {
    c.move_diagonal(position)
}
