//! Unconstrained parametrizations of symplectic matrices by symmetric
//! blocks.
//!
//! A symmetric `d x d` block is stored as its packed lower triangle
//! `(s₁₁, s₂₁, s₂₂, s₃₁, …, s_dd)`. Nine packed blocks describe a point of
//! SP, four describe an SPD symplectic matrix `L·Lᵀ`, and ten (five full,
//! five reduced) plus a conjugator describe a symplectic matrix with
//! eigenvalue one.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::factorization::unit_triangular_9;
use crate::mat::Mat;
use crate::symplectic::{
    require_symplectic, Factor, FactorChain, Side, UnitTriangularFactor, DEFAULT_SYMPLECTIC_TOL,
};

/// Number of blocks in the SP parametrization.
pub const SP_BLOCKS: usize = 9;
/// Number of blocks in the SPP parametrization.
pub const SPP_BLOCKS: usize = 4;
/// Number of blocks in the reduced chain of the SPS parametrization.
pub const SPS_BLOCKS: usize = 10;

const PACK_SYMMETRY_TOL: f64 = 1e-10;

/// Length of a packed `d x d` symmetric block.
pub fn packed_len(d: usize) -> usize {
    d * (d + 1) / 2
}

/// Packs the lower triangle of a symmetric matrix row by row.
pub fn pa_pack(s: &Mat) -> Result<Vec<f64>> {
    let residual = s.relative_asymmetry()?;
    if residual > PACK_SYMMETRY_TOL {
        return Err(Error::NotSymmetric { residual });
    }
    let d = s.rows();
    let mut v = Vec::with_capacity(packed_len(d));
    for i in 0..d {
        for j in 0..=i {
            v.push(s[(i, j)]);
        }
    }
    Ok(v)
}

/// Inverse of [`pa_pack`].
pub fn pa_unpack(v: &[f64], d: usize) -> Result<Mat> {
    if v.len() != packed_len(d) {
        return Err(Error::LengthMismatch {
            expected: packed_len(d),
            found: v.len(),
        });
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    let mut s = Mat::zeros(d, d);
    let mut k = 0;
    for i in 0..d {
        for j in 0..=i {
            s[(i, j)] = v[k];
            s[(j, i)] = v[k];
            k += 1;
        }
    }
    Ok(s)
}

/// An ordered list of packed symmetric blocks for half-dimension `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamVector {
    pub d: usize,
    pub blocks: Vec<Vec<f64>>,
}

impl ParamVector {
    pub fn new(d: usize, blocks: Vec<Vec<f64>>) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidParameter("half-dimension must be positive"));
        }
        if blocks.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { d, blocks })
    }

    /// `count` all-zero full-size blocks.
    pub fn zeros(d: usize, count: usize) -> Self {
        Self {
            d,
            blocks: alloc::vec![alloc::vec![0.0; packed_len(d)]; count],
        }
    }

    pub fn from_matrices(d: usize, mats: &[Mat]) -> Result<Self> {
        let blocks = mats.iter().map(pa_pack).collect::<Result<Vec<_>>>()?;
        Self::new(d, blocks)
    }

    /// All coordinates, block after block.
    pub fn flatten(&self) -> Vec<f64> {
        self.blocks.iter().flatten().copied().collect()
    }

    /// Same block shapes as `self`, filled from `flat`.
    pub fn with_flat(&self, flat: &[f64]) -> Result<Self> {
        let total: usize = self.blocks.iter().map(Vec::len).sum();
        if flat.len() != total {
            return Err(Error::LengthMismatch {
                expected: total,
                found: flat.len(),
            });
        }
        let mut offset = 0;
        let blocks = self
            .blocks
            .iter()
            .map(|b| {
                let chunk = flat[offset..offset + b.len()].to_vec();
                offset += b.len();
                chunk
            })
            .collect();
        Self::new(self.d, blocks)
    }

    pub fn coordinate_count(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }

    fn expect_full_blocks(&self, count: usize) -> Result<Vec<Mat>> {
        if self.blocks.len() != count {
            return Err(Error::LengthMismatch {
                expected: count,
                found: self.blocks.len(),
            });
        }
        self.blocks.iter().map(|b| pa_unpack(b, self.d)).collect()
    }
}

/// Alternating chain from symmetric blocks, `Upper` at even indices.
fn alternating_chain(d: usize, blocks: &[Mat]) -> Result<FactorChain> {
    let mut chain = FactorChain::new(d);
    for (k, s) in blocks.iter().enumerate() {
        let side = if k % 2 == 0 { Side::Upper } else { Side::Lower };
        chain.push(UnitTriangularFactor::new(side, s.clone())?)?;
    }
    Ok(chain)
}

/// The nine-factor chain `Upper(S₁)` (rightmost), `Lower(S₂)`, …,
/// `Upper(S₉)`.
pub fn sp_from_params(p: &ParamVector) -> Result<FactorChain> {
    alternating_chain(p.d, &p.expect_full_blocks(SP_BLOCKS)?)
}

/// The four-factor chain `L` with `L · Lᵀ` the SPP point of `p`.
pub fn spp_chain_from_params(p: &ParamVector) -> Result<FactorChain> {
    alternating_chain(p.d, &p.expect_full_blocks(SPP_BLOCKS)?)
}

/// `H = L · Lᵀ` with `L = Lower(S₄) · Upper(S₃) · Lower(S₂) · Upper(S₁)`.
pub fn spp_from_params(p: &ParamVector) -> Result<Mat> {
    let l = spp_chain_from_params(p)?;
    Ok(l.apply_left(&l.transpose().product()))
}

/// Parameters of a symplectic matrix fixing the vector `q · e₁`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpsParams {
    /// Symplectic conjugator.
    pub q: Mat,
    /// `S₁, S₃, S₅, S₇, S₉`, each `d x d` symmetric.
    pub full_blocks: Vec<Mat>,
    /// The lower-right `(d−1) x (d−1)` parts of `S₂, S₄, S₆, S₈, S₁₀`.
    pub reduced_blocks: Vec<Mat>,
}

impl SpsParams {
    /// Reads ten interleaved packed blocks (full, reduced, full, …) with
    /// `q = I`, or nineteen blocks whose last nine are SP parameters of `q`.
    pub fn from_param_vector(p: &ParamVector) -> Result<Self> {
        let d = p.d;
        let q = match p.blocks.len() {
            SPS_BLOCKS => Mat::identity(2 * d),
            n if n == SPS_BLOCKS + SP_BLOCKS => {
                let qp = ParamVector::new(d, p.blocks[SPS_BLOCKS..].to_vec())?;
                sp_from_params(&qp)?.product()
            }
            n => {
                return Err(Error::LengthMismatch {
                    expected: SPS_BLOCKS,
                    found: n,
                })
            }
        };
        let mut full_blocks = Vec::with_capacity(5);
        let mut reduced_blocks = Vec::with_capacity(5);
        for (k, b) in p.blocks[..SPS_BLOCKS].iter().enumerate() {
            if k % 2 == 0 {
                full_blocks.push(pa_unpack(b, d)?);
            } else {
                reduced_blocks.push(pa_unpack(b, d - 1)?);
            }
        }
        Ok(Self {
            q,
            full_blocks,
            reduced_blocks,
        })
    }

    /// The ten interleaved reduced-chain blocks, without `q`.
    pub fn chain_blocks(&self) -> Result<Vec<Vec<f64>>> {
        let mut out = Vec::with_capacity(SPS_BLOCKS);
        for (f, r) in self.full_blocks.iter().zip(&self.reduced_blocks) {
            out.push(pa_pack(f)?);
            out.push(pa_pack(r)?);
        }
        Ok(out)
    }

    /// The reduced chain `M`, so that `H = q · M · q⁻¹`.
    pub fn reduced_chain(&self) -> Result<FactorChain> {
        if self.full_blocks.len() != 5 || self.reduced_blocks.len() != 5 {
            return Err(Error::LengthMismatch {
                expected: 5,
                found: self.full_blocks.len().min(self.reduced_blocks.len()),
            });
        }
        let n = self.q.rows();
        if !self.q.is_square() || !n.is_multiple_of(2) || n == 0 {
            return Err(Error::OddDimension {
                rows: n,
                cols: self.q.cols(),
            });
        }
        let d = n / 2;
        let mut blocks = Vec::with_capacity(SPS_BLOCKS);
        for (f, r) in self.full_blocks.iter().zip(&self.reduced_blocks) {
            if f.shape() != (d, d) || r.shape() != (d - 1, d - 1) {
                return Err(Error::DimensionMismatch {
                    op: "sps blocks",
                    left: (d, d - 1),
                    right: (f.rows(), r.rows()),
                });
            }
            blocks.push(f.clone());
            let mut padded = Mat::zeros(d, d);
            padded.set_block(1, 1, r);
            blocks.push(padded);
        }
        alternating_chain(d, &blocks)
    }
}

/// `H = Q · M · Q⁻¹` with `M` the zero-bordered reduced chain, so `H` fixes
/// `Q · e₁`.
pub fn sps_from_params(p: &SpsParams) -> Result<Mat> {
    let m = p.reduced_chain()?;
    require_symplectic(&p.q, DEFAULT_SYMPLECTIC_TOL)?;
    let d = m.half_dim();
    // Q⁻¹ = −J Qᵀ J for symplectic Q.
    let j = crate::symplectic::StandardJ::new(d);
    let qt_j = j.apply_left(&p.q).transpose().scale(-1.0);
    let q_inv = j.apply_left(&qt_j).scale(-1.0);
    Ok(&p.q * &m.apply_left(&q_inv))
}

/// Zero-padded SP parameters of a unit triangular chain, for chains that
/// fit the alternating nine-slot pattern (consecutive factors on the same
/// side are separated by an identity slot).
pub fn factor_to_params(c: &FactorChain) -> Result<ParamVector> {
    let d = c.half_dim();
    let mut blocks: Vec<Vec<f64>> = Vec::with_capacity(SP_BLOCKS);
    for f in c.factors() {
        let unit = match f {
            Factor::Unit(u) => u,
            Factor::Diagonal(_) => {
                return Err(Error::InvalidChain("diagonal factor has no SP parameters"))
            }
        };
        let slot_side = |k: usize| {
            if k.is_multiple_of(2) {
                Side::Upper
            } else {
                Side::Lower
            }
        };
        if slot_side(blocks.len()) != unit.side() {
            blocks.push(alloc::vec![0.0; packed_len(d)]);
        }
        blocks.push(pa_pack(unit.s())?);
        if blocks.len() > SP_BLOCKS {
            return Err(Error::InvalidChain(
                "chain does not fit nine alternating factors",
            ));
        }
    }
    blocks.resize(SP_BLOCKS, alloc::vec![0.0; packed_len(d)]);
    ParamVector::new(d, blocks)
}

/// SP parameters of an arbitrary symplectic matrix via the nine-factor
/// decomposition.
pub fn params_of(h: &Mat) -> Result<ParamVector> {
    factor_to_params(&unit_triangular_9(h)?.chain)
}

/// The chain with blocks `(1 − t)·p0 + t·p1`.
pub fn path_interpolate(p0: &ParamVector, p1: &ParamVector, t: f64) -> Result<FactorChain> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidParameter(
            "interpolation parameter outside [0, 1]",
        ));
    }
    if p0.d != p1.d || p0.blocks.len() != p1.blocks.len() {
        return Err(Error::LengthMismatch {
            expected: p0.blocks.len(),
            found: p1.blocks.len(),
        });
    }
    let a = p0.flatten();
    let b = p1.flatten();
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    let mixed: Vec<f64> = a
        .iter()
        .zip(&b)
        .map(|(x, y)| (1.0 - t) * x + t * y)
        .collect();
    sp_from_params(&p0.with_flat(&mixed)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplectic::{symplecticity_check, StandardJ};
    use alloc::vec;

    fn scalar_params(values: &[f64]) -> ParamVector {
        ParamVector::new(1, values.iter().map(|&v| vec![v]).collect()).unwrap()
    }

    #[test]
    fn pack_examples() {
        let s = Mat::from_rows(&[[1.0, 2.0], [2.0, 3.0]]).unwrap();
        assert_eq!(pa_pack(&s).unwrap(), vec![1.0, 2.0, 3.0]);
        assert_eq!(pa_pack(&Mat::zeros(3, 3)).unwrap(), vec![0.0; 6]);
        assert_eq!(pa_unpack(&[1.0, 2.0, 3.0], 2).unwrap(), s);
        assert_eq!(pa_unpack(&[5.0], 1).unwrap(), Mat::from_diagonal(&[5.0]));
        assert_eq!(pa_unpack(&[], 0).unwrap(), Mat::zeros(0, 0));
        assert!(matches!(
            pa_unpack(&[1.0, 2.0], 2),
            Err(Error::LengthMismatch { .. })
        ));
        let asym = Mat::from_rows(&[[1.0, 2.0], [0.0, 3.0]]).unwrap();
        assert!(matches!(pa_pack(&asym), Err(Error::NotSymmetric { .. })));
    }

    #[test]
    fn sp_examples() {
        let zero = ParamVector::zeros(3, SP_BLOCKS);
        assert_eq!(sp_from_params(&zero).unwrap().product(), Mat::identity(6));

        let p = scalar_params(&[1.0, -1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(
            sp_from_params(&p).unwrap().product(),
            StandardJ::new(1).to_mat()
        );

        assert!(sp_from_params(&ParamVector::zeros(1, 8)).is_err());
    }

    #[test]
    fn spp_examples() {
        assert_eq!(
            spp_from_params(&ParamVector::zeros(2, SPP_BLOCKS)).unwrap(),
            Mat::identity(4)
        );
        let h = spp_from_params(&scalar_params(&[0.0, 1.0, 0.0, 0.0])).unwrap();
        assert_eq!(h, Mat::from_rows(&[[1.0, 1.0], [1.0, 2.0]]).unwrap());
    }

    #[test]
    fn sps_scalar_case() {
        let p = SpsParams::from_param_vector(
            &ParamVector::new(
                1,
                vec![
                    vec![1.0],
                    vec![],
                    vec![0.5],
                    vec![],
                    vec![1.5],
                    vec![],
                    vec![0.0],
                    vec![],
                    vec![0.0],
                    vec![],
                ],
            )
            .unwrap(),
        )
        .unwrap();
        let h = sps_from_params(&p).unwrap();
        assert_eq!(h, Mat::from_rows(&[[1.0, 3.0], [0.0, 1.0]]).unwrap());

        let zero = SpsParams {
            q: Mat::identity(4),
            full_blocks: vec![Mat::zeros(2, 2); 5],
            reduced_blocks: vec![Mat::zeros(1, 1); 5],
        };
        assert_eq!(sps_from_params(&zero).unwrap(), Mat::identity(4));
    }

    #[test]
    fn sps_rejects_non_symplectic_conjugator() {
        let p = SpsParams {
            q: Mat::from_diagonal(&[2.0, 2.0]),
            full_blocks: vec![Mat::zeros(1, 1); 5],
            reduced_blocks: vec![Mat::zeros(0, 0); 5],
        };
        assert!(matches!(
            sps_from_params(&p),
            Err(Error::NotSymplectic { .. })
        ));
    }

    #[test]
    fn factor_to_params_pads() {
        let i = Mat::identity(1);
        let j_chain = FactorChain::from_factors(
            1,
            vec![
                Factor::upper(i.clone()).unwrap(),
                Factor::lower(-&i).unwrap(),
                Factor::upper(i).unwrap(),
            ],
        )
        .unwrap();
        let p = factor_to_params(&j_chain).unwrap();
        assert_eq!(p.blocks.len(), SP_BLOCKS);
        assert_eq!(
            p.flatten(),
            vec![1.0, -1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]
        );

        // a chain starting with a lower factor gets an identity slot first
        let lower_first =
            FactorChain::from_factors(1, vec![Factor::lower(Mat::identity(1)).unwrap()]).unwrap();
        assert_eq!(
            factor_to_params(&lower_first).unwrap().flatten()[..2],
            [0.0, 1.0]
        );

        let with_diag =
            FactorChain::from_factors(1, vec![Factor::diagonal(Mat::identity(1)).unwrap()])
                .unwrap();
        assert!(factor_to_params(&with_diag).is_err());

        let too_long = FactorChain::from_factors(
            1,
            (0..9)
                .map(|_| Factor::lower(Mat::identity(1)).unwrap())
                .collect(),
        )
        .unwrap();
        assert!(factor_to_params(&too_long).is_err());
    }

    #[test]
    fn params_of_j_rebuilds_j() {
        let j = StandardJ::new(1).to_mat();
        let p = params_of(&j).unwrap();
        let back = sp_from_params(&p).unwrap().product();
        assert!((&back - &j).max_abs() < 1e-12);
    }

    #[test]
    fn path_endpoints_and_midpoint() {
        let p0 = ParamVector::zeros(1, SP_BLOCKS);
        let p1 = scalar_params(&[1.0, -1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(
            path_interpolate(&p0, &p1, 0.0).unwrap().product(),
            Mat::identity(2)
        );
        assert_eq!(
            path_interpolate(&p0, &p1, 1.0).unwrap().product(),
            StandardJ::new(1).to_mat()
        );
        let mid = path_interpolate(&p0, &p1, 0.5).unwrap().product();
        assert!(symplecticity_check(&mid, 1e-12).unwrap().passed);
        assert!(path_interpolate(&p0, &p1, 1.5).is_err());
        assert!(path_interpolate(&p0, &ParamVector::zeros(2, SP_BLOCKS), 0.5).is_err());
    }
}
