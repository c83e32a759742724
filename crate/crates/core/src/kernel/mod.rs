//! Dense linear-algebra primitives and the three subroutines the
//! factorizations are built on: a rank-revealing factorization, the SPD
//! square root, and the splitting of a nonsingular matrix into a product of
//! two symmetric matrices.

mod eigen;
mod lu;
mod qr;
mod svd;

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub use eigen::{eigenvalues, symmetric_eigen, Eigenvalue, SymmetricEigen};
pub use lu::{det, inverse, solve, solve_right, Lu};
pub use qr::{null_space, PivotedQr};
pub use svd::{min_singular_value, spectral_norm, svd, Svd};

use crate::error::{Error, Result};
use crate::mat::Mat;

/// Default relative numerical-rank threshold for an `n`-dimensional matrix:
/// singular values at or below `1e-10 · n · σ_max` count as zero.
pub fn default_rank_tol(n: usize) -> f64 {
    1e-10 * n.max(1) as f64
}

/// Seed used by [`two_symmetric_factor`] when the caller does not supply one.
pub const DEFAULT_SPLIT_SEED: u64 = 0x5359_4d50_4641_4354;

/// Number of random null-space combinations tried before giving up on a
/// nonsingular intertwiner.
pub const SPLIT_MAX_DRAWS: usize = 32;

/// `a = p · diag(I_r, 0) · q` with `p`, `q` nonsingular.
#[derive(Debug, Clone)]
pub struct RankFactorization {
    pub p: Mat,
    pub q: Mat,
    pub rank: usize,
}

impl RankFactorization {
    /// `p · diag(I_r, 0) · q`.
    pub fn reconstruct(&self) -> Mat {
        let n = self.p.rows();
        let mut proj = Mat::zeros(n, n);
        for i in 0..self.rank {
            proj[(i, i)] = 1.0;
        }
        &(&self.p * &proj) * &self.q
    }
}

/// Rank-revealing factorization from the SVD `a = UΣVᵀ`: the rank `r`
/// counts `σ_i > tol · σ_max`, `p = U · diag(σ_1..σ_r, 1, …, 1)` and
/// `q = Vᵀ`.
pub fn rank_factor(a: &Mat, tol: f64) -> Result<RankFactorization> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidParameter("rank tolerance must be positive"));
    }
    let n = a.rows();
    let s = svd(a)?;
    let smax = s.sigma.first().copied().unwrap_or(0.0);
    let rank = if smax == 0.0 {
        0
    } else {
        s.sigma.iter().take_while(|&&x| x > tol * smax).count()
    };
    let mut p = s.u;
    for j in 0..rank {
        for i in 0..n {
            p[(i, j)] *= s.sigma[j];
        }
    }
    Ok(RankFactorization {
        p,
        q: s.v.transpose(),
        rank,
    })
}

/// Symmetric positive definite square root by eigendecomposition.
///
/// Eigenvalues below `1e3 · ε · λ_max` are raised to that floor; clearly
/// negative eigenvalues are an error.
pub fn spd_sqrt(p: &Mat) -> Result<Mat> {
    let asym = p.relative_asymmetry()?;
    if asym > 1e-10 {
        return Err(Error::NotSymmetric { residual: asym });
    }
    let e = symmetric_eigen(p)?;
    let n = p.rows();
    if n == 0 {
        return Ok(Mat::zeros(0, 0));
    }
    let lmin = e.values[0];
    let lmax = e.values[n - 1];
    if lmax <= 0.0 {
        return Err(Error::NotPositiveDefinite {
            min_eigenvalue: lmin,
        });
    }
    let floor = 1e3 * f64::EPSILON * lmax;
    if lmin < -floor {
        return Err(Error::NotPositiveDefinite {
            min_eigenvalue: lmin,
        });
    }
    let roots: Vec<f64> = e.values.iter().map(|&l| libm::sqrt(l.max(floor))).collect();
    let mut scaled = e.vectors.clone();
    for j in 0..n {
        for i in 0..n {
            scaled[(i, j)] *= roots[j];
        }
    }
    Ok((&scaled * &e.vectors.transpose()).symmetrized())
}

/// `p = s1 · s2` with both factors symmetric and `s2` nonsingular.
#[derive(Debug, Clone)]
pub struct SymmetricPairFactors {
    pub s1: Mat,
    pub s2: Mat,
}

/// Splits a nonsingular matrix into two symmetric factors using
/// [`DEFAULT_SPLIT_SEED`].
pub fn two_symmetric_factor(p: &Mat) -> Result<SymmetricPairFactors> {
    two_symmetric_factor_seeded(p, DEFAULT_SPLIT_SEED)
}

/// Splits a nonsingular `p` as `s1 · s2`, both symmetric.
///
/// Any symmetric nonsingular `K` with `p K = K pᵀ` gives `s1 = p K`
/// (symmetric because of the intertwining identity) and `s2 = K⁻¹`. The
/// symmetric solutions form a linear space of dimension at least `d`; `K`
/// is a seeded random combination of an orthonormal basis of that space,
/// redrawn until it is numerically nonsingular.
pub fn two_symmetric_factor_seeded(p: &Mat, seed: u64) -> Result<SymmetricPairFactors> {
    if !p.is_square() {
        return Err(Error::NotSquare {
            rows: p.rows(),
            cols: p.cols(),
        });
    }
    let d = p.rows();
    let rank_tol = default_rank_tol(d);
    let sv = svd(p)?;
    let smax = sv.sigma.first().copied().unwrap_or(0.0);
    let smin = sv.sigma.last().copied().unwrap_or(0.0);
    if d == 0 || smin <= rank_tol * smax {
        return Err(Error::Singular {
            what: "matrix to split",
            sigma_min: smin,
        });
    }

    let basis = intertwiner_basis(&p.scale(1.0 / smax), rank_tol);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..SPLIT_MAX_DRAWS {
        let coeffs: Vec<f64> = (0..basis.cols())
            .map(|_| rng.sample(StandardNormal))
            .collect();
        let k = unpack_symmetric(&basis.mat_vec(&coeffs), d);
        let ks = svd(&k)?;
        let kmax = ks.sigma[0];
        let kmin = ks.sigma[d - 1];
        if kmax == 0.0 || kmin <= rank_tol * kmax {
            continue;
        }
        let k_inv = inverse(&k)?;
        return Ok(SymmetricPairFactors {
            s1: (p * &k).symmetrized(),
            s2: k_inv.symmetrized(),
        });
    }
    Err(Error::NoNonsingularSolution {
        attempts: SPLIT_MAX_DRAWS,
    })
}

/// Orthonormal basis (in packed lower-triangle coordinates) of the
/// symmetric `K` with `p K − K pᵀ = 0`. The residual is skew-symmetric, so
/// only its strictly upper entries give equations.
fn intertwiner_basis(p: &Mat, tol: f64) -> Mat {
    let d = p.rows();
    let unknowns = d * (d + 1) / 2;
    let equations = d * (d - 1) / 2;
    let mut sys = Mat::zeros(equations, unknowns);
    let mut row = 0;
    for i in 0..d {
        for j in i + 1..d {
            for l in 0..d {
                // (pK)_ij = Σ_l p_il K_lj ;  (K pᵀ)_ij = Σ_l K_il p_jl
                sys[(row, packed_index(l, j))] += p[(i, l)];
                sys[(row, packed_index(i, l))] -= p[(j, l)];
            }
            row += 1;
        }
    }
    null_space(&sys, tol)
}

/// Position of entry `(i, j)` of a symmetric matrix in the row-by-row
/// lower-triangle packing.
#[inline]
pub(crate) fn packed_index(i: usize, j: usize) -> usize {
    let (r, c) = if i >= j { (i, j) } else { (j, i) };
    r * (r + 1) / 2 + c
}

pub(crate) fn unpack_symmetric(v: &[f64], d: usize) -> Mat {
    let mut m = Mat::zeros(d, d);
    for i in 0..d {
        for j in 0..=i {
            let x = v[packed_index(i, j)];
            m[(i, j)] = x;
            m[(j, i)] = x;
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn rank_factor_identity() {
        let rf = rank_factor(&Mat::identity(2), default_rank_tol(2)).unwrap();
        assert_eq!(rf.rank, 2);
        assert!((&rf.reconstruct() - &Mat::identity(2)).frobenius_norm() < 1e-15);
    }

    #[test]
    fn rank_factor_zero_scalar() {
        let rf = rank_factor(&Mat::zeros(1, 1), 1e-10).unwrap();
        assert_eq!(rf.rank, 0);
        assert_eq!(rf.p, Mat::identity(1));
        assert_eq!(rf.q, Mat::identity(1));
    }

    #[test]
    fn rank_factor_diagonal_rank_one() {
        let a = Mat::from_rows(&[[1.0, 0.0], [0.0, 0.0]]).unwrap();
        let rf = rank_factor(&a, default_rank_tol(2)).unwrap();
        assert_eq!(rf.rank, 1);
        assert!((&rf.reconstruct() - &a).frobenius_norm() <= 1e-12);
        assert!(min_singular_value(&rf.p).unwrap() > 0.5);
        assert!(min_singular_value(&rf.q).unwrap() > 0.5);
    }

    #[test]
    fn rank_factor_errors() {
        assert!(matches!(
            rank_factor(&Mat::zeros(2, 3), 1e-10),
            Err(Error::NotSquare { .. })
        ));
        assert!(matches!(
            rank_factor(&Mat::identity(2), 0.0),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn spd_sqrt_examples() {
        let r = spd_sqrt(&Mat::from_rows(&[[4.0]]).unwrap()).unwrap();
        assert_relative_eq!(r[(0, 0)], 2.0, epsilon = 1e-15);
        let r = spd_sqrt(&Mat::identity(2)).unwrap();
        assert!((&r - &Mat::identity(2)).frobenius_norm() < 1e-15);

        let p = Mat::from_rows(&[[5.0, 4.0], [4.0, 5.0]]).unwrap();
        let r = spd_sqrt(&p).unwrap();
        assert!((&(&r * &r) - &p).frobenius_norm() < 1e-10);
        // eigenvalues 3 and 1 on (1,1)/√2 and (1,-1)/√2
        assert_relative_eq!(r[(0, 0)], 2.0, epsilon = 1e-13);
        assert_relative_eq!(r[(0, 1)], 1.0, epsilon = 1e-13);
    }

    #[test]
    fn spd_sqrt_rejects_bad_input() {
        let ns = Mat::from_rows(&[[1.0, 2.0], [0.0, 1.0]]).unwrap();
        assert!(matches!(spd_sqrt(&ns), Err(Error::NotSymmetric { .. })));
        let indef = Mat::from_rows(&[[1.0, 0.0], [0.0, -1.0]]).unwrap();
        assert!(matches!(
            spd_sqrt(&indef),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }

    fn check_split(p: &Mat, f: &SymmetricPairFactors) {
        assert_eq!(f.s1, f.s1.transpose());
        assert_eq!(f.s2, f.s2.transpose());
        let prod = &f.s1 * &f.s2;
        assert!((&prod - p).frobenius_norm() <= 1e-10 * (1.0 + p.frobenius_norm()));
    }

    #[test]
    fn two_symmetric_scalar() {
        let p = Mat::from_rows(&[[3.0]]).unwrap();
        check_split(&p, &two_symmetric_factor(&p).unwrap());
    }

    #[test]
    fn two_symmetric_rotation() {
        // the pair ([[0,1],[1,0]], [[1,0],[0,-1]]) is one valid answer
        let a = Mat::from_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap();
        let b = Mat::from_rows(&[[1.0, 0.0], [0.0, -1.0]]).unwrap();
        let p = Mat::from_rows(&[[0.0, -1.0], [1.0, 0.0]]).unwrap();
        assert_eq!(&a * &b, p);
        check_split(&p, &two_symmetric_factor(&p).unwrap());
    }

    #[test]
    fn two_symmetric_identity_and_determinism() {
        let p = Mat::identity(2);
        let f = two_symmetric_factor(&p).unwrap();
        check_split(&p, &f);
        let g = two_symmetric_factor(&p).unwrap();
        assert_eq!(f.s1, g.s1);
        assert_eq!(f.s2, g.s2);
    }

    #[test]
    fn two_symmetric_rejects_singular() {
        let p = Mat::from_rows(&[[1.0, 2.0], [2.0, 4.0]]).unwrap();
        assert!(matches!(
            two_symmetric_factor(&p),
            Err(Error::Singular { .. })
        ));
    }

    #[test]
    fn packing_order_matches_lower_triangle_rows() {
        assert_eq!(packed_index(0, 0), 0);
        assert_eq!(packed_index(1, 0), 1);
        assert_eq!(packed_index(1, 1), 2);
        assert_eq!(packed_index(2, 0), 3);
        assert_eq!(packed_index(0, 2), 3);
    }
}
