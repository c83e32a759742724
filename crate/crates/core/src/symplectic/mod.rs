//! The standard skew form, the symplecticity test, block access and the
//! symmetric-pair condition.
//!
//! Floating-point inputs are never exactly symplectic, so every test here
//! is a normalized residual compared against a tolerance. The residual of
//! `HᵀJH − J` scales like `‖H‖²`, hence the `1 + ‖H‖_F²` normalization.

mod chain;

pub use chain::{
    chain_inverse, chain_product, chain_transpose, move_diagonal, DiagonalFactor, Factor,
    FactorChain, Side, UnitTriangularFactor,
};

use crate::error::{Error, Result};
use crate::mat::Mat;

/// Default tolerance on the normalized symplecticity residual.
pub const DEFAULT_SYMPLECTIC_TOL: f64 = 1e-10;

/// The standard skew form `J = [[0, I_d], [−I_d, 0]]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StandardJ {
    d: usize,
}

impl StandardJ {
    pub fn new(d: usize) -> Self {
        Self { d }
    }

    pub fn half_dim(&self) -> usize {
        self.d
    }

    pub fn to_mat(&self) -> Mat {
        let d = self.d;
        let mut j = Mat::zeros(2 * d, 2 * d);
        for i in 0..d {
            j[(i, d + i)] = 1.0;
            j[(d + i, i)] = -1.0;
        }
        j
    }

    /// `J · m` without forming `J`: rows are permuted and the lower half
    /// negated.
    pub fn apply_left(&self, m: &Mat) -> Mat {
        let d = self.d;
        assert_eq!(m.rows(), 2 * d, "J·M dimension mismatch");
        let mut out = Mat::zeros(m.rows(), m.cols());
        for j in 0..m.cols() {
            for i in 0..d {
                out[(i, j)] = m[(d + i, j)];
                out[(d + i, j)] = -m[(i, j)];
            }
        }
        out
    }
}

/// Half-dimension `d` of a `2d x 2d` matrix.
pub fn half_dim(h: &Mat) -> Result<usize> {
    if !h.is_square() || !h.rows().is_multiple_of(2) {
        return Err(Error::OddDimension {
            rows: h.rows(),
            cols: h.cols(),
        });
    }
    Ok(h.rows() / 2)
}

/// Outcome of a symplecticity test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckReport {
    /// `‖HᵀJH − J‖_F`.
    pub residual: f64,
    /// `residual / (1 + ‖H‖_F²)`.
    pub relative_residual: f64,
    pub passed: bool,
    pub tolerance: f64,
}

/// Evaluates `‖HᵀJH − J‖_F` and compares its normalized value with `tol`.
pub fn symplecticity_check(h: &Mat, tol: f64) -> Result<CheckReport> {
    let d = half_dim(h)?;
    let j = StandardJ::new(d);
    let form = &h.transpose() * &j.apply_left(h);
    let residual = (&form - &j.to_mat()).frobenius_norm();
    let norm = h.frobenius_norm();
    let relative_residual = residual / (1.0 + norm * norm);
    Ok(CheckReport {
        residual,
        relative_residual,
        passed: relative_residual <= tol,
        tolerance: tol,
    })
}

/// Returns an error unless `h` passes [`symplecticity_check`] at `tol`.
pub fn require_symplectic(h: &Mat, tol: f64) -> Result<CheckReport> {
    let report = symplecticity_check(h, tol)?;
    if !report.passed {
        return Err(Error::NotSymplectic {
            relative_residual: report.relative_residual,
            tolerance: tol,
        });
    }
    Ok(report)
}

/// The four `d x d` blocks of `H = [[A₁, B₁], [A₂, B₂]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Blocks {
    pub a1: Mat,
    pub b1: Mat,
    pub a2: Mat,
    pub b2: Mat,
}

pub fn blocks(h: &Mat) -> Result<Blocks> {
    let d = half_dim(h)?;
    Ok(Blocks {
        a1: h.block(0, 0, d, d),
        b1: h.block(0, d, d, d),
        a2: h.block(d, 0, d, d),
        b2: h.block(d, d, d, d),
    })
}

/// Normalized residual `‖A₁ᵀA₂ − A₂ᵀA₁‖_F / (1 + ‖A‖_F²)` of a `2d x k`
/// block column.
pub fn symmetric_pair_residual(a: &Mat) -> Result<f64> {
    let rows = a.rows();
    let k = a.cols();
    if !rows.is_multiple_of(2) || k < 1 || k > rows / 2 {
        return Err(Error::OddDimension { rows, cols: k });
    }
    let d = rows / 2;
    let top = a.block(0, 0, d, k);
    let bottom = a.block(d, 0, d, k);
    let lhs = &top.transpose() * &bottom;
    let norm = a.frobenius_norm();
    Ok(lhs.asymmetry() / (1.0 + norm * norm))
}

/// Whether `a` (2d x k, 1 ≤ k ≤ d) is a symmetric pair, i.e.
/// `A₁ᵀA₂ = A₂ᵀA₁` up to `tol` in the normalized residual.
pub fn is_symmetric_pair(a: &Mat, tol: f64) -> Result<bool> {
    Ok(symmetric_pair_residual(a)? <= tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn j1() -> Mat {
        StandardJ::new(1).to_mat()
    }

    #[test]
    fn standard_j_properties() {
        for d in 1..4 {
            let j = StandardJ::new(d).to_mat();
            assert_eq!(j.transpose(), -&j);
            assert_eq!(&j * &j, Mat::identity(2 * d).scale(-1.0));
            let m = Mat::from_vec(2 * d, 2, (0..4 * d).map(|x| x as f64).collect()).unwrap();
            assert_eq!(StandardJ::new(d).apply_left(&m), &j * &m);
        }
    }

    #[test]
    fn check_examples() {
        let r = symplecticity_check(&Mat::identity(2), DEFAULT_SYMPLECTIC_TOL).unwrap();
        assert_eq!(r.residual, 0.0);
        assert!(r.passed);

        let r = symplecticity_check(&j1(), DEFAULT_SYMPLECTIC_TOL).unwrap();
        assert_eq!(r.residual, 0.0);
        assert!(r.passed);

        let r =
            symplecticity_check(&Mat::from_diagonal(&[2.0, 2.0]), DEFAULT_SYMPLECTIC_TOL).unwrap();
        assert_relative_eq!(r.residual, 3.0 * 2f64.sqrt(), epsilon = 1e-14);
        assert!(!r.passed);
        assert_eq!(r.tolerance, DEFAULT_SYMPLECTIC_TOL);
    }

    #[test]
    fn check_rejects_odd_dimension() {
        assert!(matches!(
            symplecticity_check(&Mat::identity(3), 1e-10),
            Err(Error::OddDimension { .. })
        ));
        assert!(matches!(
            blocks(&Mat::zeros(2, 4)),
            Err(Error::OddDimension { .. })
        ));
    }

    #[test]
    fn block_examples() {
        let b = blocks(&Mat::identity(2)).unwrap();
        assert_eq!(
            (b.a1[(0, 0)], b.b1[(0, 0)], b.a2[(0, 0)], b.b2[(0, 0)]),
            (1.0, 0.0, 0.0, 1.0)
        );
        let b = blocks(&j1()).unwrap();
        assert_eq!(
            (b.a1[(0, 0)], b.b1[(0, 0)], b.a2[(0, 0)], b.b2[(0, 0)]),
            (0.0, 1.0, -1.0, 0.0)
        );
        let h = Mat::from_rows(&[[2.0, 1.0], [1.0, 1.0]]).unwrap();
        let b = blocks(&h).unwrap();
        assert_eq!(
            (b.a1[(0, 0)], b.b1[(0, 0)], b.a2[(0, 0)], b.b2[(0, 0)]),
            (2.0, 1.0, 1.0, 1.0)
        );
    }

    #[test]
    fn symmetric_pair_examples() {
        let e1 = Mat::column_vector(&[1.0, 0.0]);
        assert!(is_symmetric_pair(&e1, 1e-12).unwrap());

        let a = Mat::from_rows(&[[1.0, 0.0], [0.0, 1.0], [0.0, 1.0], [1.0, 0.0]]).unwrap();
        assert!(is_symmetric_pair(&a, 1e-12).unwrap());

        // first two columns of J for d = 2 are [0;-I]: still a pair
        let j2 = StandardJ::new(2).to_mat();
        assert!(is_symmetric_pair(&j2.block(0, 0, 4, 2), 1e-12).unwrap());

        // [e1, e3] (d = 2): A₁ᵀA₂ = [[0,0],[1,0]] is not symmetric
        let bad = Mat::from_rows(&[[1.0, 0.0], [0.0, 0.0], [0.0, 1.0], [0.0, 0.0]]).unwrap();
        assert!(!is_symmetric_pair(&bad, 1e-12).unwrap());
    }

    #[test]
    fn symmetric_pair_shape_errors() {
        assert!(is_symmetric_pair(&Mat::zeros(4, 3), 1e-10).is_err());
        assert!(is_symmetric_pair(&Mat::zeros(4, 0), 1e-10).is_err());
        assert!(is_symmetric_pair(&Mat::zeros(3, 1), 1e-10).is_err());
    }
}
