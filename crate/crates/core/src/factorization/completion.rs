use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::kernel::{default_rank_tol, solve_right, svd};
use crate::mat::Mat;
use crate::symplectic::{symmetric_pair_residual, StandardJ};

/// Normalized symmetric-pair residual accepted by the completion routines.
const PAIR_TOL: f64 = 1e-10;

/// `B = −J · a · (aᵀa)⁻¹`, the right half of a symplectic completion of the
/// full-rank symmetric pair `a`.
pub fn completion_block(a: &Mat) -> Result<Mat> {
    let (rows, d) = a.shape();
    if rows != 2 * d || d == 0 {
        return Err(Error::InvalidShape {
            rows,
            cols: d,
            expected: 2 * d * d,
            found: rows * d,
        });
    }
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    let residual = symmetric_pair_residual(a)?;
    if residual > PAIR_TOL {
        return Err(Error::NotSymmetricPair { residual });
    }
    let s = svd(a)?;
    let rank = s
        .sigma
        .iter()
        .filter(|&&x| x > default_rank_tol(rows) * s.sigma[0])
        .count();
    if rank < d {
        return Err(Error::RankDeficient { rank, expected: d });
    }
    let gram = (&a.transpose() * a).symmetrized();
    let ja = StandardJ::new(d).apply_left(a);
    Ok(solve_right(&gram, &ja)?.scale(-1.0))
}

/// The symplectic matrix `[a B]` completing a full-rank `2d x d` symmetric
/// pair `a`.
pub fn complete_symplectic(a: &Mat) -> Result<Mat> {
    let b = completion_block(a)?;
    a.hstack(&b)
}

/// A symplectic matrix whose first column is exactly `u`.
///
/// The left half is grown one column at a time: each new column is the first
/// standard basis vector whose component orthogonal to `span(A) + span(JA)`
/// is not small, normalized. Orthogonality to `JA` keeps the block a
/// symmetric pair; orthogonality to `A` keeps it well conditioned. The right
/// half comes from [`complete_symplectic`].
pub fn extend_to_symplectic_with_column(u: &[f64]) -> Result<Mat> {
    let n = u.len();
    if n == 0 || !n.is_multiple_of(2) {
        return Err(Error::OddDimension { rows: n, cols: 1 });
    }
    if u.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    let unorm = libm::sqrt(u.iter().map(|x| x * x).sum());
    if unorm == 0.0 {
        return Err(Error::ZeroVector);
    }
    let d = n / 2;
    let j = StandardJ::new(d);
    let threshold = 0.5 / libm::sqrt(d as f64);

    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(d);
    columns.push(u.to_vec());
    // Orthonormal basis of span(A) + span(JA).
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(2 * d);
    let unit: Vec<f64> = u.iter().map(|x| x / unorm).collect();
    let j_unit = j.apply_left(&Mat::column_vector(&unit)).column(0);
    basis.push(unit);
    add_to_basis(&mut basis, j_unit);

    while columns.len() < d {
        let candidate = (0..n).find_map(|i| {
            let mut e = alloc::vec![0.0; n];
            e[i] = 1.0;
            let v = project_out(&basis, e);
            let norm = norm2(&v);
            (norm >= threshold).then(|| v.iter().map(|x| x / norm).collect::<Vec<f64>>())
        });
        let v = candidate.ok_or(Error::RankDeficient {
            rank: columns.len(),
            expected: d,
        })?;
        let jv = j.apply_left(&Mat::column_vector(&v)).column(0);
        add_to_basis(&mut basis, v.clone());
        add_to_basis(&mut basis, jv);
        columns.push(v);
    }

    let mut a = Mat::zeros(n, d);
    for (k, c) in columns.iter().enumerate() {
        a.set_column(k, c);
    }
    complete_symplectic(&a)
}

fn norm2(v: &[f64]) -> f64 {
    libm::sqrt(v.iter().map(|x| x * x).sum())
}

/// Removes the components along an orthonormal basis, twice for stability.
fn project_out(basis: &[Vec<f64>], mut v: Vec<f64>) -> Vec<f64> {
    for _ in 0..2 {
        for b in basis {
            let dot: f64 = b.iter().zip(&v).map(|(x, y)| x * y).sum();
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi -= dot * bi;
            }
        }
    }
    v
}

fn add_to_basis(basis: &mut Vec<Vec<f64>>, v: Vec<f64>) {
    let v = project_out(basis, v);
    let norm = norm2(&v);
    if norm > 1e-12 {
        basis.push(v.into_iter().map(|x| x / norm).collect());
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplectic::{symplecticity_check, StandardJ};

    #[test]
    fn completes_e1() {
        let q = complete_symplectic(&Mat::column_vector(&[1.0, 0.0])).unwrap();
        assert_eq!(q, Mat::identity(2));
    }

    #[test]
    fn completes_scaled_column() {
        let q = complete_symplectic(&Mat::column_vector(&[2.0, 0.0])).unwrap();
        assert_eq!(q, Mat::from_diagonal(&[2.0, 0.5]));
    }

    #[test]
    fn completion_identities() {
        let a = Mat::from_rows(&[[1.0, 0.0], [0.0, 1.0], [0.0, 1.0], [1.0, 0.0]]).unwrap();
        let b = completion_block(&a).unwrap();
        let j = StandardJ::new(2).to_mat();
        let atjb = &(&a.transpose() * &j) * &b;
        let btjb = &(&b.transpose() * &j) * &b;
        assert!((&atjb - &Mat::identity(2)).max_abs() < 1e-15);
        assert!(btjb.max_abs() < 1e-15);
    }

    #[test]
    fn completion_rejects_bad_input() {
        let bad = Mat::from_rows(&[[1.0, 0.0], [0.0, 0.0], [0.0, 1.0], [0.0, 0.0]]).unwrap();
        assert!(matches!(
            complete_symplectic(&bad),
            Err(Error::NotSymmetricPair { .. })
        ));
        let deficient = Mat::from_rows(&[[1.0, 1.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]]).unwrap();
        assert!(matches!(
            complete_symplectic(&deficient),
            Err(Error::RankDeficient { .. })
        ));
        assert!(complete_symplectic(&Mat::zeros(4, 1)).is_err());
    }

    #[test]
    fn extension_examples() {
        assert_eq!(
            extend_to_symplectic_with_column(&[1.0, 0.0]).unwrap(),
            Mat::identity(2)
        );
        assert_eq!(
            extend_to_symplectic_with_column(&[0.0, 1.0]).unwrap(),
            Mat::from_rows(&[[0.0, -1.0], [1.0, 0.0]]).unwrap()
        );
        let u = [1.0, 1.0, 1.0, 1.0];
        let q = extend_to_symplectic_with_column(&u).unwrap();
        assert_eq!(q.column(0), u.to_vec());
        assert!(symplecticity_check(&q, 1e-10).unwrap().passed);
        assert!(matches!(
            extend_to_symplectic_with_column(&[0.0, 0.0]),
            Err(Error::ZeroVector)
        ));
    }
}
