//! One-sided Jacobi singular value decomposition.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::mat::Mat;

const MAX_SWEEPS: usize = 80;

/// `A = U · diag(sigma) · Vᵀ` with singular values sorted in decreasing
/// order. For an `m x n` input with `m >= n`, `U` is `m x n` with
/// orthonormal columns and `V` is `n x n` orthogonal; wide inputs are
/// handled by transposition, so `U` is then `m x m` and `V` is `n x m`.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: Mat,
    pub sigma: Vec<f64>,
    pub v: Mat,
}

pub fn svd(a: &Mat) -> Result<Svd> {
    if a.rows() < a.cols() {
        let t = svd_tall(&a.transpose())?;
        return Ok(Svd {
            u: t.v,
            sigma: t.sigma,
            v: t.u,
        });
    }
    svd_tall(a)
}

fn svd_tall(a: &Mat) -> Result<Svd> {
    let (m, n) = a.shape();
    // Work on columns: w[j] is column j of A·V.
    let mut w: Vec<Vec<f64>> = (0..n).map(|j| a.column(j)).collect();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let mut e = alloc::vec![0.0; n];
            e[j] = 1.0;
            e
        })
        .collect();

    let mut converged = n < 2;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha: f64 = w[p].iter().map(|x| x * x).sum();
                let beta: f64 = w[q].iter().map(|x| x * x).sum();
                let gamma: f64 = w[p].iter().zip(&w[q]).map(|(x, y)| x * y).sum();
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * libm::sqrt(alpha * beta) {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + libm::sqrt(1.0 + zeta * zeta));
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = c * t;
                rotate(&mut w, p, q, c, s);
                rotate(&mut v, p, q, c, s);
            }
        }
        converged = !rotated;
    }
    if !converged {
        return Err(Error::NoConvergence {
            routine: "jacobi svd",
            iterations: MAX_SWEEPS,
        });
    }

    let sigma: Vec<f64> = w.iter().map(|c| norm(c)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| sigma[j].total_cmp(&sigma[i]).then(i.cmp(&j)));

    let smax = order.first().map_or(0.0, |&i| sigma[i]);
    let negligible = smax * f64::EPSILON * (m.max(n) as f64);

    let mut u = Mat::zeros(m, n);
    let mut vm = Mat::zeros(n, n);
    let mut sorted_sigma = Vec::with_capacity(n);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut pending = Vec::new();
    for (k, &j) in order.iter().enumerate() {
        sorted_sigma.push(sigma[j]);
        vm.set_column(k, &v[j]);
        if sigma[j] > negligible && sigma[j] > 0.0 {
            let col: Vec<f64> = w[j].iter().map(|x| x / sigma[j]).collect();
            basis.push(col.clone());
            u.set_column(k, &col);
        } else {
            pending.push(k);
        }
    }
    // Columns for (numerically) zero singular values: complete the
    // orthonormal set with the standard basis vector that has the largest
    // component outside the current span. Some candidate keeps at least
    // sqrt((m - k) / m) of its norm, so this never degenerates.
    for k in pending {
        let best = (0..m)
            .map(|i| {
                let mut e = alloc::vec![0.0; m];
                e[i] = 1.0;
                for _ in 0..2 {
                    for b in &basis {
                        let dot: f64 = b.iter().zip(&e).map(|(x, y)| x * y).sum();
                        for (ei, bi) in e.iter_mut().zip(b) {
                            *ei -= dot * bi;
                        }
                    }
                }
                e
            })
            .fold(None::<Vec<f64>>, |best, e| match best {
                Some(b) if norm(&b) >= norm(&e) => Some(b),
                _ => Some(e),
            })
            .expect("m > 0 when columns are pending");
        let nrm = norm(&best);
        let col: Vec<f64> = best.iter().map(|x| x / nrm).collect();
        u.set_column(k, &col);
        basis.push(col);
    }
    Ok(Svd {
        u,
        sigma: sorted_sigma,
        v: vm,
    })
}

fn rotate(cols: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let (left, right) = cols.split_at_mut(q);
    let cp = &mut left[p];
    let cq = &mut right[0];
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let xp = *x;
        let xq = *y;
        *x = c * xp - s * xq;
        *y = s * xp + c * xq;
    }
}

fn norm(v: &[f64]) -> f64 {
    libm::sqrt(v.iter().map(|x| x * x).sum())
}

/// Smallest singular value of a non-empty matrix.
pub fn min_singular_value(a: &Mat) -> Result<f64> {
    if a.rows() == 0 || a.cols() == 0 {
        return Err(Error::InvalidShape {
            rows: a.rows(),
            cols: a.cols(),
            expected: 1,
            found: 0,
        });
    }
    let s = svd(a)?;
    Ok(s.sigma.last().copied().unwrap_or(0.0).max(0.0))
}

/// Spectral norm (largest singular value).
pub fn spectral_norm(a: &Mat) -> Result<f64> {
    if a.rows() == 0 || a.cols() == 0 {
        return Ok(0.0);
    }
    Ok(svd(a)?.sigma[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn reconstruct(s: &Svd) -> Mat {
        let d = Mat::from_diagonal(&s.sigma);
        &(&s.u * &d) * &s.v.transpose()
    }

    #[test]
    fn min_singular_value_examples() {
        assert_eq!(min_singular_value(&Mat::identity(2)).unwrap(), 1.0);
        let j = Mat::from_rows(&[[0.0, 1.0], [-1.0, 0.0]]).unwrap();
        assert_relative_eq!(min_singular_value(&j).unwrap(), 1.0, epsilon = 1e-15);
        let n = Mat::from_rows(&[[0.0, 3.0], [0.0, 0.0]]).unwrap();
        assert_eq!(min_singular_value(&n).unwrap(), 0.0);
        assert!(min_singular_value(&Mat::zeros(0, 0)).is_err());
    }

    #[test]
    fn reconstructs_and_orders() {
        let a = Mat::from_rows(&[
            [3.0, 1.0, 2.0],
            [0.5, -1.0, 4.0],
            [2.0, 2.0, 2.0],
            [1.0, 0.0, -1.0],
        ])
        .unwrap();
        let s = svd(&a).unwrap();
        assert!(s.sigma.windows(2).all(|w| w[0] >= w[1]));
        let r = reconstruct(&s);
        assert!((&r - &a).frobenius_norm() < 1e-13 * a.frobenius_norm());
        let utu = &s.u.transpose() * &s.u;
        assert!((&utu - &Mat::identity(3)).frobenius_norm() < 1e-13);
    }

    #[test]
    fn wide_input() {
        let a = Mat::from_rows(&[[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]]).unwrap();
        let s = svd(&a).unwrap();
        assert_eq!(s.sigma.len(), 2);
        let r = reconstruct(&s);
        assert!((&r - &a).frobenius_norm() < 1e-13 * a.frobenius_norm());
    }

    #[test]
    fn zero_matrix_has_orthogonal_factors() {
        let s = svd(&Mat::zeros(3, 3)).unwrap();
        assert_eq!(s.sigma, alloc::vec![0.0; 3]);
        assert_eq!(s.u, Mat::identity(3));
        assert_eq!(s.v, Mat::identity(3));
    }

    #[test]
    fn rank_one_completion_is_orthonormal() {
        let a = Mat::from_rows(&[[1.0, 1.0], [1.0, 1.0]]).unwrap();
        let s = svd(&a).unwrap();
        assert_relative_eq!(s.sigma[0], 2.0, epsilon = 1e-14);
        assert!(s.sigma[1].abs() < 1e-15);
        let utu = &s.u.transpose() * &s.u;
        assert!((&utu - &Mat::identity(2)).frobenius_norm() < 1e-14);
    }

    #[test]
    fn completion_when_every_candidate_is_short() {
        // Projector onto the complement of (1, …, 1): every standard basis
        // vector keeps only 1/sqrt(10) of its norm outside the range.
        let n = 10;
        let mut a = Mat::identity(n);
        for i in 0..n {
            for j in 0..n {
                a[(i, j)] -= 1.0 / n as f64;
            }
        }
        let s = svd(&a).unwrap();
        let utu = &s.u.transpose() * &s.u;
        assert!((&utu - &Mat::identity(n)).frobenius_norm() < 1e-13);
        assert!((&reconstruct(&s) - &a).frobenius_norm() < 1e-13);
    }
}
