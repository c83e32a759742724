//! Householder QR with column pivoting, used for orthonormal null-space
//! bases.

use alloc::vec::Vec;

use crate::mat::Mat;

/// `A Π = Q R` with `Q` square orthogonal and `|r_00| >= |r_11| >= ...`.
#[derive(Debug, Clone)]
pub struct PivotedQr {
    pub q: Mat,
    pub r: Mat,
    pub perm: Vec<usize>,
}

impl PivotedQr {
    pub fn new(a: &Mat) -> Self {
        let (m, n) = a.shape();
        let mut r = a.clone();
        let mut q = Mat::identity(m);
        let mut perm: Vec<usize> = (0..n).collect();
        let mut col_norms: Vec<f64> = (0..n).map(|j| sq_norm_from(&r, j, 0)).collect();
        for k in 0..m.min(n) {
            // Pivot: remaining column with the largest trailing norm.
            let (p, _) = (k..n).fold((k, -1.0), |best, j| {
                if col_norms[j] > best.1 {
                    (j, col_norms[j])
                } else {
                    best
                }
            });
            if p != k {
                for i in 0..m {
                    let t = r[(i, k)];
                    r[(i, k)] = r[(i, p)];
                    r[(i, p)] = t;
                }
                perm.swap(k, p);
                col_norms.swap(k, p);
            }
            let alpha = libm::sqrt(sq_norm_from(&r, k, k));
            if alpha == 0.0 {
                break;
            }
            let alpha = if r[(k, k)] > 0.0 { -alpha } else { alpha };
            let mut v: Vec<f64> = (k..m).map(|i| r[(i, k)]).collect();
            v[0] -= alpha;
            let vnorm2: f64 = v.iter().map(|x| x * x).sum();
            if vnorm2 == 0.0 {
                continue;
            }
            // R <- (I - 2vvᵀ/vᵀv) R
            for j in k..n {
                let dot: f64 = v.iter().enumerate().map(|(t, vi)| vi * r[(k + t, j)]).sum();
                let f = 2.0 * dot / vnorm2;
                for (t, vi) in v.iter().enumerate() {
                    r[(k + t, j)] -= f * vi;
                }
            }
            // Q <- Q (I - 2vvᵀ/vᵀv)
            for i in 0..m {
                let dot: f64 = v.iter().enumerate().map(|(t, vi)| q[(i, k + t)] * vi).sum();
                let f = 2.0 * dot / vnorm2;
                for (t, vi) in v.iter().enumerate() {
                    q[(i, k + t)] -= f * vi;
                }
            }
            for i in k + 1..m {
                r[(i, k)] = 0.0;
            }
            // Recompute trailing norms rather than downdating: the matrices
            // here are small and this avoids cancellation.
            for (j, norm) in col_norms.iter_mut().enumerate().skip(k + 1) {
                *norm = sq_norm_from(&r, j, k + 1);
            }
        }
        Self { q, r, perm }
    }

    /// Numerical rank: number of diagonal entries of `R` above
    /// `tol · |r_00|`.
    pub fn rank(&self, tol: f64) -> usize {
        let k = self.r.rows().min(self.r.cols());
        if k == 0 {
            return 0;
        }
        let r00 = self.r[(0, 0)].abs();
        if r00 == 0.0 {
            return 0;
        }
        (0..k)
            .take_while(|&i| self.r[(i, i)].abs() > tol * r00)
            .count()
    }
}

fn sq_norm_from(a: &Mat, col: usize, row0: usize) -> f64 {
    (row0..a.rows()).map(|i| a[(i, col)] * a[(i, col)]).sum()
}

/// Orthonormal basis (as columns) of the null space of `a`, found from a
/// pivoted QR of `aᵀ`.
pub fn null_space(a: &Mat, tol: f64) -> Mat {
    let n = a.cols();
    if a.rows() == 0 {
        return Mat::identity(n);
    }
    let qr = PivotedQr::new(&a.transpose());
    let rank = qr.rank(tol);
    qr.q.block(0, rank, n, n - rank)
}
