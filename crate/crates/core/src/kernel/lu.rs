//! LU factorization with partial pivoting.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::mat::Mat;

/// `PA = LU` with unit lower `L` and upper `U` packed into one matrix.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: Mat,
    perm: Vec<usize>,
    sign: f64,
    singular: bool,
}

impl Lu {
    pub fn new(a: &Mat) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::NotSquare {
                rows: a.rows(),
                cols: a.cols(),
            });
        }
        let n = a.rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        let mut singular = false;
        for k in 0..n {
            let (p, pivot) = (k..n)
                .map(|i| (i, lu[(i, k)].abs()))
                .fold(
                    (k, -1.0),
                    |best, cur| if cur.1 > best.1 { cur } else { best },
                );
            if pivot == 0.0 {
                singular = true;
                continue;
            }
            if p != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let d = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / d;
                lu[(i, k)] = f;
                if f != 0.0 {
                    for j in k + 1..n {
                        lu[(i, j)] -= f * lu[(k, j)];
                    }
                }
            }
        }
        Ok(Self {
            lu,
            perm,
            sign,
            singular,
        })
    }

    pub fn is_singular(&self) -> bool {
        self.singular
    }

    pub fn det(&self) -> f64 {
        if self.singular {
            return 0.0;
        }
        (0..self.lu.rows()).fold(self.sign, |acc, i| acc * self.lu[(i, i)])
    }

    /// Solves `A X = B` for a matrix right-hand side.
    pub fn solve(&self, b: &Mat) -> Result<Mat> {
        let n = self.lu.rows();
        if b.rows() != n {
            return Err(Error::DimensionMismatch {
                op: "lu solve",
                left: self.lu.shape(),
                right: b.shape(),
            });
        }
        if self.singular {
            return Err(Error::Singular {
                what: "matrix",
                sigma_min: 0.0,
            });
        }
        let m = b.cols();
        let mut x = Mat::zeros(n, m);
        for (i, &p) in self.perm.iter().enumerate() {
            for j in 0..m {
                x[(i, j)] = b[(p, j)];
            }
        }
        for j in 0..m {
            for i in 0..n {
                let mut s = x[(i, j)];
                for k in 0..i {
                    s -= self.lu[(i, k)] * x[(k, j)];
                }
                x[(i, j)] = s;
            }
            for i in (0..n).rev() {
                let mut s = x[(i, j)];
                for k in i + 1..n {
                    s -= self.lu[(i, k)] * x[(k, j)];
                }
                x[(i, j)] = s / self.lu[(i, i)];
            }
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Result<Mat> {
        self.solve(&Mat::identity(self.lu.rows()))
    }
}

/// Determinant via pivoted LU.
pub fn det(a: &Mat) -> Result<f64> {
    Ok(Lu::new(a)?.det())
}

pub fn inverse(a: &Mat) -> Result<Mat> {
    Lu::new(a)?.inverse()
}

/// Solves `A X = B`.
pub fn solve(a: &Mat, b: &Mat) -> Result<Mat> {
    Lu::new(a)?.solve(b)
}

/// Solves `X A = B`, i.e. returns `B A⁻¹`.
pub fn solve_right(a: &Mat, b: &Mat) -> Result<Mat> {
    Ok(solve(&a.transpose(), &b.transpose())?.transpose())
}
