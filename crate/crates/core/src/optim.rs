//! Minimization over the symplectic group through the nine-block
//! parametrization.
//!
//! Every iterate is the product of nine unit triangular factors, so it is
//! symplectic up to roundoff no matter what the descent loop does.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::param::{sp_from_params, ParamVector, SP_BLOCKS};
use crate::sample::{normal_vec, rng_from_seed};
use crate::symplectic::{half_dim, symplecticity_check, DEFAULT_SYMPLECTIC_TOL};

/// A scalar function of a `2d x 2d` matrix.
pub trait Objective {
    fn half_dim(&self) -> usize;
    fn evaluate(&self, x: &Mat) -> f64;
}

/// `f(X) = ‖X − target‖_F²`.
#[derive(Debug, Clone, PartialEq)]
pub struct NearestSymplectic {
    target: Mat,
    d: usize,
}

impl NearestSymplectic {
    pub fn new(target: Mat) -> Result<Self> {
        let d = half_dim(&target)?;
        Ok(Self { target, d })
    }

    pub fn target(&self) -> &Mat {
        &self.target
    }
}

impl Objective for NearestSymplectic {
    fn half_dim(&self) -> usize {
        self.d
    }

    fn evaluate(&self, x: &Mat) -> f64 {
        x.as_slice()
            .iter()
            .zip(self.target.as_slice())
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }
}

pub fn nearest_symplectic_objective(target: &Mat) -> Result<NearestSymplectic> {
    NearestSymplectic::new(target.clone())
}

/// Wraps a closure as an [`Objective`].
pub struct FnObjective<F> {
    d: usize,
    f: F,
}

impl<F: Fn(&Mat) -> f64> FnObjective<F> {
    pub fn new(d: usize, f: F) -> Self {
        Self { d, f }
    }
}

impl<F: Fn(&Mat) -> f64> Objective for FnObjective<F> {
    fn half_dim(&self) -> usize {
        self.d
    }

    fn evaluate(&self, x: &Mat) -> f64 {
        (self.f)(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    pub max_iters: usize,
    /// Largest trial step; each iteration starts from twice the previous
    /// accepted step, capped here.
    pub step_init: f64,
    /// Backtracking factor in `(0, 1)`.
    pub step_shrink: f64,
    /// Half-width of the central differences.
    pub grad_epsilon: f64,
    /// Stop once the gradient ∞-norm drops below this.
    pub tol_grad: f64,
    /// Seeds the start vectors of the curvature search used to leave
    /// saddle points.
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            max_iters: 20_000,
            step_init: 1.0,
            step_shrink: 0.5,
            grad_epsilon: 1e-5,
            tol_grad: 1e-6,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    fn validate(&self) -> Result<()> {
        let positive = [self.step_init, self.grad_epsilon, self.tol_grad];
        if self.max_iters == 0 || positive.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
            return Err(Error::InvalidParameter(
                "optimizer settings must be positive",
            ));
        }
        if !(self.step_shrink > 0.0 && self.step_shrink < 1.0) {
            return Err(Error::InvalidParameter("step_shrink must lie in (0, 1)"));
        }
        Ok(())
    }
}

/// One accepted iterate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEntry {
    pub objective: f64,
    /// ∞-norm of the finite-difference gradient.
    pub grad_norm: f64,
    /// Normalized symplecticity residual of the iterate.
    pub residual: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct OptimizerTrace {
    pub iterates: Vec<TraceEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Termination {
    /// Gradient below `tol_grad` and no descent along negative curvature.
    Converged,
    MaxIterations,
    /// Backtracking shrank the step to nothing without a decrease.
    StepUnderflow,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeResult {
    pub params: ParamVector,
    pub trace: OptimizerTrace,
    pub termination: Termination,
}

impl OptimizeResult {
    pub fn converged(&self) -> bool {
        self.termination == Termination::Converged
    }

    pub fn final_objective(&self) -> f64 {
        self.trace.iterates.last().map_or(f64::NAN, |e| e.objective)
    }
}

/// The point of SP described by nine parameter blocks.
pub fn params_to_matrix(p: &ParamVector) -> Result<Mat> {
    Ok(sp_from_params(p)?.product())
}

fn value<O: Objective + ?Sized>(obj: &O, p: &ParamVector) -> Result<f64> {
    Ok(obj.evaluate(&params_to_matrix(p)?))
}

/// Central-difference gradient of `p ↦ obj(product of the nine factors)`
/// over every packed coordinate.
pub fn fd_gradient<O: Objective + ?Sized>(obj: &O, p: &ParamVector, eps: f64) -> Result<Vec<f64>> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::InvalidParameter(
            "finite-difference step must be positive",
        ));
    }
    let x = p.flatten();
    let mut grad = Vec::with_capacity(x.len());
    let mut probe = x.clone();
    for i in 0..x.len() {
        probe[i] = x[i] + eps;
        let fp = value(obj, &p.with_flat(&probe)?)?;
        probe[i] = x[i] - eps;
        let fm = value(obj, &p.with_flat(&probe)?)?;
        probe[i] = x[i];
        if !fp.is_finite() || !fm.is_finite() {
            return Err(Error::NonFiniteObjective);
        }
        grad.push((fp - fm) / (2.0 * eps));
    }
    Ok(grad)
}

const POWER_ITERS: usize = 30;
const HESSIAN_STEP: f64 = 1e-4;
const ESCAPE_STEPS: [f64; 4] = [0.5, 0.1, 0.02, 0.004];
const MAX_ESCAPES: usize = 8;
const MIN_STEP: f64 = 1e-14;

/// Gradient descent with backtracking on the nine-block parameters.
///
/// A trial step is accepted on any strict decrease; otherwise the step is
/// multiplied by `step_shrink`. When the gradient is below `tol_grad`, a
/// seeded curvature search checks whether the point is a saddle and, if a
/// step along negative curvature lowers the objective, descent continues
/// from there.
pub fn minimize<O: Objective + ?Sized>(
    obj: &O,
    p0: &ParamVector,
    cfg: &OptimizerConfig,
) -> Result<OptimizeResult> {
    cfg.validate()?;
    if p0.d != obj.half_dim() || p0.blocks.len() != SP_BLOCKS {
        return Err(Error::InvalidParameter(
            "initial parameters do not match the objective",
        ));
    }
    let mut p = p0.clone();
    let mut f = value(obj, &p)?;
    if !f.is_finite() {
        return Err(Error::NonFiniteObjective);
    }
    let mut rng = rng_from_seed(cfg.seed);
    let mut trace = OptimizerTrace::default();
    let mut step = cfg.step_init;
    let mut escapes = 0;

    let record = |trace: &mut OptimizerTrace, p: &ParamVector, f: f64, g: &[f64]| -> Result<()> {
        let x = params_to_matrix(p)?;
        let residual = symplecticity_check(&x, DEFAULT_SYMPLECTIC_TOL)?.relative_residual;
        trace.iterates.push(TraceEntry {
            objective: f,
            grad_norm: g.iter().fold(0.0, |m, v| m.max(v.abs())),
            residual,
        });
        Ok(())
    };

    let mut grad = fd_gradient(obj, &p, cfg.grad_epsilon)?;
    record(&mut trace, &p, f, &grad)?;

    for _ in 0..cfg.max_iters {
        let gnorm = trace.iterates.last().map_or(0.0, |e| e.grad_norm);
        if gnorm < cfg.tol_grad {
            match (escapes < MAX_ESCAPES)
                .then(|| escape(obj, &p, f, &grad, cfg, &mut rng))
                .transpose()?
            {
                Some(Some((q, fq))) => {
                    escapes += 1;
                    p = q;
                    f = fq;
                    step = cfg.step_init;
                    grad = fd_gradient(obj, &p, cfg.grad_epsilon)?;
                    record(&mut trace, &p, f, &grad)?;
                    continue;
                }
                _ => {
                    return Ok(OptimizeResult {
                        params: p,
                        trace,
                        termination: Termination::Converged,
                    })
                }
            }
        }

        let x = p.flatten();
        let mut trial_step = (step / cfg.step_shrink).min(cfg.step_init);
        let accepted = loop {
            if trial_step < MIN_STEP {
                break None;
            }
            let moved: Vec<f64> = x
                .iter()
                .zip(&grad)
                .map(|(xi, gi)| xi - trial_step * gi)
                .collect();
            let q = p.with_flat(&moved)?;
            let fq = value(obj, &q)?;
            if fq.is_finite() && fq < f {
                break Some((q, fq));
            }
            trial_step *= cfg.step_shrink;
        };
        match accepted {
            Some((q, fq)) => {
                p = q;
                f = fq;
                step = trial_step;
                grad = fd_gradient(obj, &p, cfg.grad_epsilon)?;
                record(&mut trace, &p, f, &grad)?;
            }
            None => {
                return Ok(OptimizeResult {
                    params: p,
                    trace,
                    termination: Termination::StepUnderflow,
                })
            }
        }
    }
    Ok(OptimizeResult {
        params: p,
        trace,
        termination: Termination::MaxIterations,
    })
}

fn norm2(v: &[f64]) -> f64 {
    libm::sqrt(v.iter().map(|x| x * x).sum())
}

fn normalized(v: Vec<f64>) -> Option<Vec<f64>> {
    let n = norm2(&v);
    (n > 0.0 && n.is_finite()).then(|| v.into_iter().map(|x| x / n).collect())
}

/// Looks for a descent step at a stationary point `p`.
///
/// Hessian-vector products come from differencing the finite-difference
/// gradient. Power iteration first bounds the spectrum by `ρ`, then runs on
/// `ρI − H` to approximate the most negative curvature direction, which is
/// tried with a few step lengths and both signs.
fn escape<O: Objective + ?Sized>(
    obj: &O,
    p: &ParamVector,
    f: f64,
    g0: &[f64],
    cfg: &OptimizerConfig,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Result<Option<(ParamVector, f64)>> {
    let x = p.flatten();
    let hv = |v: &[f64]| -> Result<Vec<f64>> {
        let moved: Vec<f64> = x.iter().zip(v).map(|(a, b)| a + HESSIAN_STEP * b).collect();
        let g = fd_gradient(obj, &p.with_flat(&moved)?, cfg.grad_epsilon)?;
        Ok(g.iter()
            .zip(g0)
            .map(|(a, b)| (a - b) / HESSIAN_STEP)
            .collect())
    };
    let Some(mut v) = normalized(normal_vec(rng, x.len(), 1.0)) else {
        return Ok(None);
    };
    let mut rho = 0.0;
    for _ in 0..POWER_ITERS {
        let w = hv(&v)?;
        rho = norm2(&w);
        match normalized(w) {
            Some(w) => v = w,
            None => return Ok(None),
        }
    }
    let Some(mut v) = normalized(normal_vec(rng, x.len(), 1.0)) else {
        return Ok(None);
    };
    for _ in 0..POWER_ITERS {
        let w = hv(&v)?;
        let shifted: Vec<f64> = v.iter().zip(&w).map(|(a, b)| rho * a - b).collect();
        match normalized(shifted) {
            Some(s) => v = s,
            None => return Ok(None),
        }
    }

    let bar = f - 1e-12 * (1.0 + f.abs());
    let mut best: Option<(ParamVector, f64)> = None;
    for r in ESCAPE_STEPS {
        for sign in [1.0, -1.0] {
            let moved: Vec<f64> = x.iter().zip(&v).map(|(a, b)| a + sign * r * b).collect();
            let q = p.with_flat(&moved)?;
            let fq = value(obj, &q)?;
            if fq.is_finite() && fq < best.as_ref().map_or(bar, |b| b.1) {
                best = Some((q, fq));
            }
        }
    }
    Ok(best)
}
