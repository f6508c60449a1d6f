//! ℓ1-penalized least squares and ℓ1-penalized logistic regression.
//!
//! The least-squares objective is `n⁻¹‖y − Xb‖² + λ‖b‖₁`, with no factor
//! of one half; every penalty rule in [`crate::select_lambda`] is written
//! against this scaling.

pub(crate) mod logit;

pub use logit::{logit_fit_xy, logit_penalized_fit, logit_zero_threshold, LogitProblem};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{dot, Real};

#[derive(Debug, Clone, Copy)]
pub struct SolverConfig<T> {
    /// Largest admissible KKT violation.
    pub tol: T,
    pub max_iter: usize,
}

impl<T: Real> Default for SolverConfig<T> {
    /// `tol = 1e-8`, raised to `100·ε` for scalars too coarse to reach it.
    fn default() -> Self {
        Self {
            tol: T::lit(1e-8).max(T::epsilon() * T::lit(100.0)),
            max_iter: 10_000,
        }
    }
}

impl<T: Real> SolverConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > T::zero()) || self.max_iter == 0 {
            return Err(Error::InvalidArgument(
                "solver needs tol > 0 and max_iter >= 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct LassoFit<T> {
    pub beta: Vec<T>,
    pub lambda: T,
    /// Indices of nonzero coefficients, ascending.
    pub active_set: Vec<usize>,
    /// Completed sweeps (coordinate descent) or gradient steps (logit).
    pub iterations: usize,
    pub kkt_gap: T,
    pub objective: T,
    /// Objective after each iteration, starting with the value at zero.
    pub objective_trace: Vec<T>,
}

impl<T: Real> LassoFit<T> {
    fn build(beta: Vec<T>, lambda: T, iterations: usize, kkt_gap: T, trace: Vec<T>) -> Self {
        let active_set = beta
            .iter()
            .enumerate()
            .filter(|(_, &b)| b != T::zero())
            .map(|(j, _)| j)
            .collect();
        Self {
            beta,
            lambda,
            active_set,
            iterations,
            kkt_gap,
            objective: *trace.last().expect("trace holds the starting value"),
            objective_trace: trace,
        }
    }

    /// `‖β̂‖₀`.
    pub fn support_size(&self) -> usize {
        self.active_set.len()
    }

    /// `Xβ̂`.
    pub fn predict(&self, x: &Matrix<T>) -> Vec<T> {
        x.mul_vec(&self.beta)
    }
}

#[inline]
pub(crate) fn soft_threshold<T: Real>(z: T, t: T) -> T {
    if z > t {
        z - t
    } else if z < -t {
        z + t
    } else {
        T::zero()
    }
}

/// KKT violation of coordinate `j` given the smooth-part gradient `g`.
#[inline]
pub(crate) fn kkt_violation<T: Real>(b: T, g: T, lambda: T) -> T {
    if b == T::zero() {
        (g.abs() - lambda).max(T::zero())
    } else {
        (g + lambda * b.signum()).abs()
    }
}

/// Sufficient statistics `G = XᵀX/n`, `c = Xᵀy/n`, `n⁻¹‖y‖²` of a Lasso
/// problem, reusable across penalty values.
#[derive(Debug, Clone)]
pub struct LassoProblem<T> {
    gram: Matrix<T>,
    xty: Vec<T>,
    yy: T,
}

impl<T: Real> LassoProblem<T> {
    pub fn new(x: &Matrix<T>, y: &[T]) -> Result<Self> {
        if x.rows() != y.len() {
            return Err(Error::LengthMismatch {
                what: "response",
                got: y.len(),
                expected: x.rows(),
            });
        }
        if x.rows() == 0 {
            return Err(Error::EmptyTable);
        }
        let n = T::from_usize_lossy(x.rows());
        let mut gram = x.gram();
        for j in 0..gram.cols() {
            for v in gram.row_mut(j) {
                *v /= n;
            }
        }
        let xty = x.tr_mul_vec(y).into_iter().map(|v| v / n).collect();
        let yy = crate::scalar::mean_square(y);
        Ok(Self { gram, xty, yy })
    }

    pub fn p(&self) -> usize {
        self.xty.len()
    }

    /// Smallest λ with `β̂(λ) = 0`: `2 max_j |n⁻¹ Σ xᵢⱼ yᵢ|`.
    pub fn zero_threshold(&self) -> T {
        self.xty
            .iter()
            .fold(T::zero(), |a, &c| a.max(c.abs()))
            * T::lit(2.0)
    }

    pub fn objective(&self, beta: &[T], lambda: T) -> T {
        let gb = self.gram.mul_vec(beta);
        let l1: T = beta.iter().map(|b| b.abs()).sum();
        self.yy - T::lit(2.0) * dot(&self.xty, beta) + dot(beta, &gb) + lambda * l1
    }

    fn gap(&self, beta: &[T], resid: &mut [T], lambda: T) -> T {
        let gb = self.gram.mul_vec(beta);
        let mut worst = T::zero();
        for j in 0..beta.len() {
            resid[j] = self.xty[j] - gb[j];
            let g = T::lit(-2.0) * resid[j];
            worst = worst.max(kkt_violation(beta[j], g, lambda));
        }
        worst
    }

    /// Cyclic coordinate descent from zero with covariance updates.
    pub fn solve(&self, lambda: T, cfg: &SolverConfig<T>) -> Result<LassoFit<T>> {
        cfg.validate()?;
        if !(lambda > T::zero()) || !lambda.is_finite() {
            return Err(Error::InvalidArgument(format!("lambda = {lambda} must be positive")));
        }
        let p = self.p();
        let half = lambda / T::lit(2.0);
        let mut beta = vec![T::zero(); p];
        // r = c − Gβ, kept in sync with β.
        let mut r = self.xty.clone();
        let mut trace = vec![self.yy];
        let mut gap = self.gap(&beta, &mut r, lambda);
        let mut sweeps = 0;
        while gap > cfg.tol {
            if sweeps == cfg.max_iter {
                return Err(Error::NotConverged {
                    iterations: sweeps,
                    kkt_gap: gap.as_f64(),
                });
            }
            for j in 0..p {
                let gjj = self.gram.get(j, j);
                if gjj <= T::zero() {
                    continue;
                }
                let old = beta[j];
                let new = soft_threshold(r[j] + gjj * old, half) / gjj;
                if new != old {
                    let delta = new - old;
                    for (rk, &g) in r.iter_mut().zip(self.gram.row(j)) {
                        *rk -= g * delta;
                    }
                    beta[j] = new;
                }
            }
            sweeps += 1;
            trace.push(self.objective(&beta, lambda));
            gap = self.gap(&beta, &mut r, lambda);
        }
        Ok(LassoFit::build(beta, lambda, sweeps, gap, trace))
    }
}

pub fn lasso_fit_xy<T: Real>(
    x: &Matrix<T>,
    y: &[T],
    lambda: T,
    cfg: &SolverConfig<T>,
) -> Result<LassoFit<T>> {
    LassoProblem::new(x, y)?.solve(lambda, cfg)
}

pub fn lasso_fit<T: Real>(d: &Dataset<T>, lambda: T, cfg: &SolverConfig<T>) -> Result<LassoFit<T>> {
    lasso_fit_xy(d.x(), d.y(), lambda, cfg)
}
