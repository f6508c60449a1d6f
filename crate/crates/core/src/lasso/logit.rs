use super::{kkt_violation, soft_threshold, LassoFit, SolverConfig};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{dot, Real};

/// `log(1 + eᵗ)` without overflow.
#[inline]
pub(crate) fn softplus<T: Real>(t: T) -> T {
    t.max(T::zero()) + (-t.abs()).exp().ln_1p()
}

/// `softplus(b) − softplus(a)`; for close arguments this is
/// `ln1p(σ(a)·expm1(b − a))`, which keeps full relative accuracy.
#[inline]
fn softplus_change<T: Real>(a: T, b: T) -> T {
    let d = b - a;
    if d.abs() < T::one() {
        (sigmoid(a) * d.exp_m1()).ln_1p()
    } else {
        softplus(b) - softplus(a)
    }
}

#[inline]
pub(crate) fn sigmoid<T: Real>(t: T) -> T {
    if t >= T::zero() {
        T::one() / (T::one() + (-t).exp())
    } else {
        let e = t.exp();
        e / (T::one() + e)
    }
}

pub(crate) fn check_binary<T: Real>(y: &[T]) -> Result<()> {
    match y.iter().position(|&v| v != T::zero() && v != T::one()) {
        Some(row) => Err(Error::NonBinaryResponse { row, value: y[row].as_f64() }),
        None => Ok(()),
    }
}

/// Penalized logistic regression
/// `n⁻¹ Σ [log(1 + exp(xᵢᵀb)) − yᵢ xᵢᵀb] + λ‖b‖₁`.
#[derive(Debug, Clone)]
pub struct LogitProblem<'a, T> {
    x: &'a Matrix<T>,
    y: &'a [T],
    /// Lipschitz constant of the smooth gradient, `λ_max(XᵀX/n)/4`.
    lipschitz: T,
}

impl<'a, T: Real> LogitProblem<'a, T> {
    pub fn new(x: &'a Matrix<T>, y: &'a [T]) -> Result<Self> {
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
        check_binary(y)?;
        let n = T::from_usize_lossy(x.rows());
        let gram = x.gram();
        let lipschitz = largest_eigenvalue(&gram) / n / T::lit(4.0);
        Ok(Self { x, y, lipschitz })
    }

    fn n(&self) -> T {
        T::from_usize_lossy(self.x.rows())
    }

    pub fn smooth_loss(&self, beta: &[T]) -> T {
        let eta = self.x.mul_vec(beta);
        let s: T = eta
            .iter()
            .zip(self.y)
            .map(|(&t, &y)| softplus(t) - y * t)
            .sum();
        s / self.n()
    }

    /// `n⁻¹ Σ xᵢ (σ(xᵢᵀb) − yᵢ)`.
    pub fn gradient(&self, beta: &[T]) -> Vec<T> {
        let eta = self.x.mul_vec(beta);
        let score: Vec<T> = eta.iter().zip(self.y).map(|(&t, &y)| sigmoid(t) - y).collect();
        let n = self.n();
        self.x.tr_mul_vec(&score).into_iter().map(|g| g / n).collect()
    }

    pub fn objective(&self, beta: &[T], lambda: T) -> T {
        self.smooth_loss(beta) + lambda * beta.iter().map(|b| b.abs()).sum::<T>()
    }

    /// `objective(to) − objective(from)` summed term by term, so the sign
    /// stays reliable when the change is far below the objective's rounding.
    fn objective_change(&self, from: &[T], to: &[T], lambda: T) -> T {
        let (ef, et) = (self.x.mul_vec(from), self.x.mul_vec(to));
        let smooth: T = ef
            .iter()
            .zip(&et)
            .zip(self.y)
            .map(|((&a, &b), &y)| softplus_change(a, b) - y * (b - a))
            .sum();
        let l1: T = from.iter().zip(to).map(|(&a, &b)| b.abs() - a.abs()).sum();
        smooth / self.n() + lambda * l1
    }

    fn kkt_gap(&self, beta: &[T], lambda: T) -> T {
        let g = self.gradient(beta);
        beta.iter()
            .zip(&g)
            .fold(T::zero(), |a, (&b, &gj)| a.max(kkt_violation(b, gj, lambda)))
    }

    /// Monotone FISTA with function-value restart, starting from zero.
    pub fn solve(&self, lambda: T, cfg: &SolverConfig<T>) -> Result<LassoFit<T>> {
        cfg.validate()?;
        if !(lambda > T::zero()) || !lambda.is_finite() {
            return Err(Error::InvalidArgument(format!("lambda = {lambda} must be positive")));
        }
        let p = self.x.cols();
        let mut beta = vec![T::zero(); p];
        let mut f_beta = self.objective(&beta, lambda);
        let mut trace = vec![f_beta];
        let mut gap = self.kkt_gap(&beta, lambda);
        if self.lipschitz <= T::zero() {
            // Every column is zero: the origin is optimal.
            return Ok(LassoFit::build(beta, lambda, 0, gap, trace));
        }
        let mut step = T::one() / self.lipschitz;
        let mut from_accepted = true;
        let mut extrap = beta.clone();
        let mut t = T::one();
        let mut iter = 0;
        while gap > cfg.tol {
            if iter == cfg.max_iter {
                return Err(Error::NotConverged {
                    iterations: iter,
                    kkt_gap: gap.as_f64(),
                });
            }
            let g = self.gradient(&extrap);
            let z: Vec<T> = extrap
                .iter()
                .zip(&g)
                .map(|(&e, &gj)| soft_threshold(e - step * gj, step * lambda))
                .collect();
            let t_next = (T::one() + (T::one() + T::lit(4.0) * t * t).sqrt()) / T::lit(2.0);
            if self.objective_change(&beta, &z, lambda) <= T::zero() {
                let prev = std::mem::replace(&mut beta, z);
                f_beta = self.objective(&beta, lambda);
                let m = (t - T::one()) / t_next;
                extrap = beta
                    .iter()
                    .zip(&prev)
                    .map(|(&b, &q)| b + m * (b - q))
                    .collect();
                t = t_next;
                from_accepted = false;
            } else {
                if from_accepted {
                    // A plain proximal step failed to descend: the
                    // curvature bound was too optimistic.
                    step /= T::lit(2.0);
                }
                // Restart momentum from the last accepted point.
                extrap = beta.clone();
                t = T::one();
                from_accepted = true;
            }
            iter += 1;
            trace.push(f_beta);
            gap = self.kkt_gap(&beta, lambda);
        }
        Ok(LassoFit::build(beta, lambda, iter, gap, trace))
    }
}

/// Power iteration for the top eigenvalue of a symmetric PSD matrix,
/// inflated slightly so the step size stays safe.
fn largest_eigenvalue<T: Real>(a: &Matrix<T>) -> T {
    let p = a.rows();
    if p == 0 {
        return T::zero();
    }
    let trace: T = (0..p).map(|j| a.get(j, j)).sum();
    if trace <= T::zero() {
        return T::zero();
    }
    let mut v = vec![T::one() / T::from_usize_lossy(p).sqrt(); p];
    let mut est = T::zero();
    for _ in 0..200 {
        let w = a.mul_vec(&v);
        let norm = dot(&w, &w).sqrt();
        if norm <= T::zero() {
            break;
        }
        let next = norm;
        v = w.into_iter().map(|x| x / norm).collect();
        if (next - est).abs() <= T::lit(1e-12) * next {
            est = next;
            break;
        }
        est = next;
    }
    // The Rayleigh quotient can only undershoot; never exceed the trace bound.
    (est * T::lit(1.01)).min(trace).max(est)
}

/// Smallest λ with a zero solution: `max_j |n⁻¹ Σ xᵢⱼ (yᵢ − 1/2)|`.
pub fn logit_zero_threshold<T: Real>(x: &Matrix<T>, y: &[T]) -> T {
    let half = T::lit(0.5);
    let centered: Vec<T> = y.iter().map(|&v| v - half).collect();
    let n = T::from_usize_lossy(y.len());
    x.tr_mul_vec(&centered)
        .into_iter()
        .fold(T::zero(), |a, c| a.max((c / n).abs()))
}

pub fn logit_fit_xy<T: Real>(
    x: &Matrix<T>,
    y: &[T],
    lambda: T,
    cfg: &SolverConfig<T>,
) -> Result<LassoFit<T>> {
    LogitProblem::new(x, y)?.solve(lambda, cfg)
}

pub fn logit_penalized_fit<T: Real>(
    d: &Dataset<T>,
    lambda: T,
    cfg: &SolverConfig<T>,
) -> Result<LassoFit<T>> {
    logit_fit_xy(d.x(), d.y(), lambda, cfg)
}
