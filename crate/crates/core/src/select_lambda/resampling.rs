use rand::Rng;
use rayon::prelude::*;

use super::grid::{default_grid, fold_data};
use super::{plugin_lambda, positive, LambdaResult, LambdaRule, PenaltyConfig};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::lasso::logit::{check_binary, sigmoid, softplus};
use crate::lasso::{LassoFit, LassoProblem, LogitProblem};
use crate::linalg::Matrix;
use crate::random::{derive_seed, empirical_quantile, fill_gaussian, stream};
use crate::scalar::{dot, Real};
use crate::select_series::fold_partition;

pub const MIN_BOOTSTRAP_DRAWS: usize = 500;
pub const MIN_PIVOTAL_DRAWS: usize = 1000;

const BOOTSTRAP_STREAM: u64 = 0xB007;
const PIVOTAL_STREAM: u64 = 0x9017;
const GLM_STREAM: u64 = 0x611;

/// Empirical `level` quantile of `max_j |n^{-1/2} Σᵢ wᵢ xᵢⱼ sᵢ|` over `draws`
/// standard Gaussian multiplier vectors `w`. Draw `b` uses stream `[b]`
/// under `seed`.
pub fn multiplier_quantile<T: Real>(
    x: &Matrix<T>,
    scores: &[T],
    level: f64,
    draws: usize,
    seed: u64,
) -> Result<T> {
    let (n, p) = (x.rows(), x.cols());
    if scores.len() != n {
        return Err(Error::LengthMismatch {
            what: "scores",
            got: scores.len(),
            expected: n,
        });
    }
    if draws == 0 {
        return Err(Error::InvalidArgument("need at least one draw".into()));
    }
    let root = T::from_usize_lossy(n).sqrt();
    let z: Vec<T> = (0..n)
        .flat_map(|i| {
            let s = scores[i] / root;
            x.row(i).iter().map(move |&v| v * s)
        })
        .collect();
    let mut stats: Vec<T> = (0..draws as u64)
        .into_par_iter()
        .map(|b| {
            let mut rng = stream(seed, &[b]);
            let mut w = vec![T::zero(); n];
            fill_gaussian(&mut rng, &mut w);
            let mut acc = vec![T::zero(); p];
            for (i, &wi) in w.iter().enumerate() {
                for (a, &zij) in acc.iter_mut().zip(&z[i * p..(i + 1) * p]) {
                    *a += wi * zij;
                }
            }
            acc.into_iter().fold(T::zero(), |m, a| m.max(a.abs()))
        })
        .collect();
    Ok(empirical_quantile(&mut stats, level))
}

fn check_draws(draws: usize, min: usize) -> Result<()> {
    if draws < min {
        return Err(Error::InvalidArgument(format!(
            "at least {min} draws are required, got {draws}"
        )));
    }
    Ok(())
}

/// BCCH steps one and two, then `λ = (2c/√n) q̂_{1−α}` from the multiplier
/// bootstrap on the pilot residuals.
pub fn bootstrap_lambda<T: Real>(
    d: &Dataset<T>,
    pc: &PenaltyConfig<T>,
) -> Result<(LambdaResult<T>, LassoFit<T>)> {
    check_draws(pc.draws, MIN_BOOTSTRAP_DRAWS)?;
    let (x, y) = (d.x(), d.y());
    let (n, p) = (d.n(), d.p());
    let alpha = pc.resolve_alpha(n, p)?;
    let lambda0 = positive(plugin_lambda(x, y, pc.c, alpha), "preliminary moments")?;
    let problem = LassoProblem::new(x, y)?;
    let pilot = problem.solve(lambda0, &pc.solver)?;
    let fitted = pilot.predict(x);
    let resid: Vec<T> = y.iter().zip(&fitted).map(|(&a, &b)| a - b).collect();
    let seed = derive_seed(pc.seed, &[BOOTSTRAP_STREAM]);
    let q = multiplier_quantile(x, &resid, 1.0 - alpha, pc.draws, seed)?;
    let scale = T::lit(2.0 * pc.c / (n as f64).sqrt());
    let lambda = positive(scale * q, "bootstrap quantile")?;
    let fit = problem.solve(lambda, &pc.solver)?;
    let mut r = LambdaResult::new(LambdaRule::Bootstrap, lambda, "lasso at preliminary lambda");
    r.alpha = Some(alpha);
    r.c = Some(pc.c);
    r.preliminary_lambda = Some(lambda0);
    r.quantile_draws = Some(pc.draws);
    r.push_meta("bootstrap_quantile", q.as_f64());
    r.push_meta("pilot_support", pilot.support_size() as f64);
    Ok((r, fit))
}

/// Pivotal rule for ℓ1-penalized quantile regression at level `u`:
/// `λ = c q_{1−α}/√n`, where `q` is simulated from uniform draws
/// conditional on `X`. The response never enters.
pub fn quantile_pivotal_lambda<T: Real>(
    d: &Dataset<T>,
    u: f64,
    pc: &PenaltyConfig<T>,
) -> Result<LambdaResult<T>> {
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::InvalidArgument(format!("quantile level {u} must lie in (0, 1)")));
    }
    check_draws(pc.draws, MIN_PIVOTAL_DRAWS)?;
    let x = d.x();
    let (n, p) = (d.n(), d.p());
    let alpha = pc.resolve_alpha(n, p)?;
    if x.as_slice().iter().all(|&v| v == T::zero()) {
        return Err(Error::DegenerateLambda("every covariate column is zero".into()));
    }
    let sd = (u * (1.0 - u)).sqrt();
    let (above, below) = (T::lit(u / sd), T::lit((u - 1.0) / sd));
    let nt = T::from_usize_lossy(n);
    let root = nt.sqrt();
    let seed = derive_seed(pc.seed, &[PIVOTAL_STREAM]);
    let mut stats: Vec<T> = (0..pc.draws as u64)
        .into_par_iter()
        .map(|s| {
            let mut rng = stream(seed, &[s]);
            let mut acc = vec![T::zero(); p];
            for i in 0..n {
                let ui: f64 = rng.random();
                let t = if ui <= u { below } else { above };
                for (a, &xij) in acc.iter_mut().zip(x.row(i)) {
                    *a += xij * t;
                }
            }
            root * acc.into_iter().fold(T::zero(), |m, a| m.max((a / nt).abs()))
        })
        .collect();
    let q = empirical_quantile(&mut stats, 1.0 - alpha);
    let lambda = positive(T::lit(pc.c) * q / root, "pivotal quantile")?;
    let mut r = LambdaResult::new(LambdaRule::QuantilePivotal, lambda, "none (pivotal)");
    r.alpha = Some(alpha);
    r.c = Some(pc.c);
    r.quantile_draws = Some(pc.draws);
    r.push_meta("u", u);
    r.push_meta("simulated_quantile", q.as_f64());
    Ok(r)
}

#[derive(Debug, Clone)]
pub struct GlmOutcome<T> {
    pub result: LambdaResult<T>,
    /// Penalized logit fit at the selected λ.
    pub fit: LassoFit<T>,
    pub cv_lambda: T,
    /// `σ(xᵢᵀβ̂_{-v(i)}) − yᵢ`, each row scored by the fold fit that left it out.
    pub scores: Vec<T>,
    pub folds: Vec<Vec<usize>>,
}

/// Penalized logit: cross-validate λ on out-of-fold logistic loss, score each
/// observation with the fold estimator not trained on it, then set
/// `λ = (c/√n) q̂_{1−α}` from the multiplier bootstrap of those scores.
pub fn glm_bootstrap_after_cv_lambda<T: Real>(
    d: &Dataset<T>,
    v: usize,
    grid: Option<&[T]>,
    pc: &PenaltyConfig<T>,
) -> Result<GlmOutcome<T>> {
    check_draws(pc.draws, MIN_BOOTSTRAP_DRAWS)?;
    let (x, y) = (d.x(), d.y());
    check_binary(y)?;
    let (n, p) = (d.n(), d.p());
    let alpha = pc.resolve_alpha(n, p)?;
    let owned;
    let grid = match grid {
        Some(g) => g,
        None => {
            owned = default_grid(n);
            &owned
        }
    };
    if grid.is_empty() || grid.iter().any(|l| !(*l > T::zero())) {
        return Err(Error::InvalidArgument("lambda grid must be nonempty and positive".into()));
    }
    let folds = fold_partition(n, v, pc.seed)?;
    let data = fold_data(x, y, &folds);
    let problems = data
        .iter()
        .map(|f| LogitProblem::new(&f.x, &f.y))
        .collect::<Result<Vec<_>>>()?;

    let per_lambda: Vec<(T, Option<Vec<Vec<T>>>)> = grid
        .par_iter()
        .map(|&lambda| {
            let mut loss = T::zero();
            let mut betas = Vec::with_capacity(problems.len());
            for (prob, f) in problems.iter().zip(&data) {
                let Ok(fit) = prob.solve(lambda, &pc.solver) else {
                    return (T::infinity(), None);
                };
                for &i in &f.held_out {
                    let eta = dot(x.row(i), &fit.beta);
                    loss += softplus(eta) - y[i] * eta;
                }
                betas.push(fit.beta);
            }
            (loss, Some(betas))
        })
        .collect();
    let mut best: Option<usize> = None;
    for (i, (c, _)) in per_lambda.iter().enumerate() {
        if c.is_finite() && best.map_or(true, |b| *c < per_lambda[b].0) {
            best = Some(i);
        }
    }
    let best = best.ok_or(Error::AllFitsFailed)?;
    let betas = per_lambda[best].1.as_ref().expect("finite criterion has fits");

    let mut scores = vec![T::zero(); n];
    for (beta, f) in betas.iter().zip(&data) {
        for &i in &f.held_out {
            scores[i] = sigmoid(dot(x.row(i), beta)) - y[i];
        }
    }
    let seed = derive_seed(pc.seed, &[GLM_STREAM]);
    let q = multiplier_quantile(x, &scores, 1.0 - alpha, pc.draws, seed)?;
    let lambda = positive(T::lit(pc.c / (n as f64).sqrt()) * q, "bootstrap quantile of scores")?;
    let fit = LogitProblem::new(x, y)?.solve(lambda, &pc.solver)?;
    let mut r = LambdaResult::new(LambdaRule::GlmBootstrapAfterCv, lambda, "out-of-fold logit scores");
    r.alpha = Some(alpha);
    r.c = Some(pc.c);
    r.preliminary_lambda = Some(grid[best]);
    r.quantile_draws = Some(pc.draws);
    r.per_grid = Some(grid.iter().copied().zip(per_lambda.iter().map(|(c, _)| *c)).collect());
    r.push_meta("bootstrap_quantile", q.as_f64());
    r.push_meta("folds", v as f64);
    Ok(GlmOutcome {
        result: r,
        fit,
        cv_lambda: grid[best],
        scores,
        folds,
    })
}
