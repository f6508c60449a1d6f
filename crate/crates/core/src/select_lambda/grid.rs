use rayon::prelude::*;

use super::{bcch_lambda, LambdaResult, LambdaRule, PenaltyConfig};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::lasso::{LassoFit, LassoProblem, SolverConfig};
use crate::linalg::Matrix;
use crate::scalar::Real;
use crate::select_series::fold_partition;

pub const DEFAULT_GRID_POINTS: usize = 100;

/// 100 geometrically spaced values from `1/n` to `n`.
pub fn default_grid<T: Real>(n: usize) -> Vec<T> {
    let lo = 1.0 / n as f64;
    let ratio = (n as f64 * n as f64).powf(1.0 / (DEFAULT_GRID_POINTS - 1) as f64);
    (0..DEFAULT_GRID_POINTS)
        .map(|i| T::lit(lo * ratio.powi(i as i32)))
        .collect()
}

fn check_grid<T: Real>(grid: &[T]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("lambda grid is empty".into()));
    }
    if let Some(l) = grid.iter().find(|l| !(**l > T::zero()) || !l.is_finite()) {
        return Err(Error::InvalidArgument(format!("grid value {l} is not positive")));
    }
    Ok(())
}

/// First grid index with the smallest finite criterion.
fn best_index<T: Real>(crit: &[T]) -> Result<usize> {
    let mut best: Option<usize> = None;
    for (i, &c) in crit.iter().enumerate() {
        if c.is_finite() && best.map_or(true, |b| c < crit[b]) {
            best = Some(i);
        }
    }
    best.ok_or(Error::AllFitsFailed)
}

/// Training design and response for each fold, plus its held-out rows.
pub(crate) struct FoldData<T> {
    pub x: Matrix<T>,
    pub y: Vec<T>,
    pub held_out: Vec<usize>,
}

pub(crate) fn fold_data<T: Real>(x: &Matrix<T>, y: &[T], folds: &[Vec<usize>]) -> Vec<FoldData<T>> {
    let n = x.rows();
    folds
        .iter()
        .map(|fold| {
            let mut keep = vec![true; n];
            fold.iter().for_each(|&i| keep[i] = false);
            let train: Vec<usize> = (0..n).filter(|&i| keep[i]).collect();
            FoldData {
                x: x.select_rows(&train),
                y: train.iter().map(|&i| y[i]).collect(),
                held_out: fold.clone(),
            }
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct CvLambdaOutcome<T> {
    pub result: LambdaResult<T>,
    pub folds: Vec<Vec<usize>>,
    /// Fold estimates at `λ̂`, one per fold.
    pub fold_betas: Vec<Vec<T>>,
    /// Elementwise mean of `fold_betas`.
    pub average_beta: Vec<T>,
    /// Full-sample fit at `λ̂`.
    pub full_fit: LassoFit<T>,
}

/// V-fold cross-validation over a λ grid. The criterion is the summed
/// held-out squared error; a fit that fails scores `+∞`.
pub fn cv_lambda<T: Real>(
    d: &Dataset<T>,
    v: usize,
    grid: Option<&[T]>,
    seed: u64,
    solver: &SolverConfig<T>,
) -> Result<CvLambdaOutcome<T>> {
    let owned;
    let grid = match grid {
        Some(g) => g,
        None => {
            owned = default_grid(d.n());
            &owned
        }
    };
    check_grid(grid)?;
    let (x, y) = (d.x(), d.y());
    let folds = fold_partition(d.n(), v, seed)?;
    let problems = fold_data(x, y, &folds)
        .into_iter()
        .map(|f| Ok((LassoProblem::new(&f.x, &f.y)?, f.held_out)))
        .collect::<Result<Vec<_>>>()?;
    let per_lambda: Vec<(T, Option<Vec<Vec<T>>>)> = grid
        .par_iter()
        .map(|&lambda| {
            let mut sse = T::zero();
            let mut betas = Vec::with_capacity(problems.len());
            for (prob, held) in &problems {
                let Ok(fit) = prob.solve(lambda, solver) else {
                    return (T::infinity(), None);
                };
                for &i in held {
                    let r = y[i] - crate::scalar::dot(x.row(i), &fit.beta);
                    sse += r * r;
                }
                betas.push(fit.beta);
            }
            (sse, Some(betas))
        })
        .collect();
    let crit: Vec<T> = per_lambda.iter().map(|(c, _)| *c).collect();
    let best = best_index(&crit)?;
    let lambda = grid[best];
    let fold_betas = per_lambda[best].1.clone().expect("finite criterion has fits");
    let vt = T::from_usize_lossy(v);
    let average_beta = (0..d.p())
        .map(|j| fold_betas.iter().map(|b| b[j]).sum::<T>() / vt)
        .collect();
    let full_fit = LassoProblem::new(x, y)?.solve(lambda, solver)?;
    let mut result = LambdaResult::new(LambdaRule::CrossValidation, lambda, "held-out folds");
    result.per_grid = Some(grid.iter().copied().zip(crit).collect());
    result.push_meta("folds", v as f64);
    result.push_meta("grid_index", best as f64);
    Ok(CvLambdaOutcome {
        result,
        folds,
        fold_betas,
        average_beta,
        full_fit,
    })
}

/// Minimizes `n⁻¹‖y − Xβ̂(λ)‖² + 2σ²‖β̂(λ)‖₀/n − σ²` over the grid; ties go to
/// the earliest grid value.
pub fn sure_lambda<T: Real>(
    d: &Dataset<T>,
    sigma2: T,
    grid: &[T],
    solver: &SolverConfig<T>,
) -> Result<(LambdaResult<T>, LassoFit<T>)> {
    if !(sigma2 > T::zero()) {
        return Err(Error::InvalidArgument("sigma2 must be positive".into()));
    }
    check_grid(grid)?;
    let problem = LassoProblem::new(d.x(), d.y())?;
    let n = T::from_usize_lossy(d.n());
    let two = T::lit(2.0);
    let fits: Vec<Option<LassoFit<T>>> = grid
        .par_iter()
        .map(|&l| problem.solve(l, solver).ok())
        .collect();
    let crit: Vec<T> = fits
        .iter()
        .map(|f| match f {
            Some(f) => {
                let fitted = f.predict(d.x());
                let mse = d
                    .y()
                    .iter()
                    .zip(&fitted)
                    .map(|(&a, &b)| (a - b) * (a - b))
                    .sum::<T>()
                    / n;
                mse + two * sigma2 * T::from_usize_lossy(f.support_size()) / n - sigma2
            }
            None => T::infinity(),
        })
        .collect();
    let best = best_index(&crit)?;
    let fit = fits[best].clone().expect("finite criterion has a fit");
    let mut r = LambdaResult::new(LambdaRule::Sure, grid[best], "full-sample fits");
    r.per_grid = Some(grid.iter().copied().zip(crit).collect());
    r.push_meta("sigma2", sigma2.as_f64());
    r.push_meta("grid_index", best as f64);
    Ok((r, fit))
}

/// Mean squared residual of the final BCCH fit, a plug-in for `σ²`.
pub fn sigma2_from_bcch<T: Real>(d: &Dataset<T>, pc: &PenaltyConfig<T>) -> Result<T> {
    let (_, fit) = bcch_lambda(d, pc)?;
    let fitted = fit.predict(d.x());
    let resid: Vec<T> = d.y().iter().zip(&fitted).map(|(&a, &b)| a - b).collect();
    Ok(crate::scalar::mean_square(&resid))
}
