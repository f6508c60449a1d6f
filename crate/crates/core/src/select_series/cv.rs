use super::{normalize_candidates, CandidateFits, SelectorKind, SelectorResult};
use crate::basis::{BasisFamily, BasisSpec};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::random::{permutation, stream};
use crate::scalar::Real;
use crate::series::{fit_series_xy, Predictor, SeriesFit};

const FOLD_STREAM: u64 = 0xF01D;
const SPLIT_STREAM: u64 = 0x5711;

/// Random partition of `0..n` into `v` folds whose sizes differ by at most
/// one. Each fold is sorted.
pub fn fold_partition(n: usize, v: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if v < 2 || v > n {
        return Err(Error::InvalidFolds { v, n });
    }
    let perm = permutation(&mut stream(seed, &[FOLD_STREAM]), n);
    let mut folds = vec![Vec::with_capacity(n / v + 1); v];
    for (pos, &i) in perm.iter().enumerate() {
        folds[pos % v].push(i);
    }
    for f in &mut folds {
        f.sort_unstable();
    }
    Ok(folds)
}

fn complement(n: usize, fold: &[usize]) -> Vec<usize> {
    let mut mask = vec![true; n];
    for &i in fold {
        mask[i] = false;
    }
    (0..n).filter(|&i| mask[i]).collect()
}

fn gather<T: Copy>(v: &[T], idx: &[usize]) -> Vec<T> {
    idx.iter().map(|&i| v[i]).collect()
}

fn fit_on<T: Real>(xs: &[T], ys: &[T], idx: &[usize], spec: &BasisSpec) -> Result<SeriesFit<T>> {
    fit_series_xy(&gather(xs, idx), &gather(ys, idx), spec).map_err(|e| match e {
        Error::RankDeficient { k } => Error::FoldTooSmall { rows: idx.len(), k },
        other => other,
    })
}

fn held_out_sse<T: Real>(fit: &SeriesFit<T>, xs: &[T], ys: &[T], idx: &[usize]) -> T {
    idx.iter()
        .map(|&i| {
            let r = ys[i] - fit.predict(xs[i]);
            r * r
        })
        .sum()
}

#[derive(Debug, Clone)]
pub struct ValidationOutcome<T> {
    pub result: SelectorResult<T>,
    /// Training-fold fit at the selected `k`.
    pub fit: SeriesFit<T>,
}

/// Single train/validation split; criterion is the validation-fold mean
/// squared error.
pub fn validation_select_with_split<T: Real>(
    d: &Dataset<T>,
    family: BasisFamily,
    kn: &[usize],
    train: &[usize],
    valid: &[usize],
) -> Result<ValidationOutcome<T>> {
    let kn = normalize_candidates(kn)?;
    let kmax = *kn.last().expect("nonempty");
    for part in [train, valid] {
        if part.len() < kmax + 1 {
            return Err(Error::FoldTooSmall { rows: part.len(), k: kmax });
        }
    }
    let xs = d.scalar_covariate()?;
    let ys = d.y();
    let mut fits = Vec::with_capacity(kn.len());
    let mut crit = Vec::with_capacity(kn.len());
    let nv = T::from_usize_lossy(valid.len());
    for &k in &kn {
        let fit = fit_on(&xs, ys, train, &BasisSpec::new(family, k)?)?;
        crit.push(held_out_sse(&fit, &xs, ys, valid) / nv);
        fits.push(fit);
    }
    let mut result = SelectorResult::selected(SelectorKind::Validation, kn, crit);
    result.push_meta("train_rows", train.len() as f64);
    result.push_meta("validation_rows", valid.len() as f64);
    let fit = fits.swap_remove(result.chosen_index.expect("selected"));
    Ok(ValidationOutcome { result, fit })
}

/// Random split with `round(train_frac·n)` training rows.
pub fn validation_select<T: Real>(
    d: &Dataset<T>,
    family: BasisFamily,
    kn: &[usize],
    seed: u64,
    train_frac: f64,
) -> Result<ValidationOutcome<T>> {
    if !(train_frac > 0.0 && train_frac < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "training fraction {train_frac} must lie in (0, 1)"
        )));
    }
    let n = d.n();
    let perm = permutation(&mut stream(seed, &[SPLIT_STREAM]), n);
    let n_train = ((train_frac * n as f64).round() as usize).clamp(1, n.saturating_sub(1).max(1));
    let mut train = perm[..n_train].to_vec();
    let mut valid = perm[n_train..].to_vec();
    train.sort_unstable();
    valid.sort_unstable();
    validation_select_with_split(d, family, kn, &train, &valid)
}

/// Average of the per-fold fits at the selected `k`.
#[derive(Debug, Clone)]
pub struct FoldAveragePredictor<T> {
    pub spec: BasisSpec,
    pub fold_betas: Vec<Vec<T>>,
}

impl<T: Real> Predictor<T> for FoldAveragePredictor<T> {
    fn predict(&self, x: T) -> T {
        let s: T = self.fold_betas.iter().map(|b| self.spec.dot(x, b)).sum();
        s / T::from_usize_lossy(self.fold_betas.len())
    }
}

#[derive(Debug, Clone)]
pub struct VFoldOutcome<T> {
    pub result: SelectorResult<T>,
    pub folds: Vec<Vec<usize>>,
    /// Average of the fold fits at `k̂`.
    pub average: FoldAveragePredictor<T>,
    /// Full-sample refit at `k̂`.
    pub full: SeriesFit<T>,
}

/// V-fold cross-validation; criterion is `n⁻¹ Σ_v Σ_{i∈I_v} (Yᵢ − f̂_{k,v}(Xᵢ))²`.
pub fn vfold_select<T: Real>(
    d: &Dataset<T>,
    family: BasisFamily,
    kn: &[usize],
    v: usize,
    seed: u64,
) -> Result<VFoldOutcome<T>> {
    let kn = normalize_candidates(kn)?;
    let n = d.n();
    let folds = fold_partition(n, v, seed)?;
    let xs = d.scalar_covariate()?;
    let ys = d.y();
    let mut sse = vec![T::zero(); kn.len()];
    let mut betas: Vec<Vec<Vec<T>>> = vec![Vec::with_capacity(v); kn.len()];
    for fold in &folds {
        let train = complement(n, fold);
        for (j, &k) in kn.iter().enumerate() {
            let fit = fit_on(&xs, ys, &train, &BasisSpec::new(family, k)?)?;
            sse[j] += held_out_sse(&fit, &xs, ys, fold);
            betas[j].push(fit.beta);
        }
    }
    let nt = T::from_usize_lossy(n);
    let crit = sse.into_iter().map(|s| s / nt).collect();
    let mut result = SelectorResult::selected(SelectorKind::VFold, kn, crit);
    result.push_meta("folds", v as f64);
    let idx = result.chosen_index.expect("selected");
    let spec = BasisSpec::new(family, result.candidates[idx])?;
    let full = fit_series_xy(&xs, ys, &spec)?;
    let average = FoldAveragePredictor {
        spec,
        fold_betas: betas.swap_remove(idx),
    };
    Ok(VFoldOutcome { result, folds, average, full })
}

/// Leave-one-out criterion from full-sample fits via the leverage identity.
pub(crate) fn loo_from_fits<T: Real>(cf: &CandidateFits<T>) -> Result<SelectorResult<T>> {
    let one = T::one();
    let limit = one - T::lit(1e-10);
    let n = T::from_usize_lossy(cf.n());
    let mut crit = Vec::with_capacity(cf.fits.len());
    for f in &cf.fits {
        let mut s = T::zero();
        for (i, (&r, &h)) in f.residuals.iter().zip(&f.leverage).enumerate() {
            if h >= limit {
                return Err(Error::UnitLeverage { k: f.k(), i });
            }
            let q = r / (one - h);
            s += q * q;
        }
        crit.push(s / n);
    }
    Ok(SelectorResult::selected(SelectorKind::LeaveOneOut, cf.candidates.clone(), crit))
}

pub fn loo_select<T: Real>(
    d: &Dataset<T>,
    family: BasisFamily,
    kn: &[usize],
) -> Result<SelectorResult<T>> {
    let kn = normalize_candidates(kn)?;
    loo_from_fits(&CandidateFits::new(d, family, &kn, kn[0])?)
}
