use super::mallows::mallows_criterion;
use super::{CandidateFits, SelectorKind, SelectorResult};
use crate::basis::{BasisFamily, BasisSpec};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::series::Predictor;

/// `Σ_k w_k f̂_k`.
#[derive(Debug, Clone)]
pub struct AggregatePredictor<T> {
    pub components: Vec<(BasisSpec, Vec<T>)>,
    pub weights: Vec<T>,
}

impl<T: Real> Predictor<T> for AggregatePredictor<T> {
    fn predict(&self, x: T) -> T {
        self.components
            .iter()
            .zip(&self.weights)
            .map(|((spec, beta), &w)| w * spec.dot(x, beta))
            .sum()
    }
}

/// `w_k ∝ exp(−n r̂_k / (4σ²))`, evaluated after shifting by the largest
/// exponent.
pub fn exponential_weights<T: Real>(risks: &[T], n: usize, sigma2: T) -> Result<Vec<T>> {
    if !(sigma2 > T::zero()) {
        return Err(Error::ZeroVariance);
    }
    let scale = T::from_usize_lossy(n) / (T::lit(4.0) * sigma2);
    let expo: Vec<T> = risks.iter().map(|&r| -scale * r).collect();
    let top = expo
        .iter()
        .copied()
        .fold(T::neg_infinity(), |a, b| if b > a { b } else { a });
    let raw: Vec<T> = expo.iter().map(|&e| (e - top).exp()).collect();
    let total: T = raw.iter().copied().sum();
    Ok(raw.into_iter().map(|w| w / total).collect())
}

/// Exponential-weights aggregation from precomputed fits.
pub fn aggregate_from_fits<T: Real>(
    cf: &CandidateFits<T>,
) -> Result<(SelectorResult<T>, AggregatePredictor<T>)> {
    let sigma2 = cf.sigma2();
    if !(sigma2 > T::zero()) {
        return Err(Error::ZeroVariance);
    }
    let risks: Vec<T> = mallows_criterion(cf)?
        .into_iter()
        .map(|c| c - sigma2)
        .collect();
    let weights = exponential_weights(&risks, cf.n(), sigma2)?;
    let predictor = AggregatePredictor {
        components: cf.fits.iter().map(|f| (f.spec, f.beta.clone())).collect(),
        weights: weights.clone(),
    };
    let result = SelectorResult {
        method: SelectorKind::Aggregation,
        candidates: cf.candidates.clone(),
        criterion: risks,
        chosen_index: None,
        chosen_k: None,
        weights: Some(weights),
        meta: vec![
            ("pilot_k".into(), cf.pilot_k as f64),
            ("sigma2".into(), sigma2.as_f64()),
        ],
    };
    Ok((result, predictor))
}

pub fn aggregate_predictor<T: Real>(
    d: &Dataset<T>,
    family: BasisFamily,
    kn: &[usize],
    kbar: usize,
) -> Result<(SelectorResult<T>, AggregatePredictor<T>)> {
    aggregate_from_fits(&CandidateFits::new(d, family, kn, kbar)?)
}
