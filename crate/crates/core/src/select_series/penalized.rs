use std::collections::HashMap;

use super::{SelectorKind, SelectorResult};
use crate::basis::{design_matrix, BasisFamily, BasisSpec};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::linalg::QrLeastSquares;
use crate::scalar::Real;
use crate::series::RANK_TOL;

/// A model: a subset of the columns of `p^k` for a given basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelSpec {
    pub basis: BasisSpec,
    /// 0-based column indices into the basis.
    pub terms: Vec<usize>,
}

impl ModelSpec {
    /// The first `k` terms of a family.
    pub fn leading(family: BasisFamily, k: usize) -> Result<Self> {
        Ok(Self {
            basis: BasisSpec::new(family, k)?,
            terms: (0..k).collect(),
        })
    }

    pub fn size(&self) -> usize {
        self.terms.len()
    }
}

/// How `H_m`, the number of models with `|m|` terms, is obtained.
#[derive(Debug, Clone)]
pub enum ModelCounts {
    /// Nested models: `H_m = 1` for every size.
    Ordered,
    /// Count the models of each size in the supplied list.
    CountInList,
    /// Caller-supplied `(size, H)` pairs; `H` may be non-integral.
    Explicit(Vec<(usize, f64)>),
}

/// Nested models `{1..k}` for every `k` in `kn`.
pub fn ordered_models(family: BasisFamily, kn: &[usize]) -> Result<Vec<ModelSpec>> {
    super::normalize_candidates(kn)?
        .into_iter()
        .map(|k| ModelSpec::leading(family, k))
        .collect()
}

/// `λ_m = 2σ²(1 + 2√(log H/|m|) + 2 log H/|m|)`.
pub fn penalty_weight<T: Real>(sigma2: T, size: usize, h: f64) -> T {
    let r = h.ln() / size as f64;
    sigma2 * T::lit(2.0 * (1.0 + 2.0 * r.max(0.0).sqrt() + 2.0 * r))
}

fn count_lookup(models: &[ModelSpec], counts: &ModelCounts) -> Result<HashMap<usize, f64>> {
    let mut map = HashMap::new();
    match counts {
        ModelCounts::Ordered => {
            for m in models {
                map.insert(m.size(), 1.0);
            }
        }
        ModelCounts::CountInList => {
            for m in models {
                *map.entry(m.size()).or_insert(0.0) += 1.0;
            }
        }
        ModelCounts::Explicit(pairs) => {
            for &(s, h) in pairs {
                if !(h >= 1.0) {
                    return Err(Error::InvalidArgument(format!(
                        "model count for size {s} must be at least 1"
                    )));
                }
                map.insert(s, h);
            }
            if let Some(m) = models.iter().find(|m| !map.contains_key(&m.size())) {
                return Err(Error::InvalidArgument(format!(
                    "no model count given for size {}",
                    m.size()
                )));
            }
        }
    }
    Ok(map)
}

fn model_mse<T: Real>(xs: &[T], ys: &[T], m: &ModelSpec) -> Result<T> {
    if m.terms.is_empty() || m.terms.iter().any(|&j| j >= m.basis.k) {
        return Err(Error::InvalidArgument(format!(
            "model terms {:?} do not fit a basis with {} terms",
            m.terms, m.basis.k
        )));
    }
    let design = design_matrix(&m.basis, xs)?.select_cols(&m.terms);
    let qr = QrLeastSquares::new(&design, T::lit(RANK_TOL))
        .ok_or(Error::RankDeficient { k: m.size() })?;
    let fitted = qr.project(ys);
    let resid: Vec<T> = ys.iter().zip(&fitted).map(|(&y, &f)| y - f).collect();
    Ok(crate::scalar::mean_square(&resid))
}

/// Penalized least-squares model selection.
///
/// `candidates` in the result holds model sizes; `chosen_index` points into
/// `models`.
pub fn penalized_model_select<T: Real>(
    d: &Dataset<T>,
    models: &[ModelSpec],
    sigma2: T,
    counts: &ModelCounts,
) -> Result<SelectorResult<T>> {
    if models.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    if !(sigma2 > T::zero()) {
        return Err(Error::InvalidArgument("sigma2 must be positive".into()));
    }
    let xs = d.scalar_covariate()?;
    let h = count_lookup(models, counts)?;
    let n = T::from_usize_lossy(d.n());
    let crit = models
        .iter()
        .map(|m| {
            let lam = penalty_weight(sigma2, m.size(), h[&m.size()]);
            Ok(model_mse(&xs, d.y(), m)? + lam * T::from_usize_lossy(m.size()) / n)
        })
        .collect::<Result<Vec<T>>>()?;
    let sizes = models.iter().map(ModelSpec::size).collect();
    let mut r = SelectorResult::selected(SelectorKind::Penalized, sizes, crit);
    r.push_meta("sigma2", sigma2.as_f64());
    r.push_meta("chosen_model", r.chosen_index.unwrap_or(0) as f64);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn penalty_arithmetic() {
        assert!((penalty_weight(1.5, 4, 1.0) - 3.0_f64).abs() < 1e-15);
        let lam: f64 = penalty_weight(0.7, 3, 3f64.exp());
        assert!((lam - 10.0 * 0.7).abs() < 1e-12);
    }

    #[test]
    fn explicit_counts_must_cover_sizes() {
        let xs: Vec<f64> = (0..10).map(|i| i as f64 / 9.0).collect();
        let d = Dataset::from_scalar(xs.clone(), xs).unwrap();
        let models = ordered_models(BasisFamily::Monomial, &[1, 2]).unwrap();
        let err = penalized_model_select(&d, &models, 1.0, &ModelCounts::Explicit(vec![(1, 1.0)]));
        assert!(err.is_err());
        let ok = penalized_model_select(&d, &models[..1], 1.0, &ModelCounts::CountInList).unwrap();
        assert_eq!(ok.chosen_k, Some(1));
    }

    #[test]
    fn non_nested_models() {
        let xs: Vec<f64> = (0..30).map(|i| i as f64 / 29.0).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x * x).collect();
        let d = Dataset::from_scalar(xs, ys).unwrap();
        let basis = BasisSpec::monomial(3);
        let models = vec![
            ModelSpec { basis, terms: vec![0, 1] },
            ModelSpec { basis, terms: vec![2] },
        ];
        let r = penalized_model_select(&d, &models, 0.01, &ModelCounts::CountInList).unwrap();
        assert_eq!(r.chosen_index, Some(1));
        assert!(r.criterion[1] < 1e-3);
    }
}
