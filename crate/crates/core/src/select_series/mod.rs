//! Selectors for the number of series terms.
//!
//! Every selector works on a candidate set `K_n` of term counts and returns
//! a [`SelectorResult`] holding the per-candidate criterion, the chosen `k`
//! (or aggregation weights) and method-specific diagnostics.

mod aggregate;
mod cv;
mod lepski;
mod mallows;
mod penalized;

pub use aggregate::{aggregate_predictor, aggregate_from_fits, exponential_weights, AggregatePredictor};
pub use cv::{
    fold_partition, loo_select, validation_select, validation_select_with_split, vfold_select,
    FoldAveragePredictor, VFoldOutcome, ValidationOutcome,
};
pub use lepski::{lepski_from_fits, lepski_select, lepski_statistics, LepskiConfig, LepskiStatistics};
pub use mallows::{mallows_from_fits, mallows_select, mallows_select_with_residuals, stein_select};
pub use penalized::{ordered_models, penalized_model_select, penalty_weight, ModelCounts, ModelSpec};

use crate::basis::{BasisFamily, BasisSpec};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::report::KvReport;
use crate::scalar::Real;
use crate::series::{fit_series_xy, SeriesFit};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SelectorKind {
    Mallows,
    Stein,
    Lepski,
    Validation,
    VFold,
    LeaveOneOut,
    Penalized,
    Aggregation,
}

impl SelectorKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Mallows => "mallows",
            Self::Stein => "stein",
            Self::Lepski => "lepski",
            Self::Validation => "validation",
            Self::VFold => "vfold",
            Self::LeaveOneOut => "loo",
            Self::Penalized => "penalized",
            Self::Aggregation => "aggregation",
        }
    }
}

impl std::str::FromStr for SelectorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "mallows" => Self::Mallows,
            "stein" => Self::Stein,
            "lepski" => Self::Lepski,
            "validation" => Self::Validation,
            "vfold" | "cv" => Self::VFold,
            "loo" => Self::LeaveOneOut,
            "penalized" => Self::Penalized,
            "aggregation" => Self::Aggregation,
            other => return Err(Error::InvalidArgument(format!("unknown selector `{other}`"))),
        })
    }
}

#[derive(Debug, Clone)]
pub struct SelectorResult<T> {
    pub method: SelectorKind,
    /// Candidate term counts (model sizes for penalized selection).
    pub candidates: Vec<usize>,
    /// One criterion value per candidate.
    pub criterion: Vec<T>,
    /// Position of the selected candidate; absent for aggregation.
    pub chosen_index: Option<usize>,
    pub chosen_k: Option<usize>,
    /// Aggregation weights, aligned with `candidates`.
    pub weights: Option<Vec<T>>,
    pub meta: Vec<(String, f64)>,
}

impl<T: Real> SelectorResult<T> {
    fn selected(method: SelectorKind, candidates: Vec<usize>, criterion: Vec<T>) -> Self {
        let idx = argmin(&criterion);
        Self {
            method,
            chosen_k: Some(candidates[idx]),
            chosen_index: Some(idx),
            candidates,
            criterion,
            weights: None,
            meta: Vec::new(),
        }
    }

    pub fn meta(&self, key: &str) -> Option<f64> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }

    pub(crate) fn push_meta(&mut self, key: impl Into<String>, v: f64) {
        self.meta.push((key.into(), v));
    }

    pub fn to_report(&self) -> KvReport {
        let mut r = KvReport::new();
        r.text("method", self.method.name());
        if let Some(k) = self.chosen_k {
            r.int("chosen_k", k as i64);
        }
        for (i, (&k, c)) in self.candidates.iter().zip(&self.criterion).enumerate() {
            let key = if self.method == SelectorKind::Penalized {
                format!("criterion.model{i}")
            } else {
                format!("criterion.k{k}")
            };
            r.num(key, c.as_f64());
        }
        if let Some(w) = &self.weights {
            for (&k, wk) in self.candidates.iter().zip(w) {
                r.num(format!("weight.k{k}"), wk.as_f64());
            }
        }
        for (k, v) in &self.meta {
            r.num(k.clone(), *v);
        }
        r
    }
}

/// First index of the minimum; ties resolve to the smallest candidate.
pub(crate) fn argmin<T: Real>(v: &[T]) -> usize {
    let mut best = 0;
    for (i, &c) in v.iter().enumerate().skip(1) {
        if c < v[best] || (v[best].is_nan() && !c.is_nan()) {
            best = i;
        }
    }
    best
}

/// Sorted, de-duplicated candidate set.
pub fn normalize_candidates(kn: &[usize]) -> Result<Vec<usize>> {
    let mut k: Vec<usize> = kn.to_vec();
    k.sort_unstable();
    k.dedup();
    if k.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    if k[0] == 0 {
        return Err(Error::InvalidArgument("candidate k must be positive".into()));
    }
    Ok(k)
}

/// `{1, …, kmax}`.
pub fn candidate_range(kmax: usize) -> Vec<usize> {
    (1..=kmax.max(1)).collect()
}

/// Full-sample fits for every candidate plus pilot residuals at `k̄`.
///
/// Mallows, aggregation and Lepski all consume the same fits; building them
/// once lets the Monte Carlo harness share them across methods.
#[derive(Debug, Clone)]
pub struct CandidateFits<T> {
    pub xs: Vec<T>,
    pub ys: Vec<T>,
    pub family: BasisFamily,
    pub candidates: Vec<usize>,
    pub fits: Vec<SeriesFit<T>>,
    pub pilot_k: usize,
    pub pilot_residuals: Vec<T>,
}

impl<T: Real> CandidateFits<T> {
    pub fn new(d: &Dataset<T>, family: BasisFamily, kn: &[usize], kbar: usize) -> Result<Self> {
        Self::from_xy(d.scalar_covariate()?, d.y().to_vec(), family, kn, kbar)
    }

    pub fn from_xy(
        xs: Vec<T>,
        ys: Vec<T>,
        family: BasisFamily,
        kn: &[usize],
        kbar: usize,
    ) -> Result<Self> {
        let candidates = normalize_candidates(kn)?;
        let fits = candidates
            .iter()
            .map(|&k| fit_series_xy(&xs, &ys, &BasisSpec::new(family, k)?))
            .collect::<Result<Vec<_>>>()?;
        let pilot_residuals = match candidates.iter().position(|&k| k == kbar) {
            Some(i) => fits[i].residuals.clone(),
            None => fit_series_xy(&xs, &ys, &BasisSpec::new(family, kbar)?)?.residuals,
        };
        Ok(Self {
            xs,
            ys,
            family,
            candidates,
            fits,
            pilot_k: kbar,
            pilot_residuals,
        })
    }

    /// Replaces the pilot residuals (e.g. to impose a known variance).
    pub fn with_pilot_residuals(mut self, resid: Vec<T>) -> Result<Self> {
        if resid.len() != self.ys.len() {
            return Err(Error::LengthMismatch {
                what: "pilot residuals",
                got: resid.len(),
                expected: self.ys.len(),
            });
        }
        self.pilot_residuals = resid;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.ys.len()
    }

    pub fn fit_for(&self, k: usize) -> Option<&SeriesFit<T>> {
        self.candidates.iter().position(|&c| c == k).map(|i| &self.fits[i])
    }

    /// Pilot variance estimate `σ̂² = n⁻¹ Σ êᵢ²`.
    pub fn sigma2(&self) -> T {
        crate::scalar::mean_square(&self.pilot_residuals)
    }

    /// `Â_k` for every candidate, from the pilot residuals.
    pub fn hetero_traces(&self) -> Result<Vec<T>> {
        self.fits
            .iter()
            .map(|f| f.hetero_trace(&self.pilot_residuals))
            .collect()
    }
}
