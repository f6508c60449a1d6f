use rayon::prelude::*;

use super::{CandidateFits, SelectorKind, SelectorResult};
use crate::basis::{check_domain, BasisFamily};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::random::{empirical_quantile, fill_gaussian, stream};
use crate::scalar::Real;
use crate::series::Predictor;

pub const MIN_DRAWS: usize = 500;

const DEGENERACY_RATIO: f64 = 1e-24;

#[derive(Debug, Clone, Copy)]
pub struct LepskiConfig<T> {
    /// Evaluation point.
    pub x0: T,
    pub beta: T,
    pub alpha: f64,
    /// Multiplier bootstrap draws.
    pub draws: usize,
    pub seed: u64,
}

impl<T: Real> Default for LepskiConfig<T> {
    fn default() -> Self {
        Self {
            x0: T::lit(0.5),
            beta: T::one(),
            alpha: 0.05,
            draws: 1000,
            seed: 0,
        }
    }
}

/// Point estimates, smoothing weights and pairwise variance estimates at
/// `x0`, indexed by candidate position.
#[derive(Debug, Clone)]
pub struct LepskiStatistics<T> {
    pub candidates: Vec<usize>,
    /// `f̂_k(x0)`.
    pub estimates: Vec<T>,
    /// `a_k(i)` with `f̂_k(x0) = n⁻¹ Σ a_k(i) Yᵢ`.
    pub weights: Vec<Vec<T>>,
    /// `p̂_{k,k'} = n⁻² Σ êᵢ² (a_{k'}(i) − a_k(i))²` for `k < k'`; zero on
    /// and below the diagonal.
    pub pair_variance: Vec<Vec<T>>,
}

impl<T: Real> LepskiStatistics<T> {
    /// `max_{k'>k} |f̂_{k'}(x0) − f̂_k(x0)| / √p̂_{k,k'}`; zero for the last
    /// candidate.
    pub fn test_statistics(&self) -> Vec<T> {
        let m = self.candidates.len();
        (0..m)
            .map(|j| {
                (j + 1..m).fold(T::zero(), |acc, jp| {
                    let t = (self.estimates[jp] - self.estimates[j]).abs()
                        / self.pair_variance[j][jp].sqrt();
                    acc.max(t)
                })
            })
            .collect()
    }
}

pub fn lepski_statistics<T: Real>(cf: &CandidateFits<T>, x0: T) -> Result<LepskiStatistics<T>> {
    let x0 = check_domain(x0)?;
    let n = cf.n();
    let m = cf.candidates.len();
    let weights = cf
        .fits
        .iter()
        .map(|f| f.point_weights(x0))
        .collect::<Result<Vec<_>>>()?;
    let estimates = cf.fits.iter().map(|f| f.predict(x0)).collect();
    let e2: Vec<T> = cf.pilot_residuals.iter().map(|&e| e * e).collect();
    let n2 = T::from_usize_lossy(n) * T::from_usize_lossy(n);
    let mut pair_variance = vec![vec![T::zero(); m]; m];
    for j in 0..m {
        for jp in j + 1..m {
            let (mut s, mut scale) = (T::zero(), T::zero());
            for i in 0..n {
                let (a, b) = (weights[j][i], weights[jp][i]);
                s += e2[i] * (b - a) * (b - a);
                scale += e2[i] * (a * a + b * b);
            }
            let p = s / n2;
            // Below this the difference is rounding noise in identical weights.
            if !(s > T::lit(DEGENERACY_RATIO) * scale) {
                return Err(Error::DegenerateVariance {
                    k: cf.candidates[j],
                    k_prime: cf.candidates[jp],
                });
            }
            pair_variance[j][jp] = p;
        }
    }
    Ok(LepskiStatistics {
        candidates: cf.candidates.clone(),
        estimates,
        weights,
        pair_variance,
    })
}

/// Bootstrap draws of the studentized maximum for every candidate but the
/// last: `draws[j][b]`. Draw `b` uses its own stream, so the result does not
/// depend on scheduling.
fn bootstrap_draws<T: Real>(
    stats: &LepskiStatistics<T>,
    resid: &[T],
    draws: usize,
    seed: u64,
) -> Vec<Vec<T>> {
    let n = resid.len();
    let m = stats.candidates.len();
    let nt = T::from_usize_lossy(n);
    let coef: Vec<Vec<T>> = stats
        .weights
        .iter()
        .map(|a| a.iter().zip(resid).map(|(&a, &e)| a * e / nt).collect())
        .collect();
    let inv_sd: Vec<Vec<T>> = stats
        .pair_variance
        .iter()
        .map(|row| row.iter().map(|&p| if p > T::zero() { p.sqrt().recip() } else { T::zero() }).collect())
        .collect();
    let per_draw: Vec<Vec<T>> = (0..draws as u64)
        .into_par_iter()
        .map(|b| {
            let mut rng = stream(seed, &[b]);
            let mut w = vec![T::zero(); n];
            fill_gaussian(&mut rng, &mut w);
            let s: Vec<T> = coef.iter().map(|c| crate::scalar::dot(c, &w)).collect();
            (0..m.saturating_sub(1))
                .map(|j| {
                    (j + 1..m).fold(T::zero(), |acc, jp| acc.max((s[jp] - s[j]).abs() * inv_sd[j][jp]))
                })
                .collect()
        })
        .collect();
    (0..m.saturating_sub(1))
        .map(|j| per_draw.iter().map(|d| d[j]).collect())
        .collect()
}

/// Lepski selection from precomputed fits. The criterion is
/// `max(stat_k − β − ĉ_k, 0)`, zero exactly on accepted candidates.
pub fn lepski_from_fits<T: Real>(
    cf: &CandidateFits<T>,
    cfg: &LepskiConfig<T>,
) -> Result<SelectorResult<T>> {
    if !(cfg.alpha > 0.0 && cfg.alpha < 1.0) {
        return Err(Error::InvalidAlpha(cfg.alpha));
    }
    if cfg.draws < MIN_DRAWS {
        return Err(Error::InvalidArgument(format!(
            "at least {MIN_DRAWS} bootstrap draws are required, got {}",
            cfg.draws
        )));
    }
    let stats = lepski_statistics(cf, cfg.x0)?;
    let test = stats.test_statistics();
    let mut draws = bootstrap_draws(&stats, &cf.pilot_residuals, cfg.draws, cfg.seed);
    let m = stats.candidates.len();
    let mut crit_values = Vec::with_capacity(m);
    let mut criterion = Vec::with_capacity(m);
    for j in 0..m {
        if j + 1 == m {
            crit_values.push(T::zero());
            criterion.push(T::zero());
        } else {
            let c = empirical_quantile(&mut draws[j], 1.0 - cfg.alpha);
            crit_values.push(c);
            criterion.push((test[j] - cfg.beta - c).max(T::zero()));
        }
    }
    let mut r = SelectorResult::selected(SelectorKind::Lepski, stats.candidates.clone(), criterion);
    r.push_meta("x0", cfg.x0.as_f64());
    r.push_meta("beta", cfg.beta.as_f64());
    r.push_meta("alpha", cfg.alpha);
    r.push_meta("draws", cfg.draws as f64);
    for (j, &k) in stats.candidates.iter().enumerate() {
        r.push_meta(format!("stat.k{k}"), test[j].as_f64());
        r.push_meta(format!("crit_value.k{k}"), crit_values[j].as_f64());
        let accepted = j + 1 == m || test[j] <= cfg.beta + crit_values[j];
        r.push_meta(format!("accepted.k{k}"), if accepted { 1.0 } else { 0.0 });
    }
    Ok(r)
}

pub fn lepski_select<T: Real>(
    d: &Dataset<T>,
    family: BasisFamily,
    kn: &[usize],
    kbar: usize,
    cfg: &LepskiConfig<T>,
) -> Result<SelectorResult<T>> {
    lepski_from_fits(&CandidateFits::new(d, family, kn, kbar)?, cfg)
}
