use super::{CandidateFits, SelectorKind, SelectorResult};
use crate::basis::BasisFamily;
use crate::dataset::Dataset;
use crate::error::Result;
use crate::scalar::Real;

/// `MSE_k + 2Â_k/n` for every candidate.
pub(crate) fn mallows_criterion<T: Real>(cf: &CandidateFits<T>) -> Result<Vec<T>> {
    let n = T::from_usize_lossy(cf.n());
    let two = T::lit(2.0);
    cf.fits
        .iter()
        .map(|f| Ok(f.mse() + two * f.hetero_trace(&cf.pilot_residuals)? / n))
        .collect()
}

/// Feasible Mallows selection from precomputed fits.
pub fn mallows_from_fits<T: Real>(cf: &CandidateFits<T>) -> Result<SelectorResult<T>> {
    let crit = mallows_criterion(cf)?;
    let mut r = SelectorResult::selected(SelectorKind::Mallows, cf.candidates.clone(), crit);
    r.push_meta("pilot_k", cf.pilot_k as f64);
    r.push_meta("sigma2", cf.sigma2().as_f64());
    Ok(r)
}

pub fn mallows_select<T: Real>(
    d: &Dataset<T>,
    family: BasisFamily,
    kn: &[usize],
    kbar: usize,
) -> Result<SelectorResult<T>> {
    mallows_from_fits(&CandidateFits::new(d, family, kn, kbar)?)
}

/// Mallows selection with caller-supplied residuals in place of the pilot fit.
pub fn mallows_select_with_residuals<T: Real>(
    d: &Dataset<T>,
    family: BasisFamily,
    kn: &[usize],
    resid: Vec<T>,
) -> Result<SelectorResult<T>> {
    let kmin = super::normalize_candidates(kn)?[0];
    let cf = CandidateFits::new(d, family, kn, kmin)?.with_pilot_residuals(resid)?;
    mallows_from_fits(&cf)
}

/// Stein's unbiased risk estimate coincides with Mallows for series fits.
pub fn stein_select<T: Real>(
    d: &Dataset<T>,
    family: BasisFamily,
    kn: &[usize],
    kbar: usize,
) -> Result<SelectorResult<T>> {
    let mut r = mallows_select(d, family, kn, kbar)?;
    r.method = SelectorKind::Stein;
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data() -> Dataset<f64> {
        let xs: Vec<f64> = (0..40).map(|i| (i as f64 + 0.5) / 40.0).collect();
        let ys = xs
            .iter()
            .enumerate()
            .map(|(i, x)| (3.0 * x).sin() + 0.1 * ((i * 7 % 11) as f64 - 5.0) / 5.0)
            .collect();
        Dataset::from_scalar(xs, ys).unwrap()
    }

    #[test]
    fn singleton_candidate_set() {
        let r = mallows_select(&data(), BasisFamily::Monomial, &[3], 3).unwrap();
        assert_eq!(r.chosen_k, Some(3));
        assert_eq!(r.criterion.len(), 1);
    }

    #[test]
    fn constant_residuals_give_homoskedastic_penalty() {
        let d = data();
        let sigma = 0.3;
        let resid = vec![sigma; d.n()];
        let r = mallows_select_with_residuals(&d, BasisFamily::Monomial, &[1, 2, 3, 4], resid)
            .unwrap();
        let n = d.n() as f64;
        for (&k, &c) in r.candidates.iter().zip(&r.criterion) {
            let fit = crate::series::fit_series(&d, &crate::BasisSpec::monomial(k)).unwrap();
            let expect = fit.mse() + 2.0 * sigma * sigma * k as f64 / n;
            assert!((c - expect).abs() < 1e-10);
        }
    }

    #[test]
    fn stein_matches_mallows() {
        let d = data();
        let m = mallows_select(&d, BasisFamily::QuadraticSpline, &[1, 2, 3, 4, 5], 4).unwrap();
        let s = stein_select(&d, BasisFamily::QuadraticSpline, &[1, 2, 3, 4, 5], 4).unwrap();
        assert_eq!(m.criterion, s.criterion);
        assert_eq!(m.chosen_k, s.chosen_k);
        assert_eq!(s.method, SelectorKind::Stein);
    }
}
