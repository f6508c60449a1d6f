use super::{positive, union_bound_quantile, LambdaResult, LambdaRule, PenaltyConfig};
use crate::dataset::{Dataset, Labels};
use crate::error::{Error, Result};
use crate::lasso::{LassoFit, LassoProblem};
use crate::linalg::Matrix;
use crate::scalar::Real;

/// `max_j √(n⁻¹ Σᵢ (xᵢⱼ eᵢ)²)`.
pub fn moment_max<T: Real>(x: &Matrix<T>, e: &[T]) -> T {
    let (n, p) = (x.rows(), x.cols());
    let mut acc = vec![T::zero(); p];
    for (i, &ei) in e.iter().enumerate().take(n) {
        for (a, &xij) in acc.iter_mut().zip(x.row(i)) {
            let s = xij * ei;
            *a += s * s;
        }
    }
    let nt = T::from_usize_lossy(n);
    acc.into_iter().fold(T::zero(), |m, a| m.max((a / nt).sqrt()))
}

/// `max_j √(n⁻¹ Σ_g (Σ_{i∈g} xᵢⱼ eᵢ)²)`, groups in first-appearance order.
pub fn cluster_moment_max<T: Real>(x: &Matrix<T>, e: &[T], labels: &Labels) -> T {
    let p = x.cols();
    let mut acc = vec![T::zero(); p];
    let mut group_sum = vec![T::zero(); p];
    for members in labels.groups() {
        group_sum.iter_mut().for_each(|v| *v = T::zero());
        for &i in &members {
            for (g, &xij) in group_sum.iter_mut().zip(x.row(i)) {
                *g += xij * e[i];
            }
        }
        for (a, &g) in acc.iter_mut().zip(&group_sum) {
            *a += g * g;
        }
    }
    let nt = T::from_usize_lossy(x.rows());
    acc.into_iter().fold(T::zero(), |m, a| m.max((a / nt).sqrt()))
}

fn plugin_scale<T: Real>(n: usize, p: usize, c: f64, alpha: f64) -> (T, f64) {
    let q = union_bound_quantile(alpha, p);
    (T::lit(2.0 * c * q / (n as f64).sqrt()), q)
}

/// `(2c/√n) Φ⁻¹(1 − α/(2p)) max_j √(n⁻¹ Σ xᵢⱼ² eᵢ²)`.
pub fn plugin_lambda<T: Real>(x: &Matrix<T>, e: &[T], c: f64, alpha: f64) -> T {
    plugin_scale::<T>(x.rows(), x.cols(), c, alpha).0 * moment_max(x, e)
}

/// Cluster-robust counterpart of [`plugin_lambda`].
pub fn cluster_plugin_lambda<T: Real>(
    x: &Matrix<T>,
    e: &[T],
    labels: &Labels,
    c: f64,
    alpha: f64,
) -> T {
    plugin_scale::<T>(x.rows(), x.cols(), c, alpha).0 * cluster_moment_max(x, e, labels)
}

/// Known-σ rule `(2cσ/√n) Φ⁻¹(1 − α/(2p)) max_j √(n⁻¹ Σ xᵢⱼ²)`.
pub fn brt_lambda<T: Real>(d: &Dataset<T>, sigma: T, pc: &PenaltyConfig<T>) -> Result<LambdaResult<T>> {
    if !(sigma > T::zero()) {
        return Err(Error::InvalidArgument("sigma must be positive".into()));
    }
    let alpha = pc.resolve_alpha(d.n(), d.p())?;
    let ones = vec![T::one(); d.n()];
    let (scale, q) = plugin_scale::<T>(d.n(), d.p(), pc.c, alpha);
    let norm = moment_max(d.x(), &ones);
    let lambda = positive(scale * sigma * norm, "brt")?;
    let mut r = LambdaResult::new(LambdaRule::Brt, lambda, "known sigma");
    r.alpha = Some(alpha);
    r.c = Some(pc.c);
    r.push_meta("sigma", sigma.as_f64());
    r.push_meta("normal_quantile", q);
    r.push_meta("max_column_rms", norm.as_f64());
    Ok(r)
}

/// Preliminary λ from response moments, pilot Lasso, final λ from residual
/// moments, final Lasso.
fn three_step<T: Real>(
    x: &Matrix<T>,
    y: &[T],
    pc: &PenaltyConfig<T>,
    rule: LambdaRule,
    moments: impl Fn(&[T]) -> T,
) -> Result<(LambdaResult<T>, LassoFit<T>)> {
    let (n, p) = (x.rows(), x.cols());
    let alpha = pc.resolve_alpha(n, p)?;
    let (scale, q) = plugin_scale::<T>(n, p, pc.c, alpha);
    let m0 = moments(y);
    let lambda0 = positive(scale * m0, "preliminary moments")?;
    let problem = LassoProblem::new(x, y)?;
    let pilot = problem.solve(lambda0, &pc.solver)?;
    let fitted = pilot.predict(x);
    let resid: Vec<T> = y.iter().zip(&fitted).map(|(&a, &b)| a - b).collect();
    let m1 = moments(&resid);
    let lambda = positive(scale * m1, "residual moments")?;
    let fit = problem.solve(lambda, &pc.solver)?;
    let mut r = LambdaResult::new(rule, lambda, "lasso at preliminary lambda");
    r.alpha = Some(alpha);
    r.c = Some(pc.c);
    r.preliminary_lambda = Some(lambda0);
    r.push_meta("normal_quantile", q);
    r.push_meta("preliminary_moment", m0.as_f64());
    r.push_meta("moment", m1.as_f64());
    r.push_meta("pilot_support", pilot.support_size() as f64);
    Ok((r, fit))
}

pub fn bcch_lambda<T: Real>(d: &Dataset<T>, pc: &PenaltyConfig<T>) -> Result<(LambdaResult<T>, LassoFit<T>)> {
    three_step(d.x(), d.y(), pc, LambdaRule::Bcch, |e| moment_max(d.x(), e))
}

pub fn cluster_bcch_lambda<T: Real>(
    d: &Dataset<T>,
    pc: &PenaltyConfig<T>,
) -> Result<(LambdaResult<T>, LassoFit<T>)> {
    let labels = d.cluster().ok_or(Error::MissingLabels("cluster"))?;
    if labels.n_groups() < 2 {
        return Err(Error::SingleCluster);
    }
    let (mut r, fit) = three_step(d.x(), d.y(), pc, LambdaRule::ClusterBcch, |e| {
        cluster_moment_max(d.x(), e, labels)
    })?;
    r.push_meta("clusters", labels.n_groups() as f64);
    Ok((r, fit))
}

/// Within-transform, then the clustered rule with units as clusters and
/// `n = NT`.
pub fn panel_bcch_lambda<T: Real>(
    d: &Dataset<T>,
    pc: &PenaltyConfig<T>,
) -> Result<(LambdaResult<T>, LassoFit<T>)> {
    let within = d.within_transform()?;
    let units = within.unit().ok_or(Error::MissingLabels("unit"))?;
    let (mut r, fit) = three_step(within.x(), within.y(), pc, LambdaRule::PanelBcch, |e| {
        cluster_moment_max(within.x(), e, units)
    })?;
    r.residual_source = "within-transformed lasso at preliminary lambda".into();
    r.push_meta("units", units.n_groups() as f64);
    r.push_meta("periods", (within.n() / units.n_groups()) as f64);
    Ok((r, fit))
}
