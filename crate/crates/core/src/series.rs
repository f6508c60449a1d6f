//! Series least-squares fits, leverages, the heteroskedastic trace term and
//! the four error metrics.

use crate::basis::{check_domain, design_matrix, BasisSpec};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::linalg::QrLeastSquares;
use crate::scalar::{dot, Real};

/// Pivot threshold relative to the largest pivot below which a design is
/// treated as rank deficient.
pub const RANK_TOL: f64 = 1e-10;

/// `⌈n^{1/3}⌉`, computed exactly in integers.
pub fn cube_root_ceil(n: usize) -> usize {
    let mut k = (n as f64).cbrt().floor() as usize;
    while k * k * k < n {
        k += 1;
    }
    while k > 0 && (k - 1) * (k - 1) * (k - 1) >= n {
        k -= 1;
    }
    k.max(1)
}

/// Ordinary least-squares series fit on `k` basis terms.
#[derive(Debug, Clone)]
pub struct SeriesFit<T> {
    pub spec: BasisSpec,
    pub beta: Vec<T>,
    pub fitted: Vec<T>,
    pub residuals: Vec<T>,
    pub leverage: Vec<T>,
    qr: QrLeastSquares<T>,
}

impl<T: Real> SeriesFit<T> {
    pub fn k(&self) -> usize {
        self.spec.k
    }

    pub fn n(&self) -> usize {
        self.fitted.len()
    }

    /// Mean squared residual.
    pub fn mse(&self) -> T {
        crate::scalar::mean_square(&self.residuals)
    }

    /// `Σᵢ hᵢ êᵢ²`, which equals `tr{(Σ p pᵀ)⁻¹ Σ êᵢ² p pᵀ}`.
    pub fn hetero_trace(&self, resid: &[T]) -> Result<T> {
        if resid.len() != self.n() {
            return Err(Error::LengthMismatch {
                what: "residuals",
                got: resid.len(),
                expected: self.n(),
            });
        }
        Ok(self
            .leverage
            .iter()
            .zip(resid)
            .map(|(&h, &e)| h * e * e)
            .sum())
    }

    /// Smoothing weights `aᵢ = p(x0)ᵀ Q_k⁻¹ p(Xᵢ)` with `Q_k = n⁻¹ Σ p pᵀ`,
    /// so that `f̂_k(x0) = n⁻¹ Σ aᵢ Yᵢ`.
    pub fn point_weights(&self, x0: T) -> Result<Vec<T>> {
        let x0 = check_domain(x0)?;
        let mut p0 = vec![T::zero(); self.k()];
        self.spec.eval_into(x0, &mut p0);
        let u = self.qr.row_functional(&p0);
        let n = T::from_usize_lossy(self.n());
        let q = self.qr.q();
        Ok((0..self.n()).map(|i| n * dot(&u, q.row(i))).collect())
    }
}

/// Fits the series regression on explicit covariate and response slices.
pub fn fit_series_xy<T: Real>(xs: &[T], ys: &[T], spec: &BasisSpec) -> Result<SeriesFit<T>> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch {
            what: "covariate",
            got: xs.len(),
            expected: ys.len(),
        });
    }
    if xs.len() < spec.k {
        return Err(Error::RankDeficient { k: spec.k });
    }
    let design = design_matrix(spec, xs)?;
    let qr = QrLeastSquares::new(&design, T::lit(RANK_TOL))
        .ok_or(Error::RankDeficient { k: spec.k })?;
    let beta = qr.solve(ys);
    let fitted = qr.project(ys);
    let residuals = ys.iter().zip(&fitted).map(|(&y, &f)| y - f).collect();
    let leverage = qr.leverages();
    Ok(SeriesFit {
        spec: *spec,
        beta,
        fitted,
        residuals,
        leverage,
        qr,
    })
}

pub fn fit_series<T: Real>(d: &Dataset<T>, spec: &BasisSpec) -> Result<SeriesFit<T>> {
    fit_series_xy(&d.scalar_covariate()?, d.y(), spec)
}

/// Heteroskedasticity trace estimate `Â_k` for the given residuals.
pub fn hetero_trace<T: Real>(d: &Dataset<T>, spec: &BasisSpec, resid: &[T]) -> Result<T> {
    fit_series(d, spec)?.hetero_trace(resid)
}

/// Anything that predicts a regression function on `[0, 1]`.
pub trait Predictor<T: Real> {
    fn predict(&self, x: T) -> T;
}

impl<T: Real> Predictor<T> for SeriesFit<T> {
    fn predict(&self, x: T) -> T {
        self.spec.dot(x, &self.beta)
    }
}

impl<T: Real, F: Fn(T) -> T> Predictor<T> for F {
    fn predict(&self, x: T) -> T {
        self(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Metric<T> {
    /// Root of the integrated squared error under `X ~ U[0, 1]`.
    L2,
    /// In-sample root mean square error.
    Prediction,
    /// Maximum absolute error over the uniform grid.
    Uniform,
    /// Absolute error at one point.
    Pointwise(T),
}

/// Evaluation points for [`error_metric`].
#[derive(Debug, Clone)]
pub struct EvalGrid<T> {
    quad_nodes: Vec<T>,
    quad_weights: Vec<T>,
    uniform: Vec<T>,
    sample: Vec<T>,
}

impl<T: Real> EvalGrid<T> {
    pub const QUADRATURE_POINTS: usize = 10_001;
    pub const UNIFORM_POINTS: usize = 1_001;

    /// Trapezoidal quadrature on 10,001 points, a 1,001-point sup grid and
    /// the sample covariates for the prediction metric.
    pub fn standard(sample: Vec<T>) -> Self {
        Self::with_sizes(Self::QUADRATURE_POINTS, Self::UNIFORM_POINTS, sample)
    }

    pub fn with_sizes(quad_points: usize, uniform_points: usize, sample: Vec<T>) -> Self {
        let quad_nodes = equispaced(quad_points);
        let quad_weights = if quad_points >= 2 {
            let h = T::one() / T::from_usize_lossy(quad_points - 1);
            (0..quad_points)
                .map(|i| {
                    if i == 0 || i + 1 == quad_points {
                        h / T::lit(2.0)
                    } else {
                        h
                    }
                })
                .collect()
        } else {
            vec![T::one(); quad_points]
        };
        Self {
            quad_nodes,
            quad_weights,
            uniform: equispaced(uniform_points),
            sample,
        }
    }

    pub fn uniform_points(&self) -> &[T] {
        &self.uniform
    }

    pub fn quadrature_nodes(&self) -> &[T] {
        &self.quad_nodes
    }

    pub fn sample(&self) -> &[T] {
        &self.sample
    }
}

fn equispaced<T: Real>(m: usize) -> Vec<T> {
    match m {
        0 => Vec::new(),
        1 => vec![T::lit(0.5)],
        _ => {
            let d = T::from_usize_lossy(m - 1);
            (0..m).map(|i| T::from_usize_lossy(i) / d).collect()
        }
    }
}

/// Distance between a predictor `g` and the truth `f` in the chosen metric.
pub fn error_metric<T: Real>(
    g: &(impl Predictor<T> + ?Sized),
    truth: &dyn Fn(T) -> T,
    metric: Metric<T>,
    grid: &EvalGrid<T>,
) -> Result<T> {
    let empty = || Error::InvalidArgument("empty evaluation grid".into());
    match metric {
        Metric::L2 => {
            if grid.quad_nodes.is_empty() {
                return Err(empty());
            }
            let s: T = grid
                .quad_nodes
                .iter()
                .zip(&grid.quad_weights)
                .map(|(&x, &w)| {
                    let d = g.predict(x) - truth(x);
                    w * d * d
                })
                .sum();
            Ok(s.sqrt())
        }
        Metric::Prediction => {
            if grid.sample.is_empty() {
                return Err(empty());
            }
            let s: T = grid
                .sample
                .iter()
                .map(|&x| {
                    let d = g.predict(x) - truth(x);
                    d * d
                })
                .sum();
            Ok((s / T::from_usize_lossy(grid.sample.len())).sqrt())
        }
        Metric::Uniform => grid
            .uniform
            .iter()
            .map(|&x| (g.predict(x) - truth(x)).abs())
            .fold(None, |acc: Option<T>, v| Some(acc.map_or(v, |a| a.max(v))))
            .ok_or_else(empty),
        Metric::Pointwise(x0) => {
            let x0 = check_domain(x0)?;
            Ok((g.predict(x0) - truth(x0)).abs())
        }
    }
}

/// All four metrics in the order ℓ2, prediction, uniform, pointwise.
pub fn error_metrics<T: Real>(
    g: &(impl Predictor<T> + ?Sized),
    truth: &dyn Fn(T) -> T,
    x0: T,
    grid: &EvalGrid<T>,
) -> Result<[T; 4]> {
    Ok([
        error_metric(g, truth, Metric::L2, grid)?,
        error_metric(g, truth, Metric::Prediction, grid)?,
        error_metric(g, truth, Metric::Uniform, grid)?,
        error_metric(g, truth, Metric::Pointwise(x0), grid)?,
    ])
}
