//! Penalty-parameter rules for the Lasso and penalized logit.
//!
//! Mean-regression rules carry the factor `2c` that matches the unhalved
//! squared loss of [`crate::lasso`]; the pivotal quantile rule and the GLM
//! rule use `c` alone.

mod grid;
mod plug_in;
mod resampling;

pub use grid::{cv_lambda, default_grid, sigma2_from_bcch, sure_lambda, CvLambdaOutcome};
pub use plug_in::{
    bcch_lambda, brt_lambda, cluster_bcch_lambda, cluster_moment_max, cluster_plugin_lambda,
    moment_max, panel_bcch_lambda, plugin_lambda,
};
pub use resampling::{
    bootstrap_lambda, glm_bootstrap_after_cv_lambda, multiplier_quantile, quantile_pivotal_lambda,
    GlmOutcome,
};

use crate::error::{Error, Result};
use crate::lasso::SolverConfig;
use crate::report::KvReport;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LambdaRule {
    Brt,
    Bcch,
    Bootstrap,
    Sure,
    CrossValidation,
    ClusterBcch,
    PanelBcch,
    QuantilePivotal,
    GlmBootstrapAfterCv,
}

impl LambdaRule {
    pub fn name(self) -> &'static str {
        match self {
            Self::Brt => "brt",
            Self::Bcch => "bcch",
            Self::Bootstrap => "bootstrap",
            Self::Sure => "sure",
            Self::CrossValidation => "cv",
            Self::ClusterBcch => "cluster-bcch",
            Self::PanelBcch => "panel-bcch",
            Self::QuantilePivotal => "quantile-pivotal",
            Self::GlmBootstrapAfterCv => "glm-bootstrap-cv",
        }
    }
}

impl std::str::FromStr for LambdaRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            Self::Brt,
            Self::Bcch,
            Self::Bootstrap,
            Self::Sure,
            Self::CrossValidation,
            Self::ClusterBcch,
            Self::PanelBcch,
            Self::QuantilePivotal,
            Self::GlmBootstrapAfterCv,
        ]
        .into_iter()
        .find(|r| r.name() == s)
        .ok_or_else(|| Error::InvalidArgument(format!("unknown lambda rule `{s}`")))
    }
}

/// Constants and solver settings shared by the plug-in and bootstrap rules.
#[derive(Debug, Clone, Copy)]
pub struct PenaltyConfig<T> {
    pub c: f64,
    /// `None` selects `0.1 / log(p ∨ n)`.
    pub alpha: Option<f64>,
    /// Bootstrap or simulation draws.
    pub draws: usize,
    pub seed: u64,
    pub solver: SolverConfig<T>,
}

impl<T: Real> Default for PenaltyConfig<T> {
    fn default() -> Self {
        Self {
            c: 1.1,
            alpha: None,
            draws: 1000,
            seed: 0,
            solver: SolverConfig::default(),
        }
    }
}

impl<T: Real> PenaltyConfig<T> {
    pub fn resolve_alpha(&self, n: usize, p: usize) -> Result<f64> {
        let a = self.alpha.unwrap_or_else(|| default_alpha(n, p));
        check_alpha(a)?;
        Ok(a)
    }
}

/// `0.1 / log(p ∨ n)`.
pub fn default_alpha(n: usize, p: usize) -> f64 {
    0.1 / (n.max(p) as f64).ln()
}

pub(crate) fn check_alpha(a: f64) -> Result<()> {
    if a > 0.0 && a < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidAlpha(a))
    }
}

/// `Φ⁻¹(1 − α/(2p))`.
pub fn union_bound_quantile(alpha: f64, p: usize) -> f64 {
    crate::random::normal_quantile(1.0 - alpha / (2.0 * p as f64))
}

#[derive(Debug, Clone)]
pub struct LambdaResult<T> {
    pub lambda: T,
    pub rule: LambdaRule,
    pub alpha: Option<f64>,
    pub c: Option<f64>,
    pub preliminary_lambda: Option<T>,
    /// How the residuals feeding the rule were produced.
    pub residual_source: String,
    pub quantile_draws: Option<usize>,
    /// `(λ, criterion)` for grid rules.
    pub per_grid: Option<Vec<(T, T)>>,
    pub meta: Vec<(String, f64)>,
}

impl<T: Real> LambdaResult<T> {
    pub(crate) fn new(rule: LambdaRule, lambda: T, residual_source: impl Into<String>) -> Self {
        Self {
            lambda,
            rule,
            alpha: None,
            c: None,
            preliminary_lambda: None,
            residual_source: residual_source.into(),
            quantile_draws: None,
            per_grid: None,
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
        r.text("rule", self.rule.name());
        r.num("lambda", self.lambda.as_f64());
        if let Some(a) = self.alpha {
            r.num("alpha", a);
        }
        if let Some(c) = self.c {
            r.num("c", c);
        }
        if let Some(l) = self.preliminary_lambda {
            r.num("preliminary_lambda", l.as_f64());
        }
        r.text("residual_source", self.residual_source.clone());
        if let Some(b) = self.quantile_draws {
            r.int("quantile_draws", b as i64);
        }
        for (k, v) in &self.meta {
            r.num(k.clone(), *v);
        }
        if let Some(g) = &self.per_grid {
            for (i, (l, c)) in g.iter().enumerate() {
                r.num(format!("grid.{i}.lambda"), l.as_f64());
                r.num(format!("grid.{i}.criterion"), c.as_f64());
            }
        }
        r
    }
}

pub(crate) fn positive<T: Real>(lambda: T, what: &str) -> Result<T> {
    if lambda > T::zero() && lambda.is_finite() {
        Ok(lambda)
    } else {
        Err(Error::DegenerateLambda(format!("{what} gives lambda = {lambda}")))
    }
}
