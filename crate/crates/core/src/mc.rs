//! Monte Carlo harness for the series-selection simulation study.
//!
//! Each replication draws one dataset per (n, f) from a seed derived from
//! `(master_seed, n, f, rep)`; every method and basis reuses that dataset.
//! Replications run in parallel and are reduced in replication order, so the
//! report does not depend on the worker count.

use std::fmt::Write as _;

use rand::Rng;
use rayon::prelude::*;

use crate::basis::BasisFamily;
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::random::{derive_seed, fill_gaussian, stream};
use crate::report::{fmt_num, Precision};
use crate::scalar::Real;
use crate::select_series::{
    aggregate_from_fits, candidate_range, lepski_from_fits, mallows_from_fits, vfold_select,
    CandidateFits, LepskiConfig,
};
use crate::series::{cube_root_ceil, error_metrics, EvalGrid, Predictor};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TrueFunction {
    /// `exp(exp(x))`.
    ExpExp,
    /// `sin(2πx)`.
    Sin2Pi,
}

impl TrueFunction {
    pub fn name(self) -> &'static str {
        match self {
            Self::ExpExp => "expexp",
            Self::Sin2Pi => "sin",
        }
    }

    pub fn eval<T: Real>(self, x: T) -> T {
        match self {
            Self::ExpExp => x.exp().exp(),
            Self::Sin2Pi => (T::lit(2.0 * std::f64::consts::PI) * x).sin(),
        }
    }

    fn id(self) -> u64 {
        match self {
            Self::ExpExp => 1,
            Self::Sin2Pi => 2,
        }
    }
}

impl std::str::FromStr for TrueFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "expexp" => Ok(Self::ExpExp),
            "sin" | "sin2pi" => Ok(Self::Sin2Pi),
            other => Err(Error::InvalidArgument(format!("unknown regression function `{other}`"))),
        }
    }
}

/// `Y = f(X) + ε/√(1+X²)`, `X ~ U[0,1]`, `ε ~ N(0,1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DgpSpec {
    pub f: TrueFunction,
    pub n: usize,
}

impl DgpSpec {
    pub const MIN_N: usize = 10;

    pub fn new(f: TrueFunction, n: usize) -> Result<Self> {
        if n < Self::MIN_N {
            return Err(Error::InvalidArgument(format!(
                "sample size {n} is below {}",
                Self::MIN_N
            )));
        }
        Ok(Self { f, n })
    }

    /// Conditional noise variance `1/(1+x²)`.
    pub fn noise_variance(x: f64) -> f64 {
        1.0 / (1.0 + x * x)
    }
}

pub fn simulate_dataset<T: Real>(spec: &DgpSpec, seed: u64) -> Result<Dataset<T>> {
    let mut rng = stream(seed, &[]);
    let xs: Vec<T> = (0..spec.n).map(|_| T::lit(rng.random::<f64>())).collect();
    let mut eps = vec![T::zero(); spec.n];
    fill_gaussian(&mut rng, &mut eps);
    let ys = xs
        .iter()
        .zip(&eps)
        .map(|(&x, &e)| spec.f.eval(x) + e / (T::one() + x * x).sqrt())
        .collect();
    Dataset::from_scalar(xs, ys)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum McMethod {
    Mallows,
    Lepski,
    Cv,
    Aggregation,
}

impl McMethod {
    pub const ALL: [McMethod; 4] = [Self::Mallows, Self::Lepski, Self::Cv, Self::Aggregation];

    pub fn name(self) -> &'static str {
        match self {
            Self::Mallows => "Mallows",
            Self::Lepski => "Lepski",
            Self::Cv => "CV",
            Self::Aggregation => "Aggregation",
        }
    }

    fn id(self) -> u64 {
        self as u64 + 1
    }
}

impl std::str::FromStr for McMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mallows" => Ok(Self::Mallows),
            "lepski" => Ok(Self::Lepski),
            "cv" | "cv5" | "vfold" => Ok(Self::Cv),
            "aggregation" | "agg" => Ok(Self::Aggregation),
            other => Err(Error::InvalidArgument(format!("unknown method `{other}`"))),
        }
    }
}

/// Rule for `k̄ = max K_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KmaxRule {
    /// `⌈n^{1/3}⌉`.
    CubeRootCeil,
    /// Largest integer strictly below `n^{1/3}`.
    CubeRootBelow,
}

impl KmaxRule {
    pub fn kmax(self, n: usize) -> usize {
        let c = cube_root_ceil(n);
        match self {
            Self::CubeRootCeil => c,
            Self::CubeRootBelow => c.saturating_sub(1).max(1),
        }
    }
}

/// Which cross-validated predictor is scored.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CvPredictor {
    /// Full-sample refit at `k̂`.
    FullRefit,
    /// Average of the fold fits at `k̂`.
    FoldAverage,
}

#[derive(Debug, Clone)]
pub struct McConfig {
    pub dgps: Vec<DgpSpec>,
    pub methods: Vec<McMethod>,
    pub bases: Vec<BasisFamily>,
    pub reps: usize,
    pub master_seed: u64,
    pub x0: f64,
    pub kmax_rule: KmaxRule,
    pub cv_folds: usize,
    pub cv_predictor: CvPredictor,
    pub lepski_beta: f64,
    pub lepski_alpha: f64,
    pub lepski_draws: usize,
    pub quadrature_points: usize,
    pub uniform_points: usize,
    /// Worker threads; `None` uses the global pool.
    pub jobs: Option<usize>,
    /// Largest admissible share of failed replications per cell.
    pub max_failure_rate: f64,
}

impl McConfig {
    /// The full study: n ∈ {500, 1000}, both regression functions, all four
    /// methods, both bases.
    pub fn table1(reps: usize, master_seed: u64) -> Self {
        let mut dgps = Vec::new();
        for f in [TrueFunction::ExpExp, TrueFunction::Sin2Pi] {
            for n in [500, 1000] {
                dgps.push(DgpSpec { f, n });
            }
        }
        Self {
            dgps,
            methods: McMethod::ALL.to_vec(),
            bases: vec![BasisFamily::Monomial, BasisFamily::QuadraticSpline],
            reps,
            master_seed,
            x0: 0.5,
            kmax_rule: KmaxRule::CubeRootCeil,
            cv_folds: 5,
            cv_predictor: CvPredictor::FullRefit,
            lepski_beta: 1.0,
            lepski_alpha: 0.05,
            lepski_draws: 1000,
            quadrature_points: EvalGrid::<f64>::QUADRATURE_POINTS,
            uniform_points: EvalGrid::<f64>::UNIFORM_POINTS,
            jobs: None,
            max_failure_rate: 0.01,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.reps == 0 {
            return Err(Error::InvalidArgument("at least one replication is required".into()));
        }
        if self.dgps.is_empty() || self.methods.is_empty() || self.bases.is_empty() {
            return Err(Error::InvalidArgument("empty simulation design".into()));
        }
        if self.jobs == Some(0) {
            return Err(Error::InvalidArgument("jobs must be positive".into()));
        }
        Ok(())
    }
}

pub const METRIC_NAMES: [&str; 4] = ["l2", "l2n", "linf", "lpw"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum McMetric {
    L2 = 0,
    Prediction = 1,
    Uniform = 2,
    Pointwise = 3,
}

impl McMetric {
    pub fn name(self) -> &'static str {
        METRIC_NAMES[self as usize]
    }
}

#[derive(Debug, Clone)]
pub struct McCell {
    pub method: McMethod,
    pub basis: BasisFamily,
    pub dgp: DgpSpec,
    /// Means over successful replications, indexed by [`McMetric`].
    pub mean: [f64; 4],
    /// Monte Carlo standard errors of `mean`.
    pub se: [f64; 4],
    /// Mean selected `k`; `NaN` for aggregation.
    pub mean_k: f64,
    pub reps_used: usize,
    pub failures: usize,
    /// False when failures exceed the configured share.
    pub valid: bool,
}

#[derive(Debug, Clone)]
pub struct McReport {
    pub cells: Vec<McCell>,
    pub reps: usize,
    pub master_seed: u64,
}

impl McReport {
    pub fn cell(&self, method: McMethod, basis: BasisFamily, n: usize, f: TrueFunction) -> Option<&McCell> {
        self.cells
            .iter()
            .find(|c| c.method == method && c.basis == basis && c.dgp.n == n && c.dgp.f == f)
    }

    pub fn value(&self, method: McMethod, basis: BasisFamily, n: usize, f: TrueFunction, m: McMetric) -> Option<f64> {
        self.cell(method, basis, n, f).map(|c| c.mean[m as usize])
    }

    pub fn to_csv(&self, precision: Precision) -> String {
        let mut out =
            String::from("method,basis,n,f,metric,mean,se,mean_k,reps_used,failures,valid\n");
        for c in &self.cells {
            for (m, name) in METRIC_NAMES.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{},{},{}",
                    c.method.name(),
                    c.basis.name(),
                    c.dgp.n,
                    c.dgp.f.name(),
                    name,
                    fmt_num(c.mean[m], precision),
                    fmt_num(c.se[m], precision),
                    fmt_num(c.mean_k, precision),
                    c.reps_used,
                    c.failures,
                    c.valid
                );
            }
        }
        out
    }

    /// One block per (n, f); rows are methods, columns are the four metrics
    /// for each basis.
    pub fn to_table(&self, precision: Precision) -> String {
        let mut blocks: Vec<DgpSpec> = Vec::new();
        let mut bases: Vec<BasisFamily> = Vec::new();
        let mut methods: Vec<McMethod> = Vec::new();
        for c in &self.cells {
            if !blocks.contains(&c.dgp) {
                blocks.push(c.dgp);
            }
            if !bases.contains(&c.basis) {
                bases.push(c.basis);
            }
            if !methods.contains(&c.method) {
                methods.push(c.method);
            }
        }
        let mut header = vec!["method".to_string()];
        for b in &bases {
            let tag = match b {
                BasisFamily::Monomial => "M",
                BasisFamily::QuadraticSpline => "S",
            };
            header.extend(METRIC_NAMES.iter().map(|m| format!("{m}({tag})")));
        }
        let mut out = String::new();
        for dgp in &blocks {
            let mut rows = vec![header.clone()];
            for &m in &methods {
                let mut row = vec![m.name().to_string()];
                for &b in &bases {
                    match self.cell(m, b, dgp.n, dgp.f) {
                        Some(c) if c.valid => {
                            row.extend(c.mean.iter().map(|&v| fmt_num(v, precision)))
                        }
                        Some(_) => row.extend(std::iter::repeat("invalid".to_string()).take(4)),
                        None => row.extend(std::iter::repeat("-".to_string()).take(4)),
                    }
                }
                rows.push(row);
            }
            let widths: Vec<usize> = (0..header.len())
                .map(|j| rows.iter().map(|r| r[j].len()).max().unwrap_or(0))
                .collect();
            let _ = writeln!(out, "n={}; f={}", dgp.n, dgp.f.name());
            for r in &rows {
                let line: Vec<String> = r
                    .iter()
                    .zip(&widths)
                    .enumerate()
                    .map(|(j, (s, &w))| if j == 0 { format!("{s:<w$}") } else { format!("{s:>w$}") })
                    .collect();
                let _ = writeln!(out, "{}", line.join("  ").trim_end());
            }
            out.push('\n');
        }
        out
    }
}

type Outcome = Result<([f64; 4], Option<usize>)>;

fn score(
    g: &(impl Predictor<f64> + ?Sized),
    f: TrueFunction,
    cfg: &McConfig,
    grid: &EvalGrid<f64>,
) -> Result<[f64; 4]> {
    error_metrics(g, &|x: f64| f.eval(x), cfg.x0, grid)
}

/// All (basis, method) outcomes for one dataset, in configuration order.
fn run_replication(cfg: &McConfig, dgp: &DgpSpec, rep: usize) -> Vec<Outcome> {
    let data_seed = derive_seed(cfg.master_seed, &[dgp.n as u64, dgp.f.id(), rep as u64]);
    let mut out = Vec::with_capacity(cfg.bases.len() * cfg.methods.len());
    let d = match simulate_dataset::<f64>(dgp, data_seed) {
        Ok(d) => d,
        Err(e) => {
            let msg = e.to_string();
            for _ in 0..cfg.bases.len() * cfg.methods.len() {
                out.push(Err(Error::InvalidArgument(msg.clone())));
            }
            return out;
        }
    };
    let grid = EvalGrid::with_sizes(
        cfg.quadrature_points,
        cfg.uniform_points,
        d.scalar_covariate().expect("scalar design"),
    );
    let kbar = cfg.kmax_rule.kmax(dgp.n);
    let kn = candidate_range(kbar);
    for (bi, &basis) in cfg.bases.iter().enumerate() {
        let fits = CandidateFits::new(&d, basis, &kn, kbar);
        for &method in &cfg.methods {
            let seed = derive_seed(data_seed, &[bi as u64 + 1, method.id()]);
            let res: Outcome = (|| {
                let cf = fits.as_ref().map_err(|e| Error::InvalidArgument(e.to_string()))?;
                match method {
                    McMethod::Mallows => {
                        let r = mallows_from_fits(cf)?;
                        let k = r.chosen_k.expect("selected");
                        Ok((score(cf.fit_for(k).expect("candidate"), dgp.f, cfg, &grid)?, Some(k)))
                    }
                    McMethod::Lepski => {
                        let lc = LepskiConfig {
                            x0: cfg.x0,
                            beta: cfg.lepski_beta,
                            alpha: cfg.lepski_alpha,
                            draws: cfg.lepski_draws,
                            seed,
                        };
                        let r = lepski_from_fits(cf, &lc)?;
                        let k = r.chosen_k.expect("selected");
                        Ok((score(cf.fit_for(k).expect("candidate"), dgp.f, cfg, &grid)?, Some(k)))
                    }
                    McMethod::Cv => {
                        let o = vfold_select(&d, basis, &kn, cfg.cv_folds, seed)?;
                        let k = o.result.chosen_k;
                        let m = match cfg.cv_predictor {
                            CvPredictor::FullRefit => score(&o.full, dgp.f, cfg, &grid)?,
                            CvPredictor::FoldAverage => score(&o.average, dgp.f, cfg, &grid)?,
                        };
                        Ok((m, k))
                    }
                    McMethod::Aggregation => {
                        let (_, agg) = aggregate_from_fits(cf)?;
                        Ok((score(&agg, dgp.f, cfg, &grid)?, None))
                    }
                }
            })();
            out.push(res);
        }
    }
    out
}

pub fn run_table1(cfg: &McConfig) -> Result<McReport> {
    cfg.validate()?;
    let tasks: Vec<(usize, usize)> = (0..cfg.dgps.len())
        .flat_map(|g| (0..cfg.reps).map(move |r| (g, r)))
        .collect();
    let compute = || -> Vec<Vec<Outcome>> {
        tasks
            .par_iter()
            .map(|&(g, r)| run_replication(cfg, &cfg.dgps[g], r))
            .collect()
    };
    let results = match cfg.jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build()
            .map_err(|e| Error::InvalidArgument(e.to_string()))?
            .install(compute),
        None => compute(),
    };

    let per_dgp = cfg.bases.len() * cfg.methods.len();
    let mut cells = Vec::with_capacity(cfg.dgps.len() * per_dgp);
    for (g, dgp) in cfg.dgps.iter().enumerate() {
        let reps = &results[g * cfg.reps..(g + 1) * cfg.reps];
        for (bi, &basis) in cfg.bases.iter().enumerate() {
            for (mi, &method) in cfg.methods.iter().enumerate() {
                let slot = bi * cfg.methods.len() + mi;
                let mut sum = [0.0; 4];
                let mut sum_sq = [0.0; 4];
                let (mut used, mut failures, mut k_sum, mut k_count) = (0usize, 0usize, 0.0, 0usize);
                for rep in reps {
                    match &rep[slot] {
                        Ok((m, k)) => {
                            used += 1;
                            for j in 0..4 {
                                sum[j] += m[j];
                                sum_sq[j] += m[j] * m[j];
                            }
                            if let Some(k) = k {
                                k_sum += *k as f64;
                                k_count += 1;
                            }
                        }
                        Err(_) => failures += 1,
                    }
                }
                let u = used as f64;
                let mut mean = [f64::NAN; 4];
                let mut se = [f64::NAN; 4];
                if used > 0 {
                    for j in 0..4 {
                        mean[j] = sum[j] / u;
                        if used > 1 {
                            let var = ((sum_sq[j] - u * mean[j] * mean[j]) / (u - 1.0)).max(0.0);
                            se[j] = (var / u).sqrt();
                        }
                    }
                }
                let valid = used > 0 && (failures as f64) <= cfg.max_failure_rate * cfg.reps as f64;
                cells.push(McCell {
                    method,
                    basis,
                    dgp: *dgp,
                    mean,
                    se,
                    mean_k: if k_count > 0 { k_sum / k_count as f64 } else { f64::NAN },
                    reps_used: used,
                    failures,
                    valid,
                });
            }
        }
    }
    Ok(McReport {
        cells,
        reps: cfg.reps,
        master_seed: cfg.master_seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn datasets_are_reproducible() {
        let spec = DgpSpec::new(TrueFunction::Sin2Pi, 50).unwrap();
        let a: Dataset<f64> = simulate_dataset(&spec, 9).unwrap();
        let b: Dataset<f64> = simulate_dataset(&spec, 9).unwrap();
        assert_eq!(a.y(), b.y());
        assert_eq!(a.x(), b.x());
        assert!(a.scalar_covariate().unwrap().iter().all(|&x| (0.0..1.0).contains(&x)));
        assert!(DgpSpec::new(TrueFunction::ExpExp, 9).is_err());
    }

    #[test]
    fn kmax_rules() {
        assert_eq!(KmaxRule::CubeRootCeil.kmax(500), 8);
        assert_eq!(KmaxRule::CubeRootBelow.kmax(500), 7);
        assert_eq!(KmaxRule::CubeRootCeil.kmax(1000), 10);
        assert_eq!(KmaxRule::CubeRootBelow.kmax(1000), 9);
    }

    #[test]
    fn small_run_has_every_cell() {
        let mut cfg = McConfig::table1(3, 5);
        cfg.dgps = vec![DgpSpec { f: TrueFunction::Sin2Pi, n: 60 }];
        cfg.lepski_draws = 500;
        cfg.quadrature_points = 201;
        cfg.uniform_points = 101;
        let rep = run_table1(&cfg).unwrap();
        assert_eq!(rep.cells.len(), 8);
        for c in &rep.cells {
            assert!(c.valid && c.reps_used == 3);
            assert!(c.mean.iter().all(|v| *v >= 0.0));
        }
        let csv = rep.to_csv(Precision::Significant6);
        assert_eq!(csv.lines().count(), 1 + 8 * 4);
        assert!(rep.to_table(Precision::Significant6).contains("Aggregation"));
    }
}
