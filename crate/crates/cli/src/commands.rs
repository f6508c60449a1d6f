use std::path::Path;

use tunesel::basis::BasisFamily;
use tunesel::lasso::{lasso_fit, logit_penalized_fit, SolverConfig};
use tunesel::mc::{run_table1, CvPredictor, DgpSpec, KmaxRule, McConfig, McMethod, TrueFunction};
use tunesel::report::{KvReport, Precision};
use tunesel::select_lambda::{
    bcch_lambda, bootstrap_lambda, brt_lambda, cluster_bcch_lambda, cv_lambda, default_grid,
    glm_bootstrap_after_cv_lambda, panel_bcch_lambda, quantile_pivotal_lambda, sigma2_from_bcch,
    sure_lambda, LambdaRule, PenaltyConfig,
};
use tunesel::select_series::{
    aggregate_predictor, candidate_range, lepski_select, loo_select, mallows_select, ordered_models,
    penalized_model_select, stein_select, validation_select, vfold_select, LepskiConfig, ModelCounts,
    SelectorKind,
};
use tunesel::series::{cube_root_ceil, fit_series};
use tunesel::{load_table, BasisSpec, Dataset64, Error, Predictor, Result, TableSchema};

use crate::{Cli, Command, DataArgs, FitSeriesArgs, LassoArgs, SelectKArgs, SelectLambdaArgs, SimulateArgs};

pub fn run(cli: &Cli) -> Result<()> {
    if let Some(j) = cli.jobs {
        if j == 0 {
            return Err(Error::InvalidArgument("--jobs must be positive".into()));
        }
        // Only fails if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j).build_global();
    }
    let precision = if cli.full_precision {
        Precision::Full
    } else {
        Precision::Significant6
    };
    match &cli.command {
        Command::FitSeries(a) => fit_series_cmd(a, precision),
        Command::SelectK(a) => select_k_cmd(a, precision),
        Command::Lasso(a) => lasso_cmd(a, precision),
        Command::SelectLambda(a) => select_lambda_cmd(a, precision),
        Command::Simulate(a) => simulate_cmd(a, cli.jobs, precision),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|source| Error::Io {
            path: p.to_path_buf(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn schema(a: &DataArgs) -> TableSchema {
    TableSchema {
        x: a.x.clone(),
        ..TableSchema::response(a.y.clone())
    }
}

fn load(a: &DataArgs, schema: &TableSchema) -> Result<Dataset64> {
    load_table(&a.data, schema)
}

fn parse_auto(value: &str, auto: usize, what: &str) -> Result<usize> {
    if value == "auto" {
        return Ok(auto);
    }
    value
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("{what} must be a positive integer or `auto`")))
}

fn fit_series_cmd(a: &FitSeriesArgs, precision: Precision) -> Result<()> {
    let d = load(&a.data, &schema(&a.data))?;
    let spec = BasisSpec::new(a.basis.parse()?, a.k)?;
    let fit = fit_series(&d, &spec)?;
    let mut r = KvReport::new();
    r.text("basis", spec.family.name());
    r.int("k", spec.k as i64);
    r.int("n", d.n() as i64);
    r.num("mse", fit.mse());
    for (j, b) in fit.beta.iter().enumerate() {
        r.num(format!("beta.{j}"), *b);
    }
    for &x in &a.at {
        tunesel::eval_basis(&spec, x)?;
        r.num(format!("fit_at.{}", tunesel::report::fmt_sig6(x)), fit.predict(x));
    }
    emit(a.data.out.as_deref(), &r.render(precision))
}

fn select_k_cmd(a: &SelectKArgs, precision: Precision) -> Result<()> {
    let d = load(&a.data, &schema(&a.data))?;
    let family: BasisFamily = a.basis.parse()?;
    let auto = cube_root_ceil(d.n());
    let kmax = parse_auto(&a.kmax, auto, "--kmax")?;
    let kbar = parse_auto(&a.kbar, auto, "--kbar")?;
    let kn = candidate_range(kmax);
    let method: SelectorKind = a.method.parse()?;
    let mut report = match method {
        SelectorKind::Mallows => mallows_select(&d, family, &kn, kbar)?.to_report(),
        SelectorKind::Stein => stein_select(&d, family, &kn, kbar)?.to_report(),
        SelectorKind::Lepski => {
            let cfg = LepskiConfig {
                x0: a.x0,
                beta: a.beta,
                alpha: a.alpha,
                draws: a.draws,
                seed: a.seed,
            };
            lepski_select(&d, family, &kn, kbar, &cfg)?.to_report()
        }
        SelectorKind::Validation => validation_select(&d, family, &kn, a.seed, a.train_frac)?
            .result
            .to_report(),
        SelectorKind::VFold => vfold_select(&d, family, &kn, a.folds, a.seed)?.result.to_report(),
        SelectorKind::LeaveOneOut => loo_select(&d, family, &kn)?.to_report(),
        SelectorKind::Penalized => {
            let sigma2 = a.sigma2.ok_or_else(|| {
                Error::InvalidArgument("penalized selection needs --sigma2".into())
            })?;
            let models = ordered_models(family, &kn)?;
            penalized_model_select(&d, &models, sigma2, &ModelCounts::Ordered)?.to_report()
        }
        SelectorKind::Aggregation => aggregate_predictor(&d, family, &kn, kbar)?.0.to_report(),
    };
    let mut head = KvReport::new();
    head.text("basis", family.name());
    head.int("n", d.n() as i64);
    head.int("kmax", kmax as i64);
    head.int("kbar", kbar as i64);
    head.int("seed", a.seed as i64);
    report.extend(&head);
    emit(a.data.out.as_deref(), &report.render(precision))
}

fn solver(tol: f64, max_iter: usize) -> SolverConfig<f64> {
    SolverConfig { tol, max_iter }
}

fn fit_report(r: &mut KvReport, fit: &tunesel::LassoFit64) {
    r.int("iterations", fit.iterations as i64);
    r.num("kkt_gap", fit.kkt_gap);
    r.num("objective", fit.objective);
    r.int("support_size", fit.support_size() as i64);
    for (j, b) in fit.beta.iter().enumerate() {
        r.num(format!("beta.{j}"), *b);
    }
}

fn lasso_cmd(a: &LassoArgs, precision: Precision) -> Result<()> {
    let s = TableSchema {
        normalize_columns: a.normalize_columns,
        ..schema(&a.data)
    };
    let d = load(&a.data, &s)?;
    let cfg = solver(a.tol, a.max_iter);
    let fit = if a.logit {
        logit_penalized_fit(&d, a.lambda, &cfg)?
    } else {
        lasso_fit(&d, a.lambda, &cfg)?
    };
    let mut r = KvReport::new();
    r.text("model", if a.logit { "logit" } else { "least-squares" });
    r.num("lambda", fit.lambda);
    fit_report(&mut r, &fit);
    emit(a.data.out.as_deref(), &r.render(precision))
}

fn select_lambda_cmd(a: &SelectLambdaArgs, precision: Precision) -> Result<()> {
    let rule: LambdaRule = a.rule.parse()?;
    let s = TableSchema {
        cluster: a.cluster.clone(),
        unit: a.unit.clone(),
        time: a.time.clone(),
        normalize_columns: a.normalize_columns,
        ..schema(&a.data)
    };
    let d = load(&a.data, &s)?;
    let alpha = match a.alpha.as_str() {
        "auto" => None,
        v => Some(
            v.parse::<f64>()
                .map_err(|_| Error::InvalidArgument("--alpha must be a number or `auto`".into()))?,
        ),
    };
    let pc = PenaltyConfig {
        c: a.c,
        alpha,
        draws: a.draws,
        seed: a.seed,
        solver: solver(a.tol, a.max_iter),
    };
    let grid = if a.grid.is_empty() {
        default_grid(d.n())
    } else {
        a.grid.clone()
    };
    let (result, fit) = match rule {
        LambdaRule::Brt => {
            let sigma = a
                .sigma
                .ok_or_else(|| Error::InvalidArgument("brt needs --sigma".into()))?;
            (brt_lambda(&d, sigma, &pc)?, None)
        }
        LambdaRule::Bcch => bcch_lambda(&d, &pc).map(|(r, f)| (r, Some(f)))?,
        LambdaRule::Bootstrap => bootstrap_lambda(&d, &pc).map(|(r, f)| (r, Some(f)))?,
        LambdaRule::Sure => {
            let sigma2 = match a.sigma2 {
                Some(s) => s,
                None => sigma2_from_bcch(&d, &pc)?,
            };
            sure_lambda(&d, sigma2, &grid, &pc.solver).map(|(r, f)| (r, Some(f)))?
        }
        LambdaRule::CrossValidation => {
            let o = cv_lambda(&d, a.folds, Some(&grid), a.seed, &pc.solver)?;
            let mut r = o.result;
            for (j, b) in o.average_beta.iter().enumerate() {
                r.meta.push((format!("avcv_beta.{j}"), *b));
            }
            (r, Some(o.full_fit))
        }
        LambdaRule::ClusterBcch => cluster_bcch_lambda(&d, &pc).map(|(r, f)| (r, Some(f)))?,
        LambdaRule::PanelBcch => panel_bcch_lambda(&d, &pc).map(|(r, f)| (r, Some(f)))?,
        LambdaRule::QuantilePivotal => (quantile_pivotal_lambda(&d, a.u, &pc)?, None),
        LambdaRule::GlmBootstrapAfterCv => {
            let o = glm_bootstrap_after_cv_lambda(&d, a.folds, Some(&grid), &pc)?;
            (o.result, Some(o.fit))
        }
    };
    let mut r = result.to_report();
    r.int("n", d.n() as i64);
    r.int("p", d.p() as i64);
    if let Some(f) = &fit {
        fit_report(&mut r, f);
    }
    emit(a.data.out.as_deref(), &r.render(precision))
}

fn parse_list<T: std::str::FromStr<Err = Error>>(items: &[String]) -> Result<Vec<T>> {
    items.iter().map(|s| s.parse()).collect()
}

fn simulate_cmd(a: &SimulateArgs, jobs: Option<usize>, precision: Precision) -> Result<()> {
    let mut cfg = McConfig::table1(a.reps, a.seed);
    if !a.table1 {
        let ns = if a.n.is_empty() { vec![500, 1000] } else { a.n.clone() };
        let fs: Vec<TrueFunction> = if a.f.is_empty() {
            vec![TrueFunction::ExpExp, TrueFunction::Sin2Pi]
        } else {
            parse_list(&a.f)?
        };
        cfg.dgps = fs
            .iter()
            .flat_map(|&f| ns.iter().map(move |&n| DgpSpec::new(f, n)))
            .collect::<Result<_>>()?;
        if !a.methods.is_empty() {
            cfg.methods = parse_list::<McMethod>(&a.methods)?;
        }
        if !a.bases.is_empty() {
            cfg.bases = parse_list::<BasisFamily>(&a.bases)?;
        }
    }
    cfg.kmax_rule = match a.kmax_rule.as_str() {
        "ceil" => KmaxRule::CubeRootCeil,
        "below" => KmaxRule::CubeRootBelow,
        other => return Err(Error::InvalidArgument(format!("unknown kmax rule `{other}`"))),
    };
    cfg.lepski_draws = a.draws;
    if a.cv_fold_average {
        cfg.cv_predictor = CvPredictor::FoldAverage;
    }
    cfg.jobs = jobs;
    let report = run_table1(&cfg)?;
    let csv = report.to_csv(precision);
    let table = report.to_table(precision);
    match (&a.out, &a.table_out) {
        (Some(_), None) => {
            emit(a.out.as_deref(), &csv)?;
            emit(None, &table)
        }
        (out, table_out) => {
            emit(out.as_deref(), &csv)?;
            match table_out {
                Some(p) => emit(Some(p), &table),
                None => Ok(()),
            }
        }
    }
}
