mod common;

use common::*;
use tunesel::lasso::LassoProblem;
use tunesel::select_lambda::{
    bcch_lambda, bootstrap_lambda, brt_lambda, cluster_bcch_lambda, cluster_plugin_lambda, cv_lambda,
    default_alpha, glm_bootstrap_after_cv_lambda, multiplier_quantile, panel_bcch_lambda,
    plugin_lambda, quantile_pivotal_lambda, sure_lambda, PenaltyConfig,
};
use tunesel::{Dataset64, Error, Labels, Matrix64, SolverConfig};

const C: f64 = 1.1;

fn sparse_instance(n: usize, p: usize, seed: u64, noise: f64) -> (Mat, Vec<f64>) {
    let mut g = Fixture::new(seed);
    let x: Mat = (0..n).map(|_| (0..p).map(|_| g.normal()).collect()).collect();
    let y = x
        .iter()
        .map(|r| r[0] - 0.5 * r[1 % p] + 0.25 * r[2 % p] + noise * g.normal())
        .collect();
    (x, y)
}

fn data(x: &Mat, y: &[f64]) -> Dataset64 {
    Dataset64::new(matrix_from(x), y.to_vec()).unwrap()
}

/// `max_j √(n⁻¹ Σ_g (Σ_{i∈g} xᵢⱼ eᵢ)²)`, grouping by explicit ids.
fn grouped_moment(x: &Mat, e: &[f64], group: &[usize]) -> f64 {
    let n = x.len();
    let p = x[0].len();
    let g_count = group.iter().max().unwrap() + 1;
    (0..p)
        .map(|j| {
            let mut sums = vec![0.0; g_count];
            for i in 0..n {
                sums[group[i]] += x[i][j] * e[i];
            }
            (sums.iter().map(|s| s * s).sum::<f64>() / n as f64).sqrt()
        })
        .fold(0.0, f64::max)
}

fn iid_moment(x: &Mat, e: &[f64]) -> f64 {
    let ids: Vec<usize> = (0..x.len()).collect();
    grouped_moment(x, e, &ids)
}

fn scale(n: usize, p: usize, alpha: f64) -> f64 {
    2.0 * C / (n as f64).sqrt() * as241(1.0 - alpha / (2.0 * p as f64))
}

fn residuals(x: &[Vec<f64>], y: &[f64], b: &[f64]) -> Vec<f64> {
    x.iter()
        .zip(y)
        .map(|(r, yi)| yi - r.iter().zip(b).map(|(a, c)| a * c).sum::<f64>())
        .collect()
}

#[test]
fn brt_reference_values() {
    let x: Mat = (0..100).map(|i| (0..10).map(|j| if (i * 7 + j * 3) % 2 == 0 { 1.0 } else { -1.0 }).collect()).collect();
    let d = data(&x, &vec![0.0; 100]);
    let pc = PenaltyConfig { alpha: Some(0.05), ..Default::default() };
    let r = brt_lambda(&d, 1.0, &pc).unwrap();
    assert!((as241(1.0 - 0.05 / 20.0) - 2.80703).abs() < 1e-5);
    assert!((r.lambda - 0.617547).abs() < 1e-5);
    assert!((r.lambda - scale(100, 10, 0.05)).abs() < 1e-10);
    assert!((brt_lambda(&d, 2.0, &pc).unwrap().lambda - 2.0 * r.lambda).abs() < 1e-14);

    // Φ⁻¹(1 − α/2) = 1 at α = 2(1 − Φ(1)).
    let alpha = 2.0 * 0.158_655_253_931_457_05;
    assert!((as241(1.0 - alpha / 2.0) - 1.0).abs() < 1e-12);
    let d1 = data(&vec![vec![1.0]; 4], &[0.0; 4]);
    let pc1 = PenaltyConfig { c: 1.0, alpha: Some(alpha), ..Default::default() };
    assert!((brt_lambda(&d1, 1.0, &pc1).unwrap().lambda - 1.0).abs() < 1e-10);
    assert!(matches!(
        brt_lambda(&d1, 1.0, &PenaltyConfig { alpha: Some(1.5), ..Default::default() }),
        Err(Error::InvalidAlpha(_))
    ));
}

#[test]
fn bcch_matches_formula_recomputation() {
    for seed in 0..5 {
        let (x, y) = sparse_instance(120, 15, seed, 1.0);
        let d = data(&x, &y);
        let pc = PenaltyConfig::default();
        let (r, fit) = bcch_lambda(&d, &pc).unwrap();
        let alpha = 0.1 / 120f64.ln();
        assert_eq!(r.alpha, Some(alpha));
        let m0 = iid_moment(&x, &y);
        assert!((r.meta("preliminary_moment").unwrap() - m0).abs() < 1e-10);
        let lambda0 = scale(120, 15, alpha) * m0;
        assert!((r.preliminary_lambda.unwrap() - lambda0).abs() < 1e-10);
        let pilot = LassoProblem::new(d.x(), d.y()).unwrap().solve(lambda0, &pc.solver).unwrap();
        let e = residuals(&x, &y, &pilot.beta);
        let m1 = iid_moment(&x, &e);
        assert!((r.meta("moment").unwrap() - m1).abs() < 1e-10);
        assert!((r.lambda - scale(120, 15, alpha) * m1).abs() < 1e-10);
        assert_eq!(fit.lambda, r.lambda);
    }
}

#[test]
fn bcch_final_lambda_usually_shrinks() {
    let mut shrunk = 0;
    for seed in 0..200 {
        let (x, y) = sparse_instance(100, 10, 1000 + seed, 1.0);
        let (r, _) = bcch_lambda(&data(&x, &y), &PenaltyConfig::default()).unwrap();
        if r.lambda <= r.preliminary_lambda.unwrap() {
            shrunk += 1;
        }
    }
    assert!(shrunk as f64 / 200.0 >= 0.95, "{shrunk}/200");
}

#[test]
fn bcch_and_brt_agree_under_homoskedastic_noise() {
    let mut close = 0;
    for seed in 0..200 {
        // Pure noise: the pilot has no signal to shrink, so both rules see e.
        let mut g = Fixture::new(5000 + seed);
        let mut x: Mat = (0..500).map(|_| (0..20).map(|_| g.normal()).collect()).collect();
        let y: Vec<f64> = (0..500).map(|_| g.normal()).collect();
        for j in 0..20 {
            let rms = (x.iter().map(|r| r[j] * r[j]).sum::<f64>() / 500.0).sqrt();
            x.iter_mut().for_each(|r| r[j] /= rms);
        }
        let d = data(&x, &y);
        let pc = PenaltyConfig::default();
        let (b, _) = bcch_lambda(&d, &pc).unwrap();
        let brt = brt_lambda(&d, 1.0, &pc).unwrap();
        if ((b.lambda - brt.lambda) / brt.lambda).abs() <= 0.25 {
            close += 1;
        }
    }
    assert_eq!(close, 200);
}

#[test]
fn bootstrap_quantile_matches_half_normal() {
    let mut g = Fixture::new(77);
    let n = 50;
    let x = Matrix64::from_rows(&(0..n).map(|_| vec![g.normal()]).collect::<Vec<_>>());
    let e: Vec<f64> = (0..n).map(|_| g.normal()).collect();
    let sd = ((0..n).map(|i| (x.get(i, 0) * e[i]).powi(2)).sum::<f64>() / n as f64).sqrt();
    let draws = 100_000;
    for level in [0.9, 0.95] {
        let q = multiplier_quantile(&x, &e, level, draws, 3).unwrap();
        let exact = sd * as241((1.0 + level) / 2.0);
        // Quantile standard error: √(ℓ(1−ℓ)/B) / density of |N(0, sd²)| at the quantile.
        let z = exact / sd;
        let density = 2.0 * (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt() / sd;
        let se = (level * (1.0 - level) / draws as f64).sqrt() / density;
        assert!((q - exact).abs() < 4.0 * se, "level {level}: {q} vs {exact} (se {se})");
    }
}

#[test]
fn bootstrap_rule_recomputes_from_its_quantile() {
    let (x, y) = sparse_instance(150, 12, 9, 1.0);
    let d = data(&x, &y);
    let pc = PenaltyConfig { seed: 4, ..Default::default() };
    let (r, fit) = bootstrap_lambda(&d, &pc).unwrap();
    let q = r.meta("bootstrap_quantile").unwrap();
    assert!((r.lambda - 2.0 * C / 150f64.sqrt() * q).abs() < 1e-12);
    assert_eq!(r.quantile_draws, Some(1000));
    assert!(fit.kkt_gap <= 1e-8);
    let (r2, _) = bootstrap_lambda(&d, &pc).unwrap();
    assert_eq!(r.lambda.to_bits(), r2.lambda.to_bits());
    let strict = PenaltyConfig { alpha: Some(0.01), ..pc };
    let loose = PenaltyConfig { alpha: Some(0.10), ..pc };
    assert!(bootstrap_lambda(&d, &strict).unwrap().0.lambda >= bootstrap_lambda(&d, &loose).unwrap().0.lambda);
    assert!(bootstrap_lambda(&d, &PenaltyConfig { draws: 100, ..pc }).is_err());
    assert!(matches!(
        bootstrap_lambda(&data(&x, &vec![0.0; 150]), &pc),
        Err(Error::DegenerateLambda(_))
    ));
}

#[test]
fn bootstrap_is_below_bcch_on_correlated_designs() {
    let (n, p, rho) = (500, 50, 0.8f64);
    let seeds = 100;
    let mut below = 0;
    for seed in 0..seeds {
        let mut g = Fixture::new(9000 + seed);
        let x: Mat = (0..n)
            .map(|_| {
                let common = g.normal();
                (0..p).map(|_| rho.sqrt() * common + (1.0 - rho).sqrt() * g.normal()).collect()
            })
            .collect();
        let y: Vec<f64> = x.iter().map(|r| r[0] - r[1] + g.normal()).collect();
        let d = data(&x, &y);
        let pc = PenaltyConfig { seed, ..Default::default() };
        let (b, _) = bcch_lambda(&d, &pc).unwrap();
        let (bs, _) = bootstrap_lambda(&d, &pc).unwrap();
        if bs.lambda <= b.lambda {
            below += 1;
        }
    }
    assert!(below as f64 >= 0.8 * seeds as f64, "{below}/{seeds}");
}

#[test]
fn sure_criterion_recomputes_from_refits() {
    let (x, y) = sparse_instance(30, 3, 41, 0.7);
    let d = data(&x, &y);
    let cfg = SolverConfig::default();
    let threshold = LassoProblem::new(d.x(), d.y()).unwrap().zero_threshold();
    let grid: Vec<f64> = (0..50).map(|i| threshold * 1.2 * 0.9f64.powi(i)).collect();
    for sigma2 in [0.5, 1.0] {
        let (r, fit) = sure_lambda(&d, sigma2, &grid, &cfg).unwrap();
        let mut crit = Vec::new();
        for &l in &grid {
            let f = LassoProblem::new(d.x(), d.y()).unwrap().solve(l, &cfg).unwrap();
            let e = residuals(&x, &y, &f.beta);
            let mse = e.iter().map(|v| v * v).sum::<f64>() / 30.0;
            let nnz = f.beta.iter().filter(|&&b| b != 0.0).count() as f64;
            crit.push(mse + 2.0 * sigma2 * nnz / 30.0 - sigma2);
        }
        let best = (0..50).fold(0, |b, i| if crit[i] < crit[b] { i } else { b });
        assert_eq!(r.lambda, grid[best]);
        assert_eq!(fit.lambda, grid[best]);
        for ((_, c), o) in r.per_grid.as_ref().unwrap().iter().zip(&crit) {
            assert!((c - o).abs() < 1e-12);
        }
    }
    let (r, _) = sure_lambda(&d, 0.4, &[threshold * 2.0], &cfg).unwrap();
    let ms = y.iter().map(|v| v * v).sum::<f64>() / 30.0;
    assert!((r.per_grid.unwrap()[0].1 - (ms - 0.4)).abs() < 1e-12);
}

#[test]
fn cv_with_one_row_per_fold_matches_literal_refits() {
    let (x, y) = sparse_instance(12, 2, 51, 0.5);
    let d = data(&x, &y);
    let grid = [0.01, 0.05, 0.2, 0.6];
    let cfg = SolverConfig { tol: 1e-13, max_iter: 100_000 };
    let out = cv_lambda(&d, 12, Some(&grid), 3, &cfg).unwrap();
    for (g, &lambda) in grid.iter().enumerate() {
        let mut sse = 0.0;
        for i in 0..12 {
            let xk: Mat = (0..12).filter(|&j| j != i).map(|j| x[j].clone()).collect();
            let yk: Vec<f64> = (0..12).filter(|&j| j != i).map(|j| y[j]).collect();
            let b = lasso_ista(&xk, &yk, lambda);
            sse += residuals(&[x[i].clone()], &[y[i]], &b)[0].powi(2);
        }
        let got = out.result.per_grid.as_ref().unwrap()[g].1;
        assert!((got - sse).abs() < 1e-8, "lambda {lambda}: {got} vs {sse}");
    }
}

#[test]
fn cv_outputs_fold_average_and_zero_fit_criterion() {
    let (x, y) = sparse_instance(40, 4, 61, 1.0);
    let d = data(&x, &y);
    let cfg = SolverConfig::default();
    let out = cv_lambda(&d, 5, None, 8, &cfg).unwrap();
    assert_eq!(out.result.per_grid.as_ref().unwrap().len(), 100);
    for j in 0..4 {
        let mean = out.fold_betas.iter().map(|b| b[j]).sum::<f64>() / 5.0;
        assert!((out.average_beta[j] - mean).abs() < 1e-15);
    }
    assert_eq!(out.full_fit.lambda, out.result.lambda);
    let huge = [1e6];
    let z = cv_lambda(&d, 5, Some(&huge), 8, &cfg).unwrap();
    let ss: f64 = y.iter().map(|v| v * v).sum();
    assert!((z.result.per_grid.unwrap()[0].1 - ss).abs() < 1e-10);
    assert_eq!(z.result.lambda, 1e6);
    assert!(cv_lambda(&d, 1, None, 8, &cfg).is_err());
    assert!(cv_lambda(&d, 5, Some(&[]), 8, &cfg).is_err());
}

fn labels(ids: &[usize], prefix: &str) -> Labels {
    let names: Vec<String> = ids.iter().map(|i| format!("{prefix}{i}")).collect();
    Labels::new(&names)
}

#[test]
fn cluster_rule_matches_group_recomputation() {
    let (x, y) = sparse_instance(90, 6, 71, 1.0);
    let group: Vec<usize> = (0..90).map(|i| (i * 7) % 15).collect();
    let d = data(&x, &y).with_clusters(labels(&group, "g")).unwrap();
    let pc = PenaltyConfig::default();
    let (r, _) = cluster_bcch_lambda(&d, &pc).unwrap();
    let alpha = default_alpha(90, 6);
    let m0 = grouped_moment(&x, &y, &group);
    let lambda0 = scale(90, 6, alpha) * m0;
    assert!((r.preliminary_lambda.unwrap() - lambda0).abs() < 1e-10);
    let pilot = LassoProblem::new(d.x(), d.y()).unwrap().solve(lambda0, &pc.solver).unwrap();
    let m1 = grouped_moment(&x, &residuals(&x, &y, &pilot.beta), &group);
    assert!((r.lambda - scale(90, 6, alpha) * m1).abs() < 1e-10);
}

#[test]
fn singleton_clusters_reproduce_iid_rule_bitwise() {
    let (x, y) = sparse_instance(60, 5, 73, 1.0);
    let ids: Vec<usize> = (0..60).collect();
    let d = data(&x, &y).with_clusters(labels(&ids, "c")).unwrap();
    let pc = PenaltyConfig::default();
    assert_eq!(
        bcch_lambda(&d, &pc).unwrap().0.lambda.to_bits(),
        cluster_bcch_lambda(&d, &pc).unwrap().0.lambda.to_bits()
    );
}

#[test]
fn duplicated_clusters_scale_by_root_l() {
    let (x, y) = sparse_instance(50, 4, 79, 1.0);
    let xd: Mat = x.iter().flat_map(|r| std::iter::repeat(r.clone()).take(4)).collect();
    let yd: Vec<f64> = y.iter().flat_map(|&v| [v; 4]).collect();
    let group: Vec<usize> = (0..200).map(|i| i / 4).collect();
    let d = data(&xd, &yd).with_clusters(labels(&group, "u")).unwrap();
    let (_, pilot) = bcch_lambda(&d, &PenaltyConfig::default()).unwrap();
    let e = residuals(&xd, &yd, &pilot.beta);
    let alpha = default_alpha(200, 4);
    let pooled = plugin_lambda(d.x(), &e, C, alpha);
    let clustered = cluster_plugin_lambda(d.x(), &e, d.cluster().unwrap(), C, alpha);
    assert!((clustered / pooled - 2.0).abs() < 1e-10);
}

#[test]
fn panel_rule_matches_hand_rolled_display() {
    let (units, periods, p) = (100, 4, 5);
    let n = units * periods;
    let mut g = Fixture::new(83);
    let effect: Vec<f64> = (0..units).map(|_| 2.0 * g.normal()).collect();
    let x: Mat = (0..n).map(|r| (0..p).map(|_| g.normal() + effect[r / periods]).collect()).collect();
    let y: Vec<f64> = (0..n).map(|r| x[r][0] - x[r][2] + effect[r / periods] + g.normal()).collect();
    let unit: Vec<usize> = (0..n).map(|r| r / periods).collect();
    let time: Vec<usize> = (0..n).map(|r| r % periods).collect();
    let d = data(&x, &y).with_panel(labels(&unit, "i"), labels(&time, "t")).unwrap();

    let demean = |v: &dyn Fn(usize) -> f64| -> Vec<f64> {
        (0..n)
            .map(|r| {
                let u = r / periods;
                v(r) - (0..periods).map(|t| v(u * periods + t)).sum::<f64>() / periods as f64
            })
            .collect()
    };
    let yt = demean(&|r| y[r]);
    let cols: Vec<Vec<f64>> = (0..p).map(|j| demean(&|r| x[r][j])).collect();
    let xt: Mat = (0..n).map(|r| (0..p).map(|j| cols[j][r]).collect()).collect();

    let pc = PenaltyConfig::default();
    let (r, _) = panel_bcch_lambda(&d, &pc).unwrap();
    let alpha = default_alpha(n, p);
    let lambda0 = scale(n, p, alpha) * grouped_moment(&xt, &yt, &unit);
    assert!((r.preliminary_lambda.unwrap() - lambda0).abs() < 1e-10);
    let pilot = LassoProblem::new(&matrix_from(&xt), &yt).unwrap().solve(lambda0, &pc.solver).unwrap();
    let lambda = scale(n, p, alpha) * grouped_moment(&xt, &residuals(&xt, &yt, &pilot.beta), &unit);
    assert!((r.lambda - lambda).abs() < 1e-10);
}

#[test]
fn panel_rule_rejects_degenerate_panels() {
    let (x, y) = sparse_instance(6, 2, 1, 1.0);
    let units: Vec<usize> = (0..6).collect();
    let d = data(&x, &y).with_panel(labels(&units, "i"), labels(&[0; 6], "t")).unwrap();
    assert!(matches!(panel_bcch_lambda(&d, &PenaltyConfig::default()), Err(Error::SingleTimePeriod)));

    // Two identical periods per unit: everything demeans to zero.
    let xr: Mat = (0..6).map(|r| x[r / 2].clone()).collect();
    let yr: Vec<f64> = (0..6).map(|r| y[r / 2]).collect();
    let unit: Vec<usize> = (0..6).map(|r| r / 2).collect();
    let time: Vec<usize> = (0..6).map(|r| r % 2).collect();
    let d = data(&xr, &yr).with_panel(labels(&unit, "i"), labels(&time, "t")).unwrap();
    assert!(matches!(panel_bcch_lambda(&d, &PenaltyConfig::default()), Err(Error::DegenerateLambda(_))));
}

/// `P(|2K − n|/√n ≤ t)` for `K ~ Bin(n, 1/2)`.
fn sign_sum_cdf(n: usize, t: f64) -> f64 {
    let mut binom = 1.0f64;
    let mut total = 0.0;
    for k in 0..=n {
        if k > 0 {
            binom *= (n - k + 1) as f64 / k as f64;
        }
        if ((2 * k) as f64 - n as f64).abs() / (n as f64).sqrt() <= t + 1e-12 {
            total += binom;
        }
    }
    total / 2f64.powi(n as i32)
}

#[test]
fn pivotal_quantile_matches_enumeration() {
    let d = data(&vec![vec![1.0]; 10], &[0.0; 10]);
    for alpha in [0.05, 0.2] {
        let pc = PenaltyConfig { c: 1.0, alpha: Some(alpha), draws: 100_000, seed: 2, ..Default::default() };
        let r = quantile_pivotal_lambda(&d, 0.5, &pc).unwrap();
        let q = r.meta("simulated_quantile").unwrap();
        assert!((r.lambda - q / 10f64.sqrt()).abs() < 1e-12);
        let level = 1.0 - alpha;
        let se = (level * (1.0 - level) / 100_000.0).sqrt();
        assert!(sign_sum_cdf(10, q) >= level - 2.0 * se);
        assert!(sign_sum_cdf(10, q - 1e-9) <= level + 2.0 * se);
    }
    let pc = PenaltyConfig { draws: 999, ..Default::default() };
    assert!(quantile_pivotal_lambda(&d, 0.5, &pc).is_err());
    assert!(quantile_pivotal_lambda(&d, 1.0, &PenaltyConfig::default()).is_err());
}

#[test]
fn pivotal_quantile_is_monotone_in_level() {
    let (x, y) = sparse_instance(40, 3, 5, 1.0);
    let d = data(&x, &y);
    let mut last = 0.0;
    for alpha in [0.3, 0.1, 0.05, 0.01] {
        let pc = PenaltyConfig { alpha: Some(alpha), seed: 6, ..Default::default() };
        let l = quantile_pivotal_lambda(&d, 0.3, &pc).unwrap().lambda;
        assert!(l >= last);
        last = l;
    }
}

fn binary_instance(n: usize, p: usize, seed: u64) -> (Mat, Vec<f64>) {
    let mut g = Fixture::new(seed);
    let x: Mat = (0..n).map(|_| (0..p).map(|_| g.normal()).collect()).collect();
    let y = x
        .iter()
        .map(|r| if g.uniform() < 1.0 / (1.0 + (-(1.5 * r[0] - r[1])).exp()) { 1.0 } else { 0.0 })
        .collect();
    (x, y)
}

#[test]
fn glm_rule_uses_out_of_fold_scores() {
    let (x, y) = binary_instance(120, 6, 3);
    let d = data(&x, &y);
    let grid: Vec<f64> = (0..15).map(|i| 0.3 * 0.75f64.powi(i)).collect();
    let pc = PenaltyConfig { seed: 12, ..Default::default() };
    let out = glm_bootstrap_after_cv_lambda(&d, 5, Some(&grid), &pc).unwrap();
    let q = out.result.meta("bootstrap_quantile").unwrap();
    assert!((out.result.lambda - C / 120f64.sqrt() * q).abs() < 1e-12);
    // Each score comes from the fold fit that held the row out.
    let cfg = SolverConfig::default();
    for fold in &out.folds {
        let train: Vec<usize> = (0..120).filter(|i| !fold.contains(i)).collect();
        let xt = matrix_from(&train.iter().map(|&i| x[i].clone()).collect());
        let yt: Vec<f64> = train.iter().map(|&i| y[i]).collect();
        let fit = tunesel::lasso::logit_fit_xy(&xt, &yt, out.cv_lambda, &cfg).unwrap();
        for &i in fold {
            let eta: f64 = x[i].iter().zip(&fit.beta).map(|(a, b)| a * b).sum();
            let s = 1.0 / (1.0 + (-eta).exp()) - y[i];
            assert!((out.scores[i] - s).abs() < 1e-6);
        }
    }
    let again = glm_bootstrap_after_cv_lambda(&d, 5, Some(&grid), &pc).unwrap();
    assert_eq!(out.result.lambda.to_bits(), again.result.lambda.to_bits());
    let other = glm_bootstrap_after_cv_lambda(&d, 5, Some(&grid), &PenaltyConfig { seed: 13, ..pc }).unwrap();
    assert_ne!(out.scores, other.scores);
}

#[test]
fn glm_bootstrap_with_fixed_scores_is_half_normal() {
    let mut g = Fixture::new(5);
    let x = Matrix64::from_rows(&(0..40).map(|_| vec![1.0 + g.uniform()]).collect::<Vec<_>>());
    let s: Vec<f64> = (0..40).map(|_| g.uniform() - 0.5).collect();
    let sd = ((0..40).map(|i| (x.get(i, 0) * s[i]).powi(2)).sum::<f64>() / 40.0).sqrt();
    let q = multiplier_quantile(&x, &s, 0.95, 100_000, 8).unwrap();
    let exact = sd * as241(0.975);
    let density = 2.0 * (-0.5 * 1.959964f64.powi(2)).exp() / (2.0 * std::f64::consts::PI).sqrt() / sd;
    let se = (0.95f64 * 0.05 / 100_000.0).sqrt() / density;
    assert!((q - exact).abs() < 4.0 * se);
    assert_eq!(multiplier_quantile(&x, &vec![0.0; 40], 0.95, 500, 1).unwrap(), 0.0);
}
