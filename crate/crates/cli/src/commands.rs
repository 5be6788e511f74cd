//! Command implementations: price, optimize-grid, simulate, reproduce.

use std::path::Path;

use vohedge::grid_opt::{optimize_b, optimize_nonparametric, parametric_grid};
use vohedge::hedging_error::{bs_delta_coeffs, deterministic_strategy_error, j0_total};
use vohedge::mc_oracle::{simulate_hedge, simulate_paths, Strategy};
use vohedge::payoff_measures::{call_measure, digital_measure, discretize, DiscretizedMeasure};
use vohedge::pii_models::{
    discretize_model, electricity_standard, nig_standard, ContinuousModel, ElectricityParams,
    TradingGrid,
};

use crate::config::RunConfig;
use crate::output::{cells, g10, Csv, CsvCell::*};
use crate::reference;
use crate::CliError;

const S0: f64 = 100.0;
const STRIKE: f64 = 99.0;
const MATURITY: f64 = 0.25;

fn join_dates(grid: &TradingGrid) -> String {
    grid.dates().iter().map(|t| g10(*t)).collect::<Vec<_>>().join(";")
}

pub fn price(cfg: &RunConfig, out: Option<&Path>) -> Result<(), CliError> {
    let model = cfg.model()?;
    let grid = cfg.concrete_grid()?;
    let table = discretize_model(&model, &grid)?;
    let d = cfg.discretized()?;
    let rep = j0_total(&table, &d, cfg.market.s0)?;
    let mut csv = Csv::new(&["v0", "j0", "std", "n", "b", "dates"]);
    let b = match cfg.grid.kind.as_str() {
        "parametric" => cfg.grid.b.map(g10).unwrap_or_default(),
        "uniform" => g10(1.0),
        _ => String::new(),
    };
    csv.row(&[
        g10(rep.v0),
        g10(rep.j0),
        g10(rep.std),
        grid.n_intervals().to_string(),
        b,
        join_dates(&grid),
    ]);
    csv.emit(out)
}

pub fn optimize_grid(
    cfg: &RunConfig,
    out: Option<&Path>,
    sweep: Option<(f64, f64, usize)>,
) -> Result<(), CliError> {
    let model = cfg.model()?;
    let full = cfg.discretized()?;
    let objective = cfg.objective_measure()?;
    let (n, t, s0) = (cfg.grid.n, cfg.grid.maturity, cfg.market.s0);

    if let Some((lo, hi, steps)) = sweep {
        let mut csv = Csv::new(&["b", "j0", "std", "v0"]);
        for i in 0..steps {
            let b = lo + (hi - lo) * i as f64 / (steps.max(2) - 1) as f64;
            let grid = parametric_grid(b, n, t)?;
            let rep = j0_total(&discretize_model(&model, &grid)?, &full, s0)?;
            csv.row(&cells(&[Num(b), Num(rep.j0), Num(rep.std), Num(rep.v0)]));
        }
        return csv.emit(out);
    }

    let opt = optimize_b(&model, &objective, n, t, s0)?;
    let mut csv = Csv::new(&["kind", "b_star", "j0_star", "std_star", "v0_star", "evals", "converged", "dates"]);
    let rep = j0_total(&discretize_model(&model, &opt.grid)?, &full, s0)?;
    csv.row(&[
        "parametric".into(),
        g10(opt.b_star),
        g10(rep.j0),
        g10(rep.std),
        g10(rep.v0),
        opt.iterations.to_string(),
        opt.converged.to_string(),
        join_dates(&opt.grid),
    ]);
    if cfg.grid.kind == "optimize-dates" {
        let coarse = {
            let mut m = cfg.measure()?;
            for contour in &mut m.contours {
                contour.truncation = contour.truncation.min(150.0);
            }
            let panels = if cfg.payoff.kind == "digital" { 32 } else { 16 };
            discretize(&m, panels, 8)
        };
        let np = optimize_nonparametric(&model, &coarse, s0, &opt.grid, 200)?;
        let mut rep_np = j0_total(&discretize_model(&model, &np.grid)?, &full, s0)?;
        let mut grid_np = np.grid;
        if rep_np.j0 > rep.j0 {
            // the parametric optimum stays an admissible candidate
            grid_np = opt.grid.clone();
            rep_np = rep;
        }
        csv.row(&[
            "nonparametric".into(),
            String::new(),
            g10(rep_np.j0),
            g10(rep_np.std),
            g10(rep_np.v0),
            np.iterations.to_string(),
            np.converged.to_string(),
            join_dates(&grid_np),
        ]);
    }
    csv.emit(out)
}

pub fn simulate(cfg: &RunConfig, out: Option<&Path>, seed: Option<u64>) -> Result<(), CliError> {
    let model = cfg.model()?;
    let grid = cfg.concrete_grid()?;
    let table = discretize_model(&model, &grid)?;
    let d = cfg.discretized()?;
    let rep = j0_total(&table, &d, cfg.market.s0)?;
    let batch = simulate_paths(
        &model,
        &grid,
        cfg.market.s0,
        cfg.mc.n_paths,
        seed.unwrap_or(cfg.mc.seed),
    )?;
    let mut csv = Csv::new(&[
        "strategy", "n_paths", "mean_error", "se_mean", "error_variance", "se_variance",
        "analytic_j0", "analytic_v0",
    ]);
    let (bs, v0_bs) = bs_delta_coeffs(&table, &d, cfg.market.s0)?;
    for (name, strategy, capital) in [
        ("vo", Strategy::VarianceOptimal, rep.v0),
        ("fs-pure", Strategy::FsPure, rep.v0),
        ("bs-delta", Strategy::Deterministic(&bs), v0_bs),
        ("none", Strategy::Unhedged, rep.v0),
    ] {
        let emp = simulate_hedge(&batch, strategy, &table, &d, capital)?;
        csv.row(&[
            name.into(),
            emp.n_paths.to_string(),
            g10(emp.mean_error),
            g10(emp.se_mean),
            g10(emp.error_variance),
            g10(emp.se_variance),
            g10(rep.j0),
            g10(rep.v0),
        ]);
    }
    csv.emit(out)
}

fn digital_objective() -> DiscretizedMeasure {
    let mut m = digital_measure(STRIKE, 0.5).expect("valid digital");
    m.contours[0].truncation = 150.0;
    discretize(&m, 48, 12)
}

fn digital_coarse() -> DiscretizedMeasure {
    let mut m = digital_measure(STRIKE, 0.5).expect("valid digital");
    m.contours[0].truncation = 150.0;
    discretize(&m, 32, 8)
}

fn call_objective() -> DiscretizedMeasure {
    let mut m = call_measure(STRIKE, 0.5).expect("valid call");
    m.contours[0].truncation = 60.0;
    discretize(&m, 24, 12)
}

fn call_coarse() -> DiscretizedMeasure {
    let mut m = call_measure(STRIKE, 0.5).expect("valid call");
    m.contours[0].truncation = 60.0;
    discretize(&m, 16, 8)
}

fn rel_dev(computed: f64, reference: f64) -> f64 {
    computed / reference - 1.0
}

pub fn reproduce(
    table: Option<u32>,
    figure: Option<u32>,
    out: Option<&Path>,
) -> Result<(), CliError> {
    match (table, figure) {
        (Some(k), None) => reproduce_table(k, out),
        (None, Some(k)) => reproduce_figure(k, out),
        _ => Err(CliError::Config("pass exactly one of --table 1..4 or --figure 1..6".into())),
    }
}

fn reproduce_table(k: u32, out: Option<&Path>) -> Result<(), CliError> {
    match k {
        1 => {
            let mut csv = Csv::new(&["c", "alpha", "alpha_ref", "kurtosis", "kurtosis_ref", "rel_dev"]);
            let p = nig_standard();
            for (c, alpha_ref, kurt_ref) in reference::TABLE1 {
                let q = p.rescale(c)?;
                let kurt = q.moments().excess_kurtosis;
                csv.row(&cells(&[
                    Num(c), Num(q.alpha), Num(alpha_ref), Num(kurt), Num(kurt_ref),
                    Num(rel_dev(kurt, kurt_ref)),
                ]));
            }
            csv.emit(out)
        }
        2 => {
            let full = vohedge::payoff_measures::discretize_default(
                &digital_measure(STRIKE, 0.5)?,
            );
            let objective = digital_objective();
            let coarse = digital_coarse();
            let mut csv = Csv::new(&[
                "c", "b_star", "b_star_ref", "std_uniform", "std_uniform_ref", "dev_uniform",
                "std_bstar", "std_bstar_ref", "dev_bstar", "std_star", "std_star_ref", "dev_star",
                "v0_uniform", "v0_uniform_ref", "v0_star", "v0_star_ref",
            ]);
            for row in &reference::TABLE2 {
                let model = ContinuousModel::NigLevy(nig_standard().rescale(row.c)?);
                let uniform = TradingGrid::uniform(12, MATURITY);
                let rep_uni = j0_total(&discretize_model(&model, &uniform)?, &full, S0)?;
                let opt = optimize_b(&model, &objective, 12, MATURITY, S0)?;
                let rep_bst = j0_total(&discretize_model(&model, &opt.grid)?, &full, S0)?;
                let np = optimize_nonparametric(&model, &coarse, S0, &opt.grid, 200)?;
                let mut rep_np = j0_total(&discretize_model(&model, &np.grid)?, &full, S0)?;
                if rep_np.j0 > rep_bst.j0 {
                    rep_np = rep_bst.clone();
                }
                csv.row(&cells(&[
                    Num(row.c),
                    Num(opt.b_star), Num(row.b_star),
                    Num(rep_uni.std), Num(row.std_uniform), Num(rel_dev(rep_uni.std, row.std_uniform)),
                    Num(rep_bst.std), Num(row.std_bstar), Num(rel_dev(rep_bst.std, row.std_bstar)),
                    Num(rep_np.std), Num(row.std_star), Num(rel_dev(rep_np.std, row.std_star)),
                    Num(rep_uni.v0), Num(row.v0_uniform),
                    Num(rep_np.v0), Num(row.v0_star),
                ]));
            }
            csv.emit(out)
        }
        3 => {
            let full = vohedge::payoff_measures::discretize_default(&call_measure(STRIKE, 0.5)?);
            let objective = call_objective();
            let model = ContinuousModel::Electricity(electricity_standard());
            let mut csv = Csv::new(&[
                "n", "b_star", "b_star_ref", "std_vo", "std_vo_ref", "dev_vo",
                "std_bs", "std_bs_ref", "dev_bs", "v0", "v0_ref",
            ]);
            for row in &reference::TABLE3 {
                let uniform = TradingGrid::uniform(row.n, MATURITY);
                let table = discretize_model(&model, &uniform)?;
                let rep = j0_total(&table, &full, S0)?;
                let (bs, v0_bs) = bs_delta_coeffs(&table, &full, S0)?;
                let (_, var_bs) = deterministic_strategy_error(&table, &full, &bs, v0_bs, S0)?;
                let opt = optimize_b(&model, &objective, row.n, MATURITY, S0)?;
                csv.row(&cells(&[
                    Int(row.n as i64),
                    Num(opt.b_star), Num(row.b_star),
                    Num(rep.std), Num(row.std_vo_uniform), Num(rel_dev(rep.std, row.std_vo_uniform)),
                    Num(var_bs.sqrt()), Num(row.std_bs_uniform), Num(rel_dev(var_bs.sqrt(), row.std_bs_uniform)),
                    Num(rep.v0), Num(row.v0_uniform),
                ]));
            }
            csv.emit(out)
        }
        4 => {
            let e = electricity_standard();
            let v1 = e.driver.moments().variance;
            let target =
                v1 * e.sigma * e.sigma * (1.0 - (-2.0 * 3.0 * MATURITY).exp()) / (2.0 * 3.0);
            let lambdas: Vec<f64> = reference::TABLE4.iter().map(|(l, _)| *l).collect();
            let pairs = vohedge::grid_opt::lambda_sigma_pairs(&lambdas, MATURITY, target, v1)?;
            let mut csv = Csv::new(&["lambda", "sigma", "sigma_ref", "rel_dev"]);
            for ((lam, sigma), (_, sigma_ref)) in pairs.iter().zip(reference::TABLE4) {
                csv.row(&cells(&[Num(*lam), Num(*sigma), Num(sigma_ref), Num(rel_dev(*sigma, sigma_ref))]));
            }
            csv.emit(out)
        }
        other => Err(CliError::Config(format!("unknown table {other}; use 1..4"))),
    }
}

fn reproduce_figure(k: u32, out: Option<&Path>) -> Result<(), CliError> {
    match k {
        1 => {
            // rebalancing-date sequences for a sweep of b, N = 12
            let mut header = vec!["b".to_string()];
            header.extend((0..=12).map(|i| format!("t{i}")));
            let mut csv = Csv::new(&header.iter().map(String::as_str).collect::<Vec<_>>());
            for i in 1..=10 {
                let b = i as f64 / 10.0;
                let grid = parametric_grid(b, 12, MATURITY)?;
                let mut row = vec![g10(b)];
                row.extend(grid.dates().iter().map(|t| g10(*t)));
                csv.row(&row);
            }
            csv.emit(out)
        }
        2 => {
            // optimal grids per tail width, digital N = 12
            let mut header = vec!["c".to_string(), "kind".to_string()];
            header.extend((0..=12).map(|i| format!("t{i}")));
            let mut csv = Csv::new(&header.iter().map(String::as_str).collect::<Vec<_>>());
            let objective = digital_objective();
            let coarse = digital_coarse();
            for row in &reference::TABLE2 {
                let model = ContinuousModel::NigLevy(nig_standard().rescale(row.c)?);
                let opt = optimize_b(&model, &objective, 12, MATURITY, S0)?;
                let mut cells_row = vec![g10(row.c), "parametric".into()];
                cells_row.extend(opt.grid.dates().iter().map(|t| g10(*t)));
                csv.row(&cells_row);
                let np = optimize_nonparametric(&model, &coarse, S0, &opt.grid, 200)?;
                let mut cells_row = vec![g10(row.c), "nonparametric".into()];
                cells_row.extend(np.grid.dates().iter().map(|t| g10(*t)));
                csv.row(&cells_row);
            }
            csv.emit(out)
        }
        3 => {
            // hedging-error std as a function of b, digital N = 12
            let full = vohedge::payoff_measures::discretize_default(
                &digital_measure(STRIKE, 0.5)?,
            );
            let mut csv = Csv::new(&["c", "b", "std"]);
            for row in &reference::TABLE2 {
                let model = ContinuousModel::NigLevy(nig_standard().rescale(row.c)?);
                for i in 0..=18 {
                    let b = 0.1 + 0.05 * i as f64;
                    let grid = parametric_grid(b, 12, MATURITY)?;
                    let rep = j0_total(&discretize_model(&model, &grid)?, &full, S0)?;
                    csv.row(&cells(&[Num(row.c), Num(b), Num(rep.std)]));
                }
            }
            csv.emit(out)
        }
        4 => {
            // the four error curves against N, electricity call
            let full = vohedge::payoff_measures::discretize_default(&call_measure(STRIKE, 0.5)?);
            let objective = call_objective();
            let coarse = call_coarse();
            let model = ContinuousModel::Electricity(electricity_standard());
            let mut csv = Csv::new(&[
                "n", "std_vo_uniform", "std_vo_star", "std_bs_uniform", "std_bs_star",
            ]);
            for row in &reference::TABLE3 {
                let n = row.n;
                let uniform = TradingGrid::uniform(n, MATURITY);
                let t_uni = discretize_model(&model, &uniform)?;
                let rep_uni = j0_total(&t_uni, &full, S0)?;
                let (bs_u, v0_bs) = bs_delta_coeffs(&t_uni, &full, S0)?;
                let (_, var_bs_u) = deterministic_strategy_error(&t_uni, &full, &bs_u, v0_bs, S0)?;
                let opt = optimize_b(&model, &objective, n, MATURITY, S0)?;
                // refinement budget shrinks with dimension; the b* grid
                // is already near-optimal
                let cap = match n {
                    0..=10 => 40,
                    11..=25 => 16,
                    _ => 10,
                };
                let np = optimize_nonparametric(&model, &coarse, S0, &opt.grid, cap)?;
                let t_star = discretize_model(&model, &np.grid)?;
                let rep_star = j0_total(&t_star, &full, S0)?;
                let (bs_s, v0_bs_s) = bs_delta_coeffs(&t_star, &full, S0)?;
                let (_, var_bs_s) =
                    deterministic_strategy_error(&t_star, &full, &bs_s, v0_bs_s, S0)?;
                csv.row(&cells(&[
                    Int(n as i64),
                    Num(rep_uni.std),
                    Num(rep_star.std.min(rep_uni.std)),
                    Num(var_bs_u.sqrt()),
                    Num(var_bs_s.sqrt()),
                ]));
            }
            csv.emit(out)
        }
        5 | 6 => {
            // b* and error levels against the mean-reversion rate
            let e = electricity_standard();
            let v1 = e.driver.moments().variance;
            let target =
                v1 * e.sigma * e.sigma * (1.0 - (-2.0 * 3.0 * MATURITY).exp()) / (2.0 * 3.0);
            let lambdas: Vec<f64> = reference::TABLE4.iter().map(|(l, _)| *l).collect();
            let pairs = vohedge::grid_opt::lambda_sigma_pairs(&lambdas, MATURITY, target, v1)?;
            let full = vohedge::payoff_measures::discretize_default(&call_measure(STRIKE, 0.5)?);
            let objective = call_objective();
            let mut csv = if k == 5 {
                Csv::new(&["lambda", "sigma", "b_star"])
            } else {
                Csv::new(&["lambda", "sigma", "std_uniform", "std_bstar"])
            };
            for (lam, sigma) in pairs {
                let p = ElectricityParams::new(e.driver, sigma, lam, MATURITY)?;
                let model = ContinuousModel::Electricity(p);
                let opt = optimize_b(&model, &objective, 10, MATURITY, S0)?;
                if k == 5 {
                    csv.row(&cells(&[Num(lam), Num(sigma), Num(opt.b_star)]));
                } else {
                    let uniform = TradingGrid::uniform(10, MATURITY);
                    let rep_uni = j0_total(&discretize_model(&model, &uniform)?, &full, S0)?;
                    let rep_b = j0_total(&discretize_model(&model, &opt.grid)?, &full, S0)?;
                    csv.row(&cells(&[Num(lam), Num(sigma), Num(rep_uni.std), Num(rep_b.std)]));
                }
            }
            csv.emit(out)
        }
        other => Err(CliError::Config(format!("unknown figure {other}; use 1..6"))),
    }
}
