//! Acceptance suite: one test per criterion, one PASS/FAIL line each.
//!
//! Criteria 2 and 3 carry sub-checks pinned to published reference values
//! that this implementation reproduces only in part; the failing
//! sub-checks print a full diagnosis (see `pricing_oracles.rs` for the
//! forensic reconstruction of the reference values' truncation level).

use num_complex::Complex64;
use vohedge::fs_core::{compute_fs, initial_capital, lambda_coeffs, pure_hedge_ratio, vo_strategy_step, StrategyState};
use vohedge::grid_opt::{lambda_sigma_pairs, optimize_b, optimize_nonparametric};
use vohedge::hedging_error::{bs_delta_coeffs, deterministic_strategy_error, fs_pure_coeffs, j0_stationary, j0_total};
use vohedge::mc_oracle::{fs_residual_diagnostics, simulate_hedge, simulate_paths, Strategy};
use vohedge::payoff_measures::{call_measure, digital_measure, discretize, discretize_default, ComplexMeasure, DiscretizedMeasure};
use vohedge::pii_models::{discretize_model, electricity_standard, nig_standard, BinomialParams, ContinuousModel, ElectricityParams, GaussianParams, NigParams, TradingGrid};

const S0: f64 = 100.0;
const STRIKE: f64 = 99.0;
const MATURITY: f64 = 0.25;

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

struct Checker {
    name: &'static str,
    failures: Vec<String>,
}

impl Checker {
    fn new(name: &'static str) -> Self {
        Self { name, failures: Vec::new() }
    }

    fn check(&mut self, ok: bool, label: String) {
        println!("    [{}] {label}", if ok { " ok " } else { "FAIL" });
        if !ok {
            self.failures.push(label);
        }
    }

    fn finish(self) {
        if self.failures.is_empty() {
            println!("criterion {}: PASS", self.name);
        } else {
            println!("criterion {}: FAIL ({} sub-checks)", self.name, self.failures.len());
            panic!(
                "criterion {} failed sub-checks:\n  {}",
                self.name,
                self.failures.join("\n  ")
            );
        }
    }
}

fn digital_full() -> DiscretizedMeasure {
    discretize_default(&digital_measure(STRIKE, 0.5).unwrap())
}

fn call_full() -> DiscretizedMeasure {
    discretize_default(&call_measure(STRIKE, 0.5).unwrap())
}

/// Reduced node set for optimizer objectives and Monte Carlo strategy
/// evaluation; the moment completion and kernel decay make hedging
/// integrals quadrature-converged already at this size.
fn digital_reduced() -> DiscretizedMeasure {
    let mut m = digital_measure(STRIKE, 0.5).unwrap();
    m.contours[0].truncation = 150.0;
    discretize(&m, 48, 12)
}

fn digital_coarse() -> DiscretizedMeasure {
    let mut m = digital_measure(STRIKE, 0.5).unwrap();
    m.contours[0].truncation = 150.0;
    discretize(&m, 32, 8)
}

fn call_reduced() -> DiscretizedMeasure {
    let mut m = call_measure(STRIKE, 0.5).unwrap();
    m.contours[0].truncation = 60.0;
    discretize(&m, 24, 12)
}

#[test]
fn criterion_01_kurtosis_table() {
    let mut ck = Checker::new("1 (kurtosis table)");
    let start = std::time::Instant::now();
    let p = nig_standard();
    for (c, want) in [(0.14, 0.61), (0.2, 0.30), (1.0, 0.01), (2.0, 4e-3)] {
        let got = p.rescale(c).unwrap().moments().excess_kurtosis;
        ck.check(
            (got - want).abs() <= 0.02,
            format!("C={c}: excess kurtosis {got:.4} vs {want} (tol 0.02)"),
        );
    }
    let dt = start.elapsed();
    ck.check(dt.as_secs_f64() < 1.0, format!("runtime {dt:?} < 1 s"));
    ck.finish();
}

#[test]
fn criterion_02_digital_table() {
    let mut ck = Checker::new("2 (digital reference table)");
    let start = std::time::Instant::now();
    let p = nig_standard();
    let full = digital_full();
    let reduced = digital_reduced();
    let coarse = digital_coarse();
    // per C = {2, 1, 0.2, 0.14}: stated std rows, V0 row, b* row
    let std_uni_ref = [0.1892, 0.1952, 0.2691, 0.3028];
    let std_bst_ref = [0.1520, 0.1685, 0.2665, 0.3017];
    let std_np_ref = [0.1483, 0.1652, 0.2663, 0.3017];
    let v0_ref = [0.4903, 0.4859, 0.4813, 0.4812];
    let b_ref = [0.4078, 0.4394, 0.6106, 0.6710];
    let cs = [2.0, 1.0, 0.2, 0.14];
    for (i, &c) in cs.iter().enumerate() {
        let model = ContinuousModel::NigLevy(p.rescale(c).unwrap());
        let uniform = TradingGrid::uniform(12, MATURITY);
        let rep_uni = j0_total(&discretize_model(&model, &uniform).unwrap(), &full, S0).unwrap();
        let opt = optimize_b(&model, &reduced, 12, MATURITY, S0).unwrap();
        let rep_bst =
            j0_total(&discretize_model(&model, &opt.grid).unwrap(), &full, S0).unwrap();
        let mut np = optimize_nonparametric(&model, &coarse, S0, &opt.grid, 200).unwrap();
        let mut rep_np =
            j0_total(&discretize_model(&model, &np.grid).unwrap(), &full, S0).unwrap();
        if rep_np.j0 > rep_bst.j0 {
            // the initialization is always an admissible candidate
            np.grid = opt.grid.clone();
            rep_np = rep_bst.clone();
        }
        ck.check(
            (rep_uni.std / std_uni_ref[i] - 1.0).abs() <= 0.01,
            format!("C={c}: std_VO(pi^1) {:.4} vs {} (1%)", rep_uni.std, std_uni_ref[i]),
        );
        ck.check(
            (rep_bst.std / std_bst_ref[i] - 1.0).abs() <= 0.01,
            format!("C={c}: std_VO(pi^b*) {:.4} vs {} (1%)", rep_bst.std, std_bst_ref[i]),
        );
        ck.check(
            (rep_np.std / std_np_ref[i] - 1.0).abs() <= 0.01,
            format!("C={c}: std_VO(pi^*) {:.4} vs {} (1%)", rep_np.std, std_np_ref[i]),
        );
        ck.check(
            (rep_uni.v0 - v0_ref[i]).abs() <= 0.002,
            format!("C={c}: V0(pi^1) {:.4} vs {} (0.002)", rep_uni.v0, v0_ref[i]),
        );
        ck.check(
            (opt.b_star - b_ref[i]).abs() <= 0.02,
            format!("C={c}: b* {:.4} vs {} (0.02)", opt.b_star, b_ref[i]),
        );
        // context for the expected failures: the published std values
        // equal this code's raw truncated sums at l = 100 (see the
        // pricing_oracles test), and the published V0 row is reversed
        let v0_rev = v0_ref[cs.len() - 1 - i];
        println!(
            "    note C={c}: V0 against the reversed column = {:.4} vs {v0_rev} (|diff| = {:.1e})",
            rep_uni.v0,
            (rep_uni.v0 - v0_rev).abs()
        );
    }
    let dt = start.elapsed();
    ck.check(dt.as_secs_f64() < 600.0, format!("runtime {dt:?} < 10 min"));
    ck.finish();
}

#[test]
fn criterion_03_electricity_table() {
    let mut ck = Checker::new("3 (electricity reference table)");
    let start = std::time::Instant::now();
    let model = ContinuousModel::Electricity(electricity_standard());
    let full = call_full();
    let reduced = call_reduced();
    let ns = [2usize, 5, 10, 25, 50];
    let std_vo_ref = [4.8331, 3.4012, 2.6154, 1.9275, 1.6145];
    let std_bs_ref = [4.9137, 3.4196, 2.6217, 1.9329, 1.6231];
    let v0_ref = [8.5818, 8.6232, 8.6380, 8.6469, 8.6499];
    let b_ref = [0.5917, 0.6298, 0.6284, 0.6203, 0.6172];
    for (i, &n) in ns.iter().enumerate() {
        let uniform = TradingGrid::uniform(n, MATURITY);
        let table = discretize_model(&model, &uniform).unwrap();
        let rep = j0_total(&table, &full, S0).unwrap();
        let (bs, v0_bs) = bs_delta_coeffs(&table, &full, S0).unwrap();
        let (_, var_bs) = deterministic_strategy_error(&table, &full, &bs, v0_bs, S0).unwrap();
        let opt = optimize_b(&model, &reduced, n, MATURITY, S0).unwrap();
        ck.check(
            (rep.std / std_vo_ref[i] - 1.0).abs() <= 0.01,
            format!("N={n}: std_VO(pi^1) {:.4} vs {} (1%)", rep.std, std_vo_ref[i]),
        );
        ck.check(
            (var_bs.sqrt() / std_bs_ref[i] - 1.0).abs() <= 0.01,
            format!("N={n}: std_BS(pi^1) {:.4} vs {} (1%)", var_bs.sqrt(), std_bs_ref[i]),
        );
        ck.check(
            (rep.v0 - v0_ref[i]).abs() <= 0.01,
            format!("N={n}: V0(pi^1) {:.4} vs {} (0.01)", rep.v0, v0_ref[i]),
        );
        ck.check(
            (opt.b_star - b_ref[i]).abs() <= 0.02,
            format!("N={n}: b* {:.4} vs {} (0.02)", opt.b_star, b_ref[i]),
        );
    }
    let dt = start.elapsed();
    ck.check(dt.as_secs_f64() < 600.0, format!("runtime {dt:?} < 10 min"));
    ck.finish();
}

#[test]
fn criterion_04_lambda_sigma_row() {
    let mut ck = Checker::new("4 (lambda-sigma pairs)");
    let start = std::time::Instant::now();
    let e = electricity_standard();
    let v1 = e.driver.moments().variance;
    let target = v1 * e.sigma * e.sigma * (1.0 - (-2.0 * 3.0 * MATURITY).exp()) / 6.0;
    let pairs = lambda_sigma_pairs(&[1.0, 2.0, 3.0, 6.0, 9.0], MATURITY, target, v1).unwrap();
    let want = [0.4662, 0.5202, 0.5747, 0.7349, 0.8823];
    for ((lam, sigma), want) in pairs.iter().zip(want) {
        ck.check(
            (sigma - want).abs() < 5e-5,
            format!("lambda={lam}: sigma {sigma:.4} vs {want} (4 decimals)"),
        );
    }
    let dt = start.elapsed();
    ck.check(dt.as_secs_f64() < 1.0, format!("runtime {dt:?} < 1 s"));
    ck.finish();
}

#[test]
fn criterion_05_binomial_completeness() {
    let mut ck = Checker::new("5 (binomial completeness)");
    for n in [4usize, 7, 10] {
        let grid = TradingGrid::uniform(n, 1.0);
        let model = ContinuousModel::Binomial(
            BinomialParams::new(0.06, -0.05, (0..n).map(|k| 0.35 + 0.02 * k as f64).collect())
                .unwrap(),
        );
        let table = discretize_model(&model, &grid).unwrap();
        for z in [c64(2.0, 0.0), c64(0.7, 0.0)] {
            let d = discretize(&ComplexMeasure::atom(z, c64(1.0, 0.0)), 1, 2);
            let rep = j0_total(&table, &d, S0).unwrap();
            let scale = S0.powf(2.0 * z.re);
            ck.check(
                rep.j0.abs() < 1e-10 * scale,
                format!("N={n} z={z}: |J0| = {:.2e} < 1e-10 * s0^2Re(z)", rep.j0),
            );
            // exact replication along every path of the 2^N tree
            let fs = compute_fs(&table, &d).unwrap();
            let h0 = initial_capital(&fs, S0).unwrap();
            let mut worst: f64 = 0.0;
            for path in 0u32..(1 << n) {
                let mut s = S0;
                let mut gain = 0.0;
                for k in 1..=n {
                    let xi = pure_hedge_ratio(&fs, s, k).unwrap();
                    let dx = if path >> (k - 1) & 1 == 1 { 0.06 } else { -0.05 };
                    let s_next = s * f64::exp(dx);
                    gain += xi * (s_next - s);
                    s = s_next;
                }
                let payoff = s.powf(z.re);
                worst = worst.max(((h0 + gain - payoff) / payoff).abs());
            }
            ck.check(
                worst < 1e-10,
                format!("N={n} z={z}: max replication residual {worst:.2e} < 1e-10"),
            );
        }
    }
    ck.finish();
}

#[test]
fn criterion_06_stationary_equivalence() {
    let mut ck = Checker::new("6 (stationary closed form)");
    use rand::Rng;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(20260810);
    let p = nig_standard();
    let (lo, hi) = p.domain();
    let mut worst: f64 = 0.0;
    for case in 0..20 {
        let n = rng.gen_range(2..=50);
        let grid = TradingGrid::uniform(n, MATURITY);
        let table = discretize_model(&ContinuousModel::NigLevy(p), &grid).unwrap();
        // node with Re z, 2 Re z, Re z + 1 inside the strip
        let re = rng.gen_range((lo / 2.0 + 0.25)..(hi / 2.0 - 1.0));
        let im = rng.gen_range(0.0..40.0);
        let w = c64(rng.gen_range(0.2..2.0), rng.gen_range(-1.0..1.0));
        let mut m = ComplexMeasure::atom(c64(re, im), w);
        m.atoms.push((c64(re, -im), w.conj()));
        let d = discretize(&m, 1, 2);
        let a = j0_total(&table, &d, S0).unwrap().j0;
        let b = j0_stationary(&table, &d, S0).unwrap().j0;
        let rel = (a - b).abs() / a.abs().max(1e-12);
        worst = worst.max(rel);
        if case < 3 {
            println!("    case {case}: N={n} z={re:.2}+{im:.2}i rel={rel:.2e}");
        }
    }
    ck.check(worst <= 1e-10, format!("worst relative gap {worst:.2e} <= 1e-10 over 20 cases"));
    ck.finish();
}

#[test]
fn criterion_07_oracle_agreement() {
    let mut ck = Checker::new("7 (Monte Carlo oracle)");
    let n_paths = 100_000;
    let nig = ContinuousModel::NigLevy(nig_standard());
    let elec = ContinuousModel::Electricity(electricity_standard());
    let uniform12 = TradingGrid::uniform(12, MATURITY);
    let uniform10 = TradingGrid::uniform(10, MATURITY);
    // pi^{b*} grids from the reduced objective
    let b_digital = optimize_b(&nig, &digital_reduced(), 12, MATURITY, S0).unwrap().grid;
    let b_call = optimize_b(&nig, &call_reduced(), 12, MATURITY, S0).unwrap().grid;

    let configs: Vec<(&str, &ContinuousModel, &TradingGrid, DiscretizedMeasure, u64)> = vec![
        ("digital/NIG uniform", &nig, &uniform12, digital_reduced(), 101),
        ("digital/NIG pi^b*", &nig, &b_digital, digital_reduced(), 102),
        ("digital/electricity uniform", &elec, &uniform10, digital_reduced(), 203),
        ("call/NIG uniform", &nig, &uniform12, call_reduced(), 104),
        ("call/NIG pi^b*", &nig, &b_call, call_reduced(), 105),
        ("call/electricity uniform", &elec, &uniform10, call_reduced(), 106),
    ];
    for (label, model, grid, d, seed) in configs {
        let table = discretize_model(model, grid).unwrap();
        let rep = j0_total(&table, &d, S0).unwrap();
        let batch = simulate_paths(model, grid, S0, n_paths, seed).unwrap();
        let emp = simulate_hedge(&batch, Strategy::VarianceOptimal, &table, &d, rep.v0).unwrap();
        let var_gap = (emp.error_variance - rep.j0).abs();
        ck.check(
            var_gap <= 3.0 * emp.se_variance,
            format!(
                "{label}: |emp var {:.5} - J0 {:.5}| = {var_gap:.2e} <= 3 SE ({:.2e})",
                emp.error_variance, rep.j0, 3.0 * emp.se_variance
            ),
        );
        ck.check(
            emp.mean_error.abs() <= 3.0 * emp.se_mean,
            format!(
                "{label}: |mean err| {:.2e} <= 3 SE ({:.2e})",
                emp.mean_error.abs(),
                3.0 * emp.se_mean
            ),
        );
    }
    ck.finish();
}

#[test]
fn criterion_08_dominance_suite() {
    let mut ck = Checker::new("8 (dominance of the optimum)");
    let tol = 1e-8;
    // Table 2 configurations: digital, N = 12, four tail widths
    let full_d = digital_full();
    for c in [2.0, 1.0, 0.2, 0.14] {
        let model = ContinuousModel::NigLevy(nig_standard().rescale(c).unwrap());
        let table = discretize_model(&model, &TradingGrid::uniform(12, MATURITY)).unwrap();
        let j0 = j0_total(&table, &full_d, S0).unwrap().j0;
        let fs = compute_fs(&table, &full_d).unwrap();
        let (_, var_pure) =
            deterministic_strategy_error(&table, &full_d, &fs_pure_coeffs(&fs), 0.0, S0).unwrap();
        let (bs, _) = bs_delta_coeffs(&table, &full_d, S0).unwrap();
        let (_, var_bs) = deterministic_strategy_error(&table, &full_d, &bs, 0.0, S0).unwrap();
        ck.check(
            var_pure >= j0 * (1.0 - tol),
            format!("digital C={c}: Var(FS-pure) {var_pure:.5} >= J0 {j0:.5}"),
        );
        ck.check(
            var_bs >= j0 * (1.0 - tol),
            format!("digital C={c}: Var(BS) {var_bs:.5} >= J0 {j0:.5}"),
        );
    }
    // Table 3 configurations: call on electricity, five grids
    let full_c = call_full();
    let model = ContinuousModel::Electricity(electricity_standard());
    for n in [2usize, 5, 10, 25, 50] {
        let table = discretize_model(&model, &TradingGrid::uniform(n, MATURITY)).unwrap();
        let j0 = j0_total(&table, &full_c, S0).unwrap().j0;
        let fs = compute_fs(&table, &full_c).unwrap();
        let (_, var_pure) =
            deterministic_strategy_error(&table, &full_c, &fs_pure_coeffs(&fs), 0.0, S0).unwrap();
        let (bs, _) = bs_delta_coeffs(&table, &full_c, S0).unwrap();
        let (_, var_bs) = deterministic_strategy_error(&table, &full_c, &bs, 0.0, S0).unwrap();
        ck.check(
            var_pure >= j0 * (1.0 - tol),
            format!("call N={n}: Var(FS-pure) {var_pure:.5} >= J0 {j0:.5}"),
        );
        ck.check(
            var_bs >= j0 * (1.0 - tol),
            format!("call N={n}: Var(BS) {var_bs:.5} >= J0 {j0:.5}"),
        );
    }
    ck.finish();
}

#[test]
fn criterion_09_martingale_orthogonality() {
    let mut ck = Checker::new("9 (martingale/orthogonality checks)");
    use rand::Rng;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(777001);
    let n_samples = 200_000;
    let grid = TradingGrid::uniform(6, MATURITY);
    let binomial_grid = TradingGrid::uniform(6, MATURITY);
    let families: Vec<(&str, ContinuousModel, &TradingGrid)> = vec![
        ("NIG", ContinuousModel::NigLevy(nig_standard()), &grid),
        ("electricity", ContinuousModel::Electricity(electricity_standard()), &grid),
        ("Gaussian", ContinuousModel::Gaussian(GaussianParams::new(0.02, 0.4).unwrap()), &grid),
        (
            "binomial",
            ContinuousModel::Binomial(BinomialParams::constant(0.05, -0.045, 0.48, 6).unwrap()),
            &binomial_grid,
        ),
    ];
    for (name, model, grid) in families {
        let table = discretize_model(&model, grid).unwrap();
        let (lo, hi) = table.domain();
        let (lo, hi) = (lo.max(-12.0), hi.min(12.0));
        let batch = simulate_paths(&model, grid, S0, n_samples, 90_000 + name.len() as u64).unwrap();
        let mut worst_dl: f64 = 0.0;
        let mut worst_dldm: f64 = 0.0;
        for _ in 0..10 {
            let re = rng.gen_range((lo / 2.0 + 0.2)..(hi / 2.0 - 1.0).min(hi - 1.1));
            let im = rng.gen_range(-20.0..20.0);
            let z = c64(re, im);
            let d = discretize(&ComplexMeasure::atom(z, c64(1.0, 0.0)), 1, 2);
            let fs = compute_fs(&table, &d).unwrap();
            let diags = fs_residual_diagnostics(&batch, &table, &fs, 0);
            let k = rng.gen_range(1..=table.n_intervals());
            let diag = &diags[k - 1];
            // complete models have dL identically zero: both mean and SE
            // are machine noise there, so the ratio needs an absolute
            // floor at the scale of the bracket's inputs
            let floor = 1e-11
                * (fs.h(0, k).norm()
                    + fs.h(0, k - 1).norm()
                    + (fs.g(0, k) * fs.h(0, k)).norm());
            worst_dl = worst_dl.max(diag.mean_dl.norm() / (diag.se_dl + floor));
            worst_dldm = worst_dldm.max(diag.mean_dl_dm.norm() / (diag.se_dl_dm + floor));
        }
        ck.check(
            worst_dl <= 3.0,
            format!("{name}: max |E[dL]| / SE = {worst_dl:.2} <= 3"),
        );
        ck.check(
            worst_dldm <= 3.0,
            format!("{name}: max |E[dL dM]| / SE = {worst_dldm:.2} <= 3"),
        );
    }
    ck.finish();
}

#[test]
fn criterion_10_digital_truncation_convergence() {
    let mut ck = Checker::new("10 (truncation convergence)");
    let table =
        discretize_model(&ContinuousModel::NigLevy(nig_standard()), &TradingGrid::uniform(12, MATURITY))
            .unwrap();
    let at = |u_scale: f64| {
        let mut m = digital_measure(STRIKE, 0.5).unwrap();
        m.contours[0].truncation *= u_scale;
        let panels = (128.0 * u_scale) as usize;
        let d = discretize(&m, panels, 16);
        j0_total(&table, &d, S0).unwrap()
    };
    let base = at(1.0);
    let double = at(2.0);
    let dv0 = (base.v0 - double.v0).abs() / base.v0.abs();
    let dj0 = (base.j0 - double.j0).abs() / base.j0.abs();
    ck.check(dv0 < 1e-3, format!("V0 drift under U-doubling: {dv0:.2e} < 0.1%"));
    ck.check(dj0 < 1e-3, format!("J0 drift under U-doubling: {dj0:.2e} < 0.1%"));
    ck.finish();
}

#[test]
fn criterion_11_beta_flip_sensitivity() {
    let mut ck = Checker::new("11 (asymmetry sensitivity)");
    let e = electricity_standard();
    let grid = TradingGrid::uniform(2, MATURITY);
    let d = call_full();
    let mut results = Vec::new();
    for beta in [-1.581, 1.581] {
        let drv = NigParams::new(15.81, beta, 15.57, 1.56).unwrap();
        let p = ElectricityParams::new(drv, e.sigma, e.lambda_mr, e.maturity).unwrap();
        let table = discretize_model(&ContinuousModel::Electricity(p), &grid).unwrap();
        let (bs, v0_bs) = bs_delta_coeffs(&table, &d, S0).unwrap();
        let (bias, var) = deterministic_strategy_error(&table, &d, &bs, v0_bs, S0).unwrap();
        let rep = j0_total(&table, &d, S0).unwrap();
        results.push((bias, var.sqrt(), rep.std));
    }
    let (bias0, bs0, vo0) = results[0];
    let (bias1, bs1, vo1) = results[1];
    ck.check((bias0 - (-0.04)).abs() <= 0.2, format!("base BS bias {bias0:+.4} vs -0.04 (0.2)"));
    ck.check((bias1 - 4.45).abs() <= 0.2, format!("flipped BS bias {bias1:+.4} vs 4.45 (0.2)"));
    ck.check((bs0 / 4.91 - 1.0).abs() <= 0.01, format!("base BS std {bs0:.4} vs 4.91 (1%)"));
    ck.check((bs1 / 5.92 - 1.0).abs() <= 0.01, format!("flipped BS std {bs1:.4} vs 5.92 (1%)"));
    ck.check((vo0 / 4.83 - 1.0).abs() <= 0.02, format!("base VO std {vo0:.4} vs 4.83 (2%)"));
    ck.check((vo1 / 2.10 - 1.0).abs() <= 0.02, format!("flipped VO std {vo1:.4} vs 2.10 (2%)"));
    ck.finish();
}

#[test]
fn strategy_feedback_improves_on_pure_hedge() {
    // common-random-number ordering: var(VO) <= var(FS-pure) within noise
    let model = ContinuousModel::NigLevy(nig_standard());
    let grid = TradingGrid::uniform(12, MATURITY);
    let table = discretize_model(&model, &grid).unwrap();
    let d = digital_reduced();
    let rep = j0_total(&table, &d, S0).unwrap();
    let batch = simulate_paths(&model, &grid, S0, 60_000, 424_242).unwrap();
    let vo = simulate_hedge(&batch, Strategy::VarianceOptimal, &table, &d, rep.v0).unwrap();
    let pure = simulate_hedge(&batch, Strategy::FsPure, &table, &d, rep.v0).unwrap();
    assert!(
        vo.error_variance <= pure.error_variance + vo.se_variance,
        "VO {} vs pure {}",
        vo.error_variance,
        pure.error_variance
    );
    let (bs, _) = bs_delta_coeffs(&table, &d, S0).unwrap();
    let bs_rep =
        simulate_hedge(&batch, Strategy::Deterministic(&bs), &table, &d, rep.v0).unwrap();
    assert!(vo.error_variance <= bs_rep.error_variance + vo.se_variance);
    // unhedged centering: zero mean with c = E[payoff]
    let unhedged = simulate_hedge(&batch, Strategy::Unhedged, &table, &d, 0.0).unwrap();
    let centered = simulate_hedge(&batch, Strategy::Unhedged, &table, &d, unhedged.mean_error).unwrap();
    assert!(centered.mean_error.abs() < 1e-12);
}

#[test]
fn bs_benchmark_matches_reference_by_simulation() {
    // discretely executed delta hedge, call on the electricity model,
    // N = 10 uniform, capital V0_bs: empirical std within 3 SE of the
    // published 2.6217
    let model = ContinuousModel::Electricity(electricity_standard());
    let grid = TradingGrid::uniform(10, MATURITY);
    let table = discretize_model(&model, &grid).unwrap();
    let d = call_reduced();
    let (bs, v0_bs) = bs_delta_coeffs(&table, &d, S0).unwrap();
    let batch = simulate_paths(&model, &grid, S0, 100_000, 60_601).unwrap();
    let emp = simulate_hedge(&batch, Strategy::Deterministic(&bs), &table, &d, v0_bs).unwrap();
    let reference = 2.6217f64;
    let gap = (emp.error_variance - reference * reference).abs();
    assert!(
        gap <= 3.0 * emp.se_variance,
        "empirical var {} vs {} (3 SE = {})",
        emp.error_variance,
        reference * reference,
        3.0 * emp.se_variance
    );
}

#[test]
fn table2_grid_gain_shrinks_with_heavier_tails() {
    // the J0 gain of grid optimization decreases as C decreases
    let p = nig_standard();
    let reduced = digital_reduced();
    let coarse = digital_coarse();
    let mut gains = Vec::new();
    for c in [2.0, 1.0, 0.2, 0.14] {
        let model = ContinuousModel::NigLevy(p.rescale(c).unwrap());
        let uni = j0_total(
            &discretize_model(&model, &TradingGrid::uniform(12, MATURITY)).unwrap(),
            &reduced,
            S0,
        )
        .unwrap()
        .j0;
        let opt = optimize_b(&model, &reduced, 12, MATURITY, S0).unwrap();
        let np = optimize_nonparametric(&model, &coarse, S0, &opt.grid, 120).unwrap();
        let np_j0 = j0_total(&discretize_model(&model, &np.grid).unwrap(), &reduced, S0)
            .unwrap()
            .j0;
        let j0_star = np_j0.min(opt.j0_star);
        gains.push(uni - j0_star);
        // chain of dominance
        assert!(j0_star <= opt.j0_star + 1e-12);
        assert!(opt.j0_star <= uni + 1e-12);
    }
    for w in gains.windows(2) {
        assert!(w[1] <= w[0] * 1.02, "gain ordering violated: {gains:?}");
    }
}

#[test]
fn vo_strategy_first_step_and_unbiasedness() {
    // spot checks promoted from the operation examples
    let model = ContinuousModel::NigLevy(nig_standard());
    let grid = TradingGrid::uniform(12, MATURITY);
    let table = discretize_model(&model, &grid).unwrap();
    let d = digital_reduced();
    let fs = compute_fs(&table, &d).unwrap();
    let lam = lambda_coeffs(&table).unwrap();
    let h0 = initial_capital(&fs, S0).unwrap();
    let state = StrategyState::new();
    let phi1 = vo_strategy_step(&state, &fs, &lam, S0, h0).unwrap();
    let xi1 = pure_hedge_ratio(&fs, S0, 1).unwrap();
    assert!((phi1 - xi1).abs() < 1e-12);
}
