//! Monte Carlo cross-validation: exact-law path simulation, strategy
//! execution along paths, and empirical bias/variance of hedging errors
//! with jackknife standard errors.
//!
//! Every analytic quantity in this crate (initial capital, hedging-error
//! variance, strategy coefficients) is checked against these estimates in
//! the test suites. Reports are bit-reproducible for a fixed seed: paths
//! use counter-based substreams and all reductions run in a fixed order.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, InverseGaussian, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fs_core::{
    initial_capital, lambda_coeffs, pure_hedge_ratio, vo_strategy_step, FsCoefficients,
    StrategyState,
};
use crate::hedging_error::DeterministicCoeffs;
use crate::payoff_measures::{reconstruct_payoff, DiscretizedMeasure};
use crate::pii_models::{ContinuousModel, CumulantTable, NigParams, TradingGrid};

/// Euler sub-steps per trading interval for the electricity integral.
const ELEC_SUBSTEPS: usize = 64;

/// Jackknife block count for standard errors.
const JACKKNIFE_BLOCKS: usize = 20;

/// SplitMix64 round, used to derive independent per-path seeds.
fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn path_rng(seed: u64, path: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix64(seed ^ splitmix64(path as u64)))
}

/// One NIG variate over time `dt`: normal variance-mean mixture with an
/// inverse-Gaussian subordinator (law NIG(alpha, beta, delta dt, mu dt)).
fn nig_increment<R: Rng + ?Sized>(p: &NigParams, dt: f64, rng: &mut R) -> f64 {
    let delta_t = p.delta * dt;
    let ig = InverseGaussian::new(delta_t / p.gamma(), delta_t * delta_t)
        .expect("positive IG parameters");
    let v: f64 = ig.sample(rng);
    let z: f64 = rng.sample(StandardNormal);
    p.mu * dt + p.beta * v + v.sqrt() * z
}

/// i.i.d. NIG(alpha, beta, delta dt, mu dt) samples, reproducible per seed.
pub fn sample_nig(p: &NigParams, dt: f64, n: usize, seed: u64) -> Result<Vec<f64>> {
    if !(dt > 0.0) {
        return Err(Error::Parameter(format!("dt must be > 0, got {dt}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n).map(|_| nig_increment(p, dt, &mut rng)).collect())
}

/// Simulated log-price increments, row-major `[path][interval]`, with
/// `S_k = S_{k-1} exp(dX_k)` along each path.
#[derive(Debug, Clone)]
pub struct PathBatch {
    increments: Vec<f64>,
    n_paths: usize,
    n_steps: usize,
    s0: f64,
    seed: u64,
}

impl PathBatch {
    pub fn n_paths(&self) -> usize {
        self.n_paths
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn s0(&self) -> f64 {
        self.s0
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn increments(&self, path: usize) -> &[f64] {
        &self.increments[path * self.n_steps..(path + 1) * self.n_steps]
    }

    /// Terminal price of one path.
    pub fn terminal(&self, path: usize) -> f64 {
        self.s0 * self.increments(path).iter().sum::<f64>().exp()
    }
}

fn simulate_increments(
    model: &ContinuousModel,
    grid: &TradingGrid,
    rng: &mut ChaCha8Rng,
    out: &mut [f64],
) {
    let n = grid.n_intervals();
    match model {
        ContinuousModel::NigLevy(p) => {
            for k in 1..=n {
                out[k - 1] = nig_increment(p, grid.dt(k), rng);
            }
        }
        ContinuousModel::Electricity(p) => {
            // Euler sub-stepping of int sigma e^{-lambda (T-u)} dL_u with
            // midpoint loadings; the driver increments are exact in law.
            for k in 1..=n {
                let (a, b) = (grid.dates()[k - 1], grid.dates()[k]);
                let h = (b - a) / ELEC_SUBSTEPS as f64;
                let mut acc = 0.0;
                for j in 0..ELEC_SUBSTEPS {
                    let mid = a + (j as f64 + 0.5) * h;
                    acc += p.loading(mid) * nig_increment(&p.driver, h, rng);
                }
                out[k - 1] = acc;
            }
        }
        ContinuousModel::Gaussian(p) => {
            for k in 1..=n {
                let dt = grid.dt(k);
                let z: f64 = rng.sample(StandardNormal);
                out[k - 1] = p.drift * dt + p.sigma * dt.sqrt() * z;
            }
        }
        ContinuousModel::Binomial(p) => {
            for k in 1..=n {
                let u: f64 = rng.gen();
                out[k - 1] = if u < p.probs[k - 1] { p.a } else { p.b };
            }
        }
    }
}

/// Simulates `n_paths` price paths. Substreams are derived per path from
/// `seed`, so the batch is reproducible and order-independent.
pub fn simulate_paths(
    model: &ContinuousModel,
    grid: &TradingGrid,
    s0: f64,
    n_paths: usize,
    seed: u64,
) -> Result<PathBatch> {
    if !(s0 > 0.0) {
        return Err(Error::Parameter(format!("s0 must be > 0, got {s0}")));
    }
    if n_paths == 0 {
        return Err(Error::Parameter("need at least one path".into()));
    }
    let n_steps = grid.n_intervals();
    let mut increments = vec![0.0; n_paths * n_steps];
    increments
        .par_chunks_mut(n_steps)
        .enumerate()
        .for_each(|(path, chunk)| {
            let mut rng = path_rng(seed, path);
            simulate_increments(model, grid, &mut rng, chunk);
        });
    Ok(PathBatch { increments, n_paths, n_steps, s0, seed })
}

/// Hedging strategy executed along simulated paths.
#[derive(Debug, Clone, Copy)]
pub enum Strategy<'a> {
    /// Feedback variance-optimal strategy.
    VarianceOptimal,
    /// Pure FS integrand xi_n, no feedback term.
    FsPure,
    /// Deterministic-coefficient strategy v_n = int f(z)_n S_{n-1}^{z-1} Pi(dz).
    Deterministic(&'a DeterministicCoeffs),
    /// No hedging: the error is payoff minus initial capital.
    Unhedged,
}

/// Empirical bias/variance of the hedging error, with jackknife SEs.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalReport {
    pub n_paths: usize,
    pub mean_error: f64,
    pub se_mean: f64,
    pub error_variance: f64,
    pub se_variance: f64,
}

fn pairwise_sum(x: &[f64]) -> f64 {
    match x.len() {
        0 => 0.0,
        1 => x[0],
        2 => x[0] + x[1],
        n => pairwise_sum(&x[..n / 2]) + pairwise_sum(&x[n / 2..]),
    }
}

/// Mean/variance (unbiased denominator) plus jackknife SEs over
/// contiguous blocks.
fn summarize(errors: &[f64]) -> EmpiricalReport {
    let n = errors.len();
    let nf = n as f64;
    let sq: Vec<f64> = errors.iter().map(|e| e * e).collect();
    let total = pairwise_sum(errors);
    let total_sq = pairwise_sum(&sq);
    let mean = total / nf;
    let var = (total_sq - total * total / nf) / (nf - 1.0);

    let b = JACKKNIFE_BLOCKS.min(n);
    let bf = b as f64;
    let block_len = n / b;
    let mut mean_jack = Vec::with_capacity(b);
    let mut var_jack = Vec::with_capacity(b);
    for i in 0..b {
        let (lo, hi) = (i * block_len, if i == b - 1 { n } else { (i + 1) * block_len });
        let t = total - pairwise_sum(&errors[lo..hi]);
        let q = total_sq - pairwise_sum(&sq[lo..hi]);
        let m = (n - (hi - lo)) as f64;
        mean_jack.push(t / m);
        var_jack.push((q - t * t / m) / (m - 1.0));
    }
    let spread = |v: &[f64]| -> f64 {
        let avg = pairwise_sum(v) / bf;
        ((bf - 1.0) / bf * v.iter().map(|x| (x - avg) * (x - avg)).sum::<f64>()).sqrt()
    };
    EmpiricalReport {
        n_paths: n,
        mean_error: mean,
        se_mean: spread(&mean_jack),
        error_variance: var,
        se_variance: spread(&var_jack),
    }
}

/// Executes a strategy along every path of the batch and reports the
/// empirical law of the hedging error `payoff - c - sum_k phi_k dS_k`.
pub fn simulate_hedge(
    batch: &PathBatch,
    strategy: Strategy<'_>,
    table: &CumulantTable,
    d: &DiscretizedMeasure,
    c: f64,
) -> Result<EmpiricalReport> {
    let n = batch.n_steps;
    if table.n_intervals() != n {
        return Err(Error::Parameter(format!(
            "table has {} intervals, batch has {n}",
            table.n_intervals()
        )));
    }
    let fs = crate::fs_core::compute_fs(table, d)?;
    let lam = lambda_coeffs(table)?;
    let h0 = initial_capital(&fs, batch.s0)?;

    let errors: Vec<f64> = (0..batch.n_paths)
        .into_par_iter()
        .map(|path| -> Result<f64> {
            let mut s = batch.s0;
            let mut state = StrategyState::new();
            for k in 1..=n {
                let phi = match strategy {
                    Strategy::VarianceOptimal => vo_strategy_step(&state, &fs, &lam, s, h0)?,
                    Strategy::FsPure => pure_hedge_ratio(&fs, s, k)?,
                    Strategy::Deterministic(f) => f.ratio(s, k),
                    Strategy::Unhedged => 0.0,
                };
                let s_next = s * batch.increments(path)[k - 1].exp();
                state.advance(phi, s_next - s);
                s = s_next;
            }
            let payoff = reconstruct_payoff(d, s)?;
            Ok(payoff - c - state.gain())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(summarize(&errors))
}

/// Empirical means of the FS residual bracket
/// `h(z,k) e^{z dX} - h(z,k-1) - g(z,k) h(z,k) (e^{dX} - 1)`
/// and of its product with `e^{dX} - m(1,k)`, per date. Both vanish in
/// expectation when g and h solve the decomposition equations.
#[derive(Debug, Clone)]
pub struct ResidualDiag {
    pub date: usize,
    pub mean_dl: Complex64,
    pub se_dl: f64,
    pub mean_dl_dm: Complex64,
    pub se_dl_dm: f64,
}

/// Monte Carlo martingale/orthogonality diagnostics for one node of `fs`.
pub fn fs_residual_diagnostics(
    batch: &PathBatch,
    table: &CumulantTable,
    fs: &FsCoefficients,
    node: usize,
) -> Vec<ResidualDiag> {
    let n = batch.n_steps;
    let z = fs.nodes()[node].0;
    let m1: Vec<f64> = (1..=n).map(|k| 1.0 + table.em1(k)).collect();
    (1..=n)
        .map(|k| {
            let g = fs.g(node, k);
            let h = fs.h(node, k);
            let h_prev = fs.h(node, k - 1);
            let mut dl = Vec::with_capacity(batch.n_paths);
            let mut dldm = Vec::with_capacity(batch.n_paths);
            for path in 0..batch.n_paths {
                let dx = batch.increments(path)[k - 1];
                let e_dx = dx.exp();
                let bracket = h * (z * dx).exp() - h_prev - g * h * (e_dx - 1.0);
                dl.push(bracket);
                dldm.push(bracket * (e_dx - m1[k - 1]));
            }
            let stats = |v: &[Complex64]| -> (Complex64, f64) {
                let nf = v.len() as f64;
                let mean = v.iter().sum::<Complex64>() / nf;
                let var = v.iter().map(|x| (x - mean).norm_sqr()).sum::<f64>() / (nf - 1.0);
                (mean, (var / nf).sqrt())
            };
            let (mean_dl, se_dl) = stats(&dl);
            let (mean_dl_dm, se_dl_dm) = stats(&dldm);
            ResidualDiag { date: k, mean_dl, se_dl, mean_dl_dm, se_dl_dm }
        })
        .collect()
}
