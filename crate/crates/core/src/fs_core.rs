//! Discrete Follmer-Schweizer building blocks.
//!
//! For each measure node z the coefficients
//!   g(z,n) = (m(z+1,n) - m(1,n) m(z,n)) / (m(2,n) - m(1,n)^2)
//!   h(z,n) = prod_{i=n+1}^N (m(z,i) - g(z,i)(m(1,i) - 1)),  h(z,N) = 1
//! give the decomposition H(z)_n = h(z,n) S_n^z,
//! xi(z)_n = g(z,n) h(z,n) S_{n-1}^{z-1}. Integrating the node weights
//! yields the mean-value process H_n, the pure hedge ratio xi_n, and the
//! variance-optimal feedback strategy
//! phi*_n = xi_n + lambda_n (H_{n-1} - H_0 - G_{n-1}).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::payoff_measures::{reconstruct_payoff, DiscretizedMeasure};
use crate::pii_models::CumulantTable;

/// Relative ceiling for imaginary residues of integrated quantities.
const IMAG_TOL: f64 = 1e-8;

/// Per-node, per-date FS coefficient tables for one (model, grid,
/// measure) triple. Immutable and shareable across threads.
#[derive(Debug, Clone)]
pub struct FsCoefficients {
    nodes: Vec<(Complex64, Complex64)>,
    /// g[j][k-1] = g(z_j, k), k = 1..N.
    g: Vec<Vec<Complex64>>,
    /// h[j][n] = h(z_j, n), n = 0..N; h[j][N] = 1.
    h: Vec<Vec<Complex64>>,
    measure: DiscretizedMeasure,
    n_intervals: usize,
}

impl FsCoefficients {
    pub fn n_intervals(&self) -> usize {
        self.n_intervals
    }

    pub fn nodes(&self) -> &[(Complex64, Complex64)] {
        &self.nodes
    }

    pub fn measure(&self) -> &DiscretizedMeasure {
        &self.measure
    }

    /// g(z_j, k), k = 1..N.
    pub fn g(&self, j: usize, k: usize) -> Complex64 {
        self.g[j][k - 1]
    }

    /// h(z_j, n), n = 0..N.
    pub fn h(&self, j: usize, n: usize) -> Complex64 {
        self.h[j][n]
    }
}

/// Builds the g/h tables for every node of `d`. Every node must satisfy
/// Re z, 2 Re z and Re z + 1 inside the strip of `table`.
pub fn compute_fs(table: &CumulantTable, d: &DiscretizedMeasure) -> Result<FsCoefficients> {
    let n = table.n_intervals();
    let (lo, hi) = table.domain();
    let mut offending = Vec::new();
    for (z, _) in d.nodes() {
        for re in [z.re, 2.0 * z.re, z.re + 1.0] {
            if !(re >= lo && re <= hi) {
                offending.push(format!("Re(z)={} needs {re} in [{lo}, {hi}]", z.re));
            }
        }
    }
    if !offending.is_empty() {
        offending.dedup();
        return Err(Error::Assumption(format!(
            "measure nodes leave the cumulant strip: {}",
            offending.join("; ")
        )));
    }

    let one = Complex64::new(1.0, 0.0);
    let em1: Vec<f64> = (1..=n).map(|k| table.em1(k)).collect();
    let rho11: Vec<f64> = (1..=n).map(|k| table.rho11(k)).collect();
    for (k, r) in rho11.iter().enumerate() {
        if !(*r > 0.0) {
            return Err(Error::Assumption(format!(
                "m(2,{}) - m(1,{})^2 = {r} is not positive (deterministic increment?)",
                k + 1,
                k + 1
            )));
        }
    }

    let mut g = Vec::with_capacity(d.len());
    let mut h = Vec::with_capacity(d.len());
    let mut m_buf = Vec::new();
    for (z, _) in d.nodes() {
        let gj: Vec<Complex64> =
            (1..=n).map(|k| table.rho(*z, one, k) / rho11[k - 1]).collect();
        table.m_profile_into(*z, &mut m_buf);
        let mut hj = vec![Complex64::new(1.0, 0.0); n + 1];
        for k in (1..=n).rev() {
            hj[k - 1] = hj[k] * (m_buf[k - 1] - gj[k - 1] * em1[k - 1]);
        }
        g.push(gj);
        h.push(hj);
    }
    Ok(FsCoefficients {
        nodes: d.nodes().to_vec(),
        g,
        h,
        measure: d.clone(),
        n_intervals: n,
    })
}

/// The predictable multipliers lambda_k = lam_coeff[k] / S_{k-1} of the
/// feedback strategy.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaProcess {
    lam: Vec<f64>,
}

impl LambdaProcess {
    /// lam_coeff[k] = (m(1,k) - 1) / (m(2,k) - 2 m(1,k) + 1), k = 1..N.
    pub fn coeff(&self, k: usize) -> f64 {
        self.lam[k - 1]
    }

    pub fn len(&self) -> usize {
        self.lam.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lam.is_empty()
    }
}

pub fn lambda_coeffs(table: &CumulantTable) -> Result<LambdaProcess> {
    let lam = (1..=table.n_intervals())
        .map(|k| {
            let d2 = table.d2(k);
            if !(d2 > 0.0) {
                return Err(Error::Assumption(format!(
                    "E[(e^dX - 1)^2] = {d2} at k = {k}: increment is deterministic"
                )));
            }
            Ok(table.em1(k) / d2)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(LambdaProcess { lam })
}

fn real_part_checked(acc: Complex64, what: &str) -> Result<f64> {
    if acc.im.abs() > IMAG_TOL * (1.0 + acc.re.abs()) {
        return Err(Error::Numerics(format!(
            "imaginary residue {:.3e} in {what} (conjugate symmetry broken?)",
            acc.im
        )));
    }
    Ok(acc.re)
}

/// Variance-optimal initial capital V_0* = H_0 = int h(z,0) s0^z Pi(dz).
pub fn initial_capital(fs: &FsCoefficients, s0: f64) -> Result<f64> {
    mean_value_process(fs, s0, 0)
}

/// Mean-value process H_n at spot `s`: int h(z,n) s^z Pi(dz). At n = N
/// this is the payoff itself and includes the contour tails.
pub fn mean_value_process(fs: &FsCoefficients, s: f64, n: usize) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::Parameter(format!("spot must be > 0, got {s}")));
    }
    if n > fs.n_intervals {
        return Err(Error::Parameter(format!(
            "date {n} beyond the grid (N = {})",
            fs.n_intervals
        )));
    }
    if n == fs.n_intervals {
        // h(., N) = 1: exactly the payoff reconstruction
        return reconstruct_payoff(&fs.measure, s);
    }
    let ln_s = s.ln();
    let mut acc = Complex64::new(0.0, 0.0);
    for (j, (z, w)) in fs.nodes.iter().enumerate() {
        acc += w * fs.h[j][n] * (z * ln_s).exp();
    }
    real_part_checked(acc, &format!("H_{n}"))
}

/// Pure hedge ratio xi_n at S_{n-1} = `s_prev`:
/// int g(z,n) h(z,n) s_prev^{z-1} Pi(dz), n = 1..N.
pub fn pure_hedge_ratio(fs: &FsCoefficients, s_prev: f64, n: usize) -> Result<f64> {
    if !(s_prev > 0.0) {
        return Err(Error::Parameter(format!("spot must be > 0, got {s_prev}")));
    }
    if n < 1 || n > fs.n_intervals {
        return Err(Error::Parameter(format!("date {n} outside 1..={}", fs.n_intervals)));
    }
    let ln_s = s_prev.ln();
    let mut acc = Complex64::new(0.0, 0.0);
    for (j, (z, w)) in fs.nodes.iter().enumerate() {
        acc += w * fs.g[j][n - 1] * fs.h[j][n] * ((z - 1.0) * ln_s).exp();
    }
    real_part_checked(acc, &format!("xi_{n}"))
}

/// Per-path state of the feedback strategy: the running gain
/// G_{n-1} = sum_{i<n} phi*_i dS_i and the current date.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategyState {
    gain: f64,
    date: usize,
}

impl StrategyState {
    /// Fresh state before the first trade (G_0 = 0, next date 1).
    pub fn new() -> Self {
        Self { gain: 0.0, date: 1 }
    }

    pub fn date(&self) -> usize {
        self.date
    }

    pub fn gain(&self) -> f64 {
        self.gain
    }

    /// Records the executed trade: phi*_n and the realized dS_n.
    pub fn advance(&mut self, phi: f64, delta_s: f64) {
        self.gain += phi * delta_s;
        self.date += 1;
    }
}

impl Default for StrategyState {
    fn default() -> Self {
        Self::new()
    }
}

/// One step of the variance-optimal strategy at date n = `state.date()`:
/// phi*_n = xi_n + (lam_coeff[n]/s_prev) (H_{n-1}(s_prev) - H_0 - G_{n-1}).
pub fn vo_strategy_step(
    state: &StrategyState,
    fs: &FsCoefficients,
    lam: &LambdaProcess,
    s_prev: f64,
    h0: f64,
) -> Result<f64> {
    let n = state.date;
    let xi = pure_hedge_ratio(fs, s_prev, n)?;
    let h_prev = mean_value_process(fs, s_prev, n - 1)?;
    Ok(xi + lam.coeff(n) / s_prev * (h_prev - h0 - state.gain))
}

/// Deterministic mean-variance tradeoff process: cumulative sums of
/// (m(1,k) - 1)^2 / (m(2,k) - m(1,k)^2).
pub fn mvt_process(table: &CumulantTable) -> Result<Vec<f64>> {
    let mut acc = 0.0;
    (1..=table.n_intervals())
        .map(|k| {
            let rho11 = table.rho11(k);
            if !(rho11 > 0.0) {
                return Err(Error::Assumption(format!(
                    "Var[e^dX - 1] = {rho11} at k = {k} is not positive"
                )));
            }
            let e = table.em1(k);
            acc += e * e / rho11;
            Ok(acc)
        })
        .collect()
}
