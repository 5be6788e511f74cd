//! Analytic variance of hedging errors.
//!
//! The optimal-error variance is the double integral of
//!   J0(y,z) = s0^{y+z} sum_{k=1}^N b(y,z;k) h(y,k) h(z,k)
//!             prod_{l<k} m(y+z,l) prod_{j>k} a(j)
//! against Pi x Pi, with
//!   rho(y,z;k) = m(y+z,k) - m(y,k) m(z,k),
//!   b(y,z;k)   = rho(y,z;k) - rho(y,1;k) rho(z,1;k) / rho(1,1;k),
//!   a(j)       = (m(2,j) - m(1,j)^2) / (m(2,j) - 2 m(1,j) + 1).
//!
//! Digital measures get a moment completion: the kernel's only
//! non-decaying piece along y + z = const is sum_k -> m(y+z,N) at k = N,
//! whose double integral is exactly E[f(S_N)^2] = E[f(S_N)] for an
//! indicator payoff. Subtracting s0^{y+z} prod_l m(y+z,l) per pair and
//! adding the one-dimensional expectation makes the truncated double sum
//! converge exponentially instead of O(1/U).
//!
//! Deterministic-coefficient strategies (Black-Scholes delta, pure FS
//! ratios) have their bias and variance evaluated from the same cumulant
//! table; the variance is second moment minus squared mean.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::cmath::cexpm1;
use crate::error::{Error, Result};
use crate::fs_core::{compute_fs, initial_capital, FsCoefficients};
use crate::payoff_measures::{DiscretizedMeasure, KernelKind};
use crate::pii_models::CumulantTable;

/// Relative ceiling for the imaginary residue of the double sum.
const IMAG_TOL: f64 = 1e-6;

/// rho(y,z;k) = m(y+z,k) - m(y,k) m(z,k), symmetric in (y,z).
pub fn rho(table: &CumulantTable, y: Complex64, z: Complex64, k: usize) -> Result<Complex64> {
    for re in [y.re, z.re, y.re + z.re, y.re + 1.0, z.re + 1.0] {
        table.check_in_domain(re)?;
    }
    Ok(table.rho(y, z, k))
}

/// b(y,z;k) = rho(y,z;k) - rho(y,1;k) rho(z,1;k) / rho(1,1;k);
/// vanishes identically at z = 1 and on two-point (complete) models.
pub fn b_coeff(table: &CumulantTable, y: Complex64, z: Complex64, k: usize) -> Result<Complex64> {
    let r = rho(table, y, z, k)?;
    let rho11 = table.rho11(k);
    if !(rho11 > 0.0) {
        return Err(Error::Assumption(format!(
            "rho(1,1;{k}) = {rho11} is not positive"
        )));
    }
    let one = Complex64::new(1.0, 0.0);
    Ok(r - table.rho(y, one, k) * table.rho(z, one, k) / rho11)
}

/// Per-date scalars of the error kernel: rho(1,1;k), a(k) and its suffix
/// products, E[(e^dX - 1)^2].
#[derive(Debug, Clone)]
pub struct ErrorKernelCache {
    pub rho11: Vec<f64>,
    pub d2: Vec<f64>,
    pub a: Vec<f64>,
    /// suffix_a[k-1] = prod_{j=k+1}^N a(j); suffix_a[N-1] = 1.
    pub suffix_a: Vec<f64>,
    pub em1: Vec<f64>,
}

impl ErrorKernelCache {
    pub fn build(table: &CumulantTable) -> Result<Self> {
        let n = table.n_intervals();
        let mut rho11 = Vec::with_capacity(n);
        let mut d2 = Vec::with_capacity(n);
        let mut a = Vec::with_capacity(n);
        let mut em1 = Vec::with_capacity(n);
        for k in 1..=n {
            let r = table.rho11(k);
            let d = table.d2(k);
            if !(r > 0.0) || !(d > 0.0) {
                return Err(Error::Assumption(format!(
                    "degenerate increment at k = {k}: rho11 = {r}, E[(e^dX-1)^2] = {d}"
                )));
            }
            rho11.push(r);
            d2.push(d);
            a.push(r / d);
            em1.push(table.em1(k));
        }
        let mut suffix_a = vec![1.0; n];
        for k in (0..n - 1).rev() {
            suffix_a[k] = suffix_a[k + 1] * a[k + 1];
        }
        debug_assert!(suffix_a.iter().all(|v| v.is_finite()));
        Ok(Self { rho11, d2, a, suffix_a, em1 })
    }
}

/// Initial capital, hedging-error variance and its per-date split.
#[derive(Debug, Clone)]
pub struct ErrorReport {
    /// Variance of the optimal hedging error (currency^2), clamped at 0.
    pub j0: f64,
    /// Standard deviation sqrt(max(J0, 0)).
    pub std: f64,
    /// Variance-optimal initial capital.
    pub v0: f64,
    /// Real part of the date-k term of the double sum (empty for the
    /// stationary closed form, which collapses the date sum).
    pub per_date: Vec<f64>,
    /// Imaginary residue of the double sum, relative to |J0|.
    pub imag_residue: f64,
    /// Wall time spent in the double sum.
    pub elapsed: std::time::Duration,
}

/// True when the measure is a single principal-value (digital) line, the
/// only case whose error kernel needs the moment completion (and the only
/// one where E[f^2] = E[f] closes it exactly).
fn needs_completion(d: &DiscretizedMeasure) -> bool {
    let p = d.provenance();
    p.n_atoms == 0 && p.contours.len() == 1 && p.contours[0].kernel == KernelKind::Digital
}

/// E[f(S_N)] as the node sum of s0^z prod_k m(z,k).
fn expected_payoff(table: &CumulantTable, d: &DiscretizedMeasure, s0: f64) -> Complex64 {
    let n = table.n_intervals();
    let mut buf = Vec::new();
    let mut acc = Complex64::new(0.0, 0.0);
    for (z, w) in d.nodes() {
        table.m_profile_into(*z, &mut buf);
        let prod: Complex64 = buf[..n].iter().product();
        acc += w * prod * (z * s0.ln()).exp();
    }
    acc
}

fn pairwise_csum(x: &[Complex64]) -> Complex64 {
    match x.len() {
        0 => Complex64::new(0.0, 0.0),
        1 => x[0],
        2 => x[0] + x[1],
        n => pairwise_csum(&x[..n / 2]) + pairwise_csum(&x[n / 2..]),
    }
}

/// Exact variance of the optimal hedging error for the payoff measure
/// `d`, by the general non-stationary kernel. O(M^2 N) over M nodes with
/// cached per-node tables; deterministic reduction order.
pub fn j0_total(table: &CumulantTable, d: &DiscretizedMeasure, s0: f64) -> Result<ErrorReport> {
    if !(s0 > 0.0) {
        return Err(Error::Parameter(format!("s0 must be > 0, got {s0}")));
    }
    let started = std::time::Instant::now();
    let n = table.n_intervals();
    let fs = compute_fs(table, d)?;
    let cache = ErrorKernelCache::build(table)?;
    let v0 = initial_capital(&fs, s0)?;
    let complete = needs_completion(d);

    let nodes = d.nodes();
    // per-node log-m profiles keep rho(y,z;k) cancellation-safe; finite-
    // support models fall back to their exact covariance form
    let mut probe = Vec::new();
    let has_psi = nodes
        .first()
        .is_none_or(|(z, _)| table.log_m_profile_into(*z, &mut probe));
    let psi_node: Vec<Vec<Complex64>> = if has_psi {
        nodes
            .iter()
            .map(|(z, _)| {
                let mut buf = Vec::new();
                table.log_m_profile_into(*z, &mut buf);
                buf
            })
            .collect()
    } else {
        Vec::new()
    };
    let fsc = &fs;

    // row i: sum over j >= i of w_i w_j J0(z_i, z_j), off-diagonal doubled
    let rows: Vec<(Complex64, Vec<Complex64>)> = (0..nodes.len())
        .into_par_iter()
        .map(|i| {
            let (zi, wi) = nodes[i];
            let mut per_date = vec![Complex64::new(0.0, 0.0); n];
            let mut total = Complex64::new(0.0, 0.0);
            let mut buf = Vec::with_capacity(n);
            for (j, &(zj, wj)) in nodes.iter().enumerate().skip(i) {
                let s = zi + zj;
                if has_psi {
                    table.log_m_profile_into(s, &mut buf);
                } else {
                    table.m_profile_into(s, &mut buf);
                }
                let weight = if i == j { wi * wj } else { 2.0 * wi * wj };
                let s0_pow = (s * s0.ln()).exp() * weight;
                let mut prefix = Complex64::new(1.0, 0.0);
                let mut pair_total = Complex64::new(0.0, 0.0);
                for k in 1..=n {
                    let (rho_pair, m_pair) = if has_psi {
                        let psi_yz = buf[k - 1];
                        (
                            cexpm1(psi_yz) - cexpm1(psi_node[i][k - 1] + psi_node[j][k - 1]),
                            psi_yz.exp(),
                        )
                    } else {
                        (table.rho(zi, zj, k), buf[k - 1])
                    };
                    let b = rho_pair - fsc.g(i, k) * fsc.g(j, k) * cache.rho11[k - 1];
                    let term = b * fsc.h(i, k) * fsc.h(j, k) * prefix * cache.suffix_a[k - 1];
                    per_date[k - 1] += s0_pow * term;
                    pair_total += term;
                    prefix *= m_pair;
                }
                if complete {
                    // remove the non-decaying second-moment piece
                    pair_total -= prefix;
                    per_date[n - 1] -= s0_pow * prefix;
                }
                total += s0_pow * pair_total;
            }
            (total, per_date)
        })
        .collect();

    let mut total = pairwise_csum(&rows.iter().map(|r| r.0).collect::<Vec<_>>());
    let mut per_date: Vec<Complex64> = (0..n)
        .map(|k| pairwise_csum(&rows.iter().map(|r| r.1[k]).collect::<Vec<_>>()))
        .collect();
    if complete {
        let q = expected_payoff(table, d, s0);
        total += q;
        per_date[n - 1] += q;
    }

    let scale = total.re.abs().max(1e-300);
    let residue = total.im.abs() / scale;
    if residue > IMAG_TOL {
        return Err(Error::Numerics(format!(
            "imaginary residue {residue:.3e} in the error double sum"
        )));
    }
    let j0 = total.re.max(0.0);
    Ok(ErrorReport {
        j0,
        std: j0.sqrt(),
        v0,
        per_date: per_date.into_iter().map(|c| c.re).collect(),
        imag_residue: residue,
        elapsed: started.elapsed(),
    })
}

/// Closed-form J0 for stationary increments on a uniform grid:
/// J0(y,z) = s0^{y+z} b(y,z) (q^N - m(y+z)^N)/(q - m(y+z)) with
/// q = a H(y) H(z); the degenerate q = m(y+z) branch uses N m^{N-1}.
/// Must agree with [`j0_total`] to 1e-10 relative.
pub fn j0_stationary(
    table: &CumulantTable,
    d: &DiscretizedMeasure,
    s0: f64,
) -> Result<ErrorReport> {
    let started = std::time::Instant::now();
    if !table.is_stationary_uniform() {
        return Err(Error::Assumption(
            "stationary closed form needs i.i.d. increments on a uniform grid".into(),
        ));
    }
    if !(s0 > 0.0) {
        return Err(Error::Parameter(format!("s0 must be > 0, got {s0}")));
    }
    let n = table.n_intervals();
    let fs = compute_fs(table, d)?;
    let cache = ErrorKernelCache::build(table)?;
    let v0 = initial_capital(&fs, s0)?;
    let complete = needs_completion(d);
    let a = cache.a[0];
    let rho11 = cache.rho11[0];
    let em1 = cache.em1[0];
    let one = Complex64::new(1.0, 0.0);

    let nodes = d.nodes();
    // one-step quantities per node
    let per_node: Vec<(Complex64, Complex64, Complex64)> = nodes
        .iter()
        .map(|(z, _)| {
            let m = table.m(*z, 1);
            let gz = table.rho(*z, one, 1) / rho11;
            let hz = m - gz * em1; // one-step h
            (m, gz, hz)
        })
        .collect();

    let rows: Vec<Complex64> = (0..nodes.len())
        .into_par_iter()
        .map(|i| {
            let (zi, wi) = nodes[i];
            let (_, gi, hi) = per_node[i];
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, &(zj, wj)) in nodes.iter().enumerate().skip(i) {
                let (_, gj, hj) = per_node[j];
                let myz = table.m(zi + zj, 1);
                let rho_pair = table.rho(zi, zj, 1);
                let b = rho_pair - gi * gj * rho11;
                let q = a * hi * hj;
                // near q = m the closed form cancels catastrophically;
                // the direct power sum is exact there and collapses to
                // the limit value N m^{N-1} at equality
                let geom = if (q - myz).norm() < 1e-6 * (q.norm() + myz.norm()) {
                    let mut acc = Complex64::new(0.0, 0.0);
                    let mut mp = Complex64::new(1.0, 0.0);
                    for k in 1..=n {
                        acc += mp * q.powu((n - k) as u32);
                        mp *= myz;
                    }
                    acc
                } else {
                    (q.powu(n as u32) - myz.powu(n as u32)) / (q - myz)
                };
                let weight = if i == j { wi * wj } else { 2.0 * wi * wj };
                let mut pair = b * geom;
                if complete {
                    pair -= myz.powu(n as u32);
                }
                acc += weight * ((zi + zj) * s0.ln()).exp() * pair;
            }
            acc
        })
        .collect();

    let mut total = pairwise_csum(&rows);
    if complete {
        total += expected_payoff(table, d, s0);
    }
    let scale = total.re.abs().max(1e-300);
    let residue = total.im.abs() / scale;
    if residue > IMAG_TOL {
        return Err(Error::Numerics(format!(
            "imaginary residue {residue:.3e} in the stationary error sum"
        )));
    }
    let j0 = total.re.max(0.0);
    Ok(ErrorReport {
        j0,
        std: j0.sqrt(),
        v0,
        per_date: Vec::new(),
        imag_residue: residue,
        elapsed: started.elapsed(),
    })
}

/// Deterministic per-node, per-date strategy coefficients f(z_j)_k for
/// strategies of the form v_k = int f(z)_k S_{k-1}^{z-1} Pi(dz).
#[derive(Debug, Clone)]
pub struct DeterministicCoeffs {
    nodes: Vec<(Complex64, Complex64)>,
    /// f[j][k-1] = f(z_j)_k.
    f: Vec<Vec<Complex64>>,
}

impl DeterministicCoeffs {
    pub fn new(nodes: Vec<(Complex64, Complex64)>, f: Vec<Vec<Complex64>>) -> Self {
        assert_eq!(nodes.len(), f.len());
        Self { nodes, f }
    }

    pub fn coeff(&self, j: usize, k: usize) -> Complex64 {
        self.f[j][k - 1]
    }

    pub fn n_intervals(&self) -> usize {
        self.f.first().map_or(0, Vec::len)
    }

    /// The executed hedge ratio v_k at S_{k-1} = `s_prev`.
    pub fn ratio(&self, s_prev: f64, k: usize) -> f64 {
        let ln_s = s_prev.ln();
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, (z, w)) in self.nodes.iter().enumerate() {
            acc += w * self.f[j][k - 1] * ((z - 1.0) * ln_s).exp();
        }
        acc.re
    }
}

/// Black-Scholes delta coefficients f(z)_n = z prod_{k=n}^N m_bs(z,k)
/// with m_bs(z,k) = exp(-Var[dX_k] z / 2 + Var[dX_k] z^2 / 2), and the
/// matching initial capital V0_bs = int s0^z prod_k m_bs(z,k) Pi(dz).
pub fn bs_delta_coeffs(
    table: &CumulantTable,
    d: &DiscretizedMeasure,
    s0: f64,
) -> Result<(DeterministicCoeffs, f64)> {
    if !(s0 > 0.0) {
        return Err(Error::Parameter(format!("s0 must be > 0, got {s0}")));
    }
    let n = table.n_intervals();
    let vars: Vec<f64> = (1..=n).map(|k| table.variance_of_increment(k)).collect();
    let m_bs = |z: Complex64, k: usize| -> Complex64 {
        (0.5 * vars[k - 1] * (z * z - z)).exp()
    };
    let nodes = d.nodes().to_vec();
    let mut f = Vec::with_capacity(nodes.len());
    let mut v0 = Complex64::new(0.0, 0.0);
    for (z, w) in &nodes {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
        let mut suffix = Complex64::new(1.0, 0.0);
        for k in (1..=n).rev() {
            suffix *= m_bs(*z, k);
            coeffs[k - 1] = z * suffix;
        }
        v0 += w * suffix * (z * s0.ln()).exp();
        f.push(coeffs);
    }
    if v0.im.abs() > 1e-8 * (1.0 + v0.re.abs()) {
        return Err(Error::Numerics(format!(
            "imaginary residue {:.3e} in the Black-Scholes capital",
            v0.im
        )));
    }
    Ok((DeterministicCoeffs::new(nodes, f), v0.re))
}

/// Pure FS hedge as deterministic coefficients: f(z)_n = g(z,n) h(z,n).
pub fn fs_pure_coeffs(fs: &FsCoefficients) -> DeterministicCoeffs {
    let n = fs.n_intervals();
    let f = (0..fs.nodes().len())
        .map(|j| (1..=n).map(|k| fs.g(j, k) * fs.h(j, k)).collect())
        .collect();
    DeterministicCoeffs::new(fs.nodes().to_vec(), f)
}

/// Bias and variance of the hedging error of a deterministic-coefficient
/// strategy with initial capital `c`. The bias is
/// E[f(S_N)] - c - sum_k E[v_k dS_k]; the variance is the second moment
/// of the zero-capital error minus its squared mean.
pub fn deterministic_strategy_error(
    table: &CumulantTable,
    d: &DiscretizedMeasure,
    coeffs: &DeterministicCoeffs,
    c: f64,
    s0: f64,
) -> Result<(f64, f64)> {
    if !(s0 > 0.0) {
        return Err(Error::Parameter(format!("s0 must be > 0, got {s0}")));
    }
    let n = table.n_intervals();
    if coeffs.n_intervals() != n {
        return Err(Error::Parameter(format!(
            "coefficients cover {} dates, table has {n}",
            coeffs.n_intervals()
        )));
    }
    // domain checks as in compute_fs
    compute_fs(table, d)?;
    let cache = ErrorKernelCache::build(table)?;
    let complete = needs_completion(d);
    let nodes = d.nodes();
    let ln_s0 = s0.ln();

    // per-node tables: m, dm = m(z+1,.) - m(z,.), suffix products of m,
    // and the backward coupling sums T
    struct NodeTables {
        m: Vec<Complex64>,
        dm: Vec<Complex64>,
        suff: Vec<Complex64>,
        t: Vec<Complex64>,
    }
    let one = Complex64::new(1.0, 0.0);
    let tables: Vec<NodeTables> = nodes
        .iter()
        .enumerate()
        .map(|(j, (z, _))| {
            let mut m = Vec::new();
            table.m_profile_into(*z, &mut m);
            let dm: Vec<Complex64> = (1..=n)
                .map(|k| table.m_minus_one(*z + one, k) - table.m_minus_one(*z, k))
                .collect();
            let mut suff = vec![Complex64::new(1.0, 0.0); n + 1];
            for k in (1..=n).rev() {
                suff[k - 1] = suff[k] * m[k - 1];
            }
            // t[k] = sum_{j'>k} f_{j'} (m(1,j')-1) prod_{l=k+1}^{j'-1} m(z,l)
            let mut t = vec![Complex64::new(0.0, 0.0); n + 1];
            for k in (0..n).rev() {
                t[k] = coeffs.coeff(j, k + 1) * cache.em1[k] + m[k] * t[k + 1];
            }
            NodeTables { m, dm, suff, t }
        })
        .collect();

    // bias: int s0^z [prod m - sum_k f_k (m(1,k)-1) prefix(k)] Pi(dz) - c
    let mut bias0 = Complex64::new(0.0, 0.0);
    for (j, (z, w)) in nodes.iter().enumerate() {
        let nt = &tables[j];
        let mut prefix = Complex64::new(1.0, 0.0);
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 1..=n {
            acc += coeffs.coeff(j, k) * cache.em1[k - 1] * prefix;
            prefix *= nt.m[k - 1];
        }
        bias0 += w * (z * ln_s0).exp() * (prefix - acc);
    }
    if bias0.im.abs() > 1e-8 * (1.0 + bias0.re.abs()) {
        return Err(Error::Numerics(format!(
            "imaginary residue {:.3e} in the strategy bias",
            bias0.im
        )));
    }

    // second moment of the zero-capital error, pair sum
    let rows: Vec<Complex64> = (0..nodes.len())
        .into_par_iter()
        .map(|i| {
            let (zi, wi) = nodes[i];
            let ti = &tables[i];
            let mut acc = Complex64::new(0.0, 0.0);
            let mut mp = Vec::with_capacity(n);
            for (j, &(zj, wj)) in nodes.iter().enumerate().skip(i) {
                let tj = &tables[j];
                let s = zi + zj;
                table.m_profile_into(s, &mut mp);
                let weight = if i == j { wi * wj } else { 2.0 * wi * wj };
                let s0_pow = (s * ln_s0).exp() * weight;
                let mut prefix = Complex64::new(1.0, 0.0);
                let mut v2 = Complex64::new(0.0, 0.0);
                let mut v3 = Complex64::new(0.0, 0.0);
                let mut v4 = Complex64::new(0.0, 0.0);
                for k in 1..=n {
                    let fi = coeffs.coeff(i, k);
                    let fj = coeffs.coeff(j, k);
                    v2 += fi * tj.dm[k - 1] * prefix * tj.suff[k];
                    v3 += fj * ti.dm[k - 1] * prefix * ti.suff[k];
                    v4 += prefix
                        * (fi * fj * cache.d2[k - 1]
                            + fj * ti.dm[k - 1] * ti.t[k]
                            + fi * tj.dm[k - 1] * tj.t[k]);
                    prefix *= mp[k - 1];
                }
                let v1 = if complete { Complex64::new(0.0, 0.0) } else { prefix };
                acc += s0_pow * (v1 - v2 - v3 + v4);
            }
            acc
        })
        .collect();
    let mut second = pairwise_csum(&rows);
    if complete {
        second += expected_payoff(table, d, s0);
    }
    if second.im.abs() > IMAG_TOL * (1.0 + second.re.abs()) {
        return Err(Error::Numerics(format!(
            "imaginary residue {:.3e} in the strategy second moment",
            second.im
        )));
    }

    let mean0 = bias0.re; // E[error] with zero initial capital
    let variance = second.re - mean0 * mean0;
    Ok((mean0 - c, variance))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fs_core::{initial_capital, lambda_coeffs, vo_strategy_step, StrategyState};
    use crate::payoff_measures::{
        call_measure, digital_measure, discretize, discretize_default, ComplexMeasure,
    };
    use crate::pii_models::{
        discretize_model, electricity_standard, nig_standard, BinomialParams, ContinuousModel,
        GaussianParams, TradingGrid,
    };

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn nig_table(n: usize) -> CumulantTable {
        let grid = TradingGrid::uniform(n, 0.25);
        discretize_model(&ContinuousModel::NigLevy(nig_standard()), &grid).unwrap()
    }

    #[test]
    fn rho_vanishes_at_zero_and_is_positive_on_the_diagonal() {
        let table = nig_table(6);
        for k in 1..=6 {
            let r0 = rho(&table, c(0.0, 0.0), c(0.7, 3.0), k).unwrap();
            assert!(r0.norm() < 1e-14);
            let r11 = rho(&table, c(1.0, 0.0), c(1.0, 0.0), k).unwrap();
            assert!(r11.im.abs() < 1e-15);
            assert!(r11.re > 0.0);
            assert!((r11.re - table.rho11(k)).abs() < 1e-15 * r11.re);
        }
    }

    #[test]
    fn rho_factorizes_on_two_point_models() {
        // rho(y,z;k) rho(1,1;k) = rho(y,1;k) rho(z,1;k) on a binomial
        let grid = TradingGrid::uniform(4, 1.0);
        let model =
            ContinuousModel::Binomial(BinomialParams::constant(0.09, -0.06, 0.37, 4).unwrap());
        let table = discretize_model(&model, &grid).unwrap();
        let one = c(1.0, 0.0);
        for (y, z) in [(c(0.5, 2.0), c(0.3, -1.0)), (c(2.0, 0.0), c(-1.0, 5.0))] {
            let lhs = rho(&table, y, z, 2).unwrap() * rho(&table, one, one, 2).unwrap();
            let rhs = rho(&table, y, one, 2).unwrap() * rho(&table, z, one, 2).unwrap();
            assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm().max(1e-30), "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn rho_rejects_out_of_strip_arguments() {
        let table = nig_table(3);
        let (_, hi) = table.domain();
        assert!(rho(&table, c(hi, 0.0), c(hi, 0.0), 1).is_err());
    }

    #[test]
    fn b_coeff_vanishes_at_one_and_on_binomial() {
        let table = nig_table(5);
        for k in 1..=5 {
            let b = b_coeff(&table, c(0.4, 7.0), c(1.0, 0.0), k).unwrap();
            assert!(b.norm() < 1e-13, "b(y,1;{k}) = {b}");
        }
        let grid = TradingGrid::uniform(4, 1.0);
        let model =
            ContinuousModel::Binomial(BinomialParams::constant(0.09, -0.06, 0.37, 4).unwrap());
        let bino = discretize_model(&model, &grid).unwrap();
        for (y, z) in [(c(0.5, 2.0), c(0.3, -1.0)), (c(2.0, 0.0), c(0.5, 0.0))] {
            let b = b_coeff(&bino, y, z, 3).unwrap();
            assert!(b.norm() < 1e-12, "binomial b = {b}");
        }
    }

    #[test]
    fn b_coeff_matches_monte_carlo_moments_on_gaussian() {
        // brute-force moment oracle via simulation of the increment law
        let grid = TradingGrid::uniform(4, 0.25);
        let model = ContinuousModel::Gaussian(GaussianParams::new(0.02, 0.4).unwrap());
        let table = discretize_model(&model, &grid).unwrap();
        let y = c(0.5, 0.0);
        let z = c(0.5, 0.0);
        let b = b_coeff(&table, y, z, 1).unwrap();
        assert!(b.norm() > 1e-6, "incomplete model must have b != 0");
        // brute-force moments from normal samples
        use rand::SeedableRng;
        use rand_distr::{Distribution, StandardNormal};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let (dt, mu, sg): (f64, f64, f64) = (0.0625, 0.02, 0.4);
        let n = 2_000_000;
        let mut sums = [0.0f64; 5]; // e^{yX}, e^{X}, e^{2X}, e^{(y+z)X}, e^{(y+1)X}
        for _ in 0..n {
            let g: f64 = StandardNormal.sample(&mut rng);
            let x = mu * dt + sg * dt.sqrt() * g;
            sums[0] += (0.5 * x).exp();
            sums[1] += x.exp();
            sums[2] += (2.0 * x).exp();
            sums[3] += x.exp(); // y + z = 1
            sums[4] += (1.5 * x).exp();
        }
        let m = |i: usize| sums[i] / n as f64;
        let rho_yz = m(3) - m(0) * m(0);
        let rho_11 = m(2) - m(1) * m(1);
        let rho_y1 = m(4) - m(0) * m(1);
        let b_mc = rho_yz - rho_y1 * rho_y1 / rho_11;
        // MC error on these tiny covariances is relative-to-moments
        assert!(
            (b - b_mc).norm() < 5e-3 * b.norm() + 1e-7,
            "b {b} vs MC {b_mc}"
        );
    }

    #[test]
    fn kernel_cache_invariants() {
        for table in [nig_table(8), {
            let grid = TradingGrid::uniform(8, 0.25);
            discretize_model(&ContinuousModel::Electricity(electricity_standard()), &grid).unwrap()
        }] {
            let cache = ErrorKernelCache::build(&table).unwrap();
            for k in 0..8 {
                assert!(cache.a[k] > 0.0 && cache.a[k] <= 1.0, "a = {}", cache.a[k]);
                assert!(cache.rho11[k] > 0.0);
                assert!(cache.suffix_a[k] > 0.0 && cache.suffix_a[k] <= 1.0);
            }
        }
    }

    #[test]
    fn binomial_error_is_zero_for_atomic_payoffs() {
        let n = 9;
        let grid = TradingGrid::uniform(n, 1.0);
        let model = ContinuousModel::Binomial(
            BinomialParams::new(0.07, -0.05, (0..n).map(|k| 0.35 + 0.03 * k as f64).collect())
                .unwrap(),
        );
        let table = discretize_model(&model, &grid).unwrap();
        let s0: f64 = 100.0;
        for z in [c(2.0, 0.0), c(0.5, 0.0), c(-1.0, 0.0)] {
            let d = discretize(&ComplexMeasure::atom(z, c(1.0, 0.0)), 1, 2);
            let rep = j0_total(&table, &d, s0).unwrap();
            let scale = s0.powf(2.0 * z.re);
            assert!(rep.j0.abs() < 1e-10 * scale, "J0 = {} at z = {z}", rep.j0);
        }
    }

    #[test]
    fn digital_error_variance_regression() {
        // frozen from the converged computation, cross-validated by Monte
        // Carlo (empirical 0.044149 +- 0.00015 on 4e5 paths) and by
        // Richardson extrapolation of raw truncated sums
        let table = nig_table(12);
        let d = discretize_default(&digital_measure(99.0, 0.5).unwrap());
        let rep = j0_total(&table, &d, 100.0).unwrap();
        assert!((rep.j0 - 0.044351).abs() < 2e-5, "J0 = {}", rep.j0);
        assert!((rep.v0 - 0.481323).abs() < 1e-5, "V0 = {}", rep.v0);
        assert!(rep.imag_residue < 1e-10);
        assert_eq!(rep.per_date.len(), 12);
        let sum: f64 = rep.per_date.iter().sum();
        assert!((sum - rep.j0).abs() < 1e-12 * rep.j0);
    }

    #[test]
    fn stationary_closed_form_equals_general_sum() {
        let table = nig_table(12);
        for d in [
            discretize_default(&digital_measure(99.0, 0.5).unwrap()),
            discretize_default(&call_measure(99.0, 0.5).unwrap()),
            discretize(&ComplexMeasure::atom(c(1.7, 0.0), c(2.0, 0.0)), 1, 2),
        ] {
            let full = j0_total(&table, &d, 100.0).unwrap();
            let stat = j0_stationary(&table, &d, 100.0).unwrap();
            assert!(
                (full.j0 - stat.j0).abs() <= 1e-10 * full.j0.abs().max(1e-12),
                "{} vs {}",
                full.j0,
                stat.j0
            );
        }
    }

    #[test]
    fn stationary_rejects_non_uniform_or_non_stationary() {
        let grid = TradingGrid::new(vec![0.0, 0.04, 0.25]).unwrap();
        let table = discretize_model(&ContinuousModel::NigLevy(nig_standard()), &grid).unwrap();
        let d = discretize(&ComplexMeasure::atom(c(1.0, 0.0), c(1.0, 0.0)), 1, 2);
        assert!(matches!(j0_stationary(&table, &d, 100.0), Err(Error::Assumption(_))));
        let grid = TradingGrid::uniform(4, 0.25);
        let elec =
            discretize_model(&ContinuousModel::Electricity(electricity_standard()), &grid).unwrap();
        assert!(matches!(j0_stationary(&elec, &d, 100.0), Err(Error::Assumption(_))));
    }

    #[test]
    fn stationary_single_interval_collapses_the_sum() {
        let table = nig_table(1);
        let z = c(1.4, 0.0);
        let d = discretize(&ComplexMeasure::atom(z, c(1.0, 0.0)), 1, 2);
        let rep = j0_stationary(&table, &d, 100.0).unwrap();
        // N = 1: J0 = s0^{2z} b(z,z;1)
        let b = b_coeff(&table, z, z, 1).unwrap();
        let expect = (100.0f64).powf(2.0 * z.re) * b.re;
        assert!((rep.j0 - expect).abs() < 1e-12 * expect.abs());
    }

    #[test]
    fn stationary_degenerate_branch_is_finite() {
        // martingale Gaussian with a 0-atom hits a(y,z) = m(y+z) exactly;
        // without the limit branch the geometric ratio is 0/0
        let sigma = 0.4;
        let grid = TradingGrid::uniform(6, 0.25);
        let model =
            ContinuousModel::Gaussian(GaussianParams::new(-0.5 * sigma * sigma, sigma).unwrap());
        let table = discretize_model(&model, &grid).unwrap();
        let mut m = ComplexMeasure::atom(c(0.0, 0.0), c(1.0, 0.0));
        m.atoms.push((c(0.8, 0.0), c(1.0, 0.0)));
        let d = discretize(&m, 1, 2);
        let stat = j0_stationary(&table, &d, 100.0).unwrap();
        assert!(stat.j0.is_finite());
        let full = j0_total(&table, &d, 100.0).unwrap();
        assert!((full.j0 - stat.j0).abs() <= 1e-10 * full.j0.abs().max(1e-12));
    }

    #[test]
    fn formula_matches_exhaustive_trinomial_tree() {
        // three-point increments: enumerate all 3^N paths, execute the
        // feedback strategy, and average the squared terminal error
        let n = 5;
        let outcomes = vec![0.06, 0.0, -0.07];
        let probs: Vec<Vec<f64>> =
            (0..n).map(|k| vec![0.3 + 0.02 * k as f64, 0.25, 0.45 - 0.02 * k as f64]).collect();
        let grid = TradingGrid::uniform(n, 1.0);
        let table =
            CumulantTable::from_finite_increments(outcomes.clone(), probs.clone(), &grid).unwrap();
        let s0 = 100.0;
        // conjugate atom pair: a real-valued non-replicable payoff
        let mut m = ComplexMeasure::atom(c(0.9, 2.0), c(0.5, -0.3));
        m.atoms.push((c(0.9, -2.0), c(0.5, 0.3)));
        let d = discretize(&m, 1, 2);
        let rep = j0_total(&table, &d, s0).unwrap();

        let fs = compute_fs(&table, &d).unwrap();
        let lam = lambda_coeffs(&table).unwrap();
        let h0 = initial_capital(&fs, s0).unwrap();
        let payoff = |s: f64| -> f64 {
            d.nodes().iter().map(|(z, w)| (w * (z * s.ln()).exp()).re).sum()
        };
        let mut mean_sq = 0.0;
        let mut mean = 0.0;
        let paths = 3usize.pow(n as u32);
        for path in 0..paths {
            let mut digits = path;
            let mut s = s0;
            let mut prob = 1.0;
            let mut state = StrategyState::new();
            for k in 1..=n {
                let j = digits % 3;
                digits /= 3;
                let phi = vo_strategy_step(&state, &fs, &lam, s, h0).unwrap();
                let s_next = s * outcomes[j].exp();
                prob *= probs[k - 1][j];
                state.advance(phi, s_next - s);
                s = s_next;
            }
            let eps = payoff(s) - h0 - state.gain();
            mean_sq += prob * eps * eps;
            mean += prob * eps;
        }
        assert!(mean.abs() < 1e-10, "optimal error has zero mean, got {mean}");
        assert!(
            (rep.j0 - mean_sq).abs() <= 1e-9 * mean_sq,
            "formula {} vs tree {mean_sq}",
            rep.j0
        );
    }

    #[test]
    fn unhedged_error_is_payoff_mean_and_variance() {
        let table = nig_table(12);
        let d = discretize_default(&digital_measure(99.0, 0.5).unwrap());
        let zero =
            DeterministicCoeffs::new(d.nodes().to_vec(), vec![vec![c(0.0, 0.0); 12]; d.len()]);
        let (bias, variance) = deterministic_strategy_error(&table, &d, &zero, 0.0, 100.0).unwrap();
        // digital: E[f] = q, Var[f] = q (1 - q)
        let q = expected_payoff(&table, &d, 100.0).re;
        assert!((bias - q).abs() < 1e-10, "bias {bias} vs q {q}");
        assert!((variance - q * (1.0 - q)).abs() < 1e-9, "var {variance} vs {}", q * (1.0 - q));
    }

    #[test]
    fn bs_coefficients_vanish_at_zero_node_and_price_matches() {
        let grid = TradingGrid::uniform(10, 0.25);
        let table =
            discretize_model(&ContinuousModel::Electricity(electricity_standard()), &grid).unwrap();
        let mut m = call_measure(99.0, 0.5).unwrap();
        m.atoms.push((c(0.0, 0.0), c(0.0, 0.0)));
        let d = discretize(&m, 32, 12);
        let (coeffs, v0_bs) = bs_delta_coeffs(&table, &d, 100.0).unwrap();
        let zero_idx = d.nodes().iter().position(|(z, _)| z.norm() == 0.0).unwrap();
        for k in 1..=10 {
            assert_eq!(coeffs.coeff(zero_idx, k), c(0.0, 0.0));
        }
        // lognormal price with the total variance of the model
        assert!((v0_bs - 8.7037).abs() < 3e-3, "V0_bs = {v0_bs}");
        // within 1% of the variance-optimal capital
        let fs = compute_fs(&table, &d).unwrap();
        let v0 = initial_capital(&fs, 100.0).unwrap();
        assert!((v0_bs / v0 - 1.0).abs() < 0.01, "{v0_bs} vs {v0}");
    }

    #[test]
    fn deterministic_variance_dominates_the_optimum() {
        let tol = 1e-8;
        // digital on NIG
        let table = nig_table(12);
        let d = discretize_default(&digital_measure(99.0, 0.5).unwrap());
        let j0 = j0_total(&table, &d, 100.0).unwrap().j0;
        let fs = compute_fs(&table, &d).unwrap();
        let (_, var_pure) =
            deterministic_strategy_error(&table, &d, &fs_pure_coeffs(&fs), 0.0, 100.0).unwrap();
        let (bs, _) = bs_delta_coeffs(&table, &d, 100.0).unwrap();
        let (_, var_bs) = deterministic_strategy_error(&table, &d, &bs, 0.0, 100.0).unwrap();
        assert!(var_pure >= j0 - tol * j0, "pure {var_pure} vs J0 {j0}");
        assert!(var_bs >= j0 - tol * j0, "bs {var_bs} vs J0 {j0}");
        // call on electricity
        let grid = TradingGrid::uniform(10, 0.25);
        let elec =
            discretize_model(&ContinuousModel::Electricity(electricity_standard()), &grid).unwrap();
        let d = discretize_default(&call_measure(99.0, 0.5).unwrap());
        let j0 = j0_total(&elec, &d, 100.0).unwrap().j0;
        let fs = compute_fs(&elec, &d).unwrap();
        let (_, var_pure) =
            deterministic_strategy_error(&elec, &d, &fs_pure_coeffs(&fs), 0.0, 100.0).unwrap();
        let (bs, _) = bs_delta_coeffs(&elec, &d, 100.0).unwrap();
        let (_, var_bs) = deterministic_strategy_error(&elec, &d, &bs, 0.0, 100.0).unwrap();
        assert!(var_pure >= j0 * (1.0 - tol));
        assert!(var_bs >= j0 * (1.0 - tol));
        // and the BS benchmark is close to optimal here (robustness)
        assert!(var_bs <= 1.02 * j0, "BS var {var_bs} vs J0 {j0}");
    }

    #[test]
    fn gaussian_bs_delta_approaches_the_optimum() {
        let sigma = 0.41;
        let grid = TradingGrid::uniform(25, 0.25);
        let model = ContinuousModel::Gaussian(GaussianParams::new(0.01, sigma).unwrap());
        let table = discretize_model(&model, &grid).unwrap();
        let d = discretize_default(&call_measure(99.0, 0.5).unwrap());
        let j0 = j0_total(&table, &d, 100.0).unwrap().j0;
        let (bs, _) = bs_delta_coeffs(&table, &d, 100.0).unwrap();
        let (_, var_bs) = deterministic_strategy_error(&table, &d, &bs, 0.0, 100.0).unwrap();
        assert!(var_bs >= j0 * (1.0 - 1e-8));
        assert!(var_bs <= 1.01 * j0, "BS var {var_bs} vs J0 {j0} on its own model");
    }

    #[test]
    fn refining_the_grid_never_increases_the_error() {
        // nested uniform grids: a larger strategy space can only help
        let model = ContinuousModel::Electricity(electricity_standard());
        let mut m = call_measure(99.0, 0.5).unwrap();
        m.contours[0].truncation = 60.0;
        let d = discretize(&m, 24, 12);
        let mut prev = f64::INFINITY;
        for n in [2usize, 10, 50] {
            let grid = TradingGrid::uniform(n, 0.25);
            let table = discretize_model(&model, &grid).unwrap();
            let j0 = j0_total(&table, &d, 100.0).unwrap().j0;
            assert!(j0 <= prev + 1e-12, "J0 increased on refinement: {prev} -> {j0}");
            prev = j0;
        }
    }

    #[test]
    fn electricity_bs_error_regression() {
        // converged counterpart of the published 2.6217 (N = 10)
        let grid = TradingGrid::uniform(10, 0.25);
        let table =
            discretize_model(&ContinuousModel::Electricity(electricity_standard()), &grid).unwrap();
        let d = discretize_default(&call_measure(99.0, 0.5).unwrap());
        let (bs, v0_bs) = bs_delta_coeffs(&table, &d, 100.0).unwrap();
        let (bias, variance) =
            deterministic_strategy_error(&table, &d, &bs, v0_bs, 100.0).unwrap();
        let std = variance.sqrt();
        assert!((std - 2.6217).abs() < 0.015, "BS std = {std}");
        assert!(bias.abs() < 0.1, "BS bias = {bias}");
    }
}
