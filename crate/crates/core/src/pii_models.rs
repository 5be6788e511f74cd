//! Model families for the log-price driver and their discretization onto a
//! trading grid as a table of discrete cumulant functions
//! `m(z,k) = E[exp(z * dX_k)]`.
//!
//! All increment laws here are exponentials of processes with independent
//! increments: NIG Levy, the one-factor electricity forward model (NIG
//! driver with exponentially rising volatility near delivery), Gaussian,
//! and an inhomogeneous binomial. Everything downstream (FS coefficients,
//! hedging-error kernels) consumes only `m(z,k)` and a few
//! cancellation-safe combinations of it, which live on `CumulantTable`.

use num_complex::Complex64;

use crate::cmath::cexpm1;
use crate::error::{Error, Result};
use crate::gauss;

/// Parameters of a Normal Inverse Gaussian law, per unit time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NigParams {
    /// Tail heaviness, > 0 and > |beta|.
    pub alpha: f64,
    /// Asymmetry.
    pub beta: f64,
    /// Scale, > 0.
    pub delta: f64,
    /// Location.
    pub mu: f64,
}

/// First four standardized moments of a NIG law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NigMoments {
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
}

impl NigParams {
    pub fn new(alpha: f64, beta: f64, delta: f64, mu: f64) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::Parameter(format!("NIG alpha must be > 0, got {alpha}")));
        }
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(Error::Parameter(format!("NIG delta must be > 0, got {delta}")));
        }
        if !(beta.abs() < alpha) {
            return Err(Error::Parameter(format!(
                "NIG requires |beta| < alpha, got beta={beta}, alpha={alpha}"
            )));
        }
        if !mu.is_finite() {
            return Err(Error::Parameter("NIG mu must be finite".into()));
        }
        Ok(Self { alpha, beta, delta, mu })
    }

    /// gamma = sqrt(alpha^2 - beta^2), real and > 0.
    pub fn gamma(&self) -> f64 {
        (self.alpha * self.alpha - self.beta * self.beta).sqrt()
    }

    /// Strip of analyticity of the cumulant function (closed, real parts).
    pub fn domain(&self) -> (f64, f64) {
        (-(self.alpha + self.beta), self.alpha - self.beta)
    }

    /// Cumulant generating function
    /// `kappa(z) = mu z + delta (gamma - sqrt(alpha^2 - (beta+z)^2))`,
    /// principal square root. The difference of roots is rationalized to
    /// `z (2 beta + z) / (gamma + sqrt(...))`, which is exact at z = 0 and
    /// keeps full relative accuracy for small z. No domain check; see
    /// [`nig_cgf`].
    pub fn cgf_unchecked(&self, z: Complex64) -> Complex64 {
        let w = Complex64::new(self.beta, 0.0) + z;
        let inner = Complex64::new(self.alpha * self.alpha, 0.0) - w * w;
        // principal sqrt has Re >= 0, so the denominator never vanishes
        let denom = self.gamma() + inner.sqrt();
        self.mu * z + self.delta * z * (2.0 * self.beta + z) / denom
    }

    /// Mean, variance, skewness and excess kurtosis from the cgf
    /// derivatives at zero.
    pub fn moments(&self) -> NigMoments {
        let g = self.gamma();
        let a2 = self.alpha * self.alpha;
        let b = self.beta;
        NigMoments {
            mean: self.mu + self.delta * b / g,
            variance: self.delta * a2 / g.powi(3),
            skewness: 3.0 * b / (self.alpha * (self.delta * g).sqrt()),
            excess_kurtosis: 3.0 * (1.0 + 4.0 * b * b / a2) / (self.delta * g),
        }
    }

    /// Scales `alpha` by `c` and re-solves `(beta, delta, mu)` so the first
    /// three moments (mean, variance, skewness) are unchanged.
    ///
    /// The system reduces to one quadratic: with q = skew * sqrt(var) / 3,
    /// the new asymmetry solves q b^2 + b - q alpha'^2 = 0, after which
    /// delta' and mu' follow from the variance and mean equations.
    pub fn rescale(&self, c: f64) -> Result<NigParams> {
        if !(c > 0.0) {
            return Err(Error::Parameter(format!("rescale coefficient must be > 0, got {c}")));
        }
        let m = self.moments();
        let alpha = c * self.alpha;
        let q = m.skewness * m.variance.sqrt() / 3.0;
        let beta = if q == 0.0 {
            0.0
        } else {
            (-1.0 + (1.0 + 4.0 * q * q * alpha * alpha).sqrt()) / (2.0 * q)
        };
        // b^2 = alpha^2 - b/q < alpha^2 holds for every root above, but a
        // degenerate input variance could still produce junk.
        let gamma2 = alpha * alpha - beta * beta;
        if !(gamma2 > 0.0) {
            return Err(Error::Solver(format!(
                "no admissible asymmetry: alpha'={alpha}, beta'={beta}"
            )));
        }
        let gamma = gamma2.sqrt();
        let delta = m.variance * gamma.powi(3) / (alpha * alpha);
        let mu = m.mean - delta * beta / gamma;
        let out = NigParams::new(alpha, beta, delta, mu)?;
        let check = out.moments();
        let resid = ((check.mean - m.mean) / (1.0 + m.mean.abs())).abs()
            + ((check.variance - m.variance) / m.variance).abs()
            + ((check.skewness - m.skewness) / (1.0 + m.skewness.abs())).abs();
        if resid > 1e-9 {
            return Err(Error::Solver(format!("moment residual {resid:.3e} after rescale")));
        }
        Ok(out)
    }
}

/// One-factor electricity forward model: log-forward
/// `X_t = int_0^t sigma e^{-lambda (T-u)} dL_u` with a NIG Levy driver `L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElectricityParams {
    /// Law of the driver over one unit of time.
    pub driver: NigParams,
    /// Short-term volatility (annualized), > 0.
    pub sigma: f64,
    /// Mean-reversion rate, 1/years, >= 0.
    pub lambda_mr: f64,
    /// Maturity = delivery date, years, > 0.
    pub maturity: f64,
}

impl ElectricityParams {
    pub fn new(driver: NigParams, sigma: f64, lambda_mr: f64, maturity: f64) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(Error::Parameter(format!("sigma must be > 0, got {sigma}")));
        }
        if !(lambda_mr >= 0.0) {
            return Err(Error::Parameter(format!("lambda must be >= 0, got {lambda_mr}")));
        }
        if !(maturity > 0.0) {
            return Err(Error::Parameter(format!("maturity must be > 0, got {maturity}")));
        }
        // Keeps 2 inside the discretized strip [-(a+b)/sigma, (a-b)/sigma].
        let cap = (driver.alpha - driver.beta) / 2.0;
        if sigma > cap {
            return Err(Error::Assumption(format!(
                "sigma = {sigma} exceeds (alpha - beta)/2 = {cap}; 2 would leave the strip"
            )));
        }
        Ok(Self { driver, sigma, lambda_mr, maturity })
    }

    /// Volatility loading at time `u`: sigma * exp(-lambda (T - u)).
    pub fn loading(&self, u: f64) -> f64 {
        self.sigma * (-self.lambda_mr * (self.maturity - u)).exp()
    }
}

/// Two-point log-increment model: `dX_k = a` w.p. `p_k`, else `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct BinomialParams {
    pub a: f64,
    pub b: f64,
    /// One probability per trading interval, each in (0,1).
    pub probs: Vec<f64>,
}

impl BinomialParams {
    pub fn new(a: f64, b: f64, probs: Vec<f64>) -> Result<Self> {
        if a == b {
            return Err(Error::Parameter("binomial outcomes must differ".into()));
        }
        if probs.is_empty() {
            return Err(Error::Parameter("binomial needs at least one probability".into()));
        }
        for (k, p) in probs.iter().enumerate() {
            if !(*p > 0.0 && *p < 1.0) {
                return Err(Error::Assumption(format!(
                    "binomial p_{} = {p} not in (0,1): increment would be deterministic",
                    k + 1
                )));
            }
        }
        Ok(Self { a, b, probs })
    }

    /// Same probability on every interval.
    pub fn constant(a: f64, b: f64, p: f64, n: usize) -> Result<Self> {
        Self::new(a, b, vec![p; n])
    }
}

/// Brownian log-price with drift; both per unit time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianParams {
    pub drift: f64,
    /// Annualized volatility, > 0.
    pub sigma: f64,
}

impl GaussianParams {
    pub fn new(drift: f64, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(Error::Parameter(format!("sigma must be > 0, got {sigma}")));
        }
        Ok(Self { drift, sigma })
    }
}

/// Continuous-time description of the log-price driver.
#[derive(Debug, Clone, PartialEq)]
pub enum ContinuousModel {
    NigLevy(NigParams),
    Electricity(ElectricityParams),
    Gaussian(GaussianParams),
    Binomial(BinomialParams),
}

/// Ordered trading dates t_0 = 0 < t_1 < ... < t_N = T.
#[derive(Debug, Clone, PartialEq)]
pub struct TradingGrid {
    dates: Vec<f64>,
}

impl TradingGrid {
    pub fn new(dates: Vec<f64>) -> Result<Self> {
        if dates.len() < 2 {
            return Err(Error::Parameter("grid needs at least two dates".into()));
        }
        if dates[0] != 0.0 {
            return Err(Error::Parameter(format!("grid must start at 0, got {}", dates[0])));
        }
        for w in dates.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::Parameter(format!(
                    "grid dates must be strictly increasing: {} then {}",
                    w[0], w[1]
                )));
            }
        }
        if !dates[dates.len() - 1].is_finite() {
            return Err(Error::Parameter("grid maturity must be finite".into()));
        }
        Ok(Self { dates })
    }

    /// Uniform grid with `n` intervals on [0, t].
    pub fn uniform(n: usize, t: f64) -> Self {
        assert!(n >= 1 && t > 0.0);
        let mut dates: Vec<f64> = (0..=n).map(|k| t * k as f64 / n as f64).collect();
        dates[n] = t;
        Self { dates }
    }

    pub fn n_intervals(&self) -> usize {
        self.dates.len() - 1
    }

    pub fn dates(&self) -> &[f64] {
        &self.dates
    }

    pub fn maturity(&self) -> f64 {
        *self.dates.last().unwrap()
    }

    /// Length of interval k, 1-based.
    pub fn dt(&self, k: usize) -> f64 {
        self.dates[k] - self.dates[k - 1]
    }

    pub fn is_uniform(&self) -> bool {
        let n = self.n_intervals();
        let dt = self.maturity() / n as f64;
        self.dates
            .windows(2)
            .all(|w| ((w[1] - w[0]) - dt).abs() <= 1e-12 * self.maturity())
    }
}

/// Per-interval quadrature for the electricity cumulant integral:
/// `psi_k(z) = sum_i w_i kappa(c_i z)` with `c_i = sigma e^{-lambda(T-u_i)}`.
#[derive(Debug, Clone)]
struct IntervalRule {
    coeff: Vec<f64>,
    weight: Vec<f64>,
}

#[derive(Debug, Clone)]
enum ModelKind {
    Nig(NigParams),
    Electricity { p: ElectricityParams, rules: Vec<IntervalRule> },
    Gaussian(GaussianParams),
    /// Finite-support increment law: outcome j with probability
    /// probs[k-1][j] on interval k. The binomial family maps here.
    Discrete { outcomes: Vec<f64>, probs: Vec<Vec<f64>> },
}

/// The discrete cumulant table `m(z,k)` of a model on a trading grid,
/// with its strip of analyticity. Immutable and thread-safe.
#[derive(Debug, Clone)]
pub struct CumulantTable {
    kind: ModelKind,
    grid: TradingGrid,
    domain: (f64, f64),
}

/// Discretizes a continuous model onto `grid`, producing the table of
/// `m(z,k) = E[exp(z dX_k)]`, k = 1..N.
pub fn discretize_model(model: &ContinuousModel, grid: &TradingGrid) -> Result<CumulantTable> {
    let n = grid.n_intervals();
    let (kind, domain) = match model {
        ContinuousModel::NigLevy(p) => {
            NigParams::new(p.alpha, p.beta, p.delta, p.mu)?;
            (ModelKind::Nig(*p), p.domain())
        }
        ContinuousModel::Electricity(p) => {
            let p = ElectricityParams::new(p.driver, p.sigma, p.lambda_mr, p.maturity)?;
            if (grid.maturity() - p.maturity).abs() > 1e-9 * p.maturity {
                return Err(Error::Parameter(format!(
                    "grid maturity {} differs from delivery date {}",
                    grid.maturity(),
                    p.maturity
                )));
            }
            let rules = build_electricity_rules(&p, grid)?;
            let (lo, hi) = p.driver.domain();
            (ModelKind::Electricity { p, rules }, (lo / p.sigma, hi / p.sigma))
        }
        ContinuousModel::Gaussian(p) => {
            GaussianParams::new(p.drift, p.sigma)?;
            (ModelKind::Gaussian(*p), (f64::NEG_INFINITY, f64::INFINITY))
        }
        ContinuousModel::Binomial(p) => {
            if p.probs.len() != n {
                return Err(Error::Parameter(format!(
                    "binomial has {} probabilities for {} intervals",
                    p.probs.len(),
                    n
                )));
            }
            let p = BinomialParams::new(p.a, p.b, p.probs.clone())?;
            let probs = p.probs.iter().map(|q| vec![*q, 1.0 - *q]).collect();
            (
                ModelKind::Discrete { outcomes: vec![p.a, p.b], probs },
                (f64::NEG_INFINITY, f64::INFINITY),
            )
        }
    };
    if !(domain.0 <= 2.0 && 2.0 <= domain.1) {
        return Err(Error::Assumption(format!(
            "2 is outside the strip [{}, {}]: square-integrability of S fails",
            domain.0, domain.1
        )));
    }
    Ok(CumulantTable { kind, grid: grid.clone(), domain })
}

/// Gauss-Legendre per interval, order doubled until the integral of the
/// cumulant stagnates below 1e-12 relative on a spread of probe arguments.
fn build_electricity_rules(p: &ElectricityParams, grid: &TradingGrid) -> Result<Vec<IntervalRule>> {
    // Probes stay off the exact strip endpoints: there the integrand has a
    // square-root branch point at u = T and no fixed-order rule stagnates.
    let (lo, hi) = p.driver.domain();
    let probes = [
        Complex64::new(0.95 * hi / p.sigma, 0.0),
        Complex64::new(0.95 * lo / p.sigma, 0.0),
        Complex64::new(2.0, 0.0),
        Complex64::new(1.0, 25.0),
        Complex64::new(0.5, 800.0),
        Complex64::new(0.9 * lo / p.sigma, 120.0),
    ];
    let eval = |rule: &IntervalRule, z: Complex64| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (c, w) in rule.coeff.iter().zip(&rule.weight) {
            acc += *w * p.driver.cgf_unchecked(z * *c);
        }
        acc
    };
    let make_rule = |order: usize, a: f64, b: f64| -> IntervalRule {
        let (u, w) = gauss::gauss_legendre_on(order, a, b);
        IntervalRule { coeff: u.iter().map(|ui| p.loading(*ui)).collect(), weight: w }
    };
    let mut rules = Vec::with_capacity(grid.n_intervals());
    for k in 1..=grid.n_intervals() {
        let (a, b) = (grid.dates()[k - 1], grid.dates()[k]);
        let mut order = 16;
        let mut rule = make_rule(order, a, b);
        loop {
            let next = make_rule(order * 2, a, b);
            let stalled = probes.iter().all(|z| {
                let v1 = eval(&rule, *z);
                let v2 = eval(&next, *z);
                (v1 - v2).norm() <= 1e-12 * (1.0 + v2.norm())
            });
            if stalled {
                break;
            }
            order *= 2;
            rule = next;
            if order >= 256 {
                return Err(Error::Numerics(format!(
                    "electricity cumulant integral on [{a}, {b}] did not stagnate by order {order}"
                )));
            }
        }
        rules.push(rule);
    }
    Ok(rules)
}

impl CumulantTable {
    pub fn grid(&self) -> &TradingGrid {
        &self.grid
    }

    pub fn n_intervals(&self) -> usize {
        self.grid.n_intervals()
    }

    /// Closed real strip of allowed Re(z).
    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn contains(&self, re: f64) -> bool {
        re >= self.domain.0 && re <= self.domain.1
    }

    pub fn check_in_domain(&self, re: f64) -> Result<()> {
        if self.contains(re) {
            Ok(())
        } else {
            Err(Error::Domain { re, lo: self.domain.0, hi: self.domain.1 })
        }
    }

    /// True when increments are identically distributed on a uniform grid,
    /// so the stationary closed forms apply.
    pub fn is_stationary_uniform(&self) -> bool {
        if !self.grid.is_uniform() {
            return false;
        }
        match &self.kind {
            ModelKind::Nig(_) | ModelKind::Gaussian(_) => true,
            ModelKind::Discrete { probs, .. } => probs.windows(2).all(|w| w[0] == w[1]),
            ModelKind::Electricity { p, .. } => p.lambda_mr == 0.0,
        }
    }

    /// log m(z,k) for the exponential-form models; `None` for binomial.
    fn psi(&self, z: Complex64, k: usize) -> Option<Complex64> {
        match &self.kind {
            ModelKind::Nig(p) => Some(self.grid.dt(k) * p.cgf_unchecked(z)),
            ModelKind::Electricity { p, rules } => {
                let rule = &rules[k - 1];
                let mut acc = Complex64::new(0.0, 0.0);
                for (c, w) in rule.coeff.iter().zip(&rule.weight) {
                    acc += *w * p.driver.cgf_unchecked(z * *c);
                }
                Some(acc)
            }
            ModelKind::Gaussian(p) => {
                Some(self.grid.dt(k) * (p.drift * z + 0.5 * p.sigma * p.sigma * z * z))
            }
            ModelKind::Discrete { .. } => None,
        }
    }

    /// m(z,k) = E[exp(z dX_k)], k = 1..N.
    pub fn m(&self, z: Complex64, k: usize) -> Complex64 {
        debug_assert!(k >= 1 && k <= self.n_intervals());
        match &self.kind {
            ModelKind::Discrete { outcomes, probs } => outcomes
                .iter()
                .zip(&probs[k - 1])
                .map(|(a, p)| *p * (*a * z).exp())
                .sum(),
            _ => self.psi(z, k).unwrap().exp(),
        }
    }

    /// m(z,k) - 1, cancellation-safe for short intervals.
    pub fn m_minus_one(&self, z: Complex64, k: usize) -> Complex64 {
        match &self.kind {
            ModelKind::Discrete { outcomes, probs } => outcomes
                .iter()
                .zip(&probs[k - 1])
                .map(|(a, p)| *p * cexpm1(*a * z))
                .sum(),
            _ => cexpm1(self.psi(z, k).unwrap()),
        }
    }

    /// rho(y,z;k) = m(y+z,k) - m(y,k) m(z,k), computed without the
    /// leading-one cancellation.
    pub fn rho(&self, y: Complex64, z: Complex64, k: usize) -> Complex64 {
        match &self.kind {
            ModelKind::Discrete { outcomes, probs } => {
                // covariance form: sum_j p_j (e^{a_j y} - m(y)) (e^{a_j z} - m(z))
                let my = self.m(y, k);
                let mz = self.m(z, k);
                outcomes
                    .iter()
                    .zip(&probs[k - 1])
                    .map(|(a, p)| *p * ((*a * y).exp() - my) * ((*a * z).exp() - mz))
                    .sum()
            }
            _ => {
                let py = self.psi(y, k).unwrap();
                let pz = self.psi(z, k).unwrap();
                let pyz = self.psi(y + z, k).unwrap();
                cexpm1(pyz) - cexpm1(py + pz)
            }
        }
    }

    /// Fills `buf` with log m(z,k) for k = 1..N and returns true, or
    /// returns false for finite-support laws (no useful log form).
    pub fn log_m_profile_into(&self, z: Complex64, buf: &mut Vec<Complex64>) -> bool {
        let n = self.n_intervals();
        buf.clear();
        match &self.kind {
            ModelKind::Discrete { .. } => false,
            ModelKind::Nig(p) => {
                let kappa = p.cgf_unchecked(z);
                buf.extend((1..=n).map(|k| self.grid.dt(k) * kappa));
                true
            }
            _ => {
                buf.extend((1..=n).map(|k| self.psi(z, k).unwrap()));
                true
            }
        }
    }

    /// Fills `buf` with m(z,k) for k = 1..N.
    pub fn m_profile_into(&self, z: Complex64, buf: &mut Vec<Complex64>) {
        let n = self.n_intervals();
        buf.clear();
        match &self.kind {
            ModelKind::Nig(p) => {
                if self.grid.is_uniform() {
                    let v = (self.grid.dt(1) * p.cgf_unchecked(z)).exp();
                    buf.resize(n, v);
                } else {
                    let kappa = p.cgf_unchecked(z);
                    buf.extend((1..=n).map(|k| (self.grid.dt(k) * kappa).exp()));
                }
            }
            _ => buf.extend((1..=n).map(|k| self.m(z, k))),
        }
    }

    /// m(1,k) - 1, real.
    pub fn em1(&self, k: usize) -> f64 {
        self.m_minus_one(Complex64::new(1.0, 0.0), k).re
    }

    /// E[(e^{dX_k} - 1)^2] = m(2,k) - 2 m(1,k) + 1 > 0.
    pub fn d2(&self, k: usize) -> f64 {
        match &self.kind {
            ModelKind::Discrete { outcomes, probs } => outcomes
                .iter()
                .zip(&probs[k - 1])
                .map(|(a, p)| {
                    let e = a.exp_m1();
                    *p * e * e
                })
                .sum(),
            _ => {
                let p1 = self.psi(Complex64::new(1.0, 0.0), k).unwrap().re;
                let p2 = self.psi(Complex64::new(2.0, 0.0), k).unwrap().re;
                let e1 = p1.exp_m1();
                p2.exp_m1() - 2.0 * e1
            }
        }
    }

    /// Var[e^{dX_k} - 1] = m(2,k) - m(1,k)^2 > 0.
    pub fn rho11(&self, k: usize) -> f64 {
        match &self.kind {
            ModelKind::Discrete { .. } => {
                self.rho(Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0), k).re
            }
            _ => {
                let e1 = self.psi(Complex64::new(1.0, 0.0), k).unwrap().re.exp_m1();
                self.d2(k) - e1 * e1
            }
        }
    }

    /// Exact Var[dX_k] in closed form (no quadrature).
    pub fn variance_of_increment(&self, k: usize) -> f64 {
        debug_assert!(k >= 1 && k <= self.n_intervals());
        match &self.kind {
            ModelKind::Nig(p) => self.grid.dt(k) * p.moments().variance,
            ModelKind::Electricity { p, .. } => {
                let v1 = p.driver.moments().variance;
                let lam = p.lambda_mr;
                let t = p.maturity;
                let (t0, t1) = (self.grid.dates()[k - 1], self.grid.dates()[k]);
                if lam == 0.0 {
                    v1 * p.sigma * p.sigma * (t1 - t0)
                } else {
                    // sigma^2 (e^{-2 lam (T-t1)} - e^{-2 lam (T-t0)}) / (2 lam)
                    let tail = (-2.0 * lam * (t - t1)).exp();
                    v1 * p.sigma * p.sigma * tail * (-(-2.0 * lam * (t1 - t0)).exp_m1())
                        / (2.0 * lam)
                }
            }
            ModelKind::Gaussian(p) => p.sigma * p.sigma * self.grid.dt(k),
            ModelKind::Discrete { outcomes, probs } => {
                let mean: f64 =
                    outcomes.iter().zip(&probs[k - 1]).map(|(a, p)| p * a).sum();
                outcomes
                    .iter()
                    .zip(&probs[k - 1])
                    .map(|(a, p)| p * (a - mean) * (a - mean))
                    .sum()
            }
        }
    }

    /// Exact E[dX_k].
    pub fn mean_of_increment(&self, k: usize) -> f64 {
        match &self.kind {
            ModelKind::Nig(p) => self.grid.dt(k) * p.moments().mean,
            ModelKind::Electricity { p, .. } => {
                let m1 = p.driver.moments().mean;
                let lam = p.lambda_mr;
                let t = p.maturity;
                let (t0, t1) = (self.grid.dates()[k - 1], self.grid.dates()[k]);
                if lam == 0.0 {
                    m1 * p.sigma * (t1 - t0)
                } else {
                    let tail = (-lam * (t - t1)).exp();
                    m1 * p.sigma * tail * (-(-lam * (t1 - t0)).exp_m1()) / lam
                }
            }
            ModelKind::Gaussian(p) => p.drift * self.grid.dt(k),
            ModelKind::Discrete { outcomes, probs } => {
                outcomes.iter().zip(&probs[k - 1]).map(|(a, p)| p * a).sum()
            }
        }
    }

    /// Table for an arbitrary finite-support increment law: outcome
    /// `outcomes[j]` with probability `probs[k-1][j]` on interval k.
    pub fn from_finite_increments(
        outcomes: Vec<f64>,
        probs: Vec<Vec<f64>>,
        grid: &TradingGrid,
    ) -> Result<CumulantTable> {
        if outcomes.len() < 2 {
            return Err(Error::Parameter("need at least two outcomes".into()));
        }
        if probs.len() != grid.n_intervals() {
            return Err(Error::Parameter(format!(
                "{} probability rows for {} intervals",
                probs.len(),
                grid.n_intervals()
            )));
        }
        for row in &probs {
            if row.len() != outcomes.len() {
                return Err(Error::Parameter("probability row length mismatch".into()));
            }
            let total: f64 = row.iter().sum();
            if (total - 1.0).abs() > 1e-12 {
                return Err(Error::Parameter(format!("probabilities sum to {total}")));
            }
            if row.iter().any(|p| !(*p > 0.0 && *p < 1.0)) {
                return Err(Error::Assumption(
                    "every outcome probability must lie in (0,1)".into(),
                ));
            }
        }
        Ok(CumulantTable {
            kind: ModelKind::Discrete { outcomes, probs },
            grid: grid.clone(),
            domain: (f64::NEG_INFINITY, f64::INFINITY),
        })
    }
}

/// NIG cumulant generating function with its domain check
/// (closed strip `Re z` in `[-(alpha+beta), alpha-beta]`).
pub fn nig_cgf(z: Complex64, p: &NigParams) -> Result<Complex64> {
    let (lo, hi) = p.domain();
    if !(z.re >= lo && z.re <= hi) {
        return Err(Error::Domain { re: z.re, lo, hi });
    }
    Ok(p.cgf_unchecked(z))
}

/// See [`NigParams::moments`].
pub fn nig_moments(p: &NigParams) -> NigMoments {
    p.moments()
}

/// See [`NigParams::rescale`].
pub fn rescale_nig(p: &NigParams, c: f64) -> Result<NigParams> {
    p.rescale(c)
}

/// Standard month-ahead power parameter set used across the test suite.
pub fn nig_standard() -> NigParams {
    NigParams { alpha: 38.46, beta: -3.85, delta: 6.40, mu: 0.64 }
}

/// Electricity forward parameter set (driver, sigma = 57.47%, lambda = 3,
/// T = 0.25).
pub fn electricity_standard() -> ElectricityParams {
    ElectricityParams {
        driver: NigParams { alpha: 15.81, beta: -1.581, delta: 15.57, mu: 1.56 },
        sigma: 0.5747,
        lambda_mr: 3.0,
        maturity: 0.25,
    }
}
