//! TOML run configuration: schema-validated (unknown keys rejected),
//! physical quantities in years and currency units.

use serde::Deserialize;

use vohedge::payoff_measures::{
    call_measure, digital_measure, discretize, put_measure, ComplexMeasure, DiscretizedMeasure,
    DEFAULT_CALL_PANELS, DEFAULT_CALL_R, DEFAULT_DIGITAL_PANELS, DEFAULT_DIGITAL_R,
    DEFAULT_ORDER, DEFAULT_PUT_R,
};
use vohedge::pii_models::{
    BinomialParams, ContinuousModel, ElectricityParams, GaussianParams, NigParams, TradingGrid,
};

use crate::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSection,
    pub payoff: PayoffSection,
    pub grid: GridSection,
    #[serde(default)]
    pub market: MarketSection,
    #[serde(default)]
    pub quadrature: QuadratureSection,
    #[serde(default)]
    pub mc: McSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub family: String,
    // NIG / electricity driver parameters
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub delta: Option<f64>,
    pub mu: Option<f64>,
    /// Optional tail-rescaling coefficient applied to a NIG family.
    pub rescale: Option<f64>,
    // electricity extras
    pub sigma: Option<f64>,
    pub lambda: Option<f64>,
    // gaussian extras
    pub drift: Option<f64>,
    // binomial extras
    pub up: Option<f64>,
    pub down: Option<f64>,
    pub p: Option<f64>,
    pub probs: Option<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PayoffSection {
    pub kind: String,
    pub strike: f64,
    /// Contour abscissa override.
    pub contour: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub n: usize,
    pub maturity: f64,
    /// uniform | parametric | explicit | optimize-b | optimize-dates
    #[serde(default = "default_grid_kind")]
    pub kind: String,
    pub b: Option<f64>,
    pub dates: Option<Vec<f64>>,
}

fn default_grid_kind() -> String {
    "uniform".to_owned()
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarketSection {
    #[serde(default = "default_s0")]
    pub s0: f64,
}

impl Default for MarketSection {
    fn default() -> Self {
        Self { s0: default_s0() }
    }
}

fn default_s0() -> f64 {
    100.0
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSection {
    pub truncation: Option<f64>,
    pub panels: Option<usize>,
    pub order: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McSection {
    #[serde(default = "default_paths")]
    pub n_paths: usize,
    #[serde(default)]
    pub seed: u64,
}

impl Default for McSection {
    fn default() -> Self {
        Self { n_paths: default_paths(), seed: 0 }
    }
}

fn default_paths() -> usize {
    100_000
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub path: Option<String>,
}

impl RunConfig {
    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("invalid config: {e}")))
    }

    pub fn model(&self) -> Result<ContinuousModel, CliError> {
        let m = &self.model;
        let need = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| CliError::Config(format!("model.{name} is required for this family")))
        };
        match m.family.as_str() {
            "nig" => {
                let p = NigParams::new(
                    need(m.alpha, "alpha")?,
                    need(m.beta, "beta")?,
                    need(m.delta, "delta")?,
                    need(m.mu, "mu")?,
                )?;
                let p = match m.rescale {
                    Some(c) => p.rescale(c)?,
                    None => p,
                };
                Ok(ContinuousModel::NigLevy(p))
            }
            "electricity" => {
                let driver = NigParams::new(
                    need(m.alpha, "alpha")?,
                    need(m.beta, "beta")?,
                    need(m.delta, "delta")?,
                    need(m.mu, "mu")?,
                )?;
                let driver = match m.rescale {
                    Some(c) => driver.rescale(c)?,
                    None => driver,
                };
                Ok(ContinuousModel::Electricity(ElectricityParams::new(
                    driver,
                    need(m.sigma, "sigma")?,
                    need(m.lambda, "lambda")?,
                    self.grid.maturity,
                )?))
            }
            "gaussian" => Ok(ContinuousModel::Gaussian(GaussianParams::new(
                need(m.drift, "drift")?,
                need(m.sigma, "sigma")?,
            )?)),
            "binomial" => {
                let up = need(m.up, "up")?;
                let down = need(m.down, "down")?;
                let params = if let Some(probs) = &m.probs {
                    BinomialParams::new(up, down, probs.clone())?
                } else {
                    BinomialParams::constant(up, down, need(m.p, "p")?, self.grid.n)?
                };
                Ok(ContinuousModel::Binomial(params))
            }
            other => Err(CliError::Config(format!(
                "unknown model family {other:?} (nig | electricity | gaussian | binomial)"
            ))),
        }
    }

    pub fn measure(&self) -> Result<ComplexMeasure, CliError> {
        let p = &self.payoff;
        let mut m = match p.kind.as_str() {
            "call" => call_measure(p.strike, p.contour.unwrap_or(DEFAULT_CALL_R))?,
            "put" => put_measure(p.strike, p.contour.unwrap_or(DEFAULT_PUT_R))?,
            "digital" => digital_measure(p.strike, p.contour.unwrap_or(DEFAULT_DIGITAL_R))?,
            other => {
                return Err(CliError::Config(format!(
                    "unknown payoff kind {other:?} (call | put | digital)"
                )))
            }
        };
        if let Some(u) = self.quadrature.truncation {
            for contour in &mut m.contours {
                contour.truncation = u;
            }
        }
        Ok(m)
    }

    /// Full-accuracy node set per the payoff defaults and any overrides.
    pub fn discretized(&self) -> Result<DiscretizedMeasure, CliError> {
        let m = self.measure()?;
        let panels = self.quadrature.panels.unwrap_or(match self.payoff.kind.as_str() {
            "digital" => DEFAULT_DIGITAL_PANELS,
            _ => DEFAULT_CALL_PANELS,
        });
        let order = self.quadrature.order.unwrap_or(DEFAULT_ORDER);
        Ok(discretize(&m, panels, order))
    }

    /// Reduced node set for optimizer objectives: truncation trimmed to
    /// the kernel-decay range, coarser panels. Hedging integrals are
    /// already quadrature-converged at this size.
    pub fn objective_measure(&self) -> Result<DiscretizedMeasure, CliError> {
        let mut m = self.measure()?;
        for contour in &mut m.contours {
            contour.truncation = contour.truncation.min(150.0);
        }
        let panels = match self.payoff.kind.as_str() {
            "digital" => 48,
            _ => 24,
        };
        Ok(discretize(&m, panels, 12))
    }

    pub fn concrete_grid(&self) -> Result<TradingGrid, CliError> {
        let g = &self.grid;
        match g.kind.as_str() {
            "uniform" => Ok(TradingGrid::uniform(g.n, g.maturity)),
            "parametric" => {
                let b = g
                    .b
                    .ok_or_else(|| CliError::Config("grid.b required for parametric".into()))?;
                Ok(vohedge::grid_opt::parametric_grid(b, g.n, g.maturity)?)
            }
            "explicit" => {
                let dates = g
                    .dates
                    .clone()
                    .ok_or_else(|| CliError::Config("grid.dates required for explicit".into()))?;
                Ok(TradingGrid::new(dates)?)
            }
            "optimize-b" | "optimize-dates" => Err(CliError::Config(
                "grid.kind asks for optimization; run the optimize-grid command".into(),
            )),
            other => Err(CliError::Config(format!("unknown grid kind {other:?}"))),
        }
    }
}
