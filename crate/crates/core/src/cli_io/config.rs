//! Run configuration: a TOML file whose tables (or dotted keys such as
//! `market.r = 0.05`) mirror the sections below. Unknown keys are errors.

use std::path::Path;
use std::sync::Arc;

use serde::Deserialize;

use crate::carleman::{DomainNest, LhsScaling, Psi0};
use crate::error::{Error, Result};
use crate::grid_pde::{Interval, SpaceGrid, ThetaSchedule};
use crate::inverse::{Bump, CalibrationOptions, StabilitySetup};
use crate::pricing::{MarketParams, PdeConfig, VolBounds, VolCurve};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawMarket {
    r: f64,
    q: f64,
    s_star: f64,
    t_star: f64,
    expiry: f64,
}

impl Default for RawMarket {
    fn default() -> Self {
        Self {
            r: 0.05,
            q: 0.02,
            s_star: 100.0,
            t_star: 0.0,
            expiry: 1.0,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawGrids {
    space_cells: usize,
    time_steps: usize,
    s_max_multiple: f64,
    min_truncation_multiple: f64,
    k_max_multiple: f64,
    y_min: f64,
    y_max: f64,
    log_space_cells: usize,
    theta: f64,
    startup_steps: usize,
}

impl Default for RawGrids {
    fn default() -> Self {
        let d = PdeConfig::default();
        Self {
            space_cells: d.space_cells,
            time_steps: d.time_steps,
            s_max_multiple: d.s_max_multiple,
            min_truncation_multiple: d.min_truncation_multiple,
            k_max_multiple: d.k_max_multiple,
            y_min: d.y_min,
            y_max: d.y_max,
            log_space_cells: d.log_space_cells,
            theta: d.schedule.theta,
            startup_steps: d.schedule.startup_steps,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawVolatility {
    background: f64,
    sigma_min: f64,
    sigma_max: f64,
    shape: String,
    center: f64,
    half_width: f64,
    amplitude: f64,
}

impl Default for RawVolatility {
    fn default() -> Self {
        Self {
            background: 0.2,
            sigma_min: 0.05,
            sigma_max: 1.0,
            shape: "constant".into(),
            center: 100.0,
            half_width: 18.0,
            amplitude: 0.05,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawDomains {
    i_star: [f64; 2],
    i1_star: [f64; 2],
    omega: [f64; 2],
    omega1: [f64; 2],
    omega2: [f64; 2],
}

impl Default for RawDomains {
    fn default() -> Self {
        let n = DomainNest::default_log();
        Self {
            i_star: [80.0, 120.0],
            i1_star: [70.0, 135.0],
            omega: [n.omega.lo, n.omega.hi],
            omega1: [n.omega1.lo, n.omega1.hi],
            omega2: [n.omega2.lo, n.omega2.hi],
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawCarleman {
    lambda: f64,
    s_values: Vec<f64>,
    a_param: f64,
    scaling: String,
    weight_cells: usize,
    probe_space_cells: usize,
    probe_time_steps: usize,
}

impl Default for RawCarleman {
    fn default() -> Self {
        Self {
            lambda: 1.0,
            s_values: vec![10.0, 20.0, 40.0, 80.0, 160.0, 320.0, 640.0],
            a_param: 0.84,
            scaling: "printed".into(),
            weight_cells: 2000,
            probe_space_cells: 4000,
            probe_time_steps: 2000,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawInverse {
    reg_weight: f64,
    max_iterations: usize,
    tolerance: f64,
    arbitrage_tol: f64,
    noise_level: f64,
    epsilons: Vec<f64>,
}

impl Default for RawInverse {
    fn default() -> Self {
        let d = CalibrationOptions::default();
        Self {
            reg_weight: d.reg_weight,
            max_iterations: d.max_iterations,
            tolerance: d.tolerance,
            arbitrage_tol: d.arbitrage_tol,
            noise_level: 0.0,
            epsilons: crate::inverse::DEFAULT_EPSILONS.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawPrice {
    strike: f64,
}

impl Default for RawPrice {
    fn default() -> Self {
        Self { strike: 100.0 }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawConfig {
    market: RawMarket,
    grids: RawGrids,
    volatility: RawVolatility,
    domains: RawDomains,
    carleman: RawCarleman,
    inverse: RawInverse,
    price: RawPrice,
    seed: u64,
}

/// Shape of the "true" curve used by the synthetic pipelines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CurveShape {
    Constant,
    /// `amplitude` times a compact `(1 − u²)³` bump inside `I*`.
    Bump { bump: Bump, amplitude: f64 },
    /// `amplitude · exp(−((K − center)/half_width)²)`, not confined to `I*`.
    Gaussian { center: f64, width: f64, amplitude: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CarlemanConfig {
    pub lambda: f64,
    pub s_values: Vec<f64>,
    pub a_param: f64,
    pub scaling: LhsScaling,
    pub weight_cells: usize,
    pub probe_space_cells: usize,
    pub probe_time_steps: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InverseConfig {
    pub calibration: CalibrationOptions,
    pub noise_level: f64,
    pub epsilons: Vec<f64>,
}

/// Validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub market: MarketParams,
    pub pde: PdeConfig,
    pub bounds: VolBounds,
    pub background: f64,
    pub shape: CurveShape,
    pub setup: StabilitySetup,
    pub carleman: CarlemanConfig,
    pub inverse: InverseConfig,
    pub strike: f64,
    pub seed: u64,
}

fn field<T>(key: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::Config(format!("{key}: {e}")))
}

fn interval(key: &str, v: [f64; 2]) -> Result<Interval> {
    field(key, Interval::new(v[0], v[1]))
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        Self::from_raw(raw)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("reading {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    fn from_raw(raw: RawConfig) -> Result<Self> {
        let m = &raw.market;
        let market = field("market", MarketParams::new(m.r, m.q, m.s_star, m.t_star, m.expiry))?;
        let g = &raw.grids;
        let pde = PdeConfig {
            space_cells: g.space_cells,
            time_steps: g.time_steps,
            s_max_multiple: g.s_max_multiple,
            min_truncation_multiple: g.min_truncation_multiple,
            k_max_multiple: g.k_max_multiple,
            y_min: g.y_min,
            y_max: g.y_max,
            log_space_cells: g.log_space_cells,
            schedule: ThetaSchedule {
                theta: g.theta,
                startup_steps: g.startup_steps,
            },
        };
        field("grids", pde.validate())?;

        let v = &raw.volatility;
        let bounds = field("volatility", VolBounds::new(v.sigma_min, v.sigma_max))?;
        if !bounds.contains(v.background) {
            return Err(Error::Config(format!(
                "volatility.background: {} outside [{}, {}]",
                v.background, bounds.min, bounds.max
            )));
        }

        let d = &raw.domains;
        let i_star = interval("domains.i_star", d.i_star)?;
        let i1_star = interval("domains.i1_star", d.i1_star)?;
        if !(i1_star.lo > 0.0) {
            return Err(Error::Config("domains.i1_star: strikes must be positive".into()));
        }
        let k_max = pde.k_max_multiple * market.s_star;
        if i1_star.hi >= k_max {
            return Err(Error::Config(format!(
                "domains.i1_star: upper end {} must lie below the strike truncation {k_max}",
                i1_star.hi
            )));
        }
        let to_log = |i: Interval| i.map(|k| market.log_moneyness(k));
        let nest = field(
            "domains",
            DomainNest::new(
                to_log(i_star),
                to_log(i1_star),
                interval("domains.omega", d.omega)?,
                interval("domains.omega1", d.omega1)?,
                interval("domains.omega2", d.omega2)?,
            ),
        )?;
        let setup = StabilitySetup { i_star, i1_star, nest };
        field("domains", setup.validate())?;

        let shape = match v.shape.as_str() {
            "constant" => CurveShape::Constant,
            "bump" => {
                let bump = Bump {
                    center: v.center,
                    half_width: v.half_width,
                    sign: 1.0,
                };
                if !(v.half_width > 0.0 && bump.support().is_inside(&i_star)) {
                    return Err(Error::Config(format!(
                        "volatility: bump support [{}, {}] must lie inside I*",
                        bump.support().lo,
                        bump.support().hi
                    )));
                }
                CurveShape::Bump { bump, amplitude: v.amplitude }
            }
            "gaussian" => {
                if !(v.half_width > 0.0) {
                    return Err(Error::Config("volatility.half_width: must be positive".into()));
                }
                CurveShape::Gaussian {
                    center: v.center,
                    width: v.half_width,
                    amplitude: v.amplitude,
                }
            }
            other => {
                return Err(Error::Config(format!(
                    "volatility.shape: unknown shape `{other}` (constant, bump, gaussian)"
                )))
            }
        };

        let c = &raw.carleman;
        let scaling = match c.scaling.as_str() {
            "printed" => LhsScaling::AsPrinted,
            "standard" => LhsScaling::Standard,
            other => {
                return Err(Error::Config(format!(
                    "carleman.scaling: unknown value `{other}` (printed, standard)"
                )))
            }
        };
        if !(c.lambda > 0.0) || c.s_values.is_empty() || c.s_values.iter().any(|s| !(*s > 0.0)) {
            return Err(Error::Config("carleman: lambda and every s must be positive".into()));
        }
        if c.weight_cells < 8 || c.probe_space_cells < 8 || c.probe_time_steps < 2 {
            return Err(Error::Config("carleman: resolutions below minimum".into()));
        }
        let x0 = field("carleman.a_param", Psi0::new(nest.domain, c.a_param))?.critical_point();
        if !(x0 > nest.omega.lo && x0 < nest.omega.hi) {
            return Err(Error::Config(format!(
                "carleman.a_param: critical point h(a) = {x0} must lie in omega [{}, {}]",
                nest.omega.lo, nest.omega.hi
            )));
        }

        let inv = &raw.inverse;
        if !(inv.reg_weight >= 0.0) || !(inv.tolerance > 0.0) || inv.max_iterations == 0 || !(inv.arbitrage_tol >= 0.0)
        {
            return Err(Error::Config(
                "inverse: reg_weight and arbitrage_tol must be nonnegative, tolerance and max_iterations positive".into(),
            ));
        }
        if !(inv.noise_level >= 0.0) {
            return Err(Error::Config("inverse.noise_level: must be nonnegative".into()));
        }
        if !(raw.price.strike > 0.0) {
            return Err(Error::Config(format!(
                "price.strike: must be positive, got {}",
                raw.price.strike
            )));
        }
        Ok(Self {
            market,
            pde,
            bounds,
            background: v.background,
            shape,
            setup,
            carleman: CarlemanConfig {
                lambda: c.lambda,
                s_values: c.s_values.clone(),
                a_param: c.a_param,
                scaling,
                weight_cells: c.weight_cells,
                probe_space_cells: c.probe_space_cells,
                probe_time_steps: c.probe_time_steps,
            },
            inverse: InverseConfig {
                calibration: CalibrationOptions {
                    reg_weight: inv.reg_weight,
                    max_iterations: inv.max_iterations,
                    tolerance: inv.tolerance,
                    arbitrage_tol: inv.arbitrage_tol,
                },
                noise_level: inv.noise_level,
                epsilons: inv.epsilons.clone(),
            },
            strike: raw.price.strike,
            seed: raw.seed,
        })
    }

    /// All resolutions multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::Config(format!("resolution scale must be positive, got {factor}")));
        }
        let mut out = self.clone();
        out.pde = self.pde.scaled(factor);
        let s = |n: usize| ((n as f64 * factor).round() as usize).max(8);
        out.carleman.weight_cells = s(self.carleman.weight_cells);
        out.carleman.probe_space_cells = s(self.carleman.probe_space_cells);
        out.carleman.probe_time_steps = s(self.carleman.probe_time_steps);
        Ok(out)
    }

    /// Constant background curve.
    pub fn background_curve(&self) -> Result<VolCurve> {
        VolCurve::constant(self.background, self.bounds)
    }

    /// The configured "true" curve sampled on `strikes`.
    pub fn true_curve(&self, strikes: &Arc<SpaceGrid>) -> Result<VolCurve> {
        let b = self.background;
        match self.shape {
            CurveShape::Constant => VolCurve::from_fn(strikes.clone(), self.bounds, b, Some(self.setup.i_star), |_| b),
            CurveShape::Bump { bump, amplitude } => {
                VolCurve::from_fn(strikes.clone(), self.bounds, b, Some(self.setup.i_star), |k| b + amplitude * bump.eval(k))
            }
            CurveShape::Gaussian {
                center,
                width,
                amplitude,
            } => VolCurve::from_fn(strikes.clone(), self.bounds, b, None, |k| {
                b + amplitude * (-((k - center) / width).powi(2)).exp()
            }),
        }
    }
}
