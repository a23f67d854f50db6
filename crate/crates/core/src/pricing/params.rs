use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid_pde::{Field1D, Interval, SpaceGrid, ThetaSchedule};

/// Market data shared by every pricing problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarketParams {
    /// Risk-free rate per year, strictly positive.
    pub r: f64,
    /// Continuous dividend yield per year.
    pub q: f64,
    /// Spot at observation time.
    pub s_star: f64,
    /// Observation time (years).
    pub t_star: f64,
    /// Expiry (years).
    pub expiry: f64,
}

impl MarketParams {
    pub fn new(r: f64, q: f64, s_star: f64, t_star: f64, expiry: f64) -> Result<Self> {
        let p = Self {
            r,
            q,
            s_star,
            t_star,
            expiry,
        };
        p.validate()?;
        Ok(p)
    }

    /// `t_star = 0` is accepted: only `expiry - t_star` enters the pricing
    /// problems.
    pub fn validate(&self) -> Result<()> {
        if !(self.r > 0.0 && self.r.is_finite()) {
            return Err(Error::param("r", format!("must be > 0, got {}", self.r)));
        }
        if !(self.q >= 0.0 && self.q.is_finite()) {
            return Err(Error::param("q", format!("must be >= 0, got {}", self.q)));
        }
        if !(self.s_star > 0.0 && self.s_star.is_finite()) {
            return Err(Error::param("s_star", format!("must be > 0, got {}", self.s_star)));
        }
        if !(self.t_star >= 0.0 && self.t_star < self.expiry && self.expiry.is_finite()) {
            return Err(Error::param(
                "t_star",
                format!("need 0 <= t_star < expiry, got t_star={} expiry={}", self.t_star, self.expiry),
            ));
        }
        Ok(())
    }

    /// Time to expiry seen from the observation time, `τ* = T − t*`.
    pub fn tau_star(&self) -> f64 {
        self.expiry - self.t_star
    }

    /// Log-moneyness `y = ln(K / S*)`.
    pub fn log_moneyness(&self, strike: f64) -> f64 {
        (strike / self.s_star).ln()
    }

    pub fn strike_of(&self, y: f64) -> f64 {
        self.s_star * y.exp()
    }
}

/// Hard volatility bounds `0 < min <= σ <= max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolBounds {
    pub min: f64,
    pub max: f64,
}

impl VolBounds {
    pub fn new(min: f64, max: f64) -> Result<Self> {
        if !(min > 0.0 && min <= max && max.is_finite()) {
            return Err(Error::param(
                "sigma bounds",
                format!("need 0 < sigma_min <= sigma_max, got [{min}, {max}]"),
            ));
        }
        Ok(Self { min, max })
    }

    pub fn contains(&self, s: f64) -> bool {
        s >= self.min && s <= self.max
    }

    pub fn clamp(&self, s: f64) -> f64 {
        s.clamp(self.min, self.max)
    }
}

/// Strike-dependent volatility sampled on a strike grid.
///
/// Between nodes the curve is linear; beyond the grid it equals the
/// background value. When a support interval is declared, nodes outside it
/// must carry the background value.
#[derive(Debug, Clone, PartialEq)]
pub struct VolCurve {
    sigma: Field1D,
    bounds: VolBounds,
    background: f64,
    support: Option<Interval>,
}

impl VolCurve {
    pub fn new(
        sigma: Field1D,
        bounds: VolBounds,
        background: f64,
        support: Option<Interval>,
    ) -> Result<Self> {
        if !bounds.contains(background) {
            return Err(Error::param(
                "background",
                format!("{background} outside [{}, {}]", bounds.min, bounds.max),
            ));
        }
        let strikes = sigma.grid().nodes();
        for (&k, &s) in strikes.iter().zip(sigma.values()) {
            if !bounds.contains(s) {
                return Err(Error::param(
                    "sigma",
                    format!("sigma({k}) = {s} outside [{}, {}]", bounds.min, bounds.max),
                ));
            }
            if let Some(sup) = support {
                if !sup.contains(k) && (s - background).abs() > 1e-12 {
                    return Err(Error::param(
                        "sigma",
                        format!("sigma({k}) = {s} differs from background outside the support"),
                    ));
                }
            }
        }
        Ok(Self {
            sigma,
            bounds,
            background,
            support,
        })
    }

    pub fn constant(sigma: f64, bounds: VolBounds) -> Result<Self> {
        let grid = Arc::new(SpaceGrid::new(vec![0.0, 0.5, 1.0])?);
        Self::new(Field1D::constant(grid, sigma), bounds, sigma, None)
    }

    /// Sample `f` at the strike nodes, forcing the background value outside
    /// `support`.
    pub fn from_fn(
        strikes: Arc<SpaceGrid>,
        bounds: VolBounds,
        background: f64,
        support: Option<Interval>,
        f: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        let sigma = Field1D::from_fn(strikes, |k| match support {
            Some(sup) if !sup.contains(k) => background,
            _ => f(k),
        })?;
        Self::new(sigma, bounds, background, support)
    }

    pub fn strikes(&self) -> &Arc<SpaceGrid> {
        self.sigma.grid()
    }

    pub fn sigma(&self) -> &Field1D {
        &self.sigma
    }

    pub fn bounds(&self) -> VolBounds {
        self.bounds
    }

    pub fn background(&self) -> f64 {
        self.background
    }

    pub fn support(&self) -> Option<Interval> {
        self.support
    }

    pub fn sigma_at(&self, strike: f64) -> f64 {
        let grid = self.sigma.grid();
        let x = grid.nodes();
        if strike < x[0] || strike > x[x.len() - 1] {
            return self.background;
        }
        if let Some(sup) = self.support {
            if !sup.contains(strike) {
                return self.background;
            }
        }
        let j = x.partition_point(|&n| n < strike);
        if j == 0 {
            return self.sigma.values()[0];
        }
        let (k0, k1) = (x[j - 1], x[j]);
        let w = (strike - k0) / (k1 - k0);
        let v = self.sigma.values();
        (1.0 - w) * v[j - 1] + w * v[j]
    }

    /// Diffusion `a(y) = σ²(S* e^y) / 2` at the nodes of a log grid.
    pub fn diffusion_on(&self, ygrid: &Arc<SpaceGrid>, params: &MarketParams) -> Result<Field1D> {
        Field1D::from_fn(ygrid.clone(), |y| {
            let s = self.sigma_at(params.strike_of(y));
            0.5 * s * s
        })
    }
}

/// Grid resolutions and truncations for the pricing solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdeConfig {
    /// Cells of the spot or strike grid.
    pub space_cells: usize,
    pub time_steps: usize,
    /// Spot truncation of the backward problem, as a multiple of `max(K, S*)`.
    pub s_max_multiple: f64,
    /// Smallest acceptable spot truncation, as a multiple of `K`.
    pub min_truncation_multiple: f64,
    /// Strike truncation of the Dupire problem, as a multiple of `S*`.
    pub k_max_multiple: f64,
    pub y_min: f64,
    pub y_max: f64,
    /// Cells of the log-moneyness grid.
    pub log_space_cells: usize,
    pub schedule: ThetaSchedule,
}

impl Default for PdeConfig {
    fn default() -> Self {
        Self {
            space_cells: 400,
            time_steps: 400,
            s_max_multiple: 4.0,
            min_truncation_multiple: 2.0,
            k_max_multiple: 4.0,
            y_min: -6.0,
            y_max: 6.0,
            log_space_cells: 1200,
            schedule: ThetaSchedule::default(),
        }
    }
}

impl PdeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.space_cells < 8 || self.time_steps < 2 || self.log_space_cells < 8 {
            return Err(Error::param("grid", "resolutions below minimum (8 cells, 2 steps)"));
        }
        if !(self.min_truncation_multiple >= 1.0) || self.s_max_multiple < self.min_truncation_multiple {
            return Err(Error::TruncationTooSmall {
                upper: self.s_max_multiple,
                required: self.min_truncation_multiple,
            });
        }
        if !(self.k_max_multiple > 1.0) {
            return Err(Error::param("k_max_multiple", "must exceed 1"));
        }
        if !(self.y_min < 0.0 && self.y_max > 0.0) {
            return Err(Error::param("y range", "must straddle 0"));
        }
        if !(0.0..=1.0).contains(&self.schedule.theta) {
            return Err(Error::param("theta", "must lie in [0, 1]"));
        }
        Ok(())
    }

    /// Same truncation, resolutions multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let s = |n: usize| ((n as f64 * factor).round() as usize).max(2);
        Self {
            space_cells: s(self.space_cells),
            time_steps: s(self.time_steps),
            log_space_cells: s(self.log_space_cells),
            ..*self
        }
    }
}
