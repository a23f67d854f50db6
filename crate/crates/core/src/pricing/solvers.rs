//! Finite-difference solvers for the three pricing problems.

use std::sync::Arc;

use super::params::{MarketParams, PdeConfig, VolCurve};
use super::surface::{AxisKind, PriceSurface};
use crate::error::{Error, Result};
use crate::grid_pde::{
    march, Field1D, OperatorCoeffs, SpaceGrid, SpaceTimeField, ThetaSchedule, TimeGrid,
};

/// Uniform grid on `[0, cells·h]` with `anchor` on a node and `h` close to
/// `upper / cells`.
fn anchored_grid(anchor: f64, upper: f64, cells: usize) -> Result<SpaceGrid> {
    let h0 = upper / cells as f64;
    let j = (anchor / h0).round().max(1.0);
    let h = anchor / j;
    SpaceGrid::new((0..=cells).map(|i| h * i as f64).collect())
}

/// Spot grid of the backward problem: strike on a node, `S_max` at the
/// configured multiple of `max(K, S*)`.
pub fn spot_grid(params: &MarketParams, strike: f64, cfg: &PdeConfig) -> Result<Arc<SpaceGrid>> {
    cfg.validate()?;
    if !(strike > 0.0 && strike.is_finite()) {
        return Err(Error::param("strike", format!("must be positive, got {strike}")));
    }
    let grid = anchored_grid(strike, cfg.s_max_multiple * strike.max(params.s_star), cfg.space_cells)?;
    let required = cfg.min_truncation_multiple * strike.max(params.s_star);
    if grid.last() < required * (1.0 - 1e-9) {
        return Err(Error::TruncationTooSmall {
            upper: grid.last(),
            required,
        });
    }
    Ok(Arc::new(grid))
}

/// Strike grid of the Dupire problem: `S*` on a node, `K_max = k_max_multiple · S*`.
pub fn strike_grid(params: &MarketParams, cfg: &PdeConfig) -> Result<Arc<SpaceGrid>> {
    cfg.validate()?;
    Ok(Arc::new(anchored_grid(
        params.s_star,
        cfg.k_max_multiple * params.s_star,
        cfg.space_cells,
    )?))
}

/// Uniform log-moneyness grid on roughly `[y_min, y_max]` with `y = 0` on a node.
pub fn log_grid(cfg: &PdeConfig) -> Result<Arc<SpaceGrid>> {
    cfg.validate()?;
    let h0 = (cfg.y_max - cfg.y_min) / cfg.log_space_cells as f64;
    let j = (-cfg.y_min / h0).round().max(1.0);
    let h = -cfg.y_min / j;
    let nodes = (0..=cfg.log_space_cells).map(|i| cfg.y_min + h * i as f64).collect::<Vec<_>>();
    let mut nodes = nodes;
    nodes[j as usize] = 0.0;
    Ok(Arc::new(SpaceGrid::new(nodes)?))
}

/// `v(S, t)` of the backward Black-Scholes problem with local volatility
/// `σ(S)`. The surface time axis is time to expiry, running from the payoff
/// at 0 to `T` (calendar time 0).
pub fn solve_backward_bs(
    vol: &VolCurve,
    params: &MarketParams,
    strike: f64,
    cfg: &PdeConfig,
) -> Result<PriceSurface> {
    params.validate()?;
    let grid = spot_grid(params, strike, cfg)?;
    let time = TimeGrid::uniform(params.expiry, cfg.time_steps)?;
    let (r, q) = (params.r, params.q);
    let coeffs = OperatorCoeffs::new(
        Field1D::from_fn(grid.clone(), |s| {
            let sig = vol.sigma_at(s);
            0.5 * s * s * sig * sig
        })?,
        Field1D::from_fn(grid.clone(), |s| (r - q) * s)?,
        Field1D::constant(grid.clone(), -r),
    )?;
    coeffs.check_parabolic()?;
    let payoff = Field1D::from_fn(grid.clone(), |s| (s - strike).max(0.0))?;
    let s_max = grid.last();
    let field = march(
        &coeffs,
        &payoff,
        &time,
        cfg.schedule,
        |theta| (0.0, s_max * (-q * theta).exp() - strike * (-r * theta).exp()),
        None,
    )?;
    Ok(PriceSurface::new(AxisKind::SpotTime, field))
}

/// `v(S*, t*)` read off a backward surface.
pub fn spot_value(surface: &PriceSurface, params: &MarketParams) -> Result<f64> {
    if surface.kind != AxisKind::SpotTime {
        return Err(Error::param("surface", "expected a spot-time surface"));
    }
    surface.value_at(params.s_star, params.tau_star())
}

/// Dupire operator `½K²σ²(K) ∂²_K − (r−q)K ∂_K − q` on `strikes`.
pub fn dupire_coeffs(vol: &VolCurve, params: &MarketParams, strikes: &Arc<SpaceGrid>) -> Result<OperatorCoeffs> {
    let (r, q) = (params.r, params.q);
    let coeffs = OperatorCoeffs::new(
        Field1D::from_fn(strikes.clone(), |k| {
            let sig = vol.sigma_at(k);
            0.5 * k * k * sig * sig
        })?,
        Field1D::from_fn(strikes.clone(), |k| -(r - q) * k)?,
        Field1D::constant(strikes.clone(), -q),
    )?;
    coeffs.check_parabolic()?;
    Ok(coeffs)
}

/// `u(K, T′)` for `T′ − t*` on `time`, strikes on `strikes` (which must start at 0).
pub fn solve_dupire_on(
    vol: &VolCurve,
    params: &MarketParams,
    strikes: &Arc<SpaceGrid>,
    time: &TimeGrid,
    schedule: ThetaSchedule,
) -> Result<PriceSurface> {
    params.validate()?;
    if strikes.first() != 0.0 {
        return Err(Error::InvalidGrid("Dupire strike grid must start at K = 0".into()));
    }
    let coeffs = dupire_coeffs(vol, params, strikes)?;
    let s = params.s_star;
    let q = params.q;
    let initial = Field1D::from_fn(strikes.clone(), |k| (s - k).max(0.0))?;
    let field = march(&coeffs, &initial, time, schedule, |elapsed| (s * (-q * elapsed).exp(), 0.0), None)?;
    Ok(PriceSurface::new(AxisKind::StrikeMaturity, field))
}

/// Forward Dupire problem from `t*` to `T` on the default strike grid.
pub fn solve_dupire_forward(vol: &VolCurve, params: &MarketParams, cfg: &PdeConfig) -> Result<PriceSurface> {
    let strikes = strike_grid(params, cfg)?;
    let time = TimeGrid::uniform(params.tau_star(), cfg.time_steps)?;
    solve_dupire_on(vol, params, &strikes, &time, cfg.schedule)
}

/// The problem in log-moneyness: diffusion `a(y)`, payoff `w(y, 0)` and the
/// Dirichlet values standing in for the limits at `y → ∓∞`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogProblem {
    pub diffusion: Field1D,
    pub initial: Field1D,
    pub left: f64,
    pub right: f64,
}

pub fn to_log_problem(vol: &VolCurve, params: &MarketParams, cfg: &PdeConfig) -> Result<LogProblem> {
    params.validate()?;
    let grid = log_grid(cfg)?;
    let s = params.s_star;
    Ok(LogProblem {
        diffusion: vol.diffusion_on(&grid, params)?,
        initial: Field1D::from_fn(grid, |y| s * (1.0 - y.exp()).max(0.0))?,
        left: s,
        right: 0.0,
    })
}

/// `a w_yy − (a + r − q) w_y`.
pub fn log_coeffs(diffusion: &Field1D, params: &MarketParams) -> Result<OperatorCoeffs> {
    let drift = params.r - params.q;
    let grid = diffusion.grid().clone();
    let coeffs = OperatorCoeffs::new(
        diffusion.clone(),
        diffusion.map(|a| -(a + drift)),
        Field1D::zeros(grid),
    )?;
    coeffs.check_parabolic()?;
    Ok(coeffs)
}

/// `(∂_τ − L_a) w = F` on `time`. Without a source this is the priced
/// problem (payoff initial data, Dirichlet `S*` and 0); with a source the
/// initial data and both boundary values are 0.
pub fn solve_log_forward_on(
    diffusion: &Field1D,
    params: &MarketParams,
    source: Option<&SpaceTimeField>,
    time: &TimeGrid,
    schedule: ThetaSchedule,
) -> Result<PriceSurface> {
    params.validate()?;
    let coeffs = log_coeffs(diffusion, params)?;
    let grid = diffusion.grid().clone();
    let field = match source {
        None => {
            let s = params.s_star;
            let initial = Field1D::from_fn(grid, |y| s * (1.0 - y.exp()).max(0.0))?;
            march(&coeffs, &initial, time, schedule, |_| (s, 0.0), None)?
        }
        Some(f) => march(&coeffs, &Field1D::zeros(grid), time, schedule, |_| (0.0, 0.0), Some(f))?,
    };
    Ok(PriceSurface::new(AxisKind::LogMoneyness, field))
}

/// As [`solve_log_forward_on`]; the time grid is the source's, or `[0, τ*]`
/// with `cfg.time_steps` steps when there is no source.
pub fn solve_log_forward(
    diffusion: &Field1D,
    params: &MarketParams,
    source: Option<&SpaceTimeField>,
    cfg: &PdeConfig,
) -> Result<PriceSurface> {
    let time = match source {
        Some(f) => f.time().clone(),
        None => TimeGrid::uniform(params.tau_star(), cfg.time_steps)?,
    };
    solve_log_forward_on(diffusion, params, source, &time, cfg.schedule)
}

/// `u(K, ·) → w(ln(K/S*), ·) = u·e^{qτ}`, dropping the `K = 0` node.
pub fn strike_to_log_surface(surface: &PriceSurface, params: &MarketParams) -> Result<PriceSurface> {
    if surface.kind != AxisKind::StrikeMaturity {
        return Err(Error::param("surface", "expected a strike-maturity surface"));
    }
    let k = surface.field.space().nodes();
    let start = k.partition_point(|&x| x <= 0.0);
    let ygrid = Arc::new(SpaceGrid::new(
        k[start..].iter().map(|&x| params.log_moneyness(x)).collect(),
    )?);
    convert(surface, &ygrid, start, params.q, AxisKind::LogMoneyness)
}

/// `w(y, ·) → u(S* e^y, ·) = w·e^{−qτ}`.
pub fn log_to_strike_surface(surface: &PriceSurface, params: &MarketParams) -> Result<PriceSurface> {
    if surface.kind != AxisKind::LogMoneyness {
        return Err(Error::param("surface", "expected a log-moneyness surface"));
    }
    let kgrid = Arc::new(SpaceGrid::new(
        surface.field.space().nodes().iter().map(|&y| params.strike_of(y)).collect(),
    )?);
    convert(surface, &kgrid, 0, -params.q, AxisKind::StrikeMaturity)
}

fn convert(
    surface: &PriceSurface,
    grid: &Arc<SpaceGrid>,
    start: usize,
    rate: f64,
    kind: AxisKind,
) -> Result<PriceSurface> {
    let time = surface.field.time().clone();
    let levels = surface
        .field
        .levels()
        .iter()
        .zip(time.nodes())
        .map(|(l, &t)| {
            let g = (rate * t).exp();
            Field1D::new(grid.clone(), l.values()[start..].iter().map(|v| v * g).collect())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PriceSurface::new(kind, SpaceTimeField::new(time, levels)?))
}
