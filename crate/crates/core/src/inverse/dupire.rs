use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid_pde::stencil::derivatives;
use crate::grid_pde::{Field1D, Interval, SpaceGrid, TimeGrid};
use crate::pricing::{
    solve_dupire_on, strike_grid, AxisKind, MarketParams, PdeConfig, PriceSurface, VolBounds, VolCurve,
};

/// A raw local-volatility value that fell outside the bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClampEvent {
    pub strike: f64,
    pub raw: f64,
    pub clamped: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DupireInversion {
    pub curve: VolCurve,
    pub clamped: Vec<ClampEvent>,
}

impl DupireInversion {
    pub fn is_clamped(&self, strike: f64) -> bool {
        self.clamped.iter().any(|c| c.strike == strike)
    }
}

/// Maturity step of the centred time difference: `T / 200`.
pub fn inversion_dt(params: &MarketParams) -> f64 {
    params.expiry / 200.0
}

/// Elapsed-time grid reaching `τ* + ΔT` with `τ* − ΔT`, `τ*` and `τ* + ΔT`
/// on nodes and roughly `steps` steps up to `τ*`.
pub fn inversion_time(params: &MarketParams, steps: usize) -> Result<TimeGrid> {
    let tau = params.tau_star();
    let big = inversion_dt(params);
    if !(tau > big) {
        return Err(Error::param(
            "t_star",
            format!("time to expiry {tau} must exceed the inversion step {big}"),
        ));
    }
    let dt = tau / steps as f64;
    let near = ((big / dt).round() as usize).max(1);
    let far = (((tau - big) / dt).round() as usize).max(1);
    let mut nodes: Vec<f64> = (0..far).map(|i| (tau - big) * i as f64 / far as f64).collect();
    for i in 0..=2 * near {
        nodes.push(tau - big + big * i as f64 / near as f64);
    }
    let last = nodes.len() - 1;
    nodes[far + near] = tau;
    nodes[last] = tau + big;
    TimeGrid::new(nodes)
}

/// Dupire surface on the inversion time grid.
pub fn solve_dupire_for_inversion(vol: &VolCurve, params: &MarketParams, cfg: &PdeConfig) -> Result<PriceSurface> {
    let strikes = strike_grid(params, cfg)?;
    let time = inversion_time(params, cfg.time_steps)?;
    solve_dupire_on(vol, params, &strikes, &time, cfg.schedule)
}

/// Local volatility `σ² = 2 (u_T + (r−q) K u_K + q u) / (K² u_KK)` at the
/// surface nodes inside `window`, at maturity `T`.
///
/// `u_T` is a centred difference over `T ± ΔT`; both maturities must be
/// surface levels. Any node with `u_KK ≤ 10⁻¹² S*` aborts the inversion with
/// the offending strikes. Values outside `bounds` are clamped and reported.
pub fn dupire_invert_surface(
    surface: &PriceSurface,
    params: &MarketParams,
    window: &Interval,
    bounds: VolBounds,
    background: f64,
) -> Result<DupireInversion> {
    if surface.kind != AxisKind::StrikeMaturity {
        return Err(Error::param("surface", "expected a strike-maturity surface"));
    }
    let field = &surface.field;
    let time = field.time();
    let (tau, big) = (params.tau_star(), inversion_dt(params));
    let level = |t: f64| {
        time.level_of(t).ok_or_else(|| {
            Error::param("surface", format!("maturity level at elapsed time {t} is missing"))
        })
    };
    let (lo, mid, hi) = (level(tau - big)?, level(tau)?, level(tau + big)?);
    let k = field.space().nodes();
    let range = field.space().window_indices(window)?;
    if range.start == 0 || range.end == k.len() {
        return Err(Error::param("window", "must stay off the grid end points"));
    }
    let u = field.level(mid).values();
    let (d1, d2) = derivatives(k, u);
    let (up, down) = (field.level(hi).values(), field.level(lo).values());
    let dt = time.nodes()[hi] - time.nodes()[lo];
    let floor = 1e-12 * params.s_star;
    let bad: Vec<f64> = range.clone().filter(|&i| !(d2[i] > floor)).map(|i| k[i]).collect();
    if !bad.is_empty() {
        return Err(Error::CurvatureViolation { strikes: bad });
    }
    let (r, q) = (params.r, params.q);
    let mut clamped = Vec::new();
    let mut sig = Vec::with_capacity(range.len());
    for i in range.clone() {
        let ut = (up[i] - down[i]) / dt;
        let var = 2.0 * (ut + (r - q) * k[i] * d1[i] + q * u[i]) / (k[i] * k[i] * d2[i]);
        let raw = if var > 0.0 { var.sqrt() } else { 0.0 };
        let s = bounds.clamp(raw);
        if s != raw {
            clamped.push(ClampEvent {
                strike: k[i],
                raw,
                clamped: s,
            });
        }
        sig.push(s);
    }
    let grid = Arc::new(SpaceGrid::new(k[range].to_vec())?);
    Ok(DupireInversion {
        curve: VolCurve::new(Field1D::new(grid, sig)?, bounds, bounds.clamp(background), None)?,
        clamped,
    })
}
