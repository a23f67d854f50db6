//! Call prices under a strike-dependent volatility: the backward
//! Black-Scholes problem in `(S, t)`, its dual Dupire problem in `(K, T)`
//! and the same problem in log-moneyness, plus the constant-volatility
//! closed form used as an oracle.

mod closed_form;
mod params;
mod solvers;
mod surface;

pub use closed_form::bs_closed_form;
pub use params::{MarketParams, PdeConfig, VolBounds, VolCurve};
pub use solvers::{
    dupire_coeffs, log_coeffs, log_grid, log_to_strike_surface, solve_backward_bs, solve_dupire_forward,
    solve_dupire_on, solve_log_forward, solve_log_forward_on, spot_grid, spot_value, strike_grid,
    strike_to_log_surface, to_log_problem, LogProblem,
};
pub use surface::{extract_quote_slice, AxisKind, PriceSurface, QuoteSlice};
