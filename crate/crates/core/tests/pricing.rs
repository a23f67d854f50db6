use std::sync::Arc;

use approx::assert_relative_eq;
use locvol_core::grid_pde::{Interval, SpaceGrid};
use locvol_core::pricing::{
    bs_closed_form, extract_quote_slice, log_grid, solve_backward_bs, solve_dupire_forward, solve_log_forward,
    spot_value, strike_grid, strike_to_log_surface, AxisKind, MarketParams, PdeConfig, VolBounds, VolCurve,
};
use proptest::prelude::*;

/// Discounted expected payoff under the lognormal law, by composite Simpson
/// in the standard normal variable. Independent of any CDF routine.
fn lognormal_call(s: f64, k: f64, r: f64, q: f64, sigma: f64, tau: f64) -> f64 {
    let n = 200_000;
    let (lo, hi) = (-12.0, 12.0);
    let h = (hi - lo) / n as f64;
    let f = |z: f64| {
        let st = s * ((r - q - 0.5 * sigma * sigma) * tau + sigma * tau.sqrt() * z).exp();
        (st - k).max(0.0) * (-0.5 * z * z).exp()
    };
    let mut acc = f(lo) + f(hi);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(lo + h * i as f64);
    }
    (-r * tau).exp() * acc * h / 3.0 / (2.0 * std::f64::consts::PI).sqrt()
}

fn bounds() -> VolBounds {
    VolBounds::new(0.05, 1.0).unwrap()
}

fn market(q: f64) -> MarketParams {
    MarketParams::new(0.05, q, 100.0, 0.0, 1.0).unwrap()
}

#[test]
fn closed_form_matches_quadrature_oracle() {
    let m = market(0.0);
    let oracle = lognormal_call(100.0, 100.0, 0.05, 0.0, 0.2, 1.0);
    assert_relative_eq!(oracle, 10.4505835721855673, max_relative = 1e-9);
    assert_relative_eq!(bs_closed_form(&m, 0.2, 100.0, 1.0), oracle, max_relative = 1e-10);
    let m2 = market(0.02);
    for k in [60.0, 90.0, 110.0, 150.0] {
        assert_relative_eq!(
            bs_closed_form(&m2, 0.3, k, 0.7),
            lognormal_call(100.0, k, 0.05, 0.02, 0.3, 0.7),
            max_relative = 1e-8
        );
    }
}

#[test]
fn backward_solver_matches_closed_form_and_boundaries() {
    let m = market(0.0);
    let vol = VolCurve::constant(0.2, bounds()).unwrap();
    let surface = solve_backward_bs(&vol, &m, 100.0, &PdeConfig::default()).unwrap();
    assert_eq!(surface.kind, AxisKind::SpotTime);
    let v = spot_value(&surface, &m).unwrap();
    let exact = bs_closed_form(&m, 0.2, 100.0, 1.0);
    assert!((v - exact).abs() / exact < 1e-3, "{v} vs {exact}");
    for level in surface.field.levels() {
        assert_eq!(level.values()[0], 0.0);
    }
    let s = surface.field.space().nodes();
    for (x, p) in s.iter().zip(surface.field.level(0).values()) {
        assert_eq!(*p, (x - 100.0f64).max(0.0));
    }
}

#[test]
fn zero_strike_rejected() {
    let vol = VolCurve::constant(0.2, bounds()).unwrap();
    assert!(solve_backward_bs(&vol, &market(0.0), 0.0, &PdeConfig::default()).is_err());
}

#[test]
fn dupire_surface_boundaries_and_closed_form() {
    let m = market(0.02);
    let vol = VolCurve::constant(0.2, bounds()).unwrap();
    let surface = solve_dupire_forward(&vol, &m, &PdeConfig::default()).unwrap();
    let f = &surface.field;
    for (k, u) in f.space().nodes().iter().zip(f.level(0).values()) {
        assert_eq!(*u, (100.0 - k).max(0.0));
    }
    for (t, level) in f.time().nodes().iter().zip(f.levels()) {
        assert_relative_eq!(level.values()[0], 100.0 * (-0.02 * t).exp(), max_relative = 1e-14);
    }
    let slice = extract_quote_slice(&surface, &m, &Interval::new(90.0, 110.0).unwrap()).unwrap();
    for (k, p) in slice.strikes().iter().zip(slice.prices()) {
        let exact = bs_closed_form(&m, 0.2, *k, 1.0);
        assert!((p - exact).abs() / exact < 1e-3, "K = {k}: {p} vs {exact}");
    }
}

#[test]
fn log_problem_consistent_with_dupire() {
    let m = market(0.02);
    let cfg = PdeConfig::default();
    let strikes = strike_grid(&m, &cfg).unwrap();
    let vol = VolCurve::from_fn(strikes, bounds(), 0.2, None, |k| {
        0.2 + 0.05 * (-((k - 100.0) / 10.0).powi(2)).exp()
    })
    .unwrap();
    let dupire = solve_dupire_forward(&vol, &m, &cfg).unwrap();
    let ygrid = log_grid(&cfg).unwrap();
    let a = vol.diffusion_on(&ygrid, &m).unwrap();
    let w = solve_log_forward(&a, &m, None, &cfg).unwrap();
    let zero = ygrid.nearest(0.0);
    assert_eq!(ygrid.nodes()[zero], 0.0);
    for (y, v) in ygrid.nodes().iter().zip(w.field.level(0).values()) {
        if *y >= 0.0 {
            assert_eq!(*v, 0.0);
        }
    }
    let tau = m.tau_star();
    let wq = w.field.at_time(tau).unwrap();
    let uq = dupire.field.at_time(tau).unwrap();
    for k in [75.0, 90.0, 100.0, 115.0, 130.0] {
        let from_log = wq.at(m.log_moneyness(k)) * (-m.q * tau).exp();
        assert!((from_log - uq.at(k)).abs() < 2e-3 * 100.0, "K = {k}: {from_log} vs {}", uq.at(k));
    }
    // converting the Dupire surface itself is exact on shared nodes
    let conv = strike_to_log_surface(&dupire, &m).unwrap();
    let last = conv.field.last();
    let kn = dupire.field.space().nodes();
    for (j, y) in conv.field.space().nodes().iter().enumerate().step_by(37) {
        let k = m.strike_of(*y);
        let i = kn.iter().position(|x| (x - k).abs() < 1e-9 * k).unwrap();
        assert_relative_eq!(
            last.values()[j] * (-m.q * tau).exp(),
            dupire.field.last().values()[i],
            max_relative = 1e-12
        );
    }
}

#[test]
fn duality_for_a_smile() {
    let m = market(0.02);
    let cfg = PdeConfig::default();
    let strikes = strike_grid(&m, &cfg).unwrap();
    let vol = VolCurve::from_fn(strikes, bounds(), 0.2, None, |k| (0.2 + 0.1 * ((k - 100.0) / 100.0).powi(2)).min(0.5)).unwrap();
    let slice = extract_quote_slice(
        &solve_dupire_forward(&vol, &m, &cfg).unwrap(),
        &m,
        &Interval::new(70.0, 135.0).unwrap(),
    )
    .unwrap();
    for (k, u) in slice.strikes().iter().zip(slice.prices()).step_by(13) {
        let v = spot_value(&solve_backward_bs(&vol, &m, *k, &cfg).unwrap(), &m).unwrap();
        assert!((v - u).abs() <= 2e-3 * 100.0, "K = {k}: {v} vs {u}");
    }
}

#[test]
fn slice_at_zero_strike_is_discounted_spot() {
    let m = market(0.02);
    let vol = VolCurve::constant(0.2, bounds()).unwrap();
    let surface = solve_dupire_forward(&vol, &m, &PdeConfig::default()).unwrap();
    let slice = extract_quote_slice(&surface, &m, &Interval::new(0.0, 10.0).unwrap()).unwrap();
    assert_eq!(slice.strikes()[0], 0.0);
    assert_relative_eq!(slice.prices()[0], 100.0 * (-0.02f64).exp(), max_relative = 1e-14);
}

#[test]
fn curve_rejects_out_of_bound_values() {
    let g = Arc::new(SpaceGrid::uniform(0.0, 200.0, 10).unwrap());
    assert!(VolCurve::from_fn(g, bounds(), 0.2, None, |_| 1.5).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn dupire_slices_are_arbitrage_free(amp in -0.1f64..0.1, center in 85.0f64..115.0) {
        let m = market(0.02);
        let cfg = PdeConfig { space_cells: 200, time_steps: 100, ..PdeConfig::default() };
        let strikes = strike_grid(&m, &cfg).unwrap();
        let vol = VolCurve::from_fn(strikes, bounds(), 0.2, None, |k| {
            0.2 + amp * (-((k - center) / 12.0).powi(2)).exp()
        }).unwrap();
        let slice = extract_quote_slice(
            &solve_dupire_forward(&vol, &m, &cfg).unwrap(),
            &m,
            &Interval::new(70.0, 135.0).unwrap(),
        ).unwrap();
        prop_assert!(slice.check_no_arbitrage(1e-10).is_ok());
    }

    #[test]
    fn price_increases_with_constant_vol(s1 in 0.1f64..0.5, ds in 0.01f64..0.2) {
        let m = market(0.0);
        let cfg = PdeConfig { space_cells: 200, time_steps: 100, ..PdeConfig::default() };
        let lo = spot_value(&solve_backward_bs(&VolCurve::constant(s1, bounds()).unwrap(), &m, 100.0, &cfg).unwrap(), &m).unwrap();
        let hi = spot_value(&solve_backward_bs(&VolCurve::constant(s1 + ds, bounds()).unwrap(), &m, 100.0, &cfg).unwrap(), &m).unwrap();
        prop_assert!(hi > lo);
    }
}
