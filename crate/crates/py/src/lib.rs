//! Python module `locvol`: market and volatility types plus the forward,
//! inverse and diagnostic routines of `locvol_core`.

use std::sync::Arc;

use locvol_core::carleman::{CarlemanWeights, DomainNest};
use locvol_core::cli_io::formats::{weight_rows, SeparationRecord};
use locvol_core::grid_pde::{Field1D, Interval, SpaceGrid};
use locvol_core::inverse::{
    bump_family, calibrate_slice, dupire_invert_surface, solve_dupire_for_inversion, stability_sweep,
    CalibrationOptions, StabilitySetup, SweepOutcome,
};
use locvol_core::pricing::{
    self, extract_quote_slice, solve_backward_bs, solve_dupire_forward, spot_value, PdeConfig, QuoteSlice,
    VolBounds,
};
use locvol_core::Error;
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn py_err(e: Error) -> PyErr {
    if e.is_numerical() {
        PyArithmeticError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

trait OrPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> OrPy<T> for locvol_core::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(py_err)
    }
}

/// Market data `(r, q, S*, t*, T)`.
#[pyclass(name = "MarketParams", module = "locvol", skip_from_py_object)]
#[derive(Clone)]
struct PyMarket {
    inner: pricing::MarketParams,
}

#[pymethods]
impl PyMarket {
    #[new]
    #[pyo3(signature = (r=0.05, q=0.02, s_star=100.0, t_star=0.0, expiry=1.0))]
    fn new(r: f64, q: f64, s_star: f64, t_star: f64, expiry: f64) -> PyResult<Self> {
        Ok(Self {
            inner: pricing::MarketParams::new(r, q, s_star, t_star, expiry).py()?,
        })
    }

    #[getter]
    fn r(&self) -> f64 {
        self.inner.r
    }

    #[getter]
    fn q(&self) -> f64 {
        self.inner.q
    }

    #[getter]
    fn s_star(&self) -> f64 {
        self.inner.s_star
    }

    #[getter]
    fn tau_star(&self) -> f64 {
        self.inner.tau_star()
    }

    fn __repr__(&self) -> String {
        let m = &self.inner;
        format!(
            "MarketParams(r={}, q={}, s_star={}, t_star={}, expiry={})",
            m.r, m.q, m.s_star, m.t_star, m.expiry
        )
    }
}

/// Grid resolutions of the pricing solvers.
#[pyclass(name = "PdeConfig", module = "locvol", skip_from_py_object)]
#[derive(Clone)]
struct PyPde {
    inner: PdeConfig,
}

#[pymethods]
impl PyPde {
    #[new]
    #[pyo3(signature = (space_cells=400, time_steps=400, log_space_cells=1200))]
    fn new(space_cells: usize, time_steps: usize, log_space_cells: usize) -> PyResult<Self> {
        let inner = PdeConfig {
            space_cells,
            time_steps,
            log_space_cells,
            ..PdeConfig::default()
        };
        inner.validate().py()?;
        Ok(Self { inner })
    }

    fn scaled(&self, factor: f64) -> Self {
        Self {
            inner: self.inner.scaled(factor),
        }
    }
}

fn pde_or_default(pde: Option<PyRef<'_, PyPde>>) -> PdeConfig {
    pde.map_or_else(PdeConfig::default, |p| p.inner)
}

/// Strike-dependent volatility, linear between nodes.
#[pyclass(name = "VolCurve", module = "locvol", skip_from_py_object)]
#[derive(Clone)]
struct PyVol {
    inner: pricing::VolCurve,
}

#[pymethods]
impl PyVol {
    #[new]
    #[pyo3(signature = (strikes, sigma, background=0.2, sigma_min=0.05, sigma_max=1.0))]
    fn new(strikes: Vec<f64>, sigma: Vec<f64>, background: f64, sigma_min: f64, sigma_max: f64) -> PyResult<Self> {
        let bounds = VolBounds::new(sigma_min, sigma_max).py()?;
        let grid = Arc::new(SpaceGrid::new(strikes).py()?);
        let field = Field1D::new(grid, sigma).py()?;
        Ok(Self {
            inner: pricing::VolCurve::new(field, bounds, background, None).py()?,
        })
    }

    #[staticmethod]
    #[pyo3(signature = (sigma, sigma_min=0.05, sigma_max=1.0))]
    fn constant(sigma: f64, sigma_min: f64, sigma_max: f64) -> PyResult<Self> {
        let bounds = VolBounds::new(sigma_min, sigma_max).py()?;
        Ok(Self {
            inner: pricing::VolCurve::constant(sigma, bounds).py()?,
        })
    }

    fn sigma_at(&self, strike: f64) -> f64 {
        self.inner.sigma_at(strike)
    }

    fn strikes(&self) -> Vec<f64> {
        self.inner.strikes().nodes().to_vec()
    }

    fn sigma(&self) -> Vec<f64> {
        self.inner.sigma().values().to_vec()
    }
}

/// Black-Scholes call price with constant volatility.
#[pyfunction]
fn bs_closed_form(market: PyRef<'_, PyMarket>, sigma: f64, strike: f64, time_to_expiry: f64) -> f64 {
    pricing::bs_closed_form(&market.inner, sigma, strike, time_to_expiry)
}

/// Finite-difference price `v(S*, t*)` of the call with strike `strike`.
#[pyfunction]
#[pyo3(signature = (vol, market, strike, pde=None))]
fn price(vol: PyRef<'_, PyVol>, market: PyRef<'_, PyMarket>, strike: f64, pde: Option<PyRef<'_, PyPde>>) -> PyResult<f64> {
    let cfg = pde_or_default(pde);
    let surface = solve_backward_bs(&vol.inner, &market.inner, strike, &cfg).py()?;
    spot_value(&surface, &market.inner).py()
}

/// Dupire quotes `(strikes, prices)` on `[lo, hi]` at maturity `T`.
#[pyfunction]
#[pyo3(signature = (vol, market, lo, hi, pde=None))]
fn dupire_slice(
    vol: PyRef<'_, PyVol>,
    market: PyRef<'_, PyMarket>,
    lo: f64,
    hi: f64,
    pde: Option<PyRef<'_, PyPde>>,
) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let cfg = pde_or_default(pde);
    let surface = solve_dupire_forward(&vol.inner, &market.inner, &cfg).py()?;
    let slice = extract_quote_slice(&surface, &market.inner, &Interval::new(lo, hi).py()?).py()?;
    Ok((slice.strikes().to_vec(), slice.prices().to_vec()))
}

/// Solve forward, then invert algebraically on `[lo, hi]`.
#[pyfunction]
#[pyo3(signature = (vol, market, lo, hi, pde=None))]
fn invert_dupire(
    vol: PyRef<'_, PyVol>,
    market: PyRef<'_, PyMarket>,
    lo: f64,
    hi: f64,
    pde: Option<PyRef<'_, PyPde>>,
) -> PyResult<PyVol> {
    let cfg = pde_or_default(pde);
    let v = &vol.inner;
    let surface = solve_dupire_for_inversion(v, &market.inner, &cfg).py()?;
    let inv = dupire_invert_surface(&surface, &market.inner, &Interval::new(lo, hi).py()?, v.bounds(), v.background())
        .py()?;
    Ok(PyVol { inner: inv.curve })
}

/// Fit σ on `(support_lo, support_hi)` to quotes; returns the curve and the
/// iteration count.
#[pyfunction]
#[pyo3(signature = (strikes, prices, background, market, support_lo, support_hi, pde=None, reg_weight=1e-8))]
#[allow(clippy::too_many_arguments)]
fn calibrate(
    strikes: Vec<f64>,
    prices: Vec<f64>,
    background: PyRef<'_, PyVol>,
    market: PyRef<'_, PyMarket>,
    support_lo: f64,
    support_hi: f64,
    pde: Option<PyRef<'_, PyPde>>,
    reg_weight: f64,
) -> PyResult<(PyVol, usize)> {
    let cfg = pde_or_default(pde);
    let slice = QuoteSlice::new(strikes, prices).py()?;
    let opts = CalibrationOptions {
        reg_weight,
        ..CalibrationOptions::default()
    };
    let cal = calibrate_slice(
        &slice,
        &background.inner,
        &market.inner,
        &Interval::new(support_lo, support_hi).py()?,
        &cfg,
        &opts,
    )
    .py()?;
    Ok((PyVol { inner: cal.curve }, cal.iterations))
}

fn default_setup(market: &pricing::MarketParams) -> PyResult<StabilitySetup> {
    let s = market.s_star / 100.0;
    let i_star = Interval::new(80.0 * s, 120.0 * s).py()?;
    let i1_star = Interval::new(70.0 * s, 135.0 * s).py()?;
    let base = DomainNest::default_log();
    let nest = DomainNest::new(
        i_star.map(|k| market.log_moneyness(k)),
        i1_star.map(|k| market.log_moneyness(k)),
        base.omega,
        base.omega1,
        base.omega2,
    )
    .py()?;
    Ok(StabilitySetup { i_star, i1_star, nest })
}

/// Stability ratios of the built-in bump family against a constant
/// background, one dict per member.
#[pyfunction]
#[pyo3(signature = (market, background=0.2, epsilons=vec![1e-3, 1e-2, 1e-1], pde=None))]
fn stability(
    py: Python<'_>,
    market: PyRef<'_, PyMarket>,
    background: f64,
    epsilons: Vec<f64>,
    pde: Option<PyRef<'_, PyPde>>,
) -> PyResult<Vec<Py<PyDict>>> {
    let cfg = pde_or_default(pde);
    let setup = default_setup(&market.inner)?;
    let bounds = VolBounds::new(0.05, 1.0).py()?;
    let bg = pricing::VolCurve::constant(background, bounds).py()?;
    let family = bump_family(&market.inner, &epsilons);
    let outcomes = stability_sweep(&bg, &family, &market.inner, &setup, &cfg).py()?;
    outcomes
        .into_iter()
        .map(|o| {
            let d = PyDict::new(py);
            match o {
                SweepOutcome::Report(r) => {
                    d.set_item("id", r.perturbation_id)?;
                    d.set_item("epsilon", r.epsilon)?;
                    d.set_item("vol_norm", r.vol_norm)?;
                    d.set_item("price_norm", r.price_norm)?;
                    d.set_item("ratio", r.ratio)?;
                }
                SweepOutcome::Skipped { id, epsilon, reason } => {
                    d.set_item("id", id)?;
                    d.set_item("epsilon", epsilon)?;
                    d.set_item("skipped", reason)?;
                }
            }
            Ok(d.unbind())
        })
        .collect()
}

/// Carleman weight samples at `τ*` on the default geometry, as a dict of
/// lists plus the separation constants.
#[pyfunction]
#[pyo3(signature = (a_param=0.84, lambda_=1.0, tau_star=0.5, cells=2000))]
fn carleman_weights(py: Python<'_>, a_param: f64, lambda_: f64, tau_star: f64, cells: usize) -> PyResult<Py<PyDict>> {
    let w = CarlemanWeights::new(DomainNest::default_log(), a_param, lambda_, 1.0, tau_star, cells).py()?;
    let rows = weight_rows(&w).py()?;
    let sep = SeparationRecord::from_weights(&w);
    let d = PyDict::new(py);
    d.set_item("y", rows.iter().map(|r| r.y).collect::<Vec<_>>())?;
    d.set_item("psi0", rows.iter().map(|r| r.psi0).collect::<Vec<_>>())?;
    d.set_item("psi", rows.iter().map(|r| r.psi).collect::<Vec<_>>())?;
    d.set_item("phi", rows.iter().map(|r| r.phi).collect::<Vec<_>>())?;
    d.set_item("eta", rows.iter().map(|r| r.eta).collect::<Vec<_>>())?;
    d.set_item("delta", sep.delta)?;
    d.set_item("m1", sep.separation.m1)?;
    d.set_item("m2", sep.separation.m2)?;
    d.set_item("separation_holds", sep.separation.holds())?;
    Ok(d.unbind())
}

#[pymodule]
fn locvol(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMarket>()?;
    m.add_class::<PyPde>()?;
    m.add_class::<PyVol>()?;
    m.add_function(wrap_pyfunction!(bs_closed_form, m)?)?;
    m.add_function(wrap_pyfunction!(price, m)?)?;
    m.add_function(wrap_pyfunction!(dupire_slice, m)?)?;
    m.add_function(wrap_pyfunction!(invert_dupire, m)?)?;
    m.add_function(wrap_pyfunction!(calibrate, m)?)?;
    m.add_function(wrap_pyfunction!(stability, m)?)?;
    m.add_function(wrap_pyfunction!(carleman_weights, m)?)?;
    Ok(())
}
