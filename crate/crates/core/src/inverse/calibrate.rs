use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid_pde::stencil::central_weights;
use crate::grid_pde::{march, Field1D, Interval, SpaceGrid, SpaceTimeField, TimeGrid};
use crate::pricing::{
    dupire_coeffs, solve_dupire_on, strike_grid, MarketParams, PdeConfig, QuoteSlice, VolCurve,
};

/// Optimizer settings for [`calibrate_slice`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationOptions {
    /// Weight of `‖σ′′‖²_{L²(I*)}`.
    pub reg_weight: f64,
    pub max_iterations: usize,
    /// Stop once `‖u_σ − φ*‖ / ‖φ*‖` falls below this.
    pub tolerance: f64,
    /// No-arbitrage tolerance on the quotes, in currency units.
    pub arbitrage_tol: f64,
}

impl Default for CalibrationOptions {
    fn default() -> Self {
        Self {
            reg_weight: 1e-8,
            max_iterations: 50,
            tolerance: 1e-8,
            arbitrage_tol: 5e-2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    Tolerance,
    Stagnation,
    StepTooSmall,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    pub curve: VolCurve,
    /// Per strike node of `curve`: the value sits on a bound.
    pub clamped: Vec<bool>,
    pub iterations: usize,
    /// Data misfit `‖u_σ − φ*‖` at the start and after every accepted step.
    pub residual_history: Vec<f64>,
    pub stop: StopReason,
}

/// Relative objective decrease below which an accepted step counts as stalled.
const STALL_GAIN: f64 = 1e-4;

/// Forward model on the Dupire grid: σ at the strike nodes ↦ quotes.
struct Model<'a> {
    params: &'a MarketParams,
    cfg: &'a PdeConfig,
    strikes: Arc<SpaceGrid>,
    time: TimeGrid,
    slice: &'a QuoteSlice,
    background: f64,
    bounds: crate::pricing::VolBounds,
}

impl Model<'_> {
    fn curve(&self, sigma: &[f64]) -> Result<VolCurve> {
        VolCurve::new(
            Field1D::new(self.strikes.clone(), sigma.to_vec())?,
            self.bounds,
            self.background,
            None,
        )
    }

    fn observe(&self, level: &Field1D) -> Vec<f64> {
        self.slice.strikes().iter().map(|&k| level.at(k)).collect()
    }

    fn solve(&self, sigma: &[f64]) -> Result<(VolCurve, SpaceTimeField)> {
        let curve = self.curve(sigma)?;
        let u = solve_dupire_on(&curve, self.params, &self.strikes, &self.time, self.cfg.schedule)?.field;
        Ok((curve, u))
    }

    /// Columns `∂(observed u) / ∂σ_j` from sourced solves: perturbing `σ_j`
    /// changes only the diffusion at node `j`.
    fn jacobian(&self, curve: &VolCurve, u: &SpaceTimeField, unknowns: &[usize]) -> Result<DMatrix<f64>> {
        let coeffs = dupire_coeffs(curve, self.params, &self.strikes)?;
        let k = self.strikes.nodes();
        let sigma = curve.sigma().values();
        let zero = Field1D::zeros(self.strikes.clone());
        let cols: Vec<Vec<f64>> = unknowns
            .par_iter()
            .map(|&j| {
                let (_, w2) = central_weights(k[j] - k[j - 1], k[j + 1] - k[j]);
                let dc2 = k[j] * k[j] * sigma[j];
                let levels = u
                    .levels()
                    .iter()
                    .map(|l| {
                        let v = l.values();
                        let mut src = vec![0.0; v.len()];
                        src[j] = dc2 * (w2[0] * v[j - 1] + w2[1] * v[j] + w2[2] * v[j + 1]);
                        Field1D::new(self.strikes.clone(), src)
                    })
                    .collect::<Result<Vec<_>>>()?;
                let source = SpaceTimeField::new(self.time.clone(), levels)?;
                let du = march(&coeffs, &zero, &self.time, self.cfg.schedule, |_| (0.0, 0.0), Some(&source))?;
                Ok(self.observe(du.last()))
            })
            .collect::<Result<_>>()?;
        let m = self.slice.len();
        Ok(DMatrix::from_fn(m, unknowns.len(), |i, c| cols[c][i]))
    }
}

/// Second-difference rows `√(reg·h) (σ_{j−1} − 2σ_j + σ_{j+1}) / h²` over
/// the unknown nodes, as `(value, d/dσ_unknowns)`.
fn regularization(sigma: &[f64], k: &[f64], unknowns: &[usize], reg: f64) -> (DVector<f64>, DMatrix<f64>) {
    let n = unknowns.len();
    let mut r = DVector::zeros(n);
    let mut jac = DMatrix::zeros(n, n);
    for (row, &j) in unknowns.iter().enumerate() {
        let (_, w2) = central_weights(k[j] - k[j - 1], k[j + 1] - k[j]);
        let scale = (reg * 0.5 * (k[j + 1] - k[j - 1])).sqrt();
        r[row] = scale * (w2[0] * sigma[j - 1] + w2[1] * sigma[j] + w2[2] * sigma[j + 1]);
        for (off, w) in [(-1i64, w2[0]), (0, w2[1]), (1, w2[2])] {
            let node = (j as i64 + off) as usize;
            if let Some(col) = unknowns.iter().position(|&u| u == node) {
                jac[(row, col)] = scale * w;
            }
        }
    }
    (r, jac)
}

/// Fit σ on the strike nodes strictly inside `support` to the quotes,
/// keeping the background values elsewhere.
///
/// Damped Gauss–Newton on `Σ (u_σ(K) − φ*(K))² + reg ‖σ′′‖²`, with the
/// exact discrete Jacobian and projection onto the volatility bounds.
/// Quotes off the Dupire grid are matched through cubic interpolation.
pub fn calibrate_slice(
    slice: &QuoteSlice,
    background: &VolCurve,
    params: &MarketParams,
    support: &Interval,
    cfg: &PdeConfig,
    opts: &CalibrationOptions,
) -> Result<Calibration> {
    params.validate()?;
    if !(opts.reg_weight >= 0.0 && opts.reg_weight.is_finite()) {
        return Err(Error::param("reg_weight", "must be nonnegative"));
    }
    slice.check_no_arbitrage(opts.arbitrage_tol)?;
    let strikes = strike_grid(params, cfg)?;
    let time = TimeGrid::uniform(params.tau_star(), cfg.time_steps)?;
    let k = strikes.nodes().to_vec();
    let span = Interval::new(k[1], k[k.len() - 2])?;
    if !slice.span().is_inside(&span) {
        return Err(Error::WindowOutsideGrid {
            lo: slice.span().lo,
            hi: slice.span().hi,
            grid_lo: span.lo,
            grid_hi: span.hi,
        });
    }
    let unknowns: Vec<usize> = (1..k.len() - 1).filter(|&j| k[j] > support.lo && k[j] < support.hi).collect();
    if unknowns.is_empty() {
        return Err(Error::TooFewNodes { needed: 1, found: 0 });
    }
    let bounds = background.bounds();
    let model = Model {
        params,
        cfg,
        strikes,
        time,
        slice,
        background: background.background(),
        bounds,
    };
    let data = DVector::from_column_slice(slice.prices());
    let data_norm = data.norm().max(f64::MIN_POSITIVE);

    let misfit = |sigma: &[f64]| -> Result<(VolCurve, SpaceTimeField, DVector<f64>, f64)> {
        let (curve, u) = model.solve(sigma)?;
        let r = DVector::from_vec(model.observe(u.last())) - &data;
        let (reg, _) = regularization(sigma, &k, &unknowns, opts.reg_weight);
        let obj = r.norm_squared() + reg.norm_squared();
        Ok((curve, u, r, obj))
    };

    let mut sigma: Vec<f64> = k.iter().map(|&x| background.sigma_at(x)).collect();
    let (mut curve, mut u, mut r, mut obj) = misfit(&sigma)?;
    let mut history = vec![r.norm()];
    let mut mu = 0.0_f64;
    let finish = |curve: VolCurve, sigma: &[f64], iterations, history, stop| {
        let clamped = (0..sigma.len())
            .map(|j| unknowns.contains(&j) && (sigma[j] <= bounds.min || sigma[j] >= bounds.max))
            .collect();
        Ok(Calibration {
            curve,
            clamped,
            iterations,
            residual_history: history,
            stop,
        })
    };

    for iter in 0..opts.max_iterations {
        if r.norm() / data_norm < opts.tolerance {
            return finish(curve, &sigma, iter, history, StopReason::Tolerance);
        }
        let jd = model.jacobian(&curve, &u, &unknowns)?;
        let (rr, jr) = regularization(&sigma, &k, &unknowns, opts.reg_weight);
        let jtj = jd.transpose() * &jd + jr.transpose() * &jr;
        let grad = jd.transpose() * &r + jr.transpose() * &rr;
        let diag_max = jtj.diagonal().max().max(f64::MIN_POSITIVE);
        if mu == 0.0 {
            mu = 1e-10 * diag_max;
        }
        let mut accepted = None;
        for _ in 0..30 {
            let mut lhs = jtj.clone();
            for d in 0..lhs.nrows() {
                lhs[(d, d)] += mu;
            }
            let Some(step) = lhs.cholesky().map(|c| c.solve(&(-&grad))) else {
                mu *= 10.0;
                continue;
            };
            let mut trial = sigma.clone();
            for (c, &j) in unknowns.iter().enumerate() {
                trial[j] = bounds.clamp(sigma[j] + step[c]);
            }
            let moved = unknowns.iter().map(|&j| (trial[j] - sigma[j]).abs()).fold(0.0, f64::max);
            if moved < 1e-14 {
                return finish(curve, &sigma, iter, history, StopReason::StepTooSmall);
            }
            let (c2, u2, r2, obj2) = misfit(&trial)?;
            if obj2 < obj {
                accepted = Some((trial, c2, u2, r2, obj2));
                mu = (mu / 3.0).max(1e-16 * diag_max);
                break;
            }
            mu *= 4.0;
        }
        let Some((trial, c2, u2, r2, obj2)) = accepted else {
            return finish(curve, &sigma, iter, history, StopReason::Stagnation);
        };
        let gain = (obj - obj2) / obj.max(f64::MIN_POSITIVE);
        sigma = trial;
        curve = c2;
        u = u2;
        r = r2;
        obj = obj2;
        history.push(r.norm());
        if gain < STALL_GAIN {
            return finish(curve, &sigma, iter + 1, history, StopReason::Stagnation);
        }
    }
    if r.norm() / data_norm < opts.tolerance {
        return finish(curve, &sigma, opts.max_iterations, history, StopReason::Tolerance);
    }
    Err(Error::NonConvergence {
        iterations: opts.max_iterations,
        residuals: history,
    })
}
