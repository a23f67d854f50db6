//! Numerical probes of the weighted Carleman inequality and of the energy
//! estimate for the sourced log-moneyness problem.

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;

use super::weights::CarlemanWeights;
use crate::error::{Error, Result};
use crate::grid_pde::stencil::{derivatives, trapezoid, trapezoid_weights};
use crate::grid_pde::{Field1D, SpaceGrid, SpaceTimeField, ThetaSchedule, TimeGrid};
use crate::pricing::{solve_log_forward_on, MarketParams};

/// Power of `ℓ` paired with `s³|z|²` on the left-hand side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LhsScaling {
    /// `s³ ℓ⁻¹ |z|²`.
    #[default]
    AsPrinted,
    /// `s³ ℓ⁻³ |z|²`.
    Standard,
}

/// The three weighted integrals. All are multiplied by `e^{−log_scale}`,
/// `log_scale = 2 s max η`, to stay within floating-point range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeResult {
    pub lhs: f64,
    pub rhs_interior: f64,
    pub rhs_observation: f64,
    pub log_scale: f64,
}

impl ProbeResult {
    /// `lhs / (rhs_interior + rhs_observation)`, `None` when both sides vanish.
    pub fn c_hat(&self) -> Option<f64> {
        let rhs = self.rhs_interior + self.rhs_observation;
        (rhs > 0.0).then(|| self.lhs / rhs)
    }
}

/// Weighted integrals of `z` on `Ω₁ × (0, T)`.
///
/// `z` must live on a space grid spanning the weight domain, on a time grid
/// spanning `[0, T]`, and vanish at both space end points. Space integrals
/// use the trapezoid rule; time integrals the midpoint rule, so `ℓ = 0` is
/// never evaluated.
pub fn carleman_probe(
    z: &SpaceTimeField,
    a: &Field1D,
    params: &MarketParams,
    weights: &CarlemanWeights,
    scaling: LhsScaling,
) -> Result<ProbeResult> {
    let space = z.space();
    let dom = weights.nest().domain;
    let tol = 1e-9 * dom.len();
    if (space.first() - dom.lo).abs() > tol || (space.last() - dom.hi).abs() > tol {
        return Err(Error::InvalidGrid(format!(
            "probe grid [{}, {}] must span the weight domain [{}, {}]",
            space.first(),
            space.last(),
            dom.lo,
            dom.hi
        )));
    }
    if (z.time().horizon() - weights.horizon()).abs() > 1e-9 * weights.horizon() {
        return Err(Error::param(
            "z",
            format!("time grid must end at T = {}, got {}", weights.horizon(), z.time().horizon()),
        ));
    }
    a.check_same_grid(z.level(0))?;
    let zmax = z.levels().iter().map(Field1D::max_abs).fold(0.0, f64::max);
    let bound_tol = 1e-12 * zmax.max(f64::MIN_POSITIVE);
    for (level, &t) in z.levels().iter().zip(z.time().nodes()) {
        let v = level.values();
        for end in [v[0], v[v.len() - 1]] {
            if end.abs() > bound_tol {
                return Err(Error::BoundaryHypothesis { tau: t, value: end });
            }
        }
    }

    let y = space.nodes();
    let wy = trapezoid_weights(y);
    let obs = space.window_indices(&weights.nest().omega)?;
    let av = a.values();
    let drift = params.r - params.q;
    let (s, s3) = (weights.s(), weights.s().powi(3));
    let eta_max = weights.eta_max();
    let numer: Vec<f64> = y.iter().map(|&x| weights.eta_numerator(x)).collect();
    let t = z.time().nodes();

    let mut out = ProbeResult {
        lhs: 0.0,
        rhs_interior: 0.0,
        rhs_observation: 0.0,
        log_scale: 2.0 * s * eta_max,
    };
    let n = y.len();
    let mut mid = vec![0.0; n];
    for k in 0..t.len() - 1 {
        let dt = t[k + 1] - t[k];
        let tau = 0.5 * (t[k] + t[k + 1]);
        let ell = weights.ell(tau);
        let (z0, z1) = (z.level(k).values(), z.level(k + 1).values());
        for i in 0..n {
            mid[i] = 0.5 * (z0[i] + z1[i]);
        }
        let (d1, d2) = derivatives(y, &mid);
        let (mut lhs, mut int, mut ob) = (0.0, 0.0, 0.0);
        for i in 0..n {
            let w = (2.0 * s * (numer[i] / ell - eta_max)).exp() * wy[i];
            if w == 0.0 {
                continue;
            }
            let zt = (z1[i] - z0[i]) / dt;
            let zz = mid[i] * mid[i];
            let zero_term = match scaling {
                LhsScaling::AsPrinted => s3 / ell * zz,
                LhsScaling::Standard => s3 / ell.powi(3) * zz,
            };
            lhs += w * (s / ell * d1[i] * d1[i] + zero_term + ell / s * zt * zt);
            let pz = zt - (av[i] * d2[i] - (av[i] + drift) * d1[i]);
            int += w * pz * pz;
            if obs.contains(&i) {
                ob += w * s3 / ell.powi(3) * zz;
            }
        }
        out.lhs += dt * lhs;
        out.rhs_interior += dt * int;
        out.rhs_observation += dt * ob;
    }
    Ok(out)
}

/// One row of a Carleman sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub test_function: String,
    pub lambda: f64,
    pub s: f64,
    pub result: ProbeResult,
}

/// `sin(k π (y − α)/(β − α)) · ℓ(τ)^p` on the weight domain.
pub fn probe_test_function(
    weights: &CarlemanWeights,
    modes: u32,
    ell_power: i32,
    space_cells: usize,
    time_steps: usize,
) -> Result<SpaceTimeField> {
    let dom = weights.nest().domain;
    let space = Arc::new(SpaceGrid::uniform(dom.lo, dom.hi, space_cells)?);
    let time = TimeGrid::uniform(weights.horizon(), time_steps)?;
    let k = modes as f64;
    let n = space.len();
    SpaceTimeField::from_fn(space.clone(), time, |y, tau| {
        // exact zeros at the end points
        if y == space.first() || y == space.nodes()[n - 1] {
            return 0.0;
        }
        (k * PI * (y - dom.lo) / dom.len()).sin() * weights.ell(tau).powi(ell_power)
    })
}

/// Probe named test fields over every `s` in `s_values`, in parallel.
pub fn carleman_sweep(
    fields: &[(String, SpaceTimeField)],
    a: &Field1D,
    params: &MarketParams,
    weights: &CarlemanWeights,
    s_values: &[f64],
    scaling: LhsScaling,
) -> Result<Vec<SweepRow>> {
    let jobs: Vec<(usize, f64)> = (0..fields.len())
        .flat_map(|f| s_values.iter().map(move |&s| (f, s)))
        .collect();
    jobs.par_iter()
        .map(|&(f, s)| {
            let w = weights.with_s(s)?;
            let (name, z) = &fields[f];
            Ok(SweepRow {
                test_function: name.clone(),
                lambda: weights.lambda(),
                s,
                result: carleman_probe(z, a, params, &w, scaling)?,
            })
        })
        .collect()
}

/// Both sides of the energy estimate at `τ*`:
/// `‖w(τ*)‖² + ∫₀^{τ*} ‖w_y‖²` and `∫₀^{τ*} ‖F‖²`, where `w` solves the
/// sourced problem with zero initial and boundary data. `τ*` must be a node
/// of `F`'s time grid.
pub fn energy_probe(
    source: &SpaceTimeField,
    a: &Field1D,
    params: &MarketParams,
    schedule: ThetaSchedule,
) -> Result<(f64, f64)> {
    let time = source.time();
    let tau_star = params.tau_star();
    let stop = time.level_of(tau_star).ok_or_else(|| {
        Error::param("source", format!("time grid must contain tau* = {tau_star} as a node"))
    })?;
    let w = solve_log_forward_on(a, params, Some(source), time, schedule)?.field;
    let y = w.space().nodes();
    let sq = |v: &[f64]| trapezoid(y, &v.iter().map(|x| x * x).collect::<Vec<_>>());
    let tn = &time.nodes()[..=stop];
    let grad: Vec<f64> = (0..=stop)
        .map(|k| {
            let (d1, _) = derivatives(y, w.level(k).values());
            sq(&d1)
        })
        .collect();
    let src: Vec<f64> = (0..=stop).map(|k| sq(source.level(k).values())).collect();
    let lhs = sq(w.level(stop).values()) + trapezoid(tn, &grad);
    let rhs = trapezoid(tn, &src);
    Ok((lhs, rhs))
}
