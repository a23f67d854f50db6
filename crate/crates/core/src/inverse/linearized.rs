use crate::error::{Error, Result};
use crate::grid_pde::{
    apply_operator, Field1D, Interval, OperatorCoeffs, SpaceTimeField, ThetaSchedule, TimeGrid,
};
use crate::pricing::{solve_log_forward_on, MarketParams};

/// Which priced solution the curvature term `α = w_yy − w_y` is taken from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AlphaSource {
    /// `α` from `w_{a₂}`. The sourced problem then reproduces
    /// `w_{a₂} − w_{a₁}` exactly, up to round-off.
    #[default]
    Perturbed,
    /// `α` from `w_{a₁}`, the first-order linearization about `a₁`.
    Background,
}

/// `f = a₂ − a₁` and the curvature field `α`.
#[derive(Debug, Clone, PartialEq)]
pub struct SourcePair {
    pub f: Field1D,
    pub alpha: SpaceTimeField,
}

impl SourcePair {
    /// The space-time source `f(y) α(y, τ)`.
    pub fn source(&self) -> Result<SpaceTimeField> {
        let levels = self
            .alpha
            .levels()
            .iter()
            .map(|l| {
                Field1D::new(
                    l.grid().clone(),
                    l.values().iter().zip(self.f.values()).map(|(a, f)| a * f).collect(),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        SpaceTimeField::new(self.alpha.time().clone(), levels)
    }
}

/// Solution of `(∂_τ − L_{a₁}) w = f α`, `w(·, 0) = 0`, with the two priced
/// solutions it was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearizedSystem {
    pub pair: SourcePair,
    pub w: SpaceTimeField,
    pub w_a1: SpaceTimeField,
    pub w_a2: SpaceTimeField,
}

impl LinearizedSystem {
    /// `w_{a₂} − w_{a₁}`, the difference `w` is compared against.
    pub fn direct_difference(&self) -> Result<SpaceTimeField> {
        self.w_a2.sub(&self.w_a1)
    }
}

/// Discrete `w_yy − w_y` at interior nodes, zero at the two ends.
pub fn curvature_term(w: &Field1D) -> Result<Field1D> {
    let g = w.grid().clone();
    let op = OperatorCoeffs::new(Field1D::constant(g.clone(), 1.0), Field1D::constant(g.clone(), -1.0), Field1D::zeros(g))?;
    apply_operator(&op, w)
}

fn curvature_field(w: &SpaceTimeField) -> Result<SpaceTimeField> {
    let levels = w.levels().iter().map(curvature_term).collect::<Result<Vec<_>>>()?;
    SpaceTimeField::new(w.time().clone(), levels)
}

/// Build and solve the linearized system on `time`.
pub fn assemble_linearized(
    a1: &Field1D,
    a2: &Field1D,
    params: &MarketParams,
    time: &TimeGrid,
    schedule: ThetaSchedule,
    alpha_source: AlphaSource,
) -> Result<LinearizedSystem> {
    a1.check_same_grid(a2)?;
    let w_a1 = solve_log_forward_on(a1, params, None, time, schedule)?.field;
    let w_a2 = solve_log_forward_on(a2, params, None, time, schedule)?.field;
    let alpha = curvature_field(match alpha_source {
        AlphaSource::Perturbed => &w_a2,
        AlphaSource::Background => &w_a1,
    })?;
    let pair = SourcePair { f: a2.sub(a1)?, alpha };
    let w = solve_log_forward_on(a1, params, Some(&pair.source()?), time, schedule)?.field;
    Ok(LinearizedSystem { pair, w, w_a1, w_a2 })
}

/// Uniform time grid on `[0, 2τ*]` with `τ*` on a node.
pub fn linearization_time(params: &MarketParams, steps_to_tau_star: usize) -> Result<TimeGrid> {
    TimeGrid::uniform(2.0 * params.tau_star(), 2 * steps_to_tau_star)
}

/// `α₀ = min_{y ∈ Ω} |w_yy − w_y|` at `τ*` for the priced solution with
/// diffusion `a2`, over the grid nodes of `omega`.
pub fn check_alpha0(
    a2: &Field1D,
    params: &MarketParams,
    omega: &Interval,
    steps: usize,
    schedule: ThetaSchedule,
) -> Result<f64> {
    let range = a2.grid().window_indices(omega)?;
    if range.is_empty() {
        return Err(Error::TooFewNodes { needed: 1, found: 0 });
    }
    let time = TimeGrid::uniform(params.tau_star(), steps)?;
    let w = solve_log_forward_on(a2, params, None, &time, schedule)?.field;
    let alpha = curvature_term(w.last())?;
    Ok(alpha.values()[range].iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min))
}
