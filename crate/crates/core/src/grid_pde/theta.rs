//! θ-scheme time stepping with Dirichlet boundaries.

use super::grid::{Field1D, SpaceTimeField, TimeGrid};
use super::operator::{OperatorCoeffs, TridiagOperator};
use crate::error::{Error, Result};

/// Thomas algorithm for `lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i]`.
/// `lower[0]` and `upper[n-1]` are ignored. Zero pivots are reported.
pub fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut pivot = diag[0];
    if pivot.abs() < f64::MIN_POSITIVE || !pivot.is_finite() {
        return Err(Error::SingularSystem { row: 0 });
    }
    c[0] = upper[0] / pivot;
    d[0] = rhs[0] / pivot;
    for i in 1..n {
        pivot = diag[i] - lower[i] * c[i - 1];
        if pivot.abs() < f64::MIN_POSITIVE || !pivot.is_finite() {
            return Err(Error::SingularSystem { row: i });
        }
        if i < n - 1 {
            c[i] = upper[i] / pivot;
        }
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / pivot;
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Ok(d)
}

/// One θ step of `∂ₜu = L u + F`:
/// `(I − θ dt L) uⁿ⁺¹ = (I + (1−θ) dt L) uⁿ + dt (θ Fⁿ⁺¹ + (1−θ) Fⁿ)`,
/// with `uⁿ⁺¹` pinned to `left_bc`/`right_bc` at the two ends.
fn theta_step_raw(
    op: &TridiagOperator,
    state: &[f64],
    dt: f64,
    theta: f64,
    bcs: (f64, f64),
    source: Option<(&[f64], &[f64])>,
) -> Result<Vec<f64>> {
    let n = state.len();
    let mut lower = vec![0.0; n];
    let mut diag = vec![1.0; n];
    let mut upper = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    let explicit = (1.0 - theta) * dt;
    for i in 1..n - 1 {
        let lu = op.lower[i] * state[i - 1] + op.diag[i] * state[i] + op.upper[i] * state[i + 1];
        rhs[i] = state[i] + explicit * lu;
        if let Some((old, new)) = source {
            rhs[i] += dt * (theta * new[i] + (1.0 - theta) * old[i]);
        }
        lower[i] = -theta * dt * op.lower[i];
        diag[i] = 1.0 - theta * dt * op.diag[i];
        upper[i] = -theta * dt * op.upper[i];
    }
    rhs[0] = bcs.0;
    rhs[n - 1] = bcs.1;
    solve_tridiagonal(&lower, &diag, &upper, &rhs)
}

/// Advance `state` by one θ step with Dirichlet values imposed.
/// θ = 1 is fully implicit, θ = ½ is the trapezoidal rule.
pub fn step_theta(
    coeffs: &OperatorCoeffs,
    state: &Field1D,
    dt: f64,
    theta: f64,
    left_bc: f64,
    right_bc: f64,
) -> Result<Field1D> {
    if !(dt > 0.0) {
        return Err(Error::param("dt", format!("must be positive, got {dt}")));
    }
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::param("theta", format!("must lie in [0, 1], got {theta}")));
    }
    coeffs.second_order().check_same_grid(state)?;
    let op = coeffs.assemble();
    let next = theta_step_raw(&op, state.values(), dt, theta, (left_bc, right_bc), None)?;
    Field1D::new(state.grid().clone(), next)
}

/// Step schedule: `startup_steps` fully implicit steps, then `theta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaSchedule {
    pub theta: f64,
    pub startup_steps: usize,
}

impl Default for ThetaSchedule {
    fn default() -> Self {
        Self {
            theta: 0.5,
            startup_steps: 4,
        }
    }
}

impl ThetaSchedule {
    pub fn theta_at(&self, step: usize) -> f64 {
        if step < self.startup_steps {
            1.0
        } else {
            self.theta
        }
    }
}

/// March `initial` across `time`. `bcs(t)` gives the Dirichlet pair at each
/// new level; `source`, when given, must share the space and time grids.
pub fn march(
    coeffs: &OperatorCoeffs,
    initial: &Field1D,
    time: &TimeGrid,
    schedule: ThetaSchedule,
    bcs: impl Fn(f64) -> (f64, f64),
    source: Option<&SpaceTimeField>,
) -> Result<SpaceTimeField> {
    coeffs.second_order().check_same_grid(initial)?;
    if let Some(src) = source {
        if src.time() != time {
            return Err(Error::GridMismatch);
        }
        src.level(0).check_same_grid(initial)?;
    }
    let op = coeffs.assemble();
    let t = time.nodes();
    let mut levels = Vec::with_capacity(t.len());
    levels.push(initial.clone());
    let mut state = initial.values().to_vec();
    for step in 0..t.len() - 1 {
        let dt = t[step + 1] - t[step];
        let src = source.map(|s| (s.level(step).values(), s.level(step + 1).values()));
        state = theta_step_raw(&op, &state, dt, schedule.theta_at(step), bcs(t[step + 1]), src)?;
        levels.push(Field1D::new(initial.grid().clone(), state.clone())?);
    }
    SpaceTimeField::new(time.clone(), levels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid_pde::SpaceGrid;
    use std::sync::Arc;

    #[test]
    fn thomas_solves_small_system() {
        // [2 1 0; 1 3 1; 0 1 2] x = [3 5 3] -> x = [1 1 1]
        let x = solve_tridiagonal(&[0.0, 1.0, 1.0], &[2.0, 3.0, 2.0], &[1.0, 1.0, 0.0], &[3.0, 5.0, 3.0])
            .unwrap();
        for v in x {
            assert!((v - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_pivot_is_reported() {
        let err = solve_tridiagonal(&[0.0, 1.0], &[1.0, 1.0], &[1.0, 0.0], &[1.0, 1.0]).unwrap_err();
        assert_eq!(err, Error::SingularSystem { row: 1 });
    }

    #[test]
    fn zero_operator_keeps_interior_and_overwrites_boundary() {
        let g = Arc::new(SpaceGrid::uniform(0.0, 1.0, 10).unwrap());
        let state = Field1D::from_fn(g.clone(), |x| x * x + 1.0).unwrap();
        let out = step_theta(&OperatorCoeffs::zero(g), &state, 0.1, 0.5, -2.0, 7.0).unwrap();
        let (a, b) = (state.values(), out.values());
        assert_eq!(b[0], -2.0);
        assert_eq!(b[10], 7.0);
        for i in 1..10 {
            assert!((a[i] - b[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn left_dirichlet_is_exact() {
        let g = Arc::new(SpaceGrid::uniform(0.0, 2.0, 40).unwrap());
        let coeffs = OperatorCoeffs::new(
            Field1D::constant(g.clone(), 0.3),
            Field1D::constant(g.clone(), 0.1),
            Field1D::constant(g.clone(), -0.05),
        )
        .unwrap();
        let state = Field1D::from_fn(g, |x| x.cos()).unwrap();
        let out = step_theta(&coeffs, &state, 0.01, 1.0, 5.0, 0.0).unwrap();
        assert_eq!(out.values()[0], 5.0);
    }

    #[test]
    fn invalid_theta_and_dt_rejected() {
        let g = Arc::new(SpaceGrid::uniform(0.0, 1.0, 4).unwrap());
        let s = Field1D::zeros(g.clone());
        let c = OperatorCoeffs::zero(g);
        assert!(step_theta(&c, &s, 0.0, 0.5, 0.0, 0.0).is_err());
        assert!(step_theta(&c, &s, 0.1, 1.5, 0.0, 0.0).is_err());
    }
}
