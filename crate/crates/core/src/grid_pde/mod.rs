//! One-dimensional parabolic finite-difference engine: grids, three-point
//! operators, θ-scheme stepping and Sobolev-norm quadrature.

mod grid;
mod norms;
mod operator;
pub mod stencil;
mod theta;

pub use grid::{Field1D, Interval, SpaceGrid, SpaceTimeField, TimeGrid};
pub use norms::{h12_norm, h12_terms, sobolev_norm};
pub use operator::{apply_operator, OperatorCoeffs, TridiagOperator};
pub use theta::{march, solve_tridiagonal, step_theta, ThetaSchedule};
