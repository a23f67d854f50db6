use std::sync::Arc;

use super::grid::{Field1D, SpaceGrid};
use super::stencil::central_weights;
use crate::error::{Error, Result};

/// Coefficients of `c2(x) ∂²ₓ + c1(x) ∂ₓ + c0(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorCoeffs {
    second_order: Field1D,
    first_order: Field1D,
    zero_order: Field1D,
}

impl OperatorCoeffs {
    /// Rejects coefficients on different grids. Parabolicity is checked
    /// separately by [`OperatorCoeffs::check_parabolic`] because the zero
    /// operator is a legitimate input to the stepper.
    pub fn new(second_order: Field1D, first_order: Field1D, zero_order: Field1D) -> Result<Self> {
        second_order.check_same_grid(&first_order)?;
        second_order.check_same_grid(&zero_order)?;
        Ok(Self {
            second_order,
            first_order,
            zero_order,
        })
    }

    pub fn zero(grid: Arc<SpaceGrid>) -> Self {
        Self {
            second_order: Field1D::zeros(grid.clone()),
            first_order: Field1D::zeros(grid.clone()),
            zero_order: Field1D::zeros(grid),
        }
    }

    pub fn grid(&self) -> &Arc<SpaceGrid> {
        self.second_order.grid()
    }

    pub fn second_order(&self) -> &Field1D {
        &self.second_order
    }

    pub fn first_order(&self) -> &Field1D {
        &self.first_order
    }

    pub fn zero_order(&self) -> &Field1D {
        &self.zero_order
    }

    /// Second-order coefficient strictly positive at interior nodes.
    pub fn check_parabolic(&self) -> Result<()> {
        let c2 = self.second_order.values();
        for (i, &v) in c2.iter().enumerate().take(c2.len() - 1).skip(1) {
            if !(v > 0.0) {
                return Err(Error::NonParabolic { index: i, value: v });
            }
        }
        Ok(())
    }

    /// Tridiagonal rows `(lower, diag, upper)` of the discrete operator at
    /// interior nodes; boundary rows are zero.
    pub fn assemble(&self) -> TridiagOperator {
        let x = self.grid().nodes();
        let n = x.len();
        let (c2, c1, c0) = (
            self.second_order.values(),
            self.first_order.values(),
            self.zero_order.values(),
        );
        let mut lower = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut upper = vec![0.0; n];
        for i in 1..n - 1 {
            let (w1, w2) = central_weights(x[i] - x[i - 1], x[i + 1] - x[i]);
            lower[i] = c2[i] * w2[0] + c1[i] * w1[0];
            diag[i] = c2[i] * w2[1] + c1[i] * w1[1] + c0[i];
            upper[i] = c2[i] * w2[2] + c1[i] * w1[2];
        }
        TridiagOperator { lower, diag, upper }
    }
}

/// Banded form of a three-point operator.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagOperator {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

impl TridiagOperator {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// `out = L u` at interior nodes, zero at the two boundary nodes.
    pub fn apply_into(&self, u: &[f64], out: &mut [f64]) {
        let n = u.len();
        out[0] = 0.0;
        out[n - 1] = 0.0;
        for i in 1..n - 1 {
            out[i] = self.lower[i] * u[i - 1] + self.diag[i] * u[i] + self.upper[i] * u[i + 1];
        }
    }
}

/// Central-difference evaluation of the operator on `field`; boundary
/// entries are 0.
pub fn apply_operator(coeffs: &OperatorCoeffs, field: &Field1D) -> Result<Field1D> {
    coeffs.second_order.check_same_grid(field)?;
    let op = coeffs.assemble();
    let mut out = vec![0.0; field.values().len()];
    op.apply_into(field.values(), &mut out);
    Field1D::new(field.grid().clone(), out)
}
