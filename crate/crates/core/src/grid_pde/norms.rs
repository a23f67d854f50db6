use super::grid::{Field1D, Interval, SpaceTimeField};
use super::stencil::{derivatives, first_derivative, trapezoid, trapezoid_weights};
use crate::error::{Error, Result};

/// Discrete `H^order(window)` norm, `order ∈ {0, 1, 2}`.
///
/// Only nodes inside `window` are used: derivatives come from central
/// differences with one-sided second-order stencils at the window edges,
/// integrals from the trapezoid rule over the nodes covered.
pub fn sobolev_norm(field: &Field1D, order: usize, window: &Interval) -> Result<f64> {
    if order > 2 {
        return Err(Error::param("order", format!("must be 0, 1 or 2, got {order}")));
    }
    let range = field.grid().window_indices(window)?;
    let needed = [2, 3, 5][order];
    if range.len() < needed {
        return Err(Error::TooFewNodes {
            needed,
            found: range.len(),
        });
    }
    let xs = &field.grid().nodes()[range.clone()];
    let ys = &field.values()[range];
    let sq = |v: &[f64]| -> f64 {
        let v2: Vec<f64> = v.iter().map(|x| x * x).collect();
        trapezoid(xs, &v2)
    };
    let mut total = sq(ys);
    match order {
        1 => total += sq(&first_derivative(xs, ys)),
        2 => {
            let (d1, d2) = derivatives(xs, ys);
            total += sq(&d1) + sq(&d2);
        }
        _ => {}
    }
    Ok(total.sqrt())
}

/// `‖z‖ + ‖z_τ‖ + ‖z_y‖ + ‖z_yy‖` in `L²(Q)`, `Q` the full space-time grid.
pub fn h12_norm(field: &SpaceTimeField) -> Result<f64> {
    let terms = h12_terms(field)?;
    Ok(terms.iter().sum())
}

/// The four `L²(Q)` terms `[z, z_τ, z_y, z_yy]` of [`h12_norm`].
pub fn h12_terms(field: &SpaceTimeField) -> Result<[f64; 4]> {
    let t = field.time().nodes();
    if t.len() < 3 {
        return Err(Error::TooFewNodes {
            needed: 3,
            found: t.len(),
        });
    }
    let space = field.space();
    if field.levels().iter().any(|l| l.grid() != space) {
        return Err(Error::GridMismatch);
    }
    let xs = space.nodes();
    if xs.len() < 4 {
        return Err(Error::TooFewNodes {
            needed: 4,
            found: xs.len(),
        });
    }
    let wx = trapezoid_weights(xs);
    let wt = trapezoid_weights(t);
    let nx = xs.len();

    let mut acc = [0.0f64; 4];
    for (k, level) in field.levels().iter().enumerate() {
        let (d1, d2) = derivatives(xs, level.values());
        for i in 0..nx {
            let w = wx[i] * wt[k];
            acc[0] += w * level.values()[i].powi(2);
            acc[2] += w * d1[i] * d1[i];
            acc[3] += w * d2[i] * d2[i];
        }
    }
    // time derivative node by node
    let mut column = vec![0.0; t.len()];
    for i in 0..nx {
        for (k, level) in field.levels().iter().enumerate() {
            column[k] = level.values()[i];
        }
        let dt = first_derivative(t, &column);
        acc[1] += wx[i] * dt.iter().zip(&wt).map(|(d, w)| w * d * d).sum::<f64>();
    }
    Ok(acc.map(f64::sqrt))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid_pde::{SpaceGrid, TimeGrid};
    use std::f64::consts::PI;
    use std::sync::Arc;

    #[test]
    fn constant_field_norms() {
        let g = Arc::new(SpaceGrid::uniform(0.0, 4.0, 40).unwrap());
        let f = Field1D::constant(g, 1.5);
        let w = Interval::new(1.0, 3.0).unwrap();
        for order in 0..=2 {
            let n = sobolev_norm(&f, order, &w).unwrap();
            assert!((n - 1.5 * 2f64.sqrt()).abs() < 1e-12, "order {order}: {n}");
        }
    }

    #[test]
    fn too_few_nodes_for_order_two() {
        let g = Arc::new(SpaceGrid::uniform(0.0, 1.0, 10).unwrap());
        let f = Field1D::zeros(g);
        let w = Interval::new(0.0, 0.3).unwrap();
        assert_eq!(
            sobolev_norm(&f, 2, &w),
            Err(Error::TooFewNodes { needed: 5, found: 4 })
        );
        assert!(sobolev_norm(&f, 1, &w).is_ok());
    }

    #[test]
    fn window_outside_grid() {
        let g = Arc::new(SpaceGrid::uniform(0.0, 1.0, 10).unwrap());
        let f = Field1D::zeros(g);
        let w = Interval::new(0.5, 1.5).unwrap();
        assert!(matches!(sobolev_norm(&f, 0, &w), Err(Error::WindowOutsideGrid { .. })));
    }

    #[test]
    fn sine_h1_norm_on_half_period() {
        let g = Arc::new(SpaceGrid::uniform(0.0, PI, 2000).unwrap());
        let f = Field1D::from_fn(g.clone(), f64::sin).unwrap();
        let n = sobolev_norm(&f, 1, &g.span()).unwrap();
        assert!((n - PI.sqrt()).abs() < 1e-5, "{n}");
    }

    #[test]
    fn h12_of_zero_and_constant() {
        let g = Arc::new(SpaceGrid::uniform(0.0, 2.0, 20).unwrap());
        let t = TimeGrid::uniform(1.5, 10).unwrap();
        let z = SpaceTimeField::zeros(g.clone(), t.clone());
        assert_eq!(h12_norm(&z).unwrap(), 0.0);
        let c = SpaceTimeField::from_fn(g, t, |_, _| 2.0).unwrap();
        assert!((h12_norm(&c).unwrap() - 2.0 * 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn h12_needs_three_levels() {
        let g = Arc::new(SpaceGrid::uniform(0.0, 1.0, 8).unwrap());
        let z = SpaceTimeField::zeros(g, TimeGrid::uniform(1.0, 1).unwrap());
        assert!(matches!(h12_norm(&z), Err(Error::TooFewNodes { .. })));
    }
}
