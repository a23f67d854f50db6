use std::sync::Arc;

use crate::error::{Error, Result};

/// Closed interval `[lo, hi]` with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::param("interval", format!("need lo < hi, got [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_empty(&self) -> bool {
        self.hi <= self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    /// `self` lies strictly inside `outer`, with a gap on both sides.
    pub fn is_compactly_inside(&self, outer: &Interval) -> bool {
        outer.lo < self.lo && self.hi < outer.hi
    }

    pub fn is_inside(&self, outer: &Interval) -> bool {
        outer.lo <= self.lo && self.hi <= outer.hi
    }

    pub fn overlaps(&self, other: &Interval) -> bool {
        self.lo < other.hi && other.lo < self.hi
    }

    /// Image under a strictly increasing map.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Interval {
        Interval {
            lo: f(self.lo),
            hi: f(self.hi),
        }
    }
}

/// Strictly increasing spatial nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceGrid {
    nodes: Vec<f64>,
    spacing: Vec<f64>,
}

impl SpaceGrid {
    pub fn new(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 3 {
            return Err(Error::InvalidGrid(format!(
                "a space grid needs at least 3 nodes, got {}",
                nodes.len()
            )));
        }
        if nodes.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidGrid("non-finite node".into()));
        }
        let spacing: Vec<f64> = nodes.windows(2).map(|w| w[1] - w[0]).collect();
        if let Some(i) = spacing.iter().position(|&h| h <= 0.0) {
            return Err(Error::InvalidGrid(format!(
                "nodes must be strictly increasing (violated between {} and {})",
                i,
                i + 1
            )));
        }
        Ok(Self { nodes, spacing })
    }

    /// `cells` equal cells on `[lo, hi]`, i.e. `cells + 1` nodes. The last
    /// node is exactly `hi`.
    pub fn uniform(lo: f64, hi: f64, cells: usize) -> Result<Self> {
        if cells < 2 || !(lo < hi) {
            return Err(Error::InvalidGrid(format!(
                "uniform grid on [{lo}, {hi}] with {cells} cells"
            )));
        }
        let h = (hi - lo) / cells as f64;
        let mut nodes: Vec<f64> = (0..=cells).map(|i| lo + h * i as f64).collect();
        nodes[cells] = hi;
        Self::new(nodes)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn first(&self) -> f64 {
        self.nodes[0]
    }

    pub fn last(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    pub fn span(&self) -> Interval {
        Interval {
            lo: self.first(),
            hi: self.last(),
        }
    }

    pub fn max_spacing(&self) -> f64 {
        self.spacing.iter().cloned().fold(0.0, f64::max)
    }

    /// Index range of nodes inside `window` (closed, with a relative slack
    /// of 1e-10 of the local spacing so nodes placed on the window edge count).
    pub fn window_indices(&self, window: &Interval) -> Result<std::ops::Range<usize>> {
        let span = self.span();
        let slack = 1e-10 * self.max_spacing();
        if window.lo < span.lo - slack || window.hi > span.hi + slack {
            return Err(Error::WindowOutsideGrid {
                lo: window.lo,
                hi: window.hi,
                grid_lo: span.lo,
                grid_hi: span.hi,
            });
        }
        let start = self.nodes.partition_point(|&x| x < window.lo - slack);
        let end = self.nodes.partition_point(|&x| x <= window.hi + slack);
        Ok(start..end)
    }

    /// Index of the node closest to `x`.
    pub fn nearest(&self, x: f64) -> usize {
        let i = self.nodes.partition_point(|&n| n < x);
        if i == 0 {
            0
        } else if i >= self.nodes.len() {
            self.nodes.len() - 1
        } else if (x - self.nodes[i - 1]) <= (self.nodes[i] - x) {
            i - 1
        } else {
            i
        }
    }

    /// Interpolate nodal `values` at `x` with a Lagrange polynomial through
    /// the `order + 1` nearest nodes (clamped at the grid ends).
    pub fn interpolate(&self, values: &[f64], x: f64, order: usize) -> f64 {
        let n = self.nodes.len();
        let width = (order + 1).min(n);
        let centre = self.nearest(x);
        let mut start = centre.saturating_sub(width / 2);
        if start + width > n {
            start = n - width;
        }
        // exact hit
        if (self.nodes[centre] - x).abs() <= 1e-13 * (1.0 + x.abs()) {
            return values[centre];
        }
        let xs = &self.nodes[start..start + width];
        let ys = &values[start..start + width];
        let mut total = 0.0;
        for (j, (&xj, &yj)) in xs.iter().zip(ys).enumerate() {
            let mut basis = 1.0;
            for (m, &xm) in xs.iter().enumerate() {
                if m != j {
                    basis *= (x - xm) / (xj - xm);
                }
            }
            total += basis * yj;
        }
        total
    }
}

/// Time levels starting at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    nodes: Vec<f64>,
}

impl TimeGrid {
    pub fn new(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::InvalidGrid("a time grid needs at least 2 levels".into()));
        }
        if nodes[0] != 0.0 {
            return Err(Error::InvalidGrid(format!(
                "time grid must start at 0, starts at {}",
                nodes[0]
            )));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) || nodes.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidGrid("time levels must be strictly increasing".into()));
        }
        Ok(Self { nodes })
    }

    pub fn uniform(horizon: f64, steps: usize) -> Result<Self> {
        if steps == 0 || !(horizon > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "uniform time grid to {horizon} with {steps} steps"
            )));
        }
        let dt = horizon / steps as f64;
        let mut nodes: Vec<f64> = (0..=steps).map(|i| dt * i as f64).collect();
        nodes[steps] = horizon;
        Self::new(nodes)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn horizon(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    /// Index of a level equal to `t` (to 1e-9 relative), if any.
    pub fn level_of(&self, t: f64) -> Option<usize> {
        let tol = 1e-9 * self.horizon().max(1.0);
        self.nodes.iter().position(|&n| (n - t).abs() <= tol)
    }
}

/// Nodal values of a function on a [`SpaceGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct Field1D {
    grid: Arc<SpaceGrid>,
    values: Vec<f64>,
}

impl Field1D {
    pub fn new(grid: Arc<SpaceGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "{} values for {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid(format!("non-finite value at node {i}")));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Arc<SpaceGrid>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.nodes().iter().map(|&x| f(x)).collect();
        Self::new(grid, values)
    }

    pub fn zeros(grid: Arc<SpaceGrid>) -> Self {
        let n = grid.len();
        Self {
            grid,
            values: vec![0.0; n],
        }
    }

    pub fn constant(grid: Arc<SpaceGrid>, c: f64) -> Self {
        let n = grid.len();
        Self {
            grid,
            values: vec![c; n],
        }
    }

    pub fn grid(&self) -> &Arc<SpaceGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn same_grid(&self, other: &Field1D) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || self.grid == other.grid
    }

    pub fn check_same_grid(&self, other: &Field1D) -> Result<()> {
        if self.same_grid(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field1D {
        Field1D {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Pointwise combination `alpha * self + beta * other`.
    pub fn axpby(&self, alpha: f64, other: &Field1D, beta: f64) -> Result<Field1D> {
        self.check_same_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| alpha * a + beta * b)
            .collect();
        Ok(Field1D {
            grid: self.grid.clone(),
            values,
        })
    }

    pub fn sub(&self, other: &Field1D) -> Result<Field1D> {
        self.axpby(1.0, other, -1.0)
    }

    pub fn at(&self, x: f64) -> f64 {
        self.grid.interpolate(&self.values, x, 3)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// A sequence of fields on one space grid, one per time level.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeField {
    time: TimeGrid,
    levels: Vec<Field1D>,
}

impl SpaceTimeField {
    pub fn new(time: TimeGrid, levels: Vec<Field1D>) -> Result<Self> {
        if levels.len() != time.len() {
            return Err(Error::InvalidGrid(format!(
                "{} levels for {} time nodes",
                levels.len(),
                time.len()
            )));
        }
        if levels.windows(2).any(|w| !w[0].same_grid(&w[1])) {
            return Err(Error::GridMismatch);
        }
        Ok(Self { time, levels })
    }

    /// Sample `f(x, t)` on the product grid.
    pub fn from_fn(
        space: Arc<SpaceGrid>,
        time: TimeGrid,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<Self> {
        let levels = time
            .nodes()
            .iter()
            .map(|&t| Field1D::from_fn(space.clone(), |x| f(x, t)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(time, levels)
    }

    pub fn zeros(space: Arc<SpaceGrid>, time: TimeGrid) -> Self {
        let levels = (0..time.len()).map(|_| Field1D::zeros(space.clone())).collect();
        Self { time, levels }
    }

    pub fn time(&self) -> &TimeGrid {
        &self.time
    }

    pub fn space(&self) -> &Arc<SpaceGrid> {
        self.levels[0].grid()
    }

    pub fn levels(&self) -> &[Field1D] {
        &self.levels
    }

    pub fn level(&self, i: usize) -> &Field1D {
        &self.levels[i]
    }

    pub fn last(&self) -> &Field1D {
        &self.levels[self.levels.len() - 1]
    }

    pub fn into_levels(self) -> Vec<Field1D> {
        self.levels
    }

    pub fn axpby(&self, alpha: f64, other: &SpaceTimeField, beta: f64) -> Result<SpaceTimeField> {
        if self.time != other.time {
            return Err(Error::GridMismatch);
        }
        let levels = self
            .levels
            .iter()
            .zip(&other.levels)
            .map(|(a, b)| a.axpby(alpha, b, beta))
            .collect::<Result<Vec<_>>>()?;
        Ok(SpaceTimeField {
            time: self.time.clone(),
            levels,
        })
    }

    pub fn sub(&self, other: &SpaceTimeField) -> Result<SpaceTimeField> {
        self.axpby(1.0, other, -1.0)
    }

    pub fn scale(&self, c: f64) -> SpaceTimeField {
        SpaceTimeField {
            time: self.time.clone(),
            levels: self.levels.iter().map(|l| l.map(|v| c * v)).collect(),
        }
    }

    /// Field at time `t`, linearly interpolated between levels.
    pub fn at_time(&self, t: f64) -> Result<Field1D> {
        if let Some(i) = self.time.level_of(t) {
            return Ok(self.levels[i].clone());
        }
        let nodes = self.time.nodes();
        if t < 0.0 || t > self.time.horizon() {
            return Err(Error::param(
                "time",
                format!("{t} outside [0, {}]", self.time.horizon()),
            ));
        }
        let j = nodes.partition_point(|&n| n < t);
        let (t0, t1) = (nodes[j - 1], nodes[j]);
        let w = (t - t0) / (t1 - t0);
        self.levels[j - 1].axpby(1.0 - w, &self.levels[j], w)
    }
}
