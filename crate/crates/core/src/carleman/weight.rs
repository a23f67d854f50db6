//! The explicit weight `ψ₀ = sin(π f_a(h⁻¹(x)))` on an interval.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid_pde::{Field1D, Interval, SpaceGrid};

/// Increasing bijection of `(0, 1)` with `f_a(a) = 1/2`.
///
/// For `a >= 1/2`: `f_a(x) = μ xⁿ + (1 − μ) x` with the smallest `n >= 1`
/// such that `aⁿ < 1/2` and `μ = (a − 1/2) / (a − aⁿ)`. For `a < 1/2` the
/// map is reflected: `f_a(x) = 1 − f_{1−a}(1 − x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fa {
    a: f64,
    n: i32,
    mu: f64,
    mirrored: bool,
}

pub fn build_fa(a: f64) -> Result<Fa> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::param("a_param", format!("must lie in (0, 1), got {a}")));
    }
    let mirrored = a < 0.5;
    let b = if mirrored { 1.0 - a } else { a };
    let mut n = 1;
    while b.powi(n) >= 0.5 {
        n += 1;
    }
    let mu = (b - 0.5) / (b - b.powi(n));
    Ok(Fa { a, n, mu, mirrored })
}

impl Fa {
    pub fn a(&self) -> f64 {
        self.a
    }

    /// Exponent `n` of the polynomial branch.
    pub fn power(&self) -> i32 {
        self.n
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    fn base(&self, x: f64) -> f64 {
        self.mu * x.powi(self.n) + (1.0 - self.mu) * x
    }

    fn base_deriv(&self, x: f64) -> f64 {
        self.mu * self.n as f64 * x.powi(self.n - 1) + (1.0 - self.mu)
    }

    pub fn eval(&self, x: f64) -> f64 {
        if self.mirrored {
            1.0 - self.base(1.0 - x)
        } else {
            self.base(x)
        }
    }

    /// `1 − f_a(x)`, evaluated without cancellation on the side where it
    /// is small.
    fn complement(&self, x: f64) -> f64 {
        if self.mirrored {
            self.base(1.0 - x)
        } else {
            1.0 - self.base(x)
        }
    }

    pub fn deriv(&self, x: f64) -> f64 {
        if self.mirrored {
            self.base_deriv(1.0 - x)
        } else {
            self.base_deriv(x)
        }
    }
}

/// `ψ₀` on `domain = (α, β)` with `h(u) = uα + (1 − u)β`, so the single
/// interior critical point sits at `h(a)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Psi0 {
    domain: Interval,
    fa: Fa,
}

impl Psi0 {
    pub fn new(domain: Interval, a_param: f64) -> Result<Self> {
        Ok(Self {
            domain,
            fa: build_fa(a_param)?,
        })
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn fa(&self) -> &Fa {
        &self.fa
    }

    /// `h(u)`: decreasing, `h(0) = β`, `h(1) = α`.
    pub fn h(&self, u: f64) -> f64 {
        u * self.domain.lo + (1.0 - u) * self.domain.hi
    }

    pub fn h_inv(&self, x: f64) -> f64 {
        (self.domain.hi - x) / self.domain.len()
    }

    pub fn critical_point(&self) -> f64 {
        self.h(self.fa.a)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let u = self.h_inv(x);
        if u <= 0.0 || u >= 1.0 {
            return 0.0;
        }
        let f = self.fa.eval(u);
        if f <= 0.5 {
            (PI * f).sin()
        } else {
            (PI * self.fa.complement(u)).sin()
        }
    }

    pub fn deriv(&self, x: f64) -> f64 {
        let u = self.h_inv(x).clamp(0.0, 1.0);
        -PI * (PI * self.fa.eval(u)).cos() * self.fa.deriv(u) / self.domain.len()
    }

    pub fn sample(&self, cells: usize) -> Result<Field1D> {
        let grid = Arc::new(SpaceGrid::uniform(self.domain.lo, self.domain.hi, cells)?);
        Field1D::from_fn(grid, |x| self.eval(x))
    }
}

/// `ψ₀` sampled on `cells + 1` uniform nodes of `domain`.
pub fn build_psi0(domain: Interval, a_param: f64, cells: usize) -> Result<Field1D> {
    Psi0::new(domain, a_param)?.sample(cells)
}

/// `δ = ½ min_{closure(support)} ψ₀` and the component of `{ψ₀ > δ}` that
/// contains `support`, for the piecewise-linear interpolant of `psi0`.
///
/// Both `ψ₀ >= 2δ` on the support and `ψ₀ <= δ` at every node outside the
/// returned interval are re-checked before returning.
pub fn select_delta_omega2(psi0: &Field1D, support: &Interval) -> Result<(f64, Interval)> {
    let grid = psi0.grid();
    let x = grid.nodes();
    let v = psi0.values();
    let span = grid.span();
    if !support.is_compactly_inside(&span) {
        return Err(Error::Nesting(format!(
            "support [{}, {}] must sit strictly inside [{}, {}]",
            support.lo, support.hi, span.lo, span.hi
        )));
    }
    let lerp = |t: f64| grid.interpolate(v, t, 1);
    let inside = grid.window_indices(support)?;
    let min_inside = inside
        .clone()
        .map(|i| v[i])
        .chain([lerp(support.lo), lerp(support.hi)])
        .fold(f64::INFINITY, f64::min);
    if !(min_inside > 0.0) {
        return Err(Error::param(
            "psi0",
            format!("must be positive on the support, minimum {min_inside}"),
        ));
    }
    let delta = 0.5 * min_inside;

    // walk outwards from the support while ψ₀ > δ
    let mut left = grid.nearest(support.lo).min(inside.start);
    while left > 0 && v[left - 1] > delta {
        left -= 1;
    }
    let mut right = grid.nearest(support.hi).max(inside.end - 1);
    while right + 1 < x.len() && v[right + 1] > delta {
        right += 1;
    }
    let crossing = |i_out: usize, i_in: usize| {
        let (a, b) = (v[i_out], v[i_in]);
        let t = (delta - a) / (b - a);
        x[i_out] + t * (x[i_in] - x[i_out])
    };
    let lo = if left == 0 { x[0] } else { crossing(left - 1, left) };
    let hi = if right + 1 == x.len() { x[x.len() - 1] } else { crossing(right + 1, right) };
    let buffer = Interval::new(lo, hi)?;

    if !(support.is_compactly_inside(&buffer) && buffer.is_compactly_inside(&span)) {
        return Err(Error::Nesting(format!(
            "could not fit [{lo}, {hi}] strictly between the support and the domain"
        )));
    }
    if let Some(i) = (0..x.len()).find(|&i| !buffer.contains(x[i]) && v[i] > delta) {
        return Err(Error::Nesting(format!(
            "psi0({}) = {} exceeds delta = {delta} outside the buffer",
            x[i], v[i]
        )));
    }
    Ok((delta, buffer))
}
