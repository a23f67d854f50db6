use super::domains::DomainNest;
use super::weight::{select_delta_omega2, Psi0};
use crate::error::{Error, Result};
use crate::grid_pde::Field1D;

/// The space-time weights `φ = e^{λψ}/ℓ`, `η = (e^{λψ} − e^{2λψ̄})/ℓ` with
/// `ψ = ψ₀ + ψ̄`, `ψ̄ = 2 max ψ₀` and `ℓ(τ) = τ(T − τ)`, `T = 2τ*`.
#[derive(Debug, Clone, PartialEq)]
pub struct CarlemanWeights {
    psi0: Psi0,
    samples: Field1D,
    psi_bar: f64,
    lambda: f64,
    s: f64,
    horizon: f64,
    delta: f64,
    nest: DomainNest,
}

/// Weight values at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightValues {
    pub phi: f64,
    pub eta: f64,
    pub ell: f64,
}

/// Bounds on `η(·, τ*)` separating the support from `Ω₁ ∖ Ω₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Separation {
    /// `(e^{λ(2δ+ψ̄)} − e^{2λψ̄}) / ℓ(τ*)`, a lower bound of `η` on the support.
    pub m1: f64,
    /// `(e^{λ(δ+ψ̄)} − e^{2λψ̄}) / ℓ(τ*)`, an upper bound of `η` off the buffer.
    pub m2: f64,
    /// The same constants with `ψ₀` in place of `ψ` in the exponents.
    pub m1_unshifted: f64,
    pub m2_unshifted: f64,
    /// `min η(·, τ*)` over support nodes.
    pub eta_min_support: f64,
    /// `max η(·, τ*)` over nodes of `Ω₁ ∖ Ω₂`.
    pub eta_max_outside: f64,
}

impl Separation {
    pub fn m(&self) -> f64 {
        self.m2 - self.m1
    }

    /// `η ≥ m1` on the support, `η ≤ m2` off the buffer and `m < 0`.
    pub fn holds(&self) -> bool {
        self.eta_min_support >= self.m1 && self.eta_max_outside <= self.m2 && self.m() < 0.0
    }

    pub fn holds_unshifted(&self) -> bool {
        self.eta_min_support >= self.m1_unshifted
            && self.eta_max_outside <= self.m2_unshifted
            && self.m2_unshifted - self.m1_unshifted < 0.0
    }
}

impl CarlemanWeights {
    /// Builds `ψ₀` on `nest.domain` sampled with `cells` cells, selects `δ`
    /// and `Ω₂`, and checks that the critical point `h(a)` lies in `ω`.
    pub fn new(nest: DomainNest, a_param: f64, lambda: f64, s: f64, tau_star: f64, cells: usize) -> Result<Self> {
        nest.validate()?;
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::param("lambda", format!("must be positive, got {lambda}")));
        }
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::param("s", format!("must be positive, got {s}")));
        }
        if !(tau_star > 0.0 && tau_star.is_finite()) {
            return Err(Error::param("tau_star", format!("must be positive, got {tau_star}")));
        }
        let psi0 = Psi0::new(nest.domain, a_param)?;
        let x0 = psi0.critical_point();
        if !(x0 > nest.omega.lo && x0 < nest.omega.hi) {
            return Err(Error::Nesting(format!(
                "critical point h(a) = {x0} must lie in omega [{}, {}]",
                nest.omega.lo, nest.omega.hi
            )));
        }
        let samples = psi0.sample(cells)?;
        let (delta, buffer) = select_delta_omega2(&samples, &nest.support)?;
        let nest = nest.with_buffer(buffer)?;
        let psi_bar = 2.0 * psi0.eval(x0).max(samples.max_abs());
        Ok(Self {
            psi0,
            samples,
            psi_bar,
            lambda,
            s,
            horizon: 2.0 * tau_star,
            delta,
            nest,
        })
    }

    pub fn with_s(&self, s: f64) -> Result<Self> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::param("s", format!("must be positive, got {s}")));
        }
        Ok(Self { s, ..self.clone() })
    }

    pub fn psi0(&self) -> &Psi0 {
        &self.psi0
    }

    pub fn psi0_samples(&self) -> &Field1D {
        &self.samples
    }

    pub fn psi_bar(&self) -> f64 {
        self.psi_bar
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    /// `T = 2τ*`.
    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn tau_star(&self) -> f64 {
        0.5 * self.horizon
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn a_param(&self) -> f64 {
        self.psi0.fa().a()
    }

    pub fn n_power(&self) -> i32 {
        self.psi0.fa().power()
    }

    pub fn nest(&self) -> &DomainNest {
        &self.nest
    }

    pub fn ell(&self, tau: f64) -> f64 {
        tau * (self.horizon - tau)
    }

    pub fn psi(&self, y: f64) -> f64 {
        self.psi0.eval(y) + self.psi_bar
    }

    /// `e^{λψ(y)} − e^{2λψ̄}`, the numerator of `η`.
    pub fn eta_numerator(&self, y: f64) -> f64 {
        (self.lambda * self.psi(y)).exp() - (2.0 * self.lambda * self.psi_bar).exp()
    }

    /// Largest value of `η` on `Ω₁ × (0, T)`, attained at `(h(a), T/2)`.
    pub fn eta_max(&self) -> f64 {
        self.eta_numerator(self.psi0.critical_point()) / self.ell(self.tau_star())
    }

    /// `(φ, η, ℓ)` at `(y, τ)`; requires `0 < τ < T`.
    pub fn eval_weights(&self, y: f64, tau: f64) -> Result<WeightValues> {
        if !(tau > 0.0 && tau < self.horizon) {
            return Err(Error::WeightTime {
                tau,
                horizon: self.horizon,
            });
        }
        let ell = self.ell(tau);
        Ok(WeightValues {
            phi: (self.lambda * self.psi(y)).exp() / ell,
            eta: self.eta_numerator(y) / ell,
            ell,
        })
    }

    /// Separation constants at `τ*`, evaluated on the `ψ₀` sample nodes.
    pub fn separation(&self) -> Separation {
        let l = self.ell(self.tau_star());
        let (lam, d, pb) = (self.lambda, self.delta, self.psi_bar);
        let top = (2.0 * lam * pb).exp();
        let buffer = self.nest.buffer.expect("buffer set in constructor");
        let mut eta_min_support = f64::INFINITY;
        let mut eta_max_outside = f64::NEG_INFINITY;
        for &y in self.samples.grid().nodes() {
            let eta = self.eta_numerator(y) / l;
            if self.nest.support.contains(y) {
                eta_min_support = eta_min_support.min(eta);
            }
            if !buffer.contains(y) {
                eta_max_outside = eta_max_outside.max(eta);
            }
        }
        // the support end points are generally off the lattice; use the
        // same interpolant that fixed δ
        let grid = self.samples.grid();
        for y in [self.nest.support.lo, self.nest.support.hi] {
            let psi = grid.interpolate(self.samples.values(), y, 1) + pb;
            eta_min_support = eta_min_support.min(((lam * psi).exp() - top) / l);
        }
        Separation {
            m1: ((lam * (2.0 * d + pb)).exp() - top) / l,
            m2: ((lam * (d + pb)).exp() - top) / l,
            m1_unshifted: ((2.0 * lam * d).exp() - top) / l,
            m2_unshifted: ((lam * d).exp() - top) / l,
            eta_min_support,
            eta_max_outside,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn weights() -> CarlemanWeights {
        CarlemanWeights::new(DomainNest::default_log(), 0.84, 1.0, 10.0, 0.5, 2000).unwrap()
    }

    #[test]
    fn ell_peaks_at_half_horizon() {
        let w = weights();
        let v = w.eval_weights(0.0, 0.5).unwrap();
        assert!((v.ell - 0.25).abs() < 1e-15);
    }

    #[test]
    fn time_outside_open_interval_rejected() {
        let w = weights();
        assert!(w.eval_weights(0.0, 0.0).is_err());
        assert!(w.eval_weights(0.0, 1.0).is_err());
    }

    #[test]
    fn eta_negative() {
        let w = weights();
        for &y in w.psi0_samples().grid().nodes() {
            assert!(w.eval_weights(y, 0.37).unwrap().eta < 0.0);
        }
    }

    #[test]
    fn critical_point_outside_omega_rejected() {
        assert!(CarlemanWeights::new(DomainNest::default_log(), 0.3, 1.0, 10.0, 0.5, 500).is_err());
    }

    #[test]
    fn shifted_separation_holds() {
        let sep = weights().separation();
        assert!(sep.holds(), "{sep:?}");
    }
}
