use crate::error::{Error, Result};
use crate::grid_pde::Interval;

/// Nested intervals of the Carleman geometry, in log-moneyness.
///
/// `support ⋐ buffer ⋐ domain` and `omega ⋐ omega1 ⋐ omega2 ⋐ domain`, with
/// `omega2` disjoint from the closure of `support`. The buffer is derived
/// from the weight and attached with [`DomainNest::with_buffer`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainNest {
    pub support: Interval,
    pub domain: Interval,
    pub omega: Interval,
    pub omega1: Interval,
    pub omega2: Interval,
    pub buffer: Option<Interval>,
}

fn nested(inner: &Interval, outer: &Interval, inner_name: &str, outer_name: &str) -> Result<()> {
    if inner.is_compactly_inside(outer) {
        Ok(())
    } else {
        Err(Error::Nesting(format!(
            "{inner_name} [{}, {}] must sit strictly inside {outer_name} [{}, {}]",
            inner.lo, inner.hi, outer.lo, outer.hi
        )))
    }
}

impl DomainNest {
    pub fn new(support: Interval, domain: Interval, omega: Interval, omega1: Interval, omega2: Interval) -> Result<Self> {
        let nest = Self {
            support,
            domain,
            omega,
            omega1,
            omega2,
            buffer: None,
        };
        nest.validate()?;
        Ok(nest)
    }

    /// Log images of the default strike intervals `[80, 120] ⋐ [70, 135]`
    /// around `S* = 100`, with the observation windows in the left wing.
    pub fn default_log() -> Self {
        let ln = |k: f64| (k / 100.0).ln();
        Self::new(
            Interval { lo: ln(80.0), hi: ln(120.0) },
            Interval { lo: ln(70.0), hi: ln(135.0) },
            Interval { lo: -0.265, hi: -0.240 },
            Interval { lo: -0.275, hi: -0.235 },
            Interval { lo: -0.285, hi: -0.230 },
        )
        .expect("default geometry is nested")
    }

    pub fn validate(&self) -> Result<()> {
        nested(&self.support, &self.domain, "Omega", "Omega1")?;
        nested(&self.omega, &self.omega1, "omega", "omega1")?;
        nested(&self.omega1, &self.omega2, "omega1", "omega2")?;
        nested(&self.omega2, &self.domain, "omega2", "Omega1")?;
        if !(self.omega2.lo > self.support.hi || self.omega2.hi < self.support.lo) {
            return Err(Error::Nesting(format!(
                "omega2 [{}, {}] must be disjoint from Omega [{}, {}]",
                self.omega2.lo, self.omega2.hi, self.support.lo, self.support.hi
            )));
        }
        if let Some(b) = &self.buffer {
            nested(&self.support, b, "Omega", "Omega2")?;
            nested(b, &self.domain, "Omega2", "Omega1")?;
        }
        Ok(())
    }

    pub fn with_buffer(mut self, buffer: Interval) -> Result<Self> {
        self.buffer = Some(buffer);
        self.validate()?;
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    #[test]
    fn default_is_valid() {
        DomainNest::default_log().validate().unwrap();
    }

    #[test]
    fn overlapping_observation_rejected() {
        let err = DomainNest::new(iv(-0.2, 0.2), iv(-0.4, 0.4), iv(0.12, 0.15), iv(0.11, 0.16), iv(0.1, 0.17));
        assert!(matches!(err, Err(Error::Nesting(_))));
    }

    #[test]
    fn touching_windows_rejected() {
        let err = DomainNest::new(iv(-0.2, 0.1), iv(-0.4, 0.4), iv(0.2, 0.25), iv(0.2, 0.28), iv(0.15, 0.3));
        assert!(err.is_err());
    }
}
