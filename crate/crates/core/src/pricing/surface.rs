use std::fmt;
use std::str::FromStr;

use super::params::MarketParams;
use crate::error::{Error, Result};
use crate::grid_pde::{Interval, SpaceTimeField};

/// Which coordinates a [`PriceSurface`] is sampled in. The time axis always
/// starts at 0 and runs in the direction the problem is solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisKind {
    /// `v(S, t)`; time axis is time to expiry `T − t`.
    SpotTime,
    /// `u(K, T′)`; time axis is elapsed maturity `T′ − t*`.
    StrikeMaturity,
    /// `w(y, τ)` with `y = ln(K/S*)`.
    LogMoneyness,
}

impl AxisKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            AxisKind::SpotTime => "spot-time",
            AxisKind::StrikeMaturity => "strike-maturity",
            AxisKind::LogMoneyness => "log-moneyness-timetomaturity",
        }
    }
}

impl fmt::Display for AxisKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AxisKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spot-time" => Ok(AxisKind::SpotTime),
            "strike-maturity" => Ok(AxisKind::StrikeMaturity),
            "log-moneyness-timetomaturity" => Ok(AxisKind::LogMoneyness),
            other => Err(Error::param("axis_kind", format!("unknown axis kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PriceSurface {
    pub kind: AxisKind,
    pub field: SpaceTimeField,
}

impl PriceSurface {
    pub fn new(kind: AxisKind, field: SpaceTimeField) -> Self {
        Self { kind, field }
    }

    /// Value at `(x, t)`: cubic in space, linear in time.
    pub fn value_at(&self, x: f64, t: f64) -> Result<f64> {
        Ok(self.field.at_time(t)?.at(x))
    }

    pub fn min_value(&self) -> f64 {
        self.field
            .levels()
            .iter()
            .flat_map(|l| l.values().iter().cloned())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Call quotes `K ↦ φ*(K)` at one maturity.
#[derive(Debug, Clone, PartialEq)]
pub struct QuoteSlice {
    strikes: Vec<f64>,
    prices: Vec<f64>,
}

impl QuoteSlice {
    /// Structural checks only (lengths, ordering, finiteness); see
    /// [`QuoteSlice::check_no_arbitrage`] for the price invariants.
    pub fn new(strikes: Vec<f64>, prices: Vec<f64>) -> Result<Self> {
        if strikes.len() != prices.len() {
            return Err(Error::param("slice", "strike and price counts differ"));
        }
        if strikes.len() < 2 {
            return Err(Error::TooFewNodes {
                needed: 2,
                found: strikes.len(),
            });
        }
        if let Some(i) = strikes.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::param(
                "strikes",
                format!("must be strictly increasing ({} then {})", strikes[i], strikes[i + 1]),
            ));
        }
        if strikes.iter().chain(&prices).any(|v| !v.is_finite()) {
            return Err(Error::param("slice", "non-finite entry"));
        }
        Ok(Self { strikes, prices })
    }

    pub fn strikes(&self) -> &[f64] {
        &self.strikes
    }

    pub fn prices(&self) -> &[f64] {
        &self.prices
    }

    pub fn len(&self) -> usize {
        self.strikes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strikes.is_empty()
    }

    pub fn span(&self) -> Interval {
        Interval {
            lo: self.strikes[0],
            hi: self.strikes[self.strikes.len() - 1],
        }
    }

    /// Nonnegative, nonincreasing and convex prices, each up to `tol`
    /// (currency units). Convexity is measured as the excess of the chord
    /// over the middle quote of every three consecutive strikes.
    pub fn check_no_arbitrage(&self, tol: f64) -> Result<()> {
        let (k, p) = (&self.strikes, &self.prices);
        let negative: Vec<f64> = k.iter().zip(p).filter(|(_, &v)| v < -tol).map(|(&k, _)| k).collect();
        if !negative.is_empty() {
            return Err(Error::Arbitrage {
                kind: "negative price",
                strikes: negative,
            });
        }
        let increasing: Vec<f64> = (1..k.len()).filter(|&i| p[i] - p[i - 1] > tol).map(|i| k[i]).collect();
        if !increasing.is_empty() {
            return Err(Error::Arbitrage {
                kind: "price increasing in strike",
                strikes: increasing,
            });
        }
        let concave: Vec<f64> = (1..k.len() - 1)
            .filter(|&i| {
                let (hl, hr) = (k[i] - k[i - 1], k[i + 1] - k[i]);
                let chord = (hr * p[i - 1] + hl * p[i + 1]) / (hl + hr);
                chord - p[i] < -tol
            })
            .map(|i| k[i])
            .collect();
        if !concave.is_empty() {
            return Err(Error::Arbitrage {
                kind: "butterfly (non-convex prices)",
                strikes: concave,
            });
        }
        Ok(())
    }
}

/// Quotes `φ*(K)` for the grid strikes inside `interval`, read off a Dupire
/// or log-moneyness surface at maturity `T` (elapsed time `τ*`).
pub fn extract_quote_slice(
    surface: &PriceSurface,
    params: &MarketParams,
    interval: &Interval,
) -> Result<QuoteSlice> {
    let tau = params.tau_star();
    let level = surface.field.at_time(tau)?;
    let grid = level.grid();
    match surface.kind {
        AxisKind::StrikeMaturity => {
            let range = grid.window_indices(interval)?;
            QuoteSlice::new(
                grid.nodes()[range.clone()].to_vec(),
                level.values()[range].to_vec(),
            )
        }
        AxisKind::LogMoneyness => {
            if !(interval.lo > 0.0) {
                return Err(Error::param("interval", "log-moneyness slices need positive strikes"));
            }
            let yw = interval.map(|k| params.log_moneyness(k));
            let range = grid.window_indices(&yw)?;
            let disc = (-params.q * tau).exp();
            QuoteSlice::new(
                grid.nodes()[range.clone()].iter().map(|&y| params.strike_of(y)).collect(),
                level.values()[range].iter().map(|&w| w * disc).collect(),
            )
        }
        AxisKind::SpotTime => Err(Error::param(
            "surface",
            "quote slices come from strike-maturity or log-moneyness surfaces",
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arbitrage_checks_name_offending_strikes() {
        let s = QuoteSlice::new(vec![90.0, 100.0, 110.0], vec![12.0, -1.0, 0.5]).unwrap();
        assert_eq!(
            s.check_no_arbitrage(1e-9),
            Err(Error::Arbitrage {
                kind: "negative price",
                strikes: vec![100.0]
            })
        );
        let s = QuoteSlice::new(vec![90.0, 100.0, 110.0], vec![12.0, 8.0, 1.0]).unwrap();
        assert!(matches!(
            s.check_no_arbitrage(1e-9),
            Err(Error::Arbitrage { strikes, .. }) if strikes == vec![100.0]
        ));
        let s = QuoteSlice::new(vec![90.0, 100.0, 110.0], vec![12.0, 6.0, 2.0]).unwrap();
        assert!(s.check_no_arbitrage(1e-9).is_ok());
    }

    #[test]
    fn unsorted_strikes_rejected() {
        assert!(QuoteSlice::new(vec![100.0, 90.0], vec![1.0, 2.0]).is_err());
    }

    #[test]
    fn axis_kind_round_trips_through_text() {
        for k in [AxisKind::SpotTime, AxisKind::StrikeMaturity, AxisKind::LogMoneyness] {
            assert_eq!(k.as_str().parse::<AxisKind>().unwrap(), k);
        }
    }
}
