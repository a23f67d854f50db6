use statrs::function::erf::erfc;

use super::params::MarketParams;

fn norm_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Constant-volatility call value with continuous dividend yield, spot
/// `params.s_star`, strike `strike`, `time_to_expiry` years left.
pub fn bs_closed_form(params: &MarketParams, sigma: f64, strike: f64, time_to_expiry: f64) -> f64 {
    let s = params.s_star;
    if time_to_expiry <= 0.0 {
        return (s - strike).max(0.0);
    }
    let df_q = (-params.q * time_to_expiry).exp();
    if strike <= 0.0 {
        return s * df_q;
    }
    let df_r = (-params.r * time_to_expiry).exp();
    let vol = sigma * time_to_expiry.sqrt();
    let d1 = ((s / strike).ln() + (params.r - params.q + 0.5 * sigma * sigma) * time_to_expiry) / vol;
    let d2 = d1 - vol;
    s * df_q * norm_cdf(d1) - strike * df_r * norm_cdf(d2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(q: f64) -> MarketParams {
        MarketParams::new(0.05, q, 100.0, 0.0, 1.0).unwrap()
    }

    #[test]
    fn expiry_limit_is_payoff() {
        let p = params(0.02);
        assert_eq!(bs_closed_form(&p, 0.2, 90.0, 0.0), 10.0);
        assert!((bs_closed_form(&p, 0.2, 90.0, 1e-12) - 10.0).abs() < 1e-9);
        assert!(bs_closed_form(&p, 0.2, 110.0, 1e-12).abs() < 1e-12);
    }

    #[test]
    fn zero_strike_limit_is_discounted_spot() {
        let p = params(0.03);
        let v = bs_closed_form(&p, 0.2, 1e-10, 0.7);
        assert!((v - 100.0 * (-0.03f64 * 0.7).exp()).abs() < 1e-8);
    }
}
