//! One function per subcommand. Each computes everything first, then writes
//! its artifacts through a single writer.

use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::config::{CurveShape, RunConfig};
use super::formats::{self, PriceRecord, SeparationRecord, StabilitySummary, SweepRecord, VolTable};
use crate::carleman::{carleman_sweep, probe_test_function, CarlemanWeights};
use crate::error::{Error, Result};
use crate::grid_pde::Field1D;
use crate::inverse::{
    bump_family, calibrate_slice, dupire_invert_surface, empirical_constants, solve_dupire_for_inversion,
    stability_sweep, StopReason, SweepOutcome,
};
use crate::pricing::{
    bs_closed_form, extract_quote_slice, solve_backward_bs, solve_dupire_forward, spot_value, strike_grid,
    QuoteSlice, VolCurve,
};

/// What a command wrote and what it wants printed.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CommandReport {
    pub files: Vec<PathBuf>,
    /// Lines for standard output.
    pub messages: Vec<String>,
    /// Lines for standard error.
    pub warnings: Vec<String>,
}

/// Exit status for a failed command: 3 for numerical failures, 2 otherwise.
pub fn exit_code(err: &Error) -> i32 {
    if err.is_numerical() {
        3
    } else {
        2
    }
}

struct Writer {
    dir: PathBuf,
    files: Vec<PathBuf>,
}

impl Writer {
    fn new(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("creating {}: {e}", dir.display())))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, content: &str) -> Result<()> {
        let path = self.dir.join(name);
        std::fs::write(&path, content).map_err(|e| Error::Io(format!("writing {}: {e}", path.display())))?;
        self.files.push(path);
        Ok(())
    }

    fn finish(self, messages: Vec<String>, warnings: Vec<String>) -> CommandReport {
        CommandReport {
            files: self.files,
            messages,
            warnings,
        }
    }
}

fn true_curve(cfg: &RunConfig) -> Result<VolCurve> {
    match cfg.shape {
        CurveShape::Constant => cfg.background_curve(),
        _ => cfg.true_curve(&strike_grid(&cfg.market, &cfg.pde)?),
    }
}

/// `(strike, σ)` of `curve` at the strike-grid nodes inside `I₁*`.
fn curve_table(cfg: &RunConfig, curve: &VolCurve, clamped: impl Fn(usize, f64) -> bool) -> Result<VolTable> {
    let grid = strike_grid(&cfg.market, &cfg.pde)?;
    let range = grid.window_indices(&cfg.setup.i1_star)?;
    let strikes: Vec<f64> = grid.nodes()[range.clone()].to_vec();
    Ok(VolTable {
        sigma: strikes.iter().map(|&k| curve.sigma_at(k)).collect(),
        clamped: range.zip(&strikes).map(|(i, &k)| clamped(i, k)).collect(),
        strikes,
    })
}

/// Backward Black-Scholes price `v(S*, t*)` for strike `strike`.
pub fn cmd_price(cfg: &RunConfig, strike: f64, out: &Path) -> Result<CommandReport> {
    if !(strike > 0.0 && strike.is_finite()) {
        return Err(Error::Config(format!("strike: must be positive, got {strike}")));
    }
    let vol = true_curve(cfg)?;
    let surface = solve_backward_bs(&vol, &cfg.market, strike, &cfg.pde)?;
    let price = spot_value(&surface, &cfg.market)?;
    let record = PriceRecord {
        strike,
        spot: cfg.market.s_star,
        t_star: cfg.market.t_star,
        expiry: cfg.market.expiry,
        price,
    };
    let mut messages = vec![format!("price {}", formats::num(price))];
    if cfg.shape == CurveShape::Constant {
        let exact = bs_closed_form(&cfg.market, cfg.background, strike, cfg.market.tau_star());
        messages.push(format!("closed_form {}", formats::num(exact)));
    }
    let mut w = Writer::new(out)?;
    w.write("price.csv", &formats::write_price(&record))?;
    w.write("surface_spot.csv", &formats::write_surface(&surface))?;
    Ok(w.finish(messages, Vec::new()))
}

/// Forward Dupire surface of the configured curve and its slice on `I₁*`.
pub fn cmd_dupire(cfg: &RunConfig, out: &Path) -> Result<CommandReport> {
    let vol = true_curve(cfg)?;
    let surface = solve_dupire_forward(&vol, &cfg.market, &cfg.pde)?;
    let slice = extract_quote_slice(&surface, &cfg.market, &cfg.setup.i1_star)?;
    let mut w = Writer::new(out)?;
    w.write("surface_dupire.csv", &formats::write_surface(&surface))?;
    w.write("quotes_dupire.csv", &formats::write_quotes(&slice))?;
    let messages = vec![format!("quotes {}", slice.len())];
    Ok(w.finish(messages, Vec::new()))
}

/// Quotes `φ*(K)` on `I₁*` with multiplicative noise `1 + level·Z`,
/// `Z ~ N(0, 1)` drawn from a ChaCha8 stream seeded with `seed`.
pub fn synthesize_slice(cfg: &RunConfig, vol: &VolCurve, noise_level: f64, seed: u64) -> Result<QuoteSlice> {
    if !(noise_level >= 0.0 && noise_level.is_finite()) {
        return Err(Error::Config(format!("noise level must be nonnegative, got {noise_level}")));
    }
    let surface = solve_dupire_forward(vol, &cfg.market, &cfg.pde)?;
    let slice = extract_quote_slice(&surface, &cfg.market, &cfg.setup.i1_star)?;
    if noise_level == 0.0 {
        return Ok(slice);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noisy = slice
        .prices()
        .iter()
        .map(|&p| {
            let z: f64 = StandardNormal.sample(&mut rng);
            p * (1.0 + noise_level * z)
        })
        .collect();
    QuoteSlice::new(slice.strikes().to_vec(), noisy)
}

/// Synthetic quote file from the configured curve, plus that curve on `I₁*`.
pub fn cmd_synthesize(cfg: &RunConfig, noise_level: f64, out: &Path) -> Result<CommandReport> {
    let vol = true_curve(cfg)?;
    let slice = synthesize_slice(cfg, &vol, noise_level, cfg.seed)?;
    let table = curve_table(cfg, &vol, |_, _| false)?;
    let mut w = Writer::new(out)?;
    w.write("quotes.csv", &formats::write_quotes(&slice))?;
    w.write("vol_true.csv", &formats::write_vol(&table))?;
    let messages = vec![format!("quotes {} noise_level {}", slice.len(), formats::num(noise_level))];
    Ok(w.finish(messages, Vec::new()))
}

/// Calibrate σ on `I*` to a quote file, starting from the background.
pub fn cmd_calibrate(cfg: &RunConfig, quotes: &Path, out: &Path) -> Result<CommandReport> {
    let text =
        std::fs::read_to_string(quotes).map_err(|e| Error::Io(format!("reading {}: {e}", quotes.display())))?;
    let slice = formats::parse_quotes(&text)?;
    let background = cfg.background_curve()?;
    let cal = calibrate_slice(
        &slice,
        &background,
        &cfg.market,
        &cfg.setup.i_star,
        &cfg.pde,
        &cfg.inverse.calibration,
    )?;
    let table = curve_table(cfg, &cal.curve, |i, _| cal.clamped[i])?;
    let mut warnings = Vec::new();
    let n_clamped = cal.clamped.iter().filter(|c| **c).count();
    if n_clamped > 0 {
        warnings.push(format!("warning: {n_clamped} calibrated values sit on a volatility bound"));
    }
    let stop = match cal.stop {
        StopReason::Tolerance => "tolerance",
        StopReason::Stagnation => "stagnation",
        StopReason::StepTooSmall => "step_too_small",
    };
    let mut w = Writer::new(out)?;
    w.write("vol.csv", &formats::write_vol(&table))?;
    w.write("calibration_history.csv", &formats::write_history(&cal.residual_history))?;
    let messages = vec![format!(
        "iterations {} stop {stop} residual {}",
        cal.iterations,
        formats::num(*cal.residual_history.last().expect("history starts with the initial residual"))
    )];
    Ok(w.finish(messages, warnings))
}

/// Algebraic Dupire inversion on `I₁*` of a surface file, or of a fresh
/// forward solve of the configured curve when no file is given.
pub fn cmd_invert_dupire(cfg: &RunConfig, surface: Option<&Path>, out: &Path) -> Result<CommandReport> {
    let surface = match surface {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::Io(format!("reading {}: {e}", p.display())))?;
            formats::parse_surface(&text)?
        }
        None => solve_dupire_for_inversion(&true_curve(cfg)?, &cfg.market, &cfg.pde)?,
    };
    let inv = dupire_invert_surface(&surface, &cfg.market, &cfg.setup.i1_star, cfg.bounds, cfg.background)?;
    let grid = inv.curve.strikes().clone();
    let table = VolTable {
        strikes: grid.nodes().to_vec(),
        sigma: inv.curve.sigma().values().to_vec(),
        clamped: grid.nodes().iter().map(|&k| inv.is_clamped(k)).collect(),
    };
    let warnings = inv
        .clamped
        .iter()
        .map(|c| {
            format!(
                "warning: sigma at K = {} clamped from {} to {}",
                formats::num(c.strike),
                formats::num(c.raw),
                formats::num(c.clamped)
            )
        })
        .collect();
    let mut w = Writer::new(out)?;
    w.write("vol_dupire.csv", &formats::write_vol(&table))?;
    let messages = vec![format!("nodes {} clamped {}", table.strikes.len(), inv.clamped.len())];
    Ok(w.finish(messages, warnings))
}

/// Summary of a finished sweep.
pub fn summarize(outcomes: &[SweepOutcome]) -> StabilitySummary {
    let (c, c_src) = empirical_constants(outcomes);
    let min_ratio = outcomes
        .iter()
        .filter_map(|o| match o {
            SweepOutcome::Report(r) => r.ratio,
            SweepOutcome::Skipped { .. } => None,
        })
        .reduce(f64::min);
    StabilitySummary {
        members: outcomes.len(),
        skipped: outcomes
            .iter()
            .filter(|o| matches!(o, SweepOutcome::Skipped { .. }))
            .count(),
        empirical_c: c,
        min_ratio,
        source_c: c_src,
    }
}

/// The built-in bump family at the configured amplitudes against the
/// constant background.
pub fn cmd_stability_sweep(cfg: &RunConfig, out: &Path) -> Result<CommandReport> {
    let background = cfg.background_curve()?;
    let family = bump_family(&cfg.market, &cfg.inverse.epsilons);
    let outcomes = stability_sweep(&background, &family, &cfg.market, &cfg.setup, &cfg.pde)?;
    let summary = summarize(&outcomes);
    let warnings = outcomes
        .iter()
        .filter_map(|o| match o {
            SweepOutcome::Skipped { id, reason, .. } => Some(format!("warning: skipped {id}: {reason}")),
            SweepOutcome::Report(_) => None,
        })
        .collect();
    let mut w = Writer::new(out)?;
    w.write("stability.csv", &formats::write_stability(&outcomes))?;
    w.write("stability_summary.csv", &formats::write_stability_summary(&summary))?;
    let show = |x: Option<f64>| x.map_or_else(|| "n/a".to_string(), formats::num);
    let messages = vec![format!(
        "members {} skipped {} empirical_c {} source_c {}",
        summary.members,
        summary.skipped,
        show(summary.empirical_c),
        show(summary.source_c)
    )];
    Ok(w.finish(messages, warnings))
}

fn build_weights(cfg: &RunConfig) -> Result<CarlemanWeights> {
    let c = &cfg.carleman;
    CarlemanWeights::new(
        cfg.setup.nest,
        c.a_param,
        c.lambda,
        c.s_values[0],
        cfg.market.tau_star(),
        c.weight_cells,
    )
}

fn write_weight_files(w: &mut Writer, weights: &CarlemanWeights) -> Result<String> {
    let rows = formats::weight_rows(weights)?;
    let sep = SeparationRecord::from_weights(weights);
    w.write("weights.csv", &formats::write_weights(&rows))?;
    w.write("separation.csv", &formats::write_separation(&[sep]))?;
    let s = &sep.separation;
    Ok(format!(
        "delta {} m {} separation {}",
        formats::num(sep.delta),
        formats::num(s.m()),
        if s.holds() { "holds" } else { "fails" }
    ))
}

/// Weight samples `(y, ψ₀, ψ, φ, η)` at `τ*` and the separation constants.
pub fn cmd_weights(cfg: &RunConfig, out: &Path) -> Result<CommandReport> {
    let weights = build_weights(cfg)?;
    let mut w = Writer::new(out)?;
    let line = write_weight_files(&mut w, &weights)?;
    Ok(w.finish(vec![line], Vec::new()))
}

/// Probe names and `(modes, ℓ power)` of the built-in test functions.
pub fn probe_functions() -> Vec<(String, u32, i32)> {
    (1..=4)
        .flat_map(|k| (1..=2).map(move |p| (format!("sin{k}-ell{p}"), k, p)))
        .collect()
}

/// The weight files plus the `(λ, s, test function)` sweep table.
pub fn cmd_carleman(cfg: &RunConfig, out: &Path) -> Result<CommandReport> {
    let c = &cfg.carleman;
    let weights = build_weights(cfg)?;
    let a_value = 0.5 * cfg.background * cfg.background;
    let mut rows: Vec<SweepRecord> = Vec::new();
    // one field at a time keeps memory flat
    for (name, k, p) in probe_functions() {
        let z = probe_test_function(&weights, k, p, c.probe_space_cells, c.probe_time_steps)?;
        let a = Field1D::constant(z.space().clone(), a_value);
        let sweep = carleman_sweep(&[(name, z)], &a, &cfg.market, &weights, &c.s_values, c.scaling)?;
        rows.extend(sweep.into_iter().map(SweepRecord::from));
    }
    let mut w = Writer::new(out)?;
    let line = write_weight_files(&mut w, &weights)?;
    w.write("carleman_sweep.csv", &formats::write_sweep(&rows))?;
    let warnings = rows
        .iter()
        .filter(|r| r.c_hat.is_none())
        .map(|r| {
            format!(
                "warning: C_hat undefined for {} at s = {} (weighted integrals underflow)",
                r.row.test_function,
                formats::num(r.row.s)
            )
        })
        .collect();
    Ok(w.finish(vec![line, format!("sweep rows {}", rows.len())], warnings))
}
