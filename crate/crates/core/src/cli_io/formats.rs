//! Comma-delimited artifact formats. Every file starts with a header row;
//! numbers are written with 12 significant digits, so writing a parsed file
//! reproduces it byte for byte.

use std::str::FromStr;
use std::sync::Arc;

use crate::carleman::{CarlemanWeights, ProbeResult, Separation, SweepRow};
use crate::error::{Error, Result};
use crate::grid_pde::{Field1D, SpaceGrid, SpaceTimeField, TimeGrid};
use crate::inverse::{StabilityReport, SweepOutcome};
use crate::pricing::{AxisKind, PriceSurface, QuoteSlice};

/// 12 significant digits in scientific notation.
pub fn num(x: f64) -> String {
    format!("{x:.11e}")
}

fn render(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Data rows with their 1-based line numbers, after checking the header.
fn records<'a>(text: &'a str, header: &[&str]) -> Result<Vec<(usize, Vec<&'a str>)>> {
    let mut lines = text.lines().enumerate();
    let Some((_, first)) = lines.next() else {
        return Err(Error::Parse {
            line: 1,
            message: "empty file, expected a header row".into(),
        });
    };
    let got: Vec<&str> = first.split(',').map(str::trim).collect();
    if got != header {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header `{}`, found `{}`", header.join(","), first.trim()),
        });
    }
    let mut out = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != header.len() {
            return Err(Error::Parse {
                line: i + 1,
                message: format!("expected {} fields, found {}", header.len(), fields.len()),
            });
        }
        out.push((i + 1, fields));
    }
    Ok(out)
}

fn parse_num(line: usize, column: &str, s: &str) -> Result<f64> {
    match f64::from_str(s) {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(Error::Parse {
            line,
            message: format!("{column}: `{s}` is not a finite number"),
        }),
    }
}

fn parse_opt(line: usize, column: &str, s: &str) -> Result<Option<f64>> {
    if s == NA {
        Ok(None)
    } else {
        parse_num(line, column, s).map(Some)
    }
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| NA.to_string(), num)
}

const NA: &str = "n/a";
const SKIPPED: &str = "skipped";

fn check_increasing(rows: &[(usize, f64)], what: &str) -> Result<()> {
    for w in rows.windows(2) {
        if !(w[1].1 > w[0].1) {
            return Err(Error::Parse {
                line: w[1].0,
                message: format!("{what} must be strictly increasing ({} after {})", num(w[1].1), num(w[0].1)),
            });
        }
    }
    Ok(())
}

// ---------------------------------------------------------------- quotes

const QUOTE_HEADER: [&str; 2] = ["strike", "price"];

pub fn write_quotes(slice: &QuoteSlice) -> String {
    render(
        &QUOTE_HEADER,
        slice.strikes().iter().zip(slice.prices()).map(|(&k, &p)| vec![num(k), num(p)]),
    )
}

/// Parses a quote file. Ordering errors name the line; negative prices are
/// rejected naming the strikes.
pub fn parse_quotes(text: &str) -> Result<QuoteSlice> {
    let recs = records(text, &QUOTE_HEADER)?;
    let mut keyed = Vec::with_capacity(recs.len());
    let mut prices = Vec::with_capacity(recs.len());
    for (line, f) in &recs {
        let k = parse_num(*line, "strike", f[0])?;
        if !(k > 0.0) {
            return Err(Error::Parse {
                line: *line,
                message: format!("strike must be positive, got {}", f[0]),
            });
        }
        keyed.push((*line, k));
        prices.push(parse_num(*line, "price", f[1])?);
    }
    check_increasing(&keyed, "strikes")?;
    let strikes: Vec<f64> = keyed.iter().map(|r| r.1).collect();
    let negative: Vec<f64> = strikes.iter().zip(&prices).filter(|(_, &p)| p < 0.0).map(|(&k, _)| k).collect();
    if !negative.is_empty() {
        return Err(Error::Arbitrage {
            kind: "negative price",
            strikes: negative,
        });
    }
    QuoteSlice::new(strikes, prices)
}

// ---------------------------------------------------------------- vol curves

/// A volatility curve as written to disk.
#[derive(Debug, Clone, PartialEq)]
pub struct VolTable {
    pub strikes: Vec<f64>,
    pub sigma: Vec<f64>,
    pub clamped: Vec<bool>,
}

const VOL_HEADER: [&str; 3] = ["strike", "sigma", "clamped"];

pub fn write_vol(table: &VolTable) -> String {
    render(
        &VOL_HEADER,
        (0..table.strikes.len()).map(|i| {
            vec![
                num(table.strikes[i]),
                num(table.sigma[i]),
                u8::from(table.clamped[i]).to_string(),
            ]
        }),
    )
}

pub fn parse_vol(text: &str) -> Result<VolTable> {
    let recs = records(text, &VOL_HEADER)?;
    let mut keyed = Vec::new();
    let mut out = VolTable {
        strikes: Vec::new(),
        sigma: Vec::new(),
        clamped: Vec::new(),
    };
    for (line, f) in &recs {
        let k = parse_num(*line, "strike", f[0])?;
        keyed.push((*line, k));
        out.strikes.push(k);
        out.sigma.push(parse_num(*line, "sigma", f[1])?);
        out.clamped.push(match f[2] {
            "0" => false,
            "1" => true,
            other => {
                return Err(Error::Parse {
                    line: *line,
                    message: format!("clamped: expected 0 or 1, found `{other}`"),
                })
            }
        });
    }
    check_increasing(&keyed, "strikes")?;
    Ok(out)
}

// ---------------------------------------------------------------- surfaces

fn surface_header(kind: AxisKind) -> [&'static str; 3] {
    match kind {
        AxisKind::SpotTime => ["time_to_expiry", "spot", "value"],
        AxisKind::StrikeMaturity => ["elapsed_maturity", "strike", "value"],
        AxisKind::LogMoneyness => ["tau", "log_moneyness", "value"],
    }
}

/// One row per `(time level, space node)`, level-major. The header names
/// the coordinate system.
pub fn write_surface(surface: &PriceSurface) -> String {
    let f = &surface.field;
    let x = f.space().nodes();
    let mut rows = Vec::with_capacity(f.time().len() * x.len());
    for (t, level) in f.time().nodes().iter().zip(f.levels()) {
        for (xi, v) in x.iter().zip(level.values()) {
            rows.push(vec![num(*t), num(*xi), num(*v)]);
        }
    }
    render(&surface_header(surface.kind), rows)
}

pub fn parse_surface(text: &str) -> Result<PriceSurface> {
    let first = text.lines().next().unwrap_or("").trim();
    let kind = [AxisKind::SpotTime, AxisKind::StrikeMaturity, AxisKind::LogMoneyness]
        .into_iter()
        .find(|k| surface_header(*k).join(",") == first)
        .ok_or_else(|| Error::Parse {
            line: 1,
            message: format!("unrecognized surface header `{first}`"),
        })?;
    let recs = records(text, &surface_header(kind))?;
    let mut times: Vec<(usize, f64)> = Vec::new();
    let mut space: Vec<(usize, f64)> = Vec::new();
    let mut levels: Vec<Vec<f64>> = Vec::new();
    for (line, f) in &recs {
        let t = parse_num(*line, "time", f[0])?;
        let x = parse_num(*line, "space", f[1])?;
        let v = parse_num(*line, "value", f[2])?;
        if times.last().map(|l| l.1) != Some(t) {
            if let Some(prev) = levels.last() {
                if prev.len() != space.len() {
                    return Err(Error::Parse {
                        line: *line,
                        message: "time level ended early".into(),
                    });
                }
            }
            times.push((*line, t));
            levels.push(Vec::new());
        }
        let level = levels.last_mut().expect("pushed above");
        let j = level.len();
        if times.len() == 1 {
            space.push((*line, x));
        } else if j >= space.len() || space[j].1 != x {
            return Err(Error::Parse {
                line: *line,
                message: "space nodes differ between time levels".into(),
            });
        }
        level.push(v);
    }
    if levels.last().is_some_and(|l| l.len() != space.len()) {
        return Err(Error::Parse {
            line: recs.last().map_or(1, |r| r.0),
            message: "last time level is incomplete".into(),
        });
    }
    check_increasing(&space, "space nodes")?;
    check_increasing(&times, "time levels")?;
    let grid = Arc::new(SpaceGrid::new(space.iter().map(|s| s.1).collect())?);
    let time = TimeGrid::new(times.iter().map(|t| t.1).collect())?;
    let fields = levels
        .into_iter()
        .map(|v| Field1D::new(grid.clone(), v))
        .collect::<Result<Vec<_>>>()?;
    Ok(PriceSurface::new(kind, SpaceTimeField::new(time, fields)?))
}

// ---------------------------------------------------------------- price

/// The scalar `v(S*, t*)` of a backward solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriceRecord {
    pub strike: f64,
    pub spot: f64,
    pub t_star: f64,
    pub expiry: f64,
    pub price: f64,
}

const PRICE_HEADER: [&str; 5] = ["strike", "spot", "t_star", "expiry", "price"];

pub fn write_price(p: &PriceRecord) -> String {
    render(
        &PRICE_HEADER,
        [vec![num(p.strike), num(p.spot), num(p.t_star), num(p.expiry), num(p.price)]],
    )
}

pub fn parse_price(text: &str) -> Result<PriceRecord> {
    let recs = records(text, &PRICE_HEADER)?;
    let [(line, f)] = recs.as_slice() else {
        return Err(Error::Parse {
            line: 2,
            message: format!("expected exactly one price row, found {}", recs.len()),
        });
    };
    let g = |i: usize| parse_num(*line, PRICE_HEADER[i], f[i]);
    Ok(PriceRecord {
        strike: g(0)?,
        spot: g(1)?,
        t_star: g(2)?,
        expiry: g(3)?,
        price: g(4)?,
    })
}

// ---------------------------------------------------------------- stability

const STABILITY_HEADER: [&str; 8] = [
    "perturbation_id",
    "epsilon",
    "vol_norm",
    "price_norm",
    "ratio",
    "lemma54_lhs",
    "lemma54_rhs",
    "note",
];

fn clean(s: &str) -> String {
    s.replace([',', '\n', '\r'], ";").trim().to_string()
}

/// One row per member; skipped members carry `skipped` in every numeric
/// column after `epsilon` and the reason in `note`.
pub fn write_stability(outcomes: &[SweepOutcome]) -> String {
    render(
        &STABILITY_HEADER,
        outcomes.iter().map(|o| match o {
            SweepOutcome::Report(r) => vec![
                clean(&r.perturbation_id),
                num(r.epsilon),
                num(r.vol_norm),
                num(r.price_norm),
                opt(r.ratio),
                num(r.lemma54_lhs),
                num(r.lemma54_rhs),
                String::new(),
            ],
            SweepOutcome::Skipped { id, epsilon, reason } => {
                let mut row = vec![clean(id), num(*epsilon)];
                row.extend(std::iter::repeat_n(SKIPPED.to_string(), 5));
                row.push(clean(reason));
                row
            }
        }),
    )
}

pub fn parse_stability(text: &str) -> Result<Vec<SweepOutcome>> {
    records(text, &STABILITY_HEADER)?
        .into_iter()
        .map(|(line, f)| {
            let epsilon = parse_num(line, "epsilon", f[1])?;
            if f[2] == SKIPPED {
                return Ok(SweepOutcome::Skipped {
                    id: f[0].to_string(),
                    epsilon,
                    reason: f[7].to_string(),
                });
            }
            Ok(SweepOutcome::Report(StabilityReport {
                perturbation_id: f[0].to_string(),
                epsilon,
                vol_norm: parse_num(line, "vol_norm", f[2])?,
                price_norm: parse_num(line, "price_norm", f[3])?,
                ratio: parse_opt(line, "ratio", f[4])?,
                lemma54_lhs: parse_num(line, "lemma54_lhs", f[5])?,
                lemma54_rhs: parse_num(line, "lemma54_rhs", f[6])?,
            }))
        })
        .collect()
}

/// Summary of a stability sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilitySummary {
    pub members: usize,
    pub skipped: usize,
    pub empirical_c: Option<f64>,
    pub min_ratio: Option<f64>,
    pub source_c: Option<f64>,
}

const SUMMARY_HEADER: [&str; 5] = ["members", "skipped", "empirical_c", "min_ratio", "source_c"];

pub fn write_stability_summary(s: &StabilitySummary) -> String {
    render(
        &SUMMARY_HEADER,
        [vec![
            s.members.to_string(),
            s.skipped.to_string(),
            opt(s.empirical_c),
            opt(s.min_ratio),
            opt(s.source_c),
        ]],
    )
}

pub fn parse_stability_summary(text: &str) -> Result<StabilitySummary> {
    let recs = records(text, &SUMMARY_HEADER)?;
    let [(line, f)] = recs.as_slice() else {
        return Err(Error::Parse {
            line: 2,
            message: "expected exactly one summary row".into(),
        });
    };
    let count = |s: &str| {
        s.parse::<usize>().map_err(|_| Error::Parse {
            line: *line,
            message: format!("`{s}` is not a count"),
        })
    };
    Ok(StabilitySummary {
        members: count(f[0])?,
        skipped: count(f[1])?,
        empirical_c: parse_opt(*line, "empirical_c", f[2])?,
        min_ratio: parse_opt(*line, "min_ratio", f[3])?,
        source_c: parse_opt(*line, "source_c", f[4])?,
    })
}

// ---------------------------------------------------------------- carleman

/// Weight samples at `τ = τ*`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightRow {
    pub y: f64,
    pub psi0: f64,
    pub psi: f64,
    pub phi: f64,
    pub eta: f64,
}

const WEIGHT_HEADER: [&str; 5] = ["y", "psi0", "psi", "phi", "eta"];

/// Samples `(ψ₀, ψ, φ, η)` at `τ*` on the `ψ₀` sample nodes.
pub fn weight_rows(weights: &CarlemanWeights) -> Result<Vec<WeightRow>> {
    let tau = weights.tau_star();
    let samples = weights.psi0_samples();
    samples
        .grid()
        .nodes()
        .iter()
        .zip(samples.values())
        .map(|(&y, &psi0)| {
            let w = weights.eval_weights(y, tau)?;
            Ok(WeightRow {
                y,
                psi0,
                psi: weights.psi(y),
                phi: w.phi,
                eta: w.eta,
            })
        })
        .collect()
}

pub fn write_weights(rows: &[WeightRow]) -> String {
    render(
        &WEIGHT_HEADER,
        rows.iter().map(|r| vec![num(r.y), num(r.psi0), num(r.psi), num(r.phi), num(r.eta)]),
    )
}

pub fn parse_weights(text: &str) -> Result<Vec<WeightRow>> {
    records(text, &WEIGHT_HEADER)?
        .into_iter()
        .map(|(line, f)| {
            let g = |i: usize| parse_num(line, WEIGHT_HEADER[i], f[i]);
            Ok(WeightRow {
                y: g(0)?,
                psi0: g(1)?,
                psi: g(2)?,
                phi: g(3)?,
                eta: g(4)?,
            })
        })
        .collect()
}

const SWEEP_HEADER: [&str; 8] = [
    "test_function",
    "lambda",
    "s",
    "lhs",
    "rhs_interior",
    "rhs_observation",
    "C_hat",
    "log_scale",
];

/// A sweep row with its `C_hat` column, kept as written.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub row: SweepRow,
    pub c_hat: Option<f64>,
}

impl From<SweepRow> for SweepRecord {
    fn from(row: SweepRow) -> Self {
        let c_hat = row.result.c_hat();
        Self { row, c_hat }
    }
}

pub fn write_sweep(rows: &[SweepRecord]) -> String {
    render(
        &SWEEP_HEADER,
        rows.iter().map(|rec| {
            let r = &rec.row;
            vec![
                clean(&r.test_function),
                num(r.lambda),
                num(r.s),
                num(r.result.lhs),
                num(r.result.rhs_interior),
                num(r.result.rhs_observation),
                opt(rec.c_hat),
                num(r.result.log_scale),
            ]
        }),
    )
}

pub fn parse_sweep(text: &str) -> Result<Vec<SweepRecord>> {
    records(text, &SWEEP_HEADER)?
        .into_iter()
        .map(|(line, f)| {
            let g = |i: usize| parse_num(line, SWEEP_HEADER[i], f[i]);
            Ok(SweepRecord {
                row: SweepRow {
                    test_function: f[0].to_string(),
                    lambda: g(1)?,
                    s: g(2)?,
                    result: ProbeResult {
                        lhs: g(3)?,
                        rhs_interior: g(4)?,
                        rhs_observation: g(5)?,
                        log_scale: g(7)?,
                    },
                },
                c_hat: parse_opt(line, "C_hat", f[6])?,
            })
        })
        .collect()
}

/// Separation constants of the weight at `τ*`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparationRecord {
    pub lambda: f64,
    pub delta: f64,
    pub psi_bar: f64,
    pub omega2_lo: f64,
    pub omega2_hi: f64,
    pub separation: Separation,
}

const SEPARATION_HEADER: [&str; 11] = [
    "lambda",
    "delta",
    "psi_bar",
    "omega2_lo",
    "omega2_hi",
    "m1",
    "m2",
    "m1_unshifted",
    "m2_unshifted",
    "eta_min_support",
    "eta_max_outside",
];

impl SeparationRecord {
    pub fn from_weights(w: &CarlemanWeights) -> Self {
        let buffer = w.nest().buffer.expect("weights always carry a buffer");
        Self {
            lambda: w.lambda(),
            delta: w.delta(),
            psi_bar: w.psi_bar(),
            omega2_lo: buffer.lo,
            omega2_hi: buffer.hi,
            separation: w.separation(),
        }
    }
}

pub fn write_separation(rows: &[SeparationRecord]) -> String {
    render(
        &SEPARATION_HEADER,
        rows.iter().map(|r| {
            let s = &r.separation;
            vec![
                num(r.lambda),
                num(r.delta),
                num(r.psi_bar),
                num(r.omega2_lo),
                num(r.omega2_hi),
                num(s.m1),
                num(s.m2),
                num(s.m1_unshifted),
                num(s.m2_unshifted),
                num(s.eta_min_support),
                num(s.eta_max_outside),
            ]
        }),
    )
}

pub fn parse_separation(text: &str) -> Result<Vec<SeparationRecord>> {
    records(text, &SEPARATION_HEADER)?
        .into_iter()
        .map(|(line, f)| {
            let g = |i: usize| parse_num(line, SEPARATION_HEADER[i], f[i]);
            Ok(SeparationRecord {
                lambda: g(0)?,
                delta: g(1)?,
                psi_bar: g(2)?,
                omega2_lo: g(3)?,
                omega2_hi: g(4)?,
                separation: Separation {
                    m1: g(5)?,
                    m2: g(6)?,
                    m1_unshifted: g(7)?,
                    m2_unshifted: g(8)?,
                    eta_min_support: g(9)?,
                    eta_max_outside: g(10)?,
                },
            })
        })
        .collect()
}

// ---------------------------------------------------------------- calibration log

const HISTORY_HEADER: [&str; 2] = ["iteration", "residual"];

pub fn write_history(residuals: &[f64]) -> String {
    render(
        &HISTORY_HEADER,
        residuals.iter().enumerate().map(|(i, r)| vec![i.to_string(), num(*r)]),
    )
}

pub fn parse_history(text: &str) -> Result<Vec<f64>> {
    records(text, &HISTORY_HEADER)?
        .into_iter()
        .enumerate()
        .map(|(i, (line, f))| {
            if f[0] != i.to_string() {
                return Err(Error::Parse {
                    line,
                    message: format!("expected iteration {i}, found `{}`", f[0]),
                });
            }
            parse_num(line, "residual", f[1])
        })
        .collect()
}
