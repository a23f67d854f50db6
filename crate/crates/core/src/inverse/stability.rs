use std::sync::Arc;

use rayon::prelude::*;

use super::linearized::{assemble_linearized, linearization_time, AlphaSource};
use crate::carleman::DomainNest;
use crate::error::{Error, Result};
use crate::grid_pde::stencil::trapezoid;
use crate::grid_pde::{sobolev_norm, Field1D, Interval, SpaceGrid};
use crate::pricing::{
    extract_quote_slice, log_grid, solve_dupire_forward, strike_grid, MarketParams, PdeConfig, VolCurve,
};

/// Norms comparing two curves that agree outside `I*`.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub perturbation_id: String,
    pub epsilon: f64,
    /// `‖σ₁ − σ₂‖_{L²(I₁*)}`.
    pub vol_norm: f64,
    /// `‖φ_{σ₁} − φ_{σ₂}‖_{H²(I₁*)}`.
    pub price_norm: f64,
    /// `vol_norm / price_norm`, undefined when the prices coincide.
    pub ratio: Option<f64>,
    /// `‖f‖²_{L²(Ω)}`.
    pub lemma54_lhs: f64,
    /// `‖w(·, τ*)‖²_{H²(Ω₁)} + ∫₀^T ∫_{ω₂} |w|²`.
    pub lemma54_rhs: f64,
}

impl StabilityReport {
    /// `lemma54_lhs / lemma54_rhs`, undefined when the right side vanishes.
    pub fn source_quotient(&self) -> Option<f64> {
        (self.lemma54_rhs > 0.0).then(|| self.lemma54_lhs / self.lemma54_rhs)
    }
}

/// Observation geometry of the stability harness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilitySetup {
    pub i_star: Interval,
    pub i1_star: Interval,
    /// Log-moneyness images of the strike intervals plus observation windows.
    pub nest: DomainNest,
}

impl StabilitySetup {
    pub fn validate(&self) -> Result<()> {
        if !self.i_star.is_compactly_inside(&self.i1_star) {
            return Err(Error::Nesting(format!(
                "I* [{}, {}] must sit strictly inside I1* [{}, {}]",
                self.i_star.lo, self.i_star.hi, self.i1_star.lo, self.i1_star.hi
            )));
        }
        self.nest.validate()
    }
}

fn strike_field(grid: &Arc<SpaceGrid>, f: impl Fn(f64) -> f64) -> Result<Field1D> {
    Field1D::from_fn(grid.clone(), f)
}

/// Compare `vol1` and `vol2` through their quote slices on `I₁*` and through
/// the linearized log-moneyness system.
pub fn stability_ratio(
    id: &str,
    epsilon: f64,
    vol1: &VolCurve,
    vol2: &VolCurve,
    params: &MarketParams,
    setup: &StabilitySetup,
    cfg: &PdeConfig,
) -> Result<StabilityReport> {
    setup.validate()?;
    let strikes = strike_grid(params, cfg)?;
    for &k in strikes.nodes() {
        if !setup.i_star.contains(k) && (vol1.sigma_at(k) - vol2.sigma_at(k)).abs() > 1e-12 {
            return Err(Error::param("vol2", format!("differs from vol1 at K = {k}, outside I*")));
        }
    }
    let slice1 = extract_quote_slice(&solve_dupire_forward(vol1, params, cfg)?, params, &setup.i1_star)?;
    let slice2 = extract_quote_slice(&solve_dupire_forward(vol2, params, cfg)?, params, &setup.i1_star)?;
    let kgrid = Arc::new(SpaceGrid::new(slice1.strikes().to_vec())?);
    let dphi = Field1D::new(
        kgrid.clone(),
        slice1.prices().iter().zip(slice2.prices()).map(|(a, b)| a - b).collect(),
    )?;
    let dsig = strike_field(&kgrid, |k| vol1.sigma_at(k) - vol2.sigma_at(k))?;
    // grid nodes inside I₁*; the interval ends need not be nodes
    let span = kgrid.span();
    let vol_norm = sobolev_norm(&dsig, 0, &span)?;
    let price_norm = sobolev_norm(&dphi, 2, &span)?;

    let ygrid = log_grid(cfg)?;
    let a1 = vol1.diffusion_on(&ygrid, params)?;
    let a2 = vol2.diffusion_on(&ygrid, params)?;
    let (lemma54_lhs, lemma54_rhs) = if a1 == a2 {
        (0.0, 0.0)
    } else {
        let time = linearization_time(params, cfg.time_steps)?;
        let sys = assemble_linearized(&a1, &a2, params, &time, cfg.schedule, AlphaSource::Perturbed)?;
        let nest = &setup.nest;
        let lhs = sobolev_norm(&sys.pair.f, 0, &nest.support)?.powi(2);
        let mid = time
            .level_of(params.tau_star())
            .ok_or_else(|| Error::param("time", "tau* is not a level of the linearized grid"))?;
        let h2 = sobolev_norm(sys.w.level(mid), 2, &nest.domain)?.powi(2);
        let obs = ygrid.window_indices(&nest.omega2)?;
        let y = &ygrid.nodes()[obs.clone()];
        let per_level: Vec<f64> = sys
            .w
            .levels()
            .iter()
            .map(|l| trapezoid(y, &l.values()[obs.clone()].iter().map(|v| v * v).collect::<Vec<_>>()))
            .collect();
        (lhs, h2 + trapezoid(time.nodes(), &per_level))
    };
    Ok(StabilityReport {
        perturbation_id: id.to_string(),
        epsilon,
        vol_norm,
        price_norm,
        ratio: (price_norm > 0.0).then(|| vol_norm / price_norm),
        lemma54_lhs,
        lemma54_rhs,
    })
}

/// Compactly supported C² bump `sign · (1 − u²)³`, `u = (K − center) / half_width`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bump {
    pub center: f64,
    pub half_width: f64,
    pub sign: f64,
}

impl Bump {
    pub fn eval(&self, k: f64) -> f64 {
        let u = (k - self.center) / self.half_width;
        if u.abs() >= 1.0 {
            0.0
        } else {
            self.sign * (1.0 - u * u).powi(3)
        }
    }

    pub fn support(&self) -> Interval {
        Interval {
            lo: self.center - self.half_width,
            hi: self.center + self.half_width,
        }
    }
}

/// One perturbation `σ₂ = σ₁ + ε · bump`.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyMember {
    pub id: String,
    pub epsilon: f64,
    pub bump: Bump,
}

pub const DEFAULT_EPSILONS: [f64; 5] = [1e-3, 3e-3, 1e-2, 3e-2, 1e-1];

/// Three bump shapes inside `[80, 120]` (scaled to `S*`), each at every
/// amplitude in `epsilons`.
pub fn bump_family(params: &MarketParams, epsilons: &[f64]) -> Vec<FamilyMember> {
    let s = params.s_star / 100.0;
    let shapes = [
        ("wide-up", Bump { center: 100.0 * s, half_width: 18.0 * s, sign: 1.0 }),
        ("left-down", Bump { center: 92.0 * s, half_width: 10.0 * s, sign: -1.0 }),
        ("right-up", Bump { center: 108.0 * s, half_width: 10.0 * s, sign: 1.0 }),
    ];
    shapes
        .iter()
        .flat_map(|(name, bump)| {
            epsilons.iter().map(move |&e| FamilyMember {
                id: format!("{name}-{e:e}"),
                epsilon: e,
                bump: *bump,
            })
        })
        .collect()
}

/// `background + ε · bump` sampled on `strikes`, background outside `support`.
pub fn perturbed_curve(
    background: &VolCurve,
    member: &FamilyMember,
    strikes: &Arc<SpaceGrid>,
    support: &Interval,
) -> Result<VolCurve> {
    VolCurve::from_fn(
        strikes.clone(),
        background.bounds(),
        background.background(),
        Some(*support),
        |k| background.sigma_at(k) + member.epsilon * member.bump.eval(k),
    )
}

/// Outcome of one family member; members whose curve leaves the bounds
/// are skipped with the reason.
#[derive(Debug, Clone, PartialEq)]
pub enum SweepOutcome {
    Report(StabilityReport),
    Skipped { id: String, epsilon: f64, reason: String },
}

/// Run every member against `background`, in parallel, in family order.
pub fn stability_sweep(
    background: &VolCurve,
    family: &[FamilyMember],
    params: &MarketParams,
    setup: &StabilitySetup,
    cfg: &PdeConfig,
) -> Result<Vec<SweepOutcome>> {
    setup.validate()?;
    let strikes = strike_grid(params, cfg)?;
    let base = VolCurve::from_fn(
        strikes.clone(),
        background.bounds(),
        background.background(),
        Some(setup.i_star),
        |k| background.sigma_at(k),
    )?;
    family
        .par_iter()
        .map(|m| match perturbed_curve(&base, m, &strikes, &setup.i_star) {
            Err(e) => Ok(SweepOutcome::Skipped {
                id: m.id.clone(),
                epsilon: m.epsilon,
                reason: e.to_string(),
            }),
            Ok(vol2) => stability_ratio(&m.id, m.epsilon, &base, &vol2, params, setup, cfg).map(SweepOutcome::Report),
        })
        .collect()
}

/// Largest ratio and largest source quotient over the reports.
pub fn empirical_constants(outcomes: &[SweepOutcome]) -> (Option<f64>, Option<f64>) {
    let reports = outcomes.iter().filter_map(|o| match o {
        SweepOutcome::Report(r) => Some(r),
        SweepOutcome::Skipped { .. } => None,
    });
    let mut c: Option<f64> = None;
    let mut c_src: Option<f64> = None;
    for r in reports {
        if let Some(x) = r.ratio {
            c = Some(c.map_or(x, |v| v.max(x)));
        }
        if let Some(x) = r.source_quotient() {
            c_src = Some(c_src.map_or(x, |v| v.max(x)));
        }
    }
    (c, c_src)
}
