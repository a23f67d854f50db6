//! Inverse problems: the linearized source system, algebraic Dupire
//! inversion, regularized single-slice calibration and the stability harness.

mod calibrate;
mod dupire;
mod linearized;
mod stability;

pub use calibrate::{calibrate_slice, Calibration, CalibrationOptions, StopReason};
pub use dupire::{
    dupire_invert_surface, inversion_dt, inversion_time, solve_dupire_for_inversion, ClampEvent, DupireInversion,
};
pub use linearized::{
    assemble_linearized, check_alpha0, curvature_term, linearization_time, AlphaSource, LinearizedSystem, SourcePair,
};
pub use stability::{
    bump_family, empirical_constants, perturbed_curve, stability_ratio, stability_sweep, Bump, FamilyMember,
    StabilityReport, StabilitySetup, SweepOutcome, DEFAULT_EPSILONS,
};
