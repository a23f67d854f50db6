//! Carleman weight construction and numerical probes of the weighted and
//! energy inequalities behind the stability estimate.

mod domains;
mod probe;
mod weight;
mod weights;

pub use domains::DomainNest;
pub use probe::{
    carleman_probe, carleman_sweep, energy_probe, probe_test_function, LhsScaling, ProbeResult, SweepRow,
};
pub use weight::{build_fa, build_psi0, select_delta_omega2, Fa, Psi0};
pub use weights::{CarlemanWeights, Separation, WeightValues};
