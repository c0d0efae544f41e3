//! Subchannel reliabilities of the polar transform over a BSC.

mod density;
mod genie;
mod profile;

pub use density::{
    density_evolution_minsum, density_evolution_minsum_with, expected_penalties, DensityEvolution, LlrDistribution,
    DEFAULT_PRUNE_EPS, DEFAULT_SUPPORT_CAP, MAX_LEVELS,
};
pub use genie::{genie_sc_error_rates, MIN_GENIE_TRIALS};
pub use profile::ReliabilityProfile;
