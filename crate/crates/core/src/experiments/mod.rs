//! Numerical experiments, their configs and the persisted record format.

mod data;
mod fit;
mod growth;
pub mod invariants;
mod positive;
mod profile;
mod rate;
mod record;
mod smoothing;
mod transfer;

pub use data::{closed_band, random_band_function};
pub use fit::{fit_exponent, ExponentFit};
pub use growth::{growth_experiment, GrowthConfig, BOUSSINESQ_SLOPE, FINITE_TYPE_SLOPE};
pub use positive::{annulus_indicator, positive_direction_experiment, PositiveConfig};
pub use profile::RegularityProfile;
pub use rate::{rate_experiment, RateConfig};
pub use record::{config_digest, ExperimentKind, ExperimentRecord};
pub use smoothing::{smoothing_experiment, smoothing_sides, smoothing_weights, SmoothingConfig, SmoothingSides};
pub use transfer::{transfer_experiment, TransferConfig};

pub(crate) fn join(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}
