//! Scalar functionals and trackers along solutions.

pub mod centers;
pub mod functionals;
pub mod lts;
pub mod morawetz;
pub mod scale;
pub mod scattering;
pub mod weights;
pub mod series;
pub mod virial;

pub use centers::{track_centers, CenterEstimate};
pub use functionals::{energy, mass, virial_momentum};
pub use lts::{lts_monitor, LtsReport, LtsRow};
pub use morawetz::{
    densities, gauge_energy, gauged_densities, interaction_functional, morawetz_radial, window_center, window_integrals,
    Densities, InteractionValue, MorawetzValue, WindowIntegrals,
};
pub use scale::{
    audit_peak_level, c_star, peak_level, peak_level_all, quantize_frequency_scale, smooth_frequency_scale, FrequencyScale,
    PeakAudit, SmoothScale,
};
pub use scattering::{characteristic_partition, scattering_size, scattering_size_series};
pub use virial::{virial_rate_check, VirialCheck};
pub use weights::{audit_weights, weight_tables, WeightAudit, WeightFamily};
pub use series::{CenterRecord, DiagnosticSeries};
