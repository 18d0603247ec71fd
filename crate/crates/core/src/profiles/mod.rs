//! Constructive profile decomposition: planted scenes, greedy extraction over
//! the symmetry group, the orbit metric and the decoupling statistics.

pub mod extract;
pub mod orbit;
pub mod scene;
pub mod search;
pub mod shape;
pub mod strichartz;

pub use extract::{extract_one, extract_profiles, Decomposition, ExtractOptions, LedgerRow, RecoveredProfile};
pub use orbit::{orbit_distance, OrbitBudget, OrbitDistance};
pub use scene::{noise_pair, orthogonality_stat, synthesize_sequence, NoiseSpec, PlantedProfile, PlantedScene};
pub use search::best_phase;
pub use shape::{atom, ProfileShape};
pub use strichartz::{free_strichartz_norm, inverse_strichartz_check, strichartz_exponent, InverseStrichartzReport};
