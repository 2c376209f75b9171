//! Particle configurations, the continuous-time growth process, one-level
//! transition matrices, link matrices, the sequential-update chain on paths and
//! the truncated generator.

mod generator;
mod multivariate;
mod simulate;
mod state;
mod transitions;

pub use generator::{expm_oracle, truncated_generator, truncated_generator_capped, ExpmResult, TruncatedGenerator, DEFAULT_STATE_CAP};
pub use multivariate::{
    band_neighbors, evolve_distribution, multivariate_step, multivariate_step_seeded, step_distribution, PathDistribution,
};
pub use simulate::{replica_rng, simulate, simulate_with, Direction, Event, EventLog, MoveOutcome, RNG_NAME};
pub use state::{iota, iota_inv, kappa, packed_config, precedes, LevelIndex, ParticleConfig, PathConfig};
pub use transitions::{
    i_phi, kappa_det, link, link_down, link_same, smallest_det_bound, transition_t, transition_t_with, Phi,
};
