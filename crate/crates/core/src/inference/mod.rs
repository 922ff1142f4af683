//! Readout statistics, Fisher information and phase estimation.

use thiserror::Error;

pub mod mle;
pub mod probability;
pub mod sampling;

pub use mle::{
    estimator_study, golden_section_max, log_likelihood, log_likelihood_counts, maximize_on_interval,
    maximize_on_window,
    mle_estimate, mle_from_counts, EstimatorStudy, MleOptions, Window,
};
pub use probability::{
    dephased_fisher_information, dephased_fisher_peak, dephased_readout, dephasing_k, fisher_asymptote,
    fisher_information, fisher_profile, quantum_fisher_phase, readout, readout_fisher, success_probability,
    success_probability_derivative, Dephasing, FisherProfile, Readout, PROBABILITY_FLOOR,
};
pub use sampling::{sample_outcomes, sample_plus_count, Counts, MeasurementRecord, Outcome};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InferenceError {
    #[error("likelihood is flat across the estimation window; the record carries no phase information")]
    DegenerateLikelihood,
    #[error("window [{lo}, {hi}] is not inside a half-period adjacent to a recurrence")]
    InvalidWindow { lo: f64, hi: f64 },
    #[error("at least one shot is required")]
    NoShots,
    #[error("likelihood grid needs at least {min} points, got {0}", min = mle::MIN_GRID_POINTS)]
    InvalidGrid(usize),
    #[error("estimator study needs at least {min} batches, got {0}", min = mle::MIN_BATCHES)]
    TooFewBatches(usize),
}
