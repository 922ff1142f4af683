//! Qubit-conditioned quench metrology with a squeezed Kittel mode.
//!
//! An anisotropic ferromagnet has a squeezed magnon vacuum as its ground
//! state. A qubit dispersively coupled to the Kittel mode makes the squeezing
//! qubit-dependent, so flipping the qubit quenches the mode and creates
//! `n̄ = sinh²r` real magnons. The qubit coherence then collapses and revives
//! with period `π/ω_↑`, and an X-basis readout near a revival carries Fisher
//! information `≈ 3n̄² + 2n̄` about `φ = ω_↑t`.
//!
//! Modules, in dependency order:
//!
//! - [`model`]: field map, qubit-conditioned frequencies and squeezing, stability.
//! - [`squeezed`]: even-Fock amplitudes of the squeezed vacuum and their moments.
//! - [`fock_oracle`]: brute-force matrix-exponential reference for [`squeezed`].
//! - [`dynamics`]: dynamical overlap, Bures angle, quantum Fisher information,
//!   speed limit and dephasing.
//! - [`inference`]: readout probabilities, classical Fisher information,
//!   sampling and maximum-likelihood estimation.
//! - [`adaptive`]: staged recurrence search with increasing squeezing.
//! - [`cli`]: the `quenchsim` command line and its file formats.

pub mod adaptive;
pub mod cli;
pub mod dynamics;
pub mod fock_oracle;
pub mod inference;
pub mod model;
pub mod rng;
pub mod squeezed;

pub use dynamics::{
    bures_angle, dephased_sigma_x, loschmidt_overlap, overlap_at_phase, qsl_margin, quantum_fisher,
    quantum_fisher_from_table, sigma_x_trace, CoherenceTrace,
};
pub use model::{
    check_stability, derive_quantities, nonlinearity_validity, omega0_from_field, sweep_field,
    DerivedQuantities, FieldMap, Qubit, StabilityError, SweepTemplate, SystemParams,
};
pub use squeezed::{
    choose_truncation, occupation_moments, squeeze_coefficients, CoefficientTable, OccupationMoments,
    SqueezeError,
};

#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/model.md")]
    mod model {}
    #[doc = include_str!("../../../book/src/squeezed.md")]
    mod squeezed {}
    #[doc = include_str!("../../../book/src/dynamics.md")]
    mod dynamics {}
    #[doc = include_str!("../../../book/src/measurement.md")]
    mod measurement {}
    #[doc = include_str!("../../../book/src/estimation.md")]
    mod estimation {}
    #[doc = include_str!("../../../book/src/adaptive.md")]
    mod adaptive {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
