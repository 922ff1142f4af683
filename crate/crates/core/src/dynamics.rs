//! Post-quench qubit coherence.
//!
//! After the quench the prior ground state evolves under `H_↑ = ω_↑ α†α`.
//! Its overlap with the initial state,
//!
//! ```text
//! ⟨0|U_↑(t)|0⟩ = Σ_n |c_2n|² e^{−i 2n ω_↑ t},
//! ```
//!
//! sets the qubit X expectation (its real part) and the Bures angle
//! `Θ = arccos|⟨0|U_↑(t)|0⟩|`. Only even Fock states contribute, so the
//! overlap is periodic in `π/ω_↑`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::squeezed::{occupation_moments, CoefficientTable};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("time grid must be non-decreasing and non-negative")]
    InvalidTimeGrid,
    #[error("T2* must be > 0, got {0}")]
    InvalidT2Star(f64),
}

/// Sums needed for the overlap at phase `φ = ω_↑ t`, arranged so that
/// `1 − Re` and `1 − |·|²` keep full relative precision near recurrences.
#[derive(Clone, Copy, Debug)]
struct OverlapParts {
    /// `1 − Re ⟨0|U|0⟩ = Σ p_n 2 sin²(nφ)`.
    one_minus_re: f64,
    /// `Im ⟨0|U|0⟩ = −Σ p_n sin(2nφ)`.
    im: f64,
}

fn overlap_parts(table: &CoefficientTable, phi: f64) -> OverlapParts {
    let mut one_minus_re = 0.0;
    let mut im = 0.0;
    for (n, &p) in table.populations().iter().enumerate().skip(1) {
        let angle = n as f64 * phi;
        let s = angle.sin();
        one_minus_re += p * 2.0 * s * s;
        im -= p * (2.0 * angle).sin();
    }
    OverlapParts { one_minus_re, im }
}

impl OverlapParts {
    fn overlap(&self) -> Complex64 {
        Complex64::new(1.0 - self.one_minus_re, self.im)
    }

    fn bures(&self) -> f64 {
        let a = self.one_minus_re;
        let sin_sq = (a * (2.0 - a) - self.im * self.im).max(0.0);
        sin_sq.sqrt().atan2(self.overlap().norm())
    }
}

/// Dynamical overlap as a function of the phase `φ = ω_↑ t` alone.
pub fn overlap_at_phase(table: &CoefficientTable, phi: f64) -> Complex64 {
    overlap_parts(table, phi).overlap()
}

/// `⟨0|U_↑(t)|0⟩` with `t` in ns and `omega_up` in rad/ns.
pub fn loschmidt_overlap(table: &CoefficientTable, omega_up: f64, t: f64) -> Complex64 {
    overlap_at_phase(table, omega_up * t)
}

/// Bures angle `arccos|⟨0|U_↑|0⟩|` at phase `φ`, evaluated without the
/// precision loss of `acos` near 1.
pub fn bures_angle(table: &CoefficientTable, phi: f64) -> f64 {
    overlap_parts(table, phi).bures()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoherenceTrace {
    pub times: Vec<f64>,
    pub overlap: Vec<Complex64>,
    pub sigma_x: Vec<f64>,
    pub bures: Vec<f64>,
    pub omega_up: f64,
}

impl CoherenceTrace {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

fn check_time_grid(times: &[f64]) -> Result<(), DynamicsError> {
    let ordered = times.windows(2).all(|w| w[0] <= w[1]);
    let valid = times.iter().all(|t| t.is_finite() && *t >= 0.0);
    if ordered && valid {
        Ok(())
    } else {
        Err(DynamicsError::InvalidTimeGrid)
    }
}

pub fn sigma_x_trace(
    table: &CoefficientTable,
    omega_up: f64,
    times: &[f64],
) -> Result<CoherenceTrace, DynamicsError> {
    check_time_grid(times)?;
    let parts: Vec<OverlapParts> = times.iter().map(|&t| overlap_parts(table, omega_up * t)).collect();
    let overlap: Vec<Complex64> = parts.iter().map(OverlapParts::overlap).collect();
    Ok(CoherenceTrace {
        times: times.to_vec(),
        sigma_x: overlap.iter().map(|z| z.re).collect(),
        bures: parts.iter().map(OverlapParts::bures).collect(),
        overlap,
        omega_up,
    })
}

/// Gaussian envelope `exp(−(t/T2*)²)` of quasistatic qubit dephasing.
pub fn dephasing_envelope(t: f64, t2star: f64) -> f64 {
    (-(t / t2star).powi(2)).exp()
}

/// Dephasing-averaged `⟨σ_x⟩_t`: envelope times the ideal `Re` overlap.
///
/// The detuning η is taken as Gaussian with variance `2/T2*²` (rad²/ns²),
/// for which `⟨⟨e^{iηt}⟩⟩ = e^{−(t/T2*)²}` exactly.
pub fn dephased_sigma_x(
    table: &CoefficientTable,
    omega_up: f64,
    t: f64,
    t2star: f64,
) -> Result<f64, DynamicsError> {
    if !(t2star > 0.0) {
        return Err(DynamicsError::InvalidT2Star(t2star));
    }
    Ok(dephasing_envelope(t, t2star) * loschmidt_overlap(table, omega_up, t).re)
}

/// Variance of the detuning η that reproduces the Gaussian envelope.
pub fn detuning_variance(t2star: f64) -> f64 {
    2.0 / (t2star * t2star)
}

/// Quantum Fisher information with respect to time, `8ω_↑²(n̄² + n̄)`.
pub fn quantum_fisher(omega_up: f64, n_bar: f64) -> f64 {
    8.0 * omega_up * omega_up * (n_bar * n_bar + n_bar)
}

/// `4 Var(H_↑) = 4ω_↑² Var(N)` from the truncated table.
pub fn quantum_fisher_from_table(table: &CoefficientTable, omega_up: f64) -> f64 {
    4.0 * omega_up * omega_up * occupation_moments(table).variance
}

/// Minimum over the trace of `t √F_Q / 2 − Θ(t)`.
///
/// The quantum speed limit makes this non-negative; anything below about
/// `−1e-8` points at a numerical problem. An empty trace gives `+∞`.
pub fn qsl_margin(trace: &CoherenceTrace, fisher_q: f64) -> f64 {
    let speed = fisher_q.max(0.0).sqrt() / 2.0;
    trace
        .times
        .iter()
        .zip(&trace.bures)
        .map(|(t, theta)| t * speed - theta)
        .fold(f64::INFINITY, f64::min)
}
