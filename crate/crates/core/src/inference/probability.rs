//! X-basis readout statistics and classical Fisher information.
//!
//! With `p_n = |c_2n|²` and `φ = ω_↑ t`,
//!
//! ```text
//! p(+|φ) = ½ + ½ Σ p_n cos(2nφ) = Σ p_n cos²(nφ)
//! p(−|φ) = Σ p_n sin²(nφ)
//! ∂_φ p(+|φ) = −Σ n p_n sin(2nφ)
//! F_C(φ) = (∂_φ p)² [1/p(+|φ) + 1/p(−|φ)]
//! ```
//!
//! `p(−|φ)` is summed directly rather than as `1 − p(+|φ)` so it keeps
//! relative precision next to recurrences, where the Fisher information
//! plateaus at `3n̄² + 2n̄`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::squeezed::CoefficientTable;

/// Floor applied to outcome probabilities inside logarithms and the Fisher ratio.
pub const PROBABILITY_FLOOR: f64 = 1e-15;

/// Outcome probabilities and the slope of `p(+|φ)` at one phase.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Readout {
    pub p_plus: f64,
    pub p_minus: f64,
    /// `∂_φ p(+|φ)`.
    pub slope: f64,
}

/// Quasistatic dephasing expressed in phase units: the coherence is damped by
/// `exp(−(Kφ/π)²)` with `K = π/(ω_↑ T2*)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dephasing {
    pub k: f64,
}

impl Dephasing {
    pub fn new(omega_up: f64, t2star: f64) -> Self {
        Dephasing {
            k: dephasing_k(omega_up, t2star),
        }
    }

    pub fn envelope(&self, phi: f64) -> f64 {
        (-(self.k * phi / PI).powi(2)).exp()
    }
}

/// `K = π/(ω_↑ T2*)`.
pub fn dephasing_k(omega_up: f64, t2star: f64) -> f64 {
    PI / (omega_up * t2star)
}

pub fn readout(table: &CoefficientTable, phi: f64) -> Readout {
    let mut p_minus = 0.0;
    let mut slope = 0.0;
    for (n, &p) in table.populations().iter().enumerate().skip(1) {
        let angle = n as f64 * phi;
        let s = angle.sin();
        p_minus += p * s * s;
        slope -= p * n as f64 * (2.0 * angle).sin();
    }
    let p_minus = p_minus.clamp(0.0, 1.0);
    Readout {
        p_plus: 1.0 - p_minus,
        p_minus,
        slope,
    }
}

/// Readout with the coherence multiplied by the dephasing envelope `D(φ)`:
/// `p(+|φ) = ½(1 + D C)` where `C` is the ideal `⟨σ_x⟩`.
pub fn dephased_readout(table: &CoefficientTable, phi: f64, dephasing: &Dephasing) -> Readout {
    let ideal = readout(table, phi);
    let d = dephasing.envelope(phi);
    let d_slope = -2.0 * (dephasing.k / PI).powi(2) * phi * d;
    let coherence = 1.0 - 2.0 * ideal.p_minus;
    let p_minus = (0.5 * (1.0 - d) + d * ideal.p_minus).clamp(0.0, 1.0);
    Readout {
        p_plus: 1.0 - p_minus,
        p_minus,
        slope: 0.5 * d_slope * coherence + d * ideal.slope,
    }
}

/// `p(+|φ)`, clamped to `[0, 1]`.
pub fn success_probability(table: &CoefficientTable, phi: f64) -> f64 {
    readout(table, phi).p_plus
}

/// `∂_φ p(+|φ) = −Σ n |c_2n|² sin(2nφ)`.
pub fn success_probability_derivative(table: &CoefficientTable, phi: f64) -> f64 {
    readout(table, phi).slope
}

/// Fisher information of a binary readout.
///
/// Zero wherever the slope vanishes or either outcome is impossible to within
/// [`PROBABILITY_FLOOR`]; the recurrence points `φ = mπ` fall in that case.
pub fn readout_fisher(r: &Readout) -> f64 {
    if r.slope == 0.0 || r.p_plus < PROBABILITY_FLOOR || r.p_minus < PROBABILITY_FLOOR {
        return 0.0;
    }
    r.slope * r.slope * (1.0 / r.p_plus + 1.0 / r.p_minus)
}

pub fn fisher_information(table: &CoefficientTable, phi: f64) -> f64 {
    readout_fisher(&readout(table, phi))
}

pub fn dephased_fisher_information(table: &CoefficientTable, phi: f64, dephasing: &Dephasing) -> f64 {
    readout_fisher(&dephased_readout(table, phi, dephasing))
}

/// Plateau of `F_C` next to a recurrence, `3n̄² + 2n̄`.
pub fn fisher_asymptote(n_bar: f64) -> f64 {
    3.0 * n_bar * n_bar + 2.0 * n_bar
}

/// Plateau at the `m`-th recurrence under dephasing, `e^{−(Km)²}(3n̄² + 2n̄)`.
pub fn dephased_fisher_peak(n_bar: f64, omega_up: f64, t2star: f64, m: u32) -> f64 {
    let km = dephasing_k(omega_up, t2star) * m as f64;
    (-km * km).exp() * fisher_asymptote(n_bar)
}

/// Upper bound on `F_C(φ)` from the quantum Fisher information in phase
/// units, `8(n̄² + n̄)`.
pub fn quantum_fisher_phase(n_bar: f64) -> f64 {
    8.0 * (n_bar * n_bar + n_bar)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FisherProfile {
    pub phis: Vec<f64>,
    pub values: Vec<f64>,
    pub r: f64,
    pub n_bar: f64,
    pub dephasing: Option<Dephasing>,
}

pub fn fisher_profile(table: &CoefficientTable, phis: &[f64], dephasing: Option<Dephasing>) -> FisherProfile {
    let values = phis
        .iter()
        .map(|&phi| match &dephasing {
            Some(d) => dephased_fisher_information(table, phi, d),
            None => fisher_information(table, phi),
        })
        .collect();
    FisherProfile {
        phis: phis.to_vec(),
        values,
        r: table.r(),
        n_bar: table.n_bar(),
        dephasing,
    }
}
