//! Even-Fock expansion of the post-quench squeezed vacuum.
//!
//! Conditioned on the qubit, the prior ground state is a squeezed vacuum of
//! the post-quench eigenmode with squeezing `z = r e^{iθ}`:
//!
//! ```text
//! c_2n = (cosh r)^{-1/2} (−e^{iθ} tanh r)^n √((2n)!) / (2ⁿ n!)
//! ```
//!
//! Amplitudes are generated by the ratio `c_{2n+2}/c_2n`, so no factorial
//! is ever formed. Odd Fock amplitudes vanish and are not stored.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const DEFAULT_TAIL_TOL: f64 = 1e-12;

/// Highest Fock index `choose_truncation` will return.
pub const DEFAULT_FOCK_CAP: usize = 4096;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SqueezeError {
    #[error("squeezing strength must be finite and >= 0, got {0}")]
    InvalidStrength(f64),
    #[error("truncation index must be even, got {0}")]
    OddTruncation(usize),
    #[error("tail tolerance must lie in (0, 1), got {0}")]
    InvalidTolerance(f64),
    #[error("truncation overflow: r = {r} needs more than {cap} Fock states for tail tolerance {tail_tol}")]
    TruncationOverflow { r: f64, tail_tol: f64, cap: usize },
}

fn check_strength(r: f64) -> Result<(), SqueezeError> {
    if r.is_finite() && r >= 0.0 {
        Ok(())
    } else {
        Err(SqueezeError::InvalidStrength(r))
    }
}

/// `|c_{2n+2}|² / |c_2n|²`.
#[inline]
fn weight_ratio(tanh_sq: f64, n: usize) -> f64 {
    let n = n as f64;
    tanh_sq * (2.0 * n + 1.0) / (2.0 * n + 2.0)
}

/// Smallest even Fock index `n_max` whose retained probability mass exceeds
/// `1 − tail_tol`, with the default cap.
pub fn choose_truncation(r: f64, tail_tol: f64) -> Result<usize, SqueezeError> {
    choose_truncation_with_cap(r, tail_tol, DEFAULT_FOCK_CAP)
}

pub fn choose_truncation_with_cap(r: f64, tail_tol: f64, cap: usize) -> Result<usize, SqueezeError> {
    check_strength(r)?;
    if !(tail_tol > 0.0 && tail_tol < 1.0) {
        return Err(SqueezeError::InvalidTolerance(tail_tol));
    }
    let tanh_sq = r.tanh().powi(2);
    let mut weight = 1.0 / r.cosh();
    // Neumaier summation; the stopping test compares against 1 − tail_tol.
    let mut sum = 0.0;
    let mut comp = 0.0;
    let mut n = 0usize;
    loop {
        let t = sum + weight;
        comp += if sum.abs() >= weight.abs() {
            (sum - t) + weight
        } else {
            (weight - t) + sum
        };
        sum = t;
        if 1.0 - (sum + comp) < tail_tol {
            return Ok(2 * n);
        }
        if 2 * (n + 1) > cap {
            return Err(SqueezeError::TruncationOverflow { r, tail_tol, cap });
        }
        weight *= weight_ratio(tanh_sq, n);
        n += 1;
    }
}

/// Truncated even-Fock amplitudes of `S(r e^{iθ})|0⟩`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientTable {
    r: f64,
    theta: f64,
    n_max: usize,
    amps: Vec<Complex64>,
    weights: Vec<f64>,
    populations: Vec<f64>,
    tail_mass: f64,
}

/// Builds the table with an explicit (even) truncation index.
pub fn squeeze_coefficients(r: f64, theta: f64, n_max: usize) -> Result<CoefficientTable, SqueezeError> {
    check_strength(r)?;
    if n_max % 2 != 0 {
        return Err(SqueezeError::OddTruncation(n_max));
    }
    let len = n_max / 2 + 1;
    let step = -Complex64::from_polar(r.tanh(), theta);
    let mut amps = Vec::with_capacity(len);
    let mut c = Complex64::new(r.cosh().powf(-0.5), 0.0);
    for n in 0..len {
        amps.push(c);
        let k = n as f64;
        c = c * step * (((2.0 * k + 1.0) * (2.0 * k + 2.0)).sqrt() / (2.0 * k + 2.0));
    }
    let weights: Vec<f64> = amps.iter().map(|a| a.norm_sqr()).collect();
    let retained: f64 = weights.iter().sum();
    let populations = weights.iter().map(|w| w / retained).collect();
    Ok(CoefficientTable {
        r,
        theta,
        n_max,
        amps,
        weights,
        populations,
        tail_mass: (1.0 - retained).max(0.0),
    })
}

impl CoefficientTable {
    /// Chooses the truncation for `tail_tol` and builds the table.
    pub fn new(r: f64, theta: f64, tail_tol: f64) -> Result<Self, SqueezeError> {
        let n_max = choose_truncation(r, tail_tol)?;
        squeeze_coefficients(r, theta, n_max)
    }

    /// Table for the post-quench state, `θ = 0`, at the default tolerance.
    pub fn post_quench(r: f64) -> Result<Self, SqueezeError> {
        Self::new(r, 0.0, DEFAULT_TAIL_TOL)
    }

    pub fn vacuum() -> Self {
        squeeze_coefficients(0.0, 0.0, 0).expect("vacuum table")
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Highest retained Fock index (even).
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// `c_0, c_2, …, c_{n_max}`; entry `k` belongs to Fock state `2k`.
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// `|c_2n|²` as computed, not renormalised.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `|c_2n|²` renormalised over the retained states so they sum to one.
    ///
    /// Dynamics and measurement statistics use these, which makes the
    /// overlap exactly one at recurrences regardless of truncation.
    pub fn populations(&self) -> &[f64] {
        &self.populations
    }

    /// `1 − Σ|c_2n|²` over retained terms.
    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    /// Mean quench-created magnon number in closed form, `sinh²r`.
    pub fn n_bar(&self) -> f64 {
        self.r.sinh().powi(2)
    }

    /// Amplitude of Fock state `n` (zero for odd `n` or beyond truncation).
    pub fn amplitude(&self, n: usize) -> Complex64 {
        if n % 2 == 1 {
            return Complex64::new(0.0, 0.0);
        }
        self.amps.get(n / 2).copied().unwrap_or_default()
    }
}

/// Moments of the magnon number `N` in the truncated state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OccupationMoments {
    pub mean: f64,
    pub second_moment: f64,
    pub variance: f64,
}

/// `⟨N⟩ = Σ 2n |c_2n|²` and `⟨N²⟩ = Σ (2n)² |c_2n|²` over the raw weights.
pub fn occupation_moments(table: &CoefficientTable) -> OccupationMoments {
    let (mean, second_moment) = table
        .weights()
        .iter()
        .enumerate()
        .fold((0.0, 0.0), |(m1, m2), (k, &w)| {
            let n = 2.0 * k as f64;
            (m1 + n * w, m2 + n * n * w)
        });
    OccupationMoments {
        mean,
        second_moment,
        variance: second_moment - mean * mean,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn truncation_examples() {
        assert_eq!(choose_truncation(0.0, 1e-3).unwrap(), 0);
        assert_eq!(choose_truncation(0.0, 1e-15).unwrap(), 0);
        // regression constant, agrees with a 30-digit cumulative sum
        assert_eq!(choose_truncation(1.0, 1e-12).unwrap(), 92);
        assert!(matches!(
            choose_truncation(20.0, 1e-12),
            Err(SqueezeError::TruncationOverflow { cap: 4096, .. })
        ));
        assert!(matches!(choose_truncation(1.0, 0.0), Err(SqueezeError::InvalidTolerance(_))));
        assert!(matches!(choose_truncation(-1.0, 1e-6), Err(SqueezeError::InvalidStrength(_))));
    }

    #[test]
    fn truncation_is_minimal() {
        for &r in &[0.25, 0.5, 1.0, 1.5, 2.0] {
            let n_max = choose_truncation(r, 1e-12).unwrap();
            let full = squeeze_coefficients(r, 0.0, n_max).unwrap();
            assert!(full.tail_mass() < 1e-12, "r={r}");
            if n_max > 0 {
                let shorter = squeeze_coefficients(r, 0.0, n_max - 2).unwrap();
                assert!(shorter.tail_mass() >= 0.9e-12, "r={r}");
            }
        }
    }

    #[test]
    fn reference_amplitudes() {
        // 30-digit reference values
        let t = squeeze_coefficients(1.0, 0.0, 8).unwrap();
        let a = t.amplitudes();
        assert!((a[0].re - 0.805_018_182_194_592_0).abs() < 1e-15);
        assert!((a[1].re - -0.433_525_147_339_655_06).abs() < 1e-15);
        assert!((t.weights()[1] - 0.187_944_053_375_869_63).abs() < 1e-15);
        assert!(a.iter().all(|c| c.im.abs() < 1e-15));
        assert_eq!(t.amplitude(1), Complex64::new(0.0, 0.0));
        assert_eq!(t.amplitude(10), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn vacuum_table() {
        let t = squeeze_coefficients(0.0, 0.0, 6).unwrap();
        assert_eq!(t.amplitudes()[0], Complex64::new(1.0, 0.0));
        assert!(t.amplitudes()[1..].iter().all(|c| c.norm() == 0.0));
        assert_eq!(t.tail_mass(), 0.0);
        assert_eq!(CoefficientTable::vacuum().n_max(), 0);
    }

    #[test]
    fn phase_flips_odd_pairs_only() {
        let a = squeeze_coefficients(1.0, 0.0, 40).unwrap();
        let b = squeeze_coefficients(1.0, PI, 40).unwrap();
        for (n, (x, y)) in a.amplitudes().iter().zip(b.amplitudes()).enumerate() {
            let sign = if n % 2 == 1 { -1.0 } else { 1.0 };
            assert!((x * sign - y).norm() < 1e-14, "n={n}");
            assert!((x.norm_sqr() - y.norm_sqr()).abs() < 1e-15);
        }
    }

    #[test]
    fn amplitudes_decrease() {
        let t = CoefficientTable::new(2.0, 0.0, 1e-12).unwrap();
        let w = t.weights();
        assert!(w.windows(2).all(|p| p[1] < p[0]));
    }

    #[test]
    fn rejects_bad_inputs() {
        assert_eq!(squeeze_coefficients(1.0, 0.0, 3), Err(SqueezeError::OddTruncation(3)));
        assert!(squeeze_coefficients(f64::INFINITY, 0.0, 2).is_err());
    }

    #[test]
    fn moments_match_closed_forms() {
        let t = CoefficientTable::new(1.0, 0.0, 1e-12).unwrap();
        let m = occupation_moments(&t);
        let nb = 1.0f64.sinh().powi(2);
        let rel = |a: f64, b: f64| ((a - b) / b).abs();
        assert!(rel(m.mean, 1.381_097_845_541_815_7) < 1e-10);
        assert!(rel(m.second_moment, 3.0 * nb * nb + 2.0 * nb) < 1e-8);
        assert!(rel(m.variance, 2.0 * (nb * nb + nb)) < 1e-8);

        let m0 = occupation_moments(&CoefficientTable::vacuum());
        assert_eq!((m0.mean, m0.second_moment, m0.variance), (0.0, 0.0, 0.0));
    }

    #[test]
    fn alternating_sum_matches_generating_function() {
        for &r in &[0.25, 0.5, 1.0, 2.0] {
            let t = CoefficientTable::new(r, 0.0, 1e-12).unwrap();
            let alt: f64 = t
                .weights()
                .iter()
                .enumerate()
                .map(|(n, w)| if n % 2 == 0 { *w } else { -*w })
                .sum();
            let expected = 1.0 / (r.cosh() * (1.0 + r.tanh().powi(2)).sqrt());
            assert!((alt - expected).abs() <= 1e-11, "r={r}");
        }
    }
}
