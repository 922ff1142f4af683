//! Maximum-likelihood estimation of the protocol phase `φ = ω_↑ T`.
//!
//! `p(+|φ)` is even and π-periodic in φ, so φ is identifiable only inside a
//! half-period next to a known recurrence, `[mπ, mπ + π/2]` or
//! `[mπ − π/2, mπ]`. The estimator scans a grid over that window and polishes
//! the best cell with golden-section search.

use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::probability::{fisher_information, readout, PROBABILITY_FLOOR};
use super::sampling::{sample_outcomes, Counts, MeasurementRecord};
use super::InferenceError;
use crate::rng::derive_seed;
use crate::squeezed::CoefficientTable;

const WINDOW_SLACK: f64 = 1e-9;

/// Estimation window inside one half-period adjacent to a recurrence.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
}

impl Window {
    pub fn new(lo: f64, hi: f64) -> Result<Self, InferenceError> {
        let bad = || InferenceError::InvalidWindow { lo, hi };
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(bad());
        }
        // Every quarter period [kπ/2, (k+1)π/2] touches a recurrence.
        let k = ((lo + WINDOW_SLACK) / FRAC_PI_2).floor();
        if hi > (k + 1.0) * FRAC_PI_2 + WINDOW_SLACK {
            return Err(bad());
        }
        Ok(Window { lo, hi })
    }

    /// `[mπ, mπ + π/2]`.
    pub fn after_recurrence(m: u32) -> Self {
        let lo = m as f64 * PI;
        Window { lo, hi: lo + FRAC_PI_2 }
    }

    /// The quarter period containing `phi`.
    pub fn containing(phi: f64) -> Self {
        let k = (phi / FRAC_PI_2).floor();
        Window {
            lo: k * FRAC_PI_2,
            hi: (k + 1.0) * FRAC_PI_2,
        }
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, phi: f64) -> bool {
        phi >= self.lo && phi <= self.hi
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MleOptions {
    pub grid_points: usize,
    pub refine_iters: usize,
}

impl Default for MleOptions {
    fn default() -> Self {
        MleOptions {
            grid_points: 400,
            refine_iters: 60,
        }
    }
}

/// `N₊ ln p(+|φ) + N₋ ln p(−|φ)` with floored probabilities. Counts may be
/// fractional (expected counts).
pub fn log_likelihood_counts(counts: Counts, table: &CoefficientTable, phi: f64) -> f64 {
    let r = readout(table, phi);
    let ln_plus = if r.p_minus < 0.5 {
        (-r.p_minus).ln_1p()
    } else {
        r.p_plus.max(PROBABILITY_FLOOR).ln()
    };
    let ln_minus = r.p_minus.max(PROBABILITY_FLOOR).ln();
    let mut ll = 0.0;
    if counts.plus > 0.0 {
        ll += counts.plus * ln_plus;
    }
    if counts.minus > 0.0 {
        ll += counts.minus * ln_minus;
    }
    ll
}

pub fn log_likelihood(record: &MeasurementRecord, table: &CoefficientTable, phi: f64) -> f64 {
    log_likelihood_counts(record.counts(), table, phi)
}

/// Golden-section search for a maximum of `f` on `[a, b]`.
pub fn golden_section_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..iters {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Grid-then-golden maximisation of a likelihood over `window`.
///
/// Fails with [`InferenceError::DegenerateLikelihood`] when the likelihood is
/// flat across the grid.
pub fn maximize_on_window(
    ll: impl Fn(f64) -> f64,
    window: &Window,
    opts: &MleOptions,
) -> Result<f64, InferenceError> {
    maximize_on_interval(ll, window.lo, window.hi, opts)
}

/// [`maximize_on_window`] on an arbitrary interval `[lo, hi]`.
///
/// Ties on the grid go to the point nearest the interval center.
pub fn maximize_on_interval(
    ll: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    opts: &MleOptions,
) -> Result<f64, InferenceError> {
    if opts.grid_points < MIN_GRID_POINTS {
        return Err(InferenceError::InvalidGrid(opts.grid_points));
    }
    let n = opts.grid_points;
    let step = (hi - lo) / (n - 1) as f64;
    let grid: Vec<f64> = (0..n).map(|i| lo + step * i as f64).collect();
    let values: Vec<f64> = grid.iter().map(|&x| ll(x)).collect();

    let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let worst = values.iter().copied().fold(f64::INFINITY, f64::min);
    if !best.is_finite() || best - worst <= 1e-12 * best.abs().max(1.0) {
        return Err(InferenceError::DegenerateLikelihood);
    }

    let center = 0.5 * (lo + hi);
    let idx = (0..n)
        .filter(|&i| values[i] == best)
        .min_by(|&i, &j| (grid[i] - center).abs().total_cmp(&(grid[j] - center).abs()))
        .expect("grid has a maximum");

    let a = grid[idx.saturating_sub(1)];
    let b = grid[(idx + 1).min(n - 1)];
    let (x, fx) = golden_section_max(&ll, a, b, opts.refine_iters);
    Ok(if fx >= best { x } else { grid[idx] })
}

pub fn mle_from_counts(
    counts: Counts,
    table: &CoefficientTable,
    window: &Window,
    opts: &MleOptions,
) -> Result<f64, InferenceError> {
    maximize_on_window(|phi| log_likelihood_counts(counts, table, phi), window, opts)
}

pub fn mle_estimate(
    record: &MeasurementRecord,
    table: &CoefficientTable,
    window: &Window,
    opts: &MleOptions,
) -> Result<f64, InferenceError> {
    mle_from_counts(record.counts(), table, window, opts)
}

/// Monte Carlo study of the estimator against the Cramér–Rao bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimatorStudy {
    pub phi_true: f64,
    pub shots: usize,
    pub batches: usize,
    pub seed: u64,
    pub window: Window,
    pub estimates: Vec<f64>,
    pub mean: f64,
    pub empirical_variance: f64,
    /// `F_C(φ_true)`.
    pub fisher: f64,
    /// `1/(M F_C(φ_true))`.
    pub crlb: f64,
    pub variance_ratio: f64,
    pub bias: f64,
    /// Standard error of the mean estimate.
    pub bias_standard_error: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
}

pub const MIN_BATCHES: usize = 30;
pub const MIN_GRID_POINTS: usize = 100;

/// Runs `batches` independent experiments of `shots` readouts each.
///
/// Batch `b` draws from sub-stream `derive_seed(seed, b)`; batches run in
/// parallel and are collected in index order.
pub fn estimator_study(
    table: &CoefficientTable,
    phi_true: f64,
    shots: usize,
    batches: usize,
    seed: u64,
    window: &Window,
    opts: &MleOptions,
) -> Result<EstimatorStudy, InferenceError> {
    if batches < MIN_BATCHES {
        return Err(InferenceError::TooFewBatches(batches));
    }
    let estimates = (0..batches)
        .into_par_iter()
        .map(|b| {
            let record = sample_outcomes(table, phi_true, shots, derive_seed(seed, b as u64))?;
            mle_estimate(&record, table, window, opts)
        })
        .collect::<Result<Vec<f64>, _>>()?;

    let n = batches as f64;
    let mean = estimates.iter().sum::<f64>() / n;
    let central = |k: i32| estimates.iter().map(|x| (x - mean).powi(k)).sum::<f64>() / n;
    let m2 = central(2);
    let empirical_variance = m2 * n / (n - 1.0);
    let (skewness, excess_kurtosis) = if m2 > 0.0 {
        (central(3) / m2.powf(1.5), central(4) / (m2 * m2) - 3.0)
    } else {
        (0.0, 0.0)
    };
    let fisher = fisher_information(table, phi_true);
    let crlb = 1.0 / (shots as f64 * fisher);
    Ok(EstimatorStudy {
        phi_true,
        shots,
        batches,
        seed,
        window: *window,
        mean,
        empirical_variance,
        fisher,
        crlb,
        variance_ratio: empirical_variance / crlb,
        bias: mean - phi_true,
        bias_standard_error: (empirical_variance / n).sqrt(),
        skewness,
        excess_kurtosis,
        estimates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inference::probability::success_probability;
    use crate::inference::sampling::Outcome;

    fn table(r: f64) -> CoefficientTable {
        CoefficientTable::post_quench(r).unwrap()
    }

    #[test]
    fn windows() {
        assert!(Window::new(PI, PI + FRAC_PI_2).is_ok());
        assert!(Window::new(PI - FRAC_PI_2, PI).is_ok());
        assert!(Window::new(PI + 0.1, PI + 0.9).is_ok());
        assert!(Window::new(PI - 0.1, PI + 0.1).is_err());
        assert!(Window::new(1.0, 0.5).is_err());
        assert!(Window::new(0.0, f64::NAN).is_err());
        assert_eq!(Window::after_recurrence(2), Window::new(2.0 * PI, 2.0 * PI + FRAC_PI_2).unwrap());
        assert_eq!(Window::containing(PI + 0.05), Window::after_recurrence(1));
    }

    #[test]
    fn likelihood_examples() {
        let t = table(1.0);
        let all_plus = MeasurementRecord {
            phi_true: 0.0,
            outcomes: vec![Outcome::Plus; 50],
            seed: 0,
            shots: 50,
        };
        assert_eq!(log_likelihood(&all_plus, &t, 0.0), 0.0);

        let mut mixed = all_plus.clone();
        mixed.outcomes[3] = Outcome::Minus;
        assert!(log_likelihood(&mixed, &t, 0.0) < -30.0);

        let mut permuted = mixed.clone();
        permuted.outcomes.swap(3, 40);
        permuted.outcomes.reverse();
        assert_eq!(log_likelihood(&mixed, &t, 1.1), log_likelihood(&permuted, &t, 1.1));
    }

    #[test]
    fn golden_section_finds_interior_maximum() {
        let (x, fx) = golden_section_max(|x| -(x - 0.3).powi(2), 0.0, 1.0, 80);
        assert!((x - 0.3).abs() < 1e-8);
        assert!(fx <= 0.0);
    }

    #[test]
    fn vacuum_likelihood_is_degenerate() {
        let t = CoefficientTable::vacuum();
        let rec = sample_outcomes(&t, PI + 0.05, 100, 1).unwrap();
        let w = Window::after_recurrence(1);
        assert_eq!(
            mle_estimate(&rec, &t, &w, &MleOptions::default()),
            Err(InferenceError::DegenerateLikelihood)
        );
    }

    #[test]
    fn noiseless_counts_recover_the_phase() {
        let t = table(1.0);
        let w = Window::after_recurrence(1);
        // far from the recurrence F_C is small and the optimum flatter
        for &(phi, tol) in &[(PI + 0.05, 1e-8), (PI + 0.4, 1e-8), (PI + 1.2, 1e-6)] {
            let p = success_probability(&t, phi);
            let counts = Counts {
                plus: 1000.0 * p,
                minus: 1000.0 * (1.0 - p),
            };
            let est = mle_from_counts(counts, &t, &w, &MleOptions::default()).unwrap();
            assert!((est - phi).abs() < tol, "phi={phi} est={est}");
        }
    }

    #[test]
    fn estimates_stay_in_window() {
        let t = table(1.0);
        let w = Window::after_recurrence(1);
        let study = estimator_study(&t, PI + 0.05, 200, 40, 5, &w, &MleOptions::default()).unwrap();
        assert!(study.estimates.iter().all(|x| w.contains(*x)));
        assert!(study.empirical_variance >= 0.0);
        assert!(estimator_study(&t, PI + 0.05, 200, 10, 5, &w, &MleOptions::default()).is_err());
    }
}
