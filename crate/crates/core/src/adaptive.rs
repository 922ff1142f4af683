//! Staged recurrence search for `ω_↑`.
//!
//! The experiment starts with weak squeezing and a wide prior window for
//! `ω_↑`. Each stage picks a recurrence index `m` small enough that the whole
//! window maps into one half-period of `p(+|ω t)`, reads the qubit out at a
//! comb of times straddling `mπ/ω` for every `ω` in the window, and fits `ω`
//! by maximum likelihood over all scan points. A stage whose fit does not
//! beat a structureless (constant `p`) model by the noise floor keeps the old
//! window. Otherwise the window shrinks to `ω̂ ± WINDOW_SIGMAS·σ_ω`, where
//! `σ_ω` is the Cramér–Rao width of that stage, and the next stage uses
//! stronger squeezing and a later recurrence.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::inference::{
    fisher_information, log_likelihood_counts, maximize_on_interval, sample_plus_count, success_probability,
    Counts, InferenceError, MleOptions,
};
use crate::rng::derive_seed;
use crate::squeezed::{CoefficientTable, SqueezeError, DEFAULT_TAIL_TOL};

/// Half-width of the next window in units of the stage's `σ_ω`.
pub const WINDOW_SIGMAS: f64 = 5.0;

/// Default threshold on `2 Δ ln L` against the constant-probability model.
pub const DEFAULT_NOISE_FLOOR: f64 = 9.0;

pub const DEFAULT_SCAN_POINTS: usize = 16;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AdaptiveError {
    #[error("no stage located a recurrence above the noise floor")]
    FailedLocalization { stages: Vec<StageReport> },
    #[error("invalid adaptive configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Squeeze(#[from] SqueezeError),
    #[error(transparent)]
    Inference(#[from] InferenceError),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StagePlan {
    pub r: f64,
    pub shots: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdaptiveConfig {
    /// Simulation ground truth, rad/ns.
    pub omega_true: f64,
    /// Prior window for `ω_↑`, rad/ns.
    pub prior_lo: f64,
    pub prior_hi: f64,
    pub stages: Vec<StagePlan>,
    pub scan_points: usize,
    pub seed: u64,
    pub tail_tol: f64,
    pub noise_floor: f64,
    pub mle: MleOptions,
}

impl AdaptiveConfig {
    pub fn new(omega_true: f64, prior_lo: f64, prior_hi: f64, stages: Vec<StagePlan>, seed: u64) -> Self {
        AdaptiveConfig {
            omega_true,
            prior_lo,
            prior_hi,
            stages,
            scan_points: DEFAULT_SCAN_POINTS,
            seed,
            tail_tol: DEFAULT_TAIL_TOL,
            noise_floor: DEFAULT_NOISE_FLOOR,
            mle: MleOptions::default(),
        }
    }

    fn validate(&self) -> Result<(), AdaptiveError> {
        let mut bad = Vec::new();
        if !(self.prior_lo > 0.0 && self.prior_lo < self.prior_hi && self.prior_hi.is_finite()) {
            bad.push("prior window must satisfy 0 < lo < hi");
        }
        if !(self.omega_true > 0.0 && self.omega_true.is_finite()) {
            bad.push("true frequency must be finite and > 0");
        }
        if self.stages.is_empty() {
            bad.push("at least one stage is required");
        }
        if self.stages.iter().any(|s| s.shots < self.scan_points) {
            bad.push("every stage needs at least one shot per scan point");
        }
        if self.scan_points < 2 {
            bad.push("scan_points must be >= 2");
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(AdaptiveError::InvalidConfig(bad.join("; ")))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageReport {
    pub stage: usize,
    pub r: f64,
    pub n_bar: f64,
    pub shots: usize,
    /// Recurrence index probed in this stage.
    pub recurrence: u32,
    /// Window entering the stage, rad/ns.
    pub window_lo: f64,
    pub window_hi: f64,
    pub times_ns: Vec<f64>,
    pub shots_per_time: Vec<usize>,
    pub plus_counts: Vec<usize>,
    /// Scan time with the largest `+` fraction.
    pub peak_time_ns: f64,
    /// `2 Δ ln L` of the best fit against a constant `p(+)`.
    pub likelihood_ratio: f64,
    pub localized: bool,
    pub omega_hat: Option<f64>,
    pub sigma_omega: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdaptiveReport {
    pub stages: Vec<StageReport>,
    pub omega_true: f64,
    pub omega_hat: f64,
    /// Cramér–Rao width of the final localized stage at the estimate.
    pub sigma_omega: f64,
    /// The same width evaluated at the true frequency.
    pub crlb_sigma: f64,
    pub error: f64,
    pub total_shots: usize,
    pub final_r: f64,
}

impl AdaptiveReport {
    /// `|ω̂ − ω| / σ_CRLB`.
    pub fn error_in_sigmas(&self) -> f64 {
        self.error.abs() / self.crlb_sigma
    }
}

/// Largest recurrence index that keeps `[lo, hi]` inside one half-period.
pub fn recurrence_index(lo: f64, hi: f64) -> u32 {
    let h = (hi - lo) / (hi + lo);
    (1.0 / (4.0 * h)).floor().clamp(1.0, u32::MAX as f64) as u32
}

/// Evenly spaced readout times covering `[mπ/hi, mπ/lo]`.
pub fn scan_times(lo: f64, hi: f64, m: u32, points: usize) -> Vec<f64> {
    let a = m as f64 * PI / hi;
    let b = m as f64 * PI / lo;
    (0..points)
        .map(|j| a + (b - a) * j as f64 / (points - 1) as f64)
        .collect()
}

fn ln_bernoulli(plus: f64, minus: f64, p_plus: f64) -> f64 {
    let mut ll = 0.0;
    if plus > 0.0 {
        ll += plus * p_plus.ln();
    }
    if minus > 0.0 {
        ll += minus * (-p_plus).ln_1p();
    }
    ll
}

/// `Σ_j n_j t_j² F_C(ω t_j)`, the Fisher information about `ω`.
fn omega_fisher(table: &CoefficientTable, omega: f64, times: &[f64], shots: &[usize]) -> f64 {
    times
        .iter()
        .zip(shots)
        .map(|(&t, &n)| n as f64 * t * t * fisher_information(table, omega * t))
        .sum()
}

fn run_stage(
    cfg: &AdaptiveConfig,
    index: usize,
    plan: &StagePlan,
    lo: f64,
    hi: f64,
) -> Result<(StageReport, f64), AdaptiveError> {
    let table = CoefficientTable::new(plan.r, 0.0, cfg.tail_tol)?;
    let m = recurrence_index(lo, hi);
    let times = scan_times(lo, hi, m, cfg.scan_points);
    let base = plan.shots / cfg.scan_points;
    let extra = plan.shots % cfg.scan_points;
    let shots: Vec<usize> = (0..cfg.scan_points).map(|j| base + usize::from(j < extra)).collect();
    let stage_seed = derive_seed(cfg.seed, index as u64);
    let plus: Vec<usize> = times
        .iter()
        .zip(&shots)
        .enumerate()
        .map(|(j, (&t, &n))| {
            let p = success_probability(&table, cfg.omega_true * t);
            sample_plus_count(p, n, derive_seed(stage_seed, j as u64))
        })
        .collect();

    let peak = (0..times.len())
        .max_by(|&a, &b| {
            let fa = plus[a] as f64 / shots[a] as f64;
            let fb = plus[b] as f64 / shots[b] as f64;
            fa.total_cmp(&fb).then(b.cmp(&a))
        })
        .expect("non-empty scan");

    let counts: Vec<Counts> = plus
        .iter()
        .zip(&shots)
        .map(|(&k, &n)| Counts {
            plus: k as f64,
            minus: (n - k) as f64,
        })
        .collect();
    let ll = |omega: f64| -> f64 {
        times
            .iter()
            .zip(&counts)
            .map(|(&t, &c)| log_likelihood_counts(c, &table, omega * t))
            .sum()
    };
    let total_plus: usize = plus.iter().sum();
    let p_flat = total_plus as f64 / plan.shots as f64;
    let ll_flat = ln_bernoulli(total_plus as f64, (plan.shots - total_plus) as f64, p_flat);

    let fit = match maximize_on_interval(ll, lo, hi, &cfg.mle) {
        Ok(w) => Some(w),
        Err(InferenceError::DegenerateLikelihood) => None,
        Err(e) => return Err(e.into()),
    };
    let likelihood_ratio = fit.map_or(0.0, |w| 2.0 * (ll(w) - ll_flat));
    let sigma = fit.map(|w| 1.0 / omega_fisher(&table, w, &times, &shots).sqrt());
    let localized = likelihood_ratio > cfg.noise_floor && sigma.is_some_and(f64::is_finite);
    let crlb = 1.0 / omega_fisher(&table, cfg.omega_true, &times, &shots).sqrt();

    let report = StageReport {
        stage: index,
        r: plan.r,
        n_bar: table.n_bar(),
        shots: plan.shots,
        recurrence: m,
        window_lo: lo,
        window_hi: hi,
        peak_time_ns: times[peak],
        times_ns: times,
        shots_per_time: shots,
        plus_counts: plus,
        likelihood_ratio,
        localized,
        omega_hat: if localized { fit } else { None },
        sigma_omega: if localized { sigma } else { None },
    };
    Ok((report, crlb))
}

/// Runs the staged search. Stages are executed in the given order.
///
/// Fails with [`AdaptiveError::FailedLocalization`] (carrying every stage
/// report) when no stage clears the noise floor.
pub fn adaptive_search(cfg: &AdaptiveConfig) -> Result<AdaptiveReport, AdaptiveError> {
    cfg.validate()?;
    let (mut lo, mut hi) = (cfg.prior_lo, cfg.prior_hi);
    let mut stages = Vec::with_capacity(cfg.stages.len());
    let mut last: Option<(f64, f64, f64, f64)> = None;
    for (i, plan) in cfg.stages.iter().enumerate() {
        let (report, crlb) = run_stage(cfg, i, plan, lo, hi)?;
        if let (Some(w), Some(s)) = (report.omega_hat, report.sigma_omega) {
            let half = WINDOW_SIGMAS * s;
            let (new_lo, new_hi) = ((w - half).max(lo), (w + half).min(hi));
            if new_lo < new_hi {
                lo = new_lo;
                hi = new_hi;
            }
            last = Some((w, s, crlb, plan.r));
        }
        stages.push(report);
    }
    let Some((omega_hat, sigma_omega, crlb_sigma, final_r)) = last else {
        return Err(AdaptiveError::FailedLocalization { stages });
    };
    Ok(AdaptiveReport {
        total_shots: cfg.stages.iter().map(|s| s.shots).sum(),
        stages,
        omega_true: cfg.omega_true,
        omega_hat,
        sigma_omega,
        crlb_sigma,
        error: omega_hat - cfg.omega_true,
        final_r,
    })
}
