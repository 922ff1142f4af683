use std::f64::consts::PI;

use quenchsim::inference::{
    estimator_study, fisher_information, mle_estimate, sample_outcomes, success_probability, MleOptions, Window,
};
use quenchsim::rng::derive_seed;
use quenchsim::CoefficientTable;

fn table(r: f64) -> CoefficientTable {
    CoefficientTable::post_quench(r).unwrap()
}

/// Phase in `(lo, hi)` where `p(+|φ)` equals `target`, by bisection on a
/// monotone branch.
fn phase_at_probability(t: &CoefficientTable, target: f64, mut lo: f64, mut hi: f64) -> f64 {
    let decreasing = success_probability(t, lo) > success_probability(t, hi);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let above = success_probability(t, mid) > target;
        if above == decreasing {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn readout_never_drops_to_one_half() {
    // Re (1 − tanh²r e^{2iφ})^{−1/2} > 0, so p(+|φ) = ½(1 + ⟨σ_x⟩) > ½.
    for &r in &[0.5, 1.0, 1.5, 2.0] {
        let t = table(r);
        let min = (0..=4000)
            .map(|k| success_probability(&t, PI * k as f64 / 4000.0))
            .fold(f64::INFINITY, f64::min);
        assert!(min > 0.5, "r={r} min p={min}");
    }
}

#[test]
fn plus_fraction_matches_binomial_statistics() {
    let t = table(1.5);
    let target = 0.8;
    let phi = phase_at_probability(&t, target, 0.0, PI / 2.0);
    assert!((success_probability(&t, phi) - target).abs() < 1e-12);
    let shots = 100_000;
    let rec = sample_outcomes(&t, phi, shots, 77).unwrap();
    let frac = rec.counts().plus / shots as f64;
    let sigma = (target * (1.0 - target) / shots as f64).sqrt();
    assert!((frac - target).abs() < 5.0 * sigma, "frac={frac}");
}

#[test]
fn mle_lands_within_four_crlb_widths() {
    let t = table(1.0);
    let phi = PI + 0.05;
    let shots = 1000;
    let w = Window::new(PI, PI + PI / 2.0).unwrap();
    let half_width = 4.0 / (shots as f64 * fisher_information(&t, phi)).sqrt();
    let inside = (0..200u64)
        .filter(|&b| {
            let rec = sample_outcomes(&t, phi, shots, derive_seed(31, b)).unwrap();
            let est = mle_estimate(&rec, &t, &w, &MleOptions::default()).unwrap();
            assert!(w.contains(est));
            (est - phi).abs() <= half_width
        })
        .count();
    assert!(inside >= 198, "{inside}/200 inside");
}

#[test]
fn study_respects_the_cramer_rao_bound() {
    let t = table(1.0);
    let w = Window::after_recurrence(1);
    let batches = 200;
    let s = estimator_study(&t, PI + 0.05, 2000, batches, 5, &w, &MleOptions::default()).unwrap();
    assert!(s.estimates.iter().all(|e| w.contains(*e)));
    assert!(s.empirical_variance >= s.crlb * (1.0 - 3.0 / (batches as f64).sqrt()));
    assert!(s.bias.abs() <= 3.0 * s.bias_standard_error);
    assert_eq!(s.estimates.len(), batches);
}

#[test]
fn crlb_ratio_follows_fisher_ratio() {
    let w = Window::after_recurrence(1);
    let phi = PI + 0.05;
    let (a, b) = (table(1.0), table(1.5));
    let sa = estimator_study(&a, phi, 500, 30, 1, &w, &MleOptions::default()).unwrap();
    let sb = estimator_study(&b, phi, 500, 30, 1, &w, &MleOptions::default()).unwrap();
    let want = fisher_information(&b, phi) / fisher_information(&a, phi);
    assert!((sa.crlb / sb.crlb - want).abs() < 1e-12 * want);
}

#[test]
fn study_does_not_depend_on_thread_count() {
    let t = table(1.0);
    let w = Window::after_recurrence(1);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| estimator_study(&t, PI + 0.1, 300, 40, 8, &w, &MleOptions::default()).unwrap())
    };
    assert_eq!(run(1), run(4));
}
