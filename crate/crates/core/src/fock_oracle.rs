//! Brute-force reference for the squeezed vacuum.
//!
//! Builds the squeezing generator `G = (z* m² − z m†²)/2` in a truncated Fock
//! basis from the ladder-operator matrix elements `m|n⟩ = √n |n−1⟩` and
//! applies `exp(G)` to the vacuum. Nothing here uses the closed-form
//! amplitudes, so agreement with [`crate::squeezed`] is a genuine check.
//!
//! `G` is banded (offsets ±2), so `exp(G)|0⟩` is computed as `s` applications
//! of a Taylor series of `exp(G/s)` with `s ≥ ‖G‖₁`. The truncated generator is
//! anti-Hermitian, so every step is unitary up to rounding.

use num_complex::Complex64;

/// Truncated squeezing generator, stored by its two nonzero diagonals.
#[derive(Clone, Debug)]
pub struct SqueezeGenerator {
    /// `G[n−2][n] = (z*/2) ⟨n−2|m²|n⟩` for `n ≥ 2`, indexed by `n`.
    lowering: Vec<Complex64>,
    /// `G[n+2][n] = −(z/2) ⟨n+2|m†²|n⟩` for `n + 2 < dim`, indexed by `n`.
    raising: Vec<Complex64>,
}

/// `⟨n−1|m|n⟩`.
fn ladder_element(n: usize) -> f64 {
    (n as f64).sqrt()
}

impl SqueezeGenerator {
    pub fn new(r: f64, theta: f64, dim: usize) -> Self {
        let z = Complex64::from_polar(r, theta);
        let lowering = (0..dim)
            .map(|n| {
                if n < 2 {
                    Complex64::new(0.0, 0.0)
                } else {
                    // m² = m·m: ⟨n−2|m|n−1⟩⟨n−1|m|n⟩
                    z.conj() * 0.5 * (ladder_element(n - 1) * ladder_element(n))
                }
            })
            .collect();
        let raising = (0..dim)
            .map(|n| {
                if n + 2 >= dim {
                    Complex64::new(0.0, 0.0)
                } else {
                    // ⟨n+2|m†²|n⟩ = ⟨n|m²|n+2⟩
                    -z * 0.5 * (ladder_element(n + 1) * ladder_element(n + 2))
                }
            })
            .collect();
        SqueezeGenerator { lowering, raising }
    }

    pub fn dim(&self) -> usize {
        self.lowering.len()
    }

    /// `out = G v`.
    fn apply(&self, v: &[Complex64], out: &mut [Complex64]) {
        let dim = self.dim();
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            if i + 2 < dim {
                acc += self.lowering[i + 2] * v[i + 2];
            }
            if i >= 2 {
                acc += self.raising[i - 2] * v[i - 2];
            }
            *o = acc;
        }
    }

    /// Max column 1-norm.
    fn norm_one(&self) -> f64 {
        (0..self.dim())
            .map(|n| {
                let up = if n >= 2 { self.lowering[n].norm() } else { 0.0 };
                up + self.raising[n].norm()
            })
            .fold(0.0, f64::max)
    }

    /// `exp(G) v`.
    pub fn exp_apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let dim = self.dim();
        assert_eq!(v.len(), dim);
        let steps = self.norm_one().ceil().max(1.0) as usize;
        let scale = 1.0 / steps as f64;
        let mut state = v.to_vec();
        let mut term = vec![Complex64::new(0.0, 0.0); dim];
        let mut next = vec![Complex64::new(0.0, 0.0); dim];
        for _ in 0..steps {
            term.copy_from_slice(&state);
            let mut acc = state.clone();
            for k in 1..=60 {
                self.apply(&term, &mut next);
                let f = scale / k as f64;
                let mut size = 0.0f64;
                for (t, n) in term.iter_mut().zip(&next) {
                    *t = n * f;
                    size = size.max(t.norm());
                }
                for (a, t) in acc.iter_mut().zip(&term) {
                    *a += t;
                }
                if size < 1e-18 {
                    break;
                }
            }
            state = acc;
        }
        state
    }
}

/// Column 0 of `exp(G)` in a `dim`-dimensional Fock space: the amplitudes
/// `⟨n|S(r e^{iθ})|0⟩` for `n < dim`, odd entries included.
///
/// `dim` should exceed the Fock index of interest by a margin large enough
/// that the state's weight near the cut-off is negligible.
pub fn oracle_coefficients(r: f64, theta: f64, dim: usize) -> Vec<Complex64> {
    assert!(dim > 0, "oracle dimension must be positive");
    let gen = SqueezeGenerator::new(r, theta, dim);
    let mut vacuum = vec![Complex64::new(0.0, 0.0); dim];
    vacuum[0] = Complex64::new(1.0, 0.0);
    gen.exp_apply(&vacuum)
}
